"""Certified computations for exponential polynomials and the Ramanujan sequence."""

from .certifier import Certificate, certify, compare_to_paper, verify_certificate
from .exppoly import ExpPoly, Poly, builtin_case, differentiate, evaluate, reduce_order
from .intervals import RationalInterval
from .ramanujan import k_interval, theta_interval

__all__ = [
    "Certificate",
    "ExpPoly",
    "Poly",
    "RationalInterval",
    "builtin_case",
    "certify",
    "compare_to_paper",
    "differentiate",
    "evaluate",
    "k_interval",
    "reduce_order",
    "theta_interval",
    "verify_certificate",
]

__version__ = "0.1.0"
