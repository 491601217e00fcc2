"""Rigorous enclosures of the Ramanujan numbers and derived sequences.

``theta_0 = 1/2`` and, for ``n >= 1``,
``theta_n = (e^n / 2 - sum_{k<n} n^k / k!) * n! / n^n``.
All arithmetic is exact rational; only ``e^n`` is enclosed, by a truncated
Maclaurin series plus an explicit geometric tail bound.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .intervals import RationalInterval

THIRD = Fraction(1, 3)
KOUMANDOS_CONST = Fraction(4, 135)
K_LOWER = Fraction(2, 21)
K_UPPER = Fraction(8, 45)

DEFAULT_BITS = 128
MAX_BITS = 4096
_GUARD = 10


class PrecisionError(ArithmeticError):
    """The enclosure is too wide for the requested operation; raise ``bits``."""


class SequenceKind(enum.Enum):
    THETA = "theta"  # theta_n
    SHIFTED = "shifted"  # (n + 1)(theta_n - 1/3)
    KOUMANDOS = "koumandos"  # 4/135 - n(theta_n - 1/3)


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNRESOLVED = "unresolved"


def _exp_partial(n: int, K: int) -> int:
    """``K! * sum_{k<=K} n^k / k!`` as an integer."""
    total = 0
    p = 1  # K!/k! for k = K, K-1, ..., 0
    for k in range(K, -1, -1):
        total += n**k * p
        p *= k or 1
    return total


def _tail_ok(n: int, K: int, num: int, bits: int) -> bool:
    # tail <= n^{K+1}/(K+1)! * (K+2)/(K+2-n); need tail <= 2^-bits * num/K!
    return n ** (K + 1) * (K + 2) << bits <= num * (K + 1) * (K + 2 - n)


def _pick_K(n: int, bits: int) -> int:
    K = 2 * n
    # float estimate of log2 of relative tail, then exact verification
    ln2 = math.log(2)
    while True:
        est = ((K + 1) * math.log(n) - math.lgamma(K + 2) - n) / ln2
        if est < -bits - 2:
            break
        K += max(1, K // 16)
    return K


@lru_cache(maxsize=None)
def exp_interval(n: int, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of ``e^n`` with width below ``2^-bits * e^n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return RationalInterval.point(1)
    target = bits + _GUARD
    K = _pick_K(n, target)
    while True:
        num = _exp_partial(n, K)
        if _tail_ok(n, K, num, target):
            break
        K += 8
    fk = math.factorial(K)
    lo = Fraction(num, fk)
    tail = Fraction(n ** (K + 1) * (K + 2), math.factorial(K + 1) * (K + 2 - n))
    return RationalInterval(lo, lo + tail).round_out(target + 2)


@lru_cache(maxsize=None)
def theta_interval(n: int, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of ``theta_n`` with width at most ``2^-bits``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return RationalInterval.point(Fraction(1, 2))
    fn = math.factorial(n)
    scale = Fraction(fn, n**n)
    partial = Fraction(sum(n**k * (fn // math.factorial(k)) for k in range(n)), fn)
    # e^n n!/n^n ~ sqrt(2 pi n) is the amplification of the e^n error
    extra = max(0, int(math.log2(math.sqrt(2 * math.pi * n) + 1)) + 3)
    while True:
        e = exp_interval(n, bits + extra)
        th = (e * Fraction(1, 2) - partial) * scale
        if th.width <= Fraction(1, 1 << (bits + 1)):
            return th.round_out(bits + 3)
        extra += 16


def k_interval(n: int, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of ``k_n`` in ``theta_n = 1/3 + (4/135)/(n + k_n)``."""
    d = theta_interval(n, bits) - THIRD
    if d.lo <= 0:
        raise PrecisionError(f"theta_{n} enclosure touches 1/3 at {bits} bits")
    return KOUMANDOS_CONST * d.reciprocal() - n


def sequence_interval(kind: SequenceKind, j: int, bits: int) -> RationalInterval:
    th = theta_interval(j, bits)
    if kind is SequenceKind.THETA:
        return th
    if kind is SequenceKind.SHIFTED:
        return (th - THIRD) * (j + 1)
    if kind is SequenceKind.KOUMANDOS:
        return KOUMANDOS_CONST - (th - THIRD) * j
    raise ValueError(f"unknown sequence kind {kind!r}")


def difference_interval(
    kind: SequenceKind, k: int, n: int, bits: int
) -> RationalInterval:
    """``sum_m binom(n, m) (-1)^m a_{k+m}`` in interval arithmetic."""
    acc = RationalInterval.point(0)
    for m in range(n + 1):
        term = sequence_interval(kind, k + m, bits) * math.comb(n, m)
        acc = acc - term if m % 2 else acc + term
    return acc


def difference_sign(kind: SequenceKind, k: int, n: int, bits: int = DEFAULT_BITS) -> Sign:
    if k < 0 or n < 0:
        raise ValueError("k and n must be nonnegative")
    iv = difference_interval(SequenceKind(kind), k, n, bits)
    if iv.lo > 0:
        return Sign.POSITIVE
    if iv.hi < 0:
        return Sign.NEGATIVE
    return Sign.UNRESOLVED


def resolve_difference_sign(
    kind: SequenceKind, k: int, n: int, bits: int = 64, cap: int = MAX_BITS
) -> tuple[Sign, int]:
    """Double ``bits`` until the sign is decided or ``cap`` is exceeded."""
    while True:
        s = difference_sign(kind, k, n, bits)
        if s is not Sign.UNRESOLVED or bits >= cap:
            return s, bits
        bits = min(2 * bits, cap)


def monotone_grid(
    kind: SequenceKind, depth: int, bits: int = 64, cap: int = MAX_BITS
) -> dict[tuple[int, int], tuple[Sign, int]]:
    """Signs of all differences with ``k + n <= depth``."""
    return {
        (k, n): resolve_difference_sign(kind, k, n, bits, cap)
        for k in range(depth + 1)
        for n in range(depth + 1 - k)
    }


def _raw_to_fraction(raw) -> Fraction:
    return Fraction(*mpmath.libmp.to_rational(raw))


def _power_interval(n: int, alpha, bits: int) -> RationalInterval:
    """Enclosure of ``n ** alpha``; exact for integer ``alpha``."""
    a = Fraction(alpha)
    if a.denominator == 1:
        return RationalInterval.point(Fraction(n) ** a.numerator)
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = bits + 20
    try:
        expo = iv.mpf(a.numerator) / a.denominator
        p = iv.exp(expo * iv.log(n))
        lo, hi = p._mpi_
        return RationalInterval(_raw_to_fraction(lo), _raw_to_fraction(hi))
    finally:
        iv.prec = saved


def sigma_coeffs(alpha, N: int, bits: int = DEFAULT_BITS) -> list[RationalInterval]:
    """Normalized coefficients ``(theta_n - 1/3) / ((theta_1 - 1/3) n^alpha)``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    d1 = theta_interval(1, bits) - THIRD
    out = [RationalInterval.point(1)]
    for n in range(2, N + 1):
        dn = theta_interval(n, bits) - THIRD
        out.append(dn / (d1 * _power_interval(n, alpha, bits)))
    return out


@dataclass(frozen=True)
class ThetaRow:
    n: int
    theta: RationalInterval
    k: RationalInterval | None


def theta_table(max_n: int, bits: int = DEFAULT_BITS) -> list[ThetaRow]:
    rows = []
    for n in range(max_n + 1):
        th = theta_interval(n, bits)
        k = k_interval(n, bits) if th.lo > THIRD else None
        rows.append(ThetaRow(n, th, k))
    return rows


def table_csv(rows: list[ThetaRow], digits: int = 30) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "theta_lo", "theta_hi", "k_lo", "k_hi"])
    for r in rows:
        tl, th = r.theta.decimal(digits)
        kl, kh = r.k.decimal(digits) if r.k is not None else ("", "")
        w.writerow([r.n, tl, th, kl, kh])
    return buf.getvalue()


def table_json(rows: list[ThetaRow]) -> str:
    return json.dumps(
        [
            {
                "n": r.n,
                "theta_lo": str(r.theta.lo),
                "theta_hi": str(r.theta.hi),
                "k_lo": None if r.k is None else str(r.k.lo),
                "k_hi": None if r.k is None else str(r.k.hi),
            }
            for r in rows
        ],
        indent=2,
    )
