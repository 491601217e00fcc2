"""Exact exponential polynomials ``sum_k P_k(x) e^{kx}`` over the rationals.

Coefficients are :class:`fractions.Fraction`, stored dense in ascending
order.  A polynomial with no coefficients is the zero polynomial and has
degree -1.  Every constructor trims trailing zeros, so degrees are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import mpmath

Rational = Fraction

DEFAULT_DPS = 60


class ExpPolyParseError(ValueError):
    """Malformed ExpPoly JSON; ``position`` locates the offending item."""

    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{message} at {position}" if position else message)


def _trim(coeffs: Iterable) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Poly:
    coeffs: tuple[Fraction, ...] = ()

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def derivative(self) -> Poly:
        return Poly(j * c for j, c in enumerate(self.coeffs) if j)

    def at_zero(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def poly_degree(p: Poly) -> int:
    return p.degree


@dataclass(frozen=True)
class ExpPoly:
    """``parts[k]`` is the polynomial multiplying ``e^{kx}``.

    The top part is never zero; the zero function has no parts and order -1.
    """

    parts: tuple[Poly, ...] = ()

    def __init__(self, parts: Iterable = ()):
        ps = [p if isinstance(p, Poly) else Poly(p) for p in parts]
        while ps and not ps[-1]:
            ps.pop()
        object.__setattr__(self, "parts", tuple(ps))

    @property
    def order(self) -> int:
        return len(self.parts) - 1

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.parts)

    def is_zero(self) -> bool:
        return not self.parts

    def at_zero(self) -> Fraction:
        return sum((p.at_zero() for p in self.parts), Fraction(0))

    def __str__(self) -> str:
        terms = []
        for k, p in enumerate(self.parts):
            if not p:
                continue
            poly = " + ".join(
                f"({c})" + (f"*x^{j}" if j else "") for j, c in enumerate(p.coeffs) if c
            )
            terms.append(f"[{poly}]" + (f"*e^({k}x)" if k else ""))
        return " + ".join(terms) or "0"

    def to_json(self) -> dict:
        return {"parts": [[str(c) for c in p.coeffs] for p in self.parts]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> ExpPoly:
        if not isinstance(obj, dict) or "parts" not in obj:
            raise ExpPolyParseError("expected an object with a 'parts' key", "$")
        parts = obj["parts"]
        if not isinstance(parts, list):
            raise ExpPolyParseError("'parts' must be a list", "$.parts")
        polys = []
        for k, part in enumerate(parts):
            if not isinstance(part, list):
                raise ExpPolyParseError("part must be a list", f"$.parts[{k}]")
            coeffs = []
            for j, c in enumerate(part):
                if isinstance(c, bool) or not isinstance(c, (str, int)):
                    raise ExpPolyParseError(
                        "coefficient must be an integer or 'p/q' string",
                        f"$.parts[{k}][{j}]",
                    )
                try:
                    coeffs.append(Fraction(c))
                except (ValueError, ZeroDivisionError):
                    raise ExpPolyParseError(
                        f"bad rational {c!r}", f"$.parts[{k}][{j}]"
                    ) from None
            polys.append(Poly(coeffs))
        return cls(polys)

    @classmethod
    def loads(cls, text: str) -> ExpPoly:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ExpPolyParseError(
                exc.msg, f"line {exc.lineno} column {exc.colno}"
            ) from None
        return cls.from_json(obj)


def differentiate(f: ExpPoly) -> ExpPoly:
    """Exact derivative: the order-k part P becomes P' + kP."""
    out = []
    for k, p in enumerate(f.parts):
        dp = p.derivative().coeffs
        out.append(
            Poly(
                (dp[j] if j < len(dp) else 0) + k * c for j, c in enumerate(p.coeffs)
            )
        )
    return ExpPoly(out)


def reduce_order(f: ExpPoly) -> ExpPoly:
    """Return ``f * e^{-x}``; requires a vanishing order-0 part."""
    if f.is_zero():
        return f
    if f.parts[0]:
        raise ValueError(
            f"cannot reduce order: order-0 part {f.parts[0].coeffs} is nonzero"
        )
    return ExpPoly(f.parts[1:])


def taylor_coeffs_at_zero(f: ExpPoly, count: int) -> list[Fraction]:
    if count < 0:
        raise ValueError("count must be nonnegative")
    out = []
    g = f
    for j in range(count):
        out.append(g.at_zero() / factorial(j))
        g = differentiate(g)
    return out


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def evaluate(f: ExpPoly, x, dps: int = DEFAULT_DPS):
    """Numeric value of ``f(x)`` carried out at ``dps`` decimal digits."""
    with mpmath.workdps(dps):
        xv = _to_mpf(x)
        ex = mpmath.exp(xv)
        acc = mpmath.mpf(0)
        for p in reversed(f.parts):
            acc = acc * ex + p(xv)
        return +acc


# S1, S2, S3: the three exponential polynomials whose nonnegativity on
# [0, inf) gives the three inequalities of the branch-derivative chain.
_CASE_TABLES: dict[str, list[list[int]]] = {
    "S1": [
        [-2, -1],
        [8, -3, -3],
        [-14, 9, -6, -5],
        [16, 0, 18, 0, -2],
        [-14, -9, -6, 5],
        [8, 3, -3],
        [-2, 1],
    ],
    "S2": [
        [-4, -1],
        [24, -15, -5],
        [-64, 70, -60, -50, -20, -4],
        [104, -91, 285, 100, 20, -1, -1],
        [-120, 0, -440],
        [104, 91, 285, -100, 20, 1, -1],
        [-64, -70, -60, 50, -20, 4],
        [24, 15, -5],
        [-4, 1],
    ],
    "S3": [
        [1, -2],
        [-5, 20, 0, 10, 5, 1],
        [9, -72, 0, -70, -30, -11, -2],
        [-5, 130, 0, 160, 25, 10],
        [-5, -130, 0, -160, 25, -10],
        [9, 72, 0, 70, -30, 11, -2],
        [-5, -20, 0, -10, 5, -1],
        [1, 2],
    ],
}

# The published S3 table prints -10x^5 in the e^{3x} part.  That sign is
# incompatible with the R3 factorization and makes early lambda entries
# negative; it is kept only so the discrepancy can be demonstrated.
_PRINTED_OVERRIDES: dict[str, dict[tuple[int, int], int]] = {
    "S3": {(3, 5): -10},
}

CASE_IDS: tuple[str, ...] = tuple(_CASE_TABLES)


def builtin_case(case_id: str, as_printed: bool = False) -> ExpPoly:
    """One of the built-in cases ``"S1"``, ``"S2"``, ``"S3"``.

    With ``as_printed`` the coefficient table is returned verbatim as
    published, including its known sign error.
    """
    try:
        table = [list(p) for p in _CASE_TABLES[case_id]]
    except KeyError:
        raise ValueError(
            f"unknown case {case_id!r}; expected one of {CASE_IDS}"
        ) from None
    if as_printed:
        for (k, j), c in _PRINTED_OVERRIDES.get(case_id, {}).items():
            table[k][j] = c
    return ExpPoly(table)


def from_coeffs(parts: Sequence[Sequence]) -> ExpPoly:
    return ExpPoly([Poly(p) for p in parts])
