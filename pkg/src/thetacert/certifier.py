"""Positivity certificates for exponential polynomials on ``[0, inf)``.

For ``f = f_0`` of order ``m`` and multidegree ``(n_0, ..., n_m)`` the
reduction ``f_{k+1} = f_k^{(n_k+1)} e^{-x}`` ends after ``m`` steps.  If
every head value ``f_k^{(s)}(0)``, ``s <= n_k``, is nonnegative then every
Maclaurin coefficient of ``f`` is nonnegative, so ``f >= 0`` for ``x >= 0``.
The head values, in the order computed, form the lambda vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exppoly import CASE_IDS, ExpPoly, builtin_case, differentiate, evaluate, reduce_order

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"


class CertificationError(RuntimeError):
    """Degree bookkeeping broke: an order-0 part survived its derivatives."""


@dataclass(frozen=True)
class StageRecord:
    stage_index: int
    input_degrees: tuple[int, ...]
    head_values: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {
            "stage": self.stage_index,
            "degrees": list(self.input_degrees),
            "head_values": [str(v) for v in self.head_values],
        }


@dataclass(frozen=True)
class Certificate:
    input: ExpPoly
    order: int
    degrees: tuple[int, ...]
    mu: int
    lam: tuple[Fraction, ...]
    stages: tuple[StageRecord, ...]
    verdict: str

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "degrees": list(self.degrees),
            "mu": self.mu,
            "lambda": [str(v) for v in self.lam],
            "stages": [s.to_json() for s in self.stages],
            "verdict": self.verdict,
            "input": self.input.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> Certificate:
        stages = tuple(
            StageRecord(
                s["stage"],
                tuple(s["degrees"]),
                tuple(Fraction(v) for v in s["head_values"]),
            )
            for s in obj["stages"]
        )
        return cls(
            input=ExpPoly.from_json(obj["input"]),
            order=obj["order"],
            degrees=tuple(obj["degrees"]),
            mu=obj["mu"],
            lam=tuple(Fraction(v) for v in obj["lambda"]),
            stages=stages,
            verdict=obj["verdict"],
        )


def multidegree(f: ExpPoly) -> tuple[int, ...]:
    return f.degrees


def mu(f: ExpPoly) -> int:
    return sum(n + 1 for n in f.degrees)


def _stage_heads(g: ExpPoly) -> tuple[list[Fraction], ExpPoly]:
    """Head values of one stage and the next stage's input."""
    n0 = g.parts[0].degree
    heads = []
    for _ in range(n0 + 1):
        heads.append(g.at_zero())
        g = differentiate(g)
    return heads, g


def certify(f: ExpPoly, early_stop: bool = False) -> Certificate:
    if f.is_zero():
        raise ValueError("certify needs a nonzero exponential polynomial")
    stages: list[StageRecord] = []
    lam: list[Fraction] = []
    g = f
    stopped = False
    for k in range(f.order + 1):
        degs = g.degrees
        n0 = degs[0]
        heads = []
        for _ in range(n0 + 1):
            v = g.at_zero()
            heads.append(v)
            lam.append(v)
            if early_stop and v < 0:
                stopped = True
                break
            g = differentiate(g)
        stages.append(StageRecord(k, degs, tuple(heads)))
        if stopped or k == f.order:
            break
        if g.parts[0]:
            raise CertificationError(
                f"stage {k}: order-0 part {g.parts[0].coeffs} did not vanish"
            )
        g = reduce_order(g)
        if g.order != f.order - k - 1:
            raise CertificationError(f"stage {k}: order dropped to {g.order}")
    verdict = CERTIFIED if not stopped and all(v >= 0 for v in lam) else INCONCLUSIVE
    return Certificate(
        input=f,
        order=f.order,
        degrees=f.degrees,
        mu=mu(f),
        lam=tuple(lam),
        stages=tuple(stages),
        verdict=verdict,
    )


@dataclass
class Replay:
    """Outcome of :func:`verify_certificate`; truthy iff every check passed."""

    ok: bool
    mismatches: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_certificate(
    f: ExpPoly, c: Certificate, samples: int = 8, dps: int = 60
) -> Replay:
    """Replay the reduction independently of :func:`certify`.

    Head values are recomputed from ``f``, and each step
    ``f_k^{(n_k+1)}(x) = e^x f_{k+1}(x)`` is checked numerically at
    ``samples`` points of ``[0, 5]``.
    """
    bad: list[str] = []
    if c.input != f:
        bad.append("certificate input differs from f")
    if c.order != f.order:
        bad.append(f"order {c.order} != {f.order}")
    if tuple(c.degrees) != f.degrees:
        bad.append(f"degrees {list(c.degrees)} != {list(f.degrees)}")
    if c.mu != mu(f):
        bad.append(f"mu {c.mu} != {mu(f)}")
    concat = [v for s in c.stages for v in s.head_values]
    if list(c.lam) != concat:
        bad.append("lambda is not the concatenation of stage head values")

    points = [Fraction(5 * i, max(samples - 1, 1)) for i in range(samples)]
    tol = mpmath.mpf(10) ** (-(dps - 15))
    g = f
    lam: list[Fraction] = []
    for k in range(f.order + 1):
        heads, deriv = _stage_heads(g)
        lam.extend(heads)
        if k < len(c.stages):
            st = c.stages[k]
            if st.input_degrees != g.degrees:
                bad.append(f"stage {k}: degrees {list(st.input_degrees)} != {list(g.degrees)}")
            if list(st.head_values) != heads[: len(st.head_values)]:
                bad.append(f"stage {k}: head values differ")
        if k == f.order:
            break
        if deriv.parts[0]:
            bad.append(f"stage {k}: order-0 part does not vanish")
            break
        nxt = ExpPoly(deriv.parts[1:])
        with mpmath.workdps(dps):
            for x in points:
                lhs = evaluate(deriv, x, dps)
                rhs = mpmath.exp(mpmath.mpf(x.numerator) / x.denominator) * evaluate(nxt, x, dps)
                scale = max(abs(lhs), abs(rhs), mpmath.mpf(1))
                if abs(lhs - rhs) > tol * scale:
                    bad.append(f"stage {k}: reduction identity fails at x={x}")
        g = nxt

    full = len(c.lam) == len(lam)
    if full:
        for i, (got, want) in enumerate(zip(c.lam, lam)):
            if got != want:
                bad.append(f"lambda[{i}] = {got}, recomputed {want}")
    else:
        # early-stopped certificate: must be a prefix ending at a negative entry
        if list(c.lam) != lam[: len(c.lam)]:
            bad.append("truncated lambda is not a prefix of the recomputed vector")
        elif not c.lam or c.lam[-1] >= 0:
            bad.append(f"lambda has {len(c.lam)} entries, expected {len(lam)}")
    expected = CERTIFIED if full and all(v >= 0 for v in lam) else INCONCLUSIVE
    if c.verdict != expected:
        bad.append(f"verdict {c.verdict!r}, expected {expected!r}")
    return Replay(not bad, bad)


# lambda vectors exactly as printed for the three built-in cases.
PUBLISHED_LAMBDA: dict[str, tuple[int, ...]] = {
    "S1": (0,) * 10 + (
        72240, 1155840, 9557760, 56267040, 271084224, 880843680, 2475629568,
        6343909632, 1533939393792, 20392197120, 25057382400, 29561241600,
        4478976000,
    ),
    "S2": (0,) * 16 + (
        1095494400, 38342304000, 718413696000, 8922167654400, 85789518796800,
        686634000998400, 4108040955648000, 21277519458048000,
        98491821821245440, 417993857883463680, 1659729058910208000,
        6264125727645450240, 22744955668622376960, 57435249160046592000,
        138673044884876820480, 324272107555238707200, 741041088684097536000,
        1665009811944898560000, 3693054970331136000000,
        4415481367363584000000, 5133351192625152000000,
        5850215720681472000000, 716770887598080000000,
    ),
    "S3": (0,) * 16 + (
        115315200, 3863059200, 70457587200, 927826099200, 9830767564800,
        8631514316800, 615374090956800, 83729093713049600,
        20168695176376320, 99183876729477120, 450524284521338880,
        1915432618475059200, 5792081300977213440, 16127157987099279360,
        41953781738132766720, 103330763975294484480, 243753521061983846400,
        556095351762151833600, 1236678576792676761600,
        1461058224846520320000, 1642128742165708800000,
        1795208480980992000000, 1936007205617664000000,
        2073220384555008000000, 2209799770472448000000,
        136527788113920000000,
    ),
}

# Printed entries that break the smooth growth of their neighbours.
SUSPECT_INDICES: dict[str, frozenset[int]] = {
    "S1": frozenset({18}),
    "S2": frozenset(),
    "S3": frozenset({20, 21, 22, 23, 24}),
}


@dataclass
class CaseDiff:
    case_id: str
    certificate: Certificate
    published: tuple[int, ...]
    mismatches: list[tuple[int, Fraction, int | None]]
    signs: list[int]

    @property
    def all_nonnegative(self) -> bool:
        return all(s >= 0 for s in self.signs)

    def to_json(self) -> dict:
        return {
            "case": self.case_id,
            "mu": self.certificate.mu,
            "verdict": self.certificate.verdict,
            "lambda": [str(v) for v in self.certificate.lam],
            "signs": self.signs,
            "mismatches": [
                {
                    "index": i,
                    "computed": str(got),
                    "published": None if want is None else str(want),
                    "suspect": i in SUSPECT_INDICES[self.case_id],
                }
                for i, got, want in self.mismatches
            ],
        }


def compare_to_paper(case_id: str) -> CaseDiff:
    if case_id not in CASE_IDS:
        raise ValueError(f"unknown case {case_id!r}")
    cert = certify(builtin_case(case_id))
    published = PUBLISHED_LAMBDA[case_id]
    n = max(len(cert.lam), len(published))
    mismatches = []
    for i in range(n):
        got = cert.lam[i] if i < len(cert.lam) else None
        want = published[i] if i < len(published) else None
        if got != want:
            mismatches.append((i, got, want))
    signs = [(v > 0) - (v < 0) for v in cert.lam]
    return CaseDiff(case_id, cert, published, mismatches, signs)
