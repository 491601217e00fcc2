"""The numeric verification suite run by ``thetacert verify``."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import watson
from .quadrature import QuadratureError
from .watson import CheckResult, Grid


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)
    unreachable: list[str] = field(default_factory=list)
    scan: watson.ScanReport | None = None

    @property
    def passed(self) -> bool:
        return not self.unreachable and all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "unreachable": self.unreachable,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _q(v: Fraction):
    return mpmath.mpf(v.numerator) / v.denominator


def log_points(lo: float, hi: float, n: int) -> list[float]:
    a, b = math.log(lo), math.log(hi)
    return [math.exp(a + (b - a) * i / (n - 1)) for i in range(n)]


def boundary_limits(t: float = 1e-6, tol: float = 1e-6, dps: int = 30) -> CheckResult:
    p = watson.parametric(t, dps)
    with mpmath.workdps(dps):
        r1 = abs(p.sum1 - mpmath.mpf(4) / 3)
        r2 = abs(p.sum2 + mpmath.mpf(8) / 135)
        worst = float(max(r1, r2))
    return CheckResult(
        "boundary constants", {"t": t, "tol": tol}, worst < tol, max_residual=worst
    )


def exact_moments(tol: float, bound_cap: float = 1e-10, dps: int = 30) -> list[CheckResult]:
    out = []
    for kind, target in (
        ("theta_rep", Fraction(1, 6)),
        ("delta_rep", Fraction(37, 270)),
        ("third_deriv_rep", Fraction(4, 135)),
    ):
        r = watson.quadrature_moment(0, kind, tol=tol, dps=dps)
        with mpmath.workdps(dps):
            err = abs(r.value - _q(target))
        out.append(
            CheckResult(
                f"moment n=0 {kind} = {target}",
                {"tol": tol, "nodes": r.nodes_used},
                err < r.error_bound <= bound_cap,
                max_residual=float(err),
                detail=f"error bound {float(r.error_bound):.3e}",
            )
        )
    return out


def theta_moments(max_n: int, tol: float, dps: int = 30, bits: int = 128) -> list[CheckResult]:
    """Each moment representation against the exact theta enclosures."""
    out = []
    for kind in ("theta_rep", "delta_rep", "third_deriv_rep", "g_rep"):
        worst = 0.0
        ok = True
        for n in range(0 if kind != "g_rep" else 1, max_n + 1):
            r = watson.quadrature_moment(n, kind, tol=tol, dps=dps)
            iv = watson.moment_target(n, kind, bits)
            with mpmath.workdps(dps):
                lo = _q(iv.lo) - r.error_bound
                hi = _q(iv.hi) + r.error_bound
                ok &= bool(lo <= r.value <= hi)
                worst = max(worst, float(abs(r.value - _q(iv.mid))))
        out.append(
            CheckResult(
                f"moments {kind} vs theta enclosure",
                {"max_n": max_n, "tol": tol},
                ok,
                max_residual=worst,
            )
        )
    return out


def identity_checks(
    points: list[float] | None = None, tol: float = 1e-10, dps: int = 60
) -> list[CheckResult]:
    points = points or log_points(0.05, 20.0, 20)
    out = []
    for i in (1, 2, 3):
        worst = max(float(watson.rs_identity_check(i, t, dps)) for t in points)
        out.append(
            CheckResult(
                f"R{i} factorization",
                {"t": "0.05:20:20:log", "dps": dps},
                worst < tol,
                max_residual=worst,
            )
        )
    return out


def sigma1_checks(zs=(0.9, -0.9, 0.5, -0.5, 0.1), tol: float = 1e-8) -> list[CheckResult]:
    out = []
    for z in zs:
        q = watson.sigma1_eval(z)
        s, e = watson.sigma1_series(z)
        diff = float(abs(q.value - s))
        combined = float(q.error_bound + e)
        out.append(
            CheckResult(
                f"sigma1 two-route z={z}",
                {"z": z, "tol": tol},
                diff < tol and diff <= combined,
                max_residual=diff,
                detail=f"combined bound {combined:.3e}",
            )
        )
    return out


def branch_checks(dps: int = 30) -> list[CheckResult]:
    out = []
    xs = log_points(1e-6, 100.0, 40)
    worst = 0.0
    for x in xs:
        b = watson.solve_branches(x, dps)
        with mpmath.workdps(dps):
            ex = mpmath.exp(-mpmath.mpf(x))
            for r in (b.u, b.U):
                worst = max(worst, float(abs(r * mpmath.exp(1 - r) - ex) / ex))
    out.append(
        CheckResult("branch residuals", {"x": "1e-6:100:40:log"}, worst < 1e-15, max_residual=worst)
    )
    worst = 0.0
    for t in log_points(1e-3, 20.0, 30):
        p = watson.parametric(t, dps)
        b = watson.solve_branches(p.x, dps)
        worst = max(worst, float(abs(b.u - p.h)), float(abs(b.U - p.H)))
    out.append(
        CheckResult(
            "parametric vs root-finder", {"t": "1e-3:20:30:log"}, worst < 1e-12, max_residual=worst
        )
    )
    worst = 0.0
    for t in log_points(1e-3, 20.0, 30):
        r = watson.rho(t, "h", dps)
        worst = max(
            worst,
            float(abs(r - watson.rho(-t, "h", dps)) / r),
            float(abs(r - watson.rho(t, "H", dps)) / r),
        )
    out.append(CheckResult("rho evenness", {"t": "1e-3:20:30:log"}, worst < 1e-14, max_residual=worst))
    return out


def run_verification(
    grid: Grid = watson.DEFAULT_GRID,
    max_n: int = 20,
    tol: float = 1e-13,
    dps: int = 30,
    identity_dps: int = watson.IDENTITY_DPS,
) -> VerificationReport:
    report = VerificationReport()

    def attempt(name, fn):
        try:
            res = fn()
        except QuadratureError as exc:
            report.unreachable.append(f"{name}: {exc}")
            return
        report.checks.extend(res if isinstance(res, list) else [res])

    attempt("boundary", lambda: boundary_limits(dps=dps))
    attempt("exact moments", lambda: exact_moments(tol, dps=dps))
    attempt("theta moments", lambda: theta_moments(max_n, tol, dps=dps))
    attempt("identities", lambda: identity_checks(dps=identity_dps))
    attempt("branches", lambda: branch_checks(dps=dps))
    attempt("sigma1", lambda: sigma1_checks())
    scan = watson.inequality_scan(grid)
    report.scan = scan
    report.checks.extend(scan.checks)
    return report


def scan_csv(scan: watson.ScanReport) -> str:
    lines = [",".join(watson.SCAN_COLUMNS)]
    for row in scan.rows:
        lines.append(",".join(repr(row[c]) for c in watson.SCAN_COLUMNS))
    return "\n".join(lines) + "\n"
