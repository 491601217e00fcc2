"""Watson's branch functions and the identities built on them.

For ``x > 0`` the equation ``t e^{1-t} = e^{-x}`` has two roots
``0 < u(x) < 1 < U(x)``.  With ``h(t) = t/(e^t - 1)``, ``H(t) = t/(1 - e^{-t})``
and ``x = log rho(t) = h - 1 - log h`` one has ``u(x) = h(t)``, ``U(x) = H(t)``,
which gives the derivative sums ``U^(j) + u^(j)`` in closed form without
root-finding.  Small ``t`` is handled by raising the working precision
enough to absorb the cancellation (the sums are O(1) differences of
O(t^-5) terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import exppoly
from .quadrature import QuadratureError, QuadratureResult, integrate
from .ramanujan import THIRD, sigma_coeffs, theta_interval

DEFAULT_DPS = 30
IDENTITY_DPS = 60


def _four_thirds():
    return mpmath.mpf(4) / 3


class BranchConvergenceError(RuntimeError):
    """Safeguarded Newton failed; the message carries the final bracket."""


def _guard(t) -> int:
    """Extra digits needed to evaluate the sums at parameter ``t``."""
    t = abs(float(t))
    if t >= 1:
        return 10
    return 10 + int(6 * math.log10(1 / t)) if t > 0 else 10


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


@dataclass(frozen=True)
class BranchPoint:
    x: mpmath.mpf
    u: mpmath.mpf
    U: mpmath.mpf
    d1u: mpmath.mpf
    d1U: mpmath.mpf
    d2u: mpmath.mpf
    d2U: mpmath.mpf
    d3u: mpmath.mpf
    d3U: mpmath.mpf


def _branch_derivs(u, U):
    am = 1 - u  # > 0
    ap = U - 1  # > 0
    return dict(
        d1u=-u / am,
        d1U=U / ap,
        d2u=u / am**3,
        d2U=-U / ap**3,
        d3u=-u * (2 * u + 1) / am**5,
        d3U=U * (2 * U + 1) / ap**5,
    )


def _safeguarded_newton(F, dF, lo, hi, x0, tol, what, maxiter=200):
    """Root of increasing ``F`` on ``[lo, hi]`` (``F(lo) < 0 < F(hi)``)."""
    x = x0 if lo < x0 < hi else (lo + hi) / 2
    for _ in range(maxiter):
        fx = F(x)
        if fx == 0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        d = dF(x)
        step = fx / d if d else None
        nxt = x - step if step is not None else None
        if nxt is None or not (lo < nxt < hi):
            nxt = (lo + hi) / 2
        if abs(nxt - x) <= tol * max(abs(x), mpmath.mpf(1)) or hi - lo <= tol * max(abs(x), 1):
            return nxt
        x = nxt
    raise BranchConvergenceError(
        f"{what}: no convergence, bracket [{mpmath.nstr(lo, 20)}, {mpmath.nstr(hi, 20)}]"
    )


def solve_branches(x, dps: int = DEFAULT_DPS) -> BranchPoint:
    """Direct root-finding for ``u`` and ``U`` on ``t - log t = x + 1``."""
    xf = float(x)
    if not xf > 0:
        raise ValueError("x must be positive")
    extra = 10 + (int(-math.log10(xf)) if xf < 1 else 0)
    with mpmath.workdps(dps + extra):
        xv = _mp(x)
        tol = mpmath.mpf(10) ** (-(dps + extra - 4))
        # U branch: G(U) = U - log U - 1 - x, increasing on [1, inf)
        hiU = xv + 2 + mpmath.log(xv + 2)
        gU = 1 + mpmath.sqrt(2 * xv) + 2 * xv / 3 if xf < 1 else xv + 1 + mpmath.log(xv + 1)
        U = _safeguarded_newton(
            lambda s: s - mpmath.log(s) - 1 - xv,
            lambda s: 1 - 1 / s,
            mpmath.mpf(1),
            hiU,
            gU,
            tol,
            "U branch",
        )
        # u branch in v = log u: G(v) = v - e^v + 1 + x, increasing on (-inf, 0]
        if xf < 1:
            gv = mpmath.log(1 - mpmath.sqrt(2 * xv) + 2 * xv / 3) if xf < 0.4 else -xv / 2
        else:
            gv = -xv - 1 + mpmath.exp(-xv - 1)
        v = _safeguarded_newton(
            lambda s: s - mpmath.exp(s) + 1 + xv,
            lambda s: 1 - mpmath.exp(s),
            -xv - 1,
            mpmath.mpf(0),
            gv,
            tol,
            "u branch",
        )
        u = mpmath.exp(v)
        d = _branch_derivs(u, U)
    with mpmath.workdps(dps):
        return BranchPoint(x=+xv, u=+u, U=+U, **{k: +val for k, val in d.items()})


@dataclass(frozen=True)
class ParametricPoint:
    t: mpmath.mpf
    x: mpmath.mpf
    h: mpmath.mpf
    H: mpmath.mpf
    sum1: mpmath.mpf  # U' + u'
    sum2: mpmath.mpf  # U'' + u''
    sum3: mpmath.mpf  # U''' + u'''
    dxdt: mpmath.mpf


def _h(t):
    return t / mpmath.expm1(t)


def rho(t, form: str = "h", dps: int = DEFAULT_DPS):
    """``exp(h)/(e h)`` (``form="h"``) or ``exp(H)/(e H)`` (``form="H"``)."""
    with mpmath.workdps(dps + _guard(t)):
        tv = _mp(t)
        if tv == 0:
            return mpmath.mpf(1)
        v = _h(tv) if form == "h" else _h(tv) + tv
        r = mpmath.exp(v) / (mpmath.e * v)
    with mpmath.workdps(dps):
        return +r


def _raw_point(tv) -> ParametricPoint:
    h = _h(tv)
    H = h + tv
    a = H - 1
    b = h - 1
    sum1 = H / a + h / b
    sum2 = -H / a**3 - h / b**3
    sum3 = H * (1 + 2 * H) / a**5 + h * (1 + 2 * h) / b**5
    x = h - 1 - mpmath.log(h)
    et = mpmath.exp(tv)
    em1 = mpmath.expm1(tv)
    dxdt = et * (em1 - tv) * (mpmath.expm1(-tv) + tv) / (tv * em1**2)
    return ParametricPoint(tv, x, h, H, sum1, sum2, sum3, dxdt)


def parametric(t, dps: int = DEFAULT_DPS) -> ParametricPoint:
    if not float(t) > 0:
        raise ValueError("t must be positive")
    with mpmath.workdps(dps + _guard(t)):
        p = _raw_point(_mp(t))
    with mpmath.workdps(dps):
        return ParametricPoint(*(+getattr(p, f) for f in ParametricPoint.__dataclass_fields__))


def x_of_t(t, dps: int = DEFAULT_DPS):
    return parametric(t, dps).x


def t_of_x(x, dps: int = DEFAULT_DPS):
    """Invert ``x = log rho(t)`` on ``t > 0`` by safeguarded Newton."""
    xf = float(x)
    if not xf > 0:
        raise ValueError("x must be positive")
    with mpmath.workdps(dps + 5):
        xv = _mp(x)
        hi = mpmath.mpf(max(1.0, xf + 2 + 2 * math.log(xf + 2)))
        guess = mpmath.sqrt(8 * xv) if xf < 0.05 else xv + 1 + mpmath.log(xv + 1)
        tol = mpmath.mpf(10) ** (-(dps + 2))

        def F(t):
            with mpmath.workdps(dps + _guard(t)):
                return +(_raw_point(t).x - xv)

        def dF(t):
            with mpmath.workdps(dps + _guard(t)):
                return +_raw_point(t).dxdt

        while F(hi) <= 0:
            hi *= 2
        t = _safeguarded_newton(F, dF, mpmath.mpf(0), hi, guess, tol, "x = log rho(t)")
    with mpmath.workdps(dps):
        return +t


@dataclass(frozen=True)
class DerivedValues:
    x: mpmath.mpf
    t: mpmath.mpf
    delta: mpmath.mpf  # -(U''+u'') - (U'''+u''')
    g: mpmath.mpf  # 4/3 - (U'+u')
    dg: mpmath.mpf  # g'
    d2g: mpmath.mpf  # g''
    G0: mpmath.mpf
    G1: mpmath.mpf
    G: mpmath.mpf  # G evaluated at e^{-x}


def _derived(p: ParametricPoint) -> DerivedValues:
    g = _four_thirds() - p.sum1
    return DerivedValues(
        x=p.x,
        t=p.t,
        delta=-p.sum2 - p.sum3,
        g=g,
        dg=-p.sum2,
        d2g=-p.sum3,
        G0=3 * g,
        G1=1 + mpmath.mpf(135) / 8 * p.sum2,
        G=mpmath.mpf(135) / 37 * (p.sum1 + p.sum2 - 1),
    )


def derived_functions(x=None, *, t=None, dps: int = DEFAULT_DPS) -> DerivedValues:
    """Delta, g and the distribution functions at ``x`` (or at parameter ``t``)."""
    if (x is None) == (t is None):
        raise TypeError("pass exactly one of x or t")
    if t is None:
        t = t_of_x(x, dps)
    with mpmath.workdps(dps + _guard(t)):
        d = _derived(_raw_point(_mp(t)))
    with mpmath.workdps(dps):
        return DerivedValues(*(+getattr(d, f) for f in DerivedValues.__dataclass_fields__))


# ---------------------------------------------------------------------------
# moments

MOMENT_KINDS = ("theta_rep", "third_deriv_rep", "delta_rep", "g_rep")


def _integrand(kind, p: ParametricPoint):
    if kind == "theta_rep":
        return -p.sum2
    if kind == "third_deriv_rep":
        return p.sum3
    if kind == "delta_rep":
        return -p.sum2 - p.sum3
    if kind == "g_rep":
        return _four_thirds() - p.sum1
    raise ValueError(f"unknown moment kind {kind!r}")


def _tail_integral(kind, p: ParametricPoint):
    """``int_X^inf F`` via the antiderivative and its limit at infinity."""
    if kind == "theta_rep":
        return p.sum1 - 1
    if kind == "third_deriv_rep":
        return -p.sum2
    if kind == "delta_rep":
        return p.sum1 - 1 + p.sum2
    return mpmath.inf


def _panels(T) -> list:
    pts = [0]
    b = mpmath.mpf(1) / 4
    while b < T:
        pts.append(b)
        b *= 2
    pts.append(T)
    return pts


def quadrature_moment(
    n: int, kind: str, tol: float = 1e-13, dps: int = DEFAULT_DPS, max_t: float = 2000
) -> QuadratureResult:
    """``(1/2) int_0^inf e^{-nx} F(x) dx`` for the integrand selected by ``kind``.

    The integral is taken in the parameter ``t`` (``dx = x'(t) dt``).  The
    part beyond ``X = x(T)`` is added exactly through the antiderivative when
    ``n = 0`` and bounded by ``e^{-nX} int_X^inf F`` (or ``e^{-nX}/(3n)`` for
    ``g <= 1/3``) otherwise; all integrands are nonnegative.
    """
    if kind not in MOMENT_KINDS:
        raise ValueError(f"unknown moment kind {kind!r}")
    if n < 0 or (kind == "g_rep" and n < 1):
        raise ValueError(f"n = {n} is outside the range of {kind}")
    with mpmath.workdps(dps):
        half = mpmath.mpf(1) / 2
        T = mpmath.mpf(40) if n == 0 else mpmath.mpf(8)
        while True:
            p = parametric(T, dps)
            if n == 0:
                tail, tail_err = half * _tail_integral(kind, p), mpmath.mpf(0)
                break
            damp = mpmath.exp(-n * p.x)
            if kind == "g_rep":
                bound = half * damp / (3 * n)
            else:
                bound = half * damp * _tail_integral(kind, p)
            if bound < tol / 10:
                tail, tail_err = bound / 2, bound / 2
                break
            T *= 2
            if T > max_t:
                raise QuadratureError(f"tail bound {mpmath.nstr(bound, 3)} above tolerance")

        def f(t):
            with mpmath.workdps(dps + _guard(t)):
                q = _raw_point(t)
                v = _integrand(kind, q) * q.dxdt
                if n:
                    v *= mpmath.exp(-n * q.x)
                return +(half * v)

        body = integrate(f, _panels(T), tol=tol / 2, dps=dps)
        return QuadratureResult(body.value + tail, body.error_bound + tail_err, body.nodes_used)


def moment_target(n: int, kind: str, bits: int = 128):
    """Enclosure of the value each moment represents, from theta_interval."""
    d = theta_interval(n, bits) - THIRD
    if kind == "theta_rep":
        iv = d
    elif kind == "third_deriv_rep":
        iv = Fraction(4, 135) - d * n
    elif kind == "delta_rep":
        iv = d * (n + 1) - Fraction(4, 135)
    elif kind == "g_rep":
        iv = d / n
    else:
        raise ValueError(kind)
    return iv


# ---------------------------------------------------------------------------
# factorization identities

def _rs_lhs(i: int, h, H):
    if i == 1:
        return H / (H - 1) + h / (h - 1) - H / (H - 1) ** 3 - h / (h - 1) ** 3
    if i == 2:
        return (
            H / (H - 1) ** 3
            + h / (h - 1) ** 3
            - H * (1 + 2 * H) / (H - 1) ** 5
            - h * (1 + 2 * h) / (h - 1) ** 5
        )
    if i == 3:
        return H * (1 + 2 * H) / (H - 1) ** 5 + h * (1 + 2 * h) / (h - 1) ** 5
    raise ValueError(f"identity index must be 1, 2 or 3, got {i}")


def _rs_prefactor(i: int, t):
    et = mpmath.exp(t)
    a = mpmath.expm1(t) - t  # e^t - 1 - t
    b = 1 - et * (1 - t)
    em1 = mpmath.expm1(t)
    if i == 1:
        return t**2 / (a**3 * b**3)
    if i == 2:
        return t**2 * em1**2 / (a**5 * b**5)
    return t * em1**3 / (a**5 * b**5)


def rs_identity_check(i: int, t, dps: int = IDENTITY_DPS):
    """Relative residual between ``R_i`` from ``h, H`` and prefactor * ``S_i``."""
    if not float(t) > 0:
        raise ValueError("t must be positive")
    work = dps + _guard(t) + 10
    with mpmath.workdps(work):
        tv = _mp(t)
        h = _h(tv)
        H = h + tv
        lhs = _rs_lhs(i, h, H)
        s = exppoly.evaluate(exppoly.builtin_case(f"S{i}"), tv, dps=work)
        rhs = _rs_prefactor(i, tv) * s
        res = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    with mpmath.workdps(dps):
        return +res


# ---------------------------------------------------------------------------
# scans

@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    points: int
    spacing: str = "log"

    @classmethod
    def parse(cls, spec: str) -> Grid:
        try:
            lo, hi, pts, kind = spec.split(":")
            g = cls(float(lo), float(hi), int(pts), kind)
        except ValueError:
            raise ValueError(f"bad grid spec {spec!r}; expected lo:hi:points:log|lin") from None
        if g.spacing not in ("log", "lin") or not 0 < g.lo < g.hi or g.points < 2:
            raise ValueError(f"bad grid spec {spec!r}")
        return g

    def values(self) -> list[float]:
        n = self.points
        if self.spacing == "lin":
            return [self.lo + (self.hi - self.lo) * i / (n - 1) for i in range(n)]
        a, b = math.log(self.lo), math.log(self.hi)
        return [math.exp(a + (b - a) * i / (n - 1)) for i in range(n)]

    def __str__(self) -> str:
        return f"{self.lo:g}:{self.hi:g}:{self.points}:{self.spacing}"


DEFAULT_GRID = Grid(1e-4, 30.0, 500, "log")


@dataclass
class CheckResult:
    name: str
    params: dict
    passed: bool
    min_margin: float | None = None
    max_residual: float | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "min_margin": self.min_margin,
            "max_residual": self.max_residual,
            "passed": self.passed,
            **({"detail": self.detail} if self.detail else {}),
        }


@dataclass
class ScanReport:
    grid: Grid
    checks: list[CheckResult]
    rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


SCAN_COLUMNS = ("x", "t", "u", "U", "sum1", "sum2", "sum3", "g", "dg", "d2g", "delta")


def inequality_scan(grid: Grid = DEFAULT_GRID, dps: int = 20) -> ScanReport:
    """Pointwise check of the derivative-sum chain and the hypotheses on g."""
    if grid.hi > 30 or grid.points < 100:
        raise ValueError("grid must lie in (0, 30] with at least 100 points")
    margins: dict[str, list] = {
        "sum1 > -sum2": [],
        "-sum2 > sum3": [],
        "sum3 > 0": [],
        "g >= 0": [],
        "g <= 1/3": [],
        "g' > 0": [],
        "g'' < 0": [],
        "g'^2 - g'' g > 0": [],
    }
    rows = []
    prev_sum1 = None
    decreasing = True
    with mpmath.workdps(dps):
        for xv in grid.values():
            t = t_of_x(xv, dps)
            with mpmath.workdps(dps + _guard(t)):
                p = _raw_point(t)
                d = _derived(p)
                vals = {
                    "sum1 > -sum2": p.sum1 + p.sum2,
                    "-sum2 > sum3": -p.sum2 - p.sum3,
                    "sum3 > 0": p.sum3,
                    "g >= 0": d.g,
                    "g <= 1/3": mpmath.mpf(1) / 3 - d.g,
                    "g' > 0": d.dg,
                    "g'' < 0": -d.d2g,
                    "g'^2 - g'' g > 0": d.dg**2 - d.d2g * d.g,
                }
            for k, v in vals.items():
                margins[k].append(float(v))
            if prev_sum1 is not None and not p.sum1 < prev_sum1:
                decreasing = False
            prev_sum1 = p.sum1
            rows.append(
                {
                    "x": float(p.x),
                    "t": float(t),
                    "u": float(p.h),
                    "U": float(p.H),
                    "sum1": float(p.sum1),
                    "sum2": float(p.sum2),
                    "sum3": float(p.sum3),
                    "g": float(d.g),
                    "dg": float(d.dg),
                    "d2g": float(d.d2g),
                    "delta": float(d.delta),
                }
            )
    params = {"grid": str(grid), "dps": dps}
    checks = []
    for name, ms in margins.items():
        strict = not name.startswith("g >=") and not name.startswith("g <=")
        lo = min(ms)
        checks.append(CheckResult(name, params, lo > 0 if strict else lo >= 0, min_margin=lo))
    gap = rows[-1]["sum1"] - 1
    checks.append(
        CheckResult(
            "sum1 decreases towards 1",
            params,
            decreasing and gap > 0,
            min_margin=gap,
            detail=f"sum1 - 1 = {gap:.3e} at x = {rows[-1]['x']:.4g}",
        )
    )
    return ScanReport(grid, checks, rows)


# ---------------------------------------------------------------------------
# sigma_1 at real points

def sigma1_eval(z, tol: float = 1e-13, dps: int = DEFAULT_DPS) -> QuadratureResult:
    """``(theta_1 - 1/3) sigma_1(z) = (1/2) int_0^inf z/(e^x - z) g(x) dx``."""
    zf = float(z)
    if not -1 < zf < 1:
        raise ValueError("z must lie in (-1, 1)")
    with mpmath.workdps(dps):
        zv = _mp(z)
        if zv == 0:
            return QuadratureResult(mpmath.mpf(0), mpmath.mpf(0), 0)
        half = mpmath.mpf(1) / 2
        az = abs(zv)
        T = mpmath.mpf(8)
        while True:
            X = parametric(T, dps).x
            # |z/(e^x - z)| g <= |z| / (3 (e^x - |z|)), integrated over [X, inf)
            bound = -half * mpmath.log1p(-az * mpmath.exp(-X)) / 3
            if bound < tol / 10:
                break
            T *= 2

        def f(t):
            with mpmath.workdps(dps + _guard(t)):
                q = _raw_point(t)
                return +(half * zv / (mpmath.exp(q.x) - zv) * (_four_thirds() - q.sum1) * q.dxdt)

        body = integrate(f, _panels(T), tol=tol / 2, dps=dps)
        return QuadratureResult(body.value, body.error_bound + bound, body.nodes_used)


def sigma1_series(z, tol: float = 1e-13, bits: int = 96):
    """Same quantity from ``sum_n (theta_n - 1/3) z^n / n`` with a tail bound.

    Returns ``(value, error_bound)`` as mpf; the error covers truncation
    (``theta_n - 1/3 <= 1/6``) and the width of the coefficient enclosures.
    """
    zf = float(z)
    if not -1 < zf < 1:
        raise ValueError("z must lie in (-1, 1)")
    az = abs(zf)
    N = 1
    while az ** (N + 1) / (6 * (N + 1) * (1 - az)) > tol / 10 and N < 5000:
        N += 1
    zq = Fraction(z) if not isinstance(z, float) else Fraction(zf)
    d1 = theta_interval(1, bits) - THIRD
    coeffs = sigma_coeffs(1, N, bits)
    lo = hi = Fraction(0)
    zp = Fraction(1)
    for c in coeffs:
        zp *= zq
        term = c * d1 * zp
        lo += term.lo
        hi += term.hi
    with mpmath.workdps(DEFAULT_DPS):
        trunc = mpmath.mpf(az) ** (N + 1) / (6 * (N + 1) * (1 - az))
        mid = _mp((lo + hi) / 2)
        return mid, _mp((hi - lo) / 2) + trunc
