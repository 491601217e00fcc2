"""Adaptive panel Gauss-Legendre quadrature in mpmath arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import mpmath


class QuadratureError(RuntimeError):
    """Requested tolerance not reached within the panel budget."""


@dataclass(frozen=True)
class QuadratureResult:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    nodes_used: int

    def __add__(self, other: QuadratureResult) -> QuadratureResult:
        return QuadratureResult(
            self.value + other.value,
            self.error_bound + other.error_bound,
            self.nodes_used + other.nodes_used,
        )


@lru_cache(maxsize=None)
def legendre_nodes(m: int, dps: int) -> tuple[tuple, tuple]:
    """Nodes and weights of the ``m``-point rule on ``[-1, 1]``."""
    with mpmath.workdps(dps + 10):
        xs, ws = [], []
        for i in range(1, m + 1):
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (m + mpmath.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, m + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = m * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.mpf(10) ** (-(dps + 5)):
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, m + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = m * (x * p1 - p0) / (x * x - 1)
            xs.append(+x)
            ws.append(2 / ((1 - x * x) * dp * dp))
        return tuple(xs), tuple(ws)


def _rule(f, a, b, m, dps):
    xs, ws = legendre_nodes(m, dps)
    half = (b - a) / 2
    mid = (a + b) / 2
    s = mpmath.mpf(0)
    mag = mpmath.mpf(0)
    for x, w in zip(xs, ws):
        v = f(mid + half * x)
        s += w * v
        mag += w * abs(v)
    return s * half, mag * abs(half)


def integrate(
    f: Callable,
    breakpoints: Sequence,
    tol: float = 1e-13,
    order: int = 12,
    max_panels: int = 4000,
    dps: int = 30,
) -> QuadratureResult:
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Each panel is accepted when the ``order``- and ``2*order``-point rules
    agree to within the panel's share of ``tol``; the difference is taken
    as the panel's error bound.
    """
    with mpmath.workdps(dps):
        pts = [mpmath.mpf(p) for p in breakpoints]
        total_len = pts[-1] - pts[0]
        eps = mpmath.mpf(10) ** (-dps + 2)
        stack = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)][::-1]
        value = mpmath.mpf(0)
        err = mpmath.mpf(0)
        nodes = 0
        panels = 0
        while stack:
            a, b = stack.pop()
            coarse, _ = _rule(f, a, b, order, dps)
            fine, mag = _rule(f, a, b, 2 * order, dps)
            nodes += 3 * order
            panels += 1
            diff = abs(fine - coarse)
            share = tol * (b - a) / total_len
            if diff <= share or panels >= max_panels:
                if diff > share:
                    raise QuadratureError(
                        f"panel [{mpmath.nstr(a, 8)}, {mpmath.nstr(b, 8)}] "
                        f"error {mpmath.nstr(diff, 3)} after {panels} panels"
                    )
                value += fine
                err += diff + eps * mag
            else:
                m = (a + b) / 2
                stack.append((m, b))
                stack.append((a, m))
        return QuadratureResult(+value, +err, nodes)
