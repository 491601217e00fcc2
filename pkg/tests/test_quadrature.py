import mpmath
import pytest

from thetacert.quadrature import QuadratureError, integrate, legendre_nodes


@pytest.mark.parametrize("m", [4, 12, 24])
def test_rule_is_exact_for_polynomials(m):
    xs, ws = legendre_nodes(m, 30)
    with mpmath.workdps(30):
        for d in range(2 * m):
            got = sum(w * x**d for x, w in zip(xs, ws))
            want = 0 if d % 2 else mpmath.mpf(2) / (d + 1)
            assert abs(got - want) < mpmath.mpf(10) ** -25


def test_integrate_smooth_function():
    with mpmath.workdps(30):
        r = integrate(lambda x: mpmath.exp(-x) * mpmath.cos(3 * x), [0, 1, 10], tol=1e-20)
        exact = (1 - mpmath.exp(-10) * (mpmath.cos(30) - 3 * mpmath.sin(30))) / 10
        assert abs(r.value - exact) <= r.error_bound
        assert r.error_bound < 1e-18
        assert r.nodes_used > 0


def test_integrate_adapts_to_sqrt_endpoint():
    with mpmath.workdps(30):
        r = integrate(mpmath.sqrt, [0, 1], tol=1e-12)
        assert abs(r.value - mpmath.mpf(2) / 3) <= r.error_bound + 1e-25


def test_panel_budget():
    with pytest.raises(QuadratureError):
        integrate(lambda x: 1 / x, [mpmath.mpf("1e-30"), 1], tol=1e-25, max_panels=5)
