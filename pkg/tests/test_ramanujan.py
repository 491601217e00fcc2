from fractions import Fraction

import mpmath
import pytest

from thetacert.ramanujan import (
    K_LOWER,
    K_UPPER,
    THIRD,
    PrecisionError,
    SequenceKind,
    Sign,
    difference_interval,
    difference_sign,
    exp_interval,
    k_interval,
    resolve_difference_sign,
    sigma_coeffs,
    table_csv,
    table_json,
    theta_interval,
    theta_table,
)


def mpq(q):
    return mpmath.mpf(q.numerator) / q.denominator


def theta_oracle(n, dps=120):
    """theta_n from mpmath's exp at high precision, independent of the series."""
    with mpmath.workdps(dps):
        if n == 0:
            return mpmath.mpf(1) / 2
        s = sum(mpmath.mpf(n) ** k / mpmath.factorial(k) for k in range(n))
        return (mpmath.exp(n) / 2 - s) * mpmath.factorial(n) / mpmath.mpf(n) ** n


def test_exp_interval_zero():
    assert exp_interval(0, 64).lo == exp_interval(0, 64).hi == 1


@pytest.mark.parametrize("n", [1, 2, 7, 40, 150])
@pytest.mark.parametrize("bits", [16, 64, 200])
def test_exp_interval_encloses_and_is_tight(n, bits):
    iv = exp_interval(n, bits)
    with mpmath.workdps(150):
        e = mpmath.exp(n)
        assert mpq(iv.lo) <= e <= mpq(iv.hi)
        assert mpq(iv.width) < mpmath.mpf(2) ** (-bits) * e


def test_exp_interval_refines():
    for n in (1, 9, 33):
        assert exp_interval(n, 128).width <= exp_interval(n, 64).width


def test_theta_examples():
    assert theta_interval(0) == theta_interval(0, 16)
    assert theta_interval(0).lo == theta_interval(0).hi == Fraction(1, 2)
    with mpmath.workdps(60):
        assert mpq(theta_interval(1).lo) <= mpmath.e / 2 - 1 <= mpq(theta_interval(1).hi)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 60, 200])
def test_theta_matches_oracle(n):
    iv = theta_interval(n, 128)
    with mpmath.workdps(120):
        assert mpq(iv.lo) <= theta_oracle(n) <= mpq(iv.hi)
    assert iv.width <= Fraction(1, 2**128)


def test_theta_bounds_and_nesting():
    for n in range(0, 201, 7):
        a, b = theta_interval(n, 64), theta_interval(n, 128)
        assert b in a
        assert b.subset_of(THIRD, Fraction(1, 2))


def test_k_examples():
    k0 = k_interval(0)
    assert k0.lo == k0.hi == Fraction(8, 45)
    assert k_interval(1).hi < k0.lo
    for n in (0, 1, 10, 100, 200):
        assert k_interval(n).subset_of(K_LOWER, K_UPPER)


def test_k_needs_precision():
    # at 8 bits theta_200 - 1/3 ~ 1.5e-4 is not separated from 0
    with pytest.raises(PrecisionError):
        k_interval(200, 8)


def test_difference_sign_examples():
    for k in (0, 3, 30):
        assert difference_sign(SequenceKind.THETA, k, 0) is Sign.POSITIVE
    d = difference_interval(SequenceKind.THETA, 0, 1, 128)
    with mpmath.workdps(40):
        assert abs(mpq(d.mid) - (mpmath.mpf(3) / 2 - mpmath.e / 2)) < 1e-30
    assert difference_sign("theta", 0, 1) is Sign.POSITIVE


def test_difference_matches_oracle():
    with mpmath.workdps(200):
        th = [theta_oracle(j, 200) for j in range(12)]
        for kind, seq in (
            (SequenceKind.SHIFTED, [(j + 1) * (th[j] - mpmath.mpf(1) / 3) for j in range(12)]),
            (SequenceKind.KOUMANDOS, [mpmath.mpf(4) / 135 - j * (th[j] - mpmath.mpf(1) / 3) for j in range(12)]),
        ):
            for k, n in ((0, 5), (3, 8), (1, 10)):
                want = sum((-1) ** m * mpmath.binomial(n, m) * seq[k + m] for m in range(n + 1))
                iv = difference_interval(kind, k, n, 160)
                assert mpq(iv.lo) <= want <= mpq(iv.hi)


def test_low_precision_is_unresolved_then_resolved():
    assert difference_sign(SequenceKind.SHIFTED, 10, 20, 8) is Sign.UNRESOLVED
    sign, bits = resolve_difference_sign(SequenceKind.SHIFTED, 10, 20, bits=8)
    assert sign is Sign.POSITIVE and bits > 8


def test_shifted_grid_small():
    for k in range(0, 21):
        for n in range(0, 21 - k):
            assert resolve_difference_sign(SequenceKind.SHIFTED, k, n)[0] is Sign.POSITIVE


def test_sigma_coeffs():
    for alpha in (0, 1, 2, Fraction(1, 2), 1.5):
        cs = sigma_coeffs(alpha, 30, 96)
        assert cs[0].lo == cs[0].hi == 1
        assert all(c.lo > 0 for c in cs)
    cs = sigma_coeffs(1, 100, 96)
    d1 = theta_interval(1, 96) - THIRD
    for n in (2, 10, 100):
        assert (theta_interval(n, 96) - THIRD) in (cs[n - 1] * d1 * n).round_out(90)


def test_sigma_coeffs_fractional_alpha_encloses():
    cs = sigma_coeffs(0.5, 5, 96)
    with mpmath.workdps(60):
        d1 = theta_oracle(1) - mpmath.mpf(1) / 3
        for n in range(1, 6):
            want = (theta_oracle(n) - mpmath.mpf(1) / 3) / (d1 * mpmath.sqrt(n))
            assert mpq(cs[n - 1].lo) - 1e-50 <= want <= mpq(cs[n - 1].hi) + 1e-50


def test_table_formats():
    rows = theta_table(4)
    csv_text = table_csv(rows, 10)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "n,theta_lo,theta_hi,k_lo,k_hi"
    assert lines[1] == "0,0.5000000000,0.5000000000,0.1777777777,0.1777777778"
    import json

    data = json.loads(table_json(rows))
    assert data[0]["theta_lo"] == "1/2" and len(data) == 5
    assert Fraction(data[3]["theta_lo"]) == rows[3].theta.lo
