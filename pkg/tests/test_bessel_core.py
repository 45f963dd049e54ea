import math

import mpmath
import numpy as np
import pytest

from latticecalc import bessel_core as bc
from latticecalc.errors import CapacityError, DomainError

mpmath.mp.dps = 40


def scaled_reference(n, t):
    return float(mpmath.exp(-t) * mpmath.besseli(n, t))


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 60])
@pytest.mark.parametrize("t", [1e-3, 0.5, 3.0, 40.0, 700.0, 2e4])
def test_scaled_bessel_matches_mpmath(n, t):
    ref = scaled_reference(n, t)
    assert bc.bessel_i_scaled(n, t) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_negative_order_is_symmetric():
    assert bc.bessel_i_scaled(-7, 3.5) == bc.bessel_i_scaled(7, 3.5)


def test_zero_time_is_the_impulse():
    assert bc.bessel_i_scaled(0, 0.0) == 1.0
    assert bc.bessel_i_scaled(3, 0.0) == 0.0


@pytest.mark.parametrize("t", [0.2, 9.0, 150.0, 5000.0])
def test_row_agrees_with_pointwise(t):
    row = bc.bessel_row(t, 50)
    pts = np.array([bc.bessel_i_scaled(n, t) for n in range(51)])
    np.testing.assert_allclose(row.values, pts, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("t", [0.3, 7.0, 90.0])
def test_row_sums_to_one(t):
    row = bc.bessel_row(t, int(40 + 12 * math.sqrt(t)))
    assert row.values[0] + 2 * row.values[1:].sum() == pytest.approx(1.0, abs=1e-14)


def test_asymptotic_expansion_at_large_argument():
    t = 5e4
    for n in (0, 3, 10):
        assert bc.asymptotic_scaled(n, t) == pytest.approx(scaled_reference(n, t), rel=1e-12)


def test_fourier_route():
    for n, t in ((0, 1.0), (4, 12.0), (9, 3.0)):
        assert bc.bessel_fourier_check(n, t, 256) == pytest.approx(bc.bessel_i_scaled(n, t), abs=1e-14)


def test_q_coefficients_are_integers_and_match_closed_form():
    table = bc.q_coeffs(12)
    for j in range(13):
        for k in range(j + 1):
            entry = table.entry(k, j)
            assert isinstance(entry, int)
            assert entry == table.closed_form(k, j)
    assert table.polynomial(1) == [1, 1]
    assert table.polynomial(2)[-1] == 1


def test_q_coeffs_rejects_bad_orders():
    with pytest.raises(DomainError):
        bc.q_coeffs(0)
    with pytest.raises(CapacityError):
        bc.q_coeffs(10 ** 6)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_even_moments_are_polynomials(k):
    for t in (0.5, 3.0, 20.0):
        exact = bc.moment_value(k, t)
        assert bc.moment_sum(k, t, 1e-12 * max(1.0, exact)) == pytest.approx(exact, rel=1e-10)


def test_second_moment_is_twice_time():
    assert bc.moment_value(1, 7.0) == pytest.approx(7.0)


def test_odd_moments_cancel():
    assert bc.odd_moment_sum(2, 5.0, 80) == 0.0


@pytest.mark.parametrize("n", [1, 3, 6])
@pytest.mark.parametrize("gamma", [-0.25, 0.3, 0.75])
def test_power_integral_against_closed_form(n, gamma):
    quad, closed = bc.int_fract_bessel_check(n, gamma, 1.0)
    assert quad == pytest.approx(closed, rel=1e-9)


def test_power_integral_domain():
    with pytest.raises(DomainError):
        bc.int_fract_bessel_check(2, 2.5, 1.0)
    with pytest.raises(DomainError):
        bc.int_fract_bessel_check(2, 0.5, -1.0)
