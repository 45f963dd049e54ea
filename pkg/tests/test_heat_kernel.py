import math

import mpmath
import numpy as np
import pytest

from latticecalc import heat_kernel as hk
from latticecalc.errors import DomainError


def reference(t, n):
    return float(mpmath.exp(-2 * mpmath.mpf(t)) * mpmath.besseli(n, 2 * mpmath.mpf(t)))


@pytest.mark.parametrize("t", [0.01, 1.0, 25.0, 400.0])
@pytest.mark.parametrize("n", [0, 1, 4, 30])
def test_kernel_against_mpmath(t, n):
    assert hk.heat_kernel(t, n) == pytest.approx(reference(t, n), rel=1e-11, abs=1e-300)


def test_kernel_at_time_zero():
    assert hk.heat_kernel(0, 0) == 1.0
    assert hk.heat_kernel(0, 2) == 0.0


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        hk.heat_kernel(-1.0, 0)


@pytest.mark.parametrize("t", [0.01, 1.0, 100.0, 1e4])
def test_table_mass_and_variance(t):
    tol = 1e-10
    table = hk.heat_table(t, tol)
    assert abs(table.total() - 1.0) <= tol + 1e-12
    assert table.moment(2) == pytest.approx(2 * t, rel=1e-6)
    assert table.tail_bound <= tol


@pytest.mark.parametrize("t", [5.0, 80.0])
@pytest.mark.parametrize("l", [1, 2, 3])
def test_difference_routes_agree(t, l):
    for n in (-3, 0, 2, 9):
        direct = sum(math.comb(l, i) * (-1) ** i * hk.heat_kernel(t, n + i) for i in range(l + 1))
        assert hk.heat_diff(t, n, l) == pytest.approx(direct, abs=1e-15)
        assert hk.heat_spectral(t, n, l=l) == pytest.approx(direct, abs=1e-15)


def test_time_derivative_is_the_laplacian():
    for t in (0.5, 4.0, 60.0):
        for n in (-2, 0, 5):
            lap = hk.heat_kernel(t, n + 1) - 2 * hk.heat_kernel(t, n) + hk.heat_kernel(t, n - 1)
            assert hk.heat_tderiv(t, n, 1) == pytest.approx(lap, abs=1e-16)
            h = 1e-4
            fd = (hk.heat_kernel(t + h, n) - hk.heat_kernel(t - h, n)) / (2 * h)
            assert hk.heat_tderiv(t, n, 1) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize("t", [3.0, 50.0, 2000.0])
def test_diff_table_tail_and_row(t):
    table = hk.heat_diff_table(t, 2, 1e-10)
    assert table.kind == "heat_diff(2)"
    assert table.tail_bound <= 1e-10
    J = table.half_width
    for j in (-J // 2, 0, 1, J // 3):
        assert table.value(j) == pytest.approx(hk.heat_diff(t, j, 2), abs=1e-15)


def test_l1_norm_of_first_difference_is_twice_the_peak():
    # delta G(t, .) changes sign once, so its l1 norm is 2 G(t, 0)
    for t in (1.0, 30.0):
        assert hk.heat_l1_diff_norm(t, 1, 1e-12) == pytest.approx(2 * hk.heat_kernel(t, 0), rel=1e-12)


def test_domination_ratios_bounded():
    ratios = hk.domination_ratios(400.0, 2)
    assert ratios.size == 19
    assert np.all(ratios < 10.0)
