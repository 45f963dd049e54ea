"""Invariants checked on randomly drawn parameters."""

import math

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.signal import fftconvolve

from latticecalc import bessel_core as bc
from latticecalc import heat_kernel as hk
from latticecalc import lattice_fn as lf
from latticecalc import operators as ops
from latticecalc import poisson_kernel as pk
from latticecalc import regularity as reg

times = st.floats(min_value=0.01, max_value=500.0, allow_nan=False)
orders = st.integers(min_value=0, max_value=80)
small_ints = st.integers(min_value=-40, max_value=40)


@given(orders, st.floats(min_value=0.05, max_value=3000.0))
def test_bessel_three_term_recurrence(n, t):
    n += 1
    lhs = bc.bessel_i_scaled(n - 1, t) - bc.bessel_i_scaled(n + 1, t)
    rhs = 2.0 * n / t * bc.bessel_i_scaled(n, t)
    assert math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-300)


@given(orders, st.floats(min_value=0.05, max_value=3000.0))
def test_bessel_values_decrease_in_order(n, t):
    a, b = bc.bessel_i_scaled(n, t), bc.bessel_i_scaled(n + 1, t)
    assert 0.0 <= b <= a <= 1.0


@given(times, small_ints)
def test_heat_kernel_symmetric_positive(t, n):
    g = hk.heat_kernel(t, n)
    assert g == hk.heat_kernel(t, -n)
    assert 0.0 <= g <= hk.heat_kernel(t, 0)


@given(st.floats(min_value=0.05, max_value=30.0), st.floats(min_value=0.05, max_value=30.0))
def test_heat_semigroup(t, s):
    a, b, c = hk.heat_table(t, 1e-13), hk.heat_table(s, 1e-13), hk.heat_table(t + s, 1e-13)
    conv = fftconvolve(a.values, b.values)
    J = (conv.size - 1) // 2
    assert np.max(np.abs(conv - c.values_on(-J, J))) <= 1e-10


@given(st.floats(min_value=0.2, max_value=50.0), small_ints)
def test_poisson_kernel_symmetric_positive_below_peak(y, j):
    p = pk.poisson_kernel(y, j, cross_check=False)
    assert p == pk.poisson_kernel(y, -j, cross_check=False)
    assert 0.0 < p <= pk.poisson_kernel(y, 0, cross_check=False)


@given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=1, max_value=500))
def test_fractional_kernel_signs(beta, n):
    # for 0 < beta < 1 the off-diagonal entries are negative and the diagonal positive
    assume(abs(beta - round(beta)) > 1e-6)
    assert ops.frac_kernel_pos(beta, n) < 0 < ops.frac_kernel_pos(beta, 0)
    assert ops.frac_kernel_pos(beta, n) == ops.frac_kernel_pos(beta, -n)


@given(st.floats(min_value=0.02, max_value=0.48), st.integers(min_value=0, max_value=500))
def test_negative_kernel_positive_decreasing(beta, n):
    assert 0 < ops.frac_kernel_neg(beta, n + 1) < ops.frac_kernel_neg(beta, n)


@given(st.floats(min_value=0.1, max_value=2.0), st.floats(min_value=0.1, max_value=100.0),
       st.floats(min_value=-3, max_value=3), st.floats(min_value=-3, max_value=3))
def test_heat_apply_is_linear(alpha, t, a, b):
    f, g = lf.abs_pow(alpha), lf.rademacher(3)
    combo = lf.LatticeFunction("combo", lambda n: a * f.rule(n) + b * g.rule(n), alpha, abs(a) + abs(b), None)
    ns = np.arange(-3, 4)
    lhs = ops.heat_apply(combo, t, ns, 1e-9)
    rhs = a * ops.heat_apply(f, t, ns, 1e-9) + b * ops.heat_apply(g, t, ns, 1e-9)
    np.testing.assert_allclose(lhs, rhs, atol=1e-7 * (1 + abs(a) + abs(b)))


@given(st.floats(min_value=0.1, max_value=1.9), st.floats(min_value=0.5, max_value=200.0), small_ints)
def test_heat_commutes_with_differences(alpha, t, n):
    f = lf.abs_pow(alpha)
    direct = ops.heat_apply_result(f, t, [n], 1e-10, l=1).values[0]
    outer = ops.heat_apply(f, t, n, 1e-10) - ops.heat_apply(f, t, n + 1, 1e-10)
    assert math.isclose(direct, outer, abs_tol=1e-8)


@given(st.integers(min_value=-5, max_value=5), st.floats(min_value=0.1, max_value=20.0), small_ints)
def test_heat_translation_equivariance(shift, t, n):
    f = lf.unit_impulse(shift)
    assert math.isclose(ops.heat_apply(f, t, n), hk.heat_kernel(t, n - shift), abs_tol=1e-15)


@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3), small_ints)
def test_mixed_differences_commute(l, s, n):
    f = lf.abs_pow(1.7)
    a = lf.mixed_diff(lf.differenced(f, l, 0), 0, s, n)
    b = lf.mixed_diff(lf.differenced(f, 0, s), l, 0, n)
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-9)


@given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=-8, max_value=8),
       st.integers(min_value=-8, max_value=8))
def test_holder_seminorm_dominates_every_quotient(alpha, n, m):
    assume(n != m)
    f = lf.rademacher(11)
    rep = reg.holder_seminorm(f, alpha, 8)
    q = abs(f(n) - f(m)) / abs(n - m) ** alpha
    assert q <= rep.value * (1 + 1e-12)


@given(st.floats(min_value=0.5, max_value=60.0))
def test_heat_table_mass(t):
    table = hk.heat_table(t, 1e-11)
    assert abs(table.total() - 1.0) <= 1e-11 + 1e-12
    assert math.isclose(table.moment(2), 2 * t, rel_tol=1e-6)
