import math

import numpy as np
import pytest

from latticecalc import lattice_fn as lf
from latticecalc.errors import ContractError, DomainError


def test_generators_evaluate():
    ns = np.array([-3, 0, 2])
    np.testing.assert_allclose(lf.abs_pow(0.5)(ns), [math.sqrt(3), 0, math.sqrt(2)])
    assert lf.linear()(-4) == -4.0
    assert lf.constant(2.5)(100) == 2.5
    assert lf.unit_impulse(3)(3) == 1.0 and lf.unit_impulse(3)(0) == 0.0
    assert lf.damped_pow(1.0, 10.0)(10) == pytest.approx(5.0)


def test_rademacher_is_reproducible_and_bounded():
    a, b = lf.rademacher(7), lf.rademacher(7)
    ns = np.arange(-300, 301)
    np.testing.assert_array_equal(a(ns), b(ns))
    assert set(np.unique(a(ns))) <= {-1.0, 1.0}
    # constant on each dyadic shell
    assert len(set(a(np.arange(64, 128)))) == 1


@pytest.mark.parametrize("spec", ["abs_pow:0.5", "linear", "constant:3", "delta:2", "rademacher:4",
                                  "zygmund_w", "damped_pow:0.4:100:2", "trunc:5:abs_pow:1.5"])
def test_parse_round_trip(spec):
    f = lf.parse_function(spec)
    g = lf.parse_function(f.name)
    ns = np.arange(-20, 21)
    np.testing.assert_array_equal(f(ns), g(ns))


@pytest.mark.parametrize("spec", ["nope", "abs_pow", "abs_pow:x", "abs_pow:-1"])
def test_parse_rejects(spec):
    with pytest.raises(DomainError):
        lf.parse_function(spec)


def test_truncation_support():
    f = lf.truncated(lf.abs_pow(2), 4)
    assert f.support == 4
    assert f(5) == 0.0 and f(-4) == 16.0


def test_table_extensions():
    vals = [4.0, 1.0, 0.0, 1.0, 4.0]
    z = lf.from_table(vals, -2, "zero")
    c = lf.from_table(vals, -2, "clamp")
    p = lf.from_table(vals, -2, "power_growth", alpha=2.0)
    assert z(3) == 0.0 and c(3) == 4.0 and p(4) == pytest.approx(16.0)
    assert z.support == 2 and p.support is None
    with pytest.raises(DomainError):
        lf.from_table(vals, -2, "mirror")


def test_csv_loader(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("n,value\n-1,1.0\n0,0.0\n1,1.0\n")
    f = lf.from_csv(str(path))
    assert f(1) == 1.0 and f(2) == 0.0
    gap = tmp_path / "gap.csv"
    gap.write_text("0,1\n2,3\n")
    with pytest.raises(DomainError):
        lf.from_csv(str(gap))


def test_differences():
    f = lf.abs_pow(2)
    assert lf.delta(f, "right", 3) == 9 - 16
    assert lf.delta(f, "left", 3) == 9 - 4
    assert lf.discrete_laplacian(f, 5) == 2.0
    # delta_right delta_left f(n) = -(f(n+1) - 2 f(n) + f(n-1))
    assert lf.mixed_diff(f, 1, 1, 5) == -2.0
    g = lf.differenced(lf.linear(), 1)
    np.testing.assert_array_equal(g(np.arange(-3, 4)), -1.0)
    with pytest.raises(DomainError):
        lf.delta(f, "up", 0)


def test_weighted_classes():
    # |n|^0.5 lies in l_beta once beta > 1/4
    rep = lf.weighted_norm(lf.abs_pow(0.5), 0.3, "+")
    assert rep.converged
    # a constant is not in l_{-beta}
    assert not lf.weighted_norm(lf.constant(), 0.25, "-", N_max=1 << 16).converged
    with pytest.raises(ContractError):
        lf.require_weighted(lf.constant(), 0.5, "test")
    with pytest.raises(DomainError):
        lf.weighted_norm(lf.constant(), 0.6, "-")


def test_growth_certificate():
    assert lf.growth_certificate(lf.abs_pow(0.5), 0.5, 1000) <= 1.0
    assert lf.growth_certificate(lf.abs_pow(1.0), 0.5, 1000) > 10
