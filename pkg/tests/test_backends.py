"""The compiled and pure-Python kernels must agree, and the switch must work."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latticecalc import _pykernels

ck = pytest.importorskip("latticecalc._ckernels")


@given(st.integers(min_value=0, max_value=60), st.floats(min_value=0.01, max_value=40.0))
def test_scaled_series(n, t):
    assert ck.scaled_series(n, t) == pytest.approx(_pykernels.scaled_series(n, t), rel=1e-14, abs=1e-300)


@given(st.floats(min_value=0.01, max_value=30.0), st.integers(min_value=1, max_value=100))
def test_series_row(t, n_max):
    np.testing.assert_allclose(ck.series_row(t, n_max), _pykernels.series_row(t, n_max), rtol=1e-13, atol=1e-300)


@given(st.floats(min_value=1.0, max_value=1e4), st.integers(min_value=1, max_value=300))
def test_miller_row(t, n_max):
    np.testing.assert_allclose(ck.miller_row(t, n_max), _pykernels.miller_row(t, n_max), rtol=1e-13, atol=1e-300)


@given(st.floats(min_value=30.0, max_value=1e5), st.integers(min_value=-50, max_value=50),
       st.integers(min_value=0, max_value=8))
def test_heat_trapezoid(t, n, l):
    nodes = 64 + 16 * int(t ** 0.5)
    a, b = ck.heat_diff_trapezoid(t, n, l, nodes), _pykernels.heat_diff_trapezoid(t, n, l, nodes)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-16)


def test_partial_sums():
    rng = np.random.default_rng(1)
    kernel = rng.standard_normal(2 * 300 + 1)
    fwin = rng.standard_normal(1000)
    centers = np.arange(300, 700, 37, dtype=np.int64)
    levels = np.array([0, 10, 150, 300], dtype=np.int64)
    np.testing.assert_allclose(ck.partial_sums(kernel, fwin, centers, levels),
                               _pykernels.partial_sums(kernel, fwin, centers, levels), rtol=1e-12, atol=1e-12)


def test_environment_switch():
    code = "import latticecalc; print(latticecalc.BACKEND)"
    pure = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                          env={**os.environ, "LATTICECALC_PURE": "1"})
    assert pure.stdout.strip() == "python"
    native = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert native.stdout.strip() == "cython"


def test_cli_output_identical_across_backends(cli_process):
    args = ("apply", "heat", "--f", "abs_pow:0.5", "--t", "40", "--window", "8")
    a = cli_process(*args)
    b = cli_process(*args, env={"LATTICECALC_PURE": "1"})
    assert a.returncode == b.returncode == 0
    fa = np.loadtxt(a.stdout.splitlines()[1:], delimiter=",")
    fb = np.loadtxt(b.stdout.splitlines()[1:], delimiter=",")
    np.testing.assert_allclose(fa, fb, rtol=1e-13, atol=1e-15)
