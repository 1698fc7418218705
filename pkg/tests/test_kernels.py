"""Numba and numpy kernels must agree; the env flag must select the fallback."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sorsvd import _kernels
from sorsvd._accel import HAVE_NUMBA
from sorsvd.core import gaussian_matrix

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("shape", [(1, 1), (5, 5), (40, 7), (300, 38)])
def test_qr_backends_agree(shape):
    a = gaussian_matrix(*shape, seed=11)
    q1, r1 = _kernels.householder_qr_np(a)
    q2, r2 = _kernels.householder_qr_nb(a)
    np.testing.assert_allclose(q1, q2, atol=1e-12)
    np.testing.assert_allclose(r1, r2, atol=1e-12 * np.abs(a).max())


@needs_numba
def test_qr_backends_agree_with_zero_column():
    a = gaussian_matrix(8, 4, seed=2)
    a[:, 1] = 0.0
    for q, r in (_kernels.householder_qr_np(a), _kernels.householder_qr_nb(a)):
        np.testing.assert_allclose(q.T @ q, np.eye(4), atol=1e-14)
        np.testing.assert_allclose(q @ r, a, atol=1e-13)


@needs_numba
@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.0, 3.0), st.integers(0, 2**32))
def test_soft_threshold_backends_agree(m, n, eps, seed):
    x = gaussian_matrix(m, n, seed)
    np.testing.assert_array_equal(_kernels.soft_threshold_np(x, eps), _kernels.soft_threshold_nb(x, eps))


def test_soft_threshold_np_formula():
    x = np.array([[1.2, -1.2, 0.3, -0.5, 0.0]])
    np.testing.assert_allclose(_kernels.soft_threshold_np(x, 0.5), [[0.7, -0.7, 0.0, 0.0, 0.0]])


def test_env_flag_selects_numpy():
    env = dict(os.environ, SORSVD_DISABLE_NUMBA="1")
    code = ("from sorsvd import _kernels, backend;"
            "print(backend(), _kernels.householder_qr is _kernels.householder_qr_np)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_thread_cap_from_env():
    env = dict(os.environ, SORSVD_THREADS="1")
    code = "from sorsvd._accel import apply_thread_cap; print(apply_thread_cap())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1"
