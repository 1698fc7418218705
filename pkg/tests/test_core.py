import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sorsvd.core import (
    as_matrix,
    derive_seed,
    full_svd,
    gaussian_matrix,
    matmul,
    norm,
    pseudo_inverse,
    singular_values,
    thin_qr,
    truncated_svd,
)
from sorsvd.errors import ParameterError, ShapeError


def triple_loop(a, b):
    out = [[0.0] * len(b[0]) for _ in range(len(a))]
    for i in range(len(a)):
        for j in range(len(b[0])):
            for t in range(len(b)):
                out[i][j] += a[i][t] * b[t][j]
    return np.array(out)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def tall(min_rows=1, max_rows=12):
    return st.integers(1, 8).flatmap(
        lambda n: st.integers(max(n, min_rows), max(n, max_rows)).flatmap(
            lambda m: arrays(np.float64, (m, n), elements=finite)))


class TestMatmul:
    def test_identity(self):
        b = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        np.testing.assert_array_equal(matmul(np.eye(3), b), b)

    def test_zero(self):
        assert not np.any(matmul(np.zeros((2, 2)), np.arange(4.0).reshape(2, 2)))

    def test_hand_value(self):
        a, b = [[1, 2], [3, 4]], [[5], [6]]
        np.testing.assert_array_equal(matmul(a, b), [[17.0], [39.0]])
        np.testing.assert_array_equal(matmul(a, b), triple_loop(a, b))

    def test_random_against_loop(self, rng):
        a, b = rng.standard_normal((5, 4)), rng.standard_normal((4, 3))
        np.testing.assert_allclose(matmul(a, b), triple_loop(a.tolist(), b.tolist()), rtol=1e-13)

    def test_nonconformable(self):
        with pytest.raises(ShapeError):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


class TestThinQr:
    def test_identity(self):
        f = thin_qr(np.eye(4))
        np.testing.assert_allclose(np.abs(f.q), np.eye(4), atol=1e-15)
        np.testing.assert_allclose(np.abs(f.r), np.eye(4), atol=1e-15)

    def test_single_column(self):
        f = thin_qr(np.array([[3.0], [4.0]]))
        np.testing.assert_allclose(f.r, [[5.0]], rtol=1e-15)
        np.testing.assert_allclose(f.q, [[0.6], [0.8]], rtol=1e-15)

    @pytest.mark.parametrize("shape", [(50, 10), (1000, 38), (300, 300)])
    def test_invariants(self, shape):
        a = gaussian_matrix(*shape, seed=3)
        f = thin_qr(a)
        ell = shape[1]
        assert np.linalg.norm(f.q.T @ f.q - np.eye(ell)) <= 1e-12 * math.sqrt(ell)
        assert np.linalg.norm(f.q @ f.r - a) <= 1e-12 * np.linalg.norm(a)
        assert np.all(np.tril(f.r, -1) == 0.0)
        assert np.all(np.diag(f.r) >= 0.0)

    def test_matches_lapack_up_to_signs(self, rng):
        a = rng.standard_normal((40, 12))
        f = thin_qr(a)
        q, r = np.linalg.qr(a)
        s = np.sign(np.diag(r))
        np.testing.assert_allclose(f.q, q * s, atol=1e-12)
        np.testing.assert_allclose(f.r, r * s[:, None], atol=1e-12)

    def test_rank_deficient_keeps_orthonormal_q(self):
        a = np.zeros((6, 3))
        a[:, 0] = 1.0
        a[:, 2] = 2.0
        f = thin_qr(a)
        np.testing.assert_allclose(f.q.T @ f.q, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(f.q @ f.r, a, atol=1e-14)

    def test_wide_rejected(self):
        with pytest.raises(ShapeError):
            thin_qr(np.ones((2, 3)))

    @settings(max_examples=60, deadline=None)
    @given(tall())
    def test_property(self, a):
        f = thin_qr(a)
        n = a.shape[1]
        assert np.linalg.norm(f.q.T @ f.q - np.eye(n)) <= 1e-12 * math.sqrt(n)
        assert np.linalg.norm(f.q @ f.r - a) <= 1e-12 * max(np.linalg.norm(a), 1e-300)


class TestSvd:
    def test_diagonal(self):
        f = full_svd(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_allclose(f.sigma, [3, 2, 1])
        np.testing.assert_allclose(f.u, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(f.v, np.eye(3), atol=1e-15)

    def test_rank_one(self, rng):
        u = rng.standard_normal(7)
        v = rng.standard_normal(5)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        s = full_svd(np.outer(u, v)).sigma
        assert s[0] == pytest.approx(1.0, rel=1e-14)
        assert np.all(s[1:] < 1e-15)

    def test_reconstruction_and_orthonormality(self, rng):
        a = rng.standard_normal((30, 20))
        f = full_svd(a)
        r = f.rank
        assert np.linalg.norm((f.u * f.sigma) @ f.v.T - a) <= 1e-11 * np.linalg.norm(a)
        assert np.linalg.norm(f.u.T @ f.u - np.eye(r)) <= 1e-12 * math.sqrt(r)
        assert np.linalg.norm(f.v.T @ f.v - np.eye(r)) <= 1e-12 * math.sqrt(r)
        assert np.all(np.diff(f.sigma) <= 0) and np.all(f.sigma >= 0)

    def test_sign_canonical(self, rng):
        f = full_svd(rng.standard_normal((9, 6)))
        idx = np.argmax(np.abs(f.u), axis=0)
        assert np.all(f.u[idx, np.arange(6)] > 0)

    def test_truncated_diagonal(self):
        np.testing.assert_allclose(truncated_svd(np.diag([3.0, 2.0, 1.0]), 2).sigma, [3, 2])

    def test_truncated_full_equals_full(self, rng):
        a = rng.standard_normal((8, 5))
        t, f = truncated_svd(a, 5), full_svd(a)
        for x, y in ((t.u, f.u), (t.sigma, f.sigma), (t.v, f.v)):
            np.testing.assert_array_equal(x, y)

    def test_truncated_tail_identity(self, stewart300):
        a, svd_a = stewart300
        t = truncated_svd(a, 20)
        err = np.linalg.norm(a - (t.u * t.sigma) @ t.v.T)
        assert err == pytest.approx(math.sqrt(np.sum(svd_a.sigma[20:] ** 2)), rel=1e-9)

    def test_truncated_bad_k(self):
        with pytest.raises(ParameterError):
            truncated_svd(np.eye(3), 4)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 30), st.integers(2, 30), st.integers(0, 2**32))
    def test_against_eigh(self, m, n, seed):
        # independent oracle: sqrt of eigenvalues of A^T A
        a = gaussian_matrix(m, n, seed)
        s = full_svd(a).sigma
        ev = np.linalg.eigvalsh(a.T @ a)[::-1][: min(m, n)]
        np.testing.assert_allclose(s, np.sqrt(np.maximum(ev, 0.0)), atol=1e-8 * s[0])


class TestPinv:
    def test_identity(self):
        np.testing.assert_array_equal(pseudo_inverse(np.eye(3)), np.eye(3))

    def test_singular_diag(self):
        np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0]), tol=1e-12), np.diag([0.5, 0.0]))

    def test_penrose(self, rng):
        g = rng.standard_normal((5, 5))
        gp = pseudo_inverse(g)
        assert np.linalg.norm(g @ gp - np.eye(5)) <= 1e-10
        np.testing.assert_allclose(g @ gp @ g, g, atol=1e-12)
        np.testing.assert_allclose(gp @ g @ gp, gp, atol=1e-10)

    def test_zero(self):
        np.testing.assert_array_equal(pseudo_inverse(np.zeros((2, 3))), np.zeros((3, 2)))

    def test_matches_numpy(self, rng):
        a = rng.standard_normal((7, 4)) @ rng.standard_normal((4, 6))
        np.testing.assert_allclose(pseudo_inverse(a), np.linalg.pinv(a), atol=1e-10)


class TestNorm:
    def test_diagonal(self):
        d = np.diag([3.0, 4.0])
        assert norm(d, "frobenius") == 5.0
        assert norm(d, "spectral") == pytest.approx(4.0)
        assert norm(d, "nuclear") == pytest.approx(7.0)
        assert norm(d, "l1_elementwise") == 7.0

    @pytest.mark.parametrize("kind", ["frobenius", "spectral", "nuclear", "l1_elementwise"])
    def test_zero(self, kind):
        assert norm(np.zeros((3, 3)), kind) == 0.0

    def test_ordering(self, rng):
        a = rng.standard_normal((20, 20))
        assert norm(a, "nuclear") >= norm(a, "frobenius") >= norm(a, "spectral")

    def test_unknown(self):
        with pytest.raises(ParameterError):
            norm(np.eye(2), "max")


class TestGaussian:
    def test_deterministic(self):
        np.testing.assert_array_equal(gaussian_matrix(4, 3, 99), gaussian_matrix(4, 3, 99))
        assert not np.array_equal(gaussian_matrix(4, 3, 99), gaussian_matrix(4, 3, 100))

    def test_prefix_is_row_major(self):
        np.testing.assert_array_equal(gaussian_matrix(2, 3, 5).ravel(), gaussian_matrix(1, 6, 5).ravel())

    def test_moments(self):
        g = gaussian_matrix(1000, 1000, 2024)
        assert -0.01 < g.mean() < 0.01
        assert 0.99 < g.var() < 1.01

    def test_spectrum_range(self):
        s = singular_values(gaussian_matrix(200, 100, 8))
        lo, hi = math.sqrt(200) - math.sqrt(100), math.sqrt(200) + math.sqrt(100)
        assert 0.75 * lo < s[-1] < 1.25 * lo
        assert 0.75 * hi < s[0] < 1.25 * hi

    def test_large_seed_wraps(self):
        np.testing.assert_array_equal(gaussian_matrix(2, 2, 2**64 + 3), gaussian_matrix(2, 2, 3))

    def test_derive_seed_streams_differ(self):
        seeds = {derive_seed(7, s) for s in range(5)}
        assert len(seeds) == 5
        assert derive_seed(7, 1) == derive_seed(7, 1)

    def test_bad_dims(self):
        with pytest.raises(ParameterError):
            gaussian_matrix(0, 3, 1)


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ParameterError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ShapeError):
        as_matrix([1.0, 2.0])
