"""Deterministic dense kernels and the seeded Gaussian generator.

Matrices are plain 2-D ``float64`` numpy arrays. :func:`as_matrix` is the
validating constructor used at every public entry point.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError, ShapeError

EPS = np.finfo(np.float64).eps
_MASK64 = (1 << 64) - 1

NORM_KINDS = ("frobenius", "spectral", "nuclear", "l1_elementwise")


def as_matrix(a, name="matrix"):
    """Return ``a`` as a C-contiguous 2-D float64 array with finite entries."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class QrFactors:
    q: np.ndarray
    r: np.ndarray


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``a ~= u @ diag(sigma) @ v.T``; note ``v`` is n x r, not V^T."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]


def matmul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def thin_qr(a):
    """Economy Householder QR.

    ``r`` is upper triangular with exact zeros below the diagonal and a
    nonnegative diagonal, which makes the factorization unique for full
    column rank input. Zero columns leave their reflector as the identity, so
    ``q`` stays orthonormal for rank-deficient input.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        raise ShapeError(f"thin_qr needs rows >= cols, got {a.shape}")
    q, r = _kernels.householder_qr(a)
    return QrFactors(q=q, r=r)


def _canonical_signs(u, v):
    # make the largest-magnitude entry of every left singular vector positive
    if u.shape[1] == 0:
        return u, v
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, v * signs


def full_svd(a):
    """Thin SVD with ``r = min(m, n)`` triplets (LAPACK gesdd).

    Singular values come back nonincreasing; ties keep LAPACK's order.
    Singular vector signs are canonicalized (see :func:`_canonical_signs`).
    """
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    u, v = _canonical_signs(u, vt.T)
    return SvdFactors(u=np.ascontiguousarray(u), sigma=s, v=np.ascontiguousarray(v))


def truncated_svd(a, k):
    a = as_matrix(a)
    r = min(a.shape)
    if not 1 <= k <= r:
        raise ParameterError(f"k must lie in [1, {r}], got {k}")
    f = full_svd(a)
    return SvdFactors(u=f.u[:, :k].copy(), sigma=f.sigma[:k].copy(), v=f.v[:, :k].copy())


def singular_values(a):
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def pseudo_inverse(a, tol=None):
    """Moore-Penrose pseudo-inverse dropping ``sigma_i <= tol * sigma_1``.

    ``tol`` defaults to ``max(m, n) * eps``.
    """
    a = as_matrix(a)
    m, n = a.shape
    if tol is None:
        tol = max(m, n) * EPS
    if tol < 0:
        raise ParameterError("tol must be nonnegative")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((n, m))
    keep = s > tol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def norm(a, kind="frobenius"):
    a = np.asarray(a, dtype=np.float64)
    if kind == "frobenius":
        return float(np.sqrt(np.sum(a * a)))
    if kind == "l1_elementwise":
        return float(np.sum(np.abs(a)))
    if kind == "spectral":
        return float(singular_values(a)[0])
    if kind == "nuclear":
        return float(np.sum(singular_values(a)))
    raise ParameterError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")


def rng_for(seed):
    """Philox4x32-10 generator keyed by ``SeedSequence(seed mod 2**64)``."""
    return np.random.Generator(np.random.Philox(int(seed) & _MASK64))


def gaussian_matrix(rows, cols, seed):
    """Standard-normal matrix, a pure function of ``(rows, cols, seed)``.

    The stream is Philox keyed through numpy's ``SeedSequence`` and
    transformed with numpy's ziggurat sampler, filled row-major.
    """
    if rows < 1 or cols < 1:
        raise ParameterError(f"gaussian_matrix needs positive dims, got {rows}x{cols}")
    return rng_for(seed).standard_normal((rows, cols))


def derive_seed(seed, stream):
    """Deterministic child seed for sub-stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, int(stream)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
