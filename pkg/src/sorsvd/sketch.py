"""Randomized low-rank decompositions.

``sor_svd`` / ``sor_svd_power`` compress ``A`` from both sides with bases
built from ``T1 = A Omega`` and ``T2 = A^T T1`` and truncate the small core.
``r_svd`` (one-sided) and ``tsr_svd`` (two independent test matrices, single
pass) are the baselines.

With ``stabilize=True`` (the default) every product feeding the next
multiplication is re-orthonormalized first, e.g. ``T2 = A^T Q1`` instead of
``A^T T1``. Both span the same column space whenever ``R1`` is nonsingular,
so the resulting projectors are unchanged in exact arithmetic; in floating
point it keeps directions with ``sigma_j**2 < eps * sigma_1**2`` from being
swamped by rounding.
"""
from dataclasses import dataclass, replace

import numpy as np

from .core import as_matrix, gaussian_matrix, pseudo_inverse, thin_qr
from .errors import ParameterError, ShapeError

METHODS = ("sor", "sor_power", "rsvd", "tsr")
FLOP_VARIANTS = ("sor_3pass", "sor_2pass", "sor_power_2q3", "sor_power_2q2")


@dataclass(frozen=True)
class SketchConfig:
    ell: int
    q: int = 0
    seed: int = 0
    single_pass: bool = False
    stabilize: bool = True

    def __post_init__(self):
        if self.ell < 1:
            raise ParameterError("ell must be >= 1")
        if self.q < 0:
            raise ParameterError("q must be >= 0")


@dataclass(frozen=True)
class LowRankApprox:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    method: str
    passes: int
    ell: int
    q: int
    seed: int

    @property
    def k(self):
        return self.sigma.shape[0]

    def truncate(self, k):
        if not 1 <= k <= self.k:
            raise ParameterError(f"cannot truncate rank {self.k} to {k}")
        return replace(self, u=self.u[:, :k].copy(), sigma=self.sigma[:k].copy(),
                       v=self.v[:, :k].copy())


def _check_sizes(a, k, ell):
    m, n = a.shape
    if m < 2 or n < 2:
        raise ShapeError(f"input must be at least 2x2, got {a.shape}")
    if not 1 <= k <= ell:
        raise ParameterError(f"need 1 <= k <= ell, got k={k}, ell={ell}")
    if not ell < min(m, n):
        raise ParameterError(f"need ell < min(m, n) = {min(m, n)}, got ell={ell}")


def _small_svd(core, k):
    # SVD of the ell x ell core, truncated to k, signs left as LAPACK returns
    u, s, vt = np.linalg.svd(core, full_matrices=False)
    return u[:, :k], s[:k], vt[:k].T


def _assemble(q1, uk, sk, q2, vk, **meta):
    return LowRankApprox(u=q1 @ uk, sigma=sk.copy(), v=q2 @ vk, **meta)


def m_approx(q1, t1, q2, omega_or_t2):
    """Single-pass core estimate ``Q1^T T1 (Q2^T Omega)^+``."""
    left = q1.T @ t1
    mid = q2.T @ omega_or_t2
    if mid.shape[0] != mid.shape[1] or left.shape[1] != mid.shape[0]:
        raise ShapeError(f"non-conformable core factors {left.shape}, {mid.shape}")
    return left @ pseudo_inverse(mid)


def sor_sketch(a, cfg: SketchConfig):
    """Run the sketch stage; returns ``(q1, q2, t1, z_prev)``.

    ``z_prev`` is the right-hand factor the final ``T1`` was formed from
    (``Omega`` when q = 0); it is what the single-pass core needs.
    """
    n = a.shape[1]
    z = gaussian_matrix(n, cfg.ell, cfg.seed)
    q1 = t1 = t2 = z_prev = None
    for _ in range(cfg.q + 1):
        z_prev = z
        t1 = a @ z
        q1 = thin_qr(t1).q
        t2 = a.T @ (q1 if cfg.stabilize else t1)
        z = thin_qr(t2).q if cfg.stabilize else t2
    q2 = z if cfg.stabilize else thin_qr(t2).q
    return q1, q2, t1, z_prev


def sor_svd_power(a, k, cfg: SketchConfig):
    """Subspace-orbit randomized SVD with ``cfg.q`` power iterations."""
    a = as_matrix(a)
    _check_sizes(a, k, cfg.ell)
    q1, q2, t1, z_prev = sor_sketch(a, cfg)
    if cfg.single_pass:
        core = m_approx(q1, t1, q2, z_prev)
        passes = 2 * cfg.q + 2
    else:
        core = q1.T @ (a @ q2)
        passes = 2 * cfg.q + 3
    uk, sk, vk = _small_svd(core, k)
    method = "sor_power" if cfg.q > 0 else "sor"
    return _assemble(q1, uk, sk, q2, vk, method=method, passes=passes,
                     ell=cfg.ell, q=cfg.q, seed=cfg.seed)


def sor_svd(a, k, cfg: SketchConfig):
    """Basic (q = 0) subspace-orbit randomized SVD."""
    if cfg.q != 0:
        raise ParameterError("sor_svd takes q=0; use sor_svd_power for q >= 1")
    return sor_svd_power(a, k, cfg)


def r_svd(a, ell, q=0, seed=0, k=None, stabilize=True):
    """One-sided randomized SVD; rank ``ell`` unless ``k`` truncates further."""
    a = as_matrix(a)
    k = ell if k is None else k
    _check_sizes(a, k, ell)
    y = a @ gaussian_matrix(a.shape[1], ell, seed)
    for _ in range(q):
        if stabilize:
            y = a @ thin_qr(a.T @ thin_qr(y).q).q
        else:
            y = a @ (a.T @ y)
    qb = thin_qr(y).q
    b = qb.T @ a
    u, s, vt = np.linalg.svd(b, full_matrices=False)
    return LowRankApprox(u=qb @ u[:, :k], sigma=s[:k].copy(), v=vt[:k].T.copy(),
                         method="rsvd", passes=2 * q + 2, ell=ell, q=q, seed=seed)


def tsr_svd(a, ell, seed=0, k=None):
    """Two-sided single-pass randomized SVD (row test matrix from ``seed ^ 1``)."""
    a = as_matrix(a)
    k = ell if k is None else k
    _check_sizes(a, k, ell)
    m, n = a.shape
    psi1 = gaussian_matrix(n, ell, seed)
    psi2 = gaussian_matrix(m, ell, int(seed) ^ 1)
    y1 = a @ psi1
    y2 = a.T @ psi2
    q1 = thin_qr(y1).q
    q2 = thin_qr(y2).q
    core = m_approx(q1, y1, q2, psi1)
    uk, sk, vk = _small_svd(core, k)
    return _assemble(q1, uk, sk, q2, vk, method="tsr", passes=1, ell=ell, q=0, seed=seed)


def decompose(a, k, method, cfg: SketchConfig):
    """Uniform entry point: rank-k approximation by any of :data:`METHODS`."""
    if method in ("sor", "sor_power"):
        return sor_svd_power(a, k, cfg)
    if method == "rsvd":
        return r_svd(a, cfg.ell, cfg.q, cfg.seed, k=k, stabilize=cfg.stabilize)
    if method == "tsr":
        return tsr_svd(a, cfg.ell, cfg.seed, k=k)
    raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")


def reconstruct(x: LowRankApprox):
    return (x.u * x.sigma) @ x.v.T


def approx_error(a, x: LowRankApprox, kind="frobenius"):
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (x.u.shape[0], x.v.shape[0]):
        raise ShapeError(f"matrix {a.shape} vs approximation {(x.u.shape[0], x.v.shape[0])}")
    resid = a - reconstruct(x)
    if kind == "frobenius":
        return float(np.linalg.norm(resid))
    if kind == "spectral":
        return float(np.linalg.svd(resid, compute_uv=False)[0])
    raise ParameterError(f"kind must be 'frobenius' or 'spectral', got {kind!r}")


def flop_estimate(m, n, ell, k, q=0, variant="sor_3pass"):
    """Leading-order flop count of the SOR variants with ``C_mult = 2 m n``."""
    if min(m, n, ell, k) < 1 or q < 0:
        raise ParameterError("dimensions must be positive and q >= 0")
    c_mult = 2 * m * n
    three_pass_tail = 2 * ell * (m + n) * (ell + k) + 2 * ell * ell * (m + ell)
    two_pass_tail = 2 * ell * (m + n) * (2 * ell + k) + 5 * ell ** 3
    if variant == "sor_3pass":
        return 3 * ell * c_mult + three_pass_tail
    if variant == "sor_2pass":
        return 2 * ell * c_mult + two_pass_tail
    if variant == "sor_power_2q3":
        return (2 * q + 3) * ell * c_mult + three_pass_tail
    if variant == "sor_power_2q2":
        return (2 * q + 2) * ell * c_mult + two_pass_tail
    raise ParameterError(f"unknown variant {variant!r}; expected one of {FLOP_VARIANTS}")


__all__ = [
    "LowRankApprox", "SketchConfig", "approx_error", "decompose", "flop_estimate",
    "m_approx", "r_svd", "reconstruct", "sor_sketch", "sor_svd", "sor_svd_power", "tsr_svd",
]
