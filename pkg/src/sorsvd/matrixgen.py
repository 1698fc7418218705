"""Seeded generators for the synthetic experiment families.

All generators are pure functions of their parameters and seed. Independent
pieces of one matrix (left factor, right factor, noise, support) draw from
child seeds produced by :func:`sorsvd.core.derive_seed`.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .core import derive_seed, gaussian_matrix, rng_for, singular_values, thin_qr
from .errors import ParameterError

FAMILIES = ("noisy_lowrank", "polydecay", "rpca_instance", "random_orthonormal")
NOISE_NORMALIZATIONS = ("spectral", "frobenius")


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    k_or_r: int = 0
    s: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ParameterError("n must be positive")
        if self.family in ("noisy_lowrank", "rpca_instance") and not self.k_or_r < self.n:
            raise ParameterError("rank parameter must be < n")
        if self.family == "rpca_instance" and not 0 <= self.s <= self.n * self.n:
            raise ParameterError("s must lie in [0, n^2]")

    def to_dict(self):
        return asdict(self)


def random_orthonormal(n, seed):
    """Haar-distributed orthogonal n x n matrix (Q of a Gaussian's QR)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return thin_qr(gaussian_matrix(n, n, seed)).q


def geometric_spectrum(k):
    """``sigma_j = 10**(-9 (j-1)/(k-1))``: from 1 down to 1e-9 inclusive."""
    if k < 2:
        raise ParameterError("geometric decay needs k >= 2")
    return 10.0 ** (-9.0 * np.arange(k) / (k - 1))


def gen_noisy_lowrank(n, k, seed, noise=0.1, normalization="spectral"):
    """Stewart-style noisy rank-k matrix ``U S V^T + noise * sigma_k * E``.

    ``E`` is a Gaussian matrix scaled to unit spectral norm, or to unit
    Frobenius norm with ``normalization="frobenius"``.
    """
    if not 2 <= k < n:
        raise ParameterError(f"need 2 <= k < n, got k={k}, n={n}")
    if normalization not in NOISE_NORMALIZATIONS:
        raise ParameterError(f"normalization must be one of {NOISE_NORMALIZATIONS}")
    sigma = geometric_spectrum(k)
    u = random_orthonormal(n, derive_seed(seed, 0))[:, :k]
    v = random_orthonormal(n, derive_seed(seed, 1))[:, :k]
    a = (u * sigma) @ v.T
    if noise != 0.0:
        g = gaussian_matrix(n, n, derive_seed(seed, 2))
        if normalization == "spectral":
            scale = singular_values(g)[0]
        else:
            scale = np.linalg.norm(g)
        a += (noise * sigma[-1] / scale) * g
    return a


def gen_polydecay(n, seed):
    """``U diag(1, 1/2, ..., 1/n) V^T`` with Haar U, V."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    sigma = 1.0 / np.arange(1, n + 1)
    u = random_orthonormal(n, derive_seed(seed, 0))
    v = random_orthonormal(n, derive_seed(seed, 1))
    return (u * sigma) @ v.T


def gen_rpca_instance(n, r, s, seed, magnitude=50.0):
    """Return ``(x, l_true, s_true)`` with ``x = l_true + s_true``.

    ``l_true = U V^T`` with standard Gaussian n x r factors; ``s_true`` has
    exactly ``s`` nonzeros at distinct uniform positions, each +-magnitude.
    """
    if not 1 <= r < n:
        raise ParameterError(f"need 1 <= r < n, got r={r}, n={n}")
    if not 0 <= s <= n * n:
        raise ParameterError(f"need 0 <= s <= n^2, got {s}")
    u = gaussian_matrix(n, r, derive_seed(seed, 0))
    v = gaussian_matrix(n, r, derive_seed(seed, 1))
    low = u @ v.T
    rng = rng_for(derive_seed(seed, 2))
    positions = rng.choice(n * n, size=s, replace=False)
    signs = np.where(rng.integers(0, 2, size=s) == 1, magnitude, -magnitude)
    sparse = np.zeros(n * n)
    sparse[positions] = signs
    sparse = sparse.reshape(n, n)
    return low + sparse, low, sparse


def generate(spec: GenSpec):
    """Dispatch on ``spec.family``; returns a dict of named matrices."""
    if spec.family == "noisy_lowrank":
        return {"a": gen_noisy_lowrank(spec.n, spec.k_or_r, spec.seed)}
    if spec.family == "polydecay":
        return {"a": gen_polydecay(spec.n, spec.seed)}
    if spec.family == "random_orthonormal":
        return {"a": random_orthonormal(spec.n, spec.seed)}
    x, low, sparse = gen_rpca_instance(spec.n, spec.k_or_r, spec.s, spec.seed)
    return {"a": x, "l": low, "s": sparse}
