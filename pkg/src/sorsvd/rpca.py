"""Robust PCA ``X = L + S`` by inexact augmented Lagrange multipliers.

Each iteration shrinks the singular values of a SOR-SVD sketch of
``X - S + Y/mu`` (low-rank step), soft-thresholds the residual (sparse step),
then takes a dual ascent step on ``Y`` and raises ``mu``.
"""
import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .core import as_matrix, singular_values
from .errors import NumericalError, ParameterError
from .sketch import SketchConfig, sor_svd_power

RANK_TOL = 1e-8
TELEMETRY_COLUMNS = ("iter", "mu", "rel_error", "rank_l", "nnz_s")


@dataclass(frozen=True)
class RpcaConfig:
    lam: float
    mu0: float
    mu_bar: float
    rho: float = 1.6
    tol: float = 1e-7
    max_iter: int = 500
    ell: int = 1
    q: int = 1
    seed: int = 0
    mu_update_literal: bool = False

    def __post_init__(self):
        if not self.rho > 1.0:
            raise ParameterError(f"rho must exceed 1, got {self.rho}")
        if not self.tol > 0.0:
            raise ParameterError("tol must be positive")
        if self.ell < 1:
            raise ParameterError("ell must be >= 1")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")
        if self.q < 0:
            raise ParameterError("q must be >= 0")
        if not (self.lam > 0 and self.mu0 > 0 and self.mu_bar > 0):
            raise ParameterError("lam, mu0 and mu_bar must be positive")


@dataclass(frozen=True)
class IterationStats:
    iter: int
    mu: float
    rel_error: float
    rank_l: int
    nnz_s: int


@dataclass
class RpcaResult:
    l: np.ndarray
    s: np.ndarray
    iterations: int
    rel_error: float
    rank_l: int
    nnz_s: int
    converged: bool
    history: list = field(default_factory=list)

    def telemetry_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TELEMETRY_COLUMNS)
        for h in self.history:
            w.writerow([h.iter, repr(h.mu), repr(h.rel_error), h.rank_l, h.nnz_s])
        return buf.getvalue()


def soft_threshold(x, eps):
    """Elementwise ``sign(x) * max(|x| - eps, 0)``; scalars stay scalars."""
    if eps < 0:
        raise ParameterError(f"eps must be nonnegative, got {eps}")
    if np.isscalar(x):
        return float(math.copysign(max(abs(x) - eps, 0.0), x)) if abs(x) > eps else 0.0
    arr = np.ascontiguousarray(x, dtype=np.float64)
    return _kernels.soft_threshold(arr, float(eps))


def estimate_rank_bound(x):
    """``ceil((||X||_* / ||X||_F)^2)``, a lower estimate of the rank."""
    sig = singular_values(x)
    fro = math.sqrt(float(np.sum(sig ** 2)))
    if fro == 0.0:
        raise ParameterError("rank estimate is undefined for the zero matrix")
    ratio = (float(np.sum(sig)) / fro) ** 2
    # guard against 4.000000000001 style round-up
    return max(1, math.ceil(ratio - 1e-9 * ratio))


def rpca_default_config(x, **overrides):
    x = as_matrix(x)
    m, n = x.shape
    sig = singular_values(x)
    s1 = float(sig[0])
    lam = 1.0 / math.sqrt(max(m, n))
    if s1 == 0.0:
        mu0 = 1.0
        ell = 1
    else:
        mu0 = 1.25 / s1
        ell = estimate_rank_bound(x)
        ell = min(2 * ell, min(m, n) - 1)
    cfg = RpcaConfig(lam=lam, mu0=mu0, mu_bar=mu0 * 1e7, rho=1.6, tol=1e-7,
                     max_iter=500, ell=max(ell, 1), q=1)
    return replace(cfg, **overrides) if overrides else cfg


def initial_dual(x, lam):
    """``Y0 = X / max(||X||_2, ||X||_inf / lam)``, the usual dual-feasible start."""
    spec = float(singular_values(x)[0])
    inf = float(np.max(np.abs(x)))
    scale = max(spec, inf / lam)
    return x / scale if scale > 0 else np.zeros_like(x)


def augmented_lagrangian(x, l, s, y, mu, lam):
    """``||L||_* + lam ||S||_1 + <Y, X-L-S> + mu/2 ||X-L-S||_F^2``."""
    r = x - l - s
    return (float(np.sum(singular_values(l))) + lam * float(np.sum(np.abs(s)))
            + float(np.sum(y * r)) + 0.5 * mu * float(np.sum(r * r)))


def sparse_step(x, l, y, mu, lam):
    return soft_threshold(x - l + y / mu, lam / mu)


def lowrank_step(x, s, y, mu, ell, q, seed):
    """Singular value shrinkage of a rank-``ell`` SOR-SVD of ``X - S + Y/mu``."""
    d = x - s + y / mu
    cfg = SketchConfig(ell=ell, q=q, seed=seed)
    approx = sor_svd_power(d, ell, cfg)
    shrunk = np.maximum(approx.sigma - 1.0 / mu, 0.0)
    keep = shrunk > 0
    l = (approx.u[:, keep] * shrunk[keep]) @ approx.v[:, keep].T
    rank = int(np.count_nonzero(shrunk > RANK_TOL * shrunk[0])) if shrunk.size and shrunk[0] > 0 else 0
    return l, rank


def _next_mu(mu, cfg):
    if cfg.mu_update_literal:
        return max(cfg.rho * mu, cfg.mu_bar)
    return min(cfg.rho * mu, cfg.mu_bar)


def rpca_alm(x, cfg: RpcaConfig | None = None):
    x = as_matrix(x)
    m, n = x.shape
    norm_x = float(np.linalg.norm(x))
    if norm_x == 0.0:
        z = np.zeros_like(x)
        stats = IterationStats(1, 0.0 if cfg is None else cfg.mu0, 0.0, 0, 0)
        return RpcaResult(l=z, s=z.copy(), iterations=1, rel_error=0.0, rank_l=0, nnz_s=0,
                          converged=True, history=[stats])
    cfg = rpca_default_config(x) if cfg is None else cfg
    if not cfg.ell < min(m, n):
        raise ParameterError(f"ell must be < min(m, n) = {min(m, n)}")

    y = initial_dual(x, cfg.lam)
    s = np.zeros_like(x)
    l = np.zeros_like(x)
    mu = cfg.mu0
    history = []
    rel = math.inf
    rank = nnz = 0
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        l, rank = lowrank_step(x, s, y, mu, cfg.ell, cfg.q, cfg.seed + it - 1)
        s = sparse_step(x, l, y, mu, cfg.lam)
        resid = x - l - s
        y = y + mu * resid
        rel = float(np.linalg.norm(resid)) / norm_x
        if not math.isfinite(rel):
            raise NumericalError(f"non-finite residual at iteration {it}")
        nnz = int(np.count_nonzero(s))
        history.append(IterationStats(it, mu, rel, rank, nnz))
        if rel < cfg.tol:
            converged = True
            break
        mu = _next_mu(mu, cfg)
    return RpcaResult(l=l, s=s, iterations=it, rel_error=rel, rank_l=rank, nnz_s=nnz,
                      converged=converged, history=history)


__all__ = [
    "IterationStats", "RpcaConfig", "RpcaResult", "augmented_lagrangian", "estimate_rank_bound",
    "initial_dual", "lowrank_step", "rpca_alm", "rpca_default_config", "soft_threshold",
    "sparse_step",
]
