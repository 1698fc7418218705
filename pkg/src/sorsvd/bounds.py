"""Deterministic and average-case error bounds for SOR-SVD, and a harness
that checks them against realized decompositions.

Conventions: ``sigma`` is the full nonincreasing spectrum of ``A`` (length
``min(m, n)``), indices in docstrings are 1-based as in the usual notation,
``tail = sigma_{ell-p+1}`` and ``phi = ||Omega_2||_2^2 ||Omega_1^+||_2^2``.
"""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .core import EPS, as_matrix, full_svd, gaussian_matrix
from .errors import BoundInapplicableError, ParameterError
from .sketch import SketchConfig, approx_error, sor_svd_power

KINDS = ("frobenius", "spectral")
TAU_FORMS = ("derived", "printed")


@dataclass(frozen=True)
class BoundParams:
    """Analysis parameters. ``p=None`` means: tightest over admissible p."""

    k: int
    ell: int
    p: int | None = 2
    q: int = 0

    def __post_init__(self):
        if self.k < 1 or self.q < 0:
            raise ParameterError("k must be >= 1 and q >= 0")
        if self.p is not None and not 2 <= self.p + self.k <= self.ell:
            raise ParameterError(f"need 2 <= p + k <= ell, got p={self.p}, k={self.k}, ell={self.ell}")
        if self.p is None and self.ell - self.k < 2:
            raise ParameterError("no admissible p >= 2 when ell - k < 2")

    def with_p(self, p):
        return BoundParams(self.k, self.ell, p, self.q)

    def admissible_p(self):
        """Split parameters scanned when ``p is None``: 2 .. ell - k."""
        if self.p is not None:
            return [self.p]
        return list(range(2, self.ell - self.k + 1))


@dataclass(frozen=True)
class OmegaSplit:
    omega1: np.ndarray
    omega2: np.ndarray
    norm_omega2: float
    norm_omega1_pinv: float
    full_row_rank: bool

    @property
    def phi(self):
        return self.norm_omega2 ** 2 * self.norm_omega1_pinv ** 2


def _check_dims(n, params: BoundParams, p):
    if params.ell - p + 1 > n:
        raise ParameterError(f"sigma_(ell-p+1) out of range for n={n}")


def split_from_projection(g, p, n=None):
    """Build the split from ``g = V^T Omega`` (all n rows) at split index p."""
    n = g.shape[0] if n is None else n
    ell = g.shape[1]
    r1 = ell - p
    omega1 = g[:r1]
    omega2 = g[r1:]
    s1 = np.linalg.svd(omega1, compute_uv=False)
    smax, smin = s1[0], s1[-1]
    full = bool(smin > n * EPS * smax)
    pinv_norm = 1.0 / smin if smin > 0 else math.inf
    norm2 = float(np.linalg.svd(omega2, compute_uv=False)[0]) if omega2.shape[0] else 0.0
    return OmegaSplit(omega1=omega1, omega2=omega2, norm_omega2=norm2,
                      norm_omega1_pinv=float(pinv_norm), full_row_rank=full)


def omega_split(v, omega, params: BoundParams):
    """Project the test matrix onto leading/trailing right singular vectors.

    ``v`` holds all n right singular vectors; the first ``ell - p`` define
    ``Omega_1 = V_1^T Omega`` and the remaining ``n - ell + p`` define
    ``Omega_2``.
    """
    v = as_matrix(v, "v")
    omega = as_matrix(omega, "omega")
    n = v.shape[0]
    if v.shape != (n, n) or omega.shape[0] != n or omega.shape[1] != params.ell:
        raise ParameterError(f"need v n x n and omega n x ell, got {v.shape}, {omega.shape}")
    if params.p is None:
        raise ParameterError("omega_split needs a fixed p")
    _check_dims(n, params, params.p)
    return split_from_projection(v.T @ omega, params.p, n)


def _tail(sigma, params, p):
    return float(sigma[params.ell - p])


def _a0(sigma, k, kind):
    if kind == "frobenius":
        return float(np.sqrt(np.sum(sigma[k:] ** 2)))
    if kind == "spectral":
        return float(sigma[k]) if sigma.shape[0] > k else 0.0
    raise ParameterError(f"kind must be one of {KINDS}")


def _require_split(split: OmegaSplit):
    if not split.full_row_rank:
        raise BoundInapplicableError("Omega_1 is not full row rank")


def det_sv_lower_bound(sigma, params: BoundParams, split: OmegaSplit):
    """``sigma_j / sqrt(1 + phi (tail / sigma_j)^(4q+4))`` for j = 1..k."""
    _require_split(split)
    sigma = np.asarray(sigma, dtype=np.float64)
    tail = _tail(sigma, params, params.p)
    sj = sigma[: params.k]
    out = np.zeros_like(sj)
    pos = sj > 0
    if tail == 0.0:
        out[pos] = sj[pos]
        return out
    ratio = tail / sj[pos]
    out[pos] = sj[pos] / np.sqrt(1.0 + split.phi * ratio ** (4 * params.q + 4))
    return out


def lowrank_coefficients(sigma, params: BoundParams, p=None, tau_form="derived"):
    """``(alpha, beta, eta, tau)`` of the per-realization low-rank bound.

    With power iterations ``tau`` is ``(sigma_k / tail) * beta`` by default,
    which follows from bounding ``D_1 Sigma_1`` and reduces to ``tail /
    sigma_1`` at q = 0. ``tau_form="printed"`` uses ``beta / tail`` instead;
    that variant is not scale-equivariant and is kept for comparison only.
    """
    if tau_form not in TAU_FORMS:
        raise ParameterError(f"tau_form must be one of {TAU_FORMS}")
    sigma = np.asarray(sigma, dtype=np.float64)
    p = params.p if p is None else p
    k, q = params.k, params.q
    tail = _tail(sigma, params, p)
    s1, sk = float(sigma[0]), float(sigma[k - 1])
    if tail == 0.0:
        return 0.0, 0.0, 0.0, 0.0
    if q == 0:
        alpha = math.sqrt(k) * tail ** 2 / sk
        beta = tail ** 2 / (s1 * sk)
        eta = math.sqrt(k) * tail
        tau = tail / s1
    else:
        damp = (tail / sk) ** (2 * q)
        alpha = math.sqrt(k) * tail ** 2 / sk * damp
        beta = tail ** 2 / (s1 * sk) * damp
        eta = sk / tail * alpha
        tau = beta / tail if tau_form == "printed" else sk / tail * beta
    return alpha, beta, eta, tau


def det_lowrank_bound(sigma, params: BoundParams, split: OmegaSplit, kind="frobenius",
                      tau_form="derived"):
    """Per-realization upper bound on ``||A - A_hat||`` (Frobenius or spectral).

    The spectral variant swaps only the leading ``||A_0||`` term; the two
    trailing terms are the same as in the Frobenius case.
    """
    _require_split(split)
    sigma = np.asarray(sigma, dtype=np.float64)
    alpha, beta, eta, tau = lowrank_coefficients(sigma, params, tau_form=tau_form)
    phi = split.phi
    extra = math.sqrt(alpha ** 2 * phi / (1.0 + beta ** 2 * phi))
    extra += math.sqrt(eta ** 2 * phi / (1.0 + tau ** 2 * phi))
    return _a0(sigma, params.k, kind) + extra


def nu_constants(n, ell, p):
    """``(nu1, nu2, nu)`` of the average-case bounds."""
    nu1 = math.sqrt(n - ell + p) + math.sqrt(ell) + 7.0
    nu2 = 4.0 * math.e * math.sqrt(ell) / (p + 1)
    return nu1, nu2, nu1 * nu2


def _avg_p(params):
    if params.p is None:
        raise ParameterError("need a fixed p")
    if params.p < 2:
        raise ParameterError("average-case bounds need p >= 2")
    return params.p


def avg_sv_lower_bound(sigma, params: BoundParams, n=None):
    """Lower bound on ``E sigma_j(A_hat)``: ``sigma_j / sqrt(1 + nu^2 gamma_j^(4q+4))``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    p = _avg_p(params)
    n = sigma.shape[0] if n is None else n
    _, _, nu = nu_constants(n, params.ell, p)
    tail = _tail(sigma, params, p)
    sj = sigma[: params.k]
    out = np.zeros_like(sj)
    pos = sj > 0
    gamma = tail / sj[pos]
    out[pos] = sj[pos] / np.sqrt(1.0 + nu ** 2 * gamma ** (4 * params.q + 4))
    return out


def avg_lowrank_bound(sigma, params: BoundParams, kind="frobenius", n=None):
    """Upper bound on ``E ||A - A_hat||``."""
    sigma = np.asarray(sigma, dtype=np.float64)
    p = _avg_p(params)
    n = sigma.shape[0] if n is None else n
    _, _, nu = nu_constants(n, params.ell, p)
    tail = _tail(sigma, params, p)
    a0 = _a0(sigma, params.k, kind)
    if tail == 0.0:
        return a0
    gamma_k = tail / float(sigma[params.k - 1])
    return a0 + (1.0 + gamma_k) * math.sqrt(params.k) * nu * tail * gamma_k ** (2 * params.q)


def tightest_avg_bounds(sigma, params: BoundParams, n=None):
    """Best average-case bounds over :meth:`BoundParams.admissible_p`.

    Returns ``(sv_bounds, bound_f, bound_2)``.
    """
    sv = None
    bf = bs = math.inf
    for p in params.admissible_p():
        pp = params.with_p(p)
        lower = avg_sv_lower_bound(sigma, pp, n)
        sv = lower if sv is None else np.maximum(sv, lower)
        bf = min(bf, avg_lowrank_bound(sigma, pp, "frobenius", n))
        bs = min(bs, avg_lowrank_bound(sigma, pp, "spectral", n))
    return sv, bf, bs


@dataclass
class TrialRecord:
    trial: int
    seed: int
    err_f: float
    err_2: float
    bound_f: float
    bound_2: float
    satisfied_f: bool
    satisfied_2: bool
    sigmas: np.ndarray
    sv_bounds: np.ndarray
    sv_satisfied: bool
    interlacing: bool
    full_row_rank: bool
    failed_p: tuple = ()


@dataclass
class BoundReport:
    """Per-trial deterministic checks plus aggregate average-case comparison."""

    params: BoundParams
    records: list = field(default_factory=list)
    sv_lower_bounds: np.ndarray | None = None
    lowrank_bound_frobenius: float = math.nan
    lowrank_bound_spectral: float = math.nan
    realized_error_frobenius: float = math.nan
    realized_error_spectral: float = math.nan
    realized_sigmas: np.ndarray | None = None
    kind: str = "average"

    @property
    def trials(self):
        return len(self.records)

    @property
    def bound_satisfied(self):
        return [r.satisfied_f and r.satisfied_2 for r in self.records]

    @property
    def satisfaction_rate(self):
        checked = [r for r in self.records if r.full_row_rank]
        if not checked:
            return math.nan
        return sum(r.satisfied_f and r.satisfied_2 and r.sv_satisfied for r in checked) / len(checked)

    def to_csv(self):
        """One row per trial and a trailing ``summary`` row of means."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["trial", "seed", "err_f", "err_2", "bound_f", "bound_2", "satisfied_f", "satisfied_2"]
        w.writerow(cols)
        for r in self.records:
            w.writerow([r.trial, r.seed, repr(r.err_f), repr(r.err_2), repr(r.bound_f),
                        repr(r.bound_2), int(r.satisfied_f), int(r.satisfied_2)])
        if self.records:
            w.writerow([
                "summary", "",
                repr(self.realized_error_frobenius), repr(self.realized_error_spectral),
                repr(float(np.mean([r.bound_f for r in self.records]))),
                repr(float(np.mean([r.bound_2 for r in self.records]))),
                int(all(r.satisfied_f for r in self.records)),
                int(all(r.satisfied_2 for r in self.records)),
            ])
        return buf.getvalue()


def check_trial(a, svd_a, k, params: BoundParams, seed, trial=0, slack=1e-9,
                single_pass=False):
    """Run one SOR-SVD draw and test it against the deterministic bounds.

    ``svd_a`` is the full SVD of ``a`` (an analysis-side oracle). With
    ``params.p is None`` the tightest bound over admissible p is used.
    ``slack`` is relative to ``sigma_1``. ``failed_p`` lists every split
    parameter whose own bounds were violated.
    """
    sigma = svd_a.sigma
    n = a.shape[1]
    cfg = SketchConfig(ell=params.ell, q=params.q, seed=seed, single_pass=single_pass)
    x = sor_svd_power(a, k, cfg)
    err_f = approx_error(a, x, "frobenius")
    err_2 = approx_error(a, x, "spectral")
    tol = slack * sigma[0]

    g = svd_a.v.T @ gaussian_matrix(n, params.ell, seed)
    sig_hat = x.sigma
    bound_f = bound_2 = math.inf
    sv_bounds = np.zeros(k)
    any_full = False
    failed = []
    for p in params.admissible_p():
        pp = params.with_p(p)
        _check_dims(len(sigma), pp, p)
        split = split_from_projection(g, p, n)
        if not split.full_row_rank:
            continue
        any_full = True
        bf = det_lowrank_bound(sigma, pp, split, "frobenius")
        b2 = det_lowrank_bound(sigma, pp, split, "spectral")
        sv = det_sv_lower_bound(sigma, pp, split)
        if err_f > bf + tol or err_2 > b2 + tol or np.any(sig_hat < sv - tol):
            failed.append(p)
        bound_f, bound_2 = min(bound_f, bf), min(bound_2, b2)
        sv_bounds = np.maximum(sv_bounds, sv)
    return TrialRecord(
        trial=trial, seed=seed, err_f=err_f, err_2=err_2, bound_f=bound_f, bound_2=bound_2,
        satisfied_f=bool(err_f <= bound_f + tol), satisfied_2=bool(err_2 <= bound_2 + tol),
        sigmas=sig_hat, sv_bounds=sv_bounds,
        sv_satisfied=bool(np.all(sig_hat >= sv_bounds - tol)),
        interlacing=bool(np.all(sig_hat <= sigma[:k] + tol)),
        full_row_rank=any_full, failed_p=tuple(failed),
    )


def bound_tightness_experiment(a, k, params: BoundParams, trials, seed, svd_a=None,
                               slack=1e-9):
    """Run ``trials`` seeded SOR-SVD draws (seeds ``seed + t``) against the bounds."""
    a = as_matrix(a)
    if params.k != k:
        params = BoundParams(k, params.ell, params.p, params.q)
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if not params.ell < min(a.shape):
        raise ParameterError(f"need ell < min(m, n) = {min(a.shape)}")
    svd_a = full_svd(a) if svd_a is None else svd_a
    report = BoundReport(params=params)
    for t in range(trials):
        report.records.append(check_trial(a, svd_a, k, params, seed + t, t, slack))
    sv, bf, bs = tightest_avg_bounds(svd_a.sigma, params, a.shape[1])
    report.sv_lower_bounds = sv
    report.lowrank_bound_frobenius = bf
    report.lowrank_bound_spectral = bs
    report.realized_error_frobenius = float(np.mean([r.err_f for r in report.records]))
    report.realized_error_spectral = float(np.mean([r.err_2 for r in report.records]))
    report.realized_sigmas = np.mean([r.sigmas for r in report.records], axis=0)
    return report
