"""Subspace-orbit randomized SVD, baselines, error bounds and ALM robust PCA."""
from ._accel import backend
from .bounds import (
    BoundParams,
    BoundReport,
    avg_lowrank_bound,
    avg_sv_lower_bound,
    bound_tightness_experiment,
    det_lowrank_bound,
    det_sv_lower_bound,
    omega_split,
)
from .core import (
    QrFactors,
    SvdFactors,
    derive_seed,
    full_svd,
    gaussian_matrix,
    matmul,
    norm,
    pseudo_inverse,
    thin_qr,
    truncated_svd,
)
from .errors import (
    BoundInapplicableError,
    FormatError,
    NumericalError,
    ParameterError,
    ShapeError,
    SorsvdError,
)
from .matrixgen import GenSpec, gen_noisy_lowrank, gen_polydecay, gen_rpca_instance, random_orthonormal
from .rpca import RpcaConfig, RpcaResult, estimate_rank_bound, rpca_alm, rpca_default_config, soft_threshold
from .sketch import (
    LowRankApprox,
    SketchConfig,
    approx_error,
    decompose,
    flop_estimate,
    r_svd,
    reconstruct,
    sor_svd,
    sor_svd_power,
    tsr_svd,
)

__version__ = "0.1.0"
