"""Extremal functions of the complex ball for lq-body polynomial degrees."""

import os as _os

# Honor PEXTREMAL_THREADS before any BLAS-backed import happens.
_threads = _os.environ.get("PEXTREMAL_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .body import ConvexBody, IndexSet
from .functional import (
    BoundaryError,
    DomainError,
    FunctionalEval,
    ModuliPoint,
    f_gradient,
    f_hessian,
    f_value,
)
from .extremal import (
    ConvergenceError,
    ExtremalResult,
    UnivariateExtremal,
    h_p,
    kkt_residual,
    monomial_bound,
    v_ball,
    v_ball_linf_2d,
    v_ball_simplex,
    v_product,
    v_torus,
)
from .approx import (
    CoefficientSeries,
    RatePrediction,
    f1,
    f2,
    f3,
    fit_decay_slope,
    l2_error,
    monomial_l2_norm_sq,
    monomial_sup_norm,
    singular_rate,
    uniform_tail_bound_f3,
)
from .fekete import (
    FeketeConfig,
    FeketeResult,
    ResourceCapError,
    degree_sum,
    log_abs_vandermonde,
    search_fekete,
)
from .randfields import AnnulusGrid, RandomPolyPair, l1_deviation, potential, sample_pair
