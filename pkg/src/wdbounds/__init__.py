"""Certified Wasserstein-distance error bounds for aggregated Markov chains.

The package computes exact Wasserstein-1 distances on finite metric spaces,
coarse Ricci curvature of continuous- and discrete-time Markov chains, and
certified bounds on the error introduced by aggregating a chain onto a
smaller state space.

Hot numeric kernels are JIT-compiled with numba when available; set
``WDBOUNDS_JIT=0`` to force the pure-numpy fallback (same results, slower).
"""

from __future__ import annotations

from ._jit import JIT_ENABLED
from .aggregation import (
    Aggregation,
    Partition,
    aggregate_initial,
    disaggregate,
    epsilon_partition,
    partition_aggregation_ctmc,
    partition_aggregation_dtmc,
)
from .bounds import (
    BoundCurve,
    BoundInputs,
    bound_exponential,
    bound_hybrid,
    bound_linear_K,
    bound_linear_K_timevarying,
    bound_local_K,
    compute_bound_curve,
    defect,
    defect_dtmc,
    dtmc_bound_sequence,
    exact_error_curve,
    prepare_bound_inputs,
    time_grid,
)
from .curvature import (
    CurvatureReport,
    KappaMinStrategy,
    K_global,
    K_local,
    PairCurvature,
    curvature_report,
    k_lower,
    k_matrix,
    k_min,
    kappa_all_pairs,
    kappa_ctmc,
    kappa_dtmc,
    kappa_min,
    wasserstein_derivative,
)
from .errors import (
    AsymmetricMatrix,
    BadAlpha,
    DimensionMismatch,
    DisconnectedGraph,
    DuplicatePosition,
    EmptyProduct,
    EmptySupport,
    IndexOutOfRange,
    NegativeDistance,
    NegativeTime,
    NonzeroDiagonal,
    NotOptimalInput,
    NumericalFailure,
    RateUnavailable,
    RowSumNotZero,
    SamePair,
    SingleState,
    TriangleViolation,
    WdboundsError,
    ZeroOffDiagonal,
)
from .lp import LinearProgram, LpSolution, LpStatus, solve
from .markov import (
    Generator,
    ProbVec,
    TransitionMatrix,
    dirac,
    transient_ctmc,
    transient_dtmc,
    uniformize,
)
from .metric import (
    Metric,
    discrete_metric,
    line_metric,
    product_metric,
    shortest_path_metric,
    validate_metric,
)
from .models import Box, JumpDistribution, random_instance, toy_ctmc, translation_invariant_ctmc
from .transport import (
    Coupling,
    OptimalPairReport,
    Potential,
    SignedRow,
    WassersteinResult,
    canonicalize_coupling,
    row_wasserstein_vector,
    tv_distance,
    verify_optimal_pair,
    wasserstein,
    wasserstein_matrix_norm,
    wasserstein_signed,
)

__version__ = "0.1.0"

__all__ = [
    "JIT_ENABLED",
    "__version__",
    # metric
    "Metric",
    "validate_metric",
    "discrete_metric",
    "line_metric",
    "shortest_path_metric",
    "product_metric",
    # markov
    "ProbVec",
    "Generator",
    "TransitionMatrix",
    "dirac",
    "uniformize",
    "transient_ctmc",
    "transient_dtmc",
    # lp
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "solve",
    # transport
    "Coupling",
    "Potential",
    "SignedRow",
    "WassersteinResult",
    "OptimalPairReport",
    "wasserstein",
    "wasserstein_signed",
    "row_wasserstein_vector",
    "wasserstein_matrix_norm",
    "tv_distance",
    "canonicalize_coupling",
    "verify_optimal_pair",
    # curvature
    "kappa_ctmc",
    "kappa_dtmc",
    "k_lower",
    "k_matrix",
    "k_min",
    "K_global",
    "K_local",
    "kappa_min",
    "kappa_all_pairs",
    "wasserstein_derivative",
    "KappaMinStrategy",
    "PairCurvature",
    "CurvatureReport",
    "curvature_report",
    # aggregation
    "Partition",
    "Aggregation",
    "partition_aggregation_ctmc",
    "partition_aggregation_dtmc",
    "aggregate_initial",
    "disaggregate",
    "epsilon_partition",
    # bounds
    "BoundInputs",
    "BoundCurve",
    "defect",
    "defect_dtmc",
    "prepare_bound_inputs",
    "bound_linear_K",
    "bound_linear_K_timevarying",
    "bound_exponential",
    "bound_local_K",
    "bound_hybrid",
    "exact_error_curve",
    "dtmc_bound_sequence",
    "time_grid",
    "compute_bound_curve",
    # models
    "Box",
    "JumpDistribution",
    "toy_ctmc",
    "translation_invariant_ctmc",
    "random_instance",
    # errors
    "WdboundsError",
    "AsymmetricMatrix",
    "NegativeDistance",
    "NonzeroDiagonal",
    "ZeroOffDiagonal",
    "TriangleViolation",
    "DuplicatePosition",
    "DisconnectedGraph",
    "EmptyProduct",
    "DimensionMismatch",
    "NegativeTime",
    "IndexOutOfRange",
    "NumericalFailure",
    "RowSumNotZero",
    "NotOptimalInput",
    "SamePair",
    "SingleState",
    "BadAlpha",
    "RateUnavailable",
    "EmptySupport",
]
