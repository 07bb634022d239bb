"""Entanglement of formation, its convex conjugate, and a numerical
harness for the additivity / strong-superadditivity equivalence."""

from .backend import BACKEND
from .conjugate import (
    ConjugateResult,
    DualObjective,
    biconjugate_eof,
    conjugate_value,
    dual_objective_value,
    duality_lower_bound,
    entanglement_gradient,
    pairwise_hermiticity_residual,
    stationarity_residual,
)
from .entanglement import (
    EoFResult,
    OptimizerConfig,
    average_entanglement,
    binary_entropy,
    concurrence,
    convexity_gap,
    eof_minimize,
    pure_entanglement,
    von_neumann_entropy,
    wootters_eof,
)
from .harness import (
    GapReport,
    LocalObservables,
    SupportSubspaces,
    TheoremReport,
    additivity_gap,
    composite_observable,
    conjugate_additivity_gap,
    local_observable_from_ensembles,
    pure_reduction_check,
    strong_superadditivity_gap,
    support_leakage,
    support_subspaces,
    theorem_pipeline,
)
from .io import decode_state, encode_state, load_state, save_state
from .linalg import (
    DimensionError,
    PSDViolationError,
    UnsupportedSizeError,
    ValidationError,
    hermitian_eig,
    matrix_log2_psd,
    partial_trace,
    tensor_product,
)
from .states import (
    BipartiteDims,
    DensityMatrix,
    Ensemble,
    FourPartyDims,
    HermitianObservable,
    IsometryParameter,
    PureState,
    ensemble_from_isometry,
    product_across_cut,
    product_state_across_cut,
    reduce_subsystem,
    sample_density,
    sample_haar_pure,
    sample_hermitian,
    validate_density,
)

__version__ = "0.1.0"
