"""Graph-signal recovery with node-adaptive Tikhonov regularization.

Builds variation operators weighted per node, solves the regularized
recovery problems (denoising and interpolation), analyzes bias/variance
dominance over the node-invariant baseline, and designs the weights from
signal priors via closed forms or semidefinite programs.
"""

from .analysis import (
    ErrorDecomposition,
    TheoremQuantities,
    check_corollary1,
    check_lemma1,
    check_theorem1,
    decompose_error,
    optimal_w0,
    theorem_quantities,
)
from .design import (
    Bounds,
    DesignProblem,
    DesignResult,
    ExactSignal,
    SdpSolverConfig,
    SignalOuterProduct,
    design_minmax_prony,
    design_minmax_sdr,
    design_prony,
    design_prony_unconstrained,
    design_sdr,
    rank_one_extract,
    recover_omega,
)
from .errors import (
    ConfigError,
    DataFormatError,
    GraphConnectivityError,
    GsrError,
    IllConditionedError,
    SingularSystemError,
    SolverError,
)
from .estimators import (
    Method,
    SolveOptions,
    SolveReport,
    filter_matrix,
    solve,
    solve_cg,
    solve_direct,
    solve_distributed,
    solve_interpolation,
    solve_krr_diffusion,
)
from .experiments import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    emit_csv,
    parse_config,
    run_dataset,
    run_experiment,
    run_synthetic_denoise,
    run_synthetic_interpolate,
)
from .graphs import (
    Adaptive,
    Graph,
    Invariant,
    Laplacian,
    NodeWeights,
    erdos_renyi,
    format_edgelist,
    knn_geometric,
    laplacian,
    parse_coordinates,
    parse_edgelist,
    quadratic_form,
    shift_apply,
    shift_operator,
    weight_vector,
)
from .signals import (
    GraphSignal,
    NoiseModel,
    Observation,
    SignalBounds,
    add_noise,
    bandlimited_signal,
    load_station_csv,
    nmse,
    snr_to_sigma,
)

__version__ = "0.1.0"

__all__ = [
    "Adaptive",
    "Bounds",
    "ConfigError",
    "DataFormatError",
    "DesignProblem",
    "DesignResult",
    "ErrorDecomposition",
    "ExactSignal",
    "ExperimentConfig",
    "Graph",
    "GraphConnectivityError",
    "GraphSignal",
    "GsrError",
    "IllConditionedError",
    "Invariant",
    "Laplacian",
    "Method",
    "NodeWeights",
    "NoiseModel",
    "Observation",
    "ResultRow",
    "ResultTable",
    "SdpSolverConfig",
    "SignalBounds",
    "SignalOuterProduct",
    "SingularSystemError",
    "SolveOptions",
    "SolveReport",
    "SolverError",
    "TheoremQuantities",
    "add_noise",
    "bandlimited_signal",
    "check_corollary1",
    "check_lemma1",
    "check_theorem1",
    "decompose_error",
    "design_minmax_prony",
    "design_minmax_sdr",
    "design_prony",
    "design_prony_unconstrained",
    "design_sdr",
    "emit_csv",
    "erdos_renyi",
    "filter_matrix",
    "format_edgelist",
    "knn_geometric",
    "laplacian",
    "load_station_csv",
    "nmse",
    "optimal_w0",
    "parse_config",
    "parse_coordinates",
    "parse_edgelist",
    "quadratic_form",
    "rank_one_extract",
    "recover_omega",
    "run_dataset",
    "run_experiment",
    "run_synthetic_denoise",
    "run_synthetic_interpolate",
    "shift_apply",
    "shift_operator",
    "snr_to_sigma",
    "solve",
    "solve_cg",
    "solve_direct",
    "solve_distributed",
    "solve_interpolation",
    "solve_krr_diffusion",
    "theorem_quantities",
    "weight_vector",
]
