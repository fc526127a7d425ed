"""Randomized Euler solver and Monte Carlo convergence harness for
constant-lag delay differential equations with time-irregular right-hand
sides."""

from .analysis import (
    DegenerateSlopeError,
    ErrorRow,
    ErrorTable,
    ReferenceSpec,
    SampleFailure,
    SlopeReport,
    fit_slopes,
    mc_error,
)
from .bounds import (
    BoundCertificate,
    BoundReport,
    HolderReport,
    bound_certificate,
    check_bounds,
    check_holder,
)
from .core import (
    ConfigError,
    DDEProblem,
    Mesh,
    RightHandSide,
    Trajectory,
    ValidationError,
    make_mesh,
    restrict,
    trajectory_at,
    write_trajectory_csv,
)
from .experiment import (
    ComparisonResult,
    ExperimentConfig,
    ExperimentResult,
    compare_schemes,
    run_experiment,
    solve_trajectory,
    write_error_csv,
    write_slopes_csv,
)
from .problems import (
    GrowthEnvelope,
    PRESET_NAMES,
    ProblemPreset,
    k_weight,
    kainhofer_exact,
    make_comparison,
    make_f1,
    make_f2,
    make_kainhofer,
    make_preset,
    make_wiener_perturbed,
)
from .randomness import (
    PiecewisePath,
    RandomStream,
    brownian_path,
    derive_stream,
    eval_path_linear,
    sample_theta,
    write_path_csv,
)
from .solvers import (
    DivergenceError,
    SolverConfig,
    StepCountWarning,
    classical_euler,
    randomized_euler,
    solve_pair,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCertificate",
    "BoundReport",
    "ComparisonResult",
    "ConfigError",
    "DDEProblem",
    "DegenerateSlopeError",
    "DivergenceError",
    "ErrorRow",
    "ErrorTable",
    "ExperimentConfig",
    "ExperimentResult",
    "GrowthEnvelope",
    "HolderReport",
    "Mesh",
    "PRESET_NAMES",
    "PiecewisePath",
    "ProblemPreset",
    "RandomStream",
    "ReferenceSpec",
    "RightHandSide",
    "SampleFailure",
    "SlopeReport",
    "SolverConfig",
    "StepCountWarning",
    "Trajectory",
    "ValidationError",
    "bound_certificate",
    "brownian_path",
    "check_bounds",
    "check_holder",
    "classical_euler",
    "compare_schemes",
    "derive_stream",
    "eval_path_linear",
    "fit_slopes",
    "k_weight",
    "kainhofer_exact",
    "make_comparison",
    "make_f1",
    "make_f2",
    "make_kainhofer",
    "make_mesh",
    "make_preset",
    "make_wiener_perturbed",
    "mc_error",
    "randomized_euler",
    "restrict",
    "run_experiment",
    "sample_theta",
    "solve_pair",
    "solve_trajectory",
    "trajectory_at",
    "write_error_csv",
    "write_path_csv",
    "write_slopes_csv",
    "write_trajectory_csv",
]
