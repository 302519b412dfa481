"""Turing-Hopf analysis and simulation toolkit for a delayed
mussel-algae reaction-diffusion model.

Pipeline: parameters -> equilibrium/hypotheses (`model`) -> linear
analysis and the codimension-two point (`spectrum`) -> third-order
normal form on the center manifold (`normal_form`) -> planar amplitude
system, region classification, and predicted patterns (`amplitude`) ->
direct delay-PDE simulation and pattern classification (`pde_sim`).
"""

from .amplitude import (
    AmplitudeEquilibria,
    AmplitudeEquilibrium,
    AmplitudeTrajectory,
    BifurcationLine,
    RegionLabel,
    bifurcation_lines,
    classify_region,
    equilibria,
    integrate,
    unfolding_case,
)
from .errors import (
    AnalysisError,
    ConfigError,
    DegenerateNormalFormError,
    DomainError,
    HypothesisError,
    InvariantViolationError,
    NoHopfModeError,
    NonResonanceError,
    NonSimpleEigenvalueError,
    SimulationUnstableError,
)
from .model import (
    DimensionalParams,
    Equilibrium,
    HypothesisReport,
    ModelParams,
    hypotheses,
    nondimensionalize,
    params_from_dict,
    params_to_dict,
    positive_equilibrium,
)
from .normal_form import (
    AmplitudeSystem,
    DerivTable,
    EigenData,
    NFCoeffs,
    NormalFormResult,
    ParamMap,
    amplitude_system,
    bilinear_form_exponential,
    char_matrix,
    deriv_table,
    eigen_data,
    nf_coeffs,
    normal_form_at,
)
from .pde_sim import (
    FieldTrajectory,
    InitialCondition,
    MonitorReport,
    PatternClass,
    SimConfig,
    classify_pattern,
    monitor_wellposedness,
    simulate,
)
from .settings import DEFAULT_SETTINGS, NumericalSettings
from .spectrum import (
    HopfBranch,
    ModeCoeffs,
    THPoint,
    TuringThreshold,
    char_value,
    gamma_membership,
    hopf_branch,
    hopf_branches,
    hopf_frequency,
    hopf_transversality,
    mode_coeffs,
    rightmost_roots,
    spatial_scale,
    turing_hopf_point,
    turing_threshold,
    turing_transversality,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeEquilibria",
    "AmplitudeEquilibrium",
    "AmplitudeSystem",
    "AmplitudeTrajectory",
    "AnalysisError",
    "BifurcationLine",
    "ConfigError",
    "DEFAULT_SETTINGS",
    "DegenerateNormalFormError",
    "DerivTable",
    "DimensionalParams",
    "DomainError",
    "EigenData",
    "Equilibrium",
    "FieldTrajectory",
    "HopfBranch",
    "HypothesisError",
    "HypothesisReport",
    "InitialCondition",
    "InvariantViolationError",
    "ModeCoeffs",
    "ModelParams",
    "MonitorReport",
    "NFCoeffs",
    "NoHopfModeError",
    "NonResonanceError",
    "NonSimpleEigenvalueError",
    "NormalFormResult",
    "NumericalSettings",
    "ParamMap",
    "PatternClass",
    "RegionLabel",
    "SimConfig",
    "SimulationUnstableError",
    "THPoint",
    "TuringThreshold",
    "amplitude_system",
    "bifurcation_lines",
    "bilinear_form_exponential",
    "char_matrix",
    "char_value",
    "classify_pattern",
    "classify_region",
    "deriv_table",
    "eigen_data",
    "equilibria",
    "gamma_membership",
    "hopf_branch",
    "hopf_branches",
    "hopf_frequency",
    "hopf_transversality",
    "hypotheses",
    "integrate",
    "mode_coeffs",
    "monitor_wellposedness",
    "nf_coeffs",
    "nondimensionalize",
    "normal_form_at",
    "params_from_dict",
    "params_to_dict",
    "positive_equilibrium",
    "rightmost_roots",
    "simulate",
    "spatial_scale",
    "turing_hopf_point",
    "turing_threshold",
    "turing_transversality",
    "unfolding_case",
]
