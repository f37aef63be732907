"""Jiles-Atherton magnetization curves: models, fitting and simulation."""

from .anfit import (
    AnhystereticFitConfig,
    FitReport,
    fit_anhysteretic,
    initial_susceptibility,
    paramagnet_reference,
    reconstruct_curve,
    residual,
    solve_chi_param,
)
from .core import (
    KB,
    MU0,
    AnhystereticParams,
    MaterialSpec,
    PhysicalConstants,
    alpha_from_susceptibilities,
    anhysteretic_explicit,
    anhysteretic_implicit,
    anhysteretic_slope,
    langevin,
    langevin_prime,
    linearized_anhysteretic,
    moment_from_susceptibility,
    shape_param_from_moment,
)
from .dataio import (
    CurveKind,
    LoopFeatures,
    MagnetizationCurve,
    Unit,
    extract_features,
    parse_curve,
    split_branches,
)
from .errors import (
    DataError,
    DegenerateC,
    DegenerateSweep,
    EmptyFile,
    InsufficientSamples,
    InvalidBracket,
    JamagError,
    LengthMismatch,
    MissingBranch,
    NoConvergence,
    NonPhysicalParameterWarning,
    NoPositiveSample,
    NoSignChange,
    NoSolution,
    ParseError,
    RootFindError,
    SingularDenominator,
    SingularSlope,
    UnitError,
    UnstableParams,
    ZeroDenominator,
)
from .jiles92 import (
    Jiles92Config,
    Jiles92Result,
    aj_initial,
    aj_update,
    alpha_update,
    c_from_susceptibilities,
    estimate,
    k_from_coercive,
)
from .rootfind import RootConfig, expand_bracket, find_root
from .simulate import (
    FieldWaveform,
    HysteresisParams,
    dM_dH,
    integrate,
    loop_params_from_features,
)
from .validation import GRID_MATERIAL, GRID_ROWS, RowResult, run_grid, run_row, synthetic_curve

__version__ = "0.1.0"

__all__ = [
    "KB",
    "MU0",
    "AnhystereticFitConfig",
    "AnhystereticParams",
    "CurveKind",
    "DataError",
    "DegenerateC",
    "DegenerateSweep",
    "EmptyFile",
    "FieldWaveform",
    "FitReport",
    "GRID_MATERIAL",
    "GRID_ROWS",
    "HysteresisParams",
    "InsufficientSamples",
    "InvalidBracket",
    "JamagError",
    "Jiles92Config",
    "Jiles92Result",
    "LengthMismatch",
    "LoopFeatures",
    "MagnetizationCurve",
    "MaterialSpec",
    "MissingBranch",
    "NoConvergence",
    "NonPhysicalParameterWarning",
    "NoPositiveSample",
    "NoSignChange",
    "NoSolution",
    "ParseError",
    "PhysicalConstants",
    "RootConfig",
    "RootFindError",
    "RowResult",
    "SingularDenominator",
    "SingularSlope",
    "Unit",
    "UnitError",
    "UnstableParams",
    "ZeroDenominator",
    "aj_initial",
    "aj_update",
    "alpha_from_susceptibilities",
    "alpha_update",
    "anhysteretic_explicit",
    "anhysteretic_implicit",
    "anhysteretic_slope",
    "c_from_susceptibilities",
    "dM_dH",
    "estimate",
    "expand_bracket",
    "extract_features",
    "find_root",
    "fit_anhysteretic",
    "initial_susceptibility",
    "integrate",
    "langevin",
    "langevin_prime",
    "linearized_anhysteretic",
    "loop_params_from_features",
    "moment_from_susceptibility",
    "paramagnet_reference",
    "parse_curve",
    "reconstruct_curve",
    "residual",
    "run_grid",
    "run_row",
    "shape_param_from_moment",
    "solve_chi_param",
    "split_branches",
    "synthetic_curve",
]
