"""Mellin-domain solver for multi-order linear fractional differential equations."""

from .errors import (
    ConfigError,
    ConvergenceError,
    FitFailureError,
    IllConditioningWarning,
    MellinFdeError,
    PoleError,
    QuadratureError,
    ResidualError,
    SingularMatrixError,
    StepSizeError,
    StripViolationError,
    SymmetryViolationError,
    ValidationError,
)
from .specfun import gamma_complex, log_gamma_ratio, mittag_leffler

__version__ = "0.1.0"

from .forcing import (  # noqa: E402
    MonomialPulse,
    SampledForcing,
    SinePulse,
    StepPulse,
    make_forcing,
)
from .mellin import (  # noqa: E402
    MellinGrid,
    MellinSpectrum,
    StripBounds,
    estimate_strip,
    forward_transform,
    inverse_reconstruct,
    shift_spectrum,
)
from .oracle import (  # noqa: E402
    TimeSeries,
    caputo_derivative,
    gl_stepper,
    ml_convolution_solution,
    ml_solution_for_problem,
    ml_two_term_solution,
    rl_integral,
)
from .solver import (  # noqa: E402
    Diagnostic,
    FdeProblem,
    FdeTerm,
    SolverReport,
    assemble_system,
    coefficient_C,
    solve_fde,
    solve_linear,
    validate_problem,
)
