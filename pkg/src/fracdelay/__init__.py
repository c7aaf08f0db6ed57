"""Truncated fractional power series solver for linear Caputo systems with
commensurate constant delays in the state.

The solve pipeline: a problem (polynomial coefficient matrices, polynomial
control and history, rational order and delays) is reduced by the method of
steps to a sequence of delay-free segments; each segment is solved by a
coefficient recurrence on a fractional exponent grid, yielding one truncated
fractional power series per state component per segment.  An independent
Adams-Bashforth-Moulton reference solver is included for verification.
"""

from .numeric import Rational, format_rational, gamma, gamma_ratio, parse_rational
from .series import (
    FracSeries,
    Polynomial,
    SeriesBasis,
    cauchy_product,
    caputo_transform,
    from_polynomial,
    linear_combine,
    nonzero_terms,
    shift_divide,
)
from .model import (
    DelaySystem,
    PolyMatrix,
    ProblemFormatError,
    ProblemValidationError,
    SolverConfig,
    format_polynomial,
    parse_polynomial,
    parse_problem,
    serialize_problem,
    validate,
)
from .recurrence import AlphaChoice, SegmentProblem, build_and_iterate, choose_alpha, transform_initial_state
from .steps import (
    SegmentSolution,
    SolveError,
    StepPlan,
    build_segment_problem,
    commensurate_step,
    recenter_delayed_series,
    resolve_delayed_term,
    solve,
)
from .oracle import MLParams, abm_solve, mittag_leffler

__all__ = [
    "AlphaChoice",
    "DelaySystem",
    "FracSeries",
    "MLParams",
    "Polynomial",
    "PolyMatrix",
    "ProblemFormatError",
    "ProblemValidationError",
    "Rational",
    "SegmentProblem",
    "SegmentSolution",
    "SeriesBasis",
    "SolveError",
    "SolverConfig",
    "StepPlan",
    "abm_solve",
    "build_and_iterate",
    "build_segment_problem",
    "cauchy_product",
    "caputo_transform",
    "choose_alpha",
    "commensurate_step",
    "format_polynomial",
    "format_rational",
    "from_polynomial",
    "gamma",
    "gamma_ratio",
    "linear_combine",
    "mittag_leffler",
    "nonzero_terms",
    "parse_polynomial",
    "parse_problem",
    "parse_rational",
    "recenter_delayed_series",
    "resolve_delayed_term",
    "serialize_problem",
    "shift_divide",
    "solve",
    "transform_initial_state",
    "validate",
]

__version__ = "0.1.0"
