"""Diophantine approximation over the field of formal Laurent series with
finite-field coefficients: exact ultrametric arithmetic, badly-approximable
testing, geometry of numbers, Schmidt (alpha, beta)-games, and Hausdorff
dimension lower bounds.
"""

from .errors import (
    BranchOutOfRange,
    CoefficientOutOfRange,
    CounterexampleFound,
    DivisionByZero,
    InsufficientDepth,
    NoLegalCenter,
    PrecisionExhausted,
    SearchBudgetExceeded,
    SearchIncomplete,
    SeriesSyntaxError,
    WitnessNotFound,
)
from .field import FieldSpec, Magnitude, Poly, floor_log
from .series import (
    LaurentSeries,
    RationalFn,
    SeriesMatrix,
    format_matrix,
    format_series,
    lattice_distance,
    parse_field,
    parse_matrix,
    parse_poly,
    parse_series,
    vec_height,
)

__all__ = [
    "BranchOutOfRange",
    "CoefficientOutOfRange",
    "CounterexampleFound",
    "DivisionByZero",
    "FieldSpec",
    "InsufficientDepth",
    "LaurentSeries",
    "Magnitude",
    "NoLegalCenter",
    "Poly",
    "PrecisionExhausted",
    "RationalFn",
    "SearchBudgetExceeded",
    "SearchIncomplete",
    "SeriesMatrix",
    "SeriesSyntaxError",
    "WitnessNotFound",
    "floor_log",
    "format_matrix",
    "format_series",
    "lattice_distance",
    "parse_field",
    "parse_matrix",
    "parse_poly",
    "parse_series",
    "vec_height",
]
