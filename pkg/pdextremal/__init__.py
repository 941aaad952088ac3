"""Exact bounds, witnesses and extremal programs for the doubly positive window-ratio problems."""
# Imported for their record kinds.
from . import certify, extremal, witness  # noqa: F401
from .bounds import BoundReport, bound_report, construction_params, lower_bounds, upper_bound
from .errors import DomainError, PDExtremalError
from .piecewise import PiecewiseLinearFn
from .records import Record, record_from_dict

__all__ = (
    "BoundReport",
    "DomainError",
    "PDExtremalError",
    "PiecewiseLinearFn",
    "Record",
    "bound_report",
    "construction_params",
    "lower_bounds",
    "record_from_dict",
    "upper_bound",
)
