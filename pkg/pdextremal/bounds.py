"""
Closed-form bounds for the central and sliding window ratios G(l) and C(l).

All arithmetic is exact: `ell` is a `Fraction`, so floor and ceiling of 2*ell never suffer from
rounding at the half-integers where the bounds jump.
"""
from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .records import Record
from .utils import RationalLike, as_rational, format_rational

log = logging.getLogger(__name__)

GORBACHEV_BOUND_AT_TWO = math.pi**2
BOUND_CSV_COLUMNS: t.Final[tuple[str, ...]] = (
    "ell",
    "lower_G",
    "lower_C",
    "upper",
    "upper_simple",
    "k",
    "p",
    "exact_value",
    "integer_ell",
)


def _positive(ell: RationalLike) -> Fraction:
    ell = as_rational(ell)
    if ell <= 0:
        raise DomainError(f"ell must be positive, got {ell}")
    return ell


def _is_integer(value: Fraction) -> bool:
    return value.denominator == 1


def lower_bounds(ell: RationalLike) -> tuple[Fraction, Fraction]:
    """
    Lower bounds (for G, for C) at `ell`.

    On (0, 1] both ratios are exactly 1. At an integer k >= 2 the sliding ratio gains one more
    window, giving (2k - 1, 2k); elsewhere both are 2[ell] + 1.
    """
    ell = _positive(ell)
    if ell <= 1:
        return Fraction(1), Fraction(1)
    whole = math.floor(ell)
    if _is_integer(ell):
        return Fraction(2 * whole - 1), Fraction(2 * whole)
    return Fraction(2 * whole + 1), Fraction(2 * whole + 1)


def upper_bound(ell: RationalLike) -> tuple[Fraction, int]:
    """
    The bound (m + 1)(m + 2) / (2(m + 1 - ell)) with m = [2 ell], and the simpler ceil(2 ell) + 1.

    The two agree exactly when 2 ell is an integer.
    """
    ell = as_rational(ell)
    if ell < 1:
        raise DomainError(f"the upper bound needs ell >= 1, got {ell}")
    m = math.floor(2 * ell)
    upper = Fraction((m + 1) * (m + 2), 2) / (m + 1 - ell)
    upper_simple = math.ceil(2 * ell) + 1
    if upper > upper_simple or (upper == upper_simple) != _is_integer(2 * ell):
        raise RuntimeError(f"upper bound {upper} inconsistent with {upper_simple} at ell={ell}")
    return upper, upper_simple


def phi(k: int, ell: RationalLike) -> Fraction:
    """The objective (k + 1)(k + 2) / (2(k + 1 - ell)) minimised over the integer k."""
    ell = as_rational(ell)
    if not ell - 1 < k <= 2 * ell:
        raise DomainError(f"k={k} outside ({ell - 1}, {2 * ell}]")
    return Fraction((k + 1) * (k + 2), 2) / (k + 1 - ell)


def phi_scan(ell: RationalLike) -> list[tuple[int, Fraction]]:
    """Every admissible k with its phi value, in increasing k."""
    ell = as_rational(ell)
    if ell < 1:
        raise DomainError(f"phi is only scanned for ell >= 1, got {ell}")
    first = math.floor(ell - 1) + 1
    return [(k, phi(k, ell)) for k in range(first, math.floor(2 * ell) + 1)]


def argmin_phi(ell: RationalLike) -> int:
    """
    Brute-force minimiser of phi over the integers in (ell - 1, 2 ell].

    Ties go to the largest k, which is [2 ell]; the result always matches the closed-form bound.
    """
    ell = as_rational(ell)
    if ell <= 1:
        raise DomainError(f"argmin_phi needs ell > 1, got {ell}")
    best_k, best_value = None, None
    for k, value in phi_scan(ell):
        if best_value is None or value <= best_value:
            best_k, best_value = k, value
    if best_value != upper_bound(ell)[0]:
        raise RuntimeError(f"scan minimum {best_value} differs from the closed form at ell={ell}")
    return best_k


def construction_params(ell: RationalLike) -> tuple[int, Fraction]:
    """
    Parameters (k, p) of the arithmetic-progression construction behind the upper bound.

    k = [2 ell] and p = (2(k + 1) - 2 ell) / (k + 2), so that 0 < p <= 1 and
    ell = ((k + 1)(2 - p) - p) / 2.
    """
    ell = as_rational(ell)
    if ell < 1:
        raise DomainError(f"construction parameters need ell >= 1, got {ell}")
    k = math.floor(2 * ell)
    p = (2 * (k + 1) - 2 * ell) / (k + 2)
    return k, p


def right_limit(k: int) -> Fraction:
    """The common value 2k + 1 of G and C as ell decreases to the integer k."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"right limits are defined for integers k >= 1, got {k!r}")
    return Fraction(2 * k + 1)


def gorbachev_constant() -> float:
    """Reference upper bound pi**2 for G(2), from an independent argument."""
    return GORBACHEV_BOUND_AT_TWO


@dataclass(frozen=True)
class BoundReport(Record):
    """All closed-form quantities at one `ell`."""

    kind = "bound-report"

    ell: Fraction
    lower_G: Fraction
    lower_C: Fraction
    upper: Fraction | None = None
    upper_simple: int | None = None
    k_opt: int | None = None
    p_opt: Fraction | None = None
    exact_value: Fraction | None = None
    k_tie: int | None = None
    integer_ell: bool = False
    right_limit: Fraction | None = None

    def csv_row(self) -> dict[str, str]:
        """The report as a row of `BOUND_CSV_COLUMNS`."""

        def cell(value: t.Any) -> str:
            match value:
                case None:
                    return ""
                case bool():
                    return str(value).lower()
                case Fraction():
                    return format_rational(value)
                case _:
                    return str(value)

        values = (
            self.ell,
            self.lower_G,
            self.lower_C,
            self.upper,
            self.upper_simple,
            self.k_opt,
            self.p_opt,
            self.exact_value,
            self.integer_ell,
        )
        return dict(zip(BOUND_CSV_COLUMNS, map(cell, values)))


def bound_report(ell: RationalLike) -> BoundReport:
    """Aggregate every bound at `ell`; below 1 the exact value 1 replaces the construction."""
    ell = _positive(ell)
    lower_g, lower_c = lower_bounds(ell)
    integer_ell = _is_integer(ell)
    if ell < 1:
        return BoundReport(ell, lower_g, lower_c, exact_value=Fraction(1), integer_ell=integer_ell)
    upper, upper_simple = upper_bound(ell)
    if ell == 1:
        return BoundReport(
            ell,
            lower_g,
            lower_c,
            upper,
            upper_simple,
            exact_value=Fraction(1),
            integer_ell=True,
            right_limit=right_limit(1),
        )

    k, p = construction_params(ell)
    if argmin_phi(ell) != k:
        raise RuntimeError(f"brute-force minimiser disagrees with [2 ell] at ell={ell}")
    tie = k - 1 if _is_integer(2 * ell) and phi(k - 1, ell) == phi(k, ell) else None
    if not lower_g <= lower_c <= upper <= upper_simple:
        raise RuntimeError(f"bounds out of order at ell={ell}")
    report = BoundReport(
        ell,
        lower_g,
        lower_c,
        upper,
        upper_simple,
        k,
        p,
        k_tie=tie,
        integer_ell=integer_ell,
        right_limit=right_limit(ell.numerator) if integer_ell else None,
    )
    log.debug("Bounds at ell=%s: lower %s/%s, upper %s.", ell, lower_g, lower_c, upper)
    return report
