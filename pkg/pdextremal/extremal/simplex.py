"""
Two-phase tableau simplex over exact rationals.

Solves   minimise c.x   subject to   A x <= b,  x >= 0.

Rows are kept sparse (column -> Fraction), which keeps pivots cheap on the mostly-zero constraint
matrices of the extremal programs. Entering and leaving variables follow Bland's rule, so the method
terminates on degenerate problems.
"""
from __future__ import annotations

import enum
import logging
import typing as t
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError

log = logging.getLogger(__name__)

Row = dict[int, Fraction]


class LPStatus(enum.Enum):
    """Outcome of a linear program."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class LPSolution:
    """
    Raw solver output.

    `x` and `objective` are present for optimal solutions, and for iteration limits hit during the
    second phase, where the current basis is already feasible.
    """

    status: LPStatus
    x: tuple[Fraction, ...] | None
    objective: Fraction | None
    iterations: int


class _IterationLimit(Exception):
    pass


class _Tableau:
    def __init__(self, rows: list[Row], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.reduced: Row = {}
        self.value = Fraction(0)
        self.iterations = 0

    def set_objective(self, cost: t.Mapping[int, Fraction]) -> None:
        """Express the objective `cost` in terms of the non-basic variables."""
        self.reduced = {j: c for j, c in cost.items() if c}
        self.value = Fraction(0)
        for i, j in enumerate(self.basis):
            weight = self.reduced.get(j)
            if weight:
                self._subtract(self.reduced, self.rows[i], weight)
                self.value += weight * self.rhs[i]

    @staticmethod
    def _subtract(target: Row, row: Row, factor: Fraction) -> None:
        for j, entry in row.items():
            updated = target.get(j, 0) - factor * entry
            if updated:
                target[j] = updated
            else:
                target.pop(j, None)

    def pivot(self, r: int, j: int) -> None:
        pivot_row = self.rows[r]
        element = pivot_row[j]
        if element != 1:
            for column in pivot_row:
                pivot_row[column] /= element
            self.rhs[r] /= element
        for i, row in enumerate(self.rows):
            factor = row.get(j)
            if i != r and factor:
                self._subtract(row, pivot_row, factor)
                self.rhs[i] -= factor * self.rhs[r]
        factor = self.reduced.get(j)
        if factor:
            self._subtract(self.reduced, pivot_row, factor)
            self.value += factor * self.rhs[r]
        self.basis[r] = j

    def optimise(self, allowed: t.Callable[[int], bool], max_iterations: int) -> LPStatus:
        """Run simplex iterations on the current objective with Bland's rule."""
        while True:
            entering = min((j for j, d in self.reduced.items() if d < 0 and allowed(j)), default=None)
            if entering is None:
                return LPStatus.OPTIMAL
            leaving, best = None, None
            for i, row in enumerate(self.rows):
                entry = row.get(entering)
                if entry is not None and entry > 0:
                    ratio = self.rhs[i] / entry
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        leaving, best = i, ratio
            if leaving is None:
                return LPStatus.UNBOUNDED
            if self.iterations >= max_iterations:
                raise _IterationLimit()
            self.pivot(leaving, entering)
            self.iterations += 1
            if self.iterations % 100 == 0:
                log.debug("Simplex iteration %d, objective %s.", self.iterations, float(self.value))

    def solution(self, count: int) -> tuple[Fraction, ...]:
        x = [Fraction(0)] * count
        for i, j in enumerate(self.basis):
            if j < count:
                x[j] = self.rhs[i]
        return tuple(x)


def lp_minimize(
    c: t.Sequence[Fraction],
    A_ub: t.Sequence[t.Sequence[Fraction]],
    b_ub: t.Sequence[Fraction],
    max_iterations: int = 50_000,
) -> LPSolution:
    """
    Minimise c.x subject to A_ub x <= b_ub and x >= 0 exactly.

    Rows with a negative right-hand side are negated and receive an artificial variable; a first
    phase drives the artificials to zero (or proves infeasibility), the second optimises `c`.
    """
    n = len(c)
    if any(len(row) != n for row in A_ub) or len(A_ub) != len(b_ub):
        raise DomainError("constraint matrix dimensions do not match the objective and right-hand side")
    m = len(A_ub)

    rows: list[Row] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificials: list[int] = []
    for i, (coefficients, bound) in enumerate(zip(A_ub, b_ub)):
        row = {j: Fraction(value) for j, value in enumerate(coefficients) if value}
        row[n + i] = Fraction(1)
        bound = Fraction(bound)
        if bound < 0:
            row = {j: -value for j, value in row.items()}
            bound = -bound
            artificial = n + m + len(artificials)
            row[artificial] = Fraction(1)
            artificials.append(artificial)
            basis.append(artificial)
        else:
            basis.append(n + i)
        rows.append(row)
        rhs.append(bound)

    first_artificial = n + m
    tableau = _Tableau(rows, rhs, basis)
    try:
        if artificials:
            tableau.set_objective({j: Fraction(1) for j in artificials})
            tableau.optimise(lambda j: True, max_iterations)
            if tableau.value > 0:
                log.info("Linear program infeasible after %d iterations.", tableau.iterations)
                return LPSolution(LPStatus.INFEASIBLE, None, None, tableau.iterations)
            _drive_out_artificials(tableau, first_artificial)

        tableau.set_objective({j: Fraction(value) for j, value in enumerate(c)})
        try:
            status = tableau.optimise(lambda j: j < first_artificial, max_iterations)
        except _IterationLimit:
            x = tableau.solution(n)
            return LPSolution(LPStatus.ITERATION_LIMIT, x, tableau.value, tableau.iterations)
    except _IterationLimit:
        return LPSolution(LPStatus.ITERATION_LIMIT, None, None, tableau.iterations)

    if status is LPStatus.UNBOUNDED:
        return LPSolution(status, None, None, tableau.iterations)
    log.debug("Simplex optimal after %d iterations.", tableau.iterations)
    return LPSolution(status, tableau.solution(n), tableau.value, tableau.iterations)


def _drive_out_artificials(tableau: _Tableau, first_artificial: int) -> None:
    """Pivot zero-valued artificials out of the basis and drop the rows that turn out redundant."""
    redundant = []
    for r, j in enumerate(tableau.basis):
        if j < first_artificial:
            continue
        entering = min((column for column in tableau.rows[r] if column < first_artificial), default=None)
        if entering is None:
            redundant.append(r)
        else:
            tableau.pivot(r, entering)
    for r in reversed(redundant):
        del tableau.rows[r], tableau.rhs[r], tableau.basis[r]
    for row in tableau.rows:
        for column in [column for column in row if column >= first_artificial]:
            del row[column]
