"""
Linear programs for the dual bounds.

For a window pair at offset `a` the program looks for the smallest A such that a nonnegative
combination H of atoms satisfies

    H <= A chi[-1, 1] - chi[a, a + ell] - chi[-a - ell, -a]

everywhere. Every function involved is piecewise linear, so the inequality is enforced exactly at
both one-sided limits of the merged breakpoints. All functions are even, which lets the rows be
restricted to x >= 0.
"""
from __future__ import annotations

import enum
import logging
import typing as t
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from ..errors import DomainError
from ..piecewise import PiecewiseLinearFn, Side, pl_combine, pl_indicator, pl_le
from ..records import Record
from ..utils import RationalLike, as_rational
from .atoms import AtomFamily
from .simplex import LPStatus, lp_minimize

log = logging.getLogger(__name__)

LP_PROVENANCE = "convolution-square sum: LP"
EXACT_ROW_LIMIT = 2000
EXACT_COLUMN_LIMIT = 500
DEFAULT_SIGMA_GRID_POINTS = 17

_HIGHS_STATUS = {
    0: LPStatus.OPTIMAL,
    1: LPStatus.ITERATION_LIMIT,
    2: LPStatus.INFEASIBLE,
    3: LPStatus.UNBOUNDED,
}


class SolverMode(enum.Enum):
    """Arithmetic used by `lp_solve`."""

    AUTO = "auto"
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class SolverConfig:
    """
    Solver settings.

    `AUTO` pivots exactly for programs up to 2000 rows by 500 columns and falls back to HiGHS above
    that. Float solutions are rationalised with `denominator_limit` and re-verified exactly.
    """

    mode: SolverMode = SolverMode.AUTO
    max_iterations: int = 50_000
    denominator_limit: int = 10**9

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be positive")
        if self.denominator_limit < 1:
            raise DomainError("denominator_limit must be positive")


DEFAULT_SOLVER = SolverConfig()


def window_indicators(a: RationalLike, ell: RationalLike) -> PiecewiseLinearFn:
    """chi[a, a + ell] + chi[-a - ell, -a], merged into chi[-ell, ell] at a = 0."""
    a, ell = as_rational(a), as_rational(ell)
    if a == 0:
        return pl_indicator(-ell, ell)
    return pl_combine([(1, pl_indicator(a, a + ell)), (1, pl_indicator(-a - ell, -a))])


@dataclass(frozen=True)
class LPProblem:
    """
    One dual program with B fixed to 1.

    Variables are [A, lambda_1, ..., lambda_n]. Row i reads
    -chi[-1, 1](x_i) A + sum_j lambda_j atom_j(x_i) <= -windows(x_i) at the one-sided site `sites[i]`.
    """

    ell: Fraction
    a: Fraction
    family: AtomFamily
    windows: PiecewiseLinearFn
    sites: tuple[tuple[Fraction, Side], ...]
    A_ub: tuple[tuple[Fraction, ...], ...]
    b_ub: tuple[Fraction, ...]

    @classmethod
    def build(cls, a: RationalLike, ell: RationalLike, family: AtomFamily) -> LPProblem:
        """Assemble the rows; duplicates and rows that hold for any nonnegative point are dropped."""
        a, ell = as_rational(a), as_rational(ell)
        if ell <= 0:
            raise DomainError(f"ell must be positive, got {ell}")
        if a < 0:
            raise DomainError(f"the window offset must be nonnegative, got {a}")
        if not family.atoms:
            raise DomainError("the atom family is empty")
        unit = pl_indicator(-1, 1)
        windows = window_indicators(a, ell)
        functions = [unit, windows, *(atom.fn for atom in family.atoms)]
        xs = sorted({x for f in functions for x in f.breakpoints if x >= 0})

        rows: dict[tuple[tuple[Fraction, ...], Fraction], tuple[Fraction, Side]] = {}
        for x in xs:
            for side in (Side.LEFT, Side.RIGHT):
                coefficients = (-unit.evaluate(x, side), *(atom.fn.evaluate(x, side) for atom in family.atoms))
                bound = -windows.evaluate(x, side)
                if bound >= 0 and not any(coefficients[1:]) and coefficients[0] <= 0:
                    continue
                rows.setdefault((coefficients, bound), (x, side))
        log.debug("Program for a=%s, ell=%s: %d rows, %d atoms.", a, ell, len(rows), len(family.atoms))
        return cls(
            ell,
            a,
            family,
            windows,
            tuple(rows.values()),
            tuple(coefficients for coefficients, _ in rows),
            tuple(bound for _, bound in rows),
        )

    @property
    def objective(self) -> tuple[Fraction, ...]:  # noqa: D102
        return (Fraction(1),) + (Fraction(0),) * len(self.family.atoms)

    @property
    def shape(self) -> tuple[int, int]:  # noqa: D102
        return len(self.A_ub), len(self.family.atoms) + 1

    def majorant(self, A: Fraction) -> PiecewiseLinearFn:
        """The right-hand side A chi[-1, 1] - windows as one function."""
        return pl_combine([(A, pl_indicator(-1, 1)), (-1, self.windows)])

    def smallest_A(self, weights: t.Sequence[Fraction]) -> Fraction | None:
        """
        The least A making `weights` feasible, or None when a row outside [-1, 1] is violated.

        Rows with a zero A coefficient cannot be repaired by raising A.
        """
        A = Fraction(0)
        for row, bound in zip(self.A_ub, self.b_ub):
            load = sum((c * w for c, w in zip(row[1:], weights) if c and w), Fraction(0))
            if row[0] < 0:
                A = max(A, (load - bound) / -row[0])
            elif load > bound:
                return None
        return A


@dataclass(frozen=True)
class LPResult(Record):
    """
    Outcome of one dual program.

    `bound_sigma` is A_opt / 2 and bounds the window ratio at (a, ell); at a = 0, A_opt itself bounds
    the central ratio. `independent_check` is an exact re-verification of the reconstructed H against
    the majorant, independent of the solver.
    """

    kind = "lp-result"

    status: LPStatus
    mode: SolverMode
    ell: Fraction
    a: Fraction
    A_opt: Fraction | None
    bound_sigma: Fraction | None
    weights: tuple[Fraction, ...]
    atom_labels: tuple[str, ...]
    reconstructed_H: PiecewiseLinearFn | None
    independent_check: bool
    iterations: int
    warm_start_A: Fraction | None
    constraint_count: int

    @property
    def bound_gamma(self) -> Fraction | None:  # noqa: D102
        return self.A_opt

    @property
    def certified(self) -> bool:  # noqa: D102
        return self.status is LPStatus.OPTIMAL and self.independent_check


def _resolve_mode(problem: LPProblem, cfg: SolverConfig) -> SolverMode:
    if cfg.mode is not SolverMode.AUTO:
        return cfg.mode
    rows, columns = problem.shape
    if rows <= EXACT_ROW_LIMIT and columns <= EXACT_COLUMN_LIMIT:
        return SolverMode.EXACT
    log.info("Program of %d x %d exceeds the exact limits, solving in floating point.", rows, columns)
    return SolverMode.FLOAT


def _solve_exact(problem: LPProblem, cfg: SolverConfig) -> tuple[LPStatus, tuple[Fraction, ...] | None, int]:
    solution = lp_minimize(problem.objective, problem.A_ub, problem.b_ub, cfg.max_iterations)
    return solution.status, solution.x, solution.iterations


def _solve_float(problem: LPProblem, cfg: SolverConfig) -> tuple[LPStatus, tuple[Fraction, ...] | None, int]:
    result = optimize.linprog(
        np.array(problem.objective, dtype=float),
        A_ub=np.array(problem.A_ub, dtype=float),
        b_ub=np.array(problem.b_ub, dtype=float),
        bounds=(0, None),
        method="highs",
        options={"maxiter": cfg.max_iterations},
    )
    status = _HIGHS_STATUS.get(result.status, LPStatus.INFEASIBLE)
    if result.x is None:
        return status, None, int(getattr(result, "nit", 0))
    limit = cfg.denominator_limit
    weights = tuple(max(Fraction(0), Fraction(float(value)).limit_denominator(limit)) for value in result.x[1:])
    A = problem.smallest_A(weights)
    if A is None:
        log.warning("Rationalised weights violate a row outside [-1, 1]; keeping the solver's A.")
        A = Fraction(float(result.x[0])).limit_denominator(cfg.denominator_limit)
    return status, (A, *weights), int(getattr(result, "nit", 0))


def lp_solve(problem: LPProblem, cfg: SolverConfig = DEFAULT_SOLVER) -> LPResult:
    """
    Solve `problem` and re-verify the reconstructed H exactly with `pl_le`.

    When the family carries a progression construction that is feasible for the rows, the optimum
    can never exceed its objective; exact solves assert this.
    """
    mode = _resolve_mode(problem, cfg)
    solver = _solve_exact if mode is SolverMode.EXACT else _solve_float
    status, x, iterations = solver(problem, cfg)

    labels = tuple(atom.label for atom in problem.family.atoms)
    warm_start = problem.family.warm_start
    warm_start_A = warm_start.objective if warm_start is not None else None
    if x is None:
        log.info("Program at a=%s, ell=%s ended with status %s.", problem.a, problem.ell, status.value)
        return LPResult(
            status, mode, problem.ell, problem.a, None, None, (), labels, None, False,
            iterations, warm_start_A, len(problem.A_ub),
        )

    A, weights = x[0], tuple(x[1:])
    H = pl_combine([(w, atom.fn) for w, atom in zip(weights, problem.family.atoms)]).with_provenance(LP_PROVENANCE)
    check = pl_le(H, problem.majorant(A))
    if not check.holds:
        log.warning("Reconstructed H fails the exact check at %s.", check.witness)

    if status is LPStatus.OPTIMAL and mode is SolverMode.EXACT and warm_start is not None:
        start_A = problem.smallest_A(problem.family.warm_start_weights())
        if start_A is not None and start_A <= warm_start.objective and A > start_A:
            raise RuntimeError(f"optimum {A} exceeds the feasible progression point {start_A}")

    log.info(
        "Program at a=%s, ell=%s: %s, A=%s after %d iterations.", problem.a, problem.ell, status.value, A, iterations
    )
    return LPResult(
        status,
        mode,
        problem.ell,
        problem.a,
        A,
        A / 2,
        weights,
        labels,
        H,
        check.holds,
        iterations,
        warm_start_A,
        len(problem.A_ub),
    )


def sigma_lp(
    a: RationalLike, ell: RationalLike, atoms: AtomFamily, solver: SolverConfig = DEFAULT_SOLVER
) -> LPResult:
    """The window-pair program at offset `a`; infeasibility is a status, not an error."""
    a, ell = as_rational(a), as_rational(ell)
    family = atoms.for_window(a, ell)
    return lp_solve(LPProblem.build(a, ell, family), solver)


def gamma_lp(ell: RationalLike, atoms: AtomFamily, solver: SolverConfig = DEFAULT_SOLVER) -> LPResult:
    """The centred program; its A_opt bounds the central ratio at `ell`."""
    ell = as_rational(ell)
    if ell < 1:
        raise DomainError(f"the centred program needs ell >= 1, got {ell}")
    return sigma_lp(0, ell, atoms, solver)


@dataclass(frozen=True)
class SigmaSupResult(Record):
    """Largest window-pair bound over a grid of offsets, with every per-offset result."""

    kind = "sigma-sup"

    ell: Fraction
    bound: Fraction | None
    argmax_a: Fraction | None
    a_grid: tuple[Fraction, ...]
    per_a: tuple[LPResult, ...]

    @property
    def all_optimal(self) -> bool:  # noqa: D102
        return all(result.status is LPStatus.OPTIMAL for result in self.per_a)


def default_a_grid(ell: RationalLike, points: int = DEFAULT_SIGMA_GRID_POINTS) -> tuple[Fraction, ...]:
    """Offsets 0, 2 ell / (points - 1), ..., 2 ell."""
    ell = as_rational(ell)
    if points < 2:
        raise DomainError("an offset grid needs at least two points")
    return tuple(2 * ell * Fraction(i, points - 1) for i in range(points))


def sigma_sup(
    ell: RationalLike,
    a_grid: t.Sequence[RationalLike],
    atoms: AtomFamily,
    solver: SolverConfig = DEFAULT_SOLVER,
) -> SigmaSupResult:
    """
    Maximum of `sigma_lp` over `a_grid`.

    Each per-offset bound is rigorous for its own offset; the maximum only approximates the
    supremum over all real offsets.
    """
    if not a_grid:
        raise DomainError("the offset grid must not be empty")
    ell = as_rational(ell)
    grid = tuple(as_rational(a) for a in a_grid)
    results = tuple(sigma_lp(a, ell, atoms, solver) for a in grid)
    best = max(
        (result for result in results if result.status is LPStatus.OPTIMAL),
        key=lambda result: result.bound_sigma,
        default=None,
    )
    if best is None:
        log.warning("No offset in the grid gave an optimal program for ell=%s.", ell)
        return SigmaSupResult(ell, None, None, grid, results)
    return SigmaSupResult(ell, best.bound_sigma, best.a, grid, results)


@dataclass(frozen=True)
class LPCertificate(Record):
    """
    Standalone majorization certificate for an optimal program.

    Holds H, the majorant A chi[-1, 1] - windows and the window geometry; `recheck` decides
    H <= majorant again from the stored breakpoints alone.
    """

    kind = "lp-certificate"

    ell: Fraction
    a: Fraction
    A: Fraction
    H: PiecewiseLinearFn
    majorant: PiecewiseLinearFn
    holds: bool

    def recheck(self) -> bool:  # noqa: D102
        expected = pl_combine([(self.A, pl_indicator(-1, 1)), (-1, window_indicators(self.a, self.ell))])
        return expected == self.majorant and pl_le(self.H, self.majorant).holds


def lp_certificate(result: LPResult) -> LPCertificate:
    """Certificate for a result carrying a reconstructed H."""
    if result.A_opt is None or result.reconstructed_H is None:
        raise DomainError(f"no solution to certify (status {result.status.value})")
    majorant = pl_combine([(result.A_opt, pl_indicator(-1, 1)), (-1, window_indicators(result.a, result.ell))])
    holds = pl_le(result.reconstructed_H, majorant).holds
    return LPCertificate(result.ell, result.a, result.A_opt, result.reconstructed_H, majorant, holds)
