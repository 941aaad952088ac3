"""Positive definite building blocks for the extremal programs."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..bounds import construction_params
from ..errors import DomainError
from ..piecewise import PiecewiseLinearFn, pl_dilated_triangle
from ..utils import RationalLike, as_rational
from ..witness import h_atom

log = logging.getLogger(__name__)


class AtomKind(enum.Enum):
    """Families of convolution squares used as LP columns."""

    DILATED_TRIANGLE = "dilated-triangle"
    H_ATOM = "h-atom"


@dataclass(frozen=True)
class Atom:
    """One positive definite column: a dilated triangle (1 - |x|/s)_+ or an h atom at shift a."""

    kind: AtomKind
    parameter: Fraction
    fn: PiecewiseLinearFn = field(compare=False)
    from_construction: bool = field(default=False, compare=False)

    @classmethod
    def dilated_triangle(cls, s: Fraction) -> Atom:  # noqa: D102
        return cls(AtomKind.DILATED_TRIANGLE, s, pl_dilated_triangle(s))

    @classmethod
    def h(cls, a: Fraction, from_construction: bool = False) -> Atom:  # noqa: D102
        return cls(AtomKind.H_ATOM, a, h_atom(a), from_construction)

    @property
    def label(self) -> str:  # noqa: D102
        name = "T_s" if self.kind is AtomKind.DILATED_TRIANGLE else "h_a"
        return f"{name}({self.parameter})"


@dataclass(frozen=True)
class ProgressionConstruction:
    """
    The explicit feasible point built from the arithmetic progression of h atoms.

    `weights` maps each distinct |shift| to its LP weight; `objective` is the A it attains with B = 1.
    """

    k: int
    p: Fraction
    progression: tuple[Fraction, ...]
    weights: dict[Fraction, Fraction]
    objective: Fraction


def progression_shifts(a: RationalLike, ell: RationalLike) -> ProgressionConstruction | None:
    """
    The progression construction for the windows [a, a + ell] and [-a - ell, -a].

    At a = 0 the windows merge into [-ell, ell]; the progression for (k, p) = construction_params(ell)
    starts at 1 - p - ell and is weighted 1/(2p), reaching A = (k + 1)/p. For a > 0 the progression
    for (k, p) = construction_params(ell / 2) starts at a - p + 1 with weight 1/p, reaching
    A = 2(k + 1)/p. Returns None where the construction is undefined (ell < 1, or ell / 2 < 1).
    """
    a, ell = as_rational(a), as_rational(ell)
    if a == 0:
        if ell < 1:
            return None
        k, p = construction_params(ell)
        base, weight, objective = 1 - p - ell, 1 / (2 * p), (k + 1) / p
    else:
        if ell / 2 < 1:
            return None
        k, p = construction_params(ell / 2)
        base, weight, objective = a - p + 1, 1 / p, 2 * (k + 1) / p
    progression = tuple(base + j * (2 - p) for j in range(k + 1))
    weights: dict[Fraction, Fraction] = {}
    for shift in progression:
        if shift:
            weights[abs(shift)] = weights.get(abs(shift), Fraction(0)) + weight
    return ProgressionConstruction(k, p, progression, weights, objective)


@dataclass(frozen=True)
class AtomFamily:
    """The columns of an extremal program, with the grids that generated them."""

    ell: Fraction
    atoms: tuple[Atom, ...]
    dilations: tuple[Fraction, ...]
    shifts: tuple[Fraction, ...]
    include_progression: bool
    warm_start: ProgressionConstruction | None = None

    def __len__(self):
        return len(self.atoms)

    def for_window(self, a: RationalLike, ell: RationalLike | None = None) -> AtomFamily:
        """
        The family for the window pair at offset `a`.

        With progressions enabled, the progression atoms of that window are appended and the
        construction is kept as `warm_start`.
        """
        ell = self.ell if ell is None else as_rational(ell)
        if not self.include_progression:
            return replace(self, ell=ell, warm_start=None)
        construction = progression_shifts(a, ell)
        if construction is None:
            return replace(self, ell=ell, warm_start=None)
        present = {(atom.kind, atom.parameter) for atom in self.atoms}
        extra = tuple(
            Atom.h(shift, from_construction=True)
            for shift in sorted(construction.weights)
            if (AtomKind.H_ATOM, shift) not in present
        )
        return replace(self, ell=ell, atoms=self.atoms + extra, warm_start=construction)

    def warm_start_weights(self) -> tuple[Fraction, ...] | None:
        """LP weights of the construction, aligned with `atoms`, or None without one."""
        if self.warm_start is None:
            return None
        return tuple(
            self.warm_start.weights.get(atom.parameter, Fraction(0)) if atom.kind is AtomKind.H_ATOM else Fraction(0)
            for atom in self.atoms
        )


def make_atoms(
    ell: RationalLike,
    shift_count: int = 8,
    dilation_count: int = 4,
    include_progression: bool = True,
) -> AtomFamily:
    """
    Dilated triangles with s = i / dilation_count and h atoms with a = (ell + 1) i / shift_count.

    With `include_progression` the progression of the centred construction is appended as well;
    `AtomFamily.for_window` adds the one matching any other window.
    """
    ell = as_rational(ell)
    if ell <= 0:
        raise DomainError(f"ell must be positive, got {ell}")
    if shift_count < 1 or dilation_count < 1:
        raise DomainError("shift and dilation counts must be at least 1")
    dilations = tuple(Fraction(i, dilation_count) for i in range(1, dilation_count + 1))
    shifts = tuple((ell + 1) * Fraction(i, shift_count) for i in range(1, shift_count + 1))
    atoms = tuple(Atom.dilated_triangle(s) for s in dilations) + tuple(Atom.h(a) for a in shifts)
    family = AtomFamily(ell, atoms, dilations, shifts, include_progression)
    if include_progression:
        family = family.for_window(0)
    log.debug("Atom family for ell=%s with %d atoms.", ell, len(family))
    return family
