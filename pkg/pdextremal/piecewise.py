"""
Exact piecewise-linear functions with jumps, plus Simpson quadrature for sampled functions.

A `PiecewiseLinearFn` is stored as a strictly increasing tuple of knots. Each knot keeps the
left limit, the point value and the right limit of the function there; between two knots the
function is affine, and outside the first/last knot it is zero. Everything is exact `Fraction`
arithmetic, so majorization `f <= g` can be decided rather than sampled.
"""
from __future__ import annotations

import bisect
import enum
import functools
import logging
import typing as t
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DomainError, EvaluationError, InvalidIntervalError
from .utils import UNBOUNDED, RationalLike, as_rational, format_rational

if t.TYPE_CHECKING:
    import typing_extensions as te

log = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Bound = t.Union[RationalLike, t.Literal[UNBOUNDED]]


class Side(enum.Enum):
    """Which evaluation of a function at a breakpoint is meant."""

    LEFT = "left"
    POINT = "point"
    RIGHT = "right"


@dataclass(frozen=True)
class Knot:
    """A breakpoint with its left limit, point value and right limit."""

    x: Fraction
    left: Fraction
    value: Fraction
    right: Fraction

    @property
    def is_continuous(self) -> bool:  # noqa: D102
        return self.left == self.value == self.right

    def at(self, side: Side) -> Fraction:
        """Return the evaluation of the knot on `side`."""
        match side:
            case Side.LEFT:
                return self.left
            case Side.RIGHT:
                return self.right
            case _:
                return self.value

    def scaled(self, coefficient: Fraction) -> Knot:  # noqa: D102
        return Knot(self.x, coefficient * self.left, coefficient * self.value, coefficient * self.right)


class Segment(t.NamedTuple):
    """The affine piece `slope * x + intercept` on the open interval (lo, hi)."""

    lo: Fraction
    hi: Fraction
    slope: Fraction
    intercept: Fraction


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """
    Compactly supported piecewise-linear function, possibly discontinuous at its breakpoints.

    Instances are canonical when built through `from_knots`: adjacent pieces with the same affine
    data are merged, so two equal functions compare equal. `provenance` is informational only
    (used by analytic certification) and does not take part in equality.
    """

    knots: tuple[Knot, ...] = ()
    provenance: str | None = field(default=None, compare=False)

    def __post_init__(self):
        xs = [knot.x for knot in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("Breakpoints must be strictly increasing.")
        if self.knots and (self.knots[0].left != 0 or self.knots[-1].right != 0):
            raise ValueError("A piecewise-linear function must vanish outside its first and last breakpoint.")

    @classmethod
    def zero(cls) -> te.Self:  # noqa: D102
        return cls(())

    @classmethod
    def from_knots(cls, knots: t.Iterable[Knot], provenance: str | None = None) -> te.Self:
        """Build the canonical function from `knots` in increasing order."""
        return cls(_canonical_knots(tuple(knots)), provenance)

    @classmethod
    def from_points(
        cls, points: t.Iterable[tuple[RationalLike, RationalLike]], provenance: str | None = None
    ) -> te.Self:
        """
        Build the continuous function interpolating `points` and vanishing outside them.

        The first and last point must have value zero; repeated abscissae must repeat the value.
        """
        merged: dict[Fraction, Fraction] = {}
        for x, y in points:
            x, y = as_rational(x), as_rational(y)
            if merged.get(x, y) != y:
                raise ValueError(f"Inconsistent definition at {x}")
            merged[x] = y
        knots = [Knot(x, y, y, y) for x, y in sorted(merged.items())]
        return cls.from_knots(knots, provenance)

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:  # noqa: D102
        return tuple(knot.x for knot in self.knots)

    @property
    def support(self) -> tuple[Fraction, Fraction] | None:
        """Smallest closed interval outside of which the function vanishes, or None for zero."""
        if not self.knots:
            return None
        return self.knots[0].x, self.knots[-1].x

    @property
    def is_continuous(self) -> bool:  # noqa: D102
        return all(knot.is_continuous for knot in self.knots)

    @property
    def segments(self) -> list[Segment]:
        """The affine pieces between consecutive breakpoints."""
        pieces = []
        for a, b in zip(self.knots, self.knots[1:]):
            slope = (b.left - a.right) / (b.x - a.x)
            pieces.append(Segment(a.x, b.x, slope, a.right - slope * a.x))
        return pieces

    def _index(self, x: Fraction) -> int:
        return bisect.bisect_left(self.breakpoints, x)

    def _between(self, x: Fraction, i: int) -> Fraction:
        """Value at the non-knot `x` which sits between knots i - 1 and i."""
        if i == 0 or i == len(self.knots):
            return ZERO
        a, b = self.knots[i - 1], self.knots[i]
        return a.right + (b.left - a.right) * (x - a.x) / (b.x - a.x)

    def evaluate(self, x: RationalLike, side: Side = Side.POINT) -> Fraction:
        """Exact value (or one-sided limit, depending on `side`) at `x`."""
        x = as_rational(x)
        i = self._index(x)
        if i < len(self.knots) and self.knots[i].x == x:
            return self.knots[i].at(side)
        return self._between(x, i)

    def left_limit(self, x: RationalLike) -> Fraction:  # noqa: D102
        return self.evaluate(x, Side.LEFT)

    def right_limit(self, x: RationalLike) -> Fraction:  # noqa: D102
        return self.evaluate(x, Side.RIGHT)

    @functools.cached_property
    def _float_tables(self) -> tuple[np.ndarray, ...]:
        xs = np.array([float(k.x) for k in self.knots])
        values = np.array([float(k.value) for k in self.knots])
        rights = np.array([float(k.right) for k in self.knots])
        slopes = np.array([float(s.slope) for s in self.segments] + [0.0])
        return xs, values, rights, slopes

    def __call__(self, x):
        """Vectorised float evaluation, so the function doubles as a sampled function handle."""
        points = np.asarray(x, dtype=float)
        out = np.zeros_like(points)
        if self.knots:
            xs, values, rights, slopes = self._float_tables
            idx = np.searchsorted(xs, points, side="right") - 1
            safe = np.clip(idx, 0, len(xs) - 1)
            inside = (idx >= 0) & (idx < len(xs) - 1)
            out = np.where(inside, rights[safe] + slopes[safe] * (points - xs[safe]), out)
            out = np.where((idx >= 0) & (xs[safe] == points), values[safe], out)
        return float(out) if out.ndim == 0 else out

    def canonical(self) -> te.Self:
        """Re-canonicalize; a no-op on functions built by this module."""
        return type(self).from_knots(self.knots, self.provenance)

    def with_provenance(self, provenance: str | None) -> te.Self:  # noqa: D102
        return type(self)(self.knots, provenance)

    def __add__(self, other: PiecewiseLinearFn) -> PiecewiseLinearFn:
        return pl_combine([(ONE, self), (ONE, other)])

    def __sub__(self, other: PiecewiseLinearFn) -> PiecewiseLinearFn:
        return pl_combine([(ONE, self), (-ONE, other)])

    def __neg__(self) -> PiecewiseLinearFn:
        return pl_scale(self, -ONE)

    def to_json(self) -> list[dict[str, str]]:
        """Serialise as a list of breakpoint records with "num/den" strings."""
        return [
            {
                "x": format_rational(k.x),
                "left": format_rational(k.left),
                "value": format_rational(k.value),
                "right": format_rational(k.right),
            }
            for k in self.knots
        ]

    @classmethod
    def from_json(cls, records: t.Iterable[dict[str, str]], provenance: str | None = None) -> te.Self:  # noqa: D102
        knots = (
            Knot(Fraction(r["x"]), Fraction(r["left"]), Fraction(r["value"]), Fraction(r["right"])) for r in records
        )
        return cls.from_knots(knots, provenance)


def _canonical_knots(knots: tuple[Knot, ...]) -> tuple[Knot, ...]:
    """Drop every knot across which the function is affine (and continuous)."""
    kept = []
    last = len(knots) - 1
    for i, knot in enumerate(knots):
        if not knot.is_continuous:
            kept.append(knot)
            continue
        if i == 0:
            slope_before = ZERO
            continuous_before = knot.value == 0
        else:
            prev = knots[i - 1]
            slope_before = (knot.left - prev.right) / (knot.x - prev.x)
            continuous_before = True
        if i == last:
            slope_after = ZERO
            continuous_after = knot.value == 0
        else:
            nxt = knots[i + 1]
            slope_after = (nxt.left - knot.right) / (nxt.x - knot.x)
            continuous_after = True
        if not (continuous_before and continuous_after and slope_before == slope_after):
            kept.append(knot)
    return tuple(kept)


def pl_indicator(lo: RationalLike, hi: RationalLike) -> PiecewiseLinearFn:
    """Closed-interval indicator: 1 on [lo, hi], one-sided limits 1 inside and 0 outside."""
    lo, hi = as_rational(lo), as_rational(hi)
    if lo >= hi:
        raise InvalidIntervalError(f"empty interval [{lo}, {hi}]")
    return PiecewiseLinearFn.from_knots((Knot(lo, ZERO, ONE, ONE), Knot(hi, ONE, ONE, ZERO)), "indicator")


def pl_triangle(center: RationalLike = 0) -> PiecewiseLinearFn:
    """
    The triangle x -> (1 - |x - center|)_+.

    Only the centred triangle is the convolution square of the unit indicator; translates are not
    even and carry no construction tag.
    """
    center = as_rational(center)
    provenance = "convolution-square: triangle" if center == 0 else "triangle"
    return PiecewiseLinearFn.from_points([(center - 1, 0), (center, 1), (center + 1, 0)], provenance)


def pl_dilated_triangle(width: RationalLike) -> PiecewiseLinearFn:
    """The triangle x -> (1 - |x|/width)_+ supported on [-width, width]."""
    width = as_rational(width)
    if width <= 0:
        raise DomainError(f"dilation must be positive, got {width}")
    return PiecewiseLinearFn.from_points([(-width, 0), (0, 1), (width, 0)], f"convolution-square: triangle s={width}")


def convolve_indicators(
    lo1: RationalLike, hi1: RationalLike, lo2: RationalLike, hi2: RationalLike
) -> PiecewiseLinearFn:
    """
    The convolution of two interval indicators, a trapezoid.

    General convolution is not offered: every object built from convolutions here is a sum of
    these trapezoids.
    """
    lo1, hi1, lo2, hi2 = map(as_rational, (lo1, hi1, lo2, hi2))
    if lo1 >= hi1 or lo2 >= hi2:
        raise InvalidIntervalError("both intervals must be non-empty")
    short, long_ = sorted((hi1 - lo1, hi2 - lo2))
    start = lo1 + lo2
    return PiecewiseLinearFn.from_points(
        [(start, 0), (start + short, short), (start + long_, short), (hi1 + hi2, 0)], "indicator convolution"
    )


def pl_shift(f: PiecewiseLinearFn, offset: RationalLike) -> PiecewiseLinearFn:
    """The translate x -> f(x - offset). Provenance survives only the zero offset."""
    offset = as_rational(offset)
    provenance = f.provenance if offset == 0 else None
    return PiecewiseLinearFn(tuple(Knot(k.x + offset, k.left, k.value, k.right) for k in f.knots), provenance)


def pl_scale(f: PiecewiseLinearFn, coefficient: RationalLike) -> PiecewiseLinearFn:
    """The multiple `coefficient * f`. Provenance survives positive coefficients only."""
    coefficient = as_rational(coefficient)
    if coefficient == 0:
        return PiecewiseLinearFn.zero()
    provenance = f.provenance if coefficient > 0 else None
    return PiecewiseLinearFn(tuple(k.scaled(coefficient) for k in f.knots), provenance)


def pl_combine(terms: t.Sequence[tuple[RationalLike, PiecewiseLinearFn]]) -> PiecewiseLinearFn:
    """Exact linear combination over the merged breakpoint set, canonicalized."""
    if not terms:
        raise DomainError("pl_combine needs at least one term")
    terms = [(as_rational(c), f) for c, f in terms if c != 0]
    xs = sorted({x for _, f in terms for x in f.breakpoints})
    knots = []
    for x in xs:
        left = sum((c * f.left_limit(x) for c, f in terms), ZERO)
        value = sum((c * f.evaluate(x) for c, f in terms), ZERO)
        right = sum((c * f.right_limit(x) for c, f in terms), ZERO)
        knots.append(Knot(x, left, value, right))
    return PiecewiseLinearFn.from_knots(knots)


class Violation(t.NamedTuple):
    """Where `f <= g` fails and by how much."""

    x: Fraction
    side: Side
    excess: Fraction


class Comparison(t.NamedTuple):
    """Result of `pl_le`."""

    holds: bool
    witness: Violation | None

    def __bool__(self):
        return self.holds


def pl_le(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> Comparison:
    """
    Decide `f(x) <= g(x)` for every real x exactly.

    Both functions are affine between merged breakpoints, so comparing both one-sided limits and
    the point value at each merged breakpoint is enough. The witness is the worst violation.
    """
    difference = pl_combine([(ONE, f), (-ONE, g)])
    worst = None
    for knot in difference.knots:
        for side in (Side.LEFT, Side.POINT, Side.RIGHT):
            excess = knot.at(side)
            if excess > 0 and (worst is None or excess > worst.excess):
                worst = Violation(knot.x, side, excess)
    return Comparison(worst is None, worst)


def _resolve_bounds(lo: Bound, hi: Bound) -> tuple[Fraction | None, Fraction | None]:
    lo = None if lo is UNBOUNDED else as_rational(lo)
    hi = None if hi is UNBOUNDED else as_rational(hi)
    if lo is not None and hi is not None and lo > hi:
        raise DomainError(f"integration bounds out of order: [{lo}, {hi}]")
    return lo, hi


def integrate_pl(f: PiecewiseLinearFn, lo: Bound = UNBOUNDED, hi: Bound = UNBOUNDED) -> Fraction:
    """Exact integral of `f` over [lo, hi]; `UNBOUNDED` stands for an infinite endpoint."""
    lo, hi = _resolve_bounds(lo, hi)
    total = ZERO
    for segment in f.segments:
        u = segment.lo if lo is None else max(segment.lo, lo)
        v = segment.hi if hi is None else min(segment.hi, hi)
        if u >= v:
            continue
        total += (segment.slope * (u + v) / 2 + segment.intercept) * (v - u)
    return total


def pl_cosine_transform(f: PiecewiseLinearFn, xi) -> np.ndarray | float:
    """
    Float evaluation of `integral f(x) cos(xi x) dx`, the Fourier transform of a real even `f`.

    Each piece is integrated in closed form: the antiderivative of (s x + c) cos(w x) is
    (s x + c) sin(w x) / w + s cos(w x) / w**2.
    """
    w = np.asarray(xi, dtype=float)
    total = np.zeros_like(w)
    small = np.abs(w) < 1e-12
    safe = np.where(small, 1.0, w)
    for segment in f.segments:
        s, c = float(segment.slope), float(segment.intercept)
        u, v = float(segment.lo), float(segment.hi)

        def antiderivative(x):
            return (s * x + c) * np.sin(safe * x) / safe + s * np.cos(safe * x) / safe**2

        area = (s * (u + v) / 2 + c) * (v - u)
        total += np.where(small, area, antiderivative(v) - antiderivative(u))
    return float(total) if total.ndim == 0 else total


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Simpson settings: starting subinterval count, relative tolerance, doubling budget."""

    initial_intervals: int = 256
    relative_tolerance: float = 1e-10
    max_doublings: int = 12

    def __post_init__(self):
        if self.initial_intervals <= 0 or self.initial_intervals % 2:
            raise DomainError("Simpson needs a positive even subinterval count.")
        if not self.relative_tolerance > 0:
            raise DomainError("relative tolerance must be positive")
        if self.max_doublings <= 0:
            raise DomainError("max_doublings must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


class QuadratureResult(t.NamedTuple):
    """Last Simpson estimate, whether two successive estimates agreed, and the final subinterval count."""

    value: float
    converged: bool
    intervals: int


def _sample(f: t.Callable, x: np.ndarray) -> np.ndarray:
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise EvaluationError(f"integrand is not finite at x={bad!r}")
    return y


def integrate_sampled(
    f: t.Callable, lo: float, hi: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> QuadratureResult:
    """
    Composite Simpson estimate of the integral of `f` over [lo, hi], refined by interval doubling.

    `f` must accept a numpy array. Refinement stops once two successive estimates agree to the
    relative tolerance, or when the doubling budget runs out (the result is then flagged).
    """
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise DomainError(f"integration bounds out of order: [{lo}, {hi}]")
    if lo == hi:
        return QuadratureResult(0.0, True, 0)
    intervals = cfg.initial_intervals
    x = np.linspace(lo, hi, intervals + 1)
    y = _sample(f, x)
    estimate = integrate.simpson(y, dx=(hi - lo) / intervals)
    for _ in range(cfg.max_doublings):
        midpoints = (x[:-1] + x[1:]) / 2
        refined_x = np.empty(2 * intervals + 1)
        refined_x[0::2], refined_x[1::2] = x, midpoints
        refined_y = np.empty_like(refined_x)
        refined_y[0::2], refined_y[1::2] = y, _sample(f, midpoints)
        intervals *= 2
        x, y = refined_x, refined_y
        previous, estimate = estimate, integrate.simpson(y, dx=(hi - lo) / intervals)
        if abs(estimate - previous) <= cfg.relative_tolerance * abs(estimate) or estimate == previous:
            log.debug("Simpson on [%g, %g] converged with %d subintervals.", lo, hi, intervals)
            return QuadratureResult(float(estimate), True, intervals)
    log.warning("Simpson on [%g, %g] did not converge after %d subintervals.", lo, hi, intervals)
    return QuadratureResult(float(estimate), False, intervals)

