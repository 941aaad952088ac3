"""
Witness functions for the lower and upper bounds, and the ratio functionals they are measured with.

The lower bounds come from high cosine powers concentrating at a period slightly above 1. The upper
bound comes from the positive definite combination `build_H` of shifted triangles, whose exact
majorization by signed indicators is checked with `pl_le`.
"""
from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certify import analytic_pd_certificate, nonneg_check
from .errors import DegenerateDenominatorError, DomainError, InfeasibleConcentrationError, InfeasibleParametersError
from .functions import CosPower, describe
from .piecewise import (
    DEFAULT_QUADRATURE, PiecewiseLinearFn, QuadratureConfig, Violation, convolve_indicators, integrate_pl,
    integrate_sampled, pl_combine, pl_indicator, pl_le, pl_triangle
)
from .records import Record
from .utils import RationalLike, as_rational

log = logging.getLogger(__name__)

DEFAULT_POWER_CAP = 10**6
DENOMINATOR_FLOOR = 1e-300
MAX_PERIOD_EXCESS = Fraction(1, 20)
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Lemma1Params(Record):
    """
    Parameters of the concentrated cosine power cos(pi x / p) ** (2n).

    Mass sits in the windows (m p - delta, m p + delta); the inequalities checked by `validate` make
    [-1, 1] meet only the window at 0, [-k - eps, k + eps] contain the windows -k..k and [1, 2k + 1]
    contain the windows 1..2k.
    """

    kind = "lemma1-params"

    k: int
    eps: Fraction
    p: Fraction
    delta: Fraction
    n: int

    def validate(self) -> None:
        """Raise InfeasibleParametersError naming the first violated inequality."""
        if not 1 < self.p < Fraction(11, 10):
            raise InfeasibleParametersError("1 < p < 11/10", f"p={self.p}")
        if not 0 < self.delta < Fraction(1, 10):
            raise InfeasibleParametersError("0 < delta < 1/10", f"delta={self.delta}")
        if not self.delta < self.p - 1:
            raise InfeasibleParametersError("delta < p - 1", f"delta={self.delta}, p={self.p}")
        if not self.k * (self.p - 1) + self.delta < self.eps:
            raise InfeasibleParametersError("k(p - 1) + delta < eps", f"k={self.k}, eps={self.eps}")
        if not 2 * self.k * (self.p - 1) + self.delta < 1:
            raise InfeasibleParametersError("2k(p - 1) + delta < 1", f"k={self.k}, p={self.p}")

    def function(self) -> CosPower:  # noqa: D102
        return CosPower(self.p, self.n)


@dataclass(frozen=True)
class WitnessEvaluation(Record):
    """Both ratio functionals of one witness at one `ell`, with its certification status."""

    kind = "witness-evaluation"

    description: str
    ell: Fraction
    g_ratio: float
    c_ratio: float
    c_ratio_argmax: float
    certified_pd: bool
    certified_nonneg: bool
    quadrature_converged: bool


@dataclass(frozen=True)
class Lemma1Report(Record):
    """The cosine-power witness measured at ell = k + eps (central) and at ell = k (sliding)."""

    kind = "lemma1-report"

    params: Lemma1Params
    outside_mass: float
    central: WitnessEvaluation
    sliding: WitnessEvaluation

    @property
    def certified(self) -> bool:  # noqa: D102
        return all(e.certified_pd and e.certified_nonneg for e in (self.central, self.sliding))


@dataclass(frozen=True)
class MajorizationCertificate(Record):
    """
    Exact check of H <= 2(k + 1) chi[-1, 1] - p (chi[b, b + L] + chi[-b - L, -b]).

    Here b = a + p - 1 and L = k(2 - p) + 2 - 2p; `derived_window` is [b, b + L].
    """

    kind = "majorization-certificate"

    a: Fraction
    k: int
    p: Fraction
    holds: bool
    lhs: PiecewiseLinearFn
    rhs: PiecewiseLinearFn
    derived_window: tuple[Fraction, Fraction]
    violation: Violation | None = None

    @property
    def majorant_constants(self) -> tuple[Fraction, Fraction]:
        """(A, B) = (2(k + 1), p) of the majorant."""
        return Fraction(2 * (self.k + 1)), self.p


@dataclass(frozen=True)
class CounterexampleReport(Record):
    """Best shifted window found for a two-bump convolution square; `gap` is exact."""

    kind = "counterexample-report"

    success: bool
    c: Fraction
    w: Fraction
    central_weight: Fraction
    a: Fraction
    window_halfwidth: Fraction
    window_integral: Fraction
    central_integral: Fraction
    gap: Fraction
    edge_slope: Fraction
    f: PiecewiseLinearFn


class WindowRatio(t.NamedTuple):
    """Best sliding-window ratio, where it was attained, and whether every quadrature converged."""

    value: float
    argmax: float
    converged: bool


class CombRatios(t.NamedTuple):
    """Point counts of the comb {m p} in the central and the best shifted window, relative to [-1, 1]."""

    central: int
    sliding: int


def cospow(p: RationalLike, n: int) -> CosPower:
    """The p-periodic doubly positive function cos(pi x / p) ** (2n)."""
    return CosPower(as_rational(p), n)


def _outside_mass(p: Fraction, delta: Fraction, n: int, cfg: QuadratureConfig) -> float:
    f = CosPower(p, n)
    inside = integrate_sampled(f, -float(delta), float(delta), cfg).value
    return max(0.0, 1.0 - inside / f.period_integral())


def choose_lemma1_params(
    k: int,
    eps: RationalLike,
    concentration_tol: float = 1e-3,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    power_cap: int = DEFAULT_POWER_CAP,
) -> Lemma1Params:
    """
    Pick (p, delta, n) for the cosine-power witness around the integer `k`.

    p - 1 = min(eps / (2(k + 1)), 1/20) and delta = (p - 1) / 2 satisfy every inequality with slack.
    n is the smallest power whose mass outside (-delta, delta) is below `concentration_tol` of a period.
    """
    eps = as_rational(eps)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < concentration_tol < 1:
        raise DomainError(f"concentration tolerance must lie in (0, 1), got {concentration_tol}")
    p = 1 + min(eps / (2 * (k + 1)), MAX_PERIOD_EXCESS)
    delta = (p - 1) / 2

    def concentrated(n: int) -> bool:
        return _outside_mass(p, delta, n, cfg) <= concentration_tol

    upper = 1
    while not concentrated(upper):
        if upper >= power_cap:
            raise InfeasibleConcentrationError(
                f"cos power above the cap {power_cap} needed for concentration {concentration_tol}"
            )
        upper = min(2 * upper, power_cap)
    lower = upper // 2
    while upper - lower > 1:
        middle = (lower + upper) // 2
        if concentrated(middle):
            upper = middle
        else:
            lower = middle

    params = Lemma1Params(k, eps, p, delta, upper)
    params.validate()
    log.info("Cosine-power witness for k=%d, eps=%s: p=%s, delta=%s, n=%d.", k, eps, p, delta, upper)
    return params


def _denominator(f: t.Callable, cfg: QuadratureConfig):
    result = integrate_sampled(f, -1.0, 1.0, cfg)
    if abs(result.value) < DENOMINATOR_FLOOR:
        raise DegenerateDenominatorError(f"integral of {describe(f)} over [-1, 1] is numerically zero")
    return result


def g_ratio(f: t.Callable, ell: RationalLike, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Central ratio: integral over [-ell, ell] divided by the integral over [-1, 1]."""
    ell = float(as_rational(ell))
    denominator = _denominator(f, cfg)
    return integrate_sampled(f, -ell, ell, cfg).value / denominator.value


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    if lo > hi:
        raise DomainError(f"empty grid [{lo}, {hi}]")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def c_ratio(
    f: t.Callable,
    ell: RationalLike,
    a_lo: float,
    a_hi: float,
    a_step: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> WindowRatio:
    """
    Sliding ratio: the best integral over [a - ell, a + ell], for a on the grid a_lo, a_lo + a_step, ..., a_hi.

    Window integrals are differences of prefix integrals over the sorted window endpoints, so
    each piece of the line is integrated once. Near-ties go to the smallest |a|.
    """
    ell = float(as_rational(ell))
    centers = _grid(float(a_lo), float(a_hi), float(a_step))
    denominator = _denominator(f, cfg)

    ends = np.unique(np.round(np.concatenate([centers - ell, centers + ell]), 12))
    pieces = [integrate_sampled(f, lo, hi, cfg) for lo, hi in zip(ends, ends[1:])]
    prefix = np.concatenate([[0.0], np.cumsum([piece.value for piece in pieces])])
    converged = denominator.converged and all(piece.converged for piece in pieces)

    left = np.searchsorted(ends, np.round(centers - ell, 12))
    right = np.searchsorted(ends, np.round(centers + ell, 12))
    ratios = (prefix[right] - prefix[left]) / denominator.value

    best = float(np.max(ratios))
    near = np.flatnonzero(ratios >= best - TIE_TOLERANCE * max(1.0, abs(best)))
    chosen = min(near, key=lambda i: (abs(centers[i]), -centers[i]))
    return WindowRatio(float(ratios[chosen]), float(centers[chosen]), converged)


def comb_heuristic(ell: RationalLike, p: RationalLike) -> CombRatios:
    """
    Ratios for the Dirac comb sum_m delta(x - m p), the limit of the cosine powers.

    With 1 < p only the tooth at 0 lies in [-1, 1]; a closed window of length 2 ell holds at most
    floor(2 ell / p) + 1 teeth.
    """
    ell, p = as_rational(ell), as_rational(p)
    if p <= 1 or ell <= 0:
        raise DomainError("the comb needs p > 1 and ell > 0")
    return CombRatios(2 * math.floor(ell / p) + 1, math.floor(2 * ell / p) + 1)


def _evaluate_witness(
    description: str, f: CosPower, ell: Fraction, a_lo: float, a_hi: float, a_step: float, cfg: QuadratureConfig
) -> WitnessEvaluation:
    central = integrate_sampled(f, -float(ell), float(ell), cfg)
    denominator = _denominator(f, cfg)
    sliding = c_ratio(f, ell, a_lo, a_hi, a_step, cfg)
    certificate = analytic_pd_certificate(f)
    nonneg = nonneg_check(f, -float(ell), float(ell))
    return WitnessEvaluation(
        description,
        ell,
        central.value / denominator.value,
        sliding.value,
        sliding.argmax,
        certificate is not None and certificate.passed,
        nonneg.passed,
        central.converged and denominator.converged and sliding.converged,
    )


def lemma1_witness(
    k: int,
    eps: RationalLike,
    concentration_tol: float = 1e-3,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    a_step: RationalLike | None = None,
) -> Lemma1Report:
    """
    Build the cosine-power witness and measure it.

    The central evaluation is at ell = k + eps (expected near 2k + 1), the sliding one at ell = k
    (expected near 2k, attained around the window [1, 2k + 1]). Window centers range over
    [-(2k + 2), 2k + 2] with step eps / 10 unless `a_step` is given.
    """
    params = choose_lemma1_params(k, eps, concentration_tol, cfg)
    f = params.function()
    step = float(as_rational(a_step)) if a_step is not None else float(params.eps / 10)
    reach = float(2 * k + 2)
    outside = _outside_mass(params.p, params.delta, params.n, cfg)
    central = _evaluate_witness(describe(f), f, params.k + params.eps, -reach, reach, step, cfg)
    sliding = _evaluate_witness(describe(f), f, Fraction(params.k), -reach, reach, step, cfg)
    log.info("Witness %s: G ratio %.6f, C ratio %.6f.", describe(f), central.g_ratio, sliding.c_ratio)
    return Lemma1Report(params, outside, central, sliding)


def h_atom(a: RationalLike) -> PiecewiseLinearFn:
    """
    The convolution square of chi(x) - chi(x - a) for the unit interval chi: 2T(x) - T(x + a) - T(x - a).

    `T` is the triangle (1 - |x|)_+.
    """
    a = as_rational(a)
    terms = [(Fraction(2), pl_triangle(0)), (Fraction(-1), pl_triangle(-a)), (Fraction(-1), pl_triangle(a))]
    return pl_combine(terms).with_provenance(f"convolution-square: h a={a}")


def build_H(a: RationalLike, k: int, p: RationalLike) -> PiecewiseLinearFn:
    """The sum of h atoms at the arithmetic progression a + j(2 - p), j = 0..k."""
    a, p = as_rational(a), as_rational(p)
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    terms = [(Fraction(2 * (k + 1)), pl_triangle(0))]
    for j in range(k + 1):
        shift = a + j * (2 - p)
        terms += [(Fraction(-1), pl_triangle(-shift)), (Fraction(-1), pl_triangle(shift))]
    return pl_combine(terms).with_provenance(f"convolution-square sum: H a={a} k={k} p={p}")


def verify_majorization(a: RationalLike, k: int, p: RationalLike) -> MajorizationCertificate:
    """Exactly decide whether build_H(a, k, p) lies below its signed-indicator majorant."""
    a, p = as_rational(a), as_rational(p)
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    length = k * (2 - p) + 2 - 2 * p
    if length <= 0:
        raise DomainError(f"degenerate band of length {length} for a={a}, k={k}, p={p}")
    b = a + p - 1
    lhs = build_H(a, k, p)
    rhs = pl_combine(
        [
            (Fraction(2 * (k + 1)), pl_indicator(-1, 1)),
            (-p, pl_indicator(b, b + length)),
            (-p, pl_indicator(-b - length, -b)),
        ]
    )
    comparison = pl_le(lhs, rhs)
    if not comparison.holds:
        log.warning("Majorization fails for a=%s, k=%d, p=%s at %s.", a, k, p, comparison.witness)
    return MajorizationCertificate(a, k, p, comparison.holds, lhs, rhs, (b, b + length), comparison.witness)


def h_transform(a_values: t.Iterable[RationalLike], xi) -> np.ndarray | float:
    """
    Fourier transform of the sum of h atoms at `a_values`, in closed form.

    Each atom contributes |chi_hat(xi)|**2 |1 - exp(-i a xi)|**2 = sinc(xi / 2)**2 * 2(1 - cos(a xi)).
    """
    frequencies = np.asarray(xi, dtype=float)
    envelope = np.sinc(frequencies / (2 * np.pi)) ** 2
    total = sum((2 * (1 - np.cos(float(a) * frequencies)) for a in a_values), np.zeros_like(frequencies))
    values = envelope * total
    return float(values) if values.ndim == 0 else values


def two_bump_square(c: RationalLike, w: RationalLike, central_weight: RationalLike = 0) -> PiecewiseLinearFn:
    """
    The exact autoconvolution u * u of a symmetric probability density made of indicator bumps.

    u = (1 - g) / (2w) (chi[-c - w, -c] + chi[c, c + w]) + g / w chi[-w/2, w/2] with g the central weight.
    """
    c, w, weight = as_rational(c), as_rational(w), as_rational(central_weight)
    if w <= 0 or c < 0:
        raise DomainError(f"bumps need w > 0 and c >= 0, got c={c}, w={w}")
    if not 0 <= weight < 1:
        raise DomainError(f"central weight must lie in [0, 1), got {weight}")
    bumps = [((1 - weight) / (2 * w), (-c - w, -c)), ((1 - weight) / (2 * w), (c, c + w))]
    if weight:
        bumps.append((weight / w, (-w / 2, w / 2)))
    terms = [
        (first_weight * second_weight, convolve_indicators(*first, *second))
        for first_weight, first in bumps
        for second_weight, second in bumps
    ]
    return pl_combine(terms).with_provenance(f"convolution-square: two-bump c={c} w={w} g={weight}")


def _slope_at(f: PiecewiseLinearFn, x: Fraction) -> Fraction:
    """Slope of the piece of `f` starting at or containing `x`, zero outside the support."""
    for segment in f.segments:
        if segment.lo <= x < segment.hi:
            return segment.slope
    return Fraction(0)


def bogachev_search(
    bump_center_grid: t.Sequence[RationalLike],
    bump_width_grid: t.Sequence[RationalLike],
    window_halfwidth: RationalLike = 1,
    a_step: RationalLike = Fraction(1, 20),
    central_weights: t.Sequence[RationalLike] = (0,),
) -> CounterexampleReport:
    """
    Look for a doubly positive f and a shift a with a larger integral over [a - h, a + h] than over [-h, h].

    f ranges over two-bump convolution squares, so every integral is exact. A negative result is a
    valid outcome and is reported with the best gap found.
    """
    if not bump_center_grid or not bump_width_grid or not central_weights:
        raise DomainError("search grids must not be empty")
    half = as_rational(window_halfwidth)
    step = as_rational(a_step)
    if half <= 0 or step <= 0:
        raise DomainError("window half-width and shift step must be positive")

    best = None
    for c in map(as_rational, bump_center_grid):
        for w in map(as_rational, bump_width_grid):
            for weight in map(as_rational, central_weights):
                f = two_bump_square(c, w, weight)
                central = integrate_pl(f, -half, half)
                reach = 2 * (c + w) + half
                a = step
                while a <= reach:
                    window = integrate_pl(f, a - half, a + half)
                    gap = window - central
                    if best is None or gap > best.gap:
                        best = CounterexampleReport(
                            gap > 0, c, w, weight, a, half, window, central, gap, _slope_at(f, half), f
                        )
                    a += step
    log.info("Best shifted window: c=%s, w=%s, a=%s, gap=%s.", best.c, best.w, best.a, best.gap)
    return best
