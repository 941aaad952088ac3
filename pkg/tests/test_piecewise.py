"""Tests for exact piecewise-linear functions and the Simpson integrator."""
import random
from fractions import Fraction

import numpy as np
import pytest

from pdextremal.errors import DomainError, EvaluationError, InvalidIntervalError
from pdextremal.piecewise import (
    DEFAULT_QUADRATURE, Knot, PiecewiseLinearFn, QuadratureConfig, Side, convolve_indicators, integrate_pl,
    integrate_sampled, pl_combine, pl_cosine_transform, pl_dilated_triangle, pl_indicator, pl_le, pl_scale, pl_shift,
    pl_triangle
)
from pdextremal.utils import UNBOUNDED

F = Fraction
SEEDS = range(20)


def random_rational(rng: random.Random, lo: int = -6, hi: int = 6) -> Fraction:
    return F(rng.randint(lo * 4, hi * 4), 4)


def random_pl(rng: random.Random, terms: int = 3, nonnegative: bool = False) -> PiecewiseLinearFn:
    """A random combination of indicators and triangles on a grid of quarters."""
    parts = []
    for _ in range(terms):
        lo = random_rational(rng, -4, 3)
        hi = lo + F(rng.randint(1, 8), 4)
        coefficient = F(rng.randint(1 if nonnegative else -5, 5), rng.randint(1, 3))
        shape = pl_indicator(lo, hi) if rng.random() < 0.5 else pl_triangle((lo + hi) / 2)
        parts.append((coefficient, shape))
    return pl_combine(parts)


class TestEvaluation:
    def test_indicator_is_closed_with_one_sided_limits(self):
        chi = pl_indicator(0, 1)
        assert chi.evaluate(0, Side.LEFT) == 0
        assert chi.evaluate(0) == 1
        assert chi.evaluate(0, Side.RIGHT) == 1
        assert chi.evaluate(1, Side.RIGHT) == 0
        assert chi.evaluate(F(1, 2)) == 1
        assert chi.evaluate(2) == 0

    def test_triangle_values(self):
        triangle = pl_triangle()
        assert triangle.evaluate(0) == 1
        assert triangle.evaluate(F(1, 4)) == F(3, 4)
        assert triangle.evaluate(-1) == 0
        assert triangle.is_continuous
        assert triangle.support == (-1, 1)

    def test_dilated_triangle(self):
        assert pl_dilated_triangle(F(1, 2)).evaluate(F(1, 4)) == F(1, 2)
        with pytest.raises(DomainError):
            pl_dilated_triangle(0)

    def test_float_call_matches_exact_values(self):
        chi = pl_indicator(0, 1)
        values = chi(np.array([-0.5, 0.0, 0.5, 1.0, 1.5]))
        np.testing.assert_array_equal(values, [0.0, 1.0, 1.0, 1.0, 0.0])
        assert pl_triangle()(0.25) == pytest.approx(0.75)

    def test_empty_interval_is_rejected(self):
        with pytest.raises(InvalidIntervalError):
            pl_indicator(1, 1)


class TestAlgebra:
    def test_convolution_of_unit_indicators_is_the_triangle(self):
        assert convolve_indicators(F(-1, 2), F(1, 2), F(-1, 2), F(1, 2)) == pl_triangle()

    def test_trapezoid(self):
        trapezoid = convolve_indicators(0, 1, 0, 2)
        assert trapezoid.evaluate(F(1, 2)) == F(1, 2)
        assert trapezoid.evaluate(F(3, 2)) == 1
        assert trapezoid.evaluate(F(5, 2)) == F(1, 2)
        assert integrate_pl(trapezoid) == 2

    def test_cancellation_gives_the_canonical_zero(self):
        assert pl_triangle() - pl_triangle() == PiecewiseLinearFn.zero()

    def test_shift_and_scale(self):
        shifted = pl_shift(pl_triangle(), 2)
        assert shifted == pl_triangle(2)
        assert pl_scale(shifted, 3).evaluate(2) == 3
        assert pl_scale(shifted, 0) == PiecewiseLinearFn.zero()

    def test_combine_needs_terms(self):
        with pytest.raises(DomainError):
            pl_combine([])

    def test_provenance_does_not_take_part_in_equality(self):
        assert pl_triangle().with_provenance("other") == pl_triangle()

    def test_construction_tag_follows_only_positive_definite_operations(self):
        tag = pl_triangle().provenance
        assert tag.startswith("convolution-square")
        assert not pl_triangle(3).provenance.startswith("convolution-square")
        assert pl_shift(pl_triangle(), 1).provenance is None
        assert pl_shift(pl_triangle(), 0).provenance == tag
        assert pl_scale(pl_triangle(), F(1, 2)).provenance == tag
        assert pl_scale(pl_triangle(), -2).provenance is None
        assert (-pl_triangle()).provenance is None

    def test_canonicalization_is_idempotent(self):
        padded = PiecewiseLinearFn.from_points([(-1, 0), (F(-1, 2), F(1, 2)), (0, 1), (F(1, 2), F(1, 2)), (1, 0)])
        assert padded.knots == pl_triangle().knots
        for seed in SEEDS:
            f = random_pl(random.Random(seed))
            assert f.canonical().knots == f.knots
            assert f.canonical().canonical().knots == f.knots


class TestComparison:
    def test_triangle_below_indicator(self):
        assert pl_le(pl_triangle(), pl_indicator(-1, 1)).holds

    def test_indicator_not_below_triangle(self):
        comparison = pl_le(pl_indicator(-1, 1), pl_triangle())
        assert not comparison
        assert comparison.witness.excess == 1

    @pytest.mark.parametrize("seed", SEEDS)
    def test_partial_order(self, seed):
        rng = random.Random(seed)
        f = random_pl(rng)
        g = f + random_pl(rng, nonnegative=True)
        h = g + random_pl(rng, nonnegative=True)
        assert pl_le(f, f).holds
        assert pl_le(f, g).holds and pl_le(g, h).holds
        assert pl_le(f, h).holds
        assert pl_le(f, pl_combine([(1, f)])).holds and pl_le(pl_combine([(1, f)]), f).holds
        other = random_pl(rng)
        if pl_le(f, other).holds and pl_le(other, f).holds:
            assert f == other
        if g != f:
            assert not pl_le(g, f).holds

    def test_jump_is_checked_at_the_point(self):
        # Same one-sided limits as the closed indicator, but lower at both endpoints.
        lowered = PiecewiseLinearFn.from_knots(
            [Knot(knot.x, knot.left, min(knot.left, knot.right), knot.right) for knot in pl_indicator(0, 1).knots]
        )
        comparison = pl_le(pl_indicator(0, 1), lowered)
        assert not comparison
        assert comparison.witness.side is Side.POINT
        assert pl_le(lowered, pl_indicator(0, 1)).holds


class TestIntegration:
    def test_exact_triangle_integrals(self):
        assert integrate_pl(pl_triangle()) == 1
        assert integrate_pl(pl_triangle(), 0, F(1, 2)) == F(3, 8)
        assert integrate_pl(pl_triangle(), UNBOUNDED, 0) == F(1, 2)

    def test_out_of_order_bounds(self):
        with pytest.raises(DomainError):
            integrate_pl(pl_triangle(), 1, 0)
        with pytest.raises(DomainError):
            integrate_sampled(np.cos, 1.0, 0.0)

    def test_simpson_converges(self):
        result = integrate_sampled(np.cos, 0.0, np.pi / 2)
        assert result.converged
        assert result.value == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_exact_integral_is_linear(self, seed):
        rng = random.Random(seed)
        f, g = random_pl(rng), random_pl(rng)
        alpha, beta = random_rational(rng), random_rational(rng)
        lo = random_rational(rng, -5, 0)
        hi = lo + F(rng.randint(1, 40), 4)
        combined = pl_combine([(alpha, f), (beta, g)])
        assert integrate_pl(combined) == alpha * integrate_pl(f) + beta * integrate_pl(g)
        assert integrate_pl(combined, lo, hi) == alpha * integrate_pl(f, lo, hi) + beta * integrate_pl(g, lo, hi)

    def test_simpson_is_exact_on_cubics(self):
        result = integrate_sampled(lambda x: x**3 - 2 * x**2 + x, 0.0, 2.0)
        assert result.converged
        assert result.value == pytest.approx(2 / 3, rel=1e-12)

    @pytest.mark.parametrize("power, expected", [(2, 0.5), (4, 0.375)])
    def test_cosine_powers_over_a_period(self, power, expected):
        result = integrate_sampled(lambda x: np.cos(np.pi * x) ** power, -0.5, 0.5)
        assert result.value == pytest.approx(expected, rel=1e-10)

    def test_non_finite_integrand(self):
        with pytest.raises(EvaluationError):
            integrate_sampled(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)

    def test_empty_range(self):
        assert integrate_sampled(np.cos, 1.0, 1.0).value == 0.0

    def test_quadrature_config_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(initial_intervals=3)
        assert DEFAULT_QUADRATURE.initial_intervals == 256

    @pytest.mark.parametrize("xi", [0.0, 2.0, 7.5])
    def test_cosine_transform_of_the_triangle(self, xi):
        expected = 1.0 if xi == 0 else (np.sin(xi / 2) / (xi / 2)) ** 2
        assert pl_cosine_transform(pl_triangle(), xi) == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_json_form():
    f = convolve_indicators(0, 1, F(1, 3), 2)
    assert PiecewiseLinearFn.from_json(f.to_json()) == f
    assert f.to_json()[0]["x"] == "1/3"
