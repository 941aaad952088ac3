"""Tests for the witness functions, the ratio functionals and the exact majorization check."""
from fractions import Fraction

import numpy as np
import pytest

from pdextremal.bounds import construction_params
from pdextremal.errors import DegenerateDenominatorError, DomainError, InfeasibleParametersError
from pdextremal.functions import Constant
from pdextremal.piecewise import integrate_pl, pl_combine, pl_cosine_transform, pl_indicator, pl_triangle
from pdextremal.witness import (
    Lemma1Params, bogachev_search, build_H, c_ratio, choose_lemma1_params, comb_heuristic, cospow, g_ratio, h_atom,
    h_transform, lemma1_witness, two_bump_square, verify_majorization
)

F = Fraction
# Ratios from quadrature, compared against their exact limits.
RATIO_TOL = 1e-6
MAJORIZATION_ELLS = (F(5, 4), F(3, 2), F(2), F(11, 4), F(4))
MAJORIZATION_OFFSETS = (F(0), F(1, 2), F(1), F(7, 3), F(5))


class TestRatios:
    def test_central_ratio_of_the_triangle(self):
        assert g_ratio(pl_triangle(), F(1, 2)) == pytest.approx(0.75, rel=RATIO_TOL)

    def test_constant(self):
        assert g_ratio(Constant(), 2) == pytest.approx(2.0, rel=RATIO_TOL)
        best = c_ratio(Constant(), 1, -2, 2, F(1, 4))
        assert best.value == pytest.approx(1.0, rel=RATIO_TOL)
        assert best.argmax == 0.0
        assert best.converged

    def test_sliding_ratio_prefers_the_heavy_bumps(self):
        f = pl_combine([(2, pl_triangle(3)), (2, pl_triangle(-3)), (1, pl_triangle())])
        best = c_ratio(f, F(1, 2), 0, 4, F(1, 2))
        assert best.argmax == 3.0
        assert best.value == pytest.approx(1.5, rel=RATIO_TOL)

    def test_degenerate_denominator(self):
        with pytest.raises(DegenerateDenominatorError):
            g_ratio(pl_indicator(2, 3), 1)

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            c_ratio(Constant(), 1, 0, 1, 0)

    def test_comb_heuristic(self):
        assert comb_heuristic(F(11, 10), F(41, 40)) == (3, 3)
        assert comb_heuristic(1, F(41, 40)) == (1, 2)
        with pytest.raises(DomainError):
            comb_heuristic(1, 1)


class TestLemma1:
    def test_parameters(self):
        params = choose_lemma1_params(1, F(1, 10))
        assert params.p == F(41, 40)
        assert params.delta == F(1, 80)
        assert 1 <= params.n <= 5000
        params.validate()

    def test_named_inequality(self):
        with pytest.raises(InfeasibleParametersError) as info:
            Lemma1Params(1, F(1, 10), F(1), F(1, 100), 10).validate()
        assert info.value.inequality == "1 < p < 11/10"
        with pytest.raises(InfeasibleParametersError) as info:
            Lemma1Params(5, F(1, 10), F(21, 20), F(1, 100), 10).validate()
        assert info.value.inequality == "k(p - 1) + delta < eps"

    def test_arguments(self):
        with pytest.raises(DomainError):
            choose_lemma1_params(0, F(1, 10))
        with pytest.raises(DomainError):
            choose_lemma1_params(1, F(3, 2))

    def test_witness_ratios(self):
        report = lemma1_witness(1, F(1, 10), a_step=F(1, 20))
        assert report.certified
        assert report.outside_mass <= 1e-3
        assert report.central.g_ratio >= 2.8
        assert report.sliding.c_ratio >= 1.9
        assert report.central.g_ratio <= 3 + 1e-6

    def test_central_ratio_grows_with_the_power(self):
        ratios = [g_ratio(cospow(F(41, 40), n), F(11, 10)) for n in (50, 200, 800, 3200)]
        assert all(later >= earlier - 1e-9 for earlier, later in zip(ratios, ratios[1:]))
        assert ratios[-1] <= 3 + RATIO_TOL

    def test_sliding_ratio_dominates_the_central_one(self):
        f = cospow(F(41, 40), 200)
        central = g_ratio(f, F(11, 10))
        assert c_ratio(f, F(11, 10), 0, 2, F(1, 10)).value >= central * (1 - RATIO_TOL)

    def test_cospow(self):
        f = cospow(F(41, 40), 3)
        assert f.p == F(41, 40)
        assert f(41 / 40) == pytest.approx(1.0)


class TestConstruction:
    def test_h_atom(self):
        h = h_atom(F(1, 2))
        assert h.evaluate(0) == 1
        assert integrate_pl(h) == 0
        assert h.provenance.startswith("convolution-square")

    def test_build_H_integrates_to_zero(self):
        H = build_H(0, 4, 1)
        assert H.evaluate(0) == 8
        assert integrate_pl(H) == 0

    def test_build_H_arguments(self):
        with pytest.raises(DomainError):
            build_H(0, 2, F(3, 2))

    @pytest.mark.parametrize(
        "a, k, p", [(0, 4, 1), (0, 2, F(7, 8)), (0, 3, 1), (F(1, 2), 2, F(1, 2)), (1, 5, F(2, 3))]
    )
    def test_majorization_holds(self, a, k, p):
        certificate = verify_majorization(a, k, p)
        assert certificate.holds
        assert certificate.violation is None
        assert certificate.majorant_constants == (2 * (k + 1), p)

    @pytest.mark.parametrize("ell", MAJORIZATION_ELLS)
    @pytest.mark.parametrize("a", MAJORIZATION_OFFSETS)
    def test_majorization_over_the_construction_grid(self, ell, a):
        k, p = construction_params(ell)
        certificate = verify_majorization(a, k, p)
        assert certificate.holds, certificate.violation

    def test_derived_window(self):
        assert verify_majorization(0, 4, 1).derived_window == (0, 4)
        assert verify_majorization(0, 2, F(7, 8)).derived_window == (F(-1, 8), F(5, 2) - F(1, 8))

    @pytest.mark.parametrize("xi", [0.5, 2.0, 9.0])
    def test_closed_form_transform(self, xi):
        expected = pl_cosine_transform(h_atom(F(1, 2)) + h_atom(F(3, 2)), xi)
        assert h_transform([F(1, 2), F(3, 2)], xi) == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert np.all(h_transform([F(1, 2)], np.linspace(0, 20, 41)) >= 0)


class TestCounterexample:
    def test_two_bump_square_is_a_probability_density(self):
        assert integrate_pl(two_bump_square(F(2, 5), F(2, 5))) == 1
        assert integrate_pl(two_bump_square(F(1, 2), F(1, 4), F(1, 4))) == 1

    def test_two_bump_arguments(self):
        with pytest.raises(DomainError):
            two_bump_square(0, 0)
        with pytest.raises(DomainError):
            two_bump_square(1, 1, 1)

    def test_shifted_window_wins(self):
        report = bogachev_search([F(2, 5)], [F(2, 5)])
        assert report.success
        assert report.a == F(3, 5)
        assert report.central_integral == F(9, 16)
        assert report.window_integral == F(3, 4)
        assert report.gap == F(3, 16)

    def test_grids_must_not_be_empty(self):
        with pytest.raises(DomainError):
            bogachev_search([], [F(1, 2)])
