"""Tests for the positive definiteness and nonnegativity checks."""
from fractions import Fraction

import numpy as np
import pytest

from pdextremal.certify import (
    CertifyConfig, PDMethod, analytic_pd_certificate, cosine_power_expansion, cospow_coefficients,
    doubly_positive_check, nonneg_check, toeplitz_pd_check
)
from pdextremal.errors import DomainError, NotEvenError
from pdextremal.functions import Constant, Cosine, CosineSquare, CosPower, Gaussian
from pdextremal.piecewise import integrate_sampled, pl_indicator, pl_scale, pl_shift, pl_triangle
from pdextremal.witness import h_atom

F = Fraction


class TestToeplitz:
    def test_cosine_is_positive_definite(self):
        certificate = toeplitz_pd_check(Cosine(), step=0.1, lags=64)
        assert certificate.passed
        assert certificate.method is PDMethod.TOEPLITZ
        assert certificate.necessary_condition_only

    def test_gaussian(self):
        assert toeplitz_pd_check(Gaussian(0.25), lags=128).passed

    def test_indicator_is_rejected(self):
        certificate = toeplitz_pd_check(pl_indicator(-1, 1), step=0.3, lags=64)
        assert not certificate.passed
        assert certificate.min_eigenvalue_ratio < -1e-3

    def test_schur_products_pass_the_finite_section(self):
        assert toeplitz_pd_check(Cosine() * Gaussian(), step=0.1, lags=64).passed
        assert toeplitz_pd_check(CosPower(F(41, 40), 20) * pl_triangle(), step=0.05, lags=128).passed

    def test_refutation_survives_finer_sections(self):
        coarse = toeplitz_pd_check(pl_indicator(-1, 1), step=0.3, lags=64)
        # Both finer configurations contain the coarse section as a principal submatrix.
        for step, lags in [(0.3, 128), (0.15, 128)]:
            finer = toeplitz_pd_check(pl_indicator(-1, 1), step=step, lags=lags)
            assert not finer.passed
            assert finer.min_eigenvalue <= coarse.min_eigenvalue + 1e-9

    def test_odd_input(self):
        with pytest.raises(NotEvenError):
            toeplitz_pd_check(lambda x: np.exp(-((x - 0.5) ** 2)))

    def test_parameters(self):
        with pytest.raises(DomainError):
            toeplitz_pd_check(Cosine(), step=0)
        with pytest.raises(DomainError):
            toeplitz_pd_check(Cosine(), lags=1)


class TestNonnegativity:
    def test_cosine_dips_to_minus_one(self):
        result = nonneg_check(Cosine(), -4, 4)
        assert not result
        assert result.worst_value == pytest.approx(-1.0, abs=1e-6)

    def test_triangle(self):
        assert nonneg_check(pl_triangle(), -1, 1).passed

    def test_empty_range(self):
        with pytest.raises(DomainError):
            nonneg_check(Cosine(), 1, 0)


class TestExpansions:
    def test_small_powers(self):
        assert cosine_power_expansion(0) == (1,)
        assert cosine_power_expansion(2) == (F(1, 2), 0, F(1, 2))
        assert cosine_power_expansion(3) == (0, F(3, 4), 0, F(1, 4))

    @pytest.mark.parametrize("n", [1, 7, 64])
    def test_cospow_coefficients(self, n):
        coefficients = cospow_coefficients(n)
        assert len(coefficients) == n + 1
        assert all(c >= 0 for c in coefficients)
        assert sum(coefficients) == 1

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_cospow_coefficients_match_projections(self, n):
        for j, coefficient in enumerate(cospow_coefficients(n)):
            projection = integrate_sampled(
                lambda theta: np.cos(theta) ** (2 * n) * np.cos(2 * j * theta), -np.pi / 2, np.pi / 2
            ).value
            weight = 1 if j == 0 else 2
            assert float(coefficient) == pytest.approx(weight * projection / np.pi, abs=1e-10)

    def test_cospow_coefficient_range(self):
        with pytest.raises(DomainError):
            cospow_coefficients(65)


class TestAnalytic:
    @pytest.mark.parametrize(
        "f",
        [CosPower(F(41, 40), 20), CosPower(F(1), 1000), Cosine(3.0), Gaussian(2.0), CosineSquare((1.0, 2.0), 5.0)],
    )
    def test_known_families(self, f):
        certificate = analytic_pd_certificate(f)
        assert certificate is not None and certificate.passed

    def test_schur_products(self):
        assert analytic_pd_certificate(Cosine() * Gaussian()).method is PDMethod.CONSTRUCTION
        assert analytic_pd_certificate(CosPower(F(41, 40), 20) * pl_triangle()).passed

    def test_constructions(self):
        certificate = analytic_pd_certificate(h_atom(F(1, 2)))
        assert certificate.method is PDMethod.CONSTRUCTION
        assert certificate.passed

    def test_translates_and_negatives_are_not_constructions(self):
        assert analytic_pd_certificate(pl_triangle(3)) is None
        assert analytic_pd_certificate(pl_shift(pl_triangle(), 2)) is None
        assert analytic_pd_certificate(pl_scale(pl_triangle(), -1)) is None
        assert analytic_pd_certificate(pl_scale(pl_triangle(), F(1, 2))).passed
        assert analytic_pd_certificate(pl_shift(pl_triangle(), 0)).passed

    def test_negated_atom_is_refuted_and_not_proven(self):
        negated = -h_atom(F(1, 2))
        assert analytic_pd_certificate(negated) is None
        assert not toeplitz_pd_check(negated, step=0.1, lags=64).passed

    def test_unknown_and_negative(self):
        assert analytic_pd_certificate(pl_indicator(-1, 1)) is None
        assert analytic_pd_certificate(np.cos) is None
        assert not analytic_pd_certificate(Constant(-1.0)).passed


class TestDoublyPositive:
    @pytest.mark.parametrize("f", [pl_triangle(), CosPower(F(41, 40), 20)])
    def test_passes(self, f):
        result = doubly_positive_check(f)
        assert result.passed
        assert result.analytic.passed

    def test_cosine_fails_nonnegativity(self):
        result = doubly_positive_check(Cosine(), CertifyConfig(step=0.1, lags=64))
        assert result.pd.passed
        assert not result.nonneg
        assert not result.passed

    def test_config_validation(self):
        with pytest.raises(DomainError):
            CertifyConfig(window=(1.0, -1.0))
