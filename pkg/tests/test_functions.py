"""Tests for the function handles."""
from fractions import Fraction

import numpy as np
import pytest

from pdextremal.errors import DomainError
from pdextremal.functions import Constant, Cosine, CosineSquare, CosPower, Gaussian, Product, SampledTable, describe
from pdextremal.piecewise import integrate_sampled, pl_triangle


class TestCosPower:
    def test_values(self):
        f = CosPower(Fraction(2), 1)
        assert f(0.0) == pytest.approx(1.0)
        assert f(1.0) == pytest.approx(0.0, abs=1e-15)
        assert f(0.5) == pytest.approx(0.5)
        np.testing.assert_allclose(f(np.array([-2.0, 2.0, 4.0])), 1.0)

    def test_validation(self):
        with pytest.raises(DomainError):
            CosPower(Fraction(0), 3)
        with pytest.raises(DomainError):
            CosPower(Fraction(1), 0)

    @pytest.mark.parametrize("n", [1, 5, 40])
    def test_period_integral_matches_quadrature(self, n):
        f = CosPower(Fraction(41, 40), n)
        assert f.period_integral() == pytest.approx(integrate_sampled(f, 0.0, 41 / 40).value, rel=1e-9)

    def test_period_integral_stays_finite_for_large_powers(self):
        assert 0 < CosPower(Fraction(1), 10**6).period_integral() < 1e-2


def test_simple_handles():
    assert Cosine(2.0)(0.25) == pytest.approx(-1.0)
    assert Gaussian(0.5)(0.5) == pytest.approx(np.exp(-1.0))
    np.testing.assert_array_equal(Constant(3.0)(np.zeros(4)), [3.0] * 4)
    with pytest.raises(DomainError):
        Gaussian(0.0)


def test_cosine_square():
    f = CosineSquare((1.0, 1.0), 4.0)
    assert f(0.0) == pytest.approx(4.0)
    assert f(2.0) == pytest.approx(0.0, abs=1e-15)
    assert f.nonnegative_coefficients
    assert not CosineSquare((1.0, -0.5), 4.0).nonnegative_coefficients
    with pytest.raises(DomainError):
        CosineSquare((), 4.0)


def test_product_of_handle_and_piecewise_function():
    f = Gaussian() * pl_triangle()
    assert isinstance(f, Product)
    assert f(0.5) == pytest.approx(0.5 * np.exp(-0.25))
    assert "piecewise linear" in describe(f)


class TestSampledTable:
    def test_half_table_is_read_as_even(self, tmp_path):
        path = tmp_path / "samples.csv"
        path.write_text("x,f\n1,0\n0,1\n")
        f = SampledTable.from_csv(path)
        assert f.is_half_table
        assert f(-0.25) == pytest.approx(0.75)
        assert f(0.25) == pytest.approx(0.75)
        assert f(2.0) == 0.0

    def test_full_table(self):
        f = SampledTable((-1.0, 0.0, 2.0), (0.0, 1.0, 0.0))
        assert not f.is_half_table
        assert f(1.0) == pytest.approx(0.5)
        assert f(-0.5) == pytest.approx(0.5)

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1\n1,oops\n")
        with pytest.raises(DomainError):
            SampledTable.from_csv(path)

    def test_abscissae_must_increase(self):
        with pytest.raises(DomainError):
            SampledTable((0.0, 0.0), (1.0, 1.0))
