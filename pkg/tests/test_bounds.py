"""Tests for the closed-form bounds; every comparison is exact."""
import math
import random
from fractions import Fraction

import pytest

from pdextremal.bounds import (
    BOUND_CSV_COLUMNS, argmin_phi, bound_report, construction_params, gorbachev_constant, lower_bounds, phi, phi_scan,
    right_limit, upper_bound
)
from pdextremal.errors import DomainError

F = Fraction


class TestLowerBounds:
    @pytest.mark.parametrize(
        "ell, expected",
        [(F(3, 2), (3, 3)), (F(2), (3, 4)), (F(1, 2), (1, 1)), (F(1), (1, 1)), (F(7, 3), (5, 5))],
    )
    def test_values(self, ell, expected):
        assert lower_bounds(ell) == expected

    @pytest.mark.parametrize("k", range(2, 11))
    def test_integer_ell(self, k):
        assert lower_bounds(k) == (2 * k - 1, 2 * k)

    def test_nonpositive_ell(self):
        with pytest.raises(DomainError):
            lower_bounds(0)


class TestUpperBound:
    def test_two(self):
        assert upper_bound(2) == (5, 5)

    def test_three_halves(self):
        assert upper_bound(F(3, 2)) == (4, 4)

    def test_strict_below_simple_form(self):
        upper, simple = upper_bound(F(5, 4))
        assert upper == F(24, 7)
        assert simple == 4

    @pytest.mark.parametrize("k", range(1, 11))
    def test_integer_collapse(self, k):
        assert upper_bound(k)[0] == 2 * k + 1

    def test_below_one(self):
        with pytest.raises(DomainError):
            upper_bound(F(1, 2))

    def test_reference_bound_at_two(self):
        assert gorbachev_constant() == pytest.approx(math.pi**2)
        assert upper_bound(2)[0] < gorbachev_constant()

    @pytest.mark.parametrize("k", range(1, 6))
    @pytest.mark.parametrize("eps", [F(1, 10), F(1, 100), F(1, 1000)])
    def test_right_limit_squeeze(self, k, eps):
        upper = upper_bound(k + eps)[0]
        assert 2 * k + 1 <= upper
        assert upper - (2 * k + 1) <= (2 * k + 1) * eps / (k + 1 - eps)

    def test_monotone(self):
        grid = [1 + F(i, 8) for i in range(33)]
        uppers = [upper_bound(ell)[0] for ell in grid]
        lowers = [lower_bounds(ell) for ell in grid]
        assert uppers == sorted(uppers)
        assert [g for g, _ in lowers] == sorted(g for g, _ in lowers)
        assert [c for _, c in lowers] == sorted(c for _, c in lowers)


class TestPhi:
    @pytest.mark.parametrize("k, expected", [(4, 5), (3, 5), (2, 6)])
    def test_values_at_two(self, k, expected):
        assert phi(k, 2) == expected

    def test_outside_admissible_range(self):
        with pytest.raises(DomainError):
            phi(1, 2)
        with pytest.raises(DomainError):
            phi(5, 2)

    def test_scan(self):
        assert phi_scan(2) == [(2, 6), (3, 5), (4, 5)]

    @pytest.mark.parametrize("ell, expected", [(F(2), 4), (F(5, 4), 2), (F(101, 100), 2)])
    def test_argmin(self, ell, expected):
        assert argmin_phi(ell) == expected

    def test_argmin_needs_ell_above_one(self):
        with pytest.raises(DomainError):
            argmin_phi(1)

    def test_brute_force_agrees_with_closed_form(self):
        rng = random.Random(2024)
        for _ in range(200):
            denominator = rng.randint(1, 50)
            ell = F(rng.randint(denominator + 1, 20 * denominator), denominator)
            assert phi(argmin_phi(ell), ell) == upper_bound(ell)[0]


class TestConstruction:
    @pytest.mark.parametrize(
        "ell, expected", [(F(2), (4, 1)), (F(5, 4), (2, F(7, 8))), (F(3, 2), (3, 1)), (F(1), (2, 1))]
    )
    def test_params(self, ell, expected):
        assert construction_params(ell) == expected

    @pytest.mark.parametrize("ell", [F(5, 4), F(3, 2), F(2), F(11, 4), F(4), F(101, 100), F(37, 7)])
    def test_inversion(self, ell):
        k, p = construction_params(ell)
        assert 0 < p <= 1
        assert ((k + 1) * (2 - p) - p) / 2 == ell
        assert phi(k, ell) == upper_bound(ell)[0]

    def test_right_limit(self):
        assert [right_limit(k) for k in (1, 2, 10)] == [3, 5, 21]
        with pytest.raises(DomainError):
            right_limit(0)


class TestReport:
    def test_two(self):
        report = bound_report(2)
        assert (report.lower_G, report.lower_C, report.upper, report.upper_simple) == (3, 4, 5, 5)
        assert (report.k_opt, report.p_opt, report.k_tie) == (4, 1, 3)
        assert report.integer_ell
        assert report.right_limit == 5

    def test_three_halves(self):
        report = bound_report(F(3, 2))
        assert (report.lower_G, report.lower_C, report.upper, report.k_opt, report.p_opt) == (3, 3, 4, 3, 1)
        assert not report.integer_ell

    def test_small_ell_is_exact(self):
        report = bound_report(F(1, 2))
        assert report.exact_value == 1
        assert report.k_opt is None

    def test_csv_row(self):
        row = bound_report(2).csv_row()
        assert tuple(row) == BOUND_CSV_COLUMNS
        assert row["upper"] == "5/1"
        assert row["integer_ell"] == "true"
        assert row["exact_value"] == ""
