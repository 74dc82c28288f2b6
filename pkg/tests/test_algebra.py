import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hyperseries import corpus
from hyperseries.algebra import (InsufficientDepthError, NotInvertibleError,
                                 add, cauchy_product, coeff_ring_ops, compose,
                                 derive, identity_coefficients, integrate,
                                 reciprocal_div, recenter, reverse, scalar_mul)
from hyperseries.nets import ConfigError, GenNum
from hyperseries.numerics import as_mpf, working_precision
from hyperseries.series import (HpsCoefficients, check_strong_eq,
                                make_series, radius, series_limit)


def column(*values):
    return HpsCoefficients.from_column([Fraction(v) for v in values])


def padded(values, n_max):
    values = list(values) + [Fraction(0)] * (n_max + 1 - len(values))
    return HpsCoefficients.from_column(values)


class TestScalarMul:
    def test_zero_scalar(self, grid, rho):
        out = scalar_mul(GenNum.constant(0, grid), corpus.geometric_coeffs(),
                         grid, rho, n_max=16)
        assert all(v == 0 for v in out.column_values(16))

    def test_linearity_at_half(self, grid, rho, sigma):
        doubled = scalar_mul(GenNum.constant(2, grid),
                             corpus.geometric_coeffs(), grid, rho, n_max=300)
        series = make_series(doubled, GenNum.constant(0, grid), rho, sigma,
                             grid)
        limit = series_limit(series, GenNum.constant(Fraction(1, 2), grid),
                             q_target=10)
        with working_precision(grid.precision):
            assert abs(limit.values[-1] - 4) <= grid.points[-1] ** 8

    def test_witness_offset_grows(self, grid, rho):
        big = scalar_mul(GenNum.from_expr("rho^(-1)", grid, rho),
                         corpus.geometric_coeffs(), grid, rho, n_max=64)
        assert big.weak_witness == (0, 1)

    def test_non_moderate_scalar_rejected(self, grid, rho):
        with pytest.raises(ConfigError):
            scalar_mul(GenNum.from_expr("rho^(-(1/eps))", grid, rho),
                       corpus.geometric_coeffs(), grid, rho, n_max=16)


class TestAdd:
    def test_additive_identity(self, grid, rho):
        ones = corpus.geometric_coeffs()
        out = add(ones, HpsCoefficients.zeros(64), grid, rho, n_max=64)
        assert out.column_values(64) == ones.materialize(64, grid, rho).column_values(64)

    def test_sum_of_limits(self, grid, rho, sigma):
        mixed = add(corpus.geometric_coeffs(), corpus.exponential_coeffs(),
                    grid, rho, n_max=300)
        series = make_series(mixed, GenNum.constant(0, grid), rho, sigma, grid)
        limit = series_limit(series, GenNum.constant(Fraction(1, 2), grid),
                             q_target=12)
        with working_precision(grid.precision):
            expected = 2 + mpmath.exp(mpf(1) / 2)
            assert abs(limit.values[-1] - expected) <= mpf("1e-20")

    def test_cancellation_gives_zero_family(self, grid, rho):
        ones = corpus.geometric_coeffs()
        minus = HpsCoefficients.from_expr("-1")
        out = add(ones, minus, grid, rho, n_max=300)
        assert all(v == 0 for v in out.column_values(300))
        estimate = radius(out, rho, grid)
        assert all(mpmath.isinf(v) for v in estimate.r.values)

    def test_radius_at_least_min(self, grid, rho):
        a = corpus.geometric_coeffs()       # r = 1
        b = corpus.doubling_coeffs()        # r = 1/2
        out = add(a, b, grid, rho, n_max=300)
        estimate = radius(out, rho, grid)
        # ratios of 1 + 2^n converge to 2 exponentially, not polynomially,
        # so the extrapolated value carries the residual of the deepest node
        with working_precision(grid.precision):
            for v in estimate.r.values:
                assert v >= mpf("0.5") * (1 - mpf("1e-30"))


class TestCauchyProduct:
    def test_ones_squared(self, grid, rho):
        ones = corpus.geometric_coeffs()
        squared = cauchy_product(ones, ones, 64, grid, rho)
        assert squared.column_values(64) == [Fraction(n + 1) for n in range(65)]

    def test_annihilator(self, grid, rho):
        out = cauchy_product(corpus.geometric_coeffs(),
                             HpsCoefficients.zeros(32), 32, grid, rho)
        assert all(v == 0 for v in out.column_values(32))

    def test_product_limit(self, grid, rho, sigma):
        ones = corpus.geometric_coeffs()
        squared = cauchy_product(ones, ones, 256, grid, rho)
        series = make_series(squared, GenNum.constant(0, grid), rho, sigma,
                             grid)
        limit = series_limit(series, GenNum.constant(Fraction(1, 2), grid),
                             q_target=8)
        with working_precision(grid.precision):
            for i in grid.tail:
                assert abs(limit.values[i] - 4) <= grid.points[i] ** 4


class TestDivision:
    def test_geometric_reciprocal(self, grid, rho):
        a = padded([1], 64)
        b = padded([1, -1], 64)
        out = reciprocal_div(a, b, 64, grid, rho)
        assert all(v == 1 for v in out.column_values(64))

    def test_self_division(self, grid, rho):
        b = padded([1, Fraction(1, 2), Fraction(1, 3)], 32)
        out = reciprocal_div(b, b, 32, grid, rho)
        expected = [Fraction(1)] + [Fraction(0)] * 32
        assert out.column_values(32) == expected

    def test_exponential_reciprocal(self, grid, rho):
        a = padded([1], 48)
        b = HpsCoefficients.from_column(
            [Fraction(1, math.factorial(n)) for n in range(49)])
        out = reciprocal_div(a, b, 48, grid, rho)
        expected = [Fraction((-1) ** n, math.factorial(n)) for n in range(49)]
        assert out.column_values(48) == expected

    def test_round_trip(self, grid, rho):
        rng = random.Random(20240817)
        a, b = corpus.random_division_pair(rng, 48)
        d = reciprocal_div(a, b, 48, grid, rho)
        back = cauchy_product(d, b, 48, grid, rho)
        assert check_strong_eq(back, a, rho, grid, n_max=48).passed

    def test_tiny_leading_coefficient_rejected(self, grid, rho):
        b = HpsCoefficients.from_expr("rho^10 + 0*n")
        a = padded([1], 16)
        with pytest.raises(NotInvertibleError):
            reciprocal_div(a, b.materialize(16, grid, rho), 16, grid, rho,
                           m_max=5)


class TestCompose:
    def test_outer_identity(self, grid, rho):
        ident = identity_coefficients(16)
        b = padded([0, 1, 2, 3], 16)
        out = compose(ident, b, 16, grid, rho)
        assert out.column_values(16) == b.column_values(16)

    def test_inner_identity(self, grid, rho):
        a = padded([5, 1, 2, 3], 16)
        out = compose(a, identity_coefficients(16), 16, grid, rho)
        assert out.column_values(16) == a.column_values(16)

    def test_associativity_on_random_families(self, grid, rho):
        rng = random.Random(99)
        for _ in range(3):
            def triangular():
                rows = [Fraction(0), Fraction(rng.randrange(1, 5))]
                rows += [Fraction(rng.randrange(-8, 9), 4) for _ in range(15)]
                return HpsCoefficients.from_column(rows)
            a, b, c = triangular(), triangular(), triangular()
            left = compose(compose(a, b, 16, grid, rho), c, 16, grid, rho)
            right = compose(a, compose(b, c, 16, grid, rho), 16, grid, rho)
            assert check_strong_eq(left, right, rho, grid, n_max=16).passed


class TestReversion:
    def test_identity_inverts_to_identity(self, grid, rho):
        out = reverse(identity_coefficients(12), 12, grid, rho)
        assert out.column_values(12) == identity_coefficients(12).column_values(12)

    def test_catalan_signs(self, grid, rho):
        quadratic = padded([0, 1, 1], 16)
        out = reverse(quadratic, 16, grid, rho)
        head = out.column_values(6)
        assert head == [Fraction(v) for v in (0, 1, -1, 2, -5, 14, -42)]

    def test_flat_slope_rejected(self, grid, rho):
        flat = HpsCoefficients.from_expr("rho^10 * n")
        with pytest.raises(NotInvertibleError):
            reverse(flat.materialize(12, grid, rho), 12, grid, rho, m_max=5)


class TestDeriveIntegrate:
    def test_exponential_fixed_point(self, grid, rho):
        out = derive(corpus.exponential_coeffs(), grid, rho)
        expected = [Fraction(1, math.factorial(n)) for n in range(20)]
        assert out.materialize(19, grid, rho).column_values(19) == expected

    def test_derive_of_ones(self, grid, rho):
        out = derive(corpus.geometric_coeffs(), grid, rho)
        values = out.materialize(10, grid, rho).column_values(10)
        assert values == [Fraction(n + 1) for n in range(11)]

    def test_log_series_from_integration(self, grid, rho):
        out = integrate(corpus.geometric_coeffs(), grid, rho, n_max=32)
        values = out.column_values(32)
        assert values[0] == 0
        assert values[1:] == [Fraction(1, n) for n in range(1, 33)]

    def test_round_trip_identity(self, grid, rho):
        base = corpus.doubling_coeffs().materialize(40, grid, rho)
        back = derive(integrate(base, grid, rho, n_max=41), grid, rho)
        assert back.column_values(40) == base.column_values(40)

    def test_integral_limit_is_log_two(self, grid, rho, sigma):
        anti = integrate(corpus.geometric_coeffs(), grid, rho, n_max=400)
        series = make_series(anti, GenNum.constant(0, grid), rho, sigma, grid)
        limit = series_limit(series, GenNum.constant(Fraction(1, 2), grid),
                             q_target=12)
        with working_precision(grid.precision):
            assert abs(limit.values[-1] - mpmath.log(2)) <= mpf("1e-22")


class TestRecenter:
    def test_same_center_is_identity(self, grid, rho, sigma):
        series = corpus.build_series("geometric", grid, rho, sigma)
        out = recenter(series, GenNum.constant(0, grid), 12, 200, check=False)
        materialized = out.materialize(12, grid, rho)
        base = series.coeffs.materialize(12, grid, rho)
        assert check_strong_eq(materialized, base, rho, grid, n_max=12).passed

    def test_geometric_recentred_at_half(self, grid, rho, sigma):
        series = corpus.build_series("geometric", grid, rho, sigma)
        out = recenter(series, GenNum.constant(Fraction(1, 2), grid), 8, 420)
        with working_precision(grid.precision):
            for n in range(9):
                row = out.rows[n]
                values = row if isinstance(row, tuple) else [row]
                for v in values:
                    assert abs(as_mpf(v, grid.precision) - 2 ** (n + 1)) \
                        <= mpf("1e-60")

    def test_exponential_recentred_at_one(self, grid, rho, sigma):
        series = corpus.build_series("exponential", grid, rho, sigma)
        out = recenter(series, GenNum.constant(1, grid), 8, 140, check=False)
        with working_precision(grid.precision):
            for n in range(9):
                row = out.rows[n]
                values = row if isinstance(row, tuple) else [row]
                expected = mpmath.e / mpmath.factorial(n)
                for v in values:
                    assert abs(as_mpf(v, grid.precision) - expected) \
                        <= mpf("1e-30")

    def test_uncontrolled_tail_rejected(self, grid, rho, sigma):
        series = corpus.build_series("geometric", grid, rho, sigma)
        with pytest.raises(InsufficientDepthError):
            recenter(series, GenNum.constant(Fraction(1, 2), grid), 8, 30,
                     check=False)


class TestCoeffRing:
    def test_additive_unit(self, grid, rho):
        out = coeff_ring_ops(corpus.geometric_coeffs(),
                             HpsCoefficients.zeros(64), grid, rho, n_max=64)
        assert all(v == 1 for v in out["sum"].column_values(64))

    def test_pointwise_product_doubles_witness(self, grid, rho):
        fam = HpsCoefficients.from_expr("rho^(-(n*1))")
        out = coeff_ring_ops(fam, fam, grid, rho, n_max=64)
        assert out["product"].weak_witness == (2, 0)

    def test_congruence_under_negligible_perturbation(self, grid, rho):
        base = corpus.geometric_coeffs()
        moved = HpsCoefficients.from_expr("1 + rho^((n+1)/eps)")
        lhs = coeff_ring_ops(base, base, grid, rho, n_max=48)["product"]
        rhs = coeff_ring_ops(moved, base, grid, rho, n_max=48)["product"]
        assert check_strong_eq(lhs, rhs, rho, grid, n_max=48).passed


class TestCauchyConsistencyWithLimits:
    def test_product_of_limits_matches(self, grid, rho, sigma):
        # product series evaluated inside both balls equals the product of
        # the factor series values
        a = corpus.geometric_coeffs()
        b = corpus.exponential_coeffs()
        prod = cauchy_product(a, b, 300, grid, rho)
        series = make_series(prod, GenNum.constant(0, grid), rho, sigma, grid)
        x = GenNum.constant(Fraction(1, 3), grid)
        combined = series_limit(series, x, q_target=12)
        with working_precision(grid.precision):
            expected = (1 / (1 - mpf(1) / 3)) * mpmath.exp(mpf(1) / 3)
            assert abs(combined.values[-1] - expected) <= mpf("1e-20")
