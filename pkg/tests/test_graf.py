from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hyperseries import corpus
from hyperseries.graf import (DerivativeNet, InvalidMollifierError,
                              MollifierSpec, OutOfCheckableRangeError,
                              bump_value, delta_coeffs, delta_derivative_net,
                              delta_eval, flat_point_check, flat_point_values,
                              graf_check, make_mollifier,
                              nowhere_analytic_coeffs,
                              nowhere_analytic_reject, taylor_coeffs)
from hyperseries.nets import ConfigError, GenNum, is_negligible
from hyperseries.numerics import as_mpf, working_precision
from hyperseries.series import (HpsCoefficients, check_strong_eq,
                                check_weak_moderate, coeff_accessor,
                                make_series)


@pytest.fixture(scope="module")
def mollifier(grid, rho):
    return make_mollifier(grid, rho, b_exponent=1, n_max=96)


class TestBumpAndMoments:
    def test_bump_profile(self):
        with working_precision(128):
            assert bump_value(mpf(0), 128) == 1
            assert bump_value(mpf("0.4"), 128) == 1
            assert bump_value(mpf("1.2"), 128) == 0
            mid = bump_value(mpf("0.75"), 128)
            assert 0 < mid < 1
            assert bump_value(mpf("-0.75"), 128) == mid  # even

    def test_moment_invariants(self, mollifier):
        moments = mollifier.moments
        assert all(moments[n] == 0 for n in range(1, 97, 2))
        assert 0 < moments[0] <= 2
        assert all(abs(m) <= 2 for m in moments)
        evens = [moments[n] for n in range(0, 97, 2)]
        assert all(a > b for a, b in zip(evens, evens[1:]))

    def test_derivative_bound_from_zeroth_moment(self, mollifier):
        with working_precision(256):
            bound = mollifier.mu_deriv_bound()
            for n in range(0, 96, 2):
                assert abs(mollifier.mu_deriv_at_zero(n)) <= bound * (1 + mpf(2) ** -200)

    def test_bad_moments_rejected(self, grid, rho, mollifier):
        broken = list(mollifier.moments)
        broken[3] = mpf("0.25")
        bad = MollifierSpec(moments=tuple(broken), b=mollifier.b,
                            b_exponent=1, profile="broken", grid=grid)
        with pytest.raises(InvalidMollifierError):
            delta_coeffs(bad, 64, rho)


class TestDeltaFamily:
    def test_odd_entries_exactly_zero(self, grid, rho, mollifier):
        fam = delta_coeffs(mollifier, 96, rho)
        assert all(fam.rows[n] == 0 for n in range(1, 97, 2))

    def test_weak_witness_tracks_scale(self, grid, rho, mollifier):
        fam = delta_coeffs(mollifier, 96, rho)
        assert fam.weak_witness == (1, 1)

    def test_eval_at_zero(self, grid, rho, mollifier):
        zero = GenNum.constant(0, grid)
        values = delta_eval(mollifier, zero, rho)
        with working_precision(grid.precision):
            for i in range(len(grid)):
                expected = (1 / grid.points[i]) * mollifier.moments[0] \
                    / (2 * mpmath.pi)
                assert abs(values.values[i] - expected) <= expected * mpf("1e-50")

    def test_eval_out_of_range(self, grid, rho, mollifier):
        one = GenNum.constant(1, grid)
        with pytest.raises(OutOfCheckableRangeError):
            delta_eval(mollifier, one, rho)

    def test_derivative_net_matches_family(self, grid, rho, mollifier):
        net = delta_derivative_net(mollifier, k_max=32)
        fam = delta_coeffs(mollifier, 96, rho)
        zero = GenNum.constant(0, grid)
        acc = coeff_accessor(fam, grid, rho)
        with working_precision(grid.precision):
            for k in (0, 2, 6):
                values = net.eval_deriv(k, zero)
                fact = mpmath.factorial(k)
                for i in (0, 4):
                    expected = as_mpf(acc(k, i), grid.precision) * fact
                    got = values.values[i]
                    if expected == 0:
                        assert got == 0
                    else:
                        assert abs(got - expected) <= abs(expected) * mpf("1e-60")


class TestTaylorExtraction:
    def test_uniqueness_exact_families(self, grid, rho, sigma):
        for name in ("geometric", "doubling"):
            series = corpus.build_series(name, grid, rho, sigma)
            net = DerivativeNet.from_series(series, k_max=32)
            extracted, verdict = taylor_coeffs(net, series.center, 24, rho,
                                               grid)
            assert verdict.passed
            assert check_strong_eq(extracted, series.coeffs, rho, grid,
                                   n_max=24).passed

    def test_uniqueness_exponential_to_roundoff(self, grid, rho, sigma):
        series = corpus.build_series("exponential", grid, rho, sigma)
        net = DerivativeNet.from_series(series, k_max=32)
        extracted, verdict = taylor_coeffs(net, series.center, 24, rho, grid)
        assert verdict.passed
        acc = coeff_accessor(extracted, grid, rho)
        with working_precision(grid.precision):
            for n in range(25):
                expected = 1 / mpmath.factorial(n)
                got = as_mpf(acc(n, 0), grid.precision)
                assert abs(got - expected) <= expected * mpf("1e-70")

    def test_uniqueness_delta_to_roundoff(self, grid, rho, mollifier):
        net = delta_derivative_net(mollifier, k_max=32)
        zero = GenNum.constant(0, grid)
        extracted, verdict = taylor_coeffs(net, zero, 24, rho, grid)
        assert verdict.passed and verdict.witness["Q"] == 1
        fam = delta_coeffs(mollifier, 96, rho)
        acc_a = coeff_accessor(extracted, grid, rho)
        acc_b = coeff_accessor(fam, grid, rho)
        with working_precision(grid.precision):
            for n in range(25):
                for i in (1, 7):
                    a = as_mpf(acc_a(n, i), grid.precision)
                    b = as_mpf(acc_b(n, i), grid.precision)
                    if b == 0:
                        assert a == 0
                    else:
                        assert abs(a - b) <= abs(b) * mpf("1e-60")


class TestGrowthCheck:
    def test_series_backed_geometric_passes(self, grid, rho, sigma):
        series = corpus.build_series("geometric", grid, rho, sigma)
        net = DerivativeNet.from_series(series, k_max=40)
        zero = GenNum.constant(0, grid)
        witness = graf_check(net, zero, GenNum.constant(Fraction(1, 2), grid),
                             32, [zero, GenNum.constant(Fraction(1, 4), grid)],
                             rho, grid)
        assert witness.verdict.passed
        assert abs(witness.inv_r_exponent) <= 0.2

    def test_sample_outside_ball_rejected(self, grid, rho):
        net = DerivativeNet.from_uniform_expr("exp(x)", grid, rho)
        zero = GenNum.constant(0, grid)
        with pytest.raises(ConfigError):
            graf_check(net, zero, GenNum.constant(Fraction(1, 2), grid), 16,
                       [GenNum.constant(Fraction(1, 2), grid)], rho, grid)

    def test_factorial_growth_fails(self, grid, rho, sigma):
        series = make_series(HpsCoefficients.from_expr("factorial(n)"),
                             GenNum.constant(0, grid), rho, sigma, grid)
        net = DerivativeNet.from_series(series, k_max=70)
        zero = GenNum.constant(0, grid)
        witness = graf_check(net, zero, GenNum.from_expr("rho^6", grid, rho),
                             64, [zero, GenNum.from_expr("rho^8", grid, rho)],
                             rho, grid)
        assert witness.verdict.failed
        assert witness.inv_r_exponent is None


class TestFlatPoint:
    def test_negligible_at_gauge_scales(self, grid, rho):
        deep = grid.with_tail_start(2)
        for power in ("1/2", "1", "2"):
            x = GenNum.from_expr("rho^(%s)" % power, grid, rho)
            verdict = is_negligible(flat_point_values(x, grid), rho, deep,
                                    q_max=4)
            assert verdict.passed

    def test_direct_value_at_one(self, grid):
        one = GenNum.constant(1, grid)
        values = flat_point_values(one, grid)
        with working_precision(grid.precision):
            assert abs(values.values[0] - mpmath.exp(-1)) <= mpf("1e-70")

    def test_negative_side_is_zero(self, grid):
        minus = GenNum.constant(-1, grid)
        assert all(v == 0 for v in flat_point_values(minus, grid).values)

    def test_combined_check(self, grid, rho):
        assert flat_point_check(grid, rho).passed


class TestNowhereAnalytic:
    def test_rejection(self, grid, rho):
        assert nowhere_analytic_reject(grid, rho).passed

    def test_lower_bound_family_not_weakly_moderate(self, grid, rho):
        verdict = check_weak_moderate(nowhere_analytic_coeffs(), rho, grid)
        assert verdict.failed

    def test_control_family_accepted(self, grid, rho):
        verdict = check_weak_moderate(corpus.exponential_coeffs(), rho, grid)
        assert verdict.passed
