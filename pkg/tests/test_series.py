from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from hyperseries import corpus
from hyperseries.nets import (ConfigError, EpsGrid, Gauge, GenNum,
                              hypernat_constant, hypernat_from_expr,
                              is_moderate, ext_eq)
from hyperseries.numerics import as_mpf, working_precision
from hyperseries.series import (DivergentSeriesError,
                                HpsCoefficients, MissingWitnessError,
                                ShortcutPreconditionError, ball_guarantee,
                                check_strong_eq, check_weak_moderate,
                                classify_radius, converge_shortcut,
                                converges_at, derivative_net_moderate,
                                derived_coefficients, eventually_bounded,
                                hyperfinite_sum, is_formal_hps, make_series,
                                radius, series_limit)


@pytest.fixture(scope="module")
def geometric(grid, rho, sigma):
    return corpus.build_series("geometric", grid, rho, sigma)


@pytest.fixture(scope="module")
def exponential(grid, rho, sigma):
    return corpus.build_series("exponential", grid, rho, sigma)


class TestWeakModerate:
    def test_constant_family(self, grid, rho):
        verdict = check_weak_moderate(corpus.geometric_coeffs(), rho, grid)
        assert verdict.passed and (verdict.witness["Q"],
                                   verdict.witness["R"]) == (0, 0)

    def test_factorial_family_rejected(self, grid, rho):
        verdict = check_weak_moderate(
            HpsCoefficients.from_expr("factorial(n)"), rho, grid)
        assert verdict.failed
        assert "slope" in verdict.notes

    def test_doubling_family(self, grid, rho):
        verdict = check_weak_moderate(corpus.doubling_coeffs(), rho, grid)
        assert verdict.passed and verdict.witness["Q"] == 1

    def test_zero_class_family(self, grid, rho):
        verdict = check_weak_moderate(corpus.zero_class_coeffs(), rho, grid)
        assert verdict.passed and (verdict.witness["Q"],
                                   verdict.witness["R"]) == (0, 0)

    def test_short_table_rejected(self, grid, rho):
        short = HpsCoefficients.from_column([Fraction(1)] * 10)
        with pytest.raises(ConfigError):
            check_weak_moderate(short, rho, grid, n_max=64)


class TestStrongEq:
    def test_identical(self, grid, rho):
        ones = corpus.geometric_coeffs()
        assert check_strong_eq(ones, ones, rho, grid, n_max=32).passed

    def test_strongly_negligible_perturbation(self, grid, rho):
        base = corpus.geometric_coeffs()
        moved = HpsCoefficients.from_expr("1 + rho^((n+1)/eps)")
        assert check_strong_eq(base, moved, rho, grid, n_max=32).passed

    def test_plain_gauge_offset_fails(self, grid, rho):
        base = corpus.geometric_coeffs()
        moved = HpsCoefficients.from_expr("1 + rho")
        verdict = check_strong_eq(base, moved, rho, grid, n_max=32)
        assert verdict.failed
        cell = verdict.counterexample
        # rho <= rho^(n q + r) already fails once n q + r exceeds 1
        assert cell["q"] * cell["n"] + cell["r"] >= 2


class TestRadius:
    def test_geometric_exact(self, grid, rho):
        estimate = radius(corpus.geometric_coeffs(), rho, grid)
        assert all(v == 1 for v in estimate.r.values)

    def test_doubling_exact(self, grid, rho):
        estimate = radius(corpus.doubling_coeffs(), rho, grid)
        assert all(v == mpf("0.5") for v in estimate.r.values)

    def test_exponential_infinite(self, grid, rho):
        estimate = radius(corpus.exponential_coeffs(), rho, grid)
        assert all(mpmath.isinf(v) for v in estimate.r.values)

    def test_zero_class_limsup(self, grid, rho):
        estimate = radius(corpus.zero_class_coeffs(), rho, grid,
                          window=(16, 256))
        with working_precision(grid.precision + 16):
            for i, point in enumerate(grid.points):
                target = point ** (1 / point)
                rel = abs(estimate.limsup.values[i] - target) / target
                assert rel <= mpf("1e-30")

    def test_all_zero_rows(self, grid, rho):
        estimate = radius(HpsCoefficients.zeros(300), rho, grid)
        assert all(mpmath.isinf(v) for v in estimate.r.values)
        assert set(estimate.methods) == {"all-zero"}

    def test_window_validation(self, grid, rho):
        with pytest.raises(ConfigError):
            radius(corpus.geometric_coeffs(), rho, grid, window=(16, 24))

    def test_positivity_from_witness(self, grid, rho):
        # weakly moderate coefficients keep the radius above rho^Q
        rho_values = rho.values_on(grid)
        for fam in (corpus.geometric_coeffs(), corpus.doubling_coeffs(),
                    corpus.exponential_coeffs()):
            verdict = check_weak_moderate(fam, rho, grid)
            estimate = radius(fam, rho, grid)
            q = verdict.witness["Q"]
            for i in grid.tail:
                value = estimate.r.values[i]
                assert mpmath.isinf(value) or \
                    value >= rho_values[i] ** q * (1 - mpf(2) ** -200)


class TestClassify:
    def test_geometric_moderate(self, grid, rho):
        classification = classify_radius(
            radius(corpus.geometric_coeffs(), rho, grid), rho, grid)
        assert set(classification.classes) == {"moderate"}
        assert classification.p_m == 0

    def test_exponential_beyond(self, grid, rho):
        classification = classify_radius(
            radius(corpus.exponential_coeffs(), rho, grid), rho, grid)
        assert classification.all_beyond_tested_powers
        assert classification.p_m is None


class TestHyperfiniteSum:
    def test_geometric_identity(self, grid, rho, sigma, geometric):
        drho = GenNum.from_expr("rho", grid, rho)
        upper = hypernat_from_expr("1/eps", sigma, grid)
        sums = hyperfinite_sum(geometric, drho, upper)
        closed = GenNum.constant(1, grid) / (GenNum.constant(1, grid) - drho)
        assert ext_eq(sums, closed, rho, grid, q_max=6).passed

    def test_zero_upper_gives_head(self, grid, rho, sigma, exponential):
        upper = hypernat_constant(0, grid)
        sums = hyperfinite_sum(exponential, GenNum.constant(1, grid), upper)
        assert all(v == 1 for v in sums.values)

    def test_exponential_partial_vs_e(self, grid, rho, sigma, exponential):
        upper = hypernat_constant(30, grid)
        sums = hyperfinite_sum(exponential, GenNum.constant(1, grid), upper)
        with working_precision(grid.precision):
            err = abs(sums.values[0] - mpmath.e)
            assert err < mpf("1e-32")


class TestFormalHps:
    def test_geometric_at_half(self, grid, geometric):
        half = GenNum.constant(Fraction(1, 2), grid)
        assert is_formal_hps(geometric, half).passed

    def test_inverse_squares_at_two_with_tiny_gauge(self, rho):
        # summing 2^n/(n+1)^2 with truncation indices from a brutally small
        # companion gauge: block sums blow past every moderate bound
        small = EpsGrid.decades(1, 4)
        tiny = Gauge.from_text("exp(-exp(1/eps))", "sigma")
        fam = HpsCoefficients.from_expr("1/(n+1)^2")
        series = make_series(fam, GenNum.constant(0, small), rho, tiny, small)
        two = GenNum.constant(2, small)
        assert is_formal_hps(series, two).failed

    def test_exponential_at_log_scale(self, grid, rho, exponential):
        x = GenNum.from_expr("-log(rho)", grid, rho)
        assert is_formal_hps(exponential, x).passed


class TestSeriesLimit:
    def test_geometric_closed_form(self, grid, geometric):
        half = GenNum.constant(Fraction(1, 2), grid)
        limit = series_limit(geometric, half, q_target=8)
        with working_precision(grid.precision):
            for i in grid.tail:
                assert abs(limit.values[i] - 2) <= grid.points[i] ** 4

    def test_exponential_at_log_scale(self, grid, rho, exponential):
        x = GenNum.from_expr("-log(rho)", grid, rho)
        limit = series_limit(exponential, x, q_target=30)
        with working_precision(grid.precision):
            for i in range(len(grid)):
                target = 1 / grid.points[i]
                assert abs(limit.values[i] - target) / target <= mpf("1e-20")

    def test_divergent_at_one(self, grid, geometric):
        with pytest.raises(DivergentSeriesError):
            series_limit(geometric, GenNum.constant(1, grid), n_cap=5000)


class TestDerivativeNets:
    def test_geometric_derivatives_at_half(self, grid, rho, sigma, geometric):
        half = GenNum.constant(Fraction(1, 2), grid)
        verdict = derivative_net_moderate(geometric, half, k_max=3)
        assert verdict.passed
        # closed form: k-th derivative value is k! / (1-x)^(k+1)
        with working_precision(grid.precision):
            for k in (1, 2, 3):
                derived = make_series(derived_coefficients(geometric.coeffs, k),
                                      geometric.center, rho, sigma, grid)
                values = series_limit(derived, half, q_target=40)
                expected = mpmath.factorial(k) * 2 ** (k + 1)
                assert abs(values.values[0] - expected) <= mpf("1e-35")

    def test_geometric_near_boundary_small_grid(self, rho, sigma):
        # at x = 1 - rho the first derivative net is exactly 1/rho^2
        small = EpsGrid.decades(1, 2, tail_start=0)
        series = corpus.build_series("geometric", small, rho, sigma)
        x = GenNum.from_expr("1 - rho", small, rho)
        derived = make_series(derived_coefficients(series.coeffs, 1),
                              series.center, rho, sigma, small)
        values = series_limit(derived, x, q_target=8, n_cap=10 ** 6)
        verdict = is_moderate(values, rho, small, n_max=4)
        assert verdict.passed and verdict.witness["N"] == 2


class TestConvergesAt:
    def test_geometric_at_half(self, geometric, grid):
        half = GenNum.constant(Fraction(1, 2), grid)
        report = converges_at(geometric, half)
        assert report.overall.passed

    def test_exponential_split(self, exponential, grid, rho):
        good = converges_at(exponential,
                            GenNum.from_expr("-log(rho)", grid, rho))
        assert good.overall.passed
        bad = converges_at(exponential,
                           GenNum.from_expr("rho^(-1)", grid, rho))
        assert bad.overall.failed and bad.cond_limit.failed

    def test_report_conjunction(self, geometric, grid):
        half = GenNum.constant(Fraction(1, 2), grid)
        report = converges_at(geometric, half)
        parts = [report.cond_radius, report.cond_formal, report.cond_limit,
                 report.cond_derivs]
        assert report.overall.passed == all(p.passed for p in parts)


class TestEventuallyBounded:
    def test_geometric_at_half(self, geometric, grid):
        half = GenNum.constant(Fraction(1, 2), grid)
        report = eventually_bounded(geometric, half)
        assert report.verdict.passed and report.n_start == 0

    def test_delta_inside_scale(self, grid, rho, sigma, env):
        series = env.series("delta")
        drho = GenNum.from_expr("rho", grid, rho)
        report = eventually_bounded(series, drho)
        assert report.verdict.passed
        witness = report.verdict.witness
        assert (witness["p"], witness["kappa"]) == (1, 1)  # bound is b itself

    def test_delta_outside_scale_fails(self, grid, rho, sigma, env):
        series = env.series("delta")
        one = GenNum.constant(Fraction(1, 2), grid)
        report = eventually_bounded(series, one)
        assert report.verdict.failed


class TestShortcut:
    def test_geometric_ratio(self, geometric, grid, rho):
        half = GenNum.constant(Fraction(1, 2), grid)
        ref = GenNum.constant(Fraction(3, 4), grid)
        verdict = converge_shortcut(geometric, half, ref)
        assert verdict.passed
        # majorant ratio h = (1/2) / (3/4) = 2/3 pointwise
        with working_precision(grid.precision):
            assert verdict.witness["h"][0].startswith("0.666666666")

    def test_strictness_enforced(self, geometric, grid):
        ref = GenNum.constant(Fraction(3, 4), grid)
        with pytest.raises(ShortcutPreconditionError) as err:
            converge_shortcut(geometric, ref, ref)
        assert err.value.kind == "not-strictly-inside"

    def test_exponential_inside_log_ball(self, exponential, grid, rho):
        ref = GenNum.from_expr("-log(rho)", grid, rho)
        one = GenNum.constant(1, grid)
        assert converge_shortcut(exponential, one, ref).passed

    def test_monotone_nesting(self, geometric, grid):
        ref = GenNum.constant(Fraction(3, 4), grid)
        for inner in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
            verdict = converge_shortcut(geometric,
                                        GenNum.constant(inner, grid), ref)
            assert verdict.passed


class TestSharpBoundOfSummands:
    def test_summands_moderate_where_membership_holds(self, grid, rho, sigma,
                                                      geometric, exponential):
        # once membership passes, the summand at any sampled hypernatural
        # index is a moderate net
        from hyperseries.nets import sigma_ladder
        from hyperseries.series import coeff_accessor
        cases = [(geometric, GenNum.constant(Fraction(1, 2), grid)),
                 (exponential, GenNum.from_expr("-log(rho)", grid, rho))]
        for series, x in cases:
            assert converges_at(series, x).overall.passed
            acc = coeff_accessor(series.coeffs, grid, series.rho)
            for rung in sigma_ladder(series.sigma, grid, js=(1, 2)):
                with working_precision(grid.precision):
                    values = []
                    for i in range(len(grid)):
                        n = rung.values[i]
                        y = as_mpf(x.values[i], grid.precision) - \
                            as_mpf(series.center.values[i], grid.precision)
                        values.append(as_mpf(acc(n, i), grid.precision)
                                      * y ** n)
                term_net = GenNum(values=tuple(values), grid=grid)
                assert is_moderate(term_net, rho, grid).passed


class TestBallGuarantee:
    def test_needs_witness(self, grid, rho):
        bare = HpsCoefficients.from_expr("1")
        with pytest.raises(MissingWitnessError):
            ball_guarantee(bare, rho, grid)

    def test_geometric_ball_is_one(self, grid, rho, geometric):
        ball = ball_guarantee(geometric.coeffs, rho, grid)
        assert all(v == 1 for v in ball.values)

    def test_bound_holds_on_the_ball(self, grid, rho, sigma, geometric):
        ball = ball_guarantee(geometric.coeffs, rho, grid)
        x = GenNum(values=ball.values, grid=grid)
        report = eventually_bounded(geometric, x)
        assert report.verdict.passed

    def test_delta_ball_is_drho(self, grid, rho, env):
        series = env.series("delta")
        ball = ball_guarantee(series.coeffs, rho, grid)
        rho_values = rho.values_on(grid)
        assert all(ball.values[i] == rho_values[i] for i in range(len(grid)))
