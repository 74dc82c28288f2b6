"""Factorial-growth analysis, Taylor extraction, and the canonical nets.

The central test: a family of smooth nets is locally representable by its
own coefficient series exactly when the derivatives obey a uniform bound
``|f^(n)(x)| <= C * n! / R^n`` on a ball, where C and R are themselves nets
(so 1/R may be an infinite quantity; its gauge exponent separates the
classically analytic case, 1/R finite, from the genuinely generalized one).

This module provides the witness search for that bound over a recorded
lattice of gauge powers, Taylor-coefficient extraction, and the worked
examples the package treats as canonical: the mollifier-based Dirac delta,
a smooth function with a flat point, and a nowhere-analytic growth family
that the admissibility check must reject.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from . import netexpr
from .nets import (FAIL, PASS, ConfigError, EpsGrid, Gauge, GenNum,
                   Verdict, combine_verdicts, is_negligible)
from .numerics import (GUARD_BITS, as_mpf, decimal_str, leq_with_slack,
                       working_precision)
from .series import (HpsCoefficients, HpsSeries, _series_limit_report,
                     check_weak_moderate, derived_coefficients, make_series)


class InvalidMollifierError(Exception):
    """Moment table violates the evenness/bound constraints of a bump."""


class OutOfCheckableRangeError(Exception):
    """Argument too large for the truncated moment series to control."""


# ---------------------------------------------------------------------------
# Derivative nets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DerivativeNet:
    """A net of smooth functions, presented through derivative evaluators.

    ``eval_deriv(k, x)`` returns the net of k-th derivatives at a
    generalized argument x.  Backings: a series (derivatives through the
    derived coefficient families), a single closed-form expression reused
    for every order (e.g. the exponential), or a mollifier scaled by an
    infinite factor (the Dirac delta embedding).
    """

    evaluator: Callable[[int, GenNum], GenNum]
    k_max: int
    label: str = ""

    def eval_deriv(self, k: int, x: GenNum) -> GenNum:
        if not 0 <= k <= self.k_max:
            raise ConfigError("derivative order %d outside 0..%d" % (k, self.k_max))
        return self.evaluator(k, x)

    @classmethod
    def from_series(cls, series: HpsSeries, k_max: int = 64,
                    q_target: int = 10, n_cap: int = 10 ** 6,
                    label: str = "") -> "DerivativeNet":
        def evaluate(k: int, x: GenNum) -> GenNum:
            coeffs = series.coeffs if k == 0 else derived_coefficients(series.coeffs, k)
            shifted = make_series(coeffs, series.center, series.rho,
                                  series.sigma, series.grid)
            report = _series_limit_report(shifted, x, q_target, n_cap)
            bad = [i for i, (_, status, _) in enumerate(report)
                   if status != "converged"]
            if bad:
                raise ConfigError("derivative series does not settle at grid "
                                  "indices %s" % bad)
            return GenNum(values=tuple(v for v, _, _ in report), grid=series.grid)

        return cls(evaluator=evaluate, k_max=k_max,
                   label=label or "series(%s)" % series.coeffs.label)

    @classmethod
    def from_uniform_expr(cls, text_or_expr, grid: EpsGrid, rho: Gauge,
                          k_max: int = 64, label: str = "") -> "DerivativeNet":
        """One expression in (eps, rho, x) serving every derivative order."""
        expr = (netexpr.parse(text_or_expr)
                if isinstance(text_or_expr, str) else text_or_expr)
        bad = netexpr.free_vars(expr) - {"eps", "rho", "x"}
        if bad:
            raise ConfigError("function net uses %s" % ", ".join(sorted(bad)))
        rho_values = rho.values_on(grid)

        def evaluate(_k: int, x: GenNum) -> GenNum:
            values = []
            for i in range(len(grid)):
                env = {"eps": grid.points[i], "rho": rho_values[i],
                       "x": as_mpf(x.values[i], grid.precision)}
                values.append(netexpr.eval_mpf(expr, env, grid.precision))
            return GenNum(values=tuple(values), grid=grid)

        return cls(evaluator=evaluate, k_max=k_max,
                   label=label or netexpr.to_text(expr))


# ---------------------------------------------------------------------------
# Mollifier and the Dirac delta
# ---------------------------------------------------------------------------


def bump_value(t: mpf, bits: int) -> mpf:
    """Even bump: 1 on [-1/2, 1/2], exp-based fall to 0 at +-1, 0 outside."""
    with working_precision(bits):
        t = abs(t)
        if t <= mpf(1) / 2:
            return mpf(1)
        if t >= 1:
            return mpf(0)
        s = (t - mpf(1) / 2) * 2  # in (0, 1)
        g_up = mpmath.exp(-1 / (1 - s))
        g_down = mpmath.exp(-1 / s)
        return g_up / (g_up + g_down)


@lru_cache(maxsize=None)
def _even_moment(n: int, bits: int) -> mpf:
    """m_n = integral of bump(t) t^n over [-1, 1] for even n (exact zero odd)."""
    with working_precision(bits + 48):
        plateau = (mpf(1) / 2) ** (n + 1) / (n + 1)
        ramp = mpmath.quad(lambda t: bump_value(t, bits + 48) * t ** n,
                           [mpf(1) / 2, mpf(1)])
        return +(2 * (plateau + ramp))


@dataclass(frozen=True)
class MollifierSpec:
    """Moment table of the bump plus the infinite scaling factor b.

    Stored derivative values use the real convention
    ``mu^(n)(0) = (-1)^(n/2) m_n / (2 pi)`` for even n and exactly zero for
    odd n; the bump profile is recorded for reproducibility.
    """

    moments: Tuple[mpf, ...]
    b: GenNum
    b_exponent: int
    profile: str
    grid: EpsGrid

    @property
    def n_max(self) -> int:
        return len(self.moments) - 1

    def mu_deriv_at_zero(self, n: int) -> mpf:
        if n > self.n_max:
            raise ConfigError("moments end at n=%d" % self.n_max)
        if n % 2 == 1:
            return mpf(0)
        with working_precision(self.grid.precision):
            sign = -1 if (n // 2) % 2 else 1
            return sign * self.moments[n] / (2 * mpmath.pi)

    def mu_deriv_bound(self) -> mpf:
        """Uniform bound on |mu^(k)(y)|: integral of the bump over 2 pi."""
        with working_precision(self.grid.precision):
            return self.moments[0] / (2 * mpmath.pi)

    def mu_series_at(self, k: int, y: mpf, tail_tol: str = "1e-40") -> mpf:
        """mu^(k)(y) through the moment series, with a factorial tail audit.

        Every derivative of the mollifier is bounded by the zeroth moment,
        so a raw factorial tail below ``tail_tol`` leaves all gauge-power
        comparisons in the package untouched.
        """
        bits = self.grid.precision
        with working_precision(bits):
            y = as_mpf(y, bits)
            top = self.n_max - k
            tail = abs(y) ** (top + 1) / mpmath.factorial(top + 1)
            if not tail <= mpf(tail_tol):
                raise OutOfCheckableRangeError(
                    "argument magnitude %s defeats the truncated moment series"
                    % decimal_str(abs(y), 64))
            total = mpf(0)
            power = mpf(1)
            for j in range(top + 1):
                mu = self.mu_deriv_at_zero(k + j)
                if mu != 0:
                    total += mu * power / mpmath.factorial(j)
                power *= y
            return total


def make_mollifier(grid: EpsGrid, rho: Gauge, b_exponent: int = 1,
                   n_max: int = 96) -> MollifierSpec:
    """Standard bump mollifier scaled by b = (1/rho)^b_exponent."""
    moments = []
    for n in range(n_max + 1):
        if n % 2 == 1:
            moments.append(mpf(0))
        else:
            moments.append(_even_moment(n, grid.precision))
    b = GenNum.from_expr("rho^(-%d)" % b_exponent, grid, rho)
    _validate_moments(moments)
    return MollifierSpec(moments=tuple(moments), b=b, b_exponent=b_exponent,
                         profile="even bump, support [-1,1], flat 1 on "
                                 "[-1/2,1/2], exp-based shoulders",
                         grid=grid)


def _validate_moments(moments) -> None:
    for n, m in enumerate(moments):
        if n % 2 == 1 and m != 0:
            raise InvalidMollifierError("odd moment %d is nonzero" % n)
        if abs(m) > 2:
            raise InvalidMollifierError("moment %d exceeds the support bound" % n)
    if not 0 < moments[0] <= 2:
        raise InvalidMollifierError("zeroth moment outside (0, 2]")


def delta_coeffs(m: MollifierSpec, n_max: int, rho: Gauge) -> HpsCoefficients:
    """Series family of the delta embedding: mu^(n)(0) b^(n+1) / n!.

    Odd entries are exactly zero; the weak witness ties to b's exponent.
    """
    if n_max > m.n_max:
        raise ConfigError("moments end at n=%d, need %d" % (m.n_max, n_max))
    _validate_moments(m.moments)
    grid = m.grid
    bits = grid.precision
    rows = []
    with working_precision(bits):
        for n in range(n_max + 1):
            mu = m.mu_deriv_at_zero(n)
            if mu == 0:
                rows.append(Fraction(0))
                continue
            fact = mpmath.factorial(n)
            rows.append(tuple(mu * as_mpf(m.b.values[i], bits) ** (n + 1) / fact
                              for i in range(len(grid))))
    out = HpsCoefficients.from_rows_or_scalars(rows, label="delta(b=rho^-%d)"
                                               % m.b_exponent)
    verdict = check_weak_moderate(out, rho, grid, n_max=min(64, n_max))
    if verdict.passed:
        out = out.with_witness(verdict.witness["Q"], verdict.witness["R"])
    return out


def delta_eval(m: MollifierSpec, x: GenNum, rho: Gauge) -> GenNum:
    """delta(x) = b * mu(b x) through the moment series of the mollifier."""
    grid = m.grid
    bits = grid.precision
    values = []
    with working_precision(bits):
        for i in range(len(grid)):
            b_i = as_mpf(m.b.values[i], bits)
            y = b_i * as_mpf(x.values[i], bits)
            values.append(b_i * m.mu_series_at(0, y))
    return GenNum(values=tuple(values), grid=grid)


def delta_derivative_net(m: MollifierSpec, k_max: int = 64) -> DerivativeNet:
    """Derivative evaluators of the delta embedding: b^(k+1) mu^(k)(b x)."""
    grid = m.grid
    bits = grid.precision

    def evaluate(k: int, x: GenNum) -> GenNum:
        values = []
        with working_precision(bits):
            for i in range(len(grid)):
                b_i = as_mpf(m.b.values[i], bits)
                y = b_i * as_mpf(x.values[i], bits)
                values.append(b_i ** (k + 1) * m.mu_series_at(k, y))
        return GenNum(values=tuple(values), grid=grid)

    return DerivativeNet(evaluator=evaluate, k_max=k_max, label="delta")


# ---------------------------------------------------------------------------
# Taylor extraction and the growth-rate witness
# ---------------------------------------------------------------------------


def taylor_coeffs(f: DerivativeNet, c: GenNum, n_max: int, rho: Gauge,
                  grid: EpsGrid) -> Tuple[HpsCoefficients, Verdict]:
    """Family f^(k)(c)/k! with its admissibility verdict."""
    bits = grid.precision
    rows = []
    with working_precision(bits):
        for k in range(n_max + 1):
            net = f.eval_deriv(k, c)
            fact = math.factorial(k)
            row = tuple(_div_exactish(v, fact, bits) for v in net.values)
            if all(v == row[0] for v in row):
                rows.append(row[0])
            else:
                rows.append(row)
    out = HpsCoefficients.from_rows_or_scalars(rows,
                                               label="taylor(%s)" % f.label)
    verdict = check_weak_moderate(out, rho, grid, n_max=min(64, n_max))
    if verdict.passed:
        out = out.with_witness(verdict.witness["Q"], verdict.witness["R"])
    return out, verdict


def _div_exactish(v, fact, bits):
    if isinstance(v, (int, Fraction)):
        return Fraction(v, fact) if isinstance(v, int) else v / fact
    with working_precision(bits):
        return v / mpf(fact)


@dataclass(frozen=True)
class GrowthWitness:
    """Outcome of the factorial-growth bound search.

    ``inv_r_exponent`` estimates the gauge exponent of 1/R: near zero the
    net behaves like a classically analytic family (finite constants); a
    positive exponent marks a genuinely infinite growth constant, as for
    the delta embedding where 1/R tracks b.
    """

    s: GenNum
    c_bound: Optional[GenNum]
    r_bound: Optional[GenNum]
    verdict: Verdict
    inv_r_exponent: Optional[float]


_HALF_LATTICE = tuple(Fraction(k, 2) for k in range(9))  # 0, 1/2, ..., 4
_SCALE_LATTICE = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(4),
                  Fraction(1, 4), Fraction(8), Fraction(1, 8), Fraction(16),
                  Fraction(1, 16))
_KAPPA_LATTICE = (Fraction(1, 16), Fraction(1, 8), Fraction(1, 4),
                  Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4),
                  Fraction(8), Fraction(16))


def graf_check(f: DerivativeNet, c: GenNum, s: GenNum, n_max: int,
               sample_x: Sequence[GenNum], rho: Gauge,
               grid: EpsGrid) -> GrowthWitness:
    """Search (C, R) = (kappa/rho^p, lambda rho^q) with
    |f^(n)(x)| <= C n! / R^n over samples, the tail, and n <= n_max.

    A pointwise lattice hit is rejected when the normalized derivative
    slope ``log(|f^(n)|/n!) / (n log(1/rho))`` still climbs between dyadic
    blocks of n: factorial-squared growth passes any fixed lattice bound on
    a finite window, and only the trend betrays it.
    """
    bits = grid.precision
    rho_values = rho.values_on(grid)
    tail = list(grid.tail)
    with working_precision(bits + GUARD_BITS):
        for x in sample_x:
            for i in tail:
                gap = abs(as_mpf(x.values[i], bits) - as_mpf(c.values[i], bits))
                if not gap <= as_mpf(s.values[i], bits) * mpf(15) / 16:
                    raise ConfigError("sample leaves the ball (margin 1/16)")
    magnitudes = []  # [n][sample][tail-slot]
    for n in range(n_max + 1):
        per_sample = []
        for x in sample_x:
            net = f.eval_deriv(n, x)
            with working_precision(bits):
                per_sample.append([abs(as_mpf(net.values[i], bits))
                                   for i in tail])
        magnitudes.append(per_sample)

    slopes = _derivative_slopes(magnitudes, tail, rho_values, grid, n_max)
    climbing = _slopes_climb(slopes)

    found = None
    with working_precision(bits + GUARD_BITS):
        factorials = [mpmath.factorial(n) for n in range(n_max + 1)]
        for q in _HALF_LATTICE:
            if found:
                break
            for p in _HALF_LATTICE:
                if found:
                    break
                for lam in _SCALE_LATTICE:
                    if found:
                        break
                    for kappa in _KAPPA_LATTICE:
                        if _lattice_holds(magnitudes, factorials, tail,
                                          rho_values, bits, n_max,
                                          q, p, lam, kappa):
                            found = (q, p, lam, kappa)
                            break
    if climbing:
        worst = _worst_cell(magnitudes, factorials, tail, n_max)
        verdict = Verdict(FAIL, counterexample={
            "slopes": [decimal_str(v, 64) for v in slopes if v is not None],
            "worst_cell": worst},
            notes="derivative growth outpaces every factorial/geometric "
                  "bound: slope keeps climbing with n")
        return GrowthWitness(s=s, c_bound=None, r_bound=None, verdict=verdict,
                             inv_r_exponent=None)
    if found is None:
        worst = _worst_cell(magnitudes, factorials, tail, n_max)
        verdict = Verdict(FAIL, counterexample={"worst_cell": worst},
                          notes="witness lattice exhausted")
        return GrowthWitness(s=s, c_bound=None, r_bound=None, verdict=verdict,
                             inv_r_exponent=None)
    q, p, lam, kappa = found
    with working_precision(bits):
        c_values = tuple(as_mpf(kappa, bits) * rho_values[i] ** as_mpf(-p, bits)
                         for i in range(len(grid)))
        r_values = tuple(as_mpf(lam, bits) * rho_values[i] ** as_mpf(q, bits)
                         for i in range(len(grid)))
        exponents = [float(as_mpf(q, bits) - mpmath.log(as_mpf(lam, bits))
                           / mpmath.log(1 / rho_values[i])) for i in tail]
        inv_r = sum(exponents) / len(exponents)
    verdict = Verdict(PASS, witness={"q": q, "p": p, "lambda": lam,
                                     "kappa": kappa})
    return GrowthWitness(s=s,
                         c_bound=GenNum(values=c_values, grid=grid),
                         r_bound=GenNum(values=r_values, grid=grid),
                         verdict=verdict, inv_r_exponent=inv_r)


def _lattice_holds(magnitudes, factorials, tail, rho_values, bits, n_max,
                   q, p, lam, kappa):
    q_m = as_mpf(q, bits)
    p_m = as_mpf(p, bits)
    lam_m = as_mpf(lam, bits)
    kappa_m = as_mpf(kappa, bits)
    for j, i in enumerate(tail):
        geometric = lam_m ** -1 * rho_values[i] ** -q_m
        bound = kappa_m * rho_values[i] ** -p_m  # n = 0 bound, then scaled
        for n in range(n_max + 1):
            limit = bound * factorials[n]
            for per_sample in (magnitudes[n],):
                for sample in per_sample:
                    if not leq_with_slack(sample[j], limit, bits):
                        return False
            bound = bound * geometric
    return True


def _derivative_slopes(magnitudes, tail, rho_values, grid, n_max):
    bits = grid.precision
    blocks = []
    top = 8
    while top <= n_max:
        blocks.append((max(1, top // 2) + 1, top))
        top *= 2
    slopes = []
    with working_precision(bits):
        inv_log = [1 / mpmath.log(1 / rho_values[i]) for i in tail]
        for lo, hi in blocks:
            best = None
            for n in range(lo, hi + 1):
                log_fact = mpmath.log(mpmath.factorial(n))
                for sample in magnitudes[n]:
                    for j, value in enumerate(sample):
                        if value == 0:
                            continue
                        stat = (mpmath.log(value) - log_fact) * inv_log[j] / n
                        if best is None or stat > best:
                            best = stat
            slopes.append(best)
    return slopes


def _slopes_climb(slopes) -> bool:
    values = [s for s in slopes if s is not None]
    if len(values) < 3:
        return False
    d1 = values[-2] - values[-3]
    d2 = values[-1] - values[-2]
    return d2 >= mpf("0.05") and d1 >= mpf("0.05") and d2 >= mpf("0.75") * d1


def _worst_cell(magnitudes, factorials, tail, n_max):
    worst = None
    for n in range(n_max + 1):
        for s_idx, sample in enumerate(magnitudes[n]):
            for j, value in enumerate(sample):
                if value == 0:
                    continue
                score = mpmath.log(value) - mpmath.log(factorials[n])
                if worst is None or score > worst[0]:
                    worst = (score, n, s_idx, tail[j])
    if worst is None:
        return None
    return {"n": worst[1], "sample": worst[2], "grid_index": worst[3]}


# ---------------------------------------------------------------------------
# Flat point and the nowhere-analytic rejection
# ---------------------------------------------------------------------------


def flat_point_values(x: GenNum, grid: EpsGrid) -> GenNum:
    """f(x) = exp(-1/x) for x > 0, 0 otherwise, pointwise on the grid."""
    bits = grid.precision
    values = []
    with working_precision(bits):
        for v in x.values:
            v_m = as_mpf(v, bits)
            values.append(mpmath.exp(-1 / v_m) if v_m > 0 else mpf(0))
    return GenNum(values=tuple(values), grid=grid)


def flat_point_taylor_at_one(n_max: int) -> HpsCoefficients:
    """Exact Taylor family of exp(-1/x) at 1, up to the factor exp(-1).

    Around 1, ``-1/(1+h) = -1 + (h - h^2 + h^3 - ...)``, so the series is
    exp(-1) times the composition of the exponential with the alternating
    identity tail; the composition stays in exact rationals.
    """
    from .algebra import _compose_column
    inner = [Fraction(0)] + [Fraction((-1) ** (k + 1))
                             for k in range(1, n_max + 1)]
    outer = [Fraction(1, math.factorial(k)) for k in range(n_max + 1)]
    column = _compose_column(outer, inner, n_max, 256)
    return HpsCoefficients.from_column(column, label="flat-point-at-1")


def flat_point_check(grid: EpsGrid, rho: Gauge, q_max: int = 4,
                     n_max: int = 40) -> Verdict:
    """Negligibility at infinitesimal arguments plus a finite-point series.

    The function vanishes to every gauge order at arguments of size
    rho^(1/2), rho, rho^2 (checked from the third decade on, where the
    exponent has cleared q_max), while the exact series at center 1
    reproduces the value at 1.1 to 1e-10 with n_max terms.
    """
    deep = grid.with_tail_start(min(2, len(grid) - 1))
    parts = {}
    for label, expr in (("r_half", "rho^(1/2)"), ("r_one", "rho"),
                        ("r_two", "rho^2")):
        x = GenNum.from_expr(expr, grid, rho)
        parts[label] = is_negligible(flat_point_values(x, grid), rho, deep,
                                     q_max=q_max)
    bits = grid.precision
    composed = flat_point_taylor_at_one(n_max)
    with working_precision(bits):
        column = composed.column_values(n_max)
        h = mpf(1) / 10
        total = mpf(0)
        power = mpf(1)
        for n in range(n_max + 1):
            total += as_mpf(column[n], bits) * power
            power *= h
        series_value = mpmath.exp(-1) * total
        direct = mpmath.exp(-1 / (1 + h))
        err = abs(series_value - direct)
        if err <= mpf(10) ** -10:
            parts["series_at_1.1"] = Verdict(
                PASS, witness={"abs_error": decimal_str(err, 64)})
        else:
            parts["series_at_1.1"] = Verdict(
                FAIL, counterexample={"abs_error": decimal_str(err, 64)},
                notes="series at center 1 misses the direct value")
    return combine_verdicts(parts)


def nowhere_analytic_coeffs() -> HpsCoefficients:
    """Coefficient lower bounds of a nowhere-analytic smooth function:
    exp(-2n) (4 n^2)^n / n!; admissibility must reject this family."""
    return HpsCoefficients.from_expr("exp(-2*n)*(4*n^2)^n/factorial(n)",
                                     label="nowhere-analytic-lower-bound")


def nowhere_analytic_reject(grid: EpsGrid, rho: Gauge,
                            n_max: int = 64) -> Verdict:
    """Pass exactly when the admissibility check rejects the growth family."""
    inner = check_weak_moderate(nowhere_analytic_coeffs(), rho, grid,
                                n_max=n_max)
    if inner.failed:
        return Verdict(PASS, witness={"rejected": True,
                                      "detail": inner.counterexample})
    return Verdict(FAIL, counterexample={"unexpected_status": inner.status},
                   notes="growth family was not rejected")
