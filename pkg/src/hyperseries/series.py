"""Coefficient families, radius of convergence, and convergence verdicts.

A coefficient family assigns a value ``a(n, eps)`` to every index ``n`` and
grid point ``eps``, either through a closed-form net expression or an
explicit table.  A :class:`HpsSeries` pairs a family with a center and the
two gauges (``rho`` sets the size scale, ``sigma`` the admissible truncation
indices).  On top of these the module builds:

* admissibility of coefficients: a single pair ``(Q, R)`` must bound
  ``|a(n, eps)| <= rho_eps^-(n*Q + R)`` uniformly in ``n`` on the grid tail
  ("weakly moderate"), and the matching equivalence where differences decay
  like ``rho_eps^(n*q + r)`` for every ``(q, r)`` ("strongly equivalent");
* the radius of convergence through the n-th root curve
  ``u_n = |a(n, eps)|^(1/n)``: its large-``n`` limit is estimated by rational
  extrapolation of coefficient ratios (exact for geometric-type families),
  with the windowed running maximum as fallback, and the radius is the
  reciprocal;
* truncated sums with hypernatural index bounds, epsilon-wise series limits
  with explicit tail control, and the four-condition membership test of the
  set of convergence.

Sums run in increasing ``n`` at working precision and are cut off once a
geometric majorant of the remaining tail falls below the last representable
ulp of the partial sum, so results match full summation bit for bit while
staying desk-scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from . import netexpr
from .nets import (FAIL, INCONCLUSIVE, PASS, ConfigError, EpsGrid, ExtGenNum,
                   Gauge, GenNum, HyperNat, Verdict, combine_verdicts,
                   is_moderate, gauge_le_star, sigma_ladder, valuation)
from .numerics import (GUARD_BITS, Num, as_mpf, decimal_str, is_exact,
                       leq_with_slack, num_sub, working_precision)

#: Default window over n for the root-curve statistics.
RADIUS_WINDOW = (16, 256)
#: Consecutive negligible terms required before a sum may stop early.
STOP_RUN = 8
#: A term counts toward the stop run only while terms shrink this fast.
STOP_RATIO = 0.75
#: Doubling-slope increase treated as genuine super-geometric growth.
SLOPE_MARGIN = 0.05
#: Coefficient accessor caches only indices up to this bound.
_CACHE_N_LIMIT = 512
#: Sums abort once sign-consistent growth passes rho^-ABORT_EXPONENT.
ABORT_EXPONENT = 256


class SummationBudgetError(Exception):
    """Sum exceeded its iteration budget; names the offending (n, eps) cell."""

    def __init__(self, n, grid_index, message=""):
        self.n = n
        self.grid_index = grid_index
        super().__init__(message or
                         "summation budget exhausted at n=%s, grid index %d"
                         % (n, grid_index))


class DivergentSeriesError(Exception):
    """No convergent tail detected within the term cap."""

    def __init__(self, cells):
        self.cells = tuple(cells)
        super().__init__("no convergent tail within cap at grid indices %s"
                         % (list(self.cells),))


class TableExhaustedError(ConfigError):
    """A table-backed family was asked beyond its last row."""


class MissingWitnessError(Exception):
    """Operation requires coefficients with a weak-moderateness witness."""


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HpsCoefficients:
    """Doubly indexed family a(n, eps); expression- or table-backed.

    ``rows[n]`` is either a single exact/mpf value shared by every grid
    point or a tuple with one entry per grid point.  Expression-backed
    families are unbounded in ``n``; tables stop at ``n_max``.
    """

    expr: Optional[netexpr.Expr] = None
    rows: Optional[Tuple] = None
    n_max: Optional[int] = None
    weak_witness: Optional[Tuple[int, int]] = None
    label: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if (self.expr is None) == (self.rows is None):
            raise ConfigError("exactly one of expr/rows must be given")
        if self.rows is not None and self.n_max is None:
            object.__setattr__(self, "n_max", len(self.rows) - 1)

    @classmethod
    def from_expr(cls, text_or_expr, n_max: Optional[int] = None,
                  label: str = "") -> "HpsCoefficients":
        expr = (netexpr.parse(text_or_expr)
                if isinstance(text_or_expr, str) else text_or_expr)
        bad = netexpr.free_vars(expr) - {"n", "eps", "rho"}
        if bad:
            raise ConfigError("coefficient expression uses %s"
                              % ", ".join(sorted(bad)))
        return cls(expr=expr, n_max=n_max, label=label or netexpr.to_text(expr))

    @classmethod
    def from_column(cls, values: Sequence, label: str = "") -> "HpsCoefficients":
        return cls(rows=tuple(values), label=label)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], label: str = "") -> "HpsCoefficients":
        return cls(rows=tuple(tuple(r) for r in rows), label=label)

    @classmethod
    def from_rows_or_scalars(cls, rows: Sequence, label: str = "") -> "HpsCoefficients":
        """Rows that may mix shared scalars with per-point tuples."""
        return cls(rows=tuple(rows), label=label)

    @classmethod
    def zeros(cls, n_max: int, label: str = "0") -> "HpsCoefficients":
        return cls(rows=tuple(Fraction(0) for _ in range(n_max + 1)), label=label)

    @property
    def bounded(self) -> bool:
        return self.n_max is not None

    def bound_or(self, fallback: int) -> int:
        return self.n_max if self.n_max is not None else fallback

    def with_witness(self, q: int, r: int) -> "HpsCoefficients":
        return HpsCoefficients(expr=self.expr, rows=self.rows, n_max=self.n_max,
                               weak_witness=(q, r), label=self.label)

    def exact_in_n(self) -> bool:
        """True when entries depend on n alone and evaluate exactly."""
        if self.rows is not None:
            return all(not isinstance(r, tuple) and is_exact(r) for r in self.rows)
        return netexpr.free_vars(self.expr) <= {"n"}

    def column_values(self, n_max: int) -> list:
        """Shared per-n values for eps-independent families (exact path)."""
        if self.rows is not None:
            if n_max > self.n_max:
                raise TableExhaustedError("table ends at n=%d, need %d"
                                          % (self.n_max, n_max))
            out = []
            for row in self.rows[:n_max + 1]:
                if isinstance(row, tuple):
                    raise ConfigError("family varies across the grid")
                out.append(row)
            return out
        if not netexpr.free_vars(self.expr) <= {"n"}:
            raise ConfigError("family varies across the grid")
        out = []
        for n in range(n_max + 1):
            exact = netexpr.eval_exact(self.expr, {"n": n})
            out.append(exact if exact is not None
                       else netexpr.eval_mpf(self.expr, {"n": n}, 256))
        return out

    def materialize(self, n_max: int, grid: EpsGrid, rho: Gauge,
                    label: str = "") -> "HpsCoefficients":
        acc = coeff_accessor(self, grid, rho)
        rows = []
        for n in range(n_max + 1):
            values = [acc(n, i) for i in range(len(grid))]
            if all(is_exact(v) and v == values[0] for v in values):
                rows.append(values[0])
            else:
                rows.append(tuple(values))
        return HpsCoefficients(rows=tuple(rows), label=label or self.label,
                               weak_witness=self.weak_witness)


def coeff_accessor(coeffs: HpsCoefficients, grid: EpsGrid,
                   rho: Gauge) -> Callable[[int, int], Num]:
    """Point accessor ``(n, grid_index) -> value`` with memoized evaluation."""
    if coeffs.rows is not None:
        rows = coeffs.rows
        n_max = coeffs.n_max

        def from_rows(n: int, i: int) -> Num:
            if n > n_max:
                raise TableExhaustedError("table ends at n=%d, need %d" % (n_max, n))
            row = rows[n]
            return row[i] if isinstance(row, tuple) else row

        return from_rows

    expr = coeffs.expr
    names = netexpr.free_vars(expr)
    cache = coeffs._cache
    bits = grid.precision
    if names <= {"n"}:
        def pure_n(n: int, i: int) -> Num:
            if n > _CACHE_N_LIMIT:
                exact = netexpr.eval_exact(expr, {"n": n})
                return (exact if exact is not None
                        else netexpr.eval_mpf(expr, {"n": n}, bits))
            key = (n, bits)
            if key not in cache:
                exact = netexpr.eval_exact(expr, {"n": n})
                cache[key] = (exact if exact is not None
                              else netexpr.eval_mpf(expr, {"n": n}, bits))
            return cache[key]

        return pure_n

    rho_values = rho.values_on(grid) if "rho" in names else None

    def general(n: int, i: int) -> Num:
        env = {"n": n, "eps": grid.points[i]}
        if rho_values is not None:
            env["rho"] = rho_values[i]
        if n > _CACHE_N_LIMIT:
            return netexpr.eval_mpf(expr, env, bits)
        key = (n, i, bits)
        if key not in cache:
            cache[key] = netexpr.eval_mpf(expr, env, bits)
        return cache[key]

    return general


def derived_coefficients(coeffs: HpsCoefficients, order: int = 1) -> HpsCoefficients:
    """Coefficients of the ``order``-times derived series: prod(n+j) a(n+order)."""
    if order < 1:
        raise ConfigError("order must be >= 1")
    if coeffs.expr is not None:
        shifted = netexpr.substitute(
            coeffs.expr, "n",
            netexpr.Bin("+", netexpr.Var("n"), netexpr.Lit(str(order))))
        factor = None
        for j in range(1, order + 1):
            term = netexpr.Bin("+", netexpr.Var("n"), netexpr.Lit(str(j)))
            factor = term if factor is None else netexpr.Bin("*", factor, term)
        new_expr = netexpr.Bin("*", factor, shifted)
        new_max = None if coeffs.n_max is None else coeffs.n_max - order
        return HpsCoefficients(expr=new_expr, n_max=new_max,
                               label="derive^%d(%s)" % (order, coeffs.label))
    rows = []
    for n in range(coeffs.n_max - order + 1):
        factor = 1
        for j in range(1, order + 1):
            factor *= n + j
        row = coeffs.rows[n + order]
        if isinstance(row, tuple):
            rows.append(tuple(v * factor for v in row))
        else:
            rows.append(row * factor)
    return HpsCoefficients(rows=tuple(rows),
                           label="derive^%d(%s)" % (order, coeffs.label))


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HpsSeries:
    """Coefficients + center + the gauge pair, bound to one grid."""

    coeffs: HpsCoefficients
    center: GenNum
    rho: Gauge
    sigma: Gauge
    grid: EpsGrid
    sigma_le_rho: Verdict
    center_moderate: Verdict


def make_series(coeffs: HpsCoefficients, center: GenNum, rho: Gauge,
                sigma: Gauge, grid: EpsGrid) -> HpsSeries:
    center_mod = is_moderate(center, rho, grid, n_max=8)
    if center_mod.failed:
        raise ConfigError("series center is not moderate on the grid")
    relation = gauge_le_star(sigma, rho, grid)
    return HpsSeries(coeffs=coeffs, center=center, rho=rho, sigma=sigma,
                     grid=grid, sigma_le_rho=relation, center_moderate=center_mod)


def _offsets(series: HpsSeries, x: GenNum) -> Tuple[Num, ...]:
    if x.grid != series.grid:
        raise ConfigError("x lives on a different grid")
    bits = series.grid.precision
    return tuple(num_sub(a, b, bits) for a, b in zip(x.values, series.center.values))


# ---------------------------------------------------------------------------
# Weak moderateness and strong equivalence
# ---------------------------------------------------------------------------


def _abs_matrix(coeffs, grid, rho, n_max, indices):
    acc = coeff_accessor(coeffs, grid, rho)
    bits = grid.precision
    out = []
    with working_precision(bits):
        for n in range(n_max + 1):
            out.append([abs(as_mpf(acc(n, i), bits)) for i in indices])
    return out


def _doubling_slopes(abs_rows, indices, rho_values, grid, n_max):
    """max over tail of log|a| / (n log(1/rho)) on dyadic blocks of n."""
    bits = grid.precision
    blocks = []
    top = 8
    while top <= n_max:
        blocks.append((max(1, top // 2) + 1, top))
        top *= 2
    slopes = []
    with working_precision(bits):
        inv_log = [1 / mpmath.log(1 / rho_values[i]) for i in indices]
        for lo, hi in blocks:
            best = None
            for n in range(lo, hi + 1):
                for j, i in enumerate(indices):
                    a = abs_rows[n][j]
                    if a == 0:
                        continue
                    s = mpmath.log(a) * inv_log[j] / n
                    if best is None or s > best:
                        best = s
            slopes.append(best)
    return slopes


def _upward_trend(slopes) -> bool:
    """Two consecutive non-collapsing slope increases mark unbounded growth."""
    values = [s for s in slopes if s is not None]
    if len(values) < 3:
        return False
    d1 = values[-2] - values[-3]
    d2 = values[-1] - values[-2]
    return d2 >= SLOPE_MARGIN and d1 >= SLOPE_MARGIN and d2 >= 0.75 * d1


def check_weak_moderate(coeffs: HpsCoefficients, rho: Gauge, grid: EpsGrid,
                        n_max: int = 64, q_max: int = 8,
                        r_max: int = 8) -> Verdict:
    """Search the lexicographically smallest (Q, R) with
    |a(n, eps)| <= rho_eps^-(n*Q+R) for all n <= n_max on the tail.

    A direct hit is only accepted if the per-n exponent requirement is not
    still climbing at the window end: on a finite grid a factorial-type
    family satisfies any fixed (Q, R) pointwise, and only the doubling trend
    of ``log|a_n| / (n log(1/rho))`` exposes that no uniform pair exists.
    """
    if n_max < 8:
        raise ConfigError("n_max must be >= 8")
    if coeffs.bounded and coeffs.n_max < n_max:
        raise ConfigError("table ends at n=%d, need %d" % (coeffs.n_max, n_max))
    tail = list(grid.tail)
    rho_values = rho.values_on(grid)
    abs_rows = _abs_matrix(coeffs, grid, rho, n_max, tail)
    slopes = _doubling_slopes(abs_rows, tail, rho_values, grid, n_max)
    trend_bad = _upward_trend(slopes)
    found = None
    bits = grid.precision
    with working_precision(bits + GUARD_BITS):
        for q in range(q_max + 1):
            if found:
                break
            for r in range(r_max + 1):
                ok = True
                for j, i in enumerate(tail):
                    step = rho_values[i] ** -q
                    bound = rho_values[i] ** -r
                    for n in range(n_max + 1):
                        if not leq_with_slack(abs_rows[n][j], bound, bits):
                            ok = False
                            break
                        bound = bound * step
                    if not ok:
                        break
                if ok:
                    found = (q, r)
                    break
    slope_strs = [None if s is None else decimal_str(s, 64) for s in slopes]
    if trend_bad:
        return Verdict(FAIL,
                       counterexample={"doubling_slopes": slope_strs,
                                       "n_max": n_max},
                       notes="required exponent slope keeps climbing with n; "
                             "no uniform (Q, R) can hold for all n")
    if found:
        return Verdict(PASS, witness={"Q": found[0], "R": found[1],
                                      "doubling_slopes": slope_strs})
    return Verdict(INCONCLUSIVE,
                   notes="no (Q, R) within (%d, %d) but exponent trend is flat"
                         % (q_max, r_max))


def attach_weak_witness(coeffs: HpsCoefficients, rho: Gauge, grid: EpsGrid,
                        n_max: int = 64, q_max: int = 8,
                        r_max: int = 8) -> HpsCoefficients:
    verdict = check_weak_moderate(coeffs, rho, grid, n_max, q_max, r_max)
    if not verdict.passed:
        raise MissingWitnessError("coefficients are not weakly moderate: %s"
                                  % verdict.notes)
    return coeffs.with_witness(verdict.witness["Q"], verdict.witness["R"])


def check_strong_eq(a: HpsCoefficients, b: HpsCoefficients, rho: Gauge,
                    grid: EpsGrid, n_max: int = 64, q_max: int = 4,
                    r_max: int = 4) -> Verdict:
    """Differences must fall below rho^(n*q+r) for every tested (q, r)."""
    tail = list(grid.tail)
    rho_values = rho.values_on(grid)
    acc_a = coeff_accessor(a, grid, rho)
    acc_b = coeff_accessor(b, grid, rho)
    bits = grid.precision
    # valuation of the difference at each (n, tail point); +inf where zero
    t_rows = []
    all_zero = True
    with working_precision(bits):
        log_rho = [mpmath.log(rho_values[i]) for i in tail]
        for n in range(n_max + 1):
            row = []
            for j, i in enumerate(tail):
                d = num_sub(acc_a(n, i), acc_b(n, i), bits)
                if d == 0:
                    row.append(mpf("+inf"))
                else:
                    all_zero = False
                    row.append(mpmath.log(abs(as_mpf(d, bits))) / log_rho[j])
            t_rows.append(row)
    if all_zero:
        return Verdict(PASS, witness={"q": q_max, "r": r_max,
                                      "note": "families agree exactly"})
    for q in range(q_max + 1):
        for r in range(r_max + 1):
            for n in range(n_max + 1):
                need = n * q + r
                for j, i in enumerate(tail):
                    if not t_rows[n][j] >= need - 1e-9:
                        return Verdict(
                            FAIL,
                            counterexample={"q": q, "r": r, "n": n,
                                            "grid_index": i,
                                            "valuation": decimal_str(t_rows[n][j], 64)},
                            notes="difference exceeds rho^(n*q+r)")
    # all lattice points hold; demand a non-sinking slope as the for-all proxy
    slopes = []
    n_probe = 8
    while n_probe <= n_max:
        finite = [t_rows[n_probe][j] for j in range(len(tail))]
        slopes.append(min(finite) / (n_probe + 1))
        n_probe *= 2
    for early, late in zip(slopes, slopes[1:]):
        if mpmath.isinf(early) or mpmath.isinf(late):
            continue
        if late < early - 1e-6:
            return Verdict(INCONCLUSIVE,
                           notes="lattice verified but per-n decay slope is "
                                 "shrinking; cannot certify all (q, r)")
    return Verdict(PASS, witness={"q": q_max, "r": r_max})


# ---------------------------------------------------------------------------
# Radius of convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiusEstimate:
    """Reciprocal root-curve limit per grid point, plus diagnostics.

    ``limsup`` is the stabilized estimate of ``lim sup |a_n|^(1/n)``; ``r``
    is its reciprocal (+inf when the curve decays to zero).  ``methods``
    records, per grid point, which estimator produced the value.
    """

    r: ExtGenNum
    limsup: ExtGenNum
    window: Tuple[int, int]
    methods: Tuple[str, ...]
    per_n_curve: Optional[dict] = None


def _neville_at_zero(ts, ws, bits):
    with working_precision(bits + 32):
        vals = [as_mpf(w, bits + 32) for w in ws]
        pts = [as_mpf(t, bits + 32) for t in ts]
        n = len(vals)
        for k in range(1, n):
            for i in range(n - k):
                denom = pts[i + k] - pts[i]
                vals[i] = (pts[i + k] * vals[i] - pts[i] * vals[i + 1]) / denom
        return vals[0]


def radius(coeffs: HpsCoefficients, rho: Gauge, grid: EpsGrid,
           window: Tuple[int, int] = RADIUS_WINDOW,
           keep_curve: bool = False) -> RadiusEstimate:
    """Estimate the root-curve limit and radius on the given n-window.

    Ratio extrapolation (Neville at 1/n -> 0) recovers geometric-type
    families exactly; a clean collapse of the extrapolated ratio to zero
    marks a curve decaying to zero, i.e. an infinite radius.  When ratios
    are unusable the windowed running maximum of ``|a_n|^(1/n)`` stands in.
    """
    n_lo, n_hi = window
    if n_hi - n_lo < 16:
        raise ConfigError("window must span at least 16 indices")
    if coeffs.bounded and coeffs.n_max < n_hi:
        raise ConfigError("window end %d beyond table end %d" % (n_hi, coeffs.n_max))
    acc = coeff_accessor(coeffs, grid, rho)
    bits = grid.precision
    r_vals, limsup_vals, methods = [], [], []
    curves = {} if keep_curve else None
    for i in range(len(grid)):
        with working_precision(bits):
            absolutes = {}
            for n in range(n_lo, n_hi + 1):
                absolutes[n] = abs(as_mpf(acc(n, i), bits))
            nonzero = [n for n in range(n_lo, n_hi + 1) if absolutes[n] != 0]
            if not nonzero:
                # zero rows below n_lo only would deserve a wider window; all
                # zero within it means the curve vanishes outright
                limsup_vals.append(mpf(0))
                r_vals.append(mpf("+inf"))
                methods.append("all-zero")
                continue
            curve = {n: absolutes[n] ** (mpf(1) / n) for n in nonzero}
            if keep_curve:
                curves[i] = {n: decimal_str(curve[n], bits) for n in nonzero}
            estimate = _ratio_estimate(acc, i, n_lo, n_hi, absolutes, bits)
            if estimate is not None:
                limsup_value, method = estimate
            else:
                limsup_value, method = _window_estimate(curve, nonzero)
        limsup_vals.append(limsup_value)
        with working_precision(bits):
            r_vals.append(mpf("+inf") if limsup_value == 0 else 1 / limsup_value)
        methods.append(method)
    return RadiusEstimate(
        r=ExtGenNum(values=tuple(r_vals), grid=grid),
        limsup=ExtGenNum(values=tuple(limsup_vals), grid=grid),
        window=window, methods=tuple(methods), per_n_curve=curves)


def _ratio_estimate(acc, i, n_lo, n_hi, absolutes, bits):
    with working_precision(bits):
        return _ratio_estimate_inner(acc, i, n_lo, n_hi, absolutes, bits)


def _ratio_estimate_inner(acc, i, n_lo, n_hi, absolutes, bits):
    span = n_hi - n_lo
    step = max(2, span // 10)
    for stride in (1, 2):
        base = n_hi - stride
        if stride == 2:
            base -= base % 2
        nodes = [base - j * step for j in range(6)]
        if stride == 2:
            nodes = [n - (n % 2) for n in nodes]
        if any(n < n_lo for n in nodes) or len(set(nodes)) < 6:
            continue
        usable = True
        ratios = []
        for n in nodes:
            lo = absolutes.get(n)
            hi_n = n + stride
            hi = absolutes.get(hi_n)
            if hi is None:
                hi = abs(as_mpf(acc(hi_n, i), bits))
            if not lo or hi is None:
                usable = False
                break
            w = hi / lo
            if stride == 2:
                w = mpmath.sqrt(w)
            ratios.append(w)
        if not usable:
            continue
        ts = [mpf(1) / n for n in nodes]
        lam_full = _neville_at_zero(ts, ratios, bits)
        lam_part = _neville_at_zero(ts[:-1], ratios[:-1], bits)
        reference = ratios[0]  # most asymptotic node (largest n)
        if lam_full <= reference * mpf("1e-6"):
            return mpf(0), "ratio-decay"
        scale = max(abs(lam_full), mpf(2) ** -bits)
        if abs(lam_full - lam_part) <= mpf("1e-6") * scale and lam_full > 0:
            return lam_full, "ratio-extrapolation"
        return None  # wobbling ratios: defer to the window fallback
    return None


def _window_estimate(curve, nonzero):
    peak = max(curve.values())
    last_third = nonzero[len(nonzero) * 2 // 3:]
    late_peak = max(curve[n] for n in last_third) if last_third else peak
    if late_peak <= peak / 2 and curve[nonzero[-1]] <= curve[nonzero[0]] / 4:
        return mpf(0), "window-decay"
    return peak, "window-max"


@dataclass(frozen=True)
class RadiusClassification:
    """Per-point class plus the smallest power bucket containing the tail."""

    classes: Tuple[str, ...]  # each: infinite | beyond | moderate
    p_m: Optional[int]
    subsets: dict  # P -> tuple of grid indices with r <= rho^-P
    p_max: int

    @property
    def all_beyond_tested_powers(self) -> bool:
        return all(c in ("infinite", "beyond") for c in self.classes)


def classify_radius(rad: RadiusEstimate, rho: Gauge, grid: EpsGrid,
                    p_max: int = 8) -> RadiusClassification:
    """Bucket each grid point: infinite radius, beyond every tested power
    of 1/rho, or moderate (below some tested power)."""
    rho_values = rho.values_on(grid)
    bits = grid.precision
    classes = []
    subsets = {}
    with working_precision(bits + GUARD_BITS):
        for p in range(p_max + 1):
            members = []
            for i in range(len(grid)):
                value = rad.r.values[i]
                if not mpmath.isinf(value) and leq_with_slack(
                        value, rho_values[i] ** -p, bits):
                    members.append(i)
            subsets[p] = tuple(members)
        for i in range(len(grid)):
            value = rad.r.values[i]
            if mpmath.isinf(value):
                classes.append("infinite")
            elif leq_with_slack(value, rho_values[i] ** -p_max, bits):
                classes.append("moderate")
            else:
                classes.append("beyond")
    p_m = None
    tail = set(grid.tail)
    if any(c == "moderate" for c in classes):
        for p in range(p_max + 1):
            if tail & set(subsets[p]):
                p_m = p
                break
    return RadiusClassification(classes=tuple(classes), p_m=p_m,
                                subsets=subsets, p_max=p_max)


# ---------------------------------------------------------------------------
# Summation kernels
# ---------------------------------------------------------------------------


def _sum_block(acc, y_i, i, n_start, n_stop, bits, budget, abort_above=None):
    """Sum a(n,i) * y^n for n in [n_start, n_stop] in increasing n.

    Returns (value, last_n, status, peak) with status one of ``complete``,
    ``stopped`` (early stop: the remaining tail cannot move the partial sum
    at working precision), ``budget``, ``growing-budget``, or
    ``oversized-consistent`` / ``oversized-mixed`` when a run of terms sits
    beyond ``abort_above``: with one sign the partial sum is already a
    lower bound past every tested size budget, with mixed signs only the
    summand size is known.
    """
    with working_precision(bits):
        y = as_mpf(y_i, bits)
        total = mpf(0)
        floor_scale = mpf(2) ** -(bits + GUARD_BITS)
        power = y ** n_start if n_start else mpf(1)
        previous = None
        peak = mpf(0)
        tiny_run = 0
        grow_run = 0
        huge_run = 0
        huge_consistent = True
        sign = 0
        steps = 0
        n = n_start
        while n <= n_stop:
            if steps > budget:
                status = "growing-budget" if grow_run >= 64 and sign != 0 else "budget"
                return total, n - 1, status, peak
            try:
                a = acc(n, i)
            except TableExhaustedError:
                if tiny_run >= 1:
                    return total, n - 1, "stopped", peak
                raise
            term = as_mpf(a, bits) * power
            total += term
            magnitude = abs(term)
            if magnitude > peak:
                peak = magnitude
            if term == 0:
                tiny_run += 1
            else:
                shrinking = previous is not None and magnitude <= STOP_RATIO * previous
                new_sign = 1 if term > 0 else -1
                if previous is not None and magnitude >= previous:
                    grow_run = grow_run + 1 if sign in (0, new_sign) else 0
                else:
                    grow_run = 0
                if abort_above is not None and magnitude > abort_above:
                    huge_consistent = huge_consistent and sign in (0, new_sign)
                    huge_run += 1
                else:
                    huge_run = 0
                    huge_consistent = True
                sign = new_sign
                if shrinking and magnitude <= floor_scale * abs(total):
                    tiny_run += 1
                else:
                    tiny_run = 0
                previous = magnitude
                if abort_above is not None and grow_run >= 64 \
                        and magnitude > abort_above:
                    return total, n, "growing-budget", peak
                if huge_run >= 64:
                    status = ("oversized-consistent" if huge_consistent
                              else "oversized-mixed")
                    return total, n, status, peak
            if tiny_run >= STOP_RUN:
                return total, n, "stopped", peak
            power *= y
            n += 1
            steps += 1
        return total, n_stop, "complete", peak


def hyperfinite_sum(series: HpsSeries, x: GenNum, upper: HyperNat,
                    budget: int = 10 ** 6) -> GenNum:
    """Per-point truncated sum to the hypernatural index, increasing n."""
    grid = series.grid
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    rho_values = series.rho.values_on(grid)
    ys = _offsets(series, x)
    values = []
    with working_precision(grid.precision):
        aborts = [r ** -ABORT_EXPONENT for r in rho_values]
    for i in range(len(grid)):
        value, last_n, status, _ = _sum_block(
            acc, ys[i], i, 0, upper.values[i], grid.precision, budget,
            abort_above=aborts[i])
        if status not in ("complete", "stopped"):
            raise SummationBudgetError(last_n + 1, i)
        values.append(value)
    return GenNum(values=tuple(values), grid=grid)


def _limit_point(acc, y_i, i, bits, q_exponent, rho_i, n_cap,
                 abort_above=None):
    """Adaptive epsilon-wise series limit at one grid point.

    Stops once a geometric majorant of the tail drops below
    ``rho^q * (1 + |partial|)`` or below the representable floor; reports
    ``divergent-cap`` when no convergent tail appeared within the cap or
    when sign-consistent growth blows past ``abort_above``.
    """
    with working_precision(bits):
        y = as_mpf(y_i, bits)
        total = mpf(0)
        power = mpf(1)
        target = rho_i ** q_exponent
        floor_scale = mpf(2) ** -(bits + GUARD_BITS)
        recent = []
        previous = None
        previous_term = None
        tiny_run = 0
        grow_run = 0
        for n in range(n_cap + 1):
            a = acc(n, i)
            term = as_mpf(a, bits) * power
            total += term
            magnitude = abs(term)
            if magnitude != 0:
                if previous is not None and previous != 0:
                    recent.append(magnitude / previous)
                    if len(recent) > 4:
                        recent.pop(0)
                if previous is not None and magnitude >= previous \
                        and previous_term is not None \
                        and (term > 0) == (previous_term > 0):
                    grow_run += 1
                else:
                    grow_run = 0
                if len(recent) == 4:
                    worst = max(recent)
                    # ratio majorant with a factor-2 guard; sound for the
                    # non-increasing ratio profiles of admissible families
                    if worst <= mpf("0.9999"):
                        tail_bound = 2 * magnitude * worst / (1 - worst)
                        threshold = target * (1 + abs(total))
                        if tail_bound <= threshold or \
                                tail_bound <= floor_scale * (1 + abs(total)):
                            return total, n, "converged"
                if previous is not None and magnitude <= floor_scale * abs(total) \
                        and magnitude <= STOP_RATIO * previous:
                    tiny_run += 1
                else:
                    tiny_run = 0
                previous = magnitude
                previous_term = term
                if abort_above is not None and grow_run >= 64 \
                        and magnitude > abort_above:
                    return total, n, "divergent-cap"
            else:
                tiny_run += 1
            if tiny_run >= STOP_RUN:
                return total, n, "converged"
            power *= y
        return total, n_cap, "divergent-cap"


def _series_limit_report(series: HpsSeries, x: GenNum, q_target: int,
                         n_cap: int):
    grid = series.grid
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    rho_values = series.rho.values_on(grid)
    ys = _offsets(series, x)
    out = []
    with working_precision(grid.precision):
        aborts = [r ** -ABORT_EXPONENT for r in rho_values]
    for i in range(len(grid)):
        try:
            value, n_used, status = _limit_point(
                acc, ys[i], i, grid.precision, q_target, rho_values[i], n_cap,
                abort_above=aborts[i])
        except TableExhaustedError:
            out.append((None, "table-exhausted", series.coeffs.n_max))
            continue
        out.append((value, status, n_used))
    return out


def series_limit(series: HpsSeries, x: GenNum, q_target: int = 6,
                 n_cap: int = 10 ** 6) -> GenNum:
    """Epsilon-wise limit of the series at x, to within rho^q_target tails."""
    report = _series_limit_report(series, x, q_target, n_cap)
    bad = [i for i, (_, status, _) in enumerate(report) if status != "converged"]
    if bad:
        raise DivergentSeriesError(bad)
    return GenNum(values=tuple(value for value, _, _ in report), grid=series.grid)


# ---------------------------------------------------------------------------
# Formal sums, derivatives, four-condition membership
# ---------------------------------------------------------------------------


def is_formal_hps(series: HpsSeries, x: GenNum, sample_count: int = 5,
                  ladder_max: int = 4, moderate_n_max: int = 8,
                  budget: int = 10 ** 6) -> Verdict:
    """Are all sampled hyperfinite block sums moderate?

    Blocks are taken between consecutive rungs of the sigma-power ladder
    (clipped to the table end for table-backed families).
    """
    if sample_count < 4:
        raise ConfigError("sample_count must be >= 4")
    grid = series.grid
    rungs = sigma_ladder(series.sigma, grid, js=range(1, ladder_max + 1))
    clip = series.coeffs.n_max
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    ys = _offsets(series, x)
    rho_values = series.rho.values_on(grid)
    with working_precision(grid.precision):
        aborts = [r ** -ABORT_EXPONENT for r in rho_values]

    def clipped(rung):
        if clip is None:
            return rung.values
        return tuple(min(v, clip) for v in rung.values)

    bounds = [tuple(0 for _ in grid.points)] + [clipped(r) for r in rungs]
    pairs = []
    for low, high in zip(bounds, bounds[1:]):
        pairs.append((low, high))
    pairs.append((bounds[0], bounds[-1]))
    pairs = pairs[:sample_count]
    block_results = []
    for low, high in pairs:
        values = []
        statuses = []
        peaks = []
        for i in range(len(grid)):
            lo, hi = low[i], high[i]
            if lo > hi:
                lo = hi
            value, _, status, peak = _sum_block(
                acc, ys[i], i, lo, hi, grid.precision, budget,
                abort_above=aborts[i])
            values.append(value)
            statuses.append(status)
            peaks.append(peak)
        block_results.append((low, high, values, statuses, peaks))
    results = {}
    for idx, (low, high, values, statuses, peaks) in enumerate(block_results):
        name = "block_%d" % idx
        if any(s not in ("complete", "stopped") for s in statuses):
            peak_net = GenNum(values=tuple(peaks), grid=grid)
            peak_mod = is_moderate(peak_net, series.rho, grid, moderate_n_max)
            decisive = any(s in ("growing-budget", "oversized-consistent")
                           for s in statuses)
            if decisive or peak_mod.failed:
                results[name] = Verdict(
                    FAIL,
                    counterexample={"block": idx,
                                    "peak_valuations":
                                        [decimal_str(v, 64) for v in
                                         valuation(peak_net, series.rho, grid)]},
                    notes="block terms grow without a moderate bound")
            else:
                results[name] = Verdict(INCONCLUSIVE,
                                        notes="budget exhausted inside block")
            continue
        block_net = GenNum(values=tuple(values), grid=grid)
        results[name] = is_moderate(block_net, series.rho, grid, moderate_n_max)
    return combine_verdicts(results)


def derivative_net_moderate(series: HpsSeries, x: GenNum, k_max: int = 3,
                            moderate_n_max: int = 8, q_target: int = 6,
                            n_cap: int = 10 ** 6) -> Verdict:
    """Moderateness of the first k_max derived series at x."""
    if k_max < 1:
        raise ConfigError("k_max must be >= 1")
    parts = {}
    for k in range(1, k_max + 1):
        derived = make_series(derived_coefficients(series.coeffs, k),
                              series.center, series.rho, series.sigma,
                              series.grid)
        report = _series_limit_report(derived, x, q_target, n_cap)
        bad = [i for i, (_, status, _) in enumerate(report) if status != "converged"]
        if bad:
            parts["k_%d" % k] = Verdict(
                FAIL, counterexample={"grid_indices": bad},
                notes="derived series has no convergent tail at these points")
            continue
        net = GenNum(values=tuple(v for v, _, _ in report), grid=series.grid)
        parts["k_%d" % k] = is_moderate(net, series.rho, series.grid,
                                        moderate_n_max)
    return combine_verdicts(parts)


@dataclass(frozen=True)
class ConvergenceReport:
    """The four membership conditions and their conjunction."""

    cond_radius: Verdict
    cond_formal: Verdict
    cond_limit: Verdict
    cond_derivs: Verdict
    overall: Verdict
    limit: Optional[GenNum] = None
    radius_estimate: Optional[RadiusEstimate] = None


@dataclass(frozen=True)
class ConvergeOpts:
    margin: int = 6           # strict-gap exponent for |x-c| < r
    q_close: int = 6          # closeness of ladder sums to the limit
    q_target: int = 8         # tail-control target inside series_limit
    ladder_max: int = 4
    k_max: int = 3
    moderate_n_max: int = 8
    n_cap: int = 10 ** 6
    sample_blocks: int = 5
    window: Tuple[int, int] = RADIUS_WINDOW


def converges_at(series: HpsSeries, x: GenNum,
                 opts: ConvergeOpts = ConvergeOpts()) -> ConvergenceReport:
    """Run the four membership conditions at x and report each verdict."""
    grid = series.grid
    bits = grid.precision
    rho_values = series.rho.values_on(grid)
    window = opts.window
    if series.coeffs.bounded:
        window = (min(window[0], max(2, series.coeffs.n_max // 4)),
                  min(window[1], series.coeffs.n_max))
    rad = radius(series.coeffs, series.rho, grid, window=window)

    ys = _offsets(series, x)
    cond_radius = None
    with working_precision(bits + GUARD_BITS):
        for i in grid.tail:
            r_i = rad.r.values[i]
            if mpmath.isinf(r_i):
                continue
            gap = r_i - abs(as_mpf(ys[i], bits))
            if not gap >= rho_values[i] ** opts.margin:
                cond_radius = Verdict(
                    FAIL,
                    counterexample={"grid_index": i,
                                    "radius": decimal_str(r_i, bits),
                                    "offset": decimal_str(abs(as_mpf(ys[i], bits)), bits)},
                    notes="no rho^%d gap below the radius" % opts.margin)
                break
    if cond_radius is None:
        cond_radius = Verdict(PASS, witness={"margin_exponent": opts.margin})

    cond_formal = is_formal_hps(series, x, sample_count=opts.sample_blocks,
                                ladder_max=opts.ladder_max,
                                moderate_n_max=opts.moderate_n_max,
                                budget=opts.n_cap)

    cond_limit, limit_net = _limit_condition(series, x, opts, rho_values)

    cond_derivs = derivative_net_moderate(series, x, k_max=opts.k_max,
                                          moderate_n_max=opts.moderate_n_max,
                                          q_target=opts.q_target,
                                          n_cap=opts.n_cap)

    overall = combine_verdicts({"radius": cond_radius, "formal": cond_formal,
                                "limit": cond_limit, "derivatives": cond_derivs})
    return ConvergenceReport(cond_radius=cond_radius, cond_formal=cond_formal,
                             cond_limit=cond_limit, cond_derivs=cond_derivs,
                             overall=overall, limit=limit_net,
                             radius_estimate=rad)


def _limit_condition(series, x, opts, rho_values):
    grid = series.grid
    bits = grid.precision
    report = _series_limit_report(series, x, opts.q_target, opts.n_cap)
    bad = [i for i, (_, status, _) in enumerate(report) if status != "converged"]
    if bad:
        # partial evidence: a sinking-valuation prefix or a partial sum that
        # already dwarfs every tested moderateness bound decides a failure
        computed = [(i, value) for i, (value, status, _) in enumerate(report)
                    if value is not None]
        with working_precision(bits + GUARD_BITS):
            oversized = [i for i, (value, status, _) in enumerate(report)
                         if status == "divergent-cap" and value is not None
                         and abs(value) > rho_values[i] ** -opts.moderate_n_max]
        prefix_fail = False
        if len([i for i, _ in computed if i in grid.tail]) >= 2:
            filled = [value if value is not None else mpf(0)
                      for value, _, _ in report]
            prefix_grid = EpsGrid(
                points=tuple(grid.points[i] for i, _ in computed),
                tail_start=0, precision=grid.precision)
            prefix_net = GenNum(values=tuple(v for _, v in computed),
                                grid=prefix_grid)
            prefix_rho = Gauge(expr=series.rho.expr, name=series.rho.name)
            prefix_fail = is_moderate(prefix_net, prefix_rho, prefix_grid,
                                      opts.moderate_n_max).failed
        if oversized or prefix_fail:
            return Verdict(
                FAIL,
                counterexample={"uncomputable_at": bad,
                                "oversized_at": oversized},
                notes="epsilon-wise sums exceed every tested moderateness "
                      "bound"), None
        return Verdict(INCONCLUSIVE,
                       notes="series limit not computable within the term cap "
                             "at grid indices %s" % bad), None
    limit_net = GenNum(values=tuple(v for v, _, _ in report), grid=grid)
    moderate = is_moderate(limit_net, series.rho, grid, opts.moderate_n_max)
    if not moderate.passed:
        verdict = Verdict(FAIL, counterexample=moderate.counterexample,
                          notes="limit net is not moderate: " + moderate.notes) \
            if moderate.failed else Verdict(INCONCLUSIVE, notes=moderate.notes)
        return verdict, limit_net
    rungs = sigma_ladder(series.sigma, grid,
                         js=range(1, opts.ladder_max + 1))
    clip = series.coeffs.n_max
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    ys = _offsets(series, x)
    with working_precision(bits):
        aborts = [r ** -ABORT_EXPONENT for r in rho_values]
    with working_precision(bits + GUARD_BITS):
        for rung in rungs:
            for i in grid.tail:
                top = rung.values[i] if clip is None else min(rung.values[i], clip)
                value, _, status, _ = _sum_block(acc, ys[i], i, 0, top,
                                                 bits, opts.n_cap,
                                                 abort_above=aborts[i])
                if status not in ("complete", "stopped"):
                    return Verdict(
                        FAIL,
                        counterexample={"grid_index": i, "rung": rung.sigma_witness},
                        notes="hyperfinite sum exceeds the budget while "
                              "growing"), limit_net
                gap = abs(value - as_mpf(limit_net.values[i], bits))
                if not leq_with_slack(gap, rho_values[i] ** opts.q_close, bits):
                    return Verdict(
                        FAIL,
                        counterexample={"grid_index": i,
                                        "rung": rung.sigma_witness,
                                        "gap": decimal_str(gap, 64)},
                        notes="hyperfinite sums do not approach the "
                              "epsilon-wise limit"), limit_net
    return Verdict(PASS, witness={"moderate_N": moderate.witness["N"],
                                  "q_close": opts.q_close}), limit_net


# ---------------------------------------------------------------------------
# Eventual boundedness and the convergence shortcut
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventualBoundReport:
    r_bound: Optional[GenNum]
    n_start: Optional[int]
    verdict: Verdict


def eventually_bounded(series: HpsSeries, x: GenNum, n_max: int = 64,
                       p_max: int = 8,
                       kappas=(1, 2, 4, 8, 16)) -> EventualBoundReport:
    """Uniform moderate bound on the summands from some index on.

    Searches the smallest ``n_start`` admitting a bound of the shape
    ``kappa * rho^-p`` for all later summands on the tail.
    """
    if n_max < 8:
        raise ConfigError("n_max must be >= 8")
    grid = series.grid
    bits = grid.precision
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    rho_values = series.rho.values_on(grid)
    ys = _offsets(series, x)
    terms = []
    with working_precision(bits):
        for i in range(len(grid)):
            y = as_mpf(ys[i], bits)
            power = mpf(1)
            column = []
            for n in range(n_max + 1):
                column.append(abs(as_mpf(acc(n, i), bits) * power))
                power *= y
            terms.append(column)
    tail = list(grid.tail)
    with working_precision(bits + GUARD_BITS):
        for n_start in range(n_max // 2 + 1):
            peak = {i: max(terms[i][n_start:]) for i in tail}
            for p in range(p_max + 1):
                for kappa in kappas:
                    if all(peak[i] < kappa * rho_values[i] ** -p for i in tail):
                        bound = GenNum(
                            values=tuple(kappa * rho_values[i] ** -p
                                         for i in range(len(grid))),
                            grid=grid)
                        verdict = Verdict(PASS,
                                          witness={"N_start": n_start, "p": p,
                                                   "kappa": kappa})
                        return EventualBoundReport(r_bound=bound,
                                                   n_start=n_start,
                                                   verdict=verdict)
    # no witness: the smallest conceivable bound is the term maximum itself;
    # if even that net fails moderateness, no moderate bound can exist
    peak_net = GenNum(values=tuple(max(column) for column in terms), grid=grid)
    peak_mod = is_moderate(peak_net, series.rho, grid, p_max)
    if peak_mod.failed:
        verdict = Verdict(FAIL,
                          counterexample={"peak_valuations":
                                          [decimal_str(v, 64) for v in
                                           valuation(peak_net, series.rho,
                                                     grid)]},
                          notes="summands grow in n with climbing exponent")
        return EventualBoundReport(r_bound=None, n_start=None, verdict=verdict)
    return EventualBoundReport(r_bound=None, n_start=None,
                               verdict=Verdict(INCONCLUSIVE,
                                               notes="no tested bound holds "
                                                     "but growth is not clear"))


class ShortcutPreconditionError(Exception):
    """A converge_shortcut precondition failed; kind names which one."""

    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        super().__init__("%s%s" % (kind, ": " + detail if detail else ""))


def converge_shortcut(series: HpsSeries, x: GenNum, x_bar: GenNum,
                      opts: ConvergeOpts = ConvergeOpts()) -> Verdict:
    """Membership at x from convergence plus eventual bounds at x_bar.

    Inside the ball reached by a convergent, eventually bounded point, a
    moderate epsilon-wise limit alone certifies membership; the witness
    carries the geometric majorant ratio h = |x-c| / |x_bar-c|.
    """
    grid = series.grid
    bits = grid.precision
    reference = converges_at(series, x_bar, opts)
    if not reference.overall.passed:
        raise ShortcutPreconditionError("not-convergent-at-reference")
    bound_report = eventually_bounded(series, x_bar)
    if not bound_report.verdict.passed:
        raise ShortcutPreconditionError("not-eventually-bounded")
    relation = series.sigma_le_rho
    if not relation.passed:
        raise ShortcutPreconditionError("gauge-relation",
                                        "sigma is not below a power of rho")
    ys = _offsets(series, x)
    ys_bar = _offsets(series, x_bar)
    with working_precision(bits):
        for i in grid.tail:
            if not abs(as_mpf(ys[i], bits)) < abs(as_mpf(ys_bar[i], bits)):
                raise ShortcutPreconditionError(
                    "not-strictly-inside",
                    "at grid index %d the strict inequality fails" % i)
        h_values = tuple(abs(as_mpf(a, bits)) / abs(as_mpf(b, bits))
                         for a, b in zip(ys, ys_bar))
    h = GenNum(values=h_values, grid=grid)
    n_start = bound_report.n_start
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    with working_precision(bits):
        k_values = []
        for i in range(len(grid)):
            y = as_mpf(ys_bar[i], bits)
            power = mpf(1)
            head_peak = mpf(0)
            for n in range(n_start + 1):
                head_peak = max(head_peak, abs(as_mpf(acc(n, i), bits) * power))
                power *= y
            k_values.append(max(head_peak,
                                as_mpf(bound_report.r_bound.values[i], bits)))
    big_k = GenNum(values=tuple(k_values), grid=grid)
    limit_net = series_limit(series, x, q_target=opts.q_target,
                             n_cap=opts.n_cap)
    moderate = is_moderate(limit_net, series.rho, grid, opts.moderate_n_max)
    if moderate.passed:
        return Verdict(PASS, witness={"moderate_N": moderate.witness["N"],
                                      "h": h.describe(),
                                      "K": big_k.describe()})
    if moderate.failed:
        return Verdict(FAIL, counterexample=moderate.counterexample,
                       notes="limit at x is not moderate")
    return Verdict(INCONCLUSIVE, notes=moderate.notes)


def ball_guarantee(coeffs: HpsCoefficients, rho: Gauge,
                   grid: EpsGrid) -> GenNum:
    """Radius rho^Q of guaranteed eventual boundedness, from the witness."""
    if coeffs.weak_witness is None:
        raise MissingWitnessError("run check_weak_moderate first")
    q = coeffs.weak_witness[0]
    rho_values = rho.values_on(grid)
    with working_precision(grid.precision):
        values = tuple(r ** q for r in rho_values)
    return GenNum(values=values, grid=grid)
