"""Closure operations on coefficient families.

Scalar multiple, sum, Cauchy product, reciprocal/division, composition,
derivation, term-wise integration, recentering and compositional reversion.
Each operation returns a fresh family and re-derives its admissibility
witness on the grid instead of propagating witness bounds symbolically; the
grid search is tighter and uniform across operations.

Arithmetic stays exact (``Fraction``) whenever the operands are exact and
independent of the grid point, which is what lets round-trip identities
(division, composition associativity, reversion) hold at tolerances far
below floating roundoff.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from mpmath import mpf

from .nets import ConfigError, EpsGrid, Gauge, GenNum, is_moderate
from .numerics import (as_mpf, decimal_str, is_exact, num_add, num_div,
                       num_mul, num_sub, working_precision)
from .series import (ConvergeOpts, HpsCoefficients, HpsSeries,
                     check_weak_moderate, coeff_accessor, converges_at,
                     derived_coefficients)


class NotInvertibleError(Exception):
    """Leading coefficient lacks a gauge-power lower bound on the tail."""


class InsufficientDepthError(Exception):
    """Recentering truncation tail exceeds the requested tolerance."""


DEFAULT_DEPTH = 258


def _attach_witness(result: HpsCoefficients, grid: EpsGrid, rho: Gauge,
                    check_n: int = 64) -> HpsCoefficients:
    check_n = min(check_n, result.bound_or(check_n))
    if check_n < 8:
        return result
    verdict = check_weak_moderate(result, rho, grid, n_max=check_n)
    if verdict.passed:
        return result.with_witness(verdict.witness["Q"], verdict.witness["R"])
    return result


def _as_columns(coeffs: HpsCoefficients, grid: EpsGrid, rho: Gauge,
                n_max: int):
    """(shared, data): one column when entries ignore the grid point,
    otherwise one column per grid point."""
    acc = coeff_accessor(coeffs, grid, rho)
    if coeffs.rows is not None:
        shared = all(not isinstance(r, tuple) for r in coeffs.rows[:n_max + 1])
    else:
        import hyperseries.netexpr as netexpr
        shared = netexpr.free_vars(coeffs.expr) <= {"n"}
    if shared:
        return True, [acc(n, 0) for n in range(n_max + 1)]
    return False, [[acc(n, i) for n in range(n_max + 1)]
                   for i in range(len(grid))]


def _pack(shared: bool, data, label: str) -> HpsCoefficients:
    if shared:
        return HpsCoefficients.from_column(data, label=label)
    n_max = len(data[0]) - 1
    rows = []
    for n in range(n_max + 1):
        values = tuple(col[n] for col in data)
        rows.append(values)
    return HpsCoefficients.from_rows(rows, label=label)


def _map_columns(op, grid, rho, n_max, label, *families):
    columns = [_as_columns(f, grid, rho, n_max) for f in families]
    if all(shared for shared, _ in columns):
        return _pack(True, op(*[data for _, data in columns]), label)
    expanded = []
    for shared, data in columns:
        expanded.append([data] * len(grid) if shared else data)
    per_point = [op(*[cols[i] for cols in expanded])
                 for i in range(len(grid))]
    return _pack(False, per_point, label)


def _collapse(rows):
    """Replace per-point tuples by one shared value where entries agree."""
    out = []
    for row in rows:
        if isinstance(row, tuple) and all(is_exact(v) and v == row[0]
                                          for v in row):
            out.append(row[0])
        else:
            out.append(row)
    return tuple(out)


def scalar_mul(r: GenNum, a: HpsCoefficients, grid: EpsGrid, rho: Gauge,
               n_max: Optional[int] = None) -> HpsCoefficients:
    """Family r * a(n, eps); the witness offset absorbs r's exponent."""
    if not is_moderate(r, rho, grid).passed:
        raise ConfigError("scalar factor is not moderate on the grid")
    n_max = n_max if n_max is not None else a.bound_or(DEFAULT_DEPTH)
    bits = grid.precision
    acc = coeff_accessor(a, grid, rho)
    rows = []
    for n in range(n_max + 1):
        rows.append(tuple(num_mul(r.values[i], acc(n, i), bits)
                          for i in range(len(grid))))
    out = HpsCoefficients.from_rows_or_scalars(_collapse(rows),
                                               label="scalar*" + a.label)
    return _attach_witness(out, grid, rho)


def add(a: HpsCoefficients, b: HpsCoefficients, grid: EpsGrid, rho: Gauge,
        n_max: Optional[int] = None) -> HpsCoefficients:
    n_max = n_max if n_max is not None else min(a.bound_or(DEFAULT_DEPTH),
                                                b.bound_or(DEFAULT_DEPTH))
    bits = grid.precision

    def pointwise(u, v):
        return [num_add(u[n], v[n], bits) for n in range(n_max + 1)]

    out = _map_columns(pointwise, grid, rho, n_max,
                       "(%s)+(%s)" % (a.label, b.label), a, b)
    return _attach_witness(out, grid, rho)


def _convolve(u, v, n_max, bits):
    out = []
    for n in range(n_max + 1):
        total = None
        for k in range(n + 1):
            term = num_mul(u[k], v[n - k], bits)
            total = term if total is None else num_add(total, term, bits)
        out.append(total)
    return out


def cauchy_product(a: HpsCoefficients, b: HpsCoefficients, n_max: int,
                   grid: EpsGrid, rho: Gauge) -> HpsCoefficients:
    """Convolution c_n = sum a_k b_(n-k), exact for exact operands."""
    bits = grid.precision

    def conv(u, v):
        return _convolve(u, v, n_max, bits)

    out = _map_columns(conv, grid, rho, n_max,
                       "(%s)*(%s)" % (a.label, b.label), a, b)
    return _attach_witness(out, grid, rho)


def _invertibility_margin(values, rho_values, tail, bits, m_max):
    with working_precision(bits):
        for m in range(m_max + 1):
            if all(abs(as_mpf(values[i], bits)) >= rho_values[i] ** m
                   for i in tail):
                return m
    return None


def reciprocal_div(a: HpsCoefficients, b: HpsCoefficients, n_max: int,
                   grid: EpsGrid, rho: Gauge, m_max: int = 8) -> HpsCoefficients:
    """Coefficients of a/b via the triangular recursion d_0 = a_0/b_0,
    d_n = (a_n - sum b_l d_(n-l)) / b_0."""
    bits = grid.precision
    rho_values = rho.values_on(grid)
    acc_b = coeff_accessor(b, grid, rho)
    head = [acc_b(0, i) for i in range(len(grid))]
    margin = _invertibility_margin(head, rho_values, list(grid.tail), bits, m_max)
    if margin is None:
        raise NotInvertibleError(
            "b_0 admits no lower bound rho^m with m <= %d on the tail" % m_max)

    def divide(u, v):
        out = [num_div(u[0], v[0], bits)]
        for n in range(1, n_max + 1):
            inner = None
            for l in range(1, n + 1):
                term = num_mul(v[l], out[n - l], bits)
                inner = term if inner is None else num_add(inner, term, bits)
            numerator = u[n] if inner is None else num_sub(u[n], inner, bits)
            out.append(num_div(numerator, v[0], bits))
        return out

    out = _map_columns(divide, grid, rho, n_max,
                       "(%s)/(%s)" % (a.label, b.label), a, b)
    return _attach_witness(out, grid, rho)


def _compose_column(outer, inner, n_max, bits):
    """Coefficients of outer(inner(x)) with the inner constant term dropped:
    inner indices start at 1, so order n draws on outer orders k <= n."""
    tilde = [Fraction(0) if is_exact(inner[0]) else mpf(0)] + \
        [inner[k] for k in range(1, n_max + 1)]
    out = [outer[0]] + [None] * n_max
    power = tilde[:]  # tilde^1
    for k in range(1, n_max + 1):
        a_k = outer[k] if k < len(outer) else None
        if a_k is not None:
            for n in range(k, n_max + 1):
                term = num_mul(a_k, power[n], bits)
                out[n] = term if out[n] is None else num_add(out[n], term, bits)
        if k < n_max:
            power = _convolve(power, tilde, n_max, bits)
    zero = Fraction(0)
    return [zero if v is None else v for v in out]


def compose(a: HpsCoefficients, b: HpsCoefficients, n_max: int,
            grid: EpsGrid, rho: Gauge) -> HpsCoefficients:
    """Composition a after b, with a read as expanded at b's constant term.

    Only inner indices >= 1 enter (the centering removes the constant), so
    each output order is a finite sum over outer orders k <= n.
    """
    bits = grid.precision

    def comp(u, v):
        return _compose_column(u, v, n_max, bits)

    out = _map_columns(comp, grid, rho, n_max,
                       "(%s)o(%s)" % (a.label, b.label), a, b)
    return _attach_witness(out, grid, rho)


def derive(a: HpsCoefficients, grid: EpsGrid, rho: Gauge) -> HpsCoefficients:
    """Derived family (n+1) a_(n+1) with a freshly derived witness."""
    return _attach_witness(derived_coefficients(a, 1), grid, rho)


def integrate(a: HpsCoefficients, grid: EpsGrid, rho: Gauge,
              n_max: Optional[int] = None) -> HpsCoefficients:
    """Antiderivative family: A_0 = 0, A_(n+1) = a_n / (n+1)."""
    n_max = n_max if n_max is not None else a.bound_or(DEFAULT_DEPTH - 1) + 1
    if n_max < 1:
        raise ConfigError("integration depth must be at least 1")
    bits = grid.precision

    def anti(u):
        # input depth n_max - 1 produces output depth n_max
        return [Fraction(0)] + [num_div(u[n], n + 1, bits)
                                for n in range(len(u))]

    out = _map_columns(anti, grid, rho, n_max - 1, "int(%s)" % a.label, a)
    return _attach_witness(out, grid, rho)


def recenter(series: HpsSeries, new_center: GenNum, n_max: int,
             m_max: int, check: bool = True, tail_tol: str = "1e-30",
             opts: ConvergeOpts = ConvergeOpts()) -> HpsCoefficients:
    """Re-expand at a new center inside the set of convergence.

    new_a(n) = sum_(m=n..m_max) a_m C(m, n) (new_c - c)^(m-n), truncated at
    m_max; raises when the geometric estimate of the dropped tail is not
    below ``tail_tol`` relative to the computed entry.
    """
    if check:
        report = converges_at(series, new_center, opts)
        if not report.overall.passed:
            raise ConfigError("new center is outside the verified set of "
                              "convergence: %s" % report.overall.status)
    grid = series.grid
    bits = grid.precision
    acc = coeff_accessor(series.coeffs, grid, series.rho)
    shift = tuple(num_sub(a, b, bits)
                  for a, b in zip(new_center.values, series.center.values))
    if series.coeffs.bounded and series.coeffs.n_max < m_max:
        raise ConfigError("m_max beyond the table depth")
    columns = []
    with working_precision(bits):
        for i in range(len(grid)):
            d = shift[i]
            column = []
            for n in range(n_max + 1):
                total = None
                binom = Fraction(1)  # C(n, n)
                power = Fraction(1) if is_exact(d) else mpf(1)
                last_term = None
                for m in range(n, m_max + 1):
                    term = num_mul(num_mul(acc(m, i), binom, bits), power, bits)
                    total = term if total is None else num_add(total, term, bits)
                    last_term = term
                    binom = binom * (m + 1) // (m + 1 - n) if isinstance(binom, int) \
                        else Fraction(binom) * (m + 1) / (m + 1 - n)
                    power = num_mul(power, d, bits)
                # geometric tail audit at the truncation edge
                tail_ratio = _tail_ratio(acc, i, m_max, n, d, bits)
                if tail_ratio is not None:
                    if tail_ratio >= mpf("0.95"):
                        raise InsufficientDepthError(
                            "truncation tail has no geometric bound at n=%d, "
                            "grid index %d; raise m_max" % (n, i))
                    estimate = (abs(as_mpf(last_term, bits)) * tail_ratio
                                / (1 - tail_ratio))
                    budget = mpf(tail_tol) * (1 + abs(as_mpf(total, bits)))
                    if estimate > budget:
                        raise InsufficientDepthError(
                            "truncation tail %s exceeds tolerance at n=%d, "
                            "grid index %d; raise m_max"
                            % (decimal_str(estimate, 64), n, i))
                column.append(total)
            columns.append(column)
    out = _pack(False, columns, "recenter(%s)" % series.coeffs.label)
    return _attach_witness(out, grid, series.rho)


def _tail_ratio(acc, i, m_max, n, d, bits):
    with working_precision(bits):
        a_hi = as_mpf(acc(m_max, i), bits)
        a_lo = as_mpf(acc(m_max - 1, i), bits)
        if a_lo == 0 or a_hi == 0:
            return None
        growth = abs(a_hi / a_lo) * abs(as_mpf(d, bits))
        return growth * (m_max + 1) / max(1, m_max + 1 - n)


def reverse(a: HpsCoefficients, n_max: int, grid: EpsGrid, rho: Gauge,
            m_max: int = 8) -> HpsCoefficients:
    """Compositional inverse g of a - a_0: compose(a - a_0, g) = identity.

    Solved order by order; order n of the composition is linear in g_n with
    coefficient a_1, so an invertibility margin on a_1 drives the division.
    """
    bits = grid.precision
    rho_values = rho.values_on(grid)
    acc = coeff_accessor(a, grid, rho)
    slopes = [acc(1, i) for i in range(len(grid))]
    margin = _invertibility_margin(slopes, rho_values, list(grid.tail), bits, m_max)
    if margin is None:
        raise NotInvertibleError(
            "a_1 admits no lower bound rho^m with m <= %d on the tail" % m_max)

    def invert(u):
        tilde = [Fraction(0) if is_exact(u[0]) else mpf(0)] + list(u[1:n_max + 1])
        g = [Fraction(0), num_div(1, tilde[1], bits)]
        for n in range(2, n_max + 1):
            g.append(Fraction(0))
            h = _compose_column(tilde, g, n, bits)
            g[n] = num_div(num_sub(0, h[n], bits), tilde[1], bits)
        return g

    out = _map_columns(invert, grid, rho, n_max, "reverse(%s)" % a.label, a)
    return _attach_witness(out, grid, rho)


def coeff_ring_ops(a: HpsCoefficients, b: HpsCoefficients, grid: EpsGrid,
                   rho: Gauge, n_max: Optional[int] = None) -> dict:
    """Ring operations on coefficient families: index-wise sum and product."""
    n_max = n_max if n_max is not None else min(a.bound_or(DEFAULT_DEPTH),
                                                b.bound_or(DEFAULT_DEPTH))
    bits = grid.precision

    def prod(u, v):
        return [num_mul(u[n], v[n], bits) for n in range(n_max + 1)]

    product = _map_columns(prod, grid, rho, n_max,
                           "(%s).(%s)" % (a.label, b.label), a, b)
    return {"sum": add(a, b, grid, rho, n_max=n_max),
            "product": _attach_witness(product, grid, rho)}


def identity_coefficients(n_max: int) -> HpsCoefficients:
    rows = [Fraction(0), Fraction(1)] + [Fraction(0)] * (n_max - 1)
    return HpsCoefficients.from_column(rows[:n_max + 1], label="x")
