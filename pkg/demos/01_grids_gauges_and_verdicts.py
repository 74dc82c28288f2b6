"""Grids, gauges, and three-valued verdicts.

Everything in this package is a net: a value for every sample point eps of
a finite grid inside (0, 1].  A gauge (by default rho = eps) sets the
measuring scale, and every asymptotic statement ("this net is bounded by a
power of rho", "this net vanishes faster than every power") is answered by
a verdict carrying an explicit witness or counterexample.
"""

from hyperseries import EpsGrid, Gauge, GenNum
from hyperseries import is_moderate, is_negligible, valuation, gauge_le_star

print(__doc__)

# ---------------------------------------------------------------------
# the standard grid: eps = 10^-1 .. 10^-8, tail from the second point on
# ---------------------------------------------------------------------
grid = EpsGrid.decades()
rho = Gauge.from_text("eps")
print("grid points :", ", ".join("1e-%d" % k for k in range(1, 9)))
print("tail        : indices", list(grid.tail))
print("precision   :", grid.precision, "bits")
print()

# ---------------------------------------------------------------------
# valuations: reading a net in powers of rho
# ---------------------------------------------------------------------
for text in ("rho^2", "rho^(-3)", "rho^(1/eps)"):
    x = GenNum.from_expr(text, grid, rho)
    exponents = valuation(x, rho, grid)
    print("valuation of %-12s -> head %s" % (text, [str(v) for v in exponents[:3]]))
print()

# ---------------------------------------------------------------------
# moderateness: bounded by SOME negative power of rho on the tail
# ---------------------------------------------------------------------
for text in ("rho^(-2)", "rho^(-(1/eps))"):
    verdict = is_moderate(GenNum.from_expr(text, grid, rho), rho, grid, n_max=8)
    print("moderate?  %-14s -> %s %s" % (text, verdict.status,
                                         verdict.witness or verdict.counterexample))
print()

# ---------------------------------------------------------------------
# negligibility: below EVERY power of rho; a fixed power can never
# witness that, which is why rho^3 stays inconclusive
# ---------------------------------------------------------------------
for text in ("rho^(1/eps)", "rho^3"):
    verdict = is_negligible(GenNum.from_expr(text, grid, rho), rho, grid, q_max=6)
    print("negligible? %-13s -> %-12s %s" % (text, verdict.status, verdict.notes))
print()

# ---------------------------------------------------------------------
# comparing gauges: sigma below a power of rho
# ---------------------------------------------------------------------
for text in ("eps", "eps^2", "exp(-exp(1/eps))"):
    sigma = Gauge.from_text(text, "sigma")
    verdict = gauge_le_star(sigma, rho, EpsGrid.decades(1, 4))
    print("sigma = %-18s -> Q = %s  %s" % (text, verdict.witness["Q"],
                                           verdict.notes))
