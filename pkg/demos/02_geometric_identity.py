"""The geometric identity at an infinitesimal argument.

Truncating the geometric series at the gauge-sized index N = floor(1/sigma)
and evaluating at x = rho reproduces 1/(1 - rho) up to a difference below
every tested power of rho: the package's hello-world identity.
"""

import mpmath

from hyperseries import EpsGrid, GenNum, corpus
from hyperseries import ext_eq, hypernat_from_expr, hyperfinite_sum, series_limit

print(__doc__)

grid = EpsGrid.decades()
rho, sigma = corpus.standard_gauges()
geometric = corpus.build_series("geometric", grid, rho, sigma)

drho = GenNum.from_expr("rho", grid, rho)
upper = hypernat_from_expr("1/eps", sigma, grid)
print("truncation indices:", upper.values[:4], "... (witness M = %d)"
      % upper.sigma_witness)

sums = hyperfinite_sum(geometric, drho, upper)
closed = GenNum.constant(1, grid) / (GenNum.constant(1, grid) - drho)
print("partial sums head :", [mpmath.nstr(v, 12) for v in sums.mpf_values()[:3]])
print("closed form head  :", [mpmath.nstr(v, 12) for v in closed.mpf_values()[:3]])

verdict = ext_eq(sums, closed, rho, grid, q_max=6)
print("identity verdict  :", verdict.status, verdict.witness)
print()

# away from the infinitesimal scale the plain limit does the same job
from fractions import Fraction
half = GenNum.constant(Fraction(1, 2), grid)
limit = series_limit(geometric, half, q_target=8)
print("limit at 1/2      :", [mpmath.nstr(v, 12) for v in limit.mpf_values()[:3]])
print("expected          : 2 everywhere (within rho^4 on the tail)")
