"""Canonical example families and seeded random family generators.

The same objects back the demos, the command-line `example` subcommands and
the acceptance suite: the geometric family (all ones), its doubled cousin
2^n, the exponential family 1/n!, the zero-class net rho^((n+1)/eps) (a
family strongly equivalent to zero whose root curve has a genuinely
epsilon-dependent limit), and the mollifier-scaled Dirac delta.

Random families are dyadic rationals with bounded mantissas so that algebra
on them stays exact and their admissibility witnesses are stable.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .graf import MollifierSpec, delta_coeffs, make_mollifier
from .nets import EpsGrid, Gauge, GenNum
from .series import HpsCoefficients, HpsSeries, attach_weak_witness, make_series


def default_grid(precision: int = 256, tail_start: int = 1,
                 k_min: int = 1, k_max: int = 8) -> EpsGrid:
    return EpsGrid.decades(k_min=k_min, k_max=k_max, tail_start=tail_start,
                           precision=precision)


def standard_gauges() -> Tuple[Gauge, Gauge]:
    return Gauge.from_text("eps", "rho"), Gauge.from_text("eps", "sigma")


def geometric_coeffs() -> HpsCoefficients:
    return HpsCoefficients.from_expr("1", label="geometric")


def doubling_coeffs() -> HpsCoefficients:
    return HpsCoefficients.from_expr("2^n", label="doubling")


def exponential_coeffs() -> HpsCoefficients:
    return HpsCoefficients.from_expr("1/factorial(n)", label="exponential")


def zero_class_coeffs() -> HpsCoefficients:
    return HpsCoefficients.from_expr("rho^((n+1)/eps)", label="zero-class")


CORPUS_NAMES = ("geometric", "doubling", "exponential", "zero-class", "delta")

_EXPR_FAMILIES = {"geometric": geometric_coeffs,
                  "doubling": doubling_coeffs,
                  "exponential": exponential_coeffs,
                  "zero-class": zero_class_coeffs}


def build_series(name: str, grid: EpsGrid, rho: Optional[Gauge] = None,
                 sigma: Optional[Gauge] = None,
                 delta_n_max: int = 96) -> HpsSeries:
    """One named example series, centered at zero, witness attached."""
    if rho is None or sigma is None:
        rho, sigma = standard_gauges()
    zero = GenNum.constant(0, grid)
    if name == "delta":
        spec = make_mollifier(grid, rho, b_exponent=1, n_max=delta_n_max)
        return make_series(delta_coeffs(spec, delta_n_max, rho), zero,
                           rho, sigma, grid)
    if name not in _EXPR_FAMILIES:
        raise KeyError("unknown corpus family %r" % name)
    coeffs = attach_weak_witness(_EXPR_FAMILIES[name](), rho, grid)
    return make_series(coeffs, zero, rho, sigma, grid)


def corpus_series(grid: EpsGrid, rho: Optional[Gauge] = None,
                  sigma: Optional[Gauge] = None,
                  with_delta: bool = True,
                  delta_n_max: int = 96) -> Dict[str, HpsSeries]:
    """The named example series, centered at zero, witnesses attached."""
    names = CORPUS_NAMES if with_delta else CORPUS_NAMES[:-1]
    return {name: build_series(name, grid, rho, sigma, delta_n_max)
            for name in names}


def delta_setup(grid: EpsGrid, rho: Optional[Gauge] = None,
                b_exponent: int = 1,
                n_max: int = 96) -> Tuple[MollifierSpec, HpsCoefficients]:
    if rho is None:
        rho, _ = standard_gauges()
    spec = make_mollifier(grid, rho, b_exponent=b_exponent, n_max=n_max)
    return spec, delta_coeffs(spec, n_max, rho)


def _dyadic(rng: random.Random, lo=Fraction(1, 2), hi=Fraction(2)) -> Fraction:
    """Random dyadic in [lo, hi] with a random sign, 12 mantissa bits."""
    span = hi - lo
    mantissa = Fraction(rng.randrange(0, 4097), 4096)
    value = lo + mantissa * span
    return value if rng.random() < 0.5 else -value


def random_dyadic_family(rng: random.Random, n_max: int,
                         growth: Optional[Fraction] = None,
                         nonzero_head: bool = False) -> HpsCoefficients:
    """Exact family m_n * g^n with |m_n| in [1/2, 2] and dyadic growth g."""
    if growth is None:
        growth = Fraction(rng.choice((1, 2, 4)))
    values = []
    power = Fraction(1)
    for n in range(n_max + 1):
        m = _dyadic(rng)
        if nonzero_head and n == 0:
            m = abs(m)
        values.append(m * power)
        power *= growth
    return HpsCoefficients.from_column(values, label="random-dyadic")


def random_smooth_family(rng: random.Random, n_max: int) -> HpsCoefficients:
    """c * lambda^n * (n+1)^j: ratio-smooth, so radius estimates are sharp."""
    scale = abs(_dyadic(rng))
    lam = Fraction(rng.choice((1, 2, 4)), rng.choice((1, 2, 4)))
    j = rng.choice((0, 1, 2))
    values = []
    power = Fraction(1)
    for n in range(n_max + 1):
        values.append(scale * power * Fraction(n + 1) ** j)
        power *= lam
    return HpsCoefficients.from_column(
        values, label="random-smooth(lam=%s, j=%d)" % (lam, j))


def random_division_pair(rng: random.Random, n_max: int):
    """(a, b) with b_0 a unit-sized dyadic, both exactly representable."""
    a = random_dyadic_family(rng, n_max)
    b = random_dyadic_family(rng, n_max, nonzero_head=True)
    return a, b
