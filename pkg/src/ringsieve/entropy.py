"""Dedekind zeta values, the patch-counting entropy product, and exact counts.

All analytic quantities are returned as rational enclosures: Euler products
are truncated at a norm cutoff and widened by rigorous tail bounds.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import TailNotBoundable
from .intervals import RationalInterval, _round_down, _round_up, log2_interval
from .primes import primes_upto
from .rings import EtaleAlgebra, split_prime
from .sieve import SieveSpec, density_interval
from .shiftspace import count_admissible


def _product_tail_upper(degree: int, s: int, cutoff: int) -> Fraction:
    """Upper bound for prod over primes of norm > cutoff of (1 - Nm^-s)^-1.

    Dominated by the product over all integers m > cutoff, taken degree-fold;
    explicit leading factors are split off until the remaining sum bound
    drops below 1/4.
    """
    u = Fraction(1)
    m = cutoff
    while True:
        rem = Fraction(1, (s - 1) * m ** (s - 1))  # sum_{j > m} j^-s <= this
        if rem < Fraction(1, 4):
            break
        m += 1
        u *= 1 / (1 - Fraction(1, m**s))
    u *= 1 / (1 - rem)
    return u**degree


def zeta_K(algebra: EtaleAlgebra, s: int, cutoff: int) -> RationalInterval:
    """Enclosure of the Dedekind zeta value via the Euler product.

    Multiplies the local factors of all primes with norm <= cutoff and widens
    upward by the tail bound; the lower end needs no correction since every
    omitted factor exceeds 1.
    """
    if s < 2:
        raise TailNotBoundable("the Euler product requires s >= 2")
    lo = Fraction(1)
    hi = Fraction(1)
    for p in primes_upto(cutoff):
        for prime in split_prime(algebra, p):
            if prime.norm > cutoff:
                continue
            f = 1 / (1 - Fraction(1, prime.norm**s))
            lo = _round_down(lo * f)
            hi = _round_up(hi * f)
    hi = _round_up(hi * _product_tail_upper(algebra.degree, s, max(cutoff, 1)))
    return RationalInterval(lo, hi)


def entropy_product(sieve: SieveSpec, cutoff: int) -> RationalInterval:
    """Patch-counting entropy as log(2) times the density enclosure."""
    return log2_interval().mul(density_interval(sieve, cutoff))


def empirical_entropy(sieve: SieveSpec, box_size: int) -> float:
    """log(#admissible subsets of [0, N)) / N from the exact count.

    Convergence to the entropy is slow; this is reported as trend data next
    to the product enclosure, with no closeness asserted.
    """
    return math.log(count_admissible(sieve, box_size)) / box_size
