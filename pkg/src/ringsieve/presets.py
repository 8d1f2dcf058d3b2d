"""Built-in demonstration sieves, codes, and patterns over the rationals.

These are the worked examples exercised by the test suite and the CLI
selftests: a two-class sieve with a non-translation involution symmetry, a
pair-collapsing factor code, and a factor code with an exceptional prime.
"""

from __future__ import annotations

from .linmaps import ZLinearMap
from .rings import QQ, split_prime
from .shiftspace import Pattern, WindowCode, int_pattern
from .sieve import SieveSpec, TailRule, build_sieve


def _q_prime(p: int):
    return split_prime(QQ, p)[0]


def two_class_sieve() -> SieveSpec:
    """Forbid {0, 1} mod p for p >= 5; nothing at 2 and 3."""
    return build_sieve(
        QQ,
        TailRule.classes_mod_p([0, 1]),
        {_q_prime(2): (1, ()), _q_prime(3): (1, ())},
    )


def neighbor_flip_code() -> WindowCode:
    """Involution symmetry of the two-class space: flip x when both neighbors agree."""
    window = int_pattern([-1, 0, 1])
    pats = tuple(int_pattern(v) for v in ([0], [0, 1], [-1, 0], [-1, 1]))
    return WindowCode(ZLinearMap.identity(QQ), window, pats)


def neighbor_flip_demo_pattern() -> tuple[Pattern, Pattern]:
    """(pattern, known box) for the involution demo."""
    return int_pattern([-3, -2, -1, 2, 3, 4, 9, 17, 19]), int_pattern(range(-4, 21))


NEIGHBOR_FLIP_EXPECTED = (-3, -1, 2, 4, 9, 17, 18, 19)


def pair_sieves() -> tuple[SieveSpec, SieveSpec]:
    """Source forbids {0} mod p, target {0, 1} mod p, for p >= 3; nothing at 2."""
    r = build_sieve(QQ, TailRule.classes_mod_p([0]), {_q_prime(2): (1, ())})
    s = build_sieve(QQ, TailRule.classes_mod_p([0, 1]), {_q_prime(2): (1, ())})
    return r, s


def adjacent_pair_code() -> WindowCode:
    """Factor code keeping x iff both x and x+1 are present."""
    window = int_pattern([0, 1])
    return WindowCode(ZLinearMap.identity(QQ), window, (int_pattern([0, 1]),))


def pair_demo_patterns() -> tuple[Pattern, Pattern]:
    x1 = int_pattern([1, 6, 7, 9, 12, 13, 16, 18, 19, 21, 22])
    x2 = int_pattern([6, 7, 12, 13, 18, 19, 21, 22])
    return x1, x2


PAIR_EXPECTED = (6, 12, 18, 21)


def exceptional_factor_sieves() -> tuple[SieveSpec, SieveSpec]:
    """Factor pair with an exceptional prime at 5.

    Source: nothing at 2, 3; {0} mod 5; {0,1,2} mod p >= 7.
    Target: nothing at 2, 3; {0,3} mod 5; {0,...,5} mod p >= 7.
    """
    r = build_sieve(
        QQ,
        TailRule.classes_mod_p([0, 1, 2]),
        {_q_prime(2): (1, ()), _q_prime(3): (1, ()), _q_prime(5): (1, ((0,),))},
    )
    s = build_sieve(
        QQ,
        TailRule.classes_mod_p([0, 1, 2, 3, 4, 5]),
        {_q_prime(2): (1, ()), _q_prime(3): (1, ()), _q_prime(5): (1, ((0,), (3,)))},
    )
    return r, s


def exceptional_factor_code() -> WindowCode:
    window = int_pattern([0, 1, 2, 3])
    pats = (int_pattern([0, 1, 3]), int_pattern([0, 2, 3]))
    return WindowCode(ZLinearMap.identity(QQ), window, pats)
