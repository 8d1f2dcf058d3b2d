import random
from fractions import Fraction

import numpy as np
import pytest

from ringsieve import QQ, make_algebra, reduce_mod, split_prime, ideal_power
from ringsieve.errors import ClassOutOfRange, PreconditionFailed, TailNotBoundable
from ringsieve.sieve import (
    LocalSet,
    TailRule,
    build_sieve,
    count_members,
    density_interval,
    empirical_density,
    enumerate_V,
    format_sieve,
    kfree_sieve,
    local_set,
    membership,
    parse_sieve_file,
    tail_count,
    _tail_local_set,
)


def q_prime(p):
    return split_prime(QQ, p)[0]


def test_build_flags(squarefree_q):
    assert squarefree_q.non_large and squarefree_q.cofinite
    empty = build_sieve(QQ, TailRule.empty())
    assert empty.non_large and not empty.cofinite
    two = build_sieve(QQ, TailRule.classes_mod_p([0, 1]), {q_prime(2): (1, ()), q_prime(3): (1, ())})
    assert two.non_large and two.cofinite
    assert {ls.prime.p for ls in two.exceptions if not ls.classes} == {2, 3}
    # without the exception at 2, the classes {0,1} cover everything mod 2
    covering = build_sieve(QQ, TailRule.classes_mod_p([0, 1]))
    assert not covering.non_large


def test_class_out_of_range():
    with pytest.raises(ClassOutOfRange):
        build_sieve(QQ, TailRule.kfree(2), {q_prime(3): (2, ((9,),))})
    with pytest.raises(ClassOutOfRange):
        LocalSet(ideal_power(q_prime(3), 2), ((1,), (1,)))


def test_local_set_examples(squarefree_q):
    ls = local_set(squarefree_q, q_prime(5))
    assert ls.classes == ((0,),) and ls.measure == Fraction(1, 25)
    two = build_sieve(QQ, TailRule.classes_mod_p([0, 1]), {q_prime(2): (1, ()), q_prime(3): (1, ())})
    ls7 = local_set(two, q_prime(7))
    assert ls7.classes == ((0,), (1,)) and ls7.measure == Fraction(2, 7)
    empty = build_sieve(QQ, TailRule.empty())
    assert local_set(empty, q_prime(11)).measure == 0


def test_membership_examples(squarefree_q, k3):
    v = membership(squarefree_q, QQ.from_int(12))
    assert not v.member and v.prime.p == 2 and v.class_rep == (0,)
    assert membership(squarefree_q, QQ.from_int(10)).member
    sq3 = kfree_sieve(k3, 2)
    v3 = membership(sq3, k3.from_int(3))
    assert not v3.member and v3.prime.p == 3 and v3.prime.kind == "ramified"
    assert not membership(squarefree_q, QQ.from_int(0)).member


def test_membership_translation_coherence(squarefree_q, k13):
    rng = random.Random(3)
    for sieve in (squarefree_q, kfree_sieve(k13, 2)):
        K = sieve.algebra
        for _ in range(250):
            x = K.from_flat([rng.randrange(-200, 201) for _ in range(K.degree)])
            p = rng.choice([2, 3, 5, 7, 11])
            prime = rng.choice(split_prime(K, p))
            ls = _tail_local_set(sieve, prime)
            expected = ls.modulus.reduce_coords(x.coords[prime.component]) in ls.classes
            assert (ls.hits(x) is not None) == expected


def test_enumerate_examples(squarefree_q):
    vals = [x.coords[0][0] for x in enumerate_V(squarefree_q, 10)]
    assert vals == [-10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10]
    empty = build_sieve(QQ, TailRule.empty())
    assert [x.coords[0][0] for x in enumerate_V(empty, 2)] == [-2, -1, 0, 1, 2]
    one_free = kfree_sieve(QQ, 1)
    assert [x.coords[0][0] for x in enumerate_V(one_free, 10)] == [-1, 1]


def test_enumerate_matches_square_sieve_oracle(squarefree_q):
    B = 10_000
    arr = np.ones(B + 1, dtype=bool)
    arr[0] = False
    q = 2
    while q * q <= B:
        arr[q * q :: q * q] = False
        q += 1
    oracle = int(arr.sum())
    assert count_members(squarefree_q, B) == 2 * oracle
    small = [x.coords[0][0] for x in enumerate_V(squarefree_q, 300)]
    assert small == [x for x in range(-300, 301) if x != 0 and arr[abs(x)]]


def test_enumerate_equals_box_filter(k2):
    sieve = kfree_sieve(k2, 2)
    via_filter = [x for x in k2.box(4) if membership(sieve, x).member]
    assert enumerate_V(sieve, 4) == via_filter


def test_quadratic_membership_against_valuation_oracle(k2):
    from ringsieve.rings import valuation

    sieve = kfree_sieve(k2, 2)
    for x in k2.box(5):
        if x.is_zero():
            continue
        nm = abs(x.norm())
        free = True
        for p in range(2, nm + 1):
            from ringsieve.primes import is_prime

            if not is_prime(p) or nm % p:
                continue
            for prime in split_prime(k2, p):
                if valuation(x, prime) >= 2:
                    free = False
        assert membership(sieve, x).member == free


def test_density_interval(squarefree_q):
    iv = density_interval(squarefree_q, 10_000)
    assert iv.contains(Fraction(607927, 10**6)) or (
        float(iv.lo) < 0.607927 < float(iv.hi)
    )
    assert iv.lo > 0
    empty = build_sieve(QQ, TailRule.empty())
    one = density_interval(empty, 10)
    assert one.lo == one.hi == 1
    with pytest.raises(TailNotBoundable):
        density_interval(kfree_sieve(QQ, 1), 100)


def test_density_positive_on_grid():
    for d in (None, 2, 13):
        K = QQ if d is None else make_algebra([d])
        for k in (2, 3):
            iv = density_interval(kfree_sieve(K, k), 500)
            assert iv.lo > 0


def test_empirical_density_close_to_interval(squarefree_q):
    iv = density_interval(squarefree_q, 10_000)
    emp = empirical_density(squarefree_q, 10**6)
    assert abs(emp - iv.midpoint) <= Fraction(2, 1000)


def test_count_members_with_exceptions_and_class_tails():
    # exception: forbid 1 mod 4 as well
    sv = build_sieve(QQ, TailRule.kfree(2), {q_prime(2): (2, ((0,), (1,)))})
    got = count_members(sv, 500)
    brute = sum(1 for x in enumerate_V(sv, 500))
    assert got == brute
    two = build_sieve(QQ, TailRule.classes_mod_p([0, 1]), {q_prime(2): (1, ()), q_prime(3): (1, ())})
    got = count_members(two, 200)
    brute = len(enumerate_V(two, 200))
    assert got == brute


def test_tail_count_examples_and_trend():
    assert tail_count(QQ, 2, 50, 10) == 0
    assert tail_count(QQ, 2, 200, 10) == 8
    # frozen from the double-loop divisor oracle
    trend = [(10, 11556), (20, 5892), (40, 2924), (80, 1354), (160, 482)]
    for m, expected in trend:
        assert tail_count(QQ, 2, 10**5, m) == expected
    for (m1, c1), (m2, c2) in zip(trend, trend[1:]):
        assert c2 <= c1  # monotone in M
    with pytest.raises(PreconditionFailed):
        tail_count(QQ, 1, 100, 10)


def test_tail_count_quadratic_matches_oracle(k2):
    # frozen from the ideal-valuation oracle
    assert tail_count(k2, 2, 8, 2) == 28


def test_sieve_file_roundtrip(k2):
    sv = build_sieve(
        k2, TailRule.kfree(2), {split_prime(k2, 2)[0]: (2, ((0, 0), (1, 1)))}
    )
    assert parse_sieve_file(format_sieve(sv)) == sv
    text = "algebra Q\ntail classes 0,1\nexception 2 1 : -\nexception 3 1 : -\n"
    sv2 = parse_sieve_file(text)
    assert sv2.non_large and len(sv2.exceptions) == 2
