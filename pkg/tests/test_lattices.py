import itertools
import random

from ringsieve.lattices import (
    crt_pair,
    gen_multipliers,
    hnf_from_rows,
    lat_contains,
    lat_intersection,
    lat_reduce,
    quotient_residues,
    residues,
    solve_integer,
)


def test_hnf_canonical_form():
    h = hnf_from_rows([(4, 0), (1, 2), (3, 2)], 2)
    (a, z), (b, c) = h
    assert z == 0 and a > 0 and c > 0 and 0 <= b < a


def test_hnf_1d():
    assert hnf_from_rows([(6,), (10,)], 1) == ((2,),)


def test_reduce_and_contains():
    h = ((4, 0), (1, 2))
    for _ in range(200):
        rng = random.Random(_)
        v = (rng.randrange(-50, 50), rng.randrange(-50, 50))
        r = lat_reduce(v, h)
        assert lat_reduce(r, h) == r
        # difference lies in the lattice
        assert lat_contains((v[0] - r[0], v[1] - r[1]), h)
    assert lat_contains((4, 0), h) and lat_contains((5, 2), h)
    assert not lat_contains((1, 0), h)


def test_residue_count_matches_determinant():
    h = ((6, 0), (2, 3))
    reps = list(residues(h))
    assert len(reps) == 18
    assert len({lat_reduce(r, h) for r in reps}) == 18


def test_quotient_residues():
    coarse = ((2, 0), (0, 1))
    fine = ((4, 0), (0, 4))
    reps = quotient_residues(coarse, fine)
    assert len(reps) == 8
    assert len(set(reps)) == 8
    for r in reps:
        assert lat_contains(r, coarse)


def test_solve_integer():
    mat = [[4, 0, -5, 0], [0, 4, 0, -5]]
    w = solve_integer(mat, [3 - 2, 0])
    assert w is not None
    assert 4 * w[0] - 5 * w[2] == 1 and 4 * w[1] - 5 * w[3] == 0
    assert solve_integer([[2, 4]], [3]) is None


def test_crt_pair_scalars():
    y, mod = crt_pair((3,), ((4,),), (2,), ((5,),))
    assert y == (7,) and mod == ((20,),)
    y, mod = crt_pair((1, 0), ((9, 0), (0, 9)), (0, 1), ((4, 0), (0, 4)))
    assert mod == ((36, 0), (0, 36))
    assert y[0] % 9 == 1 and y[0] % 4 == 0 and y[1] % 9 == 0 and y[1] % 4 == 1


def test_intersection_of_coprime_moduli():
    assert lat_intersection(((4,),), ((9,),)) == ((36,),)
    h = lat_intersection(((2, 0), (0, 2)), ((3, 0), (1, 1)))
    # intersection has index lcm-like determinant dividing the product
    det = h[0][0] * h[1][1]
    assert det == 12


def test_multiplier_order_is_radial_positive_first():
    seq1 = list(itertools.islice(gen_multipliers(1), 5))
    assert seq1 == [(0,), (1,), (-1,), (2,), (-2,)]
    seq2 = list(itertools.islice(gen_multipliers(2), 9))
    assert seq2[0] == (0, 0)
    assert seq2[1:3] == [(0, 1), (0, -1)]
    layer1 = set(seq2[1:9])
    assert layer1 == {(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)} - {(0, 0)}
