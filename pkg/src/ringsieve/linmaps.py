"""Z-linear maps between rings of integers and their local sieve conditions.

Covers induced maps modulo prime powers, exhaustive local-condition checks,
monomial decompositions A = M_eps . tau, preserver scans over small prime
fields, translate-avoidance witnesses along unit directions, and
unit-preservation tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceeded, NoWitness, PreconditionFailed
from .lattices import (
    Hnf,
    hnf_from_rows,
    lat_contains,
    preimage_lattice,
    quotient_residues,
)
from .primes import primes_upto
from .rings import (
    AlgebraHom,
    AlgebraicInt,
    EtaleAlgebra,
    PrimeIdeal,
    algebra_homs,
    ideal_power,
    split_prime,
    units_up_to,
)
from .sieve import SieveSpec, local_set

DEFAULT_CLASS_BUDGET = 2_000_000


@dataclass(frozen=True)
class ZLinearMap:
    """Integer matrix acting on flat coordinates over the integral bases."""

    source: EtaleAlgebra
    target: EtaleAlgebra
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.matrix) != self.target.degree or any(
            len(row) != self.source.degree for row in self.matrix
        ):
            raise PreconditionFailed("matrix shape does not match algebra degrees")

    def apply(self, x: AlgebraicInt) -> AlgebraicInt:
        if x.algebra != self.source:
            raise PreconditionFailed("element not in the source algebra")
        v = x.flat()
        return self.target.from_flat(
            tuple(sum(r * c for r, c in zip(row, v)) for row in self.matrix)
        )

    def __call__(self, x: AlgebraicInt) -> AlgebraicInt:
        return self.apply(x)

    def apply_flat(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * c for r, c in zip(row, v)) for row in self.matrix)

    @property
    def is_square(self) -> bool:
        return self.source.degree == self.target.degree

    def det(self) -> int:
        if not self.is_square:
            raise PreconditionFailed("determinant of a non-square map")
        m = self.matrix
        n = len(m)
        if n == 1:
            return m[0][0]
        if n == 2:
            return m[0][0] * m[1][1] - m[0][1] * m[1][0]
        total = 0
        for perm in itertools.permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            prod = sign
            for i in range(n):
                prod *= m[i][perm[i]]
            total += prod
        return total

    @classmethod
    def identity(cls, algebra: EtaleAlgebra) -> "ZLinearMap":
        n = algebra.degree
        return cls(algebra, algebra, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def from_hom(cls, hom: AlgebraHom) -> "ZLinearMap":
        return cls(hom.source, hom.target, tuple(tuple(r) for r in hom.matrix()))

    @classmethod
    def multiplication(cls, eps: AlgebraicInt) -> "ZLinearMap":
        alg = eps.algebra
        cols = [(eps * b).flat() for b in alg.basis()]
        rows = tuple(tuple(col[i] for col in cols) for i in range(alg.degree))
        return cls(alg, alg, rows)

    @classmethod
    def monomial(cls, tau: AlgebraHom, eps: AlgebraicInt) -> "ZLinearMap":
        """The map x -> eps * tau(x)."""
        if eps.algebra != tau.target:
            raise PreconditionFailed("unit must live in the hom target")
        cols = [(eps * tau.apply(b)).flat() for b in tau.source.basis()]
        rows = tuple(tuple(col[i] for col in cols) for i in range(tau.target.degree))
        return cls(tau.source, tau.target, rows)


@dataclass(frozen=True)
class MonomialDecomposition:
    """A = M_eps . tau with eps = A(1)."""

    tau: AlgebraHom
    epsilon: AlgebraicInt


@dataclass(frozen=True)
class InducedMap:
    """The reduction of a Z-linear map modulo p^k on both sides."""

    linmap: ZLinearMap
    p: int
    k: int
    bijective: bool

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def matrix_mod(self) -> tuple[tuple[int, ...], ...]:
        q = self.modulus
        return tuple(tuple(v % q for v in row) for row in self.linmap.matrix)

    def apply_class(self, flat: Sequence[int]) -> tuple[int, ...]:
        q = self.modulus
        return tuple(v % q for v in self.linmap.apply_flat(flat))

    def table(self, budget: int = DEFAULT_CLASS_BUDGET) -> dict[tuple[int, ...], tuple[int, ...]]:
        q = self.modulus
        n = self.linmap.source.degree
        if q**n > budget:
            raise BudgetExceeded(f"{q**n} classes exceed table budget {budget}")
        out = {}
        for flat in itertools.product(range(q), repeat=n):
            out[flat] = self.apply_class(flat)
        return out


def induced_mod(a: ZLinearMap, p: int, k: int) -> InducedMap:
    """The induced map O_K/p^k -> O_L/p^k; bijective iff det is a unit mod p."""
    bij = a.is_square and a.det() % p != 0
    return InducedMap(a, p, k, bij)


@dataclass(frozen=True)
class LocalCheck:
    """Outcome of a local-condition check at one prime number."""

    ok: bool
    p: int
    counterexample: AlgebraicInt | None = None
    image: AlgebraicInt | None = None


def _needed_exponent(sieve: SieveSpec, primes: Sequence[PrimeIdeal]) -> int:
    m = 1
    for q in primes:
        ls = local_set(sieve, q)
        m = max(m, -(-ls.modulus.k // q.e))  # ceil(k/e): p^m O contained in q^k
    return m


def check_local_condition(
    a: ZLinearMap,
    r_sieve: SieveSpec,
    s_sieve: SieveSpec,
    p: int,
    budget: int = DEFAULT_CLASS_BUDGET,
) -> LocalCheck:
    """Exhaustively test A(V_p(K, R)) inside V_p(L, S).

    Enumerates every class of O_K/p^m for the smallest sufficient m; on
    failure reports a violating class of V_p(K, R).
    """
    if a.source != r_sieve.algebra or a.target != s_sieve.algebra:
        raise PreconditionFailed("sieve algebras do not match the map")
    src_primes = split_prime(a.source, p)
    dst_primes = split_prime(a.target, p)
    m = max(_needed_exponent(r_sieve, src_primes), _needed_exponent(s_sieve, dst_primes))
    q = p**m
    n = a.source.degree
    if q**n > budget:
        raise BudgetExceeded(f"{q**n} classes exceed budget {budget}")
    r_sets = [local_set(r_sieve, pr) for pr in src_primes]
    s_sets = [local_set(s_sieve, pr) for pr in dst_primes]
    for flat in itertools.product(range(q), repeat=n):
        x = a.source.from_flat(flat)
        if any(ls.hits(x) is not None for ls in r_sets):
            continue
        y = a.apply(x)
        if any(ls.hits(y) is not None for ls in s_sets):
            return LocalCheck(False, p, x, y)
    return LocalCheck(True, p)


def _kfree_fast_applicable(sieve: SieveSpec, p: int) -> bool:
    if not sieve.tail.is_kfree:
        return False
    return all(ls.prime.p != p for ls in sieve.exceptions)


def _check_local_condition_kfree(
    a: ZLinearMap, r_sieve: SieveSpec, s_sieve: SieveSpec, p: int
) -> LocalCheck:
    """Kernel-lattice route for k-free sieves: enumerate only A^{-1}(q^l).

    The condition holds iff for every target prime q | p the preimage of the
    zero class of q^l inside O_K/p^m stays inside the union of the zero
    classes of the source primes; preimages are lattices, so the enumeration
    is |preimage| = p^{nm} / Nm(q)^l points instead of p^{nm}.
    """
    k = r_sieve.tail.exponent
    l = s_sieve.tail.exponent
    m = max(k, l)
    src_primes = split_prime(a.source, p)
    dst_primes = split_prime(a.target, p)
    src_lattices = [(pr.component, ideal_power(pr, k).hnf) for pr in src_primes]

    n_src = a.source.degree
    if n_src > 2:
        return check_local_condition(a, r_sieve, s_sieve, p)
    fine: Hnf = hnf_from_rows(
        [[p**m if i == j else 0 for j in range(n_src)] for i in range(n_src)], n_src
    )

    offsets = []
    off = 0
    for spec in a.target.components:
        offsets.append(off)
        off += spec.degree

    mat = [list(row) for row in a.matrix]
    for q_prime in dst_primes:
        w = ideal_power(q_prime, l).hnf
        rows = []
        for j, spec in enumerate(a.target.components):
            base = offsets[j]
            if j == q_prime.component:
                for row in w:
                    full = [0] * a.target.degree
                    for jj, v in enumerate(row):
                        full[base + jj] = v
                    rows.append(full)
            else:
                for jj in range(spec.degree):
                    full = [0] * a.target.degree
                    full[base + jj] = 1
                    rows.append(full)
        target_lat = hnf_from_rows(rows, a.target.degree)
        pre = preimage_lattice(mat, target_lat)
        for rep in quotient_residues(pre, fine):
            x = a.source.from_flat(rep)
            if not any(lat_contains(x.coords[ci], h) for ci, h in src_lattices):
                return LocalCheck(False, p, x, a.apply(x))
    return LocalCheck(True, p)


def scan_primes(
    a: ZLinearMap,
    r_sieve: SieveSpec,
    s_sieve: SieveSpec,
    cutoff: int,
    budget: int = DEFAULT_CLASS_BUDGET,
) -> LocalCheck | None:
    """First p <= cutoff violating the local condition, or None.

    Pure k-free sieves use the kernel-lattice fast path; anything else falls
    back to exhaustive class enumeration.
    """
    for p in primes_upto(cutoff):
        if (
            _kfree_fast_applicable(r_sieve, p)
            and _kfree_fast_applicable(s_sieve, p)
            and a.source.degree <= 2
        ):
            res = _check_local_condition_kfree(a, r_sieve, s_sieve, p)
        else:
            res = check_local_condition(a, r_sieve, s_sieve, p, budget)
        if not res.ok:
            return res
    return None


def decompose_monomial(a: ZLinearMap) -> MonomialDecomposition | None:
    """Write A = M_eps . tau with eps = A(1), if any algebra hom tau fits."""
    eps = a.apply(a.source.one)
    for tau in algebra_homs(a.source, a.target):
        if all(a.apply(b) == eps * tau.apply(b) for b in a.source.basis()):
            return MonomialDecomposition(tau, eps)
    return None


# ---------------------------------------------------------------------------
# preserver scan over prime fields


def _det_mod(m: Sequence[Sequence[int]], q: int) -> int:
    n = len(m)
    if n == 1:
        return m[0][0] % q
    if n == 2:
        return (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= m[i][perm[i]]
        total += prod
    return total % q


def is_monomial_matrix(m: Sequence[Sequence[int]]) -> bool:
    """Exactly one nonzero entry per row."""
    return all(sum(1 for v in row if v) == 1 for row in m)


@dataclass(frozen=True)
class PreserverScan:
    q: int
    n: int
    m: int
    invertible_count: int
    preservers: tuple[tuple[tuple[tuple[int, ...], ...], bool], ...]

    def matrices(self) -> list[tuple[tuple[int, ...], ...]]:
        return [mat for mat, _ in self.preservers]

    def all_monomial(self) -> bool:
        return all(mono for _, mono in self.preservers)


def preserver_scan(q: int, n: int, m: int, budget: int = 20_000_000) -> PreserverScan:
    """All F_q-matrices mapping vectors with nonzero coordinates to the same.

    For n = m only invertible matrices are scanned; each survivor is flagged
    monomial (one nonzero entry per row) or not.  Lexicographic row-major
    order.
    """
    if q > 7 or not q in (2, 3, 5, 7):
        raise PreconditionFailed("q must be a prime <= 7")
    if n > 3 or m > 3 or n < 1 or m < 1:
        raise PreconditionFailed("dimensions must be in 1..3")
    if q ** (n * m) > budget:
        raise BudgetExceeded(f"{q**(n*m)} matrices exceed budget {budget}")
    units = list(range(1, q))
    test_vectors = list(itertools.product(units, repeat=n))
    out = []
    invertible = 0
    for entries in itertools.product(range(q), repeat=n * m):
        mat = tuple(tuple(entries[i * n : (i + 1) * n]) for i in range(m))
        if n == m:
            if _det_mod(mat, q) == 0:
                continue
            invertible += 1
        ok = True
        for v in test_vectors:
            img = [sum(r * c for r, c in zip(row, v)) % q for row in mat]
            if any(w == 0 for w in img):
                ok = False
                break
        if ok:
            out.append((mat, is_monomial_matrix(mat)))
    return PreserverScan(q, n, m, invertible, tuple(out))


# ---------------------------------------------------------------------------
# avoidance witness along a unit direction


def cover_witness(
    p: int,
    k: int,
    x: Sequence[int],
    a: Sequence[int],
    class_sets: Sequence[Sequence[int]],
) -> int:
    """Smallest t mod p^k with a_i + t*x_i avoiding every forbidden set.

    Requires all x_i to be units mod p and the measures of the forbidden sets
    to sum below 1; existence is then guaranteed.
    """
    n = len(x)
    if len(a) != n or len(class_sets) != n:
        raise PreconditionFailed("x, a, and class sets must have equal length")
    q = p**k
    sets = [frozenset(c % q for c in cs) for cs in class_sets]
    if any(xi % p == 0 for xi in x):
        raise PreconditionFailed("all coordinates of x must be units mod p")
    total = sum(Fraction(len(s), q) for s in sets)
    if total >= 1:
        raise PreconditionFailed(f"measure sum {total} is not < 1")
    for t in range(q):
        if all((ai + t * xi) % q not in s for ai, xi, s in zip(a, x, sets)):
            return t
    raise NoWitness("no t found; preconditions must have been violated")


# ---------------------------------------------------------------------------
# unit preservation


@dataclass(frozen=True)
class UnitCheck:
    ok: bool
    counterexample: AlgebraicInt | None = None
    image: AlgebraicInt | None = None


def check_unit_preservation(a: ZLinearMap, height: int) -> UnitCheck:
    """Test A on all units of height <= H; true iff every image is a unit."""
    for spec in a.source.components:
        if not spec.is_rational and spec.d is not None and spec.d < 0:
            raise PreconditionFailed("source must be totally real")
    for eps in units_up_to(a.source, height):
        img = a.apply(eps)
        if not img.is_unit():
            return UnitCheck(False, eps, img)
    return UnitCheck(True)
