"""Finitely specified sieves: membership, enumeration, density, tail counts.

A sieve assigns to every prime a forbidden compact open set given by finitely
many residue classes modulo p^k.  All but finitely many primes follow a tail
rule; the rest are explicit exceptions.  V(K, R) is the set of integers
avoiding every forbidden class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ClassOutOfRange, PreconditionFailed, TailNotBoundable
from .intervals import RationalInterval, _round_down, _round_up
from .primes import primes_upto
from .rings import (
    AlgebraicInt,
    Coords,
    EtaleAlgebra,
    Modulus,
    PrimeIdeal,
    _parse_component,
    format_algebra,
    ideal_power,
    parse_algebra,
    split_prime,
    valuation,
)


Label = int | tuple[int, ...]


@dataclass(frozen=True)
class TailRule:
    """Default local set at every non-exceptional prime.

    kind 'empty': nothing forbidden.  kind 'classes': the residues of the
    labels modulo p^exponent are forbidden.  A label is a rational integer
    or a flat coordinate vector of the algebra.  The k-free sieve is labels
    (0,) with exponent k.
    """

    kind: str
    exponent: int = 1
    labels: tuple[Label, ...] = ()

    def __post_init__(self):
        if self.kind not in ("empty", "classes"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "classes" and (not self.labels or self.exponent < 1):
            raise ValueError("a classes tail needs labels and exponent >= 1")

    @classmethod
    def empty(cls) -> "TailRule":
        return cls("empty")

    @classmethod
    def kfree(cls, k: int) -> "TailRule":
        return cls("classes", k, (0,))

    @classmethod
    def classes_mod_p(cls, labels: Sequence[int]) -> "TailRule":
        return cls("classes", 1, tuple(sorted(set(int(c) for c in labels))))

    @classmethod
    def shifted_kfree(cls, k: int, shifts: Sequence[Label]) -> "TailRule":
        return cls("classes", k, tuple(sorted(set(shifts), key=_label_key)))

    @property
    def is_kfree(self) -> bool:
        return self.kind == "classes" and self.labels == (0,)

    def __str__(self) -> str:
        if self.kind == "empty":
            return "empty"
        if self.is_kfree:
            return f"kfree {self.exponent}"
        body = ",".join(str(c) for c in self.labels)
        return f"classes {body}" if self.exponent == 1 else f"classes^{self.exponent} {body}"


def _label_key(label: Label) -> tuple:
    return (0, label, ()) if isinstance(label, int) else (1, 0, label)


def _label_element(algebra: EtaleAlgebra, label: Label) -> AlgebraicInt:
    if isinstance(label, int):
        return algebra.from_int(label)
    return algebra.from_flat(label)


@dataclass(frozen=True)
class LocalSet:
    """Forbidden residue classes at one prime, modulo p^k."""

    modulus: Modulus
    classes: tuple[Coords, ...]

    def __post_init__(self):
        seen = set()
        for c in self.classes:
            if self.modulus.reduce_coords(c) != c:
                raise ClassOutOfRange(f"class {c} is not canonical mod {self.modulus}")
            if c in seen:
                raise ClassOutOfRange(f"class {c} repeated")
            seen.add(c)

    @property
    def prime(self) -> PrimeIdeal:
        return self.modulus.prime

    @property
    def measure(self) -> Fraction:
        return Fraction(len(self.classes), self.modulus.norm)

    def hits(self, x: AlgebraicInt) -> Coords | None:
        """The forbidden class containing x, if any."""
        r = self.modulus.reduce_coords(x.coords[self.modulus.component])
        return r if r in self.classes else None

    def is_everything(self) -> bool:
        return len(self.classes) == self.modulus.norm

    def translate(self, delta: Coords) -> "LocalSet":
        cls = tuple(
            sorted(
                self.modulus.reduce_coords(tuple(a + d for a, d in zip(c, delta)))
                for c in self.classes
            )
        )
        return LocalSet(self.modulus, cls)


def _prime_key(p: PrimeIdeal) -> tuple:
    return (p.p, p.component, -1 if p.root is None else p.root)


@dataclass(frozen=True)
class SieveSpec:
    """A finitely specified sieve: tail rule plus finitely many exceptions."""

    algebra: EtaleAlgebra
    tail: TailRule
    exceptions: tuple[LocalSet, ...]
    non_large: bool
    cofinite: bool

    def exception_at(self, prime: PrimeIdeal) -> LocalSet | None:
        for ls in self.exceptions:
            if ls.prime == prime:
                return ls
        return None

    def exception_primes(self) -> tuple[PrimeIdeal, ...]:
        return tuple(ls.prime for ls in self.exceptions)

    def __str__(self) -> str:
        parts = [f"sieve[{self.algebra}; tail {self.tail}"]
        if self.exceptions:
            parts.append(f"; {len(self.exceptions)} exception(s)")
        return "".join(parts) + "]"


@dataclass(frozen=True)
class Verdict:
    """Membership decision with a certificate.

    On rejection, `prime` and `class_rep` name a forbidden class containing
    the element; on acceptance, `checked` lists the finitely many primes that
    had to be examined.
    """

    member: bool
    prime: PrimeIdeal | None = None
    class_rep: Coords | None = None
    checked: tuple[PrimeIdeal, ...] = ()

    def __bool__(self) -> bool:
        return self.member


def _tail_local_set(sieve: SieveSpec, prime: PrimeIdeal) -> LocalSet:
    if sieve.tail.kind == "empty":
        return LocalSet(ideal_power(prime, 1), ())
    mod = ideal_power(prime, sieve.tail.exponent)
    classes = sorted(
        {
            mod.reduce_coords(_label_element(sieve.algebra, c).coords[prime.component])
            for c in sieve.tail.labels
        }
    )
    return LocalSet(mod, tuple(classes))


def local_set(sieve: SieveSpec, prime: PrimeIdeal) -> LocalSet:
    """The resolved forbidden classes and exact measure at one prime."""
    exc = sieve.exception_at(prime)
    return exc if exc is not None else _tail_local_set(sieve, prime)


def build_sieve(
    algebra: EtaleAlgebra,
    tail: TailRule,
    exceptions: Mapping[PrimeIdeal, tuple[int, Iterable[Coords]]] | Iterable[LocalSet] = (),
) -> SieveSpec:
    """Normalize and validate a sieve; derives the non-large/cofinite flags.

    Exceptions may be given as LocalSet objects or as a mapping
    prime -> (exponent, class list); class representatives must be canonical.
    """
    locs: list[LocalSet] = []
    if isinstance(exceptions, Mapping):
        for prime, (k, classes) in exceptions.items():
            locs.append(LocalSet(ideal_power(prime, k), tuple(classes)))
    else:
        locs.extend(exceptions)
    locs.sort(key=lambda ls: _prime_key(ls.prime))
    seen = set()
    for ls in locs:
        if ls.prime.algebra != algebra:
            raise ClassOutOfRange("exception prime belongs to a different algebra")
        key = _prime_key(ls.prime)
        if key in seen:
            raise ClassOutOfRange(f"duplicate exception at {ls.prime}")
        seen.add(key)

    non_large = not any(ls.is_everything() for ls in locs)
    if non_large and tail.kind == "classes":
        # a classes tail can only cover everything at tiny primes
        limit = len(tail.labels)
        probe = SieveSpec(algebra, tail, tuple(locs), True, True)
        for p in primes_upto(max(limit, 2)):
            for prime in split_prime(algebra, p):
                if prime.norm ** tail.exponent > limit:
                    continue
                if any(ls.prime == prime for ls in locs):
                    continue
                if _tail_local_set(probe, prime).is_everything():
                    non_large = False
    cofinite = tail.kind != "empty"
    return SieveSpec(algebra, tail, tuple(locs), non_large, cofinite)


def kfree_sieve(algebra: EtaleAlgebra, k: int) -> SieveSpec:
    """The k-free sieve: forbid the zero class modulo every p^k."""
    return build_sieve(algebra, TailRule.kfree(k))


def _iroot(n: int, k: int) -> int:
    """Largest r >= 0 with r^k <= n."""
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _first_tail_prime(sieve: SieveSpec, component: int) -> PrimeIdeal:
    from .primes import is_prime

    p = 2
    while True:
        if is_prime(p):
            for prime in split_prime(sieve.algebra, p):
                if prime.component == component and sieve.exception_at(prime) is None:
                    return prime
        p += 1


def membership(sieve: SieveSpec, x: AlgebraicInt) -> Verdict:
    """Decide x in V(K, R), checking only the finitely many relevant primes.

    Exception primes are always checked.  A tail prime can only catch x when
    Nm(p)^k divides the norm of x - c for one of the tail labels c, so the
    scan is bounded by those norms; when x equals a label on some component,
    every tail prime of that component catches it.
    """
    if x.algebra != sieve.algebra:
        raise PreconditionFailed("element of a different algebra")
    checked: list[PrimeIdeal] = []
    for ls in sieve.exceptions:
        checked.append(ls.prime)
        hit = ls.hits(x)
        if hit is not None:
            return Verdict(False, ls.prime, hit, tuple(checked))
    if sieve.tail.kind == "empty":
        return Verdict(True, checked=tuple(checked))
    k = sieve.tail.exponent
    label_elems = [_label_element(sieve.algebra, c) for c in sieve.tail.labels]
    for i, spec in enumerate(sieve.algebra.components):
        bound = 0
        for el in label_elems:
            diff = tuple(a - b for a, b in zip(x.coords[i], el.coords[i]))
            nm = abs(spec.norm(diff))
            if nm == 0:
                prime = _first_tail_prime(sieve, i)
                ls = _tail_local_set(sieve, prime)
                hit = ls.hits(x)
                assert hit is not None
                return Verdict(False, prime, hit, tuple(checked))
            bound = max(bound, nm)
        if bound < 2**k:
            continue
        for p in primes_upto(_iroot(bound, k)):
            for prime in split_prime(sieve.algebra, p):
                if prime.component != i or prime.norm**k > bound:
                    continue
                if sieve.exception_at(prime) is not None:
                    continue
                ls = _tail_local_set(sieve, prime)
                checked.append(prime)
                hit = ls.hits(x)
                if hit is not None:
                    return Verdict(False, prime, hit, tuple(checked))
    return Verdict(True, checked=tuple(checked))


def enumerate_V(sieve: SieveSpec, bound: int) -> list[AlgebraicInt]:
    """All members with max |coordinate| <= bound, in lex coordinate order."""
    if not sieve.non_large:
        raise PreconditionFailed("enumerate_V requires a non-large sieve")
    return [x for x in sieve.algebra.box(bound) if membership(sieve, x).member]


def count_members(sieve: SieveSpec, bound: int) -> int:
    """Number of members of V(K, R) with max |coordinate| <= bound.

    Over Q this runs as a vectorized residue-marking sieve; other algebras
    fall back to elementwise membership.
    """
    if not sieve.non_large:
        raise PreconditionFailed("count_members requires a non-large sieve")
    if len(sieve.algebra.components) == 1 and sieve.algebra.components[0].is_rational:
        return _count_members_rational(sieve, bound)
    return len(enumerate_V(sieve, bound))


def _count_members_rational(sieve: SieveSpec, bound: int) -> int:
    size = 2 * bound + 1
    excluded = np.zeros(size, dtype=bool)

    def mark(cls: int, step: int):
        start = (cls + bound) % step
        excluded[start::step] = True

    for ls in sieve.exceptions:
        step = ls.modulus.norm
        for c in ls.classes:
            mark(c[0], step)
    if sieve.tail.kind == "classes":
        k = sieve.tail.exponent
        labels = [
            c if isinstance(c, int) else _label_element(sieve.algebra, c).coords[0][0]
            for c in sieve.tail.labels
        ]
        exc_ps = {ls.prime.p for ls in sieve.exceptions}
        maxc = max(abs(c) for c in labels)
        pmax = _iroot(bound + maxc, k) + 1
        for p in primes_upto(pmax):
            if p in exc_ps:
                continue
            step = p**k
            if step > 2 * bound + maxc:
                break
            for c in labels:
                mark(c % step, step)
        for c in labels:
            # x = c is caught by every large tail prime
            if abs(c) <= bound:
                excluded[c + bound] = True
    return int(size - int(excluded.sum()))


def empirical_density(sieve: SieveSpec, bound: int) -> Fraction:
    """Share of the coordinate box [-B, B]^n lying in V(K, R)."""
    n = sieve.algebra.degree
    return Fraction(count_members(sieve, bound), (2 * bound + 1) ** n)


def _tail_sum_bound(degree: int, n_labels: int, k: int, cutoff: int) -> Fraction:
    """Rigorous upper bound for sum of measures over tail primes of norm > P."""
    if k < 2:
        raise TailNotBoundable("tail exponent 1 admits no summable measure bound")
    extra = 64 if cutoff < 64 else 0
    s = Fraction(0)
    for m in range(cutoff + 1, cutoff + extra + 1):
        s += Fraction(1, m**k)
    base = cutoff + extra
    s += Fraction(1, (k - 1) * base ** (k - 1))
    return s * n_labels * degree


def density_interval(sieve: SieveSpec, cutoff: int) -> RationalInterval:
    """Enclosure of the density prod(1 - meas(R_p)) of V(K, R).

    Truncates the product at norm <= cutoff (exceptions always included
    exactly) and widens by the bound on the measure sum of the omitted tail
    primes.  Raises TailNotBoundable for exponent-1 tails.
    """
    if not sieve.non_large:
        raise PreconditionFailed("density_interval requires a non-large sieve")
    if sieve.tail.kind == "classes" and sieve.tail.exponent < 2:
        raise TailNotBoundable("tail exponent 1: the measure sum over primes diverges")
    partial = Fraction(1)
    for ls in sieve.exceptions:
        partial *= 1 - ls.measure
    if sieve.tail.kind == "empty":
        return RationalInterval(_round_down(partial), _round_up(partial))
    exc_keys = {_prime_key(ls.prime) for ls in sieve.exceptions}
    lo = partial
    hi = partial
    for p in primes_upto(cutoff):
        for prime in split_prime(sieve.algebra, p):
            if prime.norm > cutoff or _prime_key(prime) in exc_keys:
                continue
            meas = _tail_local_set(sieve, prime).measure
            lo = _round_down(lo * (1 - meas))
            hi = _round_up(hi * (1 - meas))
    tail = _tail_sum_bound(
        sieve.algebra.degree, len(sieve.tail.labels), sieve.tail.exponent, cutoff
    )
    lo = _round_down(lo * max(Fraction(0), 1 - tail))
    return RationalInterval(lo, hi)


def tail_count(algebra: EtaleAlgebra, k: int, coord_bound: int, norm_cutoff: int) -> int:
    """Exact N'(X, M): nonzero x in the box divisible by a^k, Nm(a) > M.

    The zero element is excluded.  Over Q this is a direct marking sieve over
    q^k with q > M; in general the largest k-th-power divisor is read off the
    prime valuations of each component.
    """
    if k < 2:
        raise PreconditionFailed("tail_count requires k >= 2")
    if len(algebra.components) == 1 and algebra.components[0].is_rational:
        size = 2 * coord_bound + 1
        marked = np.zeros(size, dtype=bool)
        q = norm_cutoff + 1
        while q**k <= coord_bound:
            step = q**k
            marked[(coord_bound) % step :: step] = True
            q += 1
        marked[coord_bound] = False  # x = 0 excluded
        return int(marked.sum())
    count = 0
    for x in algebra.box(coord_bound):
        if x.is_zero():
            continue
        if _max_power_divisor_norm(x, k) > norm_cutoff:
            count += 1
    return count


def _max_power_divisor_norm(x: AlgebraicInt, k: int) -> int:
    """Norm of the largest ideal a with a^k | x (x nonzero)."""
    total = 1
    for i, spec in enumerate(x.algebra.components):
        nm = abs(spec.norm(x.coords[i]))
        if nm == 0:
            return 1 << 62  # zero component: arbitrarily large divisors
        rest = nm
        for p in primes_upto(_isqrt(rest) + 1):
            if rest % p:
                continue
            while rest % p == 0:
                rest //= p
            for prime in split_prime(x.algebra, p):
                if prime.component != i:
                    continue
                v = valuation(x, prime)
                total *= prime.norm ** (v // k)
        if rest > 1:
            for prime in split_prime(x.algebra, rest):
                if prime.component != i:
                    continue
                v = valuation(x, prime)
                total *= prime.norm ** (v // k)
    return total


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


# ---------------------------------------------------------------------------
# sieve spec files


def parse_sieve_file(text: str) -> SieveSpec:
    """Parse the plain-text sieve format.

    Lines: `algebra <spec>`, `tail empty|kfree K|classes c1,c2,...`, and
    `exception <p> [<index>] <k> : c1,c2,...` with `-` for an empty class
    list; `#` starts a comment.
    """
    algebra: EtaleAlgebra | None = None
    tail: TailRule | None = None
    pending: list[tuple[int, int, int, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "algebra":
            algebra = parse_algebra(rest)
        elif head == "tail":
            kind, _, arg = rest.partition(" ")
            if kind == "empty":
                tail = TailRule.empty()
            elif kind == "kfree":
                tail = TailRule.kfree(int(arg))
            elif kind == "classes":
                tail = TailRule.classes_mod_p([int(c) for c in arg.split(",")])
            else:
                raise ValueError(f"unknown tail rule {rest!r}")
        elif head == "exception":
            spec_part, _, classes_part = rest.partition(":")
            nums = spec_part.split()
            if len(nums) == 2:
                p, idx, k = int(nums[0]), 0, int(nums[1])
            elif len(nums) == 3:
                p, idx, k = int(nums[0]), int(nums[1]), int(nums[2])
            else:
                raise ValueError(f"bad exception line: {raw!r}")
            pending.append((p, idx, k, classes_part.strip()))
        else:
            raise ValueError(f"unknown directive {head!r}")
    if algebra is None or tail is None:
        raise ValueError("sieve file needs `algebra` and `tail` lines")
    locs = []
    for p, idx, k, classes_part in pending:
        primes = split_prime(algebra, p)
        if idx >= len(primes):
            raise ValueError(f"prime index {idx} out of range for p={p}")
        prime = primes[idx]
        mod = ideal_power(prime, k)
        classes: list[Coords] = []
        if classes_part not in ("", "-"):
            spec = prime.spec
            for lit in classes_part.split(","):
                classes.append(_parse_component(lit.strip(), spec))
        locs.append(LocalSet(mod, tuple(classes)))
    return build_sieve(algebra, tail, locs)


def format_sieve(sieve: SieveSpec) -> str:
    lines = [f"algebra {format_algebra(sieve.algebra)}", f"tail {sieve.tail}"]
    for ls in sieve.exceptions:
        prime = ls.prime
        idx = split_prime(sieve.algebra, prime.p).index(prime)
        from .rings import _format_component

        body = ",".join(_format_component(c) for c in ls.classes) or "-"
        lines.append(f"exception {prime.p} {idx} {ls.modulus.k} : {body}")
    return "\n".join(lines) + "\n"
