"""Admissible configurations, block-code morphisms, conjugacy, and symmetries.

A finite subset of O_K is admissible for a sieve when it avoids a translate
of the forbidden set at every prime; those subsets are the finite patches of
the associated shift space.  Morphisms are sliding block codes: a window M,
a family of patterns T inside M, and a linear map A, acting by
"A(x) is in f(X) iff X meets x+M exactly in x+T for some T in the family".
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, PreconditionFailed, RegionTooSmall
from .lattices import crt_pair
from .linmaps import ZLinearMap
from .localglobal import CongruenceConstraint, solve
from .primes import primes_upto
from .rings import (
    AlgebraicInt,
    Coords,
    EtaleAlgebra,
    AlgebraHom,
    PrimeIdeal,
    algebra_isomorphisms,
    ideal_power,
    parse_element,
    reduce_mod,
    split_prime,
    units_up_to,
)
from .sieve import (
    LocalSet,
    SieveSpec,
    TailRule,
    _tail_local_set,
    build_sieve,
    kfree_sieve,
    local_set,
    membership,
)


@dataclass(frozen=True)
class Pattern:
    """A finite subset of O_K, canonically ordered."""

    algebra: EtaleAlgebra
    elements: tuple[AlgebraicInt, ...]

    @classmethod
    def of(cls, algebra: EtaleAlgebra, elements: Iterable[AlgebraicInt]) -> "Pattern":
        uniq = {e.flat(): e for e in elements}
        ordered = tuple(uniq[k] for k in sorted(uniq))
        return cls(algebra, ordered)

    @classmethod
    def from_ints(cls, algebra: EtaleAlgebra, values: Iterable[int]) -> "Pattern":
        return cls.of(algebra, (algebra.from_int(v) for v in values))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x: AlgebraicInt) -> bool:
        return any(e == x for e in self.elements)

    def translate(self, g: AlgebraicInt) -> "Pattern":
        return Pattern.of(self.algebra, (e + g for e in self.elements))

    def union(self, other: "Pattern") -> "Pattern":
        return Pattern.of(self.algebra, self.elements + other.elements)

    def intersect(self, other: "Pattern") -> "Pattern":
        keys = {e.flat() for e in other.elements}
        return Pattern.of(self.algebra, (e for e in self.elements if e.flat() in keys))

    def ints(self) -> list[int]:
        """Values for rational patterns."""
        return [e.coords[0][0] for e in self.elements]

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self.elements) + "}"


def int_pattern(values: Iterable[int]) -> Pattern:
    from .rings import QQ

    return Pattern.from_ints(QQ, values)


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibilityResult:
    """Certificate (translate witnesses per checked prime) or a violation.

    Primes beyond the recorded threshold need no witness: the pattern can
    meet at most |X| * #classes translates, fewer than Nm(p)^k of them.
    """

    admissible: bool
    witnesses: tuple[tuple[PrimeIdeal, Coords], ...] = ()
    norm_threshold: int = 0
    violation: PrimeIdeal | None = None

    def __bool__(self) -> bool:
        return self.admissible

    def witness_at(self, prime: PrimeIdeal) -> Coords | None:
        for pr, delta in self.witnesses:
            if pr == prime:
                return delta
        return None


def _free_translate(ls: LocalSet, pattern: Pattern) -> Coords | None:
    """A residue delta with (delta + classes) disjoint from the pattern."""
    if not ls.classes:
        return ls.modulus.reduce_coords(ls.prime.spec.zero())
    mod = ls.modulus
    comp = mod.component
    bad = set()
    for x in pattern.elements:
        xr = x.coords[comp]
        for c in ls.classes:
            bad.add(mod.reduce_coords(tuple(a - b for a, b in zip(xr, c))))
    if len(bad) < mod.norm:
        for delta in mod.residues():
            if delta not in bad:
                return delta
    return None


def is_admissible(sieve: SieveSpec, pattern: Pattern) -> AdmissibilityResult:
    """Decide membership of a finite pattern in the shift space of the sieve.

    Only exception primes and tail primes with Nm(p)^k <= |X| * #labels can
    fail; each checked prime gets an explicit translate witness.
    """
    if not sieve.non_large:
        raise PreconditionFailed("admissibility requires a non-large sieve")
    if pattern.algebra != sieve.algebra:
        raise PreconditionFailed("pattern algebra mismatch")
    witnesses: list[tuple[PrimeIdeal, Coords]] = []
    threshold = 0
    if sieve.tail.kind == "classes" and len(pattern) > 0:
        threshold = len(pattern) * len(sieve.tail.labels)
        k = sieve.tail.exponent
        for p in primes_upto(max(threshold, 2)):
            for prime in split_prime(sieve.algebra, p):
                if prime.norm**k > threshold:
                    continue
                if sieve.exception_at(prime) is not None:
                    continue
                delta = _free_translate(_tail_local_set(sieve, prime), pattern)
                if delta is None:
                    return AdmissibilityResult(False, tuple(witnesses), threshold, prime)
                witnesses.append((prime, delta))
    for ls in sieve.exceptions:
        delta = _free_translate(ls, pattern)
        if delta is None:
            return AdmissibilityResult(False, tuple(witnesses), threshold, ls.prime)
        witnesses.append((ls.prime, delta))
    return AdmissibilityResult(True, tuple(witnesses), threshold, None)


def count_admissible(sieve: SieveSpec, box_size: int, budget: int = 1 << 24) -> int:
    """Number of admissible subsets of {0, ..., N-1} over Q.

    Subsets are enumerated as bitmasks; a prime can only reject when
    Nm(p)^k <= N * #classes, so only those few primes are tested.
    """
    if len(sieve.algebra.components) != 1 or not sieve.algebra.components[0].is_rational:
        raise PreconditionFailed("count_admissible runs over the rationals")
    if not sieve.non_large:
        raise PreconditionFailed("count_admissible requires a non-large sieve")
    if box_size < 0 or (1 << box_size) > budget:
        raise BudgetExceeded(f"2^{box_size} subsets exceed budget {budget}")
    n_sets = 1 << box_size
    dtype = np.uint32 if box_size <= 31 else np.uint64
    masks = np.arange(n_sets, dtype=dtype)
    bad = np.zeros(n_sets, dtype=bool)

    def reject_with(ls: LocalSet):
        mod = ls.modulus.norm
        if not ls.classes:
            return
        classes = [c[0] for c in ls.classes]
        fails = np.ones(n_sets, dtype=bool)
        for delta in range(mod):
            translate = 0
            for x in range(box_size):
                if (x - delta) % mod in classes:
                    translate |= 1 << x
            if translate == 0:
                return  # a free translate exists for every subset
            fails &= (masks & dtype(translate)) != 0
        bad[:] |= fails

    checked = set()
    for ls in sieve.exceptions:
        checked.add(ls.prime.p)
        reject_with(ls)
    if sieve.tail.kind == "classes":
        limit = box_size * len(sieve.tail.labels)
        k = sieve.tail.exponent
        for p in primes_upto(max(limit, 2)):
            if p in checked or p**k > limit:
                continue
            reject_with(_tail_local_set(sieve, split_prime(sieve.algebra, p)[0]))
    return int(n_sets - int(bad.sum()))


# ---------------------------------------------------------------------------
# block codes


@dataclass(frozen=True)
class WindowCode:
    """A sliding block code: linear part A, window M, pattern family."""

    linmap: ZLinearMap
    window: Pattern
    patterns: tuple[Pattern, ...]

    def __post_init__(self):
        if not self.patterns:
            raise PreconditionFailed("pattern family must be non-empty")
        wkeys = {e.flat() for e in self.window.elements}
        for t in self.patterns:
            if len(t) == 0:
                raise PreconditionFailed("patterns must be non-empty")
            if any(e.flat() not in wkeys for e in t.elements):
                raise PreconditionFailed("patterns must be subsets of the window")

    @property
    def source(self) -> EtaleAlgebra:
        return self.linmap.source

    @property
    def target(self) -> EtaleAlgebra:
        return self.linmap.target

    def pattern_keys(self) -> frozenset[frozenset]:
        return frozenset(frozenset(e.flat() for e in t.elements) for t in self.patterns)


def translation_code(algebra: EtaleAlgebra, t: AlgebraicInt, window: Pattern, sieve: SieveSpec) -> WindowCode:
    """The code of the translation X -> t + X over the given window."""
    neg = -t
    pats = []
    for size in range(1, len(window) + 1):
        for combo in itertools.combinations(window.elements, size):
            if any(e == neg for e in combo):
                pat = Pattern.of(algebra, combo)
                if is_admissible(sieve, pat).admissible:
                    pats.append(pat)
    return WindowCode(ZLinearMap.identity(algebra), window, tuple(pats))


def interior_points(known: Pattern, window: Pattern) -> list[AlgebraicInt]:
    """Points x with x + window fully inside the known region."""
    keys = {e.flat() for e in known.elements}
    out = []
    for x in known.elements:
        if all((x + w).flat() in keys for w in window.elements):
            out.append(x)
    return out


def apply_block_code(
    code: WindowCode,
    x_set: Pattern,
    region: Sequence[AlgebraicInt] | None = None,
    known: Pattern | None = None,
    complete: bool = False,
) -> Pattern:
    """Evaluate the block code on a finite patch.

    `known` declares where the contents of the pattern are authoritative;
    evaluation happens on `region` (default: the interior of `known` under
    the window).  With complete=True the pattern is taken as the entire
    configuration and any region may be evaluated.
    """
    if complete:
        if region is None:
            # every output must come from a window position meeting the set
            candidates = set()
            for e in x_set.elements:
                for w in code.window.elements:
                    candidates.add((e - w).flat())
            region = [code.source.from_flat(f) for f in sorted(candidates)]
    else:
        if known is None:
            raise PreconditionFailed("apply_block_code needs a known region (or complete=True)")
        if region is None:
            region = interior_points(known, code.window)
            if not region:
                raise RegionTooSmall("the window does not fit inside the known region")
        else:
            keys = {e.flat() for e in known.elements}
            for x in region:
                if any((x + w).flat() not in keys for w in code.window.elements):
                    raise RegionTooSmall(f"window at {x} leaves the known region")
    xkeys = {e.flat() for e in x_set.elements}
    family = code.pattern_keys()
    out = []
    for x in region:
        hit = frozenset(
            (x + w).flat() for w in code.window.elements if (x + w).flat() in xkeys
        )
        local = frozenset((code.source.from_flat(f) - x).flat() for f in hit)
        if local in family:
            out.append(code.linmap.apply(x))
    return Pattern.of(code.target, out)


# ---------------------------------------------------------------------------
# random admissible patterns (CRT placement of translated sub-patterns)


def random_admissible(
    sieve: SieveSpec,
    rng: random.Random,
    base_patterns: Sequence[Pattern],
    copies: int = 3,
    spread: int = 40,
) -> Pattern:
    """Union of translated base patterns, placed by CRT to stay admissible.

    For each small prime, every copy is steered into a residue class whose
    translate misses the forbidden set; copies are spaced far apart, so large
    primes are handled by the measure bound.
    """
    algebra = sieve.algebra
    n_labels = len(sieve.tail.labels) if sieve.tail.kind == "classes" else 0
    total = max(len(t) for t in base_patterns) * copies
    relevant: list[LocalSet] = list(sieve.exceptions)
    if sieve.tail.kind == "classes":
        k = sieve.tail.exponent
        limit = total * n_labels
        for p in primes_upto(max(limit, 2)):
            for prime in split_prime(algebra, p):
                if prime.norm**k <= limit and sieve.exception_at(prime) is None:
                    relevant.append(_tail_local_set(sieve, prime))

    if len(algebra.components) != 1:
        raise PreconditionFailed("random pattern placement expects a single component")
    pieces: list[Pattern] = []
    pos = 0
    for _ in range(copies):
        t = base_patterns[rng.randrange(len(base_patterns))]
        base: Coords | None = None
        lam = None
        for ls in relevant:
            mod = ls.modulus
            good = []
            for delta in mod.residues():
                ok = True
                for e in t.elements:
                    rep = mod.reduce_coords(
                        tuple(a + d for a, d in zip(e.coords[mod.component], delta))
                    )
                    if rep in ls.classes:
                        ok = False
                        break
                if ok:
                    good.append(delta)
            if not good:
                raise PreconditionFailed(f"base pattern {t} is not admissible at {ls.prime}")
            pick = good[rng.randrange(len(good))]
            if base is None:
                base, lam = pick, mod.hnf
            else:
                res = crt_pair(base, lam, pick, mod.hnf)
                assert res is not None
                base, lam = res
        if base is None:
            shift = algebra.from_int(pos)
        else:
            # push the CRT representative past the previous piece along the
            # first coordinate; steps of the combined modulus keep all the
            # per-prime class choices intact
            step = lam[0][0]
            flat = list(base) + [0] * (algebra.degree - len(base))
            flat[0] += (pos // step + 1) * step
            shift = algebra.from_flat(flat)
        pieces.append(t.translate(shift))
        pos = max(abs(v) for e in pieces[-1].elements for v in e.flat()) + spread
    out = pieces[0]
    for p in pieces[1:]:
        out = out.union(p)
    check = is_admissible(sieve, out)
    if not check.admissible:
        raise AssertionError("CRT placement produced a non-admissible pattern")
    return out


# ---------------------------------------------------------------------------
# intertwiner verification


@dataclass
class IntertwinerReport:
    trials: int
    equivariance_failures: list[tuple[Pattern, AlgebraicInt]] = field(default_factory=list)
    admissibility_failures: list[Pattern] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.equivariance_failures and not self.admissibility_failures


def verify_intertwiner(
    code: WindowCode,
    source_sieve: SieveSpec,
    target_sieve: SieveSpec,
    trials: int = 100,
    seed: int = 0,
) -> IntertwinerReport:
    """Randomized check that the code maps the source space into the target.

    Each trial builds a random admissible pattern, tests the equivariance
    identity f(g + X) = A(g) + f(X) on matching regions, and tests that the
    image patch is admissible for the target sieve.
    """
    rng = random.Random(seed)
    report = IntertwinerReport(trials)
    algebra = code.source
    for _ in range(trials):
        x_set = random_admissible(source_sieve, rng, code.patterns, copies=rng.randrange(2, 4))
        image = apply_block_code(code, x_set, complete=True)
        g = algebra.from_int(rng.randrange(-20, 21))
        shifted = apply_block_code(code, x_set.translate(g), complete=True)
        expected = image.translate(code.linmap.apply(g))
        if shifted.elements != expected.elements:
            report.equivariance_failures.append((x_set, g))
        if not is_admissible(target_sieve, image).admissible:
            report.admissibility_failures.append(x_set)
    return report


# ---------------------------------------------------------------------------
# derived local sets and translate tests


def derived_local_set(
    sieve: SieveSpec, prime: PrimeIdeal, patterns: Sequence[Pattern]
) -> LocalSet:
    """Intersection over the family of -T + R_p, as residue classes."""
    ls = local_set(sieve, prime)
    mod = ls.modulus
    comp = mod.component
    current: set[Coords] | None = None
    for t in patterns:
        shifted = set()
        for c in ls.classes:
            for e in t.elements:
                shifted.add(
                    mod.reduce_coords(tuple(a - b for a, b in zip(c, e.coords[comp])))
                )
        current = shifted if current is None else (current & shifted)
    assert current is not None
    return LocalSet(mod, tuple(sorted(current)))


def translate_between(candidate: LocalSet, base: LocalSet) -> Coords | None:
    """delta with candidate = delta + base, or None."""
    if candidate.modulus.hnf != base.modulus.hnf:
        raise PreconditionFailed("local sets live modulo different lattices")
    if len(candidate.classes) != len(base.classes):
        return None
    return subset_of_translate(candidate, base)


def subset_of_translate(candidate: LocalSet, base: LocalSet) -> Coords | None:
    """delta with candidate contained in delta + base, or None (exhaustive)."""
    if candidate.modulus.hnf != base.modulus.hnf:
        raise PreconditionFailed("local sets live modulo different lattices")
    mod = base.modulus
    cand = set(candidate.classes)
    if not cand:
        return mod.reduce_coords(mod.prime.spec.zero())
    for delta in mod.residues():
        shifted = {
            mod.reduce_coords(tuple(a + d for a, d in zip(c, delta))) for c in base.classes
        }
        if cand <= shifted:
            return delta
    return None


# ---------------------------------------------------------------------------
# conjugacy


@dataclass
class ConjugacyResult:
    status: str  # 'witness' | 'provably_not' | 'no_witness_up_to_bound'
    reason: str = ""
    tau: AlgebraHom | None = None
    epsilon: AlgebraicInt | None = None
    deltas: dict = field(default_factory=dict)
    tail_checked_to: int = 0


def _prime_image(tau: AlgebraHom, prime: PrimeIdeal) -> PrimeIdeal:
    """The prime of the target algebra above p containing tau(prime)."""
    target_comp = None
    for j, (i, _) in enumerate(tau.assignments):
        if i == prime.component:
            target_comp = j
            break
    assert target_comp is not None
    gens = []
    mod = ideal_power(prime, 1)
    for row in mod.hnf:
        blocks = [spec.zero() for spec in prime.algebra.components]
        blocks[prime.component] = tuple(row)
        gens.append(AlgebraicInt(prime.algebra, tuple(blocks)))
    for q in split_prime(tau.target, prime.p):
        if q.component != target_comp:
            continue
        qmod = ideal_power(q, 1)
        if all(qmod.contains(tau.apply(g)) for g in gens):
            return q
    raise AssertionError("no image prime found")


def _image_local_set(
    ls: LocalSet, tau: AlgebraHom, eps: AlgebraicInt, image_prime: PrimeIdeal
) -> LocalSet:
    mod = ideal_power(image_prime, ls.modulus.k)
    out = set()
    for c in ls.classes:
        blocks = [spec.zero() for spec in tau.source.components]
        blocks[ls.modulus.component] = c
        x = AlgebraicInt(tau.source, tuple(blocks))
        out.add(mod.reduce_coords((eps * tau.apply(x)).coords[image_prime.component]))
    return LocalSet(mod, tuple(sorted(out)))


def conjugacy_search(
    r_sieve: SieveSpec,
    s_sieve: SieveSpec,
    unit_height: int = 8,
    tail_cutoff: int = 60,
) -> ConjugacyResult:
    """Search for (tau, eps) realizing a topological conjugacy of the spaces.

    A witness requires S at tau(p) to be a translate of eps*tau(R_p) for all
    primes: checked exactly on exception primes, identically true on k-free
    tails, and sampled up to `tail_cutoff` otherwise.  Translate-invariant
    mismatches (modulus norm or class count at cofinitely many primes) give
    `provably_not`; exhausting the unit bound gives `no_witness_up_to_bound`.
    """
    if not (r_sieve.non_large and r_sieve.cofinite and s_sieve.non_large and s_sieve.cofinite):
        raise PreconditionFailed("conjugacy criterion requires non-large cofinite sieves")
    K, L = r_sieve.algebra, s_sieve.algebra
    isos = algebra_isomorphisms(K, L)
    if not isos:
        return ConjugacyResult("provably_not", "no algebra isomorphism between the rings")
    rt, st = r_sieve.tail, s_sieve.tail
    if rt.kind == "classes" and st.kind == "classes":
        if rt.exponent != st.exponent:
            return ConjugacyResult(
                "provably_not",
                f"tail modulus norms differ: exponents {rt.exponent} vs {st.exponent}",
            )
        if len(rt.labels) != len(st.labels):
            return ConjugacyResult(
                "provably_not",
                f"tail class counts differ: {len(rt.labels)} vs {len(st.labels)}",
            )
    elif rt.kind != st.kind:
        return ConjugacyResult("provably_not", "one tail is empty, the other is not")

    pure_kfree = rt.is_kfree and st.is_kfree
    # with only rational and imaginary quadratic components the unit group is
    # finite torsion (coordinates bounded by 1), so the (tau, eps) sweep is
    # exhaustive and a failure at a concrete prime refutes conjugacy outright
    finite_units = all(
        spec.is_rational or (spec.d is not None and spec.d < 0) for spec in L.components
    )
    units = [L.one] + [u for u in units_up_to(L, max(unit_height, 1)) if u != L.one]
    for tau in isos:
        for eps in units:
            deltas = {}
            ok = True
            primes_to_check: list[PrimeIdeal] = [ls.prime for ls in r_sieve.exceptions]
            for ls in s_sieve.exceptions:
                # pull back exception primes of S along tau
                for p in split_prime(K, ls.prime.p):
                    if _prime_image(tau, p) == ls.prime and all(
                        q != p for q in primes_to_check
                    ):
                        primes_to_check.append(p)
            if not pure_kfree:
                for p in primes_upto(tail_cutoff):
                    for prime in split_prime(K, p):
                        if all(q != prime for q in primes_to_check):
                            primes_to_check.append(prime)
            for prime in primes_to_check:
                img_prime = _prime_image(tau, prime)
                img = _image_local_set(local_set(r_sieve, prime), tau, eps, img_prime)
                cand = local_set(s_sieve, img_prime)
                if cand.modulus.k != img.modulus.k:
                    kk = max(cand.modulus.k, img.modulus.k)
                    img = _refine_local_set(img, kk)
                    cand = _refine_local_set(cand, kk)
                delta = translate_between(cand, img)
                if delta is None:
                    ok = False
                    break
                deltas[prime] = delta
            if ok:
                return ConjugacyResult(
                    "witness",
                    "translate witnesses on all checked primes",
                    tau,
                    eps,
                    deltas,
                    tail_checked_to=0 if pure_kfree else tail_cutoff,
                )
    if finite_units:
        return ConjugacyResult(
            "provably_not",
            "every (tau, eps) over the full finite unit group fails at a checked prime",
        )
    return ConjugacyResult(
        "no_witness_up_to_bound", f"no (tau, eps) with unit height <= {unit_height}"
    )


def _refine_local_set(ls: LocalSet, k: int) -> LocalSet:
    """Re-express the classes modulo prime^k for a larger k."""
    from .lattices import quotient_residues

    if ls.modulus.k == k:
        return ls
    fine = ideal_power(ls.prime, k)
    reps = quotient_residues(ls.modulus.hnf, fine.hnf)
    out = set()
    for c in ls.classes:
        for q in reps:
            out.add(fine.reduce_coords(tuple(a + b for a, b in zip(c, q))))
    return LocalSet(fine, tuple(sorted(out)))


# ---------------------------------------------------------------------------
# symmetry scan


@dataclass(frozen=True)
class SymmetryCandidate:
    code: WindowCode
    translation_by: int | None  # set when the code acts as a translation

    def describe(self) -> str:
        if self.translation_by is not None:
            return f"translation by {self.translation_by}"
        pats = ";".join(
            "{" + ",".join(str(v) for v in sorted(t.ints())) + "}" for t in self.code.patterns
        )
        return f"code[{pats}]"


def symmetry_scan(
    sieve: SieveSpec, radius: int, budget: int = 4096
) -> list[SymmetryCandidate]:
    """Enumerate block-code symmetry candidates with window [-W, W] over Q.

    Families of non-empty admissible patterns are filtered by the necessary
    conditions for invertible codes (a singleton pattern, the derived-set
    translate condition at small primes) and then probed for patch-level
    injectivity and surjectivity on a finite box.  Survivors are returned;
    translations are recognized and labelled.
    """
    algebra = sieve.algebra
    if len(algebra.components) != 1 or not algebra.components[0].is_rational:
        raise PreconditionFailed("symmetry scan runs over the rationals")
    window_vals = list(range(-radius, radius + 1))
    window = int_pattern(window_vals)
    subsets = []
    for size in range(1, len(window_vals) + 1):
        for combo in itertools.combinations(window_vals, size):
            pat = int_pattern(combo)
            if is_admissible(sieve, pat).admissible:
                subsets.append(pat)
    if 2 ** len(subsets) > budget * 32:
        raise BudgetExceeded(f"2^{len(subsets)} families exceed the scan budget")

    # probe data: admissible patches on a box two steps wider than the window
    probe_vals = list(range(-radius - 2, radius + 3))
    probe_sets = []
    for size in range(0, len(probe_vals) + 1):
        for combo in itertools.combinations(probe_vals, size):
            pat = int_pattern(combo)
            if is_admissible(sieve, pat).admissible:
                probe_sets.append(pat)
    core_vals = list(range(-radius - 1, radius + 2))
    core_keys = {algebra.from_int(v).flat() for v in core_vals}
    admissible_core = set()
    for pat in probe_sets:
        sub = frozenset(e.flat() for e in pat.elements if e.flat() in core_keys)
        admissible_core.add(sub)

    # small primes for the derived-set condition, plus one identifying prime
    check_primes: list[PrimeIdeal] = [ls.prime for ls in sieve.exceptions]
    if sieve.tail.kind == "classes":
        k = sieve.tail.exponent
        limit = (2 * radius + 1) * len(sieve.tail.labels)
        for p in primes_upto(max(limit, 2)):
            prime = split_prime(algebra, p)[0]
            if prime.norm**k <= limit and sieve.exception_at(prime) is None:
                check_primes.append(prime)
        p = 2
        while True:
            prime = split_prime(algebra, p)[0]
            if prime.norm**k > 2 * radius + 1 and sieve.exception_at(prime) is None:
                check_primes.append(prime)
                break
            p += 1
            from .primes import is_prime

            while not is_prime(p):
                p += 1

    survivors: list[SymmetryCandidate] = []
    n_checked = 0
    for r in range(1, len(subsets) + 1):
        if n_checked > budget * 64:
            raise BudgetExceeded("family enumeration exceeded the scan budget")
        for family in itertools.combinations(subsets, r):
            n_checked += 1
            if not any(len(t) == 1 for t in family):
                continue
            code = WindowCode(ZLinearMap.identity(algebra), window, tuple(family))
            ok = True
            for prime in check_primes:
                derived = derived_local_set(sieve, prime, family)
                cand = local_set(sieve, prime)
                if subset_of_translate(cand, derived) is None:
                    ok = False
                    break
            if not ok:
                continue
            if not _passes_probe(code, sieve, probe_sets, core_keys, admissible_core):
                continue
            survivors.append(SymmetryCandidate(code, _translation_value(code, probe_sets)))
    return survivors


def _passes_probe(code, sieve, probe_sets, core_keys, admissible_core) -> bool:
    images = {}
    realized = set()
    for pat in probe_sets:
        img = apply_block_code(code, pat, complete=True)
        key = frozenset(e.flat() for e in img.elements)
        prev = images.get(key)
        if prev is not None and prev != frozenset(e.flat() for e in pat.elements):
            return False  # patch-level injectivity fails
        images[key] = frozenset(e.flat() for e in pat.elements)
        if not is_admissible(sieve, img).admissible:
            return False
        realized.add(frozenset(f for f in key if f in core_keys))
    return admissible_core <= realized


def _translation_value(code: WindowCode, probe_sets) -> int | None:
    algebra = code.source
    for t in range(-len(code.window), len(code.window) + 1):
        g = algebra.from_int(t)
        if all(
            apply_block_code(code, pat, complete=True).elements == pat.translate(g).elements
            for pat in probe_sets[: min(len(probe_sets), 40)]
        ):
            return t
    return None


# ---------------------------------------------------------------------------
# orbit closure approximation


def orbit_approximation(
    algebra: EtaleAlgebra,
    k: int,
    x_set: Pattern,
    window: Pattern,
    bound: int = 200_000,
) -> AlgebraicInt:
    """A shift Delta with (-Delta + V_{K,k}) agreeing with the pattern on the window.

    Builds the auxiliary sieve forbidding -X' + p^k (X' the pattern inside
    the window), adds one congruence per excluded window point at a fresh
    prime, and delegates to the strong-approximation solver; Delta = 0 is
    excluded from the scan.
    """
    if k < 2:
        raise PreconditionFailed("orbit approximation requires k >= 2")
    sieve = kfree_sieve(algebra, k)
    x_in_window = x_set.intersect(window)
    adm = is_admissible(sieve, x_in_window)
    if not adm.admissible:
        raise PreconditionFailed(f"pattern is not admissible at {adm.violation}")
    excluded = [e for e in window.elements if e not in x_in_window]

    labels: tuple = tuple(sorted((-e).flat() for e in x_in_window.elements))
    if labels:
        aux = build_sieve(algebra, TailRule.shifted_kfree(k, labels))
    else:
        aux = build_sieve(algebra, TailRule.empty())

    constraints = []
    used: list[PrimeIdeal] = []
    for y in excluded:
        found = None
        p = 2
        from .primes import is_prime

        while found is None:
            if is_prime(p):
                for prime in split_prime(algebra, p):
                    if any(q == prime for q in used):
                        continue
                    mod = ideal_power(prime, k)
                    if any(mod.contains(y - x) for x in x_in_window.elements):
                        continue
                    found = prime
                    break
            p += 1
        used.append(found)
        constraints.append(
            CongruenceConstraint(found, k, reduce_mod(-y, ideal_power(found, k)))
        )

    modulus = 1
    for prime in used:
        modulus *= prime.norm**k
    delta = solve(aux, constraints, bound=max(bound, 4 * modulus + 100), exclude_zero=True)
    for m in window.elements:
        want = m in x_in_window
        got = membership(sieve, m + delta).member
        if want != got:
            raise AssertionError("orbit witness failed re-verification")
    return delta


# ---------------------------------------------------------------------------
# pattern and code files


def parse_pattern_file(text: str, algebra: EtaleAlgebra) -> Pattern:
    """Comma-separated element literals; `#` comments allowed."""
    body = " ".join(
        line.split("#", 1)[0].strip() for line in text.splitlines()
    ).strip()
    if not body:
        return Pattern.of(algebra, ())
    return Pattern.of(algebra, (parse_element(t.strip(), algebra) for t in body.split(",") if t.strip()))


def format_pattern(pattern: Pattern) -> str:
    return ",".join(str(e) for e in pattern.elements)


def parse_code_file(text: str) -> WindowCode:
    """Block-code format: `source`, `target`, `matrix`, `window`, `pattern` lines."""
    from .rings import parse_algebra

    source = target = None
    matrix_vals: list[int] | None = None
    window_txt = None
    pattern_txts: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "source":
            source = parse_algebra(rest)
        elif head == "target":
            target = parse_algebra(rest)
        elif head == "matrix":
            matrix_vals = [int(v) for v in rest.split(",")]
        elif head == "window":
            window_txt = rest
        elif head == "pattern":
            pattern_txts.append(rest)
        else:
            raise ValueError(f"unknown directive {head!r}")
    if source is None:
        raise ValueError("code file needs a `source` line")
    target = target or source
    if window_txt is None or not pattern_txts:
        raise ValueError("code file needs `window` and `pattern` lines")
    window = parse_pattern_file(window_txt, source)
    pats = tuple(parse_pattern_file(t, source) for t in pattern_txts)
    if matrix_vals is None:
        lin = ZLinearMap.identity(source)
    else:
        n, m = source.degree, target.degree
        if len(matrix_vals) != n * m:
            raise ValueError("matrix length does not match degrees")
        lin = ZLinearMap(
            source, target, tuple(tuple(matrix_vals[i * n : (i + 1) * n]) for i in range(m))
        )
    return WindowCode(lin, window, pats)


def format_code(code: WindowCode) -> str:
    from .rings import format_algebra

    lines = [
        f"source {format_algebra(code.source)}",
        f"target {format_algebra(code.target)}",
        "matrix " + ",".join(str(v) for row in code.linmap.matrix for v in row),
        "window " + format_pattern(code.window),
    ]
    for t in code.patterns:
        lines.append("pattern " + format_pattern(t))
    return "\n".join(lines) + "\n"
