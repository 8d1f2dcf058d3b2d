"""Integer lattice plumbing: row-style Hermite normal forms and congruence solving.

A lattice in Z^n (n = 1 or 2 throughout the package) is stored as a tuple of
generator rows in lower-triangular Hermite normal form:

    ((A,),)             for n = 1, A > 0
    ((A, 0), (B, C))    for n = 2, A > 0, C > 0, 0 <= B < A

Rows generate the lattice over Z.  The determinant A*C is the index in Z^n.
"""

from __future__ import annotations

import itertools
from math import gcd
from typing import Iterator, Sequence

Hnf = tuple[tuple[int, ...], ...]
Vec = tuple[int, ...]


def hnf_from_rows(rows: Sequence[Sequence[int]], n: int) -> Hnf:
    """Lower-triangular HNF of the lattice spanned by integer rows in Z^n.

    Requires the span to have full rank n (always true for ideal lattices).
    """
    work = [list(r) for r in rows if any(r)]
    if n == 1:
        a = 0
        for r in work:
            a = gcd(a, r[0])
        if a == 0:
            raise ValueError("rank-deficient lattice")
        return ((abs(a),),)
    if n != 2:
        raise ValueError("only n in {1, 2} supported")
    # Clear the second coordinate down to a single pivot row.
    pivot = None
    firsts = []
    for r in work:
        a, b = r
        if b == 0:
            firsts.append(a)
            continue
        if pivot is None:
            pivot = [a, b]
            continue
        # Combine pivot and r so one of them has second coordinate 0.
        pa, pb = pivot
        while b != 0:
            q = pb // b
            pa, pb, a, b = a, b, pa - q * a, pb - q * b
        firsts.append(a)
        pivot = [pa, pb]
    if pivot is None:
        raise ValueError("rank-deficient lattice")
    if pivot[1] < 0:
        pivot = [-pivot[0], -pivot[1]]
    A = 0
    for a in firsts:
        A = gcd(A, a)
    if A == 0:
        raise ValueError("rank-deficient lattice")
    A = abs(A)
    B, C = pivot
    return ((A, 0), (B % A, C))


def lat_det(h: Hnf) -> int:
    d = 1
    for i, row in enumerate(h):
        d *= row[i]
    return d


def lat_reduce(coords: Sequence[int], h: Hnf) -> Vec:
    """Canonical representative of coords modulo the lattice (HNF box)."""
    if len(h) == 1:
        return (coords[0] % h[0][0],)
    (A, _), (B, C) = h
    a, b = coords
    r = b % C
    a -= ((b - r) // C) * B
    return (a % A, r)


def lat_contains(coords: Sequence[int], h: Hnf) -> bool:
    return all(c == 0 for c in lat_reduce(coords, h))


def lat_scale(h: Hnf, c: int) -> Hnf:
    return tuple(tuple(c * x for x in row) for row in h)


def lat_mul(h1: Hnf, h2: Hnf, mul) -> Hnf:
    """Product lattice spanned by pairwise products of generators.

    `mul(u, v)` multiplies two coordinate vectors in the ambient ring; for
    ideals this yields the ideal product.
    """
    rows = [mul(r1, r2) for r1 in h1 for r2 in h2]
    return hnf_from_rows(rows, len(h1[0]))


def residues(h: Hnf) -> Iterator[Vec]:
    """All canonical representatives modulo the lattice, in lex order."""
    if len(h) == 1:
        for a in range(h[0][0]):
            yield (a,)
        return
    A = h[0][0]
    C = h[1][1]
    for a in range(A):
        for b in range(C):
            yield (a, b)


def quotient_residues(h_coarse: Hnf, h_fine: Hnf) -> list[Vec]:
    """Representatives of the coarse lattice modulo the fine sublattice."""
    n = len(h_coarse)
    if n == 1:
        step = h_coarse[0][0]
        total = h_fine[0][0]
        if total % step:
            raise ValueError("not a sublattice")
        return [(a,) for a in range(0, total, step)]
    Ac, Cc = h_coarse[0][0], h_coarse[1][1]
    Af, Cf = h_fine[0][0], h_fine[1][1]
    if Af % Ac or Cf % Cc:
        raise ValueError("not a sublattice")
    out = []
    for i in range(Af // Ac):
        for j in range(Cf // Cc):
            v = (i * h_coarse[0][0] + j * h_coarse[1][0], j * h_coarse[1][1])
            out.append(lat_reduce(v, h_fine))
    return out


def _col_hnf_transform(mat: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[int]]:
    """Reduce `mat` (r x c) by unimodular column operations to column echelon form.

    Returns (L, U, pivots) with mat @ U == L; pivots[i] is the pivot column of
    row i or -1.
    """
    r = len(mat)
    c = len(mat[0]) if r else 0
    L = [row[:] for row in mat]
    U = [[1 if i == j else 0 for j in range(c)] for i in range(c)]
    col = 0
    pivots = []
    for row in range(r):
        # gcd-out all entries of this row in columns >= col
        j = col
        found = -1
        for jj in range(col, c):
            if L[row][jj]:
                found = jj
                break
        if found < 0:
            pivots.append(-1)
            continue
        if found != col:
            for i in range(r):
                L[i][col], L[i][found] = L[i][found], L[i][col]
            for i in range(c):
                U[i][col], U[i][found] = U[i][found], U[i][col]
        for jj in range(col + 1, c):
            while L[row][jj]:
                q = L[row][col] // L[row][jj]
                for i in range(r):
                    L[i][col] -= q * L[i][jj]
                for i in range(c):
                    U[i][col] -= q * U[i][jj]
                for i in range(r):
                    L[i][col], L[i][jj] = L[i][jj], L[i][col]
                for i in range(c):
                    U[i][col], U[i][jj] = U[i][jj], U[i][col]
        if L[row][col] < 0:
            for i in range(r):
                L[i][col] = -L[i][col]
            for i in range(c):
                U[i][col] = -U[i][col]
        pivots.append(col)
        col += 1
        if col == c:
            for rr in range(row + 1, r):
                pivots.append(-1 if all(L[rr][j] == 0 for j in range(c)) else -2)
            break
    return L, U, pivots


def solve_integer(mat: list[list[int]], rhs: Sequence[int]) -> list[int] | None:
    """One integer solution w of mat @ w == rhs, or None."""
    r = len(mat)
    c = len(mat[0]) if r else 0
    L, U, pivots = _col_hnf_transform(mat)
    if -2 in pivots:
        raise ValueError("echelon failure")
    z = [0] * c
    resid = list(rhs)
    for row in range(r):
        pc = pivots[row]
        if pc < 0:
            if resid[row] != 0:
                return None
            continue
        if resid[row] % L[row][pc]:
            return None
        z[pc] = resid[row] // L[row][pc]
        for rr in range(r):
            resid[rr] -= z[pc] * L[rr][pc]
    if any(resid):
        return None
    return [sum(U[i][j] * z[j] for j in range(c)) for i in range(c)]


def integer_kernel(mat: list[list[int]]) -> list[list[int]]:
    """Basis of the integer kernel {w : mat @ w == 0}."""
    r = len(mat)
    c = len(mat[0]) if r else 0
    L, U, pivots = _col_hnf_transform(mat)
    rank = sum(1 for p in pivots if p >= 0)
    return [[U[i][j] for i in range(c)] for j in range(rank, c)]


def lat_intersection(h1: Hnf, h2: Hnf) -> Hnf:
    """Intersection of two full-rank lattices in Z^n."""
    n = len(h1)
    mat = [[h1[k][i] for k in range(n)] + [-h2[k][i] for k in range(n)] for i in range(n)]
    kern = integer_kernel(mat)
    rows = []
    for w in kern:
        u = w[:n]
        rows.append(tuple(sum(u[k] * h1[k][i] for k in range(n)) for i in range(n)))
    return hnf_from_rows(rows, n)


def crt_pair(x1: Vec, h1: Hnf, x2: Vec, h2: Hnf) -> tuple[Vec, Hnf] | None:
    """Solve y = x1 mod h1, y = x2 mod h2; returns (y, h1 n h2) or None."""
    n = len(x1)
    mat = [[h1[k][i] for k in range(n)] + [-h2[k][i] for k in range(n)] for i in range(n)]
    rhs = [x2[i] - x1[i] for i in range(n)]
    w = solve_integer(mat, rhs)
    if w is None:
        return None
    u = w[:n]
    y = tuple(x1[i] + sum(u[k] * h1[k][i] for k in range(n)) for i in range(n))
    inter = lat_intersection(h1, h2)
    return lat_reduce(y, inter), inter


def preimage_lattice(a_mat: list[list[int]], h_target: Hnf) -> Hnf:
    """Lattice {x in Z^n : A x in target lattice} for an m x n integer matrix."""
    m = len(a_mat)
    n = len(a_mat[0])
    nt = len(h_target)
    if nt != m:
        raise ValueError("dimension mismatch")
    mat = [[a_mat[i][j] for j in range(n)] + [-h_target[k][i] for k in range(nt)] for i in range(m)]
    kern = integer_kernel(mat)
    rows = [tuple(w[:n]) for w in kern]
    return hnf_from_rows(rows, n)


def _layer_values(h: int) -> list[int]:
    vals = [0]
    for v in range(1, h + 1):
        vals.extend((v, -v))
    return vals


def gen_multipliers(rank: int) -> Iterator[Vec]:
    """Multiplier tuples in deterministic radial order.

    Layer h contains the tuples with max |t_i| = h; within a layer, tuples are
    ordered coordinatewise by 0 < 1 < -1 < 2 < -2 < ...
    """
    h = 0
    while True:
        vals = _layer_values(h)
        for t in itertools.product(vals, repeat=rank):
            if max((abs(v) for v in t), default=0) == h:
                yield t
        h += 1
