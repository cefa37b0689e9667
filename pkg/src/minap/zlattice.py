"""Exact integer-matrix normal forms and finitely generated subgroup computations.

Matrices are plain lists of lists of Python ints (arbitrary precision).
Ambient groups are products of cyclic groups given by a modulus per
coordinate, with 0 encoding an infinite cyclic coordinate, so free and
torsion coordinates share one congruence solver.  Quasicyclic coordinates
are excluded; callers clear p-power denominators into a finite quotient
first.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .errors import InvalidSpecError, SupportMismatchError
from .groups import BlockGroup, Element, Prufer, _Infinite

Matrix = list[list[int]]
Vector = list[int]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    if A and B and len(A[0]) != len(B):
        raise ValueError("dimension mismatch")
    n_inner = len(B)
    n_cols = len(B[0]) if B else 0
    return [
        [sum(row[t] * B[t][j] for t in range(n_inner)) for j in range(n_cols)]
        for row in A
    ]


def mat_vec(A: Matrix, v: Vector) -> Vector:
    return [sum(row[t] * v[t] for t in range(len(v))) for row in A]


def determinant(A: Matrix) -> int:
    """Fraction-free Bareiss elimination; A must be square."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(A: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*A*V = S, U and V unimodular, S diagonal with
    s_1 | s_2 | ... >= 0.  Pivoting always picks the smallest nonzero entry
    in absolute value, so the output is deterministic."""
    m = len(A)
    n = len(A[0]) if m else 0
    S = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def row_op(i, k, q):  # row i -= q * row k
        S[i] = [a - q * b for a, b in zip(S[i], S[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]

    def col_op(j, k, q):  # col j -= q * col k
        for row in S:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]

    def swap_rows(i, k):
        if i != k:
            S[i], S[k] = S[k], S[i]
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        if j != k:
            for row in S:
                row[j], row[k] = row[k], row[j]
            for row in V:
                row[j], row[k] = row[k], row[j]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] != 0 and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            if S[t][t] < 0:
                S[t] = [-a for a in S[t]]
                U[t] = [-a for a in U[t]]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t] != 0:
                    row_op(i, t, S[i][t] // S[t][t])
                    if S[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j] != 0:
                    col_op(j, t, S[t][j] // S[t][t])
                    if S[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # enforce the divisibility chain before moving on
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S[i][j] % S[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, -1)  # pulls the offending row up, then re-reduce
    return U, S, V


def hermite_normal_form(A: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite form: returns (H, U) with U*A = H, U unimodular,
    H in echelon shape with positive pivots and entries above a pivot
    reduced into [0, pivot)."""
    m = len(A)
    n = len(A[0]) if m else 0
    H = [list(map(int, row)) for row in A]
    U = identity(m)

    def row_op(i, k, q):
        H[i] = [a - q * b for a, b in zip(H[i], H[k])]
        U[i] = [a - q * b for a, b in zip(U[i], U[k])]

    r = 0
    for j in range(n):
        # gcd out the column below the current row
        while True:
            piv = None
            for i in range(r, m):
                if H[i][j] != 0 and (piv is None or abs(H[i][j]) < abs(H[piv][j])):
                    piv = i
            if piv is None:
                break
            if piv != r:
                H[r], H[piv] = H[piv], H[r]
                U[r], U[piv] = U[piv], U[r]
            if H[r][j] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            done = True
            for i in range(r + 1, m):
                if H[i][j] != 0:
                    row_op(i, r, H[i][j] // H[r][j])
                    if H[i][j] != 0:
                        done = False
            if done:
                break
        if r < m and H[r][j] != 0:
            for i in range(r):
                row_op(i, r, H[i][j] // H[r][j])
            r += 1
            if r == m:
                break
    return H, U


def _check_vectors(vectors: Iterable[Sequence[int]], orders: Sequence[int]) -> list[Vector]:
    vs = [list(map(int, v)) for v in vectors]
    for v in vs:
        if len(v) != len(orders):
            raise SupportMismatchError(
                f"vector length {len(v)} does not match {len(orders)} coordinates"
            )
    return vs


def _reduce(v: Sequence[int], orders: Sequence[int]) -> tuple[int, ...]:
    return tuple(c % m if m else c for c, m in zip(v, orders))


def _augmented(gens: list[Vector], orders: Sequence[int]) -> tuple[Matrix, int]:
    """Columns = generators, then one relaxation column m_i * unit_i per
    finite coordinate (the 0-modulus convention for infinite coordinates)."""
    n = len(orders)
    cols = [list(g) for g in gens]
    for i, m in enumerate(orders):
        if m:
            col = [0] * n
            col[i] = m
            cols.append(col)
    B = [[col[i] for col in cols] for i in range(n)]
    return B, len(gens)


def _solve_linear(B: Matrix, x: Vector) -> Vector | None:
    """One integer solution y of B y = x, or None."""
    m = len(B)
    n = len(B[0]) if m else 0
    if m == 0:
        return [0] * n
    U, S, V = smith_normal_form(B)
    y = mat_vec(U, x)
    z = [0] * n
    for i in range(m):
        s = S[i][i] if i < min(m, n) else 0
        if s:
            if y[i] % s:
                return None
            z[i] = y[i] // s
        elif y[i] != 0:
            return None
    return mat_vec(V, z[:n]) if n else []


def _kernel(B: Matrix) -> list[Vector]:
    """Basis of the integer kernel of B."""
    m = len(B)
    n = len(B[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [col[:] for col in identity(n)]
    U, S, V = smith_normal_form(B)
    out = []
    for q in range(n):
        s = S[q][q] if q < min(m, n) else 0
        if s == 0:
            out.append([V[i][q] for i in range(n)])
    return out


def subgroup_membership(
    gens: Iterable[Sequence[int]], orders: Sequence[int], x: Sequence[int]
) -> tuple[bool, list[int] | None]:
    """Decide x in <gens> inside the product of cyclic groups given by
    ``orders``; on success also return integer witness coefficients."""
    gens = _check_vectors(gens, orders)
    (x,) = _check_vectors([x], orders)
    if not gens:
        ok = not any(_reduce(x, orders))
        return ok, ([] if ok else None)
    B, n_gens = _augmented(gens, orders)
    y = _solve_linear(B, x)
    if y is None:
        return False, None
    coeffs = y[:n_gens]
    combo = [sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(len(orders))]
    assert _reduce(combo, orders) == _reduce(x, orders)
    return True, coeffs


def subgroup_intersection(
    gens_a: Iterable[Sequence[int]],
    gens_b: Iterable[Sequence[int]],
    orders: Sequence[int],
) -> list[tuple[int, ...]]:
    """Generators of <gens_a> /\\ <gens_b>; empty list means the trivial subgroup."""
    A = _check_vectors(gens_a, orders)
    Bg = _check_vectors(gens_b, orders)
    if not A or not Bg:
        return []
    n = len(orders)
    cols = [list(g) for g in A] + [[-c for c in g] for g in Bg]
    for i, m in enumerate(orders):
        if m:
            col = [0] * n
            col[i] = m
            cols.append(col)
    M = [[col[i] for col in cols] for i in range(n)]
    out = []
    seen = set()
    for vec in _kernel(M):
        a_part = vec[: len(A)]
        elem = _reduce(
            [sum(c * g[i] for c, g in zip(a_part, A)) for i in range(n)], orders
        )
        if any(elem) and elem not in seen:
            seen.add(elem)
            out.append(elem)
    return out


def span_elements(gens: Iterable[Sequence[int]], orders: Sequence[int], cap: int = 10**6) -> set:
    """Explicit closure of <gens> (finite coordinates only); raises past cap."""
    gens = _check_vectors(gens, orders)
    if any(m == 0 for m in orders):
        for g in gens:
            for c, m in zip(g, orders):
                if m == 0 and c != 0:
                    raise InvalidSpecError("cannot enumerate a subgroup with free directions")
    zero = tuple([0] * len(orders))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for base in frontier:
            for g in gens:
                cand = _reduce([a + b for a, b in zip(base, g)], orders)
                if cand not in seen:
                    if len(seen) >= cap:
                        raise InvalidSpecError(f"subgroup enumeration exceeded cap {cap}")
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return seen


def vector_order(v: Sequence[int], orders: Sequence[int]):
    """Order of a vector in the ambient product; None means infinite."""
    n = 1
    for c, m in zip(v, orders):
        cc = c % m if m else c
        if cc:
            if m == 0:
                return None
            n = math.lcm(n, m // math.gcd(cc, m))
    return n


def is_independent(elems: Iterable[Sequence[int]], orders: Sequence[int]) -> bool:
    """True iff a_1 x_1 + ... + a_n x_n = 0 forces every a_i x_i = 0
    (all x_i nonzero of finite order); decided by checking that each <x_i>
    meets the span of the others trivially."""
    elems = _check_vectors(elems, orders)
    for v in elems:
        o = vector_order(v, orders)
        if o is None:
            raise InvalidSpecError("independence test requires finite-order elements")
        if o == 1:
            return False
    for i in range(len(elems)):
        others = elems[:i] + elems[i + 1 :]
        if not others:
            continue
        if subgroup_intersection([elems[i]], others, orders):
            return False
    return True


# -- adapters between BlockGroup elements and flat vectors ---------------------


class SupportFrame:
    """Flattening of a set of blocks of a BlockGroup into flat coordinates."""

    def __init__(self, G: BlockGroup, blocks: Iterable[int]):
        self.G = G
        self.blocks = tuple(sorted(set(blocks)))
        self.orders: list[int] = []
        self._offsets: dict[int, int] = {}
        for j in self.blocks:
            blk = G.block(j)
            self._offsets[j] = len(self.orders)
            o = blk.e_order
            if isinstance(o, Prufer):
                raise InvalidSpecError(
                    "quasicyclic coordinates are excluded here; clear denominators first"
                )
            self.orders.append(0 if isinstance(o, _Infinite) else o)
            self.orders.extend(blk.h_orders)

    def flatten(self, x: Element) -> list[int]:
        v = [0] * len(self.orders)
        for j, t in x.items:
            if j not in self._offsets:
                raise SupportMismatchError(f"element touches block {j} outside the frame")
            off = self._offsets[j]
            v[off] = int(t.lam)
            for i, c in enumerate(t.h):
                v[off + 1 + i] = c
        return v

    def unflatten(self, v: Sequence[int]) -> Element:
        coords = {}
        for j in self.blocks:
            off = self._offsets[j]
            a = self.G.block(j).a
            coords[j] = (v[off], tuple(v[off + 1 : off + 1 + a]))
        return self.G.element(coords)

    @classmethod
    def spanning(cls, G: BlockGroup, elems: Iterable[Element]) -> "SupportFrame":
        blocks: set[int] = set()
        for x in elems:
            blocks.update(x.support())
        return cls(G, blocks)


def element_membership(G: BlockGroup, gens: list[Element], x: Element):
    frame = SupportFrame.spanning(G, list(gens) + [x])
    return subgroup_membership([frame.flatten(g) for g in gens], frame.orders, frame.flatten(x))


def element_intersection(G: BlockGroup, gens_a: list[Element], gens_b: list[Element]):
    frame = SupportFrame.spanning(G, list(gens_a) + list(gens_b))
    vecs = subgroup_intersection(
        [frame.flatten(g) for g in gens_a], [frame.flatten(g) for g in gens_b], frame.orders
    )
    return [frame.unflatten(v) for v in vecs]


def element_independent(G: BlockGroup, elems: list[Element]) -> bool:
    frame = SupportFrame.spanning(G, elems)
    return is_independent([frame.flatten(x) for x in elems], frame.orders)
