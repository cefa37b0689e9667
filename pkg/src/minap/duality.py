"""Characters of discrete block groups, exact pairings into Q/Z, annihilators.

Pairing values are exact rationals in [0,1) under addition mod 1; the
multiplicative circle picture corresponds to value -> exp(2*pi*i*value) and
is never evaluated numerically.  Characters have finite support and rational
values; on an infinite cyclic coordinate the value on the generator may be
any rational, on a quasicyclic coordinate a character is an integer
multiplier acting on the p-power-torsion rationals.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import InvalidSpecError
from .groups import BlockGroup, Element, INFINITE, Prufer, _Infinite
from . import zlattice


def fmod1(q) -> Fraction:
    """Exact reduction into [0, 1)."""
    return Fraction(q) % 1


@dataclass(frozen=True)
class CharTerm:
    """Character data on one block: value on e_j and on each side generator."""

    eps: Union[Fraction, int]
    etas: tuple[Fraction, ...] = ()

    def is_zero(self) -> bool:
        return self.eps == 0 and all(v == 0 for v in self.etas)


@dataclass(frozen=True)
class Character:
    """Finite-support coordinate character, sorted by block index."""

    items: tuple[tuple[int, CharTerm], ...] = ()

    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.items)

    def term(self, j: int) -> CharTerm | None:
        for jj, t in self.items:
            if jj == j:
                return t
        return None

    def is_zero(self) -> bool:
        return not self.items

    def max_block(self) -> int:
        return self.items[-1][0] if self.items else -1


TRIVIAL = Character()


def character(G: BlockGroup, coords: Mapping[int, tuple]) -> Character:
    """Build a validated character from ``{block: (eps, etas)}``.

    On a finite block the denominators must divide the respective orders;
    on an infinite cyclic block eps is any rational reduced mod 1; on a
    quasicyclic block eps is an integer multiplier.
    """
    items = []
    for j in sorted(coords):
        eps, etas = coords[j]
        blk = G.block(j)
        etas = tuple(fmod1(v) for v in etas)
        if len(etas) > blk.a:
            raise InvalidSpecError(f"block {j} has {blk.a} side coordinates")
        etas = etas + (Fraction(0),) * (blk.a - len(etas))
        for v, m in zip(etas, blk.h_orders):
            if (v * m).denominator != 1:
                raise InvalidSpecError(f"side value {v} invalid for order {m}")
        o = blk.e_order
        if isinstance(o, Prufer):
            if not isinstance(eps, int):
                raise InvalidSpecError("quasicyclic coordinate takes an integer multiplier")
        elif isinstance(o, _Infinite):
            eps = fmod1(eps)
        else:
            eps = fmod1(eps)
            if (eps * o).denominator != 1:
                raise InvalidSpecError(f"value {eps} invalid for order {o}")
        t = CharTerm(eps, etas)
        if not t.is_zero():
            items.append((j, t))
    return Character(tuple(items))


def pair(G: BlockGroup, chi: Character, x: Element) -> Fraction:
    """Exact bilinear pairing, summed over the shared support, mod 1."""
    total = Fraction(0)
    for j, t in x.items:
        ct = chi.term(j)
        if ct is None:
            continue
        total += ct.eps * t.lam
        for v, c in zip(ct.etas, t.h):
            total += v * c
    return fmod1(total)


def char_add(G: BlockGroup, a: Character, b: Character) -> Character:
    coords: dict[int, tuple] = {j: (t.eps, t.etas) for j, t in a.items}
    for j, t in b.items:
        if j in coords:
            eps, etas = coords[j]
            coords[j] = (eps + t.eps, tuple(u + v for u, v in zip(etas, t.etas)))
        else:
            coords[j] = (t.eps, t.etas)
    return character(G, coords)


def char_neg(G: BlockGroup, a: Character) -> Character:
    return character(G, {j: (-t.eps, tuple(-v for v in t.etas)) for j, t in a.items})


def character_order(G: BlockGroup, chi: Character):
    """lcm of coordinate value denominators; INFINITE for a free multiplier."""
    n = 1
    for j, t in chi.items:
        blk = G.block(j)
        if isinstance(blk.e_order, Prufer):
            if t.eps != 0:
                return INFINITE
        elif isinstance(t.eps, Fraction) and t.eps != 0:
            n = math.lcm(n, t.eps.denominator)
        for v in t.etas:
            if v != 0:
                n = math.lcm(n, v.denominator)
    return n


def _finite_block(G: BlockGroup, j: int):
    blk = G.block(j)
    if not isinstance(blk.e_order, int):
        raise InvalidSpecError(f"block {j} is not finite; annihilators need finite blocks")
    return blk


def _block_vec_of_element(G: BlockGroup, j: int, x: Element) -> list[int]:
    blk = _finite_block(G, j)
    for jj in x.support():
        if jj != j:
            raise InvalidSpecError(f"generator {x!r} is not local to block {j}")
    t = x.term(j)
    if t is None:
        return [0] * (1 + blk.a)
    return [int(t.lam), *t.h]


def _char_from_vec(G: BlockGroup, j: int, vec) -> Character:
    blk = _finite_block(G, j)
    eps = Fraction(vec[0] % blk.e_order, blk.e_order)
    etas = tuple(Fraction(c % m, m) for c, m in zip(vec[1:], blk.h_orders))
    return character(G, {j: (eps, etas)})


def _char_to_vec(G: BlockGroup, j: int, chi: Character) -> list[int]:
    blk = _finite_block(G, j)
    for jj in chi.support():
        if jj != j:
            raise InvalidSpecError("character family must be block-local")
    t = chi.term(j)
    if t is None:
        return [0] * (1 + blk.a)
    return [int(t.eps * blk.e_order), *(int(v * m) for v, m in zip(t.etas, blk.h_orders))]


def block_dual(G: BlockGroup, j: int, cap: int = 200_000) -> list[Character]:
    """All characters of the (finite) block j, enumerated deterministically."""
    blk = _finite_block(G, j)
    size = blk.e_order * math.prod(blk.h_orders)
    if size > cap:
        raise InvalidSpecError(f"block dual of size {size} exceeds cap {cap}")
    out = []
    ranges = [range(blk.e_order)] + [range(m) for m in blk.h_orders]
    for vec in itertools.product(*ranges):
        out.append(_char_from_vec(G, j, list(vec)))
    return out


def annihilator_basis(
    G: BlockGroup, h_spec: Mapping[int, Iterable[Element]]
) -> dict[int, list[Character]]:
    """Per block j: generators of the annihilator of the given subgroup of
    block j inside the block dual (solutions of pair(chi, h) = 0)."""
    out: dict[int, list[Character]] = {}
    for j, gens in h_spec.items():
        blk = _finite_block(G, j)
        mods = [blk.e_order, *blk.h_orders]
        L = math.lcm(*mods)
        gen_vecs = [_block_vec_of_element(G, j, g) for g in gens]
        # unknown character vector (x, y_i) with x mod u, y_i mod h_i:
        # for each generator, sum of x*lam*L/u + y_i*c_i*L/h_i = 0 mod L
        rows = [[c * (L // m) for c, m in zip(gv, mods)] for gv in gen_vecs]
        sols = _solve_block_congruences(rows, L, mods)
        out[j] = [_char_from_vec(G, j, v) for v in sols]
    return out


def annihilator_in_G(
    G: BlockGroup, char_spec: Mapping[int, Iterable[Character]]
) -> dict[int, list[Element]]:
    """Per block j: generators of {x in block j : pair(chi, x) = 0 for all chi}."""
    out: dict[int, list[Element]] = {}
    for j, chars in char_spec.items():
        blk = _finite_block(G, j)
        mods = [blk.e_order, *blk.h_orders]
        L = math.lcm(*mods)
        rows = [
            [c * (L // m) for c, m in zip(_char_to_vec(G, j, chi), mods)] for chi in chars
        ]
        sols = _solve_block_congruences(rows, L, mods)
        elems = [G.element({j: (v[0], tuple(v[1:]))}) for v in sols]
        out[j] = [x for x in elems if not x.is_zero()]
    return out


def _solve_block_congruences(rows: list[list[int]], L: int, mods: list[int]) -> list[list[int]]:
    """Generators of {v mod mods : rows . v = 0 mod L}, nonzero ones only."""
    k = len(mods)
    if not rows:
        gens = [[1 if i == t else 0 for i in range(k)] for t in range(k)]
        return gens
    # each variable genuinely lives mod its modulus: mods[i] * column_i = 0 mod L
    for row in rows:
        for c, m in zip(row, mods):
            assert (c * m) % L == 0
    M = [row[:] + [0] * len(rows) for row in rows]
    for r in range(len(rows)):
        M[r][k + r] = L
    kernel = zlattice._kernel(M)
    seen = set()
    out = []
    for vec in kernel:
        v = tuple(c % m for c, m in zip(vec[:k], mods))
        if any(v) and v not in seen:
            seen.add(v)
            out.append(list(v))
    return out
