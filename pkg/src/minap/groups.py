"""Presentations of countable abelian groups as direct sums of cyclic blocks.

A group is described by finitely many explicit blocks plus an optional tail
rule that generates blocks for all larger indices.  Each block consists of a
distinguished cyclic part ``<e_j>`` (finite, infinite cyclic, or quasicyclic
p-power torsion) together with a finite torsion side part with basis orders
``h_orders``.  Elements are sparse coefficient vectors in canonical form.

All values are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import InvalidSpecError, OutOfRangeError, UnboundedError


class _Infinite:
    """Singleton tag for an infinite cyclic order."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"


class _Omega:
    """Singleton tag for a countably infinite cardinality."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "OMEGA"


INFINITE = _Infinite()
OMEGA = _Omega()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (block orders stay small)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Prufer:
    """Quasicyclic order tag: all p-power torsion of the rationals mod 1."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidSpecError(f"Prufer parameter {self.p} is not prime")

    def __repr__(self) -> str:
        return f"Prufer({self.p})"


CyclicOrder = Union[int, _Infinite, Prufer]


def validate_order(o: CyclicOrder) -> CyclicOrder:
    if isinstance(o, (_Infinite, Prufer)):
        return o
    if isinstance(o, int):
        if o < 2:
            raise InvalidSpecError(f"finite cyclic order must be >= 2, got {o}")
        return o
    raise InvalidSpecError(f"not a cyclic order: {o!r}")


@dataclass(frozen=True)
class Block:
    """One summand ``<e_j> + H_j``; ``h_orders`` are the side-part basis orders."""

    e_order: CyclicOrder
    h_orders: tuple[int, ...] = ()

    def __post_init__(self):
        validate_order(self.e_order)
        object.__setattr__(self, "h_orders", tuple(self.h_orders))
        for o in self.h_orders:
            if not isinstance(o, int) or o < 2:
                raise InvalidSpecError(f"side-part order must be a finite integer >= 2, got {o}")

    @property
    def a(self) -> int:
        return len(self.h_orders)


@dataclass(frozen=True)
class ConstTail:
    """Every tail block is a copy of ``block``."""

    block: Block


@dataclass(frozen=True)
class GeometricTail:
    """Tail blocks have e-orders p**start_exp, p**(start_exp+1), ..."""

    p: int
    start_exp: int
    h_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidSpecError(f"geometric tail base {self.p} is not prime")
        if self.start_exp < 1:
            raise InvalidSpecError("geometric tail start exponent must be >= 1")
        object.__setattr__(self, "h_orders", tuple(self.h_orders))
        for o in self.h_orders:
            if not isinstance(o, int) or o < 2:
                raise InvalidSpecError(f"side-part order must be a finite integer >= 2, got {o}")

    def block(self, t: int) -> Block:
        return Block(self.p ** (self.start_exp + t), self.h_orders)


TailRule = Union[ConstTail, GeometricTail, None]


@dataclass(frozen=True)
class Term:
    """Coefficients of one block: ``lam`` on e_j, ``h`` on the side basis."""

    lam: Union[int, Fraction]
    h: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.lam == 0 and all(c == 0 for c in self.h)


@dataclass(frozen=True)
class Element:
    """Finite-support element, stored as a sorted tuple of (block, Term)."""

    items: tuple[tuple[int, Term], ...] = ()

    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.items)

    def term(self, j: int) -> Term | None:
        for jj, t in self.items:
            if jj == j:
                return t
        return None

    def is_zero(self) -> bool:
        return not self.items

    def max_block(self) -> int:
        """Largest block index in the support; -1 for zero."""
        return self.items[-1][0] if self.items else -1

    def __repr__(self) -> str:
        return f"Element({format_element(self)!r})"


ZERO = Element()


def format_element(x: Element) -> str:
    """Render in the expression syntax ``3*e[5] + h[2,1]`` (h index 1-based)."""
    if x.is_zero():
        return "0"
    parts = []
    for j, t in x.items:
        if t.lam != 0:
            if t.lam == 1:
                parts.append(f"e[{j}]")
            else:
                parts.append(f"{t.lam}*e[{j}]")
        for i, c in enumerate(t.h):
            if c != 0:
                if c == 1:
                    parts.append(f"h[{j},{i + 1}]")
                else:
                    parts.append(f"{c}*h[{j},{i + 1}]")
    return " + ".join(parts)


@dataclass(frozen=True)
class BlockGroup:
    """A validated presentation: explicit head blocks plus an optional tail rule.

    ``h_stop`` is the first block index whose side part is trivial (all blocks
    below it must carry a nonempty side part, all blocks from it on an empty
    one); ``INFINITE`` means every block has a nonempty side part.
    """

    head: tuple[Block, ...]
    tail: TailRule = None
    h_stop: Union[int, _Infinite] = 0

    def is_finitely_generated(self) -> bool:
        return self.tail is None

    def block(self, j: int) -> Block:
        """Block at index ``j``, expanding the tail rule; total when a tail exists."""
        if j < 0:
            raise OutOfRangeError(f"negative block index {j}")
        if j < len(self.head):
            return self.head[j]
        if self.tail is None:
            raise OutOfRangeError(f"block {j} out of range for a {len(self.head)}-block group")
        t = j - len(self.head)
        if isinstance(self.tail, ConstTail):
            return self.tail.block
        return self.tail.block(t)

    # -- element construction ------------------------------------------------

    def canonical_term(self, j: int, lam, h: Iterable[int]) -> Term:
        blk = self.block(j)
        h = tuple(h)
        if len(h) > blk.a:
            raise InvalidSpecError(f"block {j} has {blk.a} side coordinates, got {len(h)}")
        h = h + (0,) * (blk.a - len(h))
        o = blk.e_order
        if isinstance(o, _Infinite):
            if not isinstance(lam, int):
                raise InvalidSpecError(f"infinite-cyclic coefficient must be an integer, got {lam!r}")
        elif isinstance(o, Prufer):
            lam = Fraction(lam) % 1
            den = lam.denominator
            while den % o.p == 0:
                den //= o.p
            if den != 1:
                raise InvalidSpecError(
                    f"block {j} coefficient must have {o.p}-power denominator, got {lam}"
                )
        else:
            lam = int(lam) % o
        return Term(lam, tuple(c % m for c, m in zip(h, blk.h_orders)))

    def element(self, coords: Mapping[int, tuple]) -> Element:
        """Build a canonical element from ``{block: (lam, h_coeffs)}``."""
        items = []
        for j in sorted(coords):
            lam, h = coords[j]
            t = self.canonical_term(j, lam, h)
            if not t.is_zero():
                items.append((j, t))
        return Element(tuple(items))

    def zero(self) -> Element:
        return ZERO

    def e(self, j: int, c=1) -> Element:
        return self.element({j: (c, ())})

    def h(self, j: int, i: int = 1, c: int = 1) -> Element:
        """The i-th side basis element of block j (i is 1-based)."""
        blk = self.block(j)
        if not 1 <= i <= blk.a:
            raise OutOfRangeError(f"block {j} has no side coordinate {i}")
        vec = [0] * blk.a
        vec[i - 1] = c
        return self.element({j: (0, tuple(vec))})

    # -- arithmetic ----------------------------------------------------------

    def add(self, x: Element, y: Element) -> Element:
        coords: dict[int, tuple] = {j: (t.lam, t.h) for j, t in x.items}
        for j, t in y.items:
            if j in coords:
                lam, h = coords[j]
                coords[j] = (lam + t.lam, tuple(a + b for a, b in zip(h, t.h)))
            else:
                coords[j] = (t.lam, t.h)
        return self.element(coords)

    def neg(self, x: Element) -> Element:
        return self.element({j: (-t.lam, tuple(-c for c in t.h)) for j, t in x.items})

    def smul(self, n: int, x: Element) -> Element:
        return self.element({j: (n * t.lam, tuple(n * c for c in t.h)) for j, t in x.items})

    def sub(self, x: Element, y: Element) -> Element:
        return self.add(x, self.neg(y))

    def sum(self, xs: Iterable[Element]) -> Element:
        acc = ZERO
        for x in xs:
            acc = self.add(acc, x)
        return acc

    # -- orders --------------------------------------------------------------

    def order_of(self, x: Element) -> Union[int, _Infinite]:
        """Least n >= 1 with n*x = 0, or INFINITE."""
        n = 1
        for j, t in x.items:
            blk = self.block(j)
            o = blk.e_order
            if t.lam != 0:
                if isinstance(o, _Infinite):
                    return INFINITE
                if isinstance(o, Prufer):
                    n = math.lcm(n, t.lam.denominator)
                else:
                    n = math.lcm(n, o // math.gcd(int(t.lam), o))
            for c, m in zip(t.h, blk.h_orders):
                if c != 0:
                    n = math.lcm(n, m // math.gcd(c, m))
        return n

    def exponent(self) -> Union[int, _Infinite]:
        """lcm of all block orders; tail rules analyzed symbolically."""
        n = 1
        for blk in self.head:
            o = blk.e_order
            if isinstance(o, (_Infinite, Prufer)):
                return INFINITE
            n = math.lcm(n, o, *blk.h_orders) if blk.h_orders else math.lcm(n, o)
        if isinstance(self.tail, GeometricTail):
            return INFINITE
        if isinstance(self.tail, ConstTail):
            blk = self.tail.block
            o = blk.e_order
            if isinstance(o, (_Infinite, Prufer)):
                return INFINITE
            n = math.lcm(n, o, *blk.h_orders) if blk.h_orders else math.lcm(n, o)
        return n

    def is_bounded(self) -> bool:
        return not isinstance(self.exponent(), _Infinite)

    def is_finite(self) -> bool:
        return self.tail is None


def make_group(head: Iterable[Block], tail: TailRule = None, h_stop="auto") -> BlockGroup:
    """Validate and build a presentation; rejects inconsistent h_stop/tail data."""
    head = tuple(head)
    if tail is None and not head:
        raise InvalidSpecError("a group needs at least one block or a tail rule")

    tail_h = () if tail is None else (
        tail.block.h_orders if isinstance(tail, ConstTail) else tail.h_orders
    )

    if h_stop == "auto":
        if tail is not None and tail_h:
            h_stop = INFINITE
        else:
            h_stop = 0
            for j, blk in enumerate(head):
                if blk.h_orders:
                    h_stop = j + 1

    if isinstance(h_stop, _Infinite):
        if tail is None:
            raise InvalidSpecError("h_stop=INFINITE requires a tail rule")
        if not tail_h:
            raise InvalidSpecError("h_stop=INFINITE but the tail blocks have no side part")
        for j, blk in enumerate(head):
            if not blk.h_orders:
                raise InvalidSpecError(f"h_stop=INFINITE but block {j} has no side part")
    else:
        if not isinstance(h_stop, int) or h_stop < 0:
            raise InvalidSpecError(f"h_stop must be a nonnegative integer or INFINITE, got {h_stop!r}")
        if tail is not None and tail_h:
            raise InvalidSpecError("h_stop is finite but the tail rule has nonempty side parts")
        if h_stop > len(head):
            raise InvalidSpecError(f"h_stop={h_stop} exceeds the number of explicit blocks")
        for j, blk in enumerate(head):
            if j < h_stop and not blk.h_orders:
                raise InvalidSpecError(f"block {j} below h_stop={h_stop} has no side part")
            if j >= h_stop and blk.h_orders:
                raise InvalidSpecError(f"block {j} at or above h_stop={h_stop} has a side part")
    return BlockGroup(head, tail, h_stop)


def integers() -> BlockGroup:
    """The infinite cyclic group as a single-block presentation."""
    return make_group([Block(INFINITE)])


def block_at(G: BlockGroup, j: int) -> Block:
    return G.block(j)


# -- invariants of bounded groups ---------------------------------------------


def primary_classes(G: BlockGroup) -> dict[tuple[int, int], Union[int, _Omega]]:
    """Multiset of cyclic prime-power summands ``(p, r) -> count`` of a bounded group.

    Composite cyclic factors are re-expressed through their primary
    decomposition; tail-rule contributions count as OMEGA.
    """
    if not G.is_bounded():
        raise UnboundedError("primary decomposition needs a bounded group")

    classes: dict[tuple[int, int], Union[int, _Omega]] = {}

    def bump(order: int, count):
        for p, r in factorize(order).items():
            key = (p, r)
            cur = classes.get(key, 0)
            if isinstance(cur, _Omega) or isinstance(count, _Omega):
                classes[key] = OMEGA
            else:
                classes[key] = cur + count

    for blk in G.head:
        bump(blk.e_order, 1)
        for m in blk.h_orders:
            bump(m, 1)
    if isinstance(G.tail, ConstTail):
        blk = G.tail.block
        bump(blk.e_order, OMEGA)
        for m in blk.h_orders:
            bump(m, OMEGA)
    return classes


def ulm_kaplansky_leading(G: BlockGroup) -> dict[int, tuple[int, Union[int, _Omega]]]:
    """Per prime p dividing the exponent: the largest r with a Z(p^r) summand
    and how many such summands occur (a finite count or OMEGA)."""
    classes = primary_classes(G)
    out: dict[int, tuple[int, Union[int, _Omega]]] = {}
    for (p, r), count in classes.items():
        if p not in out or r > out[p][0]:
            out[p] = (r, count)
    return out
