"""Explicit null-sequence constructions on block groups and on the circle.

The centrepiece is the triangular sequence attached to a presentation
``G = (+)_j (<e_j> + H_j)``: even terms enumerate the multiples
``e_0, 2e_0, ..., (u_0-1)e_0, e_1, ...`` of the lead generators, odd terms
walk the side basis ``b_0, b_1, ...`` while dragging a growing block of fresh
lead generators, so that every side generator recurs infinitely often against
an escaping free part.  The index bookkeeping uses the triangular numbers
``S_n = n(n+1)/2`` with ``t(n) = max{t : n >= S_t}`` and ``mu_n = S_{t(n)}``.

The circle half decides, for integer sequences given by closed rules, whether
the multiples ``u_n * x`` of a rational x tend to 0 mod 1 (the residues live
in a finite cyclic group, so convergence means eventual equality and the
orbit can be cycle-checked exactly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .errors import (
    DegenerateTargetError,
    InvalidParamsError,
    NoCycleDetectedError,
    OutOfRangeError,
)
from .groups import (
    Block,
    BlockGroup,
    ConstTail,
    Element,
    GeometricTail,
    INFINITE,
    _Infinite,
    integers,
)
from .tseq import ExplicitSeq, TSeq, interleave


# -- triangular-number tables ---------------------------------------------------


def tri_s(n: int) -> int:
    """S_n = 1 + 2 + ... + n (S_0 = 0)."""
    return n * (n + 1) // 2


def tri_t(n: int) -> int:
    """max{t : n >= S_t}, defined for n >= 1."""
    if n < 1:
        raise ValueError("t(n) is defined for n >= 1")
    t = (math.isqrt(8 * n + 1) - 1) // 2
    while tri_s(t + 1) <= n:
        t += 1
    while tri_s(t) > n:
        t -= 1
    return t


def tri_mu(n: int) -> int:
    """mu_n = S_{t(n)}; with the convention that reduction mod 1 yields 0."""
    return tri_s(tri_t(n))


def table_inequalities(n: int) -> dict[str, bool]:
    """The two component inequalities claimed for n > 3, reported separately."""
    mu = tri_mu(n)
    return {
        "mod_lt_n": (n % mu if mu > 1 else 0) < n,
        "n_lt_s_prev": n < tri_s(n - 1),
    }


# -- the triangular sequence ------------------------------------------------------


@dataclass(frozen=True)
class TriangularParams:
    """Validated data for the triangular sequence on a block group.

    ``device`` marks the variant where the prescribed subgroup is the whole
    group: every block must then be bare (no side part) and the side basis is
    taken to be the lead generators themselves.  ``stop`` is the first block
    with trivial side part (INFINITE when none), ``hyp`` records which order
    hypothesis holds: 'const' (all lead orders equal, divisible by the side
    exponent) or 'growing' (lead orders dominate the side exponent and tend
    to infinity).
    """

    group: BlockGroup
    device: bool
    stop: Union[int, _Infinite]
    hyp: str  # 'const' | 'growing'
    exp_h: int
    c: Optional[int] = None  # total side-basis size when stop is finite

    @classmethod
    def from_group(cls, G: BlockGroup, device: Optional[bool] = None) -> "TriangularParams":
        if G.tail is None:
            raise InvalidParamsError("the construction needs infinitely many blocks")
        orders = [blk.e_order for blk in G.head]
        if isinstance(G.tail, ConstTail):
            orders.append(G.tail.block.e_order)
        for o in orders:
            if not isinstance(o, int):
                raise InvalidParamsError("every lead order must be finite")

        bare = G.h_stop == 0
        if device is None:
            device = bare
        if device and not bare:
            raise InvalidParamsError("device mode needs blocks without side parts")
        if not device and bare:
            raise InvalidParamsError("no side part to prescribe; use device mode")

        if device:
            if isinstance(G.tail, GeometricTail) or len(set(orders)) != 1:
                raise InvalidParamsError(
                    "device mode needs a constant lead order (the prescribed subgroup "
                    "is the whole group, whose exponent must divide that order)"
                )
            u = orders[0]
            return cls(G, True, INFINITE, "const", u)

        exp_h = 1
        for blk in G.head:
            for m in blk.h_orders:
                exp_h = math.lcm(exp_h, m)
        if isinstance(G.tail, ConstTail):
            for m in G.tail.block.h_orders:
                exp_h = math.lcm(exp_h, m)
        else:
            for m in G.tail.h_orders:
                exp_h = math.lcm(exp_h, m)

        stop = G.h_stop
        c = None
        if not isinstance(stop, _Infinite):
            c = sum(G.block(j).a for j in range(stop))
            if c == 0:
                raise InvalidParamsError("no side part to prescribe")

        if isinstance(G.tail, ConstTail):
            if len(set(orders)) != 1:
                raise InvalidParamsError("constant-tail groups need equal lead orders throughout")
            u = orders[0]
            if u % exp_h != 0:
                raise InvalidParamsError(
                    f"lead order {u} is not divisible by the side exponent {exp_h}"
                )
            return cls(G, False, stop, "const", exp_h, c)
        # geometric tail: growing hypothesis
        tail_min = G.tail.p ** G.tail.start_exp
        if any(o < exp_h for o in orders) or tail_min < exp_h:
            raise InvalidParamsError(
                f"every lead order must be at least the side exponent {exp_h}"
            )
        return cls(G, False, stop, "growing", exp_h, c)

    # -- side-basis enumeration (block-major, then within-block index) ----------

    def b_block(self, k: int) -> tuple[int, int]:
        """Block index and 1-based side position of the k-th basis element."""
        if k < 0:
            raise OutOfRangeError("negative basis index")
        if self.device:
            return k, 0
        if self.c is not None and k >= self.c:
            raise OutOfRangeError(f"basis index {k} beyond the {self.c}-element side basis")
        j = 0
        acc = 0
        while True:
            a = self.group.block(j).a
            if acc + a > k:
                return j, k - acc + 1
            acc += a
            j += 1

    def b_element(self, k: int) -> Element:
        j, i = self.b_block(k)
        if self.device:
            return self.group.e(k)
        return self.group.h(j, i)

    def b_count_through_block(self, B: int) -> int:
        """Number of side basis elements living in blocks 0..B."""
        if self.device:
            return B + 1
        total = 0
        for j in range(B + 1):
            if not isinstance(self.stop, _Infinite) and j >= self.stop:
                break
            total += self.group.block(j).a
        if self.c is not None:
            total = min(total, self.c)
        return total

    # -- even-term enumeration ---------------------------------------------------

    def even_cum(self, j: int) -> int:
        """Number of even terms contributed by blocks 0..j-1."""
        return _even_cum(self, j)

    def even_block(self, t: int) -> int:
        """Block index of the t-th even term."""
        j = 0
        while self.even_cum(j + 1) <= t:
            j += 1
        return j

    def even_term(self, t: int) -> Element:
        j = self.even_block(t)
        lam = t - self.even_cum(j) + 1
        return self.group.e(j, lam)

    def even_escape(self, B: int) -> int:
        """First t from which every even term lives beyond block B."""
        return self.even_cum(B + 1)

    # -- odd terms ----------------------------------------------------------------

    def odd_kappa(self, t: int) -> int:
        """Side-basis index carried by the t-th odd term."""
        if t <= 1:
            return 0
        if self.c is not None:
            return t % self.c
        if t == 2:
            return 1
        mu = tri_mu(t)
        return t % mu if mu > 1 else 0

    def odd_run(self, t: int) -> tuple[int, int]:
        """Lead-generator index range (lo, hi) of the t-th odd term; empty for t=0."""
        if t == 0:
            return (1, 0)
        return (tri_s(t - 1) + 1, tri_s(t))

    def odd_term(self, t: int) -> Element:
        x = self.b_element(self.odd_kappa(t))
        lo, hi = self.odd_run(t)
        for j in range(lo, hi + 1):
            x = self.group.add(x, self.group.e(j))
        return x

    def term(self, n: int) -> Element:
        return _tri_term(self, n)

    def order_floor_index(self, k: int) -> int:
        """Growing hypothesis: first block from which every lead order exceeds k+1."""
        G = self.group
        assert isinstance(G.tail, GeometricTail)
        bound = 0
        for j, blk in enumerate(G.head):
            if blk.e_order <= k + 1:
                bound = j + 1
        t0 = 0
        while G.tail.p ** (G.tail.start_exp + t0) <= k + 1:
            t0 += 1
        return max(bound, len(G.head) + t0)


@lru_cache(maxsize=None)
def _even_cum(params: TriangularParams, j: int) -> int:
    total = 0
    for jj in range(j):
        total += params.group.block(jj).e_order - 1
    return total


@lru_cache(maxsize=65536)
def _tri_term(params: TriangularParams, n: int) -> Element:
    if n < 0:
        raise OutOfRangeError("negative index")
    if n % 2 == 0:
        return params.even_term(n // 2)
    return params.odd_term((n - 1) // 2)


def triangular_term(params: TriangularParams, n: int) -> Element:
    return params.term(n)


def verify_recurrence(
    params: TriangularParams, k: int, N: int, beyond_block: int = -1
) -> list[int]:
    """All odd positions t <= N whose term carries basis element k with every
    lead index of its run beyond ``beyond_block``."""
    out = []
    for t in range(N + 1):
        if params.odd_kappa(t) != k:
            continue
        lo, hi = params.odd_run(t)
        if lo > hi or lo > beyond_block:
            out.append(t)
    return out


@dataclass(frozen=True)
class SupportEscapeCert:
    """Certificate that g escapes every signed sum over indices >= m.

    From index m on, each even term is a lead-generator multiple in a block
    beyond g's support, and each odd term carries a run of at least
    ``run_floor`` fresh lead generators starting beyond g's support (runs of
    distinct odd terms are disjoint, and side contributions land below every
    run).  A sum of at most k+1 signed terms therefore either stays entirely
    outside g's support blocks or keeps at least one uncancelled lead
    coordinate there, and in the growing case every such coordinate has order
    above k+1, so it cannot vanish.
    """

    m: int
    k: int
    g_max_block: int
    even_from: int
    odd_from: int
    run_floor: int
    hyp: str
    order_floor_block: Optional[int] = None

    def describe(self) -> str:
        parts = [
            f"support escape at m={self.m}",
            f"even terms from position {self.even_from} live beyond block {self.g_max_block}",
            f"odd terms from position {self.odd_from} carry runs of >= {self.run_floor} "
            f"fresh lead generators beyond block {self.g_max_block}, exceeding the "
            f"{self.k}+1 coefficient budget",
        ]
        if self.order_floor_block is not None:
            parts.append(
                f"lead orders from block {self.order_floor_block} exceed k+1={self.k + 1}"
            )
        return "; ".join(parts)


@dataclass(frozen=True)
class TriangularSeq(TSeq):
    """The triangular sequence as a lazily indexed TSeq."""

    params: TriangularParams

    @property
    def group(self) -> BlockGroup:
        return self.params.group

    def term(self, n: int) -> Element:
        return self.params.term(n)

    def exclusion_certificate(self, g: Element, k: int) -> Optional[SupportEscapeCert]:
        if g.is_zero():
            return None
        p = self.params
        B = g.max_block()
        t_min = p.even_escape(B)
        n_min = k + 1
        while tri_s(n_min - 1) + 1 <= B:
            n_min += 1
        floor_block = None
        if p.hyp == "growing":
            floor_block = p.order_floor_index(k)
            while tri_s(n_min - 1) + 1 < floor_block:
                n_min += 1
        m = max(2 * t_min, 2 * n_min)
        return SupportEscapeCert(
            m=m,
            k=k,
            g_max_block=B,
            even_from=t_min,
            odd_from=n_min,
            run_floor=n_min,
            hyp=p.hyp,
            order_floor_block=floor_block,
        )


def triangular_seq(G: BlockGroup, device: Optional[bool] = None) -> TriangularSeq:
    return TriangularSeq(TriangularParams.from_group(G, device))


# -- integer sequences given by closed rules --------------------------------------


@dataclass(frozen=True)
class GeomRule:
    """u_n = ratio ** n."""

    ratio: int

    def __post_init__(self):
        if self.ratio < 0:
            raise InvalidParamsError("geometric ratio must be nonnegative")

    def value(self, n: int) -> int:
        return self.ratio ** n


@dataclass(frozen=True)
class AffineRule:
    """u_0 = start, u_{n+1} = a * u_n + b."""

    a: int
    b: int
    start: int = 1

    def value(self, n: int) -> int:
        u = self.start
        for _ in range(n):
            u = self.a * u + self.b
        return u


@dataclass(frozen=True)
class FactorialRule:
    """u_n = n!."""

    def value(self, n: int) -> int:
        return math.factorial(n)


@dataclass(frozen=True)
class ListRule:
    """Explicit values; with ``cycle_from`` set, the slice from that position
    repeats forever (making the sequence total), otherwise it is a bare prefix."""

    values: tuple[int, ...]
    cycle_from: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.cycle_from is not None and not 0 <= self.cycle_from < len(self.values):
            raise InvalidParamsError("cycle_from must point inside the value list")

    def value(self, n: int) -> int:
        if n < len(self.values):
            return self.values[n]
        if self.cycle_from is None:
            raise OutOfRangeError(f"list rule defines only {len(self.values)} values")
        period = len(self.values) - self.cycle_from
        return self.values[self.cycle_from + (n - self.cycle_from) % period]


ResidueSeqRule = Union[GeomRule, AffineRule, FactorialRule, ListRule]


def _residue_orbit(rule: ResidueSeqRule, numer: int, denom: int):
    """Residues u_n * numer mod denom as (preperiod, period, residue list).

    Each rule is a finite-state machine modulo denom, so the orbit is
    eventually periodic and detected exactly by state repetition.
    """
    if isinstance(rule, ListRule):
        if rule.cycle_from is None:
            raise NoCycleDetectedError(
                "explicit value list declares no repeating tail; cannot certify the orbit"
            )
        res = [v * numer % denom for v in rule.values]
        pre, per = rule.cycle_from, len(rule.values) - rule.cycle_from
        # shrink to the minimal residue-level description
        for d in range(1, per + 1):
            if per % d == 0 and all(
                res[pre + i] == res[pre + i % d] for i in range(per)
            ):
                per = d
                break
        while pre > 0 and res[pre - 1] == res[pre - 1 + per]:
            pre -= 1
        return pre, per, res[: pre + per]

    if isinstance(rule, GeomRule):
        state = numer % denom  # u_0 = 1
        step = lambda s, n: (s * rule.ratio) % denom
        keyed = lambda s, n: s
    elif isinstance(rule, AffineRule):
        state = rule.start * numer % denom
        step = lambda s, n: (rule.a * s + rule.b * numer) % denom
        keyed = lambda s, n: s
    else:  # FactorialRule
        state = numer % denom  # 0! = 1
        step = lambda s, n: (s * ((n + 1) % denom)) % denom
        keyed = lambda s, n: (s, n % denom)

    seen: dict = {}
    residues = []
    n = 0
    while True:
        key = keyed(state, n)
        if key in seen:
            pre = seen[key]
            return pre, n - pre, residues[:n]
        seen[key] = n
        residues.append(state)
        state = step(state, n)
        n += 1


@dataclass(frozen=True)
class CircleResult:
    member: bool
    preperiod: int
    period: int
    residues: tuple[int, ...]  # orbit prefix covering preperiod + one period
    modulus: int

    @property
    def kind(self) -> str:
        return "IN" if self.member else "NOT_IN"

    def cycle(self) -> tuple[int, ...]:
        return self.residues[self.preperiod :]


def circle_membership(rule: ResidueSeqRule, x: Fraction) -> CircleResult:
    """Decide whether u_n * x -> 0 mod 1 for a rational x.

    The residues u_n * a mod b lie in a finite cyclic group, so convergence
    is equivalent to the detected cycle being identically zero."""
    x = Fraction(x) % 1
    a, b = x.numerator, x.denominator
    pre, per, residues = _residue_orbit(rule, a, b)
    cycle = residues[pre:]
    return CircleResult(
        member=all(r == 0 for r in cycle),
        preperiod=pre,
        period=per,
        residues=tuple(residues),
        modulus=b,
    )


# -- rule-driven integer sequences as TSeq -----------------------------------------


@dataclass(frozen=True)
class OrderGrowthCert:
    """Certificate on the integers: terms from index m form a divisibility
    chain whose least magnitude exceeds |g|, so any nonzero signed sum of
    them is too large, and sums that vanish are handled by the prefix."""

    m: int
    floor: int
    target: int

    def describe(self) -> str:
        return (
            f"order growth at m={self.m}: terms from index {self.m} divide each other "
            f"successively with magnitudes >= {self.floor} > |target| = {abs(self.target)}, "
            "so every nonzero signed sum over such indices has magnitude >= that floor"
        )


@dataclass(frozen=True)
class RuleSeq(TSeq):
    """Integer sequence ``u_n * e_0`` on the infinite cyclic group."""

    rule: ResidueSeqRule
    group: BlockGroup = field(default_factory=integers)

    def term(self, n: int) -> Element:
        return self.group.e(0, self.rule.value(n))

    def last_index(self) -> Optional[int]:
        if isinstance(self.rule, ListRule) and self.rule.cycle_from is None:
            return len(self.rule.values) - 1
        return None

    def tail_cycle(self):
        rule = self.rule
        if isinstance(rule, ListRule):
            if rule.cycle_from is None:
                return None
            cyc = rule.values[rule.cycle_from :]
            return rule.cycle_from, tuple(self.group.e(0, v) for v in cyc)
        if isinstance(rule, (GeomRule, AffineRule)):
            # the next value is a function of the current one: a value repeat
            # is a genuine cycle
            seen: dict[int, int] = {}
            for n in range(512):
                v = rule.value(n)
                if v in seen:
                    lo = seen[v]
                    cyc = tuple(self.group.e(0, rule.value(i)) for i in range(lo, n))
                    return lo, cyc
                seen[v] = n
                if abs(v) > 2 ** 64:
                    return None
            return None
        return None

    def _chain_start(self) -> Optional[int]:
        rule = self.rule
        if isinstance(rule, GeomRule) and rule.ratio >= 2:
            return 0
        if isinstance(rule, FactorialRule):
            return 0
        if isinstance(rule, AffineRule) and rule.b == 0 and abs(rule.a) >= 2 and rule.start != 0:
            return 0
        return None

    def exclusion_certificate(self, g: Element, k: int) -> Optional[OrderGrowthCert]:
        start = self._chain_start()
        if start is None:
            return None
        t = g.term(0)
        target = int(t.lam) if t is not None else 0
        if any(j != 0 for j in g.support()):
            # sums are multiples of the free generator; g is not
            return OrderGrowthCert(m=start, floor=abs(self.rule.value(start)), target=0)
        m = start
        while abs(self.rule.value(m)) <= abs(target):
            m += 1
        return OrderGrowthCert(m=m, floor=abs(self.rule.value(m)), target=target)


# -- interleaving demo on the circle ------------------------------------------------


def _convergents(alpha: Fraction):
    p, q = alpha.numerator, alpha.denominator
    out = []
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while q:
        a, r = divmod(p, q)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append((h1, k1))
        p, q = q, r
    return out


@dataclass(frozen=True)
class InterleaveDemoReport:
    flags: tuple[str, ...]
    alpha: Fraction
    target: Fraction
    distances: tuple[Fraction, ...]
    note: str


def tb_interleave_demo(
    a_rule: ResidueSeqRule,
    b_target: Fraction,
    eps: Fraction,
    alpha: Optional[Fraction] = None,
    terms: int = 12,
) -> tuple[TSeq, InterleaveDemoReport]:
    """Interleave a null sequence with integers b_n whose circle images
    n -> b_n * alpha approach ``b_target`` within eps / 2**n.

    The embedding generator alpha is a rational stand-in for an irrational,
    so density of the target's multiples (and hence any conclusion about a
    trivial dual) is NOT certified: the report always carries APPROX_ONLY.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidParamsError("eps must be positive")
    target = Fraction(b_target) % 1
    if target == 0:
        raise DegenerateTargetError("target 0 generates nothing dense")
    if alpha is None:
        need = Fraction(2 ** (terms + 2), 1) / eps
        f0, f1 = 1, 1
        while f1 <= need:
            f0, f1 = f1, f0 + f1
        alpha = Fraction(f0, f1)
    alpha = Fraction(alpha) % 1
    convs = _convergents(alpha)

    def circle_dist(x: Fraction) -> Fraction:
        d = x % 1
        return min(d, 1 - d)

    b_vals: list[int] = []
    dists: list[Fraction] = []
    for n in range(terms):
        tol = eps / 2 ** n
        chosen = None
        for p, q in convs:
            if Fraction(1, 2 * q) >= tol:
                continue
            r = (target * q + Fraction(1, 2)).__floor__()
            b = (pow(p % q, -1, q) * r) % q if q > 1 else 0
            d = circle_dist(b * alpha - target)
            if d < tol:
                chosen = (b, d)
                break
        if chosen is None:
            raise InvalidParamsError(
                f"alpha's approximation quality cannot reach tolerance {tol}; "
                "supply a finer alpha"
            )
        b_vals.append(chosen[0])
        dists.append(chosen[1])

    Z = integers()
    a_seq = RuleSeq(a_rule, Z)
    b_seq = ExplicitSeq(Z, tuple(Z.e(0, v) for v in b_vals))
    seq = interleave([a_seq, b_seq])
    report = InterleaveDemoReport(
        flags=("APPROX_ONLY",),
        alpha=alpha,
        target=target,
        distances=tuple(dists),
        note=(
            "the generator alpha is rational, so <target> is not certified dense; "
            "no conclusion about the dual of the resulting topology is claimed"
        ),
    )
    return seq, report
