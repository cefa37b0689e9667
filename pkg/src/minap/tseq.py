"""Bounded verification machinery for null-sequence candidates.

``A(k, m)`` denotes the set of signed sums ``n_1 d_{r_1} + ... + n_s d_{r_s}``
with ``m <= r_1 < ... < r_s``, nonzero integer coefficients of total absolute
value at most ``k + 1``, together with 0.  A sequence admits a Hausdorff group
topology converging to zero iff every nonzero g escapes some A(k, m) for every
k; this module decides bounded instances of that criterion and certifies, where
the recipe structure allows it, that terms beyond the computed range cannot
contribute.  A verdict of EXCLUDED is only ever issued with such a certificate;
otherwise the outcome is MEMBER_UP_TO or an honest INCONCLUSIVE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    BudgetExceededError,
    InvalidParamsError,
    OutOfRangeError,
    ZeroElementError,
)
from .groups import BlockGroup, Element, ZERO

DEFAULT_SUM_BUDGET = 10_000_000


class TSeq:
    """A lazily indexed sequence of group elements produced by a recipe."""

    group: BlockGroup

    def term(self, n: int) -> Element:
        raise NotImplementedError

    def last_index(self) -> Optional[int]:
        """Largest defined index, or None when the sequence is total."""
        return None

    def tail_cycle(self) -> Optional[tuple[int, tuple[Element, ...]]]:
        """(start, cycle) when the sequence is exactly periodic from start."""
        return None

    def exclusion_certificate(self, g: Element, k: int):
        """Recipe-specific proof that g escapes A(k, m) for every index >= m.

        Returns an object with fields ``m`` and ``describe()`` or None."""
        return None

    def terms(self, lo: int, hi: int) -> list[Element]:
        return [self.term(n) for n in range(lo, hi + 1)]


@dataclass(frozen=True)
class ExplicitSeq(TSeq):
    """Explicit prefix, optionally continued by repeating ``cycle`` forever."""

    group: BlockGroup
    prefix: tuple[Element, ...]
    cycle: Optional[tuple[Element, ...]] = None

    def term(self, n: int) -> Element:
        if n < 0:
            raise OutOfRangeError(f"negative index {n}")
        if n < len(self.prefix):
            return self.prefix[n]
        if self.cycle:
            return self.cycle[(n - len(self.prefix)) % len(self.cycle)]
        raise OutOfRangeError(f"index {n} beyond the {len(self.prefix)}-term prefix")

    def last_index(self) -> Optional[int]:
        return None if self.cycle else len(self.prefix) - 1

    def tail_cycle(self):
        if self.cycle:
            return len(self.prefix), self.cycle
        return None


@dataclass(frozen=True)
class InterleaveSeq(TSeq):
    """Round-robin interleaving: term(n*q + j) is term n of the j-th sequence."""

    seqs: tuple[TSeq, ...]

    @property
    def group(self) -> BlockGroup:
        return self.seqs[0].group

    @property
    def q(self) -> int:
        return len(self.seqs)

    def term(self, n: int) -> Element:
        if n < 0:
            raise OutOfRangeError(f"negative index {n}")
        return self.seqs[n % self.q].term(n // self.q)

    def last_index(self) -> Optional[int]:
        lasts = [s.last_index() for s in self.seqs]
        if all(v is None for v in lasts):
            return None
        bound = min(v for v in lasts if v is not None)
        return bound * self.q + self.q - 1

    def tail_cycle(self):
        cycles = [s.tail_cycle() for s in self.seqs]
        if any(c is None for c in cycles):
            return None
        start = max(c[0] for c in cycles)
        period = math.lcm(*(len(c[1]) for c in cycles))
        lo = start * self.q
        cyc = tuple(self.term(lo + r) for r in range(period * self.q))
        return lo, cyc


def interleave(seqs: Sequence[TSeq]) -> TSeq:
    """Interleave q >= 1 sequences with the indexing law term(nq+j) = a^j_n."""
    seqs = tuple(seqs)
    if not seqs:
        raise ValueError("interleave needs at least one sequence")
    if len(seqs) == 1:
        return seqs[0]
    return InterleaveSeq(seqs)


# -- verdicts -------------------------------------------------------------------


@dataclass(frozen=True)
class CycleExactCert:
    """The tail repeats a finite cycle, so every A(k, m) is computed exactly."""

    cycle_start: int
    cycle_len: int

    def describe(self) -> str:
        return (
            f"exact analysis: from index {self.cycle_start} the sequence repeats a "
            f"{self.cycle_len}-term cycle, so signed sums over all larger indices "
            f"form a finite, fully enumerated set"
        )


@dataclass(frozen=True)
class Verdict:
    kind: str  # 'excluded' | 'member_up_to' | 'inconclusive'
    m: Optional[int] = None
    m_max: Optional[int] = None
    prefix: Optional[int] = None
    witnesses: tuple = ()
    certificate: object = None
    report: str = ""

    @property
    def excluded(self) -> bool:
        return self.kind == "excluded"

    def exit_code(self) -> int:
        return {"excluded": 0, "member_up_to": 2, "inconclusive": 3}[self.kind]


def _clamp_prefix(seq: TSeq, N: int) -> int:
    last = seq.last_index()
    return N if last is None else min(N, last)


def _signed_sum_states(
    terms: list[tuple[int, Element]],
    group: BlockGroup,
    budget: int,
    limit: int,
    want: Optional[Element] = None,
    cycle_values: Optional[list[Element]] = None,
):
    """DP over terms: map element -> (cost, parent) for all signed sums of
    total coefficient weight <= budget.  ``terms`` carry their indices for
    witness reconstruction; cycle values (usable at unboundedly many indices)
    are labelled with index -1-t."""
    states: dict[Element, tuple[int, Optional[tuple]]] = {ZERO: (0, None)}
    pool = list(terms)
    if cycle_values:
        pool += [(-1 - t, v) for t, v in enumerate(cycle_values)]
    for idx, d in pool:
        if d.is_zero():
            continue
        current = list(states.items())
        for base, (cost, _) in current:
            room = budget - cost
            acc = base
            for c in range(1, room + 1):
                acc = group.add(acc, d)
                new_cost = cost + c
                old = states.get(acc)
                if old is None or new_cost < old[0]:
                    states[acc] = (new_cost, (base, idx, c))
            acc = base
            for c in range(1, room + 1):
                acc = group.sub(acc, d)
                new_cost = cost + c
                old = states.get(acc)
                if old is None or new_cost < old[0]:
                    states[acc] = (new_cost, (base, idx, -c))
            if len(states) > limit:
                raise BudgetExceededError(
                    f"signed-sum enumeration exceeded {limit} distinct elements"
                )
        if want is not None and want in states:
            return states
    return states


def _extract_witness(states, g: Element):
    if g not in states:
        return None
    steps = []
    cur = g
    while True:
        cost, parent = states[cur]
        if parent is None:
            break
        base, idx, c = parent
        steps.append((idx, c))
        cur = base
    steps.reverse()
    return tuple(steps)


def enumerate_Akm(
    seq: TSeq, k: int, m: int, N: int, limit: int = DEFAULT_SUM_BUDGET
) -> set[Element]:
    """All sums of at most k+1 signed terms with indices in [m, N], plus 0.

    Deduplicated via canonical element forms; raises BudgetExceededError when
    the set would exceed ``limit`` elements."""
    if k < 0:
        raise InvalidParamsError("k must be >= 0")
    if m > N:
        return {ZERO}
    terms = [(r, seq.term(r)) for r in range(max(m, 0), N + 1)]
    states = _signed_sum_states(terms, seq.group, k + 1, limit)
    return set(states.keys())


def akm_membership(
    seq: TSeq, g: Element, k: int, m: int, N: int, limit: int = DEFAULT_SUM_BUDGET
):
    """Witness [(index, coeff), ...] for g in A(k, m) over the prefix, or None."""
    if m > N:
        return tuple() if g.is_zero() else None
    terms = [(r, seq.term(r)) for r in range(max(m, 0), N + 1)]
    states = _signed_sum_states(terms, seq.group, k + 1, limit, want=g)
    return _extract_witness(states, g)


def _cycle_membership(seq: TSeq, g: Element, k: int, m: int, limit: int, tc=None):
    """Exact membership of g in the full A(k, m) of an eventually periodic
    sequence: finitely many pre-cycle terms plus cycle values usable with any
    coefficient (each value recurs at infinitely many indices)."""
    start, cycle = tc if tc is not None else seq.tail_cycle()
    pre = [(r, seq.term(r)) for r in range(m, max(start, m))]
    values = []
    seen = set()
    for v in cycle:
        if not v.is_zero() and v not in seen:
            seen.add(v)
            values.append(v)
    states = _signed_sum_states(pre, seq.group, k + 1, limit, want=g, cycle_values=values)
    return g in states


def check_criterion(
    seq: TSeq,
    g: Element,
    k: int,
    m_max: int,
    N: int,
    limit: int = DEFAULT_SUM_BUDGET,
) -> Verdict:
    """Search m = 0..m_max for a certified escape of g from A(k, m).

    EXCLUDED is returned only when a structural certificate shows that no sum
    over indices >= m (bounded or not) can produce g; MEMBER_UP_TO reports a
    witness decomposition within the prefix; INCONCLUSIVE reports exactly which
    budget or certificate was missing."""
    if g.is_zero():
        raise ZeroElementError("the criterion quantifies over nonzero elements")
    if k < 0:
        raise InvalidParamsError("k must be >= 0")

    cert = seq.exclusion_certificate(g, k)
    if cert is not None and cert.m <= m_max:
        return Verdict(kind="excluded", m=cert.m, prefix=N, certificate=cert)

    n_eff = _clamp_prefix(seq, N)

    tc = seq.tail_cycle()
    if tc is not None:
        start, cycle = tc
        for m in range(0, m_max + 1):
            try:
                if not _cycle_membership(seq, g, k, m, limit, tc):
                    return Verdict(
                        kind="excluded",
                        m=m,
                        prefix=N,
                        certificate=CycleExactCert(max(start, m), len(cycle)),
                    )
            except BudgetExceededError as e:
                return Verdict(kind="inconclusive", m=m, prefix=N, report=str(e))
        wit = akm_membership(seq, g, k, m_max, n_eff, limit)
        if wit is not None:
            return Verdict(kind="member_up_to", m_max=m_max, prefix=N, witnesses=(wit,))
        return Verdict(
            kind="inconclusive",
            m_max=m_max,
            prefix=N,
            report=(
                "cycle analysis shows membership at every m <= m_max, but no witness "
                f"decomposition exists within prefix N={N}"
            ),
        )

    # bounded-only fallback: no structural knowledge about the tail
    try:
        wit = akm_membership(seq, g, k, m_max, n_eff, limit)
    except BudgetExceededError as e:
        return Verdict(kind="inconclusive", prefix=N, report=str(e))
    if wit is not None:
        return Verdict(kind="member_up_to", m_max=m_max, prefix=N, witnesses=(wit,))
    # locate the smallest m whose prefix already excludes g (anti-monotone in m)
    lo, hi = 0, m_max
    while lo < hi:
        mid = (lo + hi) // 2
        try:
            member = akm_membership(seq, g, k, mid, n_eff, limit) is not None
        except BudgetExceededError as e:
            return Verdict(kind="inconclusive", prefix=N, report=str(e))
        if member:
            lo = mid + 1
        else:
            hi = mid
    return Verdict(
        kind="inconclusive",
        m=lo,
        prefix=N,
        report=(
            f"the prefix N={N} excludes g from A({k},{lo}), but the recipe offers no "
            "certificate that terms beyond the prefix cannot contribute"
        ),
    )
