"""Membership in the convergence dual of the triangular sequence, and the
resulting radical computation.

For a finite-support character chi and the triangular sequence d on
``G = (+)_j (<e_j> + H_j)``, the pairing values (d_n, chi) all lie in a fixed
finite subgroup of Q/Z (denominators are bounded by the exponent of chi's
support blocks), so "(d_n, chi) converges to 0" means "eventually equal to 0"
and the decision is exact.  Even terms eventually escape chi's support; odd
terms eventually pair to (b_k, chi) for the basis index k they carry, and
every realized k recurs with escaped lead support.  Hence chi converges iff
it annihilates every side basis element realized in its support blocks.

The kernel of all such characters, per block, recovers the prescribed side
subgroup; the computation is cross-checked against independently computed
annihilators and, on small finite quotients, against brute-force character
enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from . import duality, zlattice
from .constructions import TriangularParams, verify_recurrence
from .duality import Character, character, pair
from .errors import InvalidSpecError, NotEventuallyPeriodicError
from .groups import BlockGroup, Element, _Infinite


@dataclass(frozen=True)
class SdVerdict:
    """Decision on one character with a complete certificate.

    kind 'in'/'not_in' certificates carry the support-escape index, the
    recurrence witnesses per realized basis index, and an empirical pairing
    trace over the requested window; 'unknown' names the basis index whose
    recurrence could not be witnessed within the window."""

    kind: str  # 'in' | 'not_in' | 'unknown'
    certificate: dict

    @property
    def member(self) -> bool:
        return self.kind == "in"


def _realized_basis(params: TriangularParams, max_block: int) -> list[int]:
    """Indices of side basis elements living in blocks 0..max_block."""
    return list(range(params.b_count_through_block(max_block)))


def sd_member(params: TriangularParams, chi: Character, N: int) -> SdVerdict:
    """Decide whether the pairings (d_n, chi) are eventually zero."""
    G = params.group
    if chi.is_zero():
        return SdVerdict("in", {"note": "trivial character", "escape": 0})
    B = chi.max_block()
    escape_even = 2 * params.even_escape(B)
    n_run = 1
    while params.odd_run(n_run)[0] <= B:
        n_run += 1
    escape_odd = 2 * n_run + 1

    ks = _realized_basis(params, B)
    pair_values = {k: pair(G, chi, params.b_element(k)) for k in ks}
    witnesses = {k: verify_recurrence(params, k, N, beyond_block=B) for k in ks}

    missing = [k for k in ks if not witnesses[k]]
    if missing:
        return SdVerdict(
            "unknown",
            {
                "reason": "no recurrence witness within window",
                "basis_indices": missing,
                "window": N,
            },
        )

    offenders = {k: v for k, v in pair_values.items() if v != 0}
    escape = max(escape_even, escape_odd)

    # empirical cross-check of the eventual pairing pattern over the window
    trace = [(n, pair(G, chi, params.term(n))) for n in range(N + 1)]
    tail_nonzero = [n for n, v in trace if n >= escape and v != 0]

    if offenders:
        k = min(offenders)
        wit = [t for t in witnesses[k] if 2 * t + 1 >= escape] or witnesses[k]
        assert any(
            pair(G, chi, params.term(2 * t + 1)) == offenders[k] for t in wit
        ), "recurrence witness does not exhibit the nonzero pairing"
        return SdVerdict(
            "not_in",
            {
                "basis_index": k,
                "pairing": offenders[k],
                "recurring_odd_positions": tuple(wit[:16]),
                "escape": escape,
                "window": N,
            },
        )

    assert not tail_nonzero, (
        "pairings fail to vanish past the escape index; the decision rule is broken: "
        f"{tail_nonzero[:5]}"
    )
    return SdVerdict(
        "in",
        {
            "escape": escape,
            "recurrence_witnesses": {k: tuple(w[:8]) for k, w in witnesses.items()},
            "window": N,
            "empirical_last_nonzero": max((n for n, v in trace if v != 0), default=-1),
        },
    )


@dataclass(frozen=True)
class RadicalResult:
    tag: str  # 'EQUALS_H' | 'MINAP' | 'OTHER'
    blocks: tuple[tuple[int, tuple[Element, ...]], ...]  # per-block generators
    detail: str
    certificates: dict

    def block_gens(self, j: int) -> tuple[Element, ...]:
        for jj, gens in self.blocks:
            if jj == j:
                return gens
        raise KeyError(j)


def radical_of(params: TriangularParams, B: int, N: int) -> RadicalResult:
    """Radical of the sequence topology, truncated to blocks 0..B.

    Per block, enumerate the block dual, decide convergence for each
    character, and take the joint kernel of the convergent ones.  The
    convergent set is cross-checked against the annihilator of the block's
    side subgroup computed by the duality module."""
    G = params.group
    per_block: list[tuple[int, tuple[Element, ...]]] = []
    certs: dict = {}
    unknowns: list[str] = []

    for j in range(B + 1):
        blk = G.block(j)
        dual = duality.block_dual(G, j)
        in_set: list[Character] = []
        for chi in dual:
            verdict = sd_member(params, chi, N)
            if verdict.kind == "unknown":
                unknowns.append(
                    f"block {j}: {verdict.certificate['reason']} for basis indices "
                    f"{verdict.certificate['basis_indices']}"
                )
                continue
            if verdict.member:
                in_set.append(chi)

        # independent route: the convergent characters must be exactly the
        # annihilator of the block's side subgroup
        if params.device:
            side_gens = [G.e(j)]
        else:
            stop = params.stop
            in_range = isinstance(stop, _Infinite) or j < stop
            side_gens = [G.h(j, i) for i in range(1, blk.a + 1)] if in_range else []
        ann = duality.annihilator_basis(G, {j: side_gens})[j]
        ann_span = _char_span(G, j, ann)
        if not unknowns:
            assert set(in_set) == ann_span, f"convergent set mismatch on block {j}"

        kernel = duality.annihilator_in_G(G, {j: in_set})[j]
        per_block.append((j, tuple(kernel)))
        certs[j] = {
            "dual_size": len(dual),
            "convergent": len(in_set),
            "side_gens": tuple(side_gens),
        }

    if unknowns:
        return RadicalResult("OTHER", tuple(per_block), "; ".join(unknowns), certs)

    # classify: whole block per block -> the topology has no nonzero characters
    tag = "EQUALS_H"
    detail = "per-block kernel equals the side subgroup"
    all_whole = True
    for j, gens in per_block:
        blk = G.block(j)
        size = _span_size(G, j, gens)
        if size != blk.e_order * math.prod(blk.h_orders):
            all_whole = False
        expected = _side_subgroup_size(params, j)
        if size != expected:
            tag = "OTHER"
            detail = f"block {j}: kernel size {size} differs from side subgroup size {expected}"
    if tag == "EQUALS_H" and all_whole and params.device:
        tag = "MINAP"
        detail = "the kernel is the whole group at every truncation block"
    return RadicalResult(tag, tuple(per_block), detail, certs)


def _side_subgroup_size(params: TriangularParams, j: int) -> int:
    G = params.group
    if params.device:
        return G.block(j).e_order
    stop = params.stop
    if not isinstance(stop, _Infinite) and j >= stop:
        return 1
    return math.prod(G.block(j).h_orders)


def _span_size(G: BlockGroup, j: int, gens: Sequence[Element]) -> int:
    if not gens:
        return 1
    frame = zlattice.SupportFrame(G, [j])
    return len(zlattice.span_elements([frame.flatten(g) for g in gens], frame.orders))


def _char_span(G: BlockGroup, j: int, gens: Sequence[Character]) -> set[Character]:
    """Closure of block-local characters under addition."""
    zero = character(G, {})
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for base in frontier:
            for g in gens:
                cand = duality.char_add(G, base, g)
                if cand not in seen:
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return seen


# -- independent brute-force oracle --------------------------------------------


def _detect_cycle(seq: Sequence[Element]) -> tuple[int, int]:
    """Minimal (preperiod, period) with two full periods inside the prefix."""
    n = len(seq)
    for period in range(1, n // 2 + 1):
        for pre in range(0, n - 2 * period + 1):
            if all(seq[i] == seq[i + period] for i in range(pre, n - period)):
                return pre, period
    raise NotEventuallyPeriodicError(
        "no repeating tail covering two full periods inside the prefix"
    )


def oracle_radical(G: BlockGroup, d_prefix: Sequence[Element], horizon: int = 0):
    """Brute-force radical of an eventually periodic sequence on a small
    finite group: enumerate every character, keep those whose pairings vanish
    along the detected cycle, return the joint kernel as an element set."""
    if not G.is_finite():
        raise InvalidSpecError("the oracle needs an explicit finite group")
    size = 1
    for blk in G.head:
        if not isinstance(blk.e_order, int):
            raise InvalidSpecError("the oracle needs a finite group")
        size *= blk.e_order * math.prod(blk.h_orders)
    if size > 10 ** 4:
        raise InvalidSpecError(f"group of size {size} exceeds the oracle bound 10^4")

    pre, period = _detect_cycle(list(d_prefix))
    chars = _all_characters(G)
    s_d = [
        chi
        for chi in chars
        if all(pair(G, chi, d) == 0 for d in d_prefix[pre : pre + period])
    ]
    elements = _all_elements(G)
    kernel = {
        x for x in elements if all(pair(G, chi, x) == 0 for chi in s_d)
    }
    return kernel, s_d, (pre, period)


def _all_elements(G: BlockGroup) -> list[Element]:
    ranges = []
    for j, blk in enumerate(G.head):
        ranges.append([(j, lam, h) for lam in range(blk.e_order)
                       for h in itertools.product(*[range(m) for m in blk.h_orders])])
    out = []
    for combo in itertools.product(*ranges):
        out.append(G.element({j: (lam, h) for j, lam, h in combo}))
    return out


def _all_characters(G: BlockGroup) -> list[Character]:
    per_block = [duality.block_dual(G, j) for j in range(len(G.head))]
    out = []
    for combo in itertools.product(*per_block):
        coords = {}
        for chi in combo:
            for j, t in chi.items:
                coords[j] = (t.eps, t.etas)
        out.append(character(G, coords))
    return out
