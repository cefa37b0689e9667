import itertools

import pytest

from minap.groups import Block, BlockGroup, ConstTail, Element, make_group


@pytest.fixture
def g42() -> BlockGroup:
    """The workhorse presentation: blocks Z(4) + Z(2) forever."""
    return make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))


def span_brute(G: BlockGroup, gens: list[Element], cap: int = 100_000) -> set[Element]:
    """Closure of a finite-order generating set by repeated addition."""
    seen = {G.zero()}
    frontier = [G.zero()]
    while frontier:
        nxt = []
        for base in frontier:
            for g in gens:
                cand = G.add(base, g)
                if cand not in seen:
                    assert len(seen) < cap
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return seen


def all_elements(G: BlockGroup, blocks: list[int]) -> list[Element]:
    """Every element supported on the given (finite-order) blocks."""
    per_block = []
    for j in blocks:
        blk = G.block(j)
        opts = [
            (j, lam, hs)
            for lam in range(blk.e_order)
            for hs in itertools.product(*[range(m) for m in blk.h_orders])
        ]
        per_block.append(opts)
    out = []
    for combo in itertools.product(*per_block):
        out.append(G.element({j: (lam, hs) for j, lam, hs in combo}))
    return out
