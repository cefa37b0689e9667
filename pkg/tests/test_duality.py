import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minap import duality
from minap.duality import (
    annihilator_basis,
    annihilator_in_G,
    block_dual,
    char_add,
    char_neg,
    character,
    character_order,
    fmod1,
    pair,
)
from minap.errors import InvalidSpecError
from minap.groups import Block, ConstTail, Prufer, integers, make_group

from conftest import all_elements, span_brute


class TestPair:
    def test_trivial_character(self, g42):
        chi = character(g42, {})
        x = g42.add(g42.e(2, 3), g42.h(0, 1))
        assert pair(g42, chi, x) == 0

    def test_cyclic(self):
        G = make_group([Block(4)], None, 0)
        chi = character(G, {0: (Fraction(1, 4), ())})
        assert pair(G, chi, G.e(0, 2)) == Fraction(1, 2)

    def test_wraparound(self):
        G = make_group([Block(2), Block(2)], None, 0)
        chi = character(G, {0: (Fraction(1, 2), ()), 1: (Fraction(1, 2), ())})
        assert pair(G, chi, G.add(G.e(0), G.e(1))) == 0

    def test_integer_block(self):
        Z = integers()
        chi = character(Z, {0: (Fraction(1, 3), ())})
        assert pair(Z, chi, Z.e(0, 5)) == fmod1(Fraction(5, 3))

    def test_prufer_multiplier(self):
        P = make_group([Block(Prufer(2))], None, 0)
        chi = character(P, {0: (3, ())})
        assert pair(P, chi, P.e(0, Fraction(1, 4))) == Fraction(3, 4)

    def test_denominator_validation(self, g42):
        with pytest.raises(InvalidSpecError):
            character(g42, {0: (Fraction(1, 3), ())})
        with pytest.raises(InvalidSpecError):
            character(g42, {0: (Fraction(0), (Fraction(1, 4),))})


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_bilinearity(data):
    G = make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))
    duals = block_dual(G, 0) + block_dual(G, 1)
    chi = data.draw(st.sampled_from(duals))
    psi = data.draw(st.sampled_from(duals))
    xs = all_elements(G, [0, 1])
    x = data.draw(st.sampled_from(xs))
    y = data.draw(st.sampled_from(xs))
    assert pair(G, chi, G.add(x, y)) == fmod1(pair(G, chi, x) + pair(G, chi, y))
    assert pair(G, char_add(G, chi, psi), x) == fmod1(pair(G, chi, x) + pair(G, psi, x))
    assert pair(G, char_neg(G, chi), x) == fmod1(-pair(G, chi, x))


class TestAnnihilators:
    def test_side_part_annihilator(self, g42):
        ann = annihilator_basis(g42, {0: [g42.h(0, 1)]})[0]
        # exhaust the 8-element block dual: exactly the side-vanishing half
        expected = {
            chi for chi in block_dual(g42, 0) if pair(g42, chi, g42.h(0, 1)) == 0
        }
        got = _char_span(g42, ann)
        assert got == expected
        assert len(expected) == 4

    def test_trivial_subgroup_gives_full_dual(self, g42):
        ann = annihilator_basis(g42, {0: []})[0]
        assert _char_span(g42, ann) == set(block_dual(g42, 0))

    def test_whole_block_gives_trivial(self, g42):
        ann = annihilator_basis(g42, {0: [g42.e(0), g42.h(0, 1)]})[0]
        assert ann == []

    def test_kernel_recovers_side_part(self, g42):
        ann = annihilator_basis(g42, {0: [g42.h(0, 1)]})
        back = annihilator_in_G(g42, {0: ann[0]})[0]
        assert span_brute(g42, back) == {g42.zero(), g42.h(0, 1)}

    def test_full_dual_kernel_trivial(self, g42):
        back = annihilator_in_G(g42, {0: block_dual(g42, 0)})[0]
        assert back == []

    def test_empty_family_gives_whole_block(self, g42):
        back = annihilator_in_G(g42, {0: []})[0]
        assert len(span_brute(g42, back)) == 8


def _char_span(G, gens):
    zero = character(G, {})
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for base in frontier:
            for g in gens:
                c = char_add(G, base, g)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


def test_double_annihilator_on_random_blocks():
    rng = random.Random(17)
    for _ in range(25):
        e = rng.choice([2, 3, 4, 5, 8, 9])
        hs = tuple(rng.choice([2, 3, 4]) for _ in range(rng.randint(0, 2)))
        if e * math.prod(hs) > 1000:
            continue
        G = make_group([Block(e, hs)], None, 1 if hs else 0)
        elems = all_elements(G, [0])
        sub = rng.sample(elems, rng.randint(1, 3))
        sub = [x for x in sub if not x.is_zero()]
        ann = annihilator_basis(G, {0: sub})[0]
        back = annihilator_in_G(G, {0: ann})[0]
        assert span_brute(G, back) == span_brute(G, sub) | {G.zero()}


def test_character_order_divides_block_exponent(g42):
    for chi in block_dual(g42, 0):
        o = character_order(g42, chi)
        assert 4 % o == 0
