import itertools
import random

import pytest

from minap.constructions import GeomRule, RuleSeq
from minap.errors import (
    BudgetExceededError,
    InvalidParamsError,
    OutOfRangeError,
    ZeroElementError,
)
from minap.groups import Block, ConstTail, integers, make_group
from minap.tseq import (
    ExplicitSeq,
    Verdict,
    check_criterion,
    enumerate_Akm,
    interleave,
)


def _unit_seq(n_blocks=8):
    G = make_group([], ConstTail(Block(2)), 0)
    return G, ExplicitSeq(G, tuple(G.e(i) for i in range(n_blocks)), (G.zero(),))


def _brute_akm(seq, k, m, N):
    """Oracle: enumerate all coefficient assignments directly."""
    G = seq.group
    out = {G.zero()}
    idx = list(range(m, N + 1))
    for s in range(1, k + 2):
        for combo in itertools.combinations(idx, s):
            for coeffs in itertools.product(range(-(k + 1), k + 2), repeat=s):
                if any(c == 0 for c in coeffs):
                    continue
                if sum(abs(c) for c in coeffs) > k + 1:
                    continue
                acc = G.zero()
                for r, c in zip(combo, coeffs):
                    acc = G.add(acc, G.smul(c, seq.term(r)))
                out.add(acc)
    return out


class TestEnumerate:
    def test_k0_single_terms(self):
        G, seq = _unit_seq()
        got = enumerate_Akm(seq, 0, 2, 5)
        assert got == {G.zero()} | {G.e(i) for i in range(2, 6)}

    def test_two_term_sums_mod2(self):
        G, seq = _unit_seq()
        got = enumerate_Akm(seq, 1, 0, 1)
        assert got == {G.zero(), G.e(0), G.e(1), G.add(G.e(0), G.e(1))}

    def test_empty_range(self):
        G, seq = _unit_seq()
        assert enumerate_Akm(seq, 0, 5, 3) == {G.zero()}

    def test_agrees_with_brute_force(self):
        G = make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))
        rng = random.Random(1)
        elems = [G.e(0), G.e(0, 2), G.h(0, 1), G.add(G.e(1), G.h(1, 1)), G.e(2, 3)]
        seq = ExplicitSeq(G, tuple(elems), (G.zero(),))
        for _ in range(20):
            k = rng.randint(0, 2)
            m = rng.randint(0, 3)
            N = rng.randint(m, 4)
            assert enumerate_Akm(seq, k, m, N) == _brute_akm(seq, k, m, N)

    def test_budget(self):
        G, seq = _unit_seq()
        with pytest.raises(BudgetExceededError):
            enumerate_Akm(seq, 3, 0, 7, limit=10)

    def test_negative_k(self):
        G, seq = _unit_seq()
        with pytest.raises(InvalidParamsError):
            enumerate_Akm(seq, -1, 0, 3)


class TestLatticeProperties:
    def test_random_instances(self):
        rng = random.Random(99)
        G = make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))
        pool = [G.e(0), G.e(0, 2), G.h(0, 1), G.e(1), G.add(G.e(1), G.h(0, 1))]
        for _ in range(60):
            terms = tuple(rng.choice(pool) for _ in range(6))
            seq = ExplicitSeq(G, terms, (rng.choice(pool),))
            k = rng.randint(0, 2)
            m = rng.randint(0, 3)
            N = rng.randint(m, 5)
            a = enumerate_Akm(seq, k, m, N)
            assert G.zero() in a
            assert all(G.neg(x) in a for x in a)  # symmetric
            assert enumerate_Akm(seq, k, m + 1, N) <= a if m + 1 <= N else True
            assert a <= enumerate_Akm(seq, k + 1, m, N)
            assert a <= enumerate_Akm(seq, k, m, N + 1)


class TestCheckCriterion:
    def test_zero_element_rejected(self):
        G, seq = _unit_seq()
        with pytest.raises(ZeroElementError):
            check_criterion(seq, G.zero(), 0, 4, 8)

    def test_powers_of_two(self):
        seq = RuleSeq(GeomRule(2))
        Z = seq.group
        v = check_criterion(seq, Z.e(0, 1), 0, 16, 64)
        assert v.kind == "excluded" and v.m == 1
        # parity oracle on the prefix: 1 is not among 0, +-2^r for r >= 1
        assert Z.e(0, 1) not in enumerate_Akm(seq, 0, 1, 40)

    def test_constant_zero_sequence(self):
        Z = integers()
        seq = ExplicitSeq(Z, (), (Z.zero(),))
        v = check_criterion(seq, Z.e(0, 7), 0, 8, 16)
        assert v.kind == "excluded" and v.m == 0

    def test_cycle_member_forever(self):
        G, _ = _unit_seq()
        seq = ExplicitSeq(G, (), (G.e(0),))
        v = check_criterion(seq, G.e(0), 1, 6, 32)
        assert v.kind == "member_up_to" and v.m_max == 6
        (wit,) = v.witnesses
        acc = G.zero()
        for r, c in wit:
            acc = G.add(acc, G.smul(c, seq.term(r)))
        assert acc == G.e(0)

    def test_cycle_exact_exclusion(self):
        # prefix carries e0 once; the tail cycles through e1 only
        G, _ = _unit_seq()
        seq = ExplicitSeq(G, (G.e(0),), (G.e(1),))
        v = check_criterion(seq, G.e(0), 2, 8, 32)
        assert v.kind == "excluded" and v.m == 1

    def test_no_tail_knowledge_is_inconclusive(self):
        G, _ = _unit_seq()
        seq = ExplicitSeq(G, tuple(G.e(i) for i in range(6)))
        v = check_criterion(seq, G.e(0), 1, 5, 10)
        assert v.kind == "inconclusive"
        assert v.m == 1  # smallest prefix-excluding m, named in the report


class TestInterleave:
    def test_identity_for_q1(self):
        _, seq = _unit_seq()
        assert interleave([seq]) is seq

    def test_zero_even_slots(self):
        G, b = _unit_seq()
        zeros = ExplicitSeq(G, (), (G.zero(),))
        seq = interleave([zeros, b])
        for n in range(6):
            assert seq.term(2 * n) == G.zero()
            assert seq.term(2 * n + 1) == b.term(n)

    def test_period_three_pattern(self):
        G, _ = _unit_seq()
        consts = [ExplicitSeq(G, (), (G.e(i),)) for i in range(3)]
        seq = interleave(consts)
        for n in range(12):
            assert seq.term(n) == G.e(n % 3)

    def test_indexing_law(self):
        G, _ = _unit_seq()
        comps = [
            ExplicitSeq(G, tuple(G.e(i) for i in range(4)), (G.e(j),))
            for j in range(5)
        ]
        for q in (1, 2, 3, 5):
            seq = interleave(comps[:q])
            for n in range(50):
                for j in range(q):
                    assert seq.term(n * q + j) == comps[j].term(n)

    def test_interleaved_cycle_detected(self):
        G, _ = _unit_seq()
        a = ExplicitSeq(G, (G.e(0),), (G.zero(),))
        b = ExplicitSeq(G, (), (G.e(1), G.e(2)))
        seq = interleave([a, b])
        start, cyc = seq.tail_cycle()
        for n in range(start, start + 3 * len(cyc)):
            assert seq.term(n) == cyc[(n - start) % len(cyc)]

    def test_explicit_prefix_is_bounded(self):
        G, _ = _unit_seq()
        seq = ExplicitSeq(G, (G.e(0),))
        assert seq.last_index() == 0
        with pytest.raises(OutOfRangeError):
            seq.term(1)


def test_verdict_exit_codes():
    assert Verdict(kind="excluded").exit_code() == 0
    assert Verdict(kind="member_up_to").exit_code() == 2
    assert Verdict(kind="inconclusive").exit_code() == 3


def test_excluded_verdicts_stable_under_larger_prefix():
    from minap.constructions import triangular_seq

    G = make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))
    seq = triangular_seq(G)
    g = G.add(G.h(0, 1), G.e(1, 2))
    base = check_criterion(seq, g, 1, 64, 64)
    assert base.kind == "excluded"
    for N in (128, 256, 512):
        again = check_criterion(seq, g, 1, 64, N)
        assert again.kind == "excluded" and again.m == base.m
