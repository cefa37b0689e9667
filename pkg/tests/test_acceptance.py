"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is exact."""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from minap import zlattice
from minap.constructions import (
    GeomRule,
    TriangularParams,
    circle_membership,
    tri_mu,
    tri_s,
    tri_t,
    triangular_seq,
)
from minap.decompose import (
    TruncatedPresentation,
    basis_change,
    contains_uniform_omega,
    minap_admissible,
    peel_summand,
    primary_classes,
    split_lambda,
)
from minap.groups import Block, ConstTail, _Omega, make_group, ulm_kaplansky_leading
from minap.radical import oracle_radical, radical_of
from minap.tseq import ExplicitSeq, check_criterion, enumerate_Akm, interleave

from conftest import all_elements, span_brute


@contextmanager
def criterion(number: int, description: str, limit_s: float):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:2d}: FAIL - {description}")
        raise
    elapsed = time.monotonic() - start
    status = "PASS" if elapsed <= limit_s else "FAIL (over time limit)"
    print(f"ACCEPTANCE {number:2d}: {status} - {description} [{elapsed:.2f}s <= {limit_s:.0f}s]")
    assert elapsed <= limit_s, f"criterion {number} exceeded {limit_s}s ({elapsed:.2f}s)"


@pytest.fixture(scope="module")
def g42():
    return make_group([Block(4, (2,))], ConstTail(Block(4, (2,))))


@pytest.fixture(scope="module")
def params42(g42):
    return TriangularParams.from_group(g42)


def test_criterion_01_prefix_reproduction(g42, params42):
    with criterion(1, "triangular sequence prefix matches the printed terms", 1.0):
        seq = triangular_seq(g42)
        b = [g42.h(j, 1) for j in range(3)]
        assert seq.term(1) == b[0]
        assert seq.term(3) == g42.add(b[0], g42.e(1))
        assert seq.term(5) == g42.sum([b[1], g42.e(2), g42.e(3)])
        even_want = [g42.e(0, 1), g42.e(0, 2), g42.e(0, 3), g42.e(1, 1)]
        assert [seq.term(2 * t) for t in range(4)] == even_want


def test_criterion_02_index_tables():
    with criterion(2, "triangular index tables for n up to 10^5", 5.0):
        for n in range(1, 10 ** 5 + 1):
            t = tri_t(n)
            assert tri_s(t) <= n < tri_s(t + 1)
            mu = tri_mu(n)
            assert (n % mu if mu > 1 else 0) < mu or mu == 1
            if n > 3:
                assert (n % mu if mu > 1 else 0) < n
                assert n < tri_s(n - 1)


def test_criterion_03_escape_soundness(g42, params42):
    with criterion(
        3, "certified escape for every nonzero element on blocks 0..3, k <= 3", 120.0
    ):
        seq = triangular_seq(g42)
        N = 512
        elems = [g for g in all_elements(g42, [0, 1, 2, 3]) if not g.is_zero()]
        assert len(elems) == 8 ** 4 - 1
        for g in elems:
            b_g = g.max_block()
            # the proof-side bound: even terms escape max(B_g, 3) past m'
            m_prime = 3 * (max(b_g, 3) + 1) - 1
            for k in range(4):
                v = check_criterion(seq, g, k, 64, N)
                assert v.kind == "excluded", (g, k, v.kind)
                assert v.certificate is not None
                assert v.m <= 4 * m_prime * (k + 1)


def test_criterion_04_signed_sum_lattice(g42):
    with criterion(4, "signed-sum family properties on 500 random instances", 60.0):
        rng = random.Random(424242)
        pool = [
            g42.e(0), g42.e(0, 2), g42.h(0, 1), g42.e(1),
            g42.add(g42.e(1), g42.h(0, 1)), g42.e(2, 3), g42.h(1, 1),
        ]
        for _ in range(500):
            terms = tuple(rng.choice(pool) for _ in range(6))
            seq = ExplicitSeq(g42, terms, (rng.choice(pool),))
            k = rng.randint(0, 3)
            m = rng.randint(0, 4)
            N = rng.randint(m, 7)
            a = enumerate_Akm(seq, k, m, N)
            assert g42.zero() in a
            assert all(g42.neg(x) in a for x in a)
            if m + 1 <= N:
                assert enumerate_Akm(seq, k, m + 1, N) <= a
            assert a <= enumerate_Akm(seq, k + 1, m, N)
            assert a <= enumerate_Akm(seq, k, m, N + 1)


def test_criterion_05_radical_reproduction(g42, params42):
    with criterion(
        5, "radical equals the side subgroup; brute-force quotient agreement", 120.0
    ):
        r = radical_of(params42, 8, 128)
        assert r.tag == "EQUALS_H"
        for j, gens in r.blocks:
            assert span_brute(g42, list(gens)) == {g42.zero(), g42.h(j, 1)}
        for B in range(0, 4):
            GB = make_group([Block(4, (2,))] * (B + 1), None, B + 1)
            cycle = [GB.h(j, 1) for j in range(B + 1)]
            kernel, s_d, _ = oracle_radical(GB, cycle * 2)
            assert len(s_d) == 4 ** (B + 1)  # exhausted 8^(B+1) characters
            want = span_brute(GB, cycle)
            assert kernel == want
            rB = radical_of(params42, B, 64)
            got = span_brute(
                GB,
                [GB.element({j: (t.lam, t.h) for j, t in x.items})
                 for _, gens in rB.blocks for x in gens],
            )
            assert got == want


def test_criterion_06_whole_group_device():
    with criterion(6, "whole-group verdict for the bare constant presentation", 60.0):
        G = make_group([], ConstTail(Block(2)), 0)
        params = TriangularParams.from_group(G)
        for B in range(0, 9):
            r = radical_of(params, B, 128)
            assert r.tag == "MINAP"


def test_criterion_07_bounded_classification():
    with criterion(7, "bounded-case classification on the twelve-case table", 10.0):
        Z = lambda n: Block(n)
        cases = [
            (make_group([], ConstTail(Z(4)), 0), True, None),
            (make_group([Z(4)] * 3, ConstTail(Z(2)), 0), False, (2, 2)),
            (make_group([], ConstTail(Z(6)), 0), True, None),
            (make_group([], ConstTail(Z(2)), 0), True, None),
            (make_group([Z(3)] * 5, ConstTail(Z(2)), 0), False, (3, 2)),
            (make_group([Z(4), Z(2)], ConstTail(Z(4)), 0), True, None),
            (make_group([Z(8)] * 2, ConstTail(Z(4)), 0), False, (2, 4)),
            (make_group([], ConstTail(Z(9)), 0), True, None),
            (make_group([Z(3)] * 4, ConstTail(Z(9)), 0), True, None),
            (make_group([], ConstTail(Z(12)), 0), True, None),
            (make_group([Z(9)], ConstTail(Z(18)), 0), True, None),
            (make_group([Z(8)] * 5, ConstTail(Z(2)), 0), False, (2, 4)),
        ]
        for G, want, witness_want in cases:
            ok, w = minap_admissible(G)
            assert ok is want, (G, ok)
            assert contains_uniform_omega(G, G.exponent()) is want
            if not want:
                assert (w.p, w.m) == witness_want
                # the witness multiplication has finite image: every class
                # repeated infinitely often is annihilated by m
                for (q, s), count in primary_classes(G).items():
                    if isinstance(count, _Omega):
                        assert w.m % q ** s == 0
                # and the subgroup itself is not annihilated (image nonzero)
                r_lead = ulm_kaplansky_leading(G)[w.p][0]
                assert w.m % (w.p ** r_lead) != 0


def test_criterion_08_structural_algorithms(g42):
    with criterion(8, "structural algorithms: rebasing, splitting, peeling", 120.0):
        rng = random.Random(88)
        # 200 rebasing instances with mutual-membership equivalence
        for _ in range(200):
            k = rng.randint(2, 4)
            order = rng.choice([2, 3, 4, 8])
            G = make_group([Block(order)] * k, None, 0)
            basis = [G.e(i) for i in range(k)]
            J = {0}
            Iprime = set(rng.sample(range(1, k), rng.randint(0, k - 1)))
            out = basis_change(G, basis, J, Iprime, {i: 0 for i in Iprime})
            for x in basis:
                assert zlattice.element_membership(G, out, x)[0]
            for x in out:
                assert zlattice.element_membership(G, basis, x)[0]

        # splitting preserves the cyclic-class multiset
        for G in [
            make_group([Block(6), Block(4)], ConstTail(Block(10)), 0),
            make_group([Block(8)] * 2, ConstTail(Block(6)), 0),
            g42,
        ]:
            d = split_lambda(G)
            got = {}
            for part in d.parts:
                for c in part.classes:
                    got[(c.p, c.r)] = c.count
            assert got == primary_classes(G)

        # 20 hand-built peel instances, each with a trivial-intersection check
        def unit(n, i, c=1):
            v = [0] * n
            v[i] = c
            return tuple(v)

        instances = []
        for p in (2, 3):
            for m in (4, 5):  # disjoint side on a fresh coordinate
                orders = tuple(p ** (i + 1) for i in range(m))
                lead = tuple(unit(m, i) for i in range(1, m))
                instances.append((TruncatedPresentation(orders, lead, (unit(m, 0),)), p))
        for m in (4, 5, 6, 7):  # side inside the first lead generator
            orders = tuple(2 ** (i + 2) for i in range(m))
            lead = tuple(unit(m, i) for i in range(m))
            instances.append(
                (TruncatedPresentation(orders, lead, (unit(m, 0, 2),)), 2)
            )
        for p, m in ((2, 8), (2, 10), (3, 8), (5, 6)):  # side occupies the lead span
            orders = tuple([p ** 2] * m)
            lead = tuple(unit(m, i, p) for i in range(m))
            instances.append((TruncatedPresentation(orders, lead, lead), p))
        for m, width in ((14, 10), (16, 12), (15, 11), (13, 9)):  # entangled, constant orders
            orders = tuple([4] * m)
            lead = tuple(unit(m, i, 2) for i in range(m))
            side = tuple(
                tuple((2 if t in (0, i + 1) else 0) for t in range(m))
                for i in range(width)
            )
            instances.append((TruncatedPresentation(orders, lead, side), 2))
        for m, width in ((10, 8), (12, 9), (11, 8), (12, 10)):  # entangled, growing
            orders = tuple(2 ** (i + 2) for i in range(m))
            lead = tuple(unit(m, i) for i in range(m))
            side = []
            for i in range(width):
                v = [0] * m
                v[0] = 2
                v[i + 1] = 2 ** (i + 1)
                side.append(tuple(v))
            instances.append((TruncatedPresentation(orders, lead, tuple(side)), 2))

        assert len(instances) == 20
        for pres, p in instances:
            st = peel_summand(pres, p, window=10)
            assert all(c.ok for c in st.certificate)
            summand = list(st.h0) + [st.e0]
            rest = list(st.rest_lead) + list(st.rest_side)
            if rest:
                assert not zlattice.subgroup_intersection(
                    summand, rest, list(pres.orders)
                )


def test_criterion_09_lattice_oracle_equivalence():
    with criterion(9, "normal forms and subgroup ops vs brute force, 300 instances", 120.0):
        rng = random.Random(909)
        checked = 0
        while checked < 300:
            k = rng.randint(1, 3)
            orders = [rng.choice([2, 3, 4, 5, 6, 8, 9]) for _ in range(k)]
            if math.prod(orders) > 512:
                continue
            checked += 1
            gens = [[rng.randrange(o) for o in orders] for _ in range(rng.randint(1, 3))]
            others = [[rng.randrange(o) for o in orders] for _ in range(rng.randint(1, 2))]
            x = [rng.randrange(o) for o in orders]
            spanned = zlattice.span_elements(gens, orders)
            ok, coeffs = zlattice.subgroup_membership(gens, orders, x)
            assert ok == (tuple(x) in spanned)
            inter = zlattice.subgroup_intersection(gens, others, orders)
            brute = spanned & zlattice.span_elements(others, orders)
            got = zlattice.span_elements(inter, orders) if inter else {tuple([0] * k)}
            assert got == brute
            elems = [v for v in (gens + others) if any(v)]
            if elems:
                sizes = [zlattice.vector_order(v, orders) for v in elems]
                if math.prod(sizes) <= 4096:
                    joint = zlattice.span_elements(elems, orders)
                    assert zlattice.is_independent(elems, orders) == (
                        len(joint) == math.prod(sizes)
                    )
            # normal-form properties on a random matrix
            A = [[rng.randint(-9, 9) for _ in range(rng.randint(1, 4))]]
            for _ in range(rng.randint(0, 3)):
                A.append([rng.randint(-9, 9) for _ in range(len(A[0]))])
            U, S, V = zlattice.smith_normal_form(A)
            assert zlattice.mat_mul(zlattice.mat_mul(U, A), V) == S
            diag = [S[i][i] for i in range(min(len(A), len(A[0])))]
            for a, b in zip(diag, diag[1:]):
                assert a >= 0 and (b % a == 0 if a else b == 0)
            assert abs(zlattice.determinant(U)) == 1
            assert abs(zlattice.determinant(V)) == 1
            H, UH = zlattice.hermite_normal_form(A)
            assert zlattice.mat_mul(UH, A) == H
            assert abs(zlattice.determinant(UH)) == 1


def test_criterion_10_circle_membership():
    with criterion(10, "circle membership vs direct simulation, 1000 rationals", 30.0):
        r = circle_membership(GeomRule(2), Fraction(5, 8))
        assert r.kind == "IN"
        r = circle_membership(GeomRule(2), Fraction(1, 3))
        assert r.kind == "NOT_IN" and r.period == 2
        rng = random.Random(1010)
        members = []
        for _ in range(1000):
            b = rng.randint(1, 60)
            x = Fraction(rng.randrange(b), b)
            res = circle_membership(GeomRule(2), x)
            horizon = 10 * (res.preperiod + res.period)
            sim = [
                (2 ** n) * x.numerator % x.denominator for n in range(horizon)
            ]
            assert (res.kind == "IN") == all(v == 0 for v in sim[res.preperiod :])
            if res.kind == "IN":
                members.append(x)
        for _ in range(200):
            x, y = rng.choice(members), rng.choice(members)
            assert circle_membership(GeomRule(2), (x + y) % 1).kind == "IN"


def test_criterion_11_interleave_indexing():
    with criterion(11, "interleave indexing law for q in {1,2,3,5}", 5.0):
        G = make_group([], ConstTail(Block(2)), 0)
        comps = [
            ExplicitSeq(G, tuple(G.e(i) for i in range(3)), (G.e(5 + j),))
            for j in range(5)
        ]
        for q in (1, 2, 3, 5):
            seq = interleave(comps[:q])
            for n in range(10 ** 4 + 1):
                for j in range(q):
                    assert seq.term(n * q + j) == comps[j].term(n)
