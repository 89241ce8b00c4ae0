"""The ten acceptance criteria, each timed against its limit.

Run with ``pytest tests/test_acceptance.py``; a summary with one PASS/FAIL
line per criterion is printed at the end of the session.
"""

import itertools
import json
import math
import random

from branchlab import perm
from branchlab.burgermozes import (
    check_theorem_hypotheses,
    legal_automorphisms_exhaustive,
    make_legal_coloring,
    predicted_stabilizer_order,
    stabilizer_on_rest,
    tower_match_report,
)
from branchlab.cli import main
from branchlab.permgroup import PermGroup
from branchlab.portrait import Portrait
from branchlab.selfsimilar import GRIGORCHUK, quotient_tree_group
from branchlab.tree import DegreeSequence
from branchlab.verifier import (
    check_grigorchuk_derangement,
    commutator_trick,
    diagonalization_search,
    is_full_above,
    random_cover,
    random_transitive_group,
    random_trick_instance,
)
from branchlab.wreathtower import TowerSpec, build_tower, commutator_width_survey

SEED = 20240601


def cli_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


def leaf_commutator(s1, s2):
    n = s1.depth
    a, b = s1.level_permutation(n), s2.level_permutation(n)
    return perm.commutator(a, b)


def test_criterion_01_grigorchuk_indices(criterion, capsys):
    with criterion(1, "|K/K1| = 4 and |G1/K| = 16, stable over consecutive depths <= 8", 60):
        code, recs = cli_json(capsys, "verify", "grig-indices", "--depth", "8", "--json")
        rep = recs[0]
        assert code == 0 and rep["passed"]
        assert rep["index_K_over_K1"] == 4 and rep["index_G1_over_K"] == 16
        rows = rep["per_depth"]
        for key, value, pair in (("K/K1", 4, rep["K_over_K1_stabilized_at"]), ("G1/K", 16, rep["G1_over_K_stabilized_at"])):
            lo, hi = pair
            assert hi == lo + 1 and hi <= 8
            by_depth = {r["depth"]: r[key] for r in rows}
            assert by_depth[lo] == by_depth[hi] == value
            assert all(by_depth[d] == value for d in range(lo, 9))


def test_criterion_02_grigorchuk_derangements(criterion):
    with criterion(2, "derangement of V_{n+2} in rist(n) for n = 0, 1, 2", 30):
        for n in (0, 1, 2):
            depth = n + 4
            rep = check_grigorchuk_derangement(n, depth)
            assert rep.ok
            z = rep.element
            seq = z.seq
            G = quotient_tree_group(GRIGORCHUK, depth)
            assert G.contains(z)
            assert all(z.act(v) == v for v in seq.level_vertices(n))
            assert all(z.act(v) != v for v in seq.level_vertices(n + 2))
            # product of pieces, one per vertex of V_n, each in G and supported below its vertex
            for v in seq.level_vertices(n):
                piece = Portrait.place(seq, v, z.section(v))
                assert piece.fixes_outside(v) and G.contains(piece)


def test_criterion_03_commutator_trick(criterion):
    with criterion(3, "1000 random instances of the four-conjugate identity at depth <= 4", 60):
        rng = random.Random(SEED)
        for _ in range(1000):
            tau, s1, s2 = random_trick_instance(rng, rng.randint(1, 4))
            w = commutator_trick(tau, s1, s2)
            assert len(w.conjugators) == 4
            n = tau.depth
            t = tau.level_permutation(n)
            prod = perm.identity(len(t))
            for g, e in w.conjugators:
                gp = g.level_permutation(n)
                te = t if e == 1 else perm.inverse(t)
                prod = perm.compose(prod, perm.compose(perm.compose(gp, te), perm.inverse(gp)))
            assert prod == leaf_commutator(s1, s2)


def test_criterion_04_ore_small(criterion):
    with criterion(4, "commutator width of A5, A6, A7 is 1", 120):
        for n in (5, 6, 7):
            assert PermGroup.alternating(n).commutator_width() == 1
        # independent check for A5: every element is a single commutator
        elems = sorted(PermGroup.alternating(5).elements())
        comms = {perm.commutator(g, h) for g in elems for h in elems}
        assert comms == set(elems)


def test_criterion_05_jordan(criterion):
    with criterion(5, "100 random transitive groups of degree <= 10 contain a derangement", 30):
        rng = random.Random(SEED)
        for _ in range(100):
            G = random_transitive_group(rng, 10)
            assert G.is_transitive() and G.degree <= 10
            x = G.find_derangement()
            assert x is not None and G.contains(x)
            assert all(x[i] != i for i in range(G.degree))


POOL = [
    PermGroup.symmetric(2),
    PermGroup.symmetric(3),
    PermGroup.cyclic(3),
    PermGroup.cyclic(4),
    PermGroup.alternating(4),
    PermGroup.symmetric(4),
    PermGroup(4, [(1, 2, 3, 0), (3, 2, 1, 0)]),  # dihedral of order 8
    PermGroup.cyclic(5),
    PermGroup.alternating(5),
]


def random_spec(rng, limit=10**5):
    while True:
        factors = [rng.choice(POOL) for _ in range(rng.randint(1, 4))]
        spec = TowerSpec(tuple(factors))
        if spec.predicted_order() <= limit:
            return spec


def test_criterion_06_wreath_structure(criterion):
    with criterion(6, "20 random towers: BFS order equals the product formula, spherically transitive", 120):
        rng = random.Random(SEED)
        for _ in range(20):
            spec = random_spec(rng)
            G = build_tower(spec)
            formula = math.prod(A.order() ** spec.seq.level_size(i) for i, A in enumerate(spec.factors))
            assert len(G.group.element_array()) == formula == G.order()
            for n in range(1, spec.depth + 1):
                assert G.level_action(n).is_transitive()


def test_criterion_07_burger_mozes(criterion):
    with criterion(7, "48 legal maps for Sym(3) at radius 2, tower match, Alt(6) hypotheses", 60):
        S3 = PermGroup.symmetric(3)
        ball = make_legal_coloring(3, 2)
        legal = legal_automorphisms_exhaustive(ball, S3)
        H = stabilizer_on_rest(S3)
        assert len(legal) == 48 == S3.order() * H.order() ** 3 == predicted_stabilizer_order(ball, S3)
        assert tower_match_report(S3, 2).matches
        assert check_theorem_hypotheses(PermGroup.alternating(6)).all_true


def test_criterion_08_width_of_a5_towers(criterion):
    with criterion(8, "width 1 on every A5 truncation and rigid stabilizer within the budget", 300):
        A5 = PermGroup.alternating(5)
        # x -> x + 1 and x -> -1/x on the projective line over F_5, infinity = 5
        A5_on_6 = PermGroup(6, [(1, 2, 3, 4, 0, 5), (5, 4, 2, 3, 1, 0)])
        assert A5_on_6.order() == 60
        computed = 0
        for spec in (TowerSpec.of(A5, A5, A5), TowerSpec.of(A5_on_6, A5)):
            survey = commutator_width_survey(spec)
            computed += len(survey.rows)
            assert survey.rows and all(r["width"] == 1 for r in survey.rows)
            for s in survey.skipped:
                assert s["order"] > 10**7
        assert computed >= 4


def test_criterion_09_property_suites(criterion):
    with criterion(9, "group axioms, truncation naturality, orbit-stabilizer, rist product", 120):
        rng = random.Random(SEED)
        # portrait group axioms and homomorphic action
        for _ in range(100):
            seq = DegreeSequence(tuple(rng.randint(2, 3) for _ in range(rng.randint(1, 5))))
            p, q, r = (Portrait.random(seq, rng) for _ in range(3))
            e = Portrait.identity(seq)
            assert (p * q) * r == p * (q * r)
            assert p * e == p == e * p
            assert p * p.inverse() == e == p.inverse() * p
            for v in itertools.islice(seq.vertices(), 40):
                assert (p * q).act(v) == p.act(q.act(v))
            m = rng.randint(0, seq.depth)
            assert (p * q).truncate(m) == p.truncate(m) * q.truncate(m)
        # truncation naturality for towers
        for _ in range(15):
            spec = random_spec(rng, 10**4)
            m = rng.randint(1, spec.depth)
            assert build_tower(spec).level_action(m) == build_tower(spec.prefix(m)).group
        # orbit-stabilizer
        for _ in range(100):
            n = rng.randint(1, 8)
            gens = []
            for _ in range(rng.randint(0, 3)):
                g = list(range(n))
                rng.shuffle(g)
                gens.append(tuple(g))
            G = PermGroup(n, gens)
            x = rng.randrange(n)
            assert len(G.orbit(x)) * G.point_stabilizer(x).order() == G.order()
        # rigid stabilizer of a level is the product of the vertex rigid stabilizers
        for _ in range(15):
            spec = random_spec(rng, 10**4)
            G = build_tower(spec)
            n = rng.randint(0, spec.depth)
            parts = [G.rigid_stabilizer(v).order() for v in spec.seq.level_vertices(n)]
            assert G.rigid_level_stabilizer(n).order() == math.prod(parts)
            brute = [g for g in G.portraits() if all(g.act(v) == v for v in spec.seq.level_vertices(n))]
            assert len(brute) == G.rigid_level_stabilizer(n).order()


def test_criterion_10_diagonalization(criterion):
    with criterion(10, "50 random exact covers of Aut(T2) at depth 3, pairs re-verified", 60):
        G = build_tower([PermGroup.symmetric(2)] * 3)
        elems = G.portraits()
        rng = random.Random(SEED)
        for _ in range(50):
            family = random_cover(elems, rng.randint(1, 3), rng)
            assert sum(map(len, family)) == len(elems) and set().union(*map(set, family)) == set(elems)
            res = diagonalization_search(family, (), G)
            again = is_full_above(family[res.index], res.vertex, G)
            assert again.full and again.verify()
            have = {a.section_at(res.vertex) for a in family[res.index] if a.act(res.vertex) == res.vertex}
            need = {r.section_at(res.vertex) for r in G.rigid_stabilizer(res.vertex).portraits()}
            assert need <= have
