import itertools
import math

import pytest
from hypothesis import given, strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from branchlab import perm
from branchlab.config import BudgetExceeded
from branchlab.permgroup import (
    PermGroup,
    commutator_width,
    commutator_width_profile,
    derived_subgroup,
    elements,
    find_derangement,
    is_generated_by_point_stabilizers,
    is_k_transitive,
    is_perfect,
    order,
    orbits,
    point_stabilizer,
)


def sym(g: PermGroup) -> PermutationGroup:
    return PermutationGroup([Permutation(list(x)) for x in g.generators] or [Permutation(g.degree - 1)])


@st.composite
def groups(draw, max_degree=7):
    n = draw(st.integers(1, max_degree))
    gens = draw(st.lists(st.permutations(range(n)), min_size=0, max_size=3))
    return PermGroup(n, [tuple(g) for g in gens])


def brute_closure(n, gens):
    out = {tuple(range(n))}
    frontier = list(out)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = perm.compose(g, x)
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return out


def brute_width(G):
    elems = list(G.elements())
    comms = {perm.commutator(g, h) for g in elems for h in elems}
    derived = brute_closure(G.degree, list(comms))
    current, k = {tuple(range(G.degree))}, 0
    while current != derived:
        current = {perm.compose(x, c) for x in current for c in comms}
        k += 1
    return k


# -- examples ------------------------------------------------------------------


def test_element_examples():
    assert elements(PermGroup.trivial(3)) == {(0, 1, 2)}
    assert len(elements(PermGroup(3, [(1, 0, 2), (1, 2, 0)]))) == 6
    assert len(elements(PermGroup.alternating(6))) == 360


def test_budget_error_mentions_schreier_sims():
    with pytest.raises(BudgetExceeded, match="group too large"):
        elements(PermGroup.symmetric(6), budget=100)


def test_orders_of_named_groups():
    for d in range(1, 9):
        assert order(PermGroup.symmetric(d)) == math.factorial(d)
        assert order(PermGroup.alternating(d)) == max(1, math.factorial(d) // 2)
        assert order(PermGroup.cyclic(d)) == d


def test_orbit_examples():
    assert orbits(PermGroup.trivial(3)) == [[0], [1], [2]]
    assert orbits(PermGroup(3, [(1, 2, 0)])) == [[0, 1, 2]]
    assert orbits(PermGroup(3, [(1, 0, 2)])) == [[0, 1], [2]]


def test_k_transitivity_examples():
    assert is_k_transitive(PermGroup.alternating(6), 2)
    assert not is_k_transitive(PermGroup(3, [(1, 2, 0)]), 2)
    assert is_k_transitive(PermGroup.alternating(6), 4)
    assert not is_k_transitive(PermGroup.alternating(6), 5)
    assert is_k_transitive(PermGroup.symmetric(5), 5)


def test_point_stabilizer_examples():
    assert point_stabilizer(PermGroup.symmetric(3), 0).order() == 2
    assert point_stabilizer(PermGroup.trivial(4), 2).order() == 1
    assert point_stabilizer(PermGroup.alternating(6), 0).order() == 60


def test_generated_by_point_stabilizers_examples():
    assert is_generated_by_point_stabilizers(PermGroup.alternating(6))
    assert not is_generated_by_point_stabilizers(PermGroup(3, [(1, 2, 0)]))
    assert not is_generated_by_point_stabilizers(PermGroup.symmetric(2))


def test_derived_and_perfect_examples():
    assert derived_subgroup(PermGroup.cyclic(6)).order() == 1
    assert derived_subgroup(PermGroup.symmetric(4)).order() == 12
    assert is_perfect(PermGroup.alternating(5))
    assert not is_perfect(PermGroup.symmetric(5))
    assert is_perfect(PermGroup.trivial(3))


def test_commutator_width_examples():
    assert commutator_width(PermGroup.cyclic(5)) == 0
    assert commutator_width(PermGroup.alternating(5)) == 1
    assert commutator_width(PermGroup.alternating(6)) == 1
    assert commutator_width(PermGroup.symmetric(4)) == 1


def test_width_profile_counts_commutators_in_a5():
    prof = commutator_width_profile(PermGroup.alternating(5))
    assert prof["sizes"] == [1, 60]
    assert prof["derived_order"] == 60
    assert prof["classes"] == 5


def test_find_derangement_examples():
    assert find_derangement(PermGroup(3, [(1, 2, 0)])) in {(1, 2, 0), (2, 0, 1)}
    assert find_derangement(PermGroup.trivial(2)) is None
    assert find_derangement(PermGroup(4, [(1, 0, 2, 3)])) is None


def test_parse():
    assert PermGroup.parse("Alt(5)").order() == 60
    assert PermGroup.parse(" Sym( 4 ) ").order() == 24
    assert PermGroup.parse({"n": 3, "gens": [[1, 2, 0]]}).order() == 3
    with pytest.raises(ValueError):
        PermGroup.parse("PSL(2,7)")


def test_invalid_generator_rejected():
    with pytest.raises(ValueError):
        PermGroup(3, [(0, 0, 1)])


# -- oracles ---------------------------------------------------------------------


@given(groups())
def test_order_and_membership_match_sympy(G):
    S = sym(G)
    assert G.order() == S.order()
    for p in itertools.islice(itertools.permutations(range(G.degree)), 200):
        assert G.contains(p) == S.contains(Permutation(list(p)))


@given(groups(max_degree=6))
def test_element_sets_match_brute_closure(G):
    assert G.elements() == brute_closure(G.degree, G.generators)
    assert set(G.iter_elements()) == G.elements()


@given(groups())
def test_orbits_and_transitivity_match_sympy(G):
    S = sym(G)
    assert sorted(map(sorted, S.orbits())) == G.orbits()
    assert G.is_transitive() == S.is_transitive()


@given(groups())
def test_derived_subgroup_matches_sympy(G):
    assert G.derived_subgroup().order() == sym(G).derived_subgroup().order()
    assert G.is_perfect() == sym(G).is_perfect


@given(groups(max_degree=6), st.data())
def test_orbit_stabilizer(G, data):
    x = data.draw(st.integers(0, G.degree - 1))
    H = G.point_stabilizer(x)
    assert len(G.orbit(x)) * H.order() == G.order()
    assert H.is_subgroup_of(G)
    assert all(h[x] == x for h in H.generators)
    assert H.order() == sym(G).stabilizer(x).order()


@given(groups(max_degree=5), st.integers(1, 3))
def test_k_transitivity_by_counting(G, k):
    if k > G.degree:
        return
    images = {tuple(g[i] for i in range(k)) for g in G.elements()}
    assert G.is_k_transitive(k) == (len(images) == math.perm(G.degree, k))


@given(groups(max_degree=5))
def test_commutator_width_matches_brute_force(G):
    assert G.commutator_width() == brute_width(G)


@given(groups())
def test_derangement_search_is_exhaustive(G):
    found = G.find_derangement()
    exists = any(all(g[i] != i for i in range(G.degree)) for g in G.iter_elements())
    assert (found is not None) == exists
    if found is not None:
        assert G.contains(found) and all(found[i] != i for i in range(G.degree))


@given(groups())
def test_jordan_transitive_groups_have_derangements(G):
    if G.degree > 1 and G.is_transitive():
        assert G.find_derangement() is not None


@given(groups(max_degree=6))
def test_derived_subgroup_is_normal(G):
    assert G.is_normal_subgroup(G.derived_subgroup())


@given(groups(max_degree=6))
def test_ranks_are_a_bijection(G):
    rows = G.element_array()
    ranks = G.chain.rank_rows(rows)
    assert sorted(ranks.tolist()) == list(range(G.order()))
