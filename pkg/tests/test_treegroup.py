import pytest

from branchlab.config import DEFAULT_BUDGET, element_budget
from branchlab.permgroup import PermGroup
from branchlab.portrait import Portrait
from branchlab.selfsimilar import GRIGORCHUK, quotient_tree_group
from branchlab.tree import DegreeSequence
from branchlab.treegroup import TreeGroup
from branchlab.wreathtower import build_tower


def test_degree_must_match_leaves():
    with pytest.raises(ValueError):
        TreeGroup(DegreeSequence((2, 2)), PermGroup.symmetric(3))


def test_from_portraits_rejects_other_tree():
    with pytest.raises(ValueError):
        TreeGroup.from_portraits(DegreeSequence((2,)), [Portrait.identity(DegreeSequence((3,)))])


def test_level_action_and_transitivity():
    Q = quotient_tree_group(GRIGORCHUK, 4)
    assert Q.level_action(1).order() == 2
    assert Q.level_action(2).order() == 8
    assert all(Q.is_level_transitive(n) for n in range(1, 5))
    T = TreeGroup.from_portraits(DegreeSequence((2, 2)), [GRIGORCHUK.generator("b", 2)])
    assert not T.is_level_transitive(1)


def test_transporter():
    Q = quotient_tree_group(GRIGORCHUK, 4)
    for w in Q.seq.level_vertices(3):
        g = Q.transporter((0, 0, 0), w)
        assert g.act((0, 0, 0)) == w and Q.contains(g)
    assert Q.transporter((0,), (0, 1)) is None


def test_centralizer_by_definition():
    G = build_tower([PermGroup.symmetric(2)] * 2)
    rist = G.rigid_stabilizer((0,))
    cent = G.centralizer(rist)
    brute = [g for g in G.portraits() if all(g * r == r * g for r in rist.portraits())]
    assert cent == brute


def test_contains_portraits_and_tuples():
    Q = quotient_tree_group(GRIGORCHUK, 3)
    b = GRIGORCHUK.generator("b", 3)
    assert b in Q and Q.contains(b.level_permutation(3))
    assert not Q.contains(Portrait.identity(DegreeSequence((2, 2))))


def test_budget_resolution(monkeypatch):
    monkeypatch.delenv("BRANCHLAB_BUDGET", raising=False)
    assert element_budget() == DEFAULT_BUDGET == 10**7
    assert element_budget(5) == 5
    monkeypatch.setenv("BRANCHLAB_BUDGET", "1e4")
    assert element_budget() == 10**4
    monkeypatch.setenv("BRANCHLAB_BUDGET", "lots")
    with pytest.raises(ValueError):
        element_budget()
