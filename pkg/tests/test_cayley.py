import pytest

from branchlab import perm
from branchlab.cayley import cayley_diameter
from branchlab.config import BudgetExceeded
from branchlab.permgroup import PermGroup
from branchlab.selfsimilar import GRIGORCHUK, quotient_tree_group


def naive_spheres(n, gens):
    moves = list(gens) + [perm.inverse(g) for g in gens]
    start = tuple(range(n))
    seen = {start}
    sphere = [start]
    sizes = [1]
    while True:
        nxt = []
        for x in sphere:
            for s in moves:
                y = perm.compose(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            return sizes
        sizes.append(len(nxt))
        sphere = nxt


def test_s3_with_transpositions():
    res = cayley_diameter(PermGroup.symmetric(3), [(1, 0, 2), (0, 2, 1), (2, 1, 0)])
    assert res.diameter == 2 and res.sphere_sizes == [1, 3, 2]


def test_non_generating_set_reports_index():
    res = cayley_diameter(PermGroup.symmetric(3), [(0, 1, 2)])
    assert not res.generates and res.index == 6 and res.diameter is None
    assert res.to_json()["index"] == 6
    res = cayley_diameter(PermGroup.symmetric(4), [(1, 0, 2, 3), (1, 2, 0, 3)])
    assert res.index == 4


def test_foreign_generator_rejected():
    with pytest.raises(ValueError):
        cayley_diameter(PermGroup.alternating(4), [(1, 0, 2, 3)])


@pytest.mark.parametrize("G", [PermGroup.symmetric(5), PermGroup.alternating(6), PermGroup.cyclic(7)],
                         ids=["Sym5", "Alt6", "Cyc7"])
def test_against_naive_bfs(G):
    res = cayley_diameter(G, G.generators)
    sizes = naive_spheres(G.degree, G.generators)
    assert res.sphere_sizes == sizes
    assert sum(sizes) == G.order()


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_grigorchuk_quotients(depth):
    Q = quotient_tree_group(GRIGORCHUK, depth)
    gens = [GRIGORCHUK.generator(n, depth).level_permutation(depth) for n in "abcd"]
    res = cayley_diameter(Q.group, gens)
    assert res.generates
    assert res.sphere_sizes == naive_spheres(Q.group.degree, gens)


def test_grigorchuk_diameters():
    expected = {1: 1, 2: 4, 3: 8, 4: 24, 5: 56}
    for depth, diam in expected.items():
        Q = quotient_tree_group(GRIGORCHUK, depth)
        gens = [GRIGORCHUK.generator(n, depth).level_permutation(depth) for n in "abcd"]
        assert cayley_diameter(Q.group, gens).diameter == diam


def test_budget():
    with pytest.raises(BudgetExceeded):
        cayley_diameter(PermGroup.symmetric(6), [(1, 0, 2, 3, 4, 5), (1, 2, 3, 4, 5, 0)], budget=100)
