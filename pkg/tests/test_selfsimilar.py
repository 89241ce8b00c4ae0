import pytest

from branchlab.portrait import Portrait
from branchlab.selfsimilar import (
    GRIGORCHUK,
    RecursionTable,
    Word,
    check_self_replicating,
    element_x,
    evaluate,
    grigorchuk_table,
    k1_subgroup,
    k_generators,
    k_quotient_cyclic_by_y,
    k_subgroup,
    k_subgroup_indices,
    pair,
    quotient_group,
    quotient_tree_group,
)


def closure(gens):
    # brute-force closure of a set of portraits, no stabilizer chains
    one = Portrait.identity(gens[0].seq)
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def grig_order(n):
    # |G / st(n)| for the first Grigorchuk group, n >= 3
    return 2 ** (5 * 2 ** (n - 3) + 2)


# -- the table -------------------------------------------------------------------


def test_table_entries():
    t = grigorchuk_table()
    root_a, _ = t.rule("a")
    root_b, secs_b = t.rule("b")
    root_d, secs_d = t.rule("d")
    assert root_a == (1, 0)
    assert [str(w) for w in secs_b] == ["a", "c"]
    assert root_b == root_d == (0, 1)
    assert [str(w) for w in secs_d] == ["1", "b"]


def test_table_json_roundtrip():
    assert RecursionTable.from_json(GRIGORCHUK.to_json()) == GRIGORCHUK


def test_table_rejects_undeclared_generators():
    with pytest.raises(ValueError, match="undeclared"):
        RecursionTable.from_mapping(2, {"a": ((1, 0), ("", "z"))})


def test_word_parsing():
    assert Word.parse("ab").letters == (("a", 1), ("b", 1))
    assert Word.parse("a b^-1 c").letters == (("a", 1), ("b", -1), ("c", 1))
    assert Word.parse("1").letters == ()
    assert Word.parse("a^-1b").letters == (("a", -1), ("b", 1))
    assert (Word.parse("ab") ** -1).letters == (("b", -1), ("a", -1))
    with pytest.raises(ValueError):
        Word.parse("a+b")


def test_unknown_generator():
    with pytest.raises(KeyError):
        evaluate(GRIGORCHUK, "ae", 3)


# -- evaluation ------------------------------------------------------------------


def test_empty_word_is_identity():
    for depth in range(0, 5):
        assert evaluate(GRIGORCHUK, "", depth).is_identity()


def test_generators_are_involutions():
    for depth in range(1, 8):
        for name in "abcd":
            assert evaluate(GRIGORCHUK, name + name, depth).is_identity()


def test_bcd_is_klein_four():
    for depth in range(1, 8):
        assert evaluate(GRIGORCHUK, "bcd", depth).is_identity()
        assert evaluate(GRIGORCHUK, "bc", depth) == evaluate(GRIGORCHUK, "cb", depth)


def test_order_of_ab_at_depth_five():
    g = evaluate(GRIGORCHUK, "ab", 5)
    powers = [g]
    while not powers[-1].is_identity():
        powers.append(powers[-1] * g)
    assert len(powers) == 16


def test_inverse_letters():
    for depth in (3, 5):
        w = evaluate(GRIGORCHUK, "abcab", depth)
        assert evaluate(GRIGORCHUK, "b^-1 a^-1 b^-1 c^-1 a^-1", depth) == w.inverse()


def test_element_x_deranges_level_two():
    for depth in range(2, 8):
        assert element_x(depth).is_derangement_of_level(2)
    assert element_x(4).section((0,)) == evaluate(GRIGORCHUK, "ca", 3)
    assert element_x(4).section((1,)) == evaluate(GRIGORCHUK, "ac", 3)


def test_element_x_equals_a_word():
    # x = (ca, ac) = [a, b] in G
    for depth in range(2, 7):
        assert element_x(depth) == evaluate(GRIGORCHUK, "abab", depth)


# -- quotients ----------------------------------------------------------------------


def test_small_quotients():
    assert quotient_group(GRIGORCHUK, 1).order() == 2
    assert quotient_group(GRIGORCHUK, 2).order() == 8
    gens = [GRIGORCHUK.generator(n, 3) for n in "abcd"]
    assert len(closure(gens)) == 128 == quotient_group(GRIGORCHUK, 3).order()


def test_quotient_orders_follow_known_formula():
    for n in range(3, 9):
        assert quotient_group(GRIGORCHUK, n).order() == grig_order(n)


def test_quotients_are_two_groups():
    for n in range(1, 8):
        order = quotient_group(GRIGORCHUK, n).order()
        assert order & (order - 1) == 0


def test_quotients_are_level_transitive():
    Q = quotient_tree_group(GRIGORCHUK, 5)
    assert Q.is_spherically_transitive()


# -- K ------------------------------------------------------------------------------


def test_k_indices_by_brute_force_at_depth_four():
    G = closure([GRIGORCHUK.generator(n, 4) for n in "abcd"])
    K = closure(k_generators(4))
    K1 = closure(k1_subgroup(4).generator_portraits())
    assert K1 <= K <= G
    assert len(K) // len(K1) == 4
    assert len(G) // len(K) == 16


def test_k_indices_report():
    rep = k_subgroup_indices(7)
    assert rep.index_K_over_K1 == 4
    assert rep.index_G1_over_K == 16
    assert rep.K_over_K1_stable_since == 4
    assert rep.G1_over_K_stable_since == 3
    assert rep.K_over_K1_cyclic_by_y
    data = rep.to_json()
    assert data["K_over_K1_stabilized_at"] == [4, 5]
    assert [r["K/K1"] for r in rep.table] == [2, 2, 4, 4, 4, 4]


def test_k_indices_need_depth_three():
    with pytest.raises(ValueError):
        k_subgroup_indices(2)


def test_k_quotient_cyclic():
    for depth in (5, 6):
        assert k_quotient_cyclic_by_y(depth)


def test_k_is_normal_in_g():
    for depth in (4, 6):
        G = quotient_tree_group(GRIGORCHUK, depth)
        K = k_subgroup(depth)
        assert G.group.is_normal_subgroup(K.group)


def test_self_replicating():
    assert check_self_replicating(5, (0,))
    assert check_self_replicating(6, (1, 1))
    assert check_self_replicating(5, ())
    with pytest.raises(ValueError):
        check_self_replicating(3, (0, 1))


def test_pair_places_sections():
    a = GRIGORCHUK.generator("a", 3)
    p = pair(a, Portrait.identity(a.seq))
    assert p.section((0,)) == a and p.section((1,)).is_identity()
