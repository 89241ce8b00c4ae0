"""Self-similar groups given by wreath recursion, with the first Grigorchuk group built in.

A rule ``name -> (root, sections)`` defines the automorphism
``x w -> root(x) . sections[x](w)``: it permutes the children of the root by
``root`` and then acts below child ``x`` by the word ``sections[x]``.
Words multiply like functions, so ``"ab"`` applies ``b`` first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from . import perm as _perm
from .permgroup import PermGroup
from .portrait import Portrait
from .tree import DegreeSequence, Vertex
from .treegroup import TreeGroup


@dataclass(frozen=True)
class Word:
    letters: tuple = ()  # ((name, +1 | -1), ...)

    @classmethod
    def parse(cls, text) -> Word:
        """Parse ``"a b^-1 c"`` (space separated) or compact ``"ab"`` (one-letter names).

        ``""`` and ``"1"`` denote the identity.
        """
        if isinstance(text, Word):
            return text
        if not isinstance(text, str):
            return cls(tuple((str(n), int(e)) for n, e in text))
        text = text.strip()
        if " " in text:
            tokens = text.split()
        else:
            tokens = re.findall(r"[A-Za-z_](?:\^-?1)?|1|.", text)
        letters = []
        for tok in tokens:
            if tok == "1":
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?1))?", tok)
            if not m:
                raise ValueError(f"cannot parse word token {tok!r} in {text!r}")
            letters.append((m.group(1), int(m.group(2) or 1)))
        return cls(tuple(letters))

    def inverse(self) -> Word:
        return Word(tuple((n, -e) for n, e in reversed(self.letters)))

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(n if e == 1 else f"{n}^-1" for n, e in self.letters)


def _word_text(w: Word) -> str:
    if all(len(n) == 1 for n, _ in w.letters):
        return "".join(n if e == 1 else f"{n}^-1" for n, e in w.letters)
    return str(w)


@dataclass(frozen=True)
class RecursionTable:
    degree: int
    rules: tuple  # ((name, root_perm, (Word, ...)), ...)
    _by_name: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        by_name = {}
        for name, root, sections in self.rules:
            root = _perm.check(root, self.degree)
            if len(sections) != self.degree:
                raise ValueError(f"rule {name!r}: expected {self.degree} sections")
            by_name[name] = (root, tuple(Word.parse(s) for s in sections))
        for name, (_, sections) in by_name.items():
            for w in sections:
                for letter, _ in w.letters:
                    if letter not in by_name:
                        raise ValueError(f"rule {name!r} references undeclared generator {letter!r}")
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "rules", tuple((n, r, s) for n, (r, s) in by_name.items()))

    @classmethod
    def from_mapping(cls, degree: int, rules: Mapping[str, tuple]) -> RecursionTable:
        return cls(degree, tuple((name, root, tuple(secs)) for name, (root, secs) in rules.items()))

    @classmethod
    def from_json(cls, data: dict) -> RecursionTable:
        rules = {name: (r["root"], r["sections"]) for name, r in data["rules"].items()}
        return cls.from_mapping(int(data["degree"]), rules)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "rules": {
                name: {"root": list(root), "sections": [_word_text(w) for w in secs]}
                for name, root, secs in self.rules
            },
        }

    @property
    def names(self) -> tuple:
        return tuple(self._by_name)

    def rule(self, name: str) -> tuple:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def tree(self, depth: int) -> DegreeSequence:
        return DegreeSequence.constant(self.degree, depth)

    @lru_cache(maxsize=None)
    def generator(self, name: str, depth: int) -> Portrait:
        root, sections = self.rule(name)
        if depth == 0:
            return Portrait.identity(self.tree(0))
        return Portrait.from_sections(root, [self.evaluate(w, depth - 1) for w in sections])

    def evaluate(self, word, depth: int) -> Portrait:
        if depth < 0:
            raise ValueError("depth must be >= 0")
        word = Word.parse(word)
        out = Portrait.identity(self.tree(depth))
        for name, e in word.letters:
            g = self.generator(name, depth)
            out = out.compose(g if e == 1 else g.inverse())
        return out


def grigorchuk_table() -> RecursionTable:
    swap, ident = (1, 0), (0, 1)
    return RecursionTable.from_mapping(
        2,
        {
            "a": (swap, ("", "")),
            "b": (ident, ("a", "c")),
            "c": (ident, ("a", "d")),
            "d": (ident, ("", "b")),
        },
    )


GRIGORCHUK = grigorchuk_table()


def evaluate(table: RecursionTable, w, depth: int) -> Portrait:
    return table.evaluate(w, depth)


def quotient_tree_group(table: RecursionTable, depth: int) -> TreeGroup:
    """The group generated by the table, acting on the depth-``depth`` truncation."""
    seq = table.tree(depth)
    return TreeGroup.from_portraits(seq, [table.generator(n, depth) for n in table.names])


def quotient_group(table: RecursionTable, depth: int) -> PermGroup:
    return quotient_tree_group(table, depth).group


# -- the subgroup K = <x, (x,1), (1,x)> of the Grigorchuk group ---------------


def _x(depth: int) -> Portrait:
    if depth == 0:
        return Portrait.identity(GRIGORCHUK.tree(0))
    return Portrait.from_sections((0, 1), [GRIGORCHUK.evaluate("ca", depth - 1), GRIGORCHUK.evaluate("ac", depth - 1)])


def element_x(depth: int) -> Portrait:
    """``x = (ca, ac)``, equal to ``(ab)^2``; a derangement of ``V_2``."""
    if depth < 2:
        raise ValueError("element_x needs depth >= 2")
    return _x(depth)


def pair(left: Portrait, right: Portrait) -> Portrait:
    """The element ``(left, right)`` fixing both level-one vertices."""
    return Portrait.from_sections((0, 1), [left, right])


def k_generators(depth: int) -> list:
    if depth == 0:
        return []
    x, below = _x(depth), _x(depth - 1)
    one = Portrait.identity(below.seq)
    return [x, pair(below, one), pair(one, below)]


def k_subgroup(depth: int) -> TreeGroup:
    return TreeGroup.from_portraits(GRIGORCHUK.tree(depth), k_generators(depth))


def k1_subgroup(depth: int) -> TreeGroup:
    """``K x K`` at depth ``depth``: pairs of elements of ``K`` truncated one level up."""
    gens = []
    for g in k_generators(depth - 1):
        one = Portrait.identity(g.seq)
        gens += [pair(g, one), pair(one, g)]
    return TreeGroup.from_portraits(GRIGORCHUK.tree(depth), gens)


@dataclass
class KIndexReport:
    index_K_over_K1: int
    index_G1_over_K: int
    K_over_K1_stable_since: int  # first depth of the final constant run
    G1_over_K_stable_since: int
    max_depth: int
    table: list  # one dict per depth
    K_over_K1_cyclic_by_y: bool

    def stabilization_pair(self, which: str) -> tuple:
        since = self.K_over_K1_stable_since if which == "K/K1" else self.G1_over_K_stable_since
        return (since, since + 1)

    def to_json(self) -> dict:
        return {
            "index_K_over_K1": self.index_K_over_K1,
            "index_G1_over_K": self.index_G1_over_K,
            "K_over_K1_stabilized_at": list(self.stabilization_pair("K/K1")),
            "G1_over_K_stabilized_at": list(self.stabilization_pair("G1/K")),
            "max_depth": self.max_depth,
            "K_over_K1_cyclic_generated_by_(ab)^2": self.K_over_K1_cyclic_by_y,
            "per_depth": self.table,
        }


def _stable_since(values: list, depths: list) -> int | None:
    """First depth of the trailing run of equal values, if that run has length >= 2."""
    i = len(values) - 1
    while i > 0 and values[i - 1] == values[i]:
        i -= 1
    if i == len(values) - 1:
        return None
    return depths[i]


def k_subgroup_indices(depth: int) -> KIndexReport:
    """``|K : K x K|`` and ``|G : K|`` on the depth-``d`` quotients for ``d = 2..depth``.

    Early depths can agree by accident (``|K : K x K|`` reads 2 at depths 2 and
    3), so a value counts as stabilized only when it is constant from some
    depth through the largest computed depth, over at least two depths.
    """
    if depth < 3:
        raise ValueError("need depth >= 3 to observe two consecutive depths")
    rows = []
    for d in range(2, depth + 1):
        G = quotient_tree_group(GRIGORCHUK, d)
        K = k_subgroup(d)
        K1 = k1_subgroup(d)
        for g in K.generator_portraits():
            if not G.contains(g):
                raise AssertionError(f"K is not inside G at depth {d}")
        if not K1.group.is_subgroup_of(K.group):
            raise AssertionError(f"K x K is not inside K at depth {d}")
        oG, oK, oK1 = G.order(), K.order(), K1.order()
        rows.append(
            {"depth": d, "|G|": oG, "|K|": oK, "|KxK|": oK1, "K/K1": oK // oK1, "G1/K": oG // oK}
        )
    depths = [r["depth"] for r in rows]
    k_since = _stable_since([r["K/K1"] for r in rows], depths)
    g_since = _stable_since([r["G1/K"] for r in rows], depths)
    if k_since is None or g_since is None:
        raise RuntimeError(f"indices did not stabilize by depth {depth}; try a larger depth")
    return KIndexReport(
        index_K_over_K1=rows[-1]["K/K1"],
        index_G1_over_K=rows[-1]["G1/K"],
        K_over_K1_stable_since=k_since,
        G1_over_K_stable_since=g_since,
        max_depth=depth,
        table=rows,
        K_over_K1_cyclic_by_y=k_quotient_cyclic_by_y(depth),
    )


def k_quotient_cyclic_by_y(depth: int) -> bool:
    """Is ``K/(K x K)`` at this depth cyclic of order 4 generated by ``y = (ab)^2``?"""
    K = k_subgroup(depth)
    K1 = k1_subgroup(depth)
    if not K.group.is_normal_subgroup(K1.group):
        return False
    if K.order() // K1.order() != 4:
        return False
    y = GRIGORCHUK.evaluate("abab", depth)
    return K.contains(y) and not K1.contains(y.power(2)) and K1.contains(y.power(4))


def check_self_replicating(depth: int, v: Sequence[int]) -> bool:
    """Does every generator of ``K`` occur as the section at ``v`` of an element of ``K`` supported below ``v``?

    The witness for generator ``k`` is the element acting as ``k`` below ``v``
    and trivially elsewhere; it is tested for membership in ``K`` at this depth.
    """
    seq = GRIGORCHUK.tree(depth)
    v = seq.check_vertex(v)
    if len(v) + 2 > depth:
        raise ValueError("need depth >= level(v) + 2")
    K = k_subgroup(depth)
    return all(K.contains(Portrait.place(seq, v, k)) for k in k_generators(depth - len(v)))
