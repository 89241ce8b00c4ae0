"""Permutation groups acting on the leaves of a truncated rooted tree.

A depth-n tree automorphism is determined by what it does on ``V_n``, so a
group of portraits is stored as a :class:`PermGroup` on the leaf indices.
Stabilizers here are computed generically with pointwise stabilizers:
the rigid stabilizer of ``v`` fixes every leaf off the subtree below ``v``;
the level stabilizer of ``V_n`` is read off an extended action that also
permutes the level-``n`` vertices.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .permgroup import PermGroup
from .portrait import Portrait
from .tree import DegreeSequence, Vertex


class TreeGroup:
    def __init__(self, seq: DegreeSequence, group: PermGroup):
        if group.degree != seq.level_size(seq.depth):
            raise ValueError("group degree does not match the number of leaves")
        self.seq = seq
        self.group = group

    @classmethod
    def from_portraits(cls, seq: DegreeSequence, portraits: Iterable[Portrait]) -> TreeGroup:
        gens = []
        for p in portraits:
            if p.seq != seq:
                raise ValueError("portrait lives on a different tree")
            gens.append(p.level_permutation(seq.depth))
        return cls(seq, PermGroup(seq.level_size(seq.depth), gens))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.seq.degrees)}, {len(self.group.generators)} generators)"

    @property
    def depth(self) -> int:
        return self.seq.depth

    def order(self) -> int:
        return self.group.order()

    def portrait(self, g: Sequence[int]) -> Portrait:
        return Portrait.from_level_permutation(self.seq, g)

    def generator_portraits(self) -> list:
        return [self.portrait(g) for g in self.group.generators]

    def contains(self, p) -> bool:
        if isinstance(p, Portrait):
            if p.seq != self.seq:
                return False
            p = p.level_permutation(self.depth)
        return self.group.contains(p)

    __contains__ = contains

    def portraits(self, budget: int | None = None) -> list:
        """All elements as portraits, in canonical (sorted leaf-permutation) order."""
        return [self.portrait(tuple(int(x) for x in row)) for row in self.group.element_array(budget)]

    def subgroup(self, portraits: Iterable[Portrait]) -> TreeGroup:
        return TreeGroup.from_portraits(self.seq, portraits)

    def _wrap(self, group: PermGroup) -> TreeGroup:
        return TreeGroup(self.seq, group)

    def level_action(self, n: int) -> PermGroup:
        """Image of the group in ``Sym(V_n)``."""
        gens = [self.portrait(g).level_permutation(n) for g in self.group.generators]
        return PermGroup(self.seq.level_size(n), gens)

    def level_stabilizer(self, n: int) -> TreeGroup:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        if n == self.depth:
            return self._wrap(self.group.pointwise_stabilizer(range(self.group.degree)))
        leaves = self.group.degree
        size = self.seq.level_size(n)
        gens = []
        for g in self.group.generators:
            lvl = self.portrait(g).level_permutation(n)
            gens.append(tuple(g) + tuple(leaves + x for x in lvl))
        extended = PermGroup(leaves + size, gens)
        st = extended.pointwise_stabilizer(range(leaves, leaves + size))
        return self._wrap(PermGroup(leaves, [g[:leaves] for g in st.generators]))

    def rigid_stabilizer(self, v: Vertex) -> TreeGroup:
        v = self.seq.check_vertex(v)
        inside = self.seq.subtree_slice(v, self.depth)
        outside = [i for i in range(self.group.degree) if i not in inside]
        return self._wrap(self.group.pointwise_stabilizer(outside))

    def rigid_level_stabilizer(self, n: int) -> TreeGroup:
        gens = []
        for v in self.seq.level_vertices(n):
            gens.extend(self.rigid_stabilizer(v).group.generators)
        return self._wrap(PermGroup(self.group.degree, gens))

    def transporter(self, v: Vertex, w: Vertex) -> Portrait | None:
        """An element sending ``v`` to ``w``, built by BFS on the generators; ``None`` if none exists."""
        v, w = self.seq.check_vertex(v), self.seq.check_vertex(w)
        if len(v) != len(w):
            return None
        gens = self.generator_portraits()
        reached = {v: Portrait.identity(self.seq)}
        frontier = [v]
        while frontier and w not in reached:
            nxt = []
            for u in frontier:
                for g in gens:
                    img = g.act(u)
                    if img not in reached:
                        reached[img] = g.compose(reached[u])
                        nxt.append(img)
            frontier = nxt
        return reached.get(w)

    def centralizer(self, sub: TreeGroup, budget: int | None = None) -> list:
        """Elements commuting with every generator of ``sub``, by enumeration."""
        gens = [self.portrait(g) for g in sub.group.generators]
        return [g for g in self.portraits(budget) if all(g * s == s * g for s in gens)]

    def abelianization_order(self) -> int:
        return self.order() // self.group.derived_subgroup().order()

    def is_level_transitive(self, n: int) -> bool:
        return self.level_action(n).is_transitive()

    def is_spherically_transitive(self) -> bool:
        return all(self.is_level_transitive(n) for n in range(1, self.depth + 1))
