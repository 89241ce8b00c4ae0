"""Depth-n automorphisms of a spherically homogeneous rooted tree.

A :class:`Portrait` stores one permutation of child indices per internal
vertex, level by level in lexicographic vertex order.  The vertex ``v`` is sent
to the word whose ``i``-th letter is ``perm_at(v[:i])(v[i])``, so the label at
a vertex says where its children go.
Equality is structural, so portraits can live in sets and dictionaries.
"""

from __future__ import annotations

import random
from typing import Iterable, Mapping, Sequence

from . import perm as _perm
from .tree import ROOT, DegreeSequence, Vertex


class Portrait:
    __slots__ = ("seq", "perms", "_hash")

    def __init__(self, seq: DegreeSequence, perms: Sequence[Sequence[Sequence[int]]], *, _trusted=False):
        if not isinstance(seq, DegreeSequence):
            seq = DegreeSequence(tuple(seq))
        if not _trusted:
            if len(perms) != seq.depth:
                raise ValueError(f"expected {seq.depth} levels of permutations, got {len(perms)}")
            checked = []
            for k, level in enumerate(perms):
                d = seq.degrees[k]
                if len(level) != seq.level_size(k):
                    raise ValueError(f"level {k}: expected {seq.level_size(k)} vertices, got {len(level)}")
                checked.append(tuple(_perm.check(p, d) for p in level))
            perms = tuple(checked)
        self.seq = seq
        self.perms = perms
        self._hash = None

    # -- construction ---------------------------------------------------

    @classmethod
    def identity(cls, seq: DegreeSequence) -> Portrait:
        perms = tuple(
            (tuple(range(d)),) * seq.level_size(k) for k, d in enumerate(seq.degrees)
        )
        return cls(seq, perms, _trusted=True)

    @classmethod
    def from_mapping(cls, seq: DegreeSequence, labels: Mapping[Vertex, Sequence[int]]) -> Portrait:
        """Portrait with the given vertex permutations and identity elsewhere."""
        levels = [[tuple(range(d))] * seq.level_size(k) for k, d in enumerate(seq.degrees)]
        for v, p in labels.items():
            v = seq.check_vertex(v)
            if len(v) == seq.depth:
                raise ValueError(f"leaf {list(v)} carries no permutation")
            levels[len(v)][seq.index(v)] = _perm.check(p, seq.degrees[len(v)])
        return cls(seq, tuple(tuple(level) for level in levels), _trusted=True)

    @classmethod
    def from_sections(cls, root_perm: Sequence[int], sections: Sequence[Portrait]) -> Portrait:
        """The element ``x w -> root_perm(x) sections[x](w)`` (wreath recursion)."""
        root_perm = _perm.check(root_perm)
        if len(sections) != len(root_perm):
            raise ValueError("need one section per child")
        sub = sections[0].seq
        if any(s.seq != sub for s in sections):
            raise ValueError("sections must share a degree sequence")
        seq = DegreeSequence((len(root_perm),) + sub.degrees)
        perms = [(root_perm,)]
        for k in range(sub.depth):
            level = []
            for s in sections:
                level.extend(s.perms[k])
            perms.append(tuple(level))
        return cls(seq, tuple(perms), _trusted=True)

    @classmethod
    def place(cls, seq: DegreeSequence, v: Vertex, q: Portrait) -> Portrait:
        """Element acting as ``q`` on the subtree below ``v`` and trivially elsewhere."""
        v = seq.check_vertex(v)
        if q.seq != seq.tail(len(v)):
            raise ValueError("section does not fit below the vertex")
        ident = cls.identity(seq)
        perms = list(ident.perms)
        for k in range(len(v), seq.depth):
            block = seq.subtree_slice(v, k)
            level = list(perms[k])
            level[block.start : block.stop] = q.perms[k - len(v)]
            perms[k] = tuple(level)
        return cls(seq, tuple(perms), _trusted=True)

    @classmethod
    def from_level_permutation(cls, seq: DegreeSequence, image: Sequence[int]) -> Portrait:
        """Recover the portrait from its action on the leaves ``V_depth``."""
        if len(image) != seq.level_size(seq.depth):
            raise ValueError("leaf permutation has the wrong size")
        perms = []
        for k, d in enumerate(seq.degrees):
            below = seq.subtree_width(k + 1, seq.depth)
            level = []
            for i in range(seq.level_size(k)):
                first = i * d
                level.append(tuple(image[(first + c) * below] // below % d for c in range(d)))
            perms.append(tuple(level))
        out = cls(seq, tuple(perms), _trusted=True)
        if out.level_permutation(seq.depth) != tuple(image):
            raise ValueError("permutation of the leaves is not a tree automorphism")
        return out

    @classmethod
    def random(cls, seq: DegreeSequence, rng: random.Random | None = None) -> Portrait:
        rng = rng or random.Random()
        perms = []
        for k, d in enumerate(seq.degrees):
            level = []
            for _ in range(seq.level_size(k)):
                p = list(range(d))
                rng.shuffle(p)
                level.append(tuple(p))
            perms.append(tuple(level))
        return cls(seq, tuple(perms), _trusted=True)

    # -- basic protocol ---------------------------------------------------

    @property
    def depth(self) -> int:
        return self.seq.depth

    def perm_at(self, v: Vertex) -> tuple:
        return self.perms[len(v)][self.seq.index(v)]

    def labels(self) -> dict:
        """Non-identity vertex permutations keyed by vertex."""
        out = {}
        for k, level in enumerate(self.perms):
            for i, p in enumerate(level):
                if not _perm.is_identity(p):
                    out[self.seq.vertex(k, i)] = p
        return out

    def __eq__(self, other):
        if not isinstance(other, Portrait):
            return NotImplemented
        return self.seq == other.seq and self.perms == other.perms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.seq.degrees, self.perms))
        return self._hash

    def __mul__(self, other: Portrait) -> Portrait:
        return self.compose(other)

    def __repr__(self):
        labels = {",".join(map(str, v)): p for v, p in self.labels().items()}
        return f"Portrait({list(self.seq.degrees)}, {labels})"

    def is_identity(self) -> bool:
        return all(_perm.is_identity(p) for level in self.perms for p in level)

    # -- action -----------------------------------------------------------

    def level_permutation(self, n: int) -> tuple:
        """Induced permutation of the level ``V_n`` (as indices in level order)."""
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        images = [0]
        for k in range(n):
            d = self.seq.degrees[k]
            level = self.perms[k]
            nxt = [0] * (len(images) * d)
            for i, j in enumerate(images):
                p = level[i]
                si, sj = i * d, j * d
                for c in range(d):
                    nxt[si + c] = sj + p[c]
            images = nxt
        return tuple(images)

    def act(self, v: Sequence[int]) -> Vertex:
        v = self.seq.check_vertex(v)
        out = []
        for k, a in enumerate(v):
            out.append(self.perms[k][self.seq.index(v[:k])][a])
        return tuple(out)

    # -- group operations -------------------------------------------------

    def compose(self, other: Portrait) -> Portrait:
        """``self o other``: apply ``other`` first."""
        if self.seq != other.seq:
            raise ValueError(
                f"degree sequences differ: {list(self.seq.degrees)} vs {list(other.seq.degrees)}"
            )
        perms = []
        images = [0]
        for k in range(self.depth):
            d = self.seq.degrees[k]
            mine, theirs = self.perms[k], other.perms[k]
            level = []
            nxt = [0] * (len(images) * d)
            for i, j in enumerate(images):
                q = theirs[i]
                p = mine[j]
                level.append(tuple(p[c] for c in q))
                si, sj = i * d, j * d
                for c in range(d):
                    nxt[si + c] = sj + q[c]
            perms.append(tuple(level))
            images = nxt
        return Portrait(self.seq, tuple(perms), _trusted=True)

    def inverse(self) -> Portrait:
        perms = []
        images = [0]
        for k in range(self.depth):
            d = self.seq.degrees[k]
            level_in = self.perms[k]
            level = [None] * len(level_in)
            nxt = [0] * (len(images) * d)
            for i, j in enumerate(images):
                p = level_in[i]
                level[j] = _perm.inverse(p)
                si, sj = i * d, j * d
                for c in range(d):
                    nxt[si + c] = sj + p[c]
            perms.append(tuple(level))
            images = nxt
        return Portrait(self.seq, tuple(perms), _trusted=True)

    def power(self, k: int) -> Portrait:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Portrait.identity(self.seq)
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return result

    def order(self) -> int:
        return _perm.order(self.level_permutation(self.depth))

    def section_at(self, v: Sequence[int]) -> Portrait:
        """Labels of the subtree below ``v``, re-rooted; ``v`` need not be fixed."""
        v = self.seq.check_vertex(v)
        tail = self.seq.tail(len(v))
        perms = []
        for k in range(len(v), self.depth):
            block = self.seq.subtree_slice(v, k)
            perms.append(self.perms[k][block.start : block.stop])
        return Portrait(tail, tuple(perms), _trusted=True)

    def section(self, v: Sequence[int]) -> Portrait:
        v = self.seq.check_vertex(v)
        if self.act(v) != v:
            raise ValueError(f"vertex not fixed: {list(v)}")
        return self.section_at(v)

    def support_level(self, n: int) -> set:
        images = self.level_permutation(n)
        return {self.seq.vertex(n, i) for i, j in enumerate(images) if i != j}

    def is_derangement_of_level(self, n: int) -> bool:
        images = self.level_permutation(n)
        return all(i != j for i, j in enumerate(images))

    def fixes_outside(self, v: Vertex) -> bool:
        """True iff the element acts trivially off the subtree below ``v``."""
        leaves = self.level_permutation(self.depth)
        inside = self.seq.subtree_slice(v, self.depth)
        return all(i == j for i, j in enumerate(leaves) if i not in inside)

    def truncate(self, m: int) -> Portrait:
        if not 0 <= m <= self.depth:
            raise ValueError(f"cannot truncate depth-{self.depth} portrait to depth {m}")
        return Portrait(self.seq.prefix(m), self.perms[:m], _trusted=True)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "degrees": list(self.seq.degrees),
            "perms": {",".join(map(str, v)): list(p) for v, p in self.labels().items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> Portrait:
        seq = DegreeSequence(tuple(data["degrees"]))
        labels = {}
        for key, p in data.get("perms", {}).items():
            v = tuple(int(x) for x in key.split(",")) if key else ROOT
            labels[v] = p
        return cls.from_mapping(seq, labels)


def identity(seq: DegreeSequence) -> Portrait:
    return Portrait.identity(seq)


def act(p: Portrait, v: Sequence[int]) -> Vertex:
    return p.act(v)


def compose(p: Portrait, q: Portrait) -> Portrait:
    return p.compose(q)


def invert(p: Portrait) -> Portrait:
    return p.inverse()


def section(p: Portrait, v: Sequence[int]) -> Portrait:
    return p.section(v)


def support_level(p: Portrait, n: int) -> set:
    return p.support_level(n)


def is_derangement_of_level(p: Portrait, n: int) -> bool:
    return p.is_derangement_of_level(n)


def truncate(p: Portrait, m: int) -> Portrait:
    return p.truncate(m)


def commutator(g: Portrait, h: Portrait) -> Portrait:
    return g.compose(h).compose(g.inverse()).compose(h.inverse())


def product(items: Iterable[Portrait], seq: DegreeSequence) -> Portrait:
    out = Portrait.identity(seq)
    for p in items:
        out = out.compose(p)
    return out
