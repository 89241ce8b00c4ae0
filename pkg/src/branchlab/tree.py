"""Truncated spherically homogeneous rooted trees.

Vertices are plain tuples of child indices; the root is ``()``.  Levels are
ordered lexicographically, which makes the order on consecutive levels cohere
(children of a smaller vertex come before children of a larger one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, Sequence

Vertex = tuple  # tuple[int, ...]
ROOT: Vertex = ()


@dataclass(frozen=True)
class DegreeSequence:
    """Finite prefix of a degree sequence; level ``i`` vertices have ``degrees[i]`` children.

    The empty sequence describes the one-vertex tree.  It only shows up as the
    subtree below a leaf and as the depth-0 truncation.
    """

    degrees: tuple

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        if any(d < 2 for d in degrees):
            raise ValueError(f"every degree must be >= 2, got {list(degrees)}")
        object.__setattr__(self, "degrees", degrees)

    @classmethod
    def constant(cls, d: int, depth: int) -> DegreeSequence:
        return cls((d,) * depth)

    @classmethod
    def from_rule(cls, rule: Callable[[int], int], depth: int) -> DegreeSequence:
        return cls(tuple(rule(i) for i in range(depth)))

    @property
    def depth(self) -> int:
        return len(self.degrees)

    def extend(self, rule: Callable[[int], int], depth: int) -> DegreeSequence:
        """Extend the prefix to ``depth`` levels using ``rule(i)`` for the new levels."""
        if depth < self.depth:
            raise ValueError("extend cannot shorten a degree sequence")
        return DegreeSequence(self.degrees + tuple(rule(i) for i in range(self.depth, depth)))

    def prefix(self, m: int) -> DegreeSequence:
        if not 0 <= m <= self.depth:
            raise ValueError(f"prefix length {m} outside 0..{self.depth}")
        return DegreeSequence(self.degrees[:m])

    def tail(self, level: int) -> DegreeSequence:
        """Degree sequence of the subtree hanging below a level-``level`` vertex."""
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} outside 0..{self.depth}")
        return DegreeSequence(self.degrees[level:])

    def level_size(self, n: int) -> int:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        return math.prod(self.degrees[:n])

    def subtree_width(self, level: int, n: int) -> int:
        """Number of level-``n`` vertices below a single level-``level`` vertex."""
        return math.prod(self.degrees[level:n])

    def check_vertex(self, v: Sequence[int]) -> Vertex:
        v = tuple(int(i) for i in v)
        if len(v) > self.depth:
            raise ValueError(f"vertex {list(v)} is deeper than the tree (depth {self.depth})")
        for i, a in enumerate(v):
            if not 0 <= a < self.degrees[i]:
                raise ValueError(f"vertex {list(v)}: index {a} at level {i} exceeds degree {self.degrees[i]}")
        return v

    def index(self, v: Vertex) -> int:
        """Position of ``v`` inside its level (mixed-radix value of the word)."""
        i = 0
        for k, a in enumerate(v):
            i = i * self.degrees[k] + a
        return i

    def vertex(self, level: int, index: int) -> Vertex:
        """Inverse of :meth:`index`."""
        word = []
        for k in range(level - 1, -1, -1):
            index, a = divmod(index, self.degrees[k])
            word.append(a)
        if index:
            raise ValueError("index out of range for level")
        return tuple(reversed(word))

    def children(self, v: Vertex) -> list:
        v = self.check_vertex(v)
        if len(v) == self.depth:
            raise ValueError("leaf vertex")
        return [v + (a,) for a in range(self.degrees[len(v)])]

    def level_vertices(self, n: int) -> list:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        return list(product(*(range(d) for d in self.degrees[:n])))

    def vertices(self) -> Iterator[Vertex]:
        """All vertices, level by level."""
        for n in range(self.depth + 1):
            yield from self.level_vertices(n)

    def subtree_vertices(self, v: Vertex, n: int) -> list:
        """Level-``n`` vertices below ``v`` (contiguous in the level order)."""
        v = self.check_vertex(v)
        if n < len(v):
            return []
        return [v + w for w in product(*(range(d) for d in self.degrees[len(v):n]))]

    def subtree_slice(self, v: Vertex, n: int) -> range:
        """Index range inside level ``n`` of the vertices below ``v``."""
        width = self.subtree_width(len(v), n)
        start = self.index(v) * width
        return range(start, start + width)

    def rightmost_branch(self) -> list:
        branch = [ROOT]
        for d in self.degrees:
            branch.append(branch[-1] + (d - 1,))
        return branch

    def to_json(self) -> list:
        return list(self.degrees)


def children(seq: DegreeSequence, v: Vertex) -> list:
    return seq.children(v)


def level_vertices(seq: DegreeSequence, n: int) -> list:
    return seq.level_vertices(n)


def is_below(v: Sequence[int], w: Sequence[int]) -> bool:
    """True iff ``v`` is a prefix of ``w``, i.e. ``w`` lies in the subtree below ``v``."""
    return len(v) <= len(w) and tuple(w[: len(v)]) == tuple(v)


def rightmost_branch(seq: DegreeSequence) -> list:
    return seq.rightmost_branch()


def vertex_to_json(v: Vertex) -> list:
    return list(v)


def vertex_from_json(data) -> Vertex:
    if isinstance(data, str):
        data = [int(x) for x in data.replace(",", " ").split()]
    return tuple(int(x) for x in data)
