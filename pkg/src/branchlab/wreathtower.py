"""Finite truncations of iterated wreath products ``W((A_i, X_i))``.

The tower with factors ``A_0, ..., A_{n-1}`` acts on the depth-``n`` tree with
``alpha(i) = |X_i|``: every vertex of ``V_i`` may permute its children by any
element of ``A_i``, independently of every other vertex.  Stabilizers are
built structurally from these placed generators; the generic
:class:`TreeGroup` filters serve as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import perm as _perm
from .config import element_budget
from .permgroup import PermGroup, commutator_width_profile
from .portrait import Portrait
from .tree import DegreeSequence, Vertex, is_below
from .treegroup import TreeGroup


# -- one wreath step -----------------------------------------------------------


def wreath_act(f, a: Sequence[int], point: tuple) -> tuple:
    """``(f, a).(x, y) = (a.x, f(a.x).y)``.

    ``f`` maps points of ``X`` to permutations of ``Y``; a sequence indexed by
    ``X`` or a callable both work.
    """
    x, y = point
    if not 0 <= x < len(a):
        raise ValueError(f"point {x} not in the top domain of size {len(a)}")
    ax = a[x]
    b = f(ax) if callable(f) else f[ax]
    if not 0 <= y < len(b):
        raise ValueError(f"point {y} not in the bottom domain of size {len(b)}")
    return ax, b[y]


def wreath_element(f, a: Sequence[int], size_y: int) -> tuple:
    """The permutation of ``X x Y`` (flattened as ``x * |Y| + y``) given by ``(f, a)``."""
    out = [0] * (len(a) * size_y)
    for x in range(len(a)):
        for y in range(size_y):
            x2, y2 = wreath_act(f, a, (x, y))
            out[x * size_y + y] = x2 * size_y + y2
    return tuple(out)


def wreath_product(B: PermGroup, A: PermGroup) -> PermGroup:
    """``(B, Y) wr (A, X)`` acting on ``X x Y``; ``A`` on top."""
    nx, ny = A.degree, B.degree
    ident_y = _perm.identity(ny)
    gens = [wreath_element([ident_y] * nx, a, ny) for a in A.generators]
    ident_x = _perm.identity(nx)
    for b in B.generators:
        for x in range(nx):
            f = [ident_y] * nx
            f[x] = b
            gens.append(wreath_element(f, ident_x, ny))
    return PermGroup(nx * ny, gens)


# -- towers ----------------------------------------------------------------------


@dataclass(frozen=True)
class TowerSpec:
    factors: tuple  # PermGroup per level, top first

    def __post_init__(self):
        factors = tuple(PermGroup.parse(f) for f in self.factors)
        if not factors:
            raise ValueError("a tower needs at least one factor")
        for i, A in enumerate(factors):
            if A.degree < 2:
                raise ValueError(f"factor {i} acts on {A.degree} point(s); need at least 2")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors) -> TowerSpec:
        return cls(tuple(factors))

    @classmethod
    def from_json(cls, data) -> TowerSpec:
        if isinstance(data, dict):
            data = data["factors"]
        return cls(tuple(PermGroup.parse(f) for f in data))

    def to_json(self) -> dict:
        return {"factors": [f.name if f.name else f.to_json() for f in self.factors]}

    @property
    def depth(self) -> int:
        return len(self.factors)

    @property
    def seq(self) -> DegreeSequence:
        return DegreeSequence(tuple(A.degree for A in self.factors))

    def tail(self, n: int) -> TowerSpec:
        """Factors from level ``n`` down; the spec of ``rist(v)`` for ``v`` in ``V_n``."""
        if not 0 <= n < self.depth:
            raise ValueError(f"no factors below level {n}")
        return TowerSpec(self.factors[n:])

    def prefix(self, m: int) -> TowerSpec:
        if not 1 <= m <= self.depth:
            raise ValueError(f"cannot truncate a depth-{self.depth} tower to depth {m}")
        return TowerSpec(self.factors[:m])

    def predicted_order(self) -> int:
        seq = self.seq
        return math.prod(A.order() ** seq.level_size(i) for i, A in enumerate(self.factors))

    def intransitive_levels(self) -> list:
        return [i for i, A in enumerate(self.factors) if not A.is_transitive()]

    def check(self, *, transitive: bool = True, perfect: bool = False):
        """Raise unless every factor is transitive (and perfect, when asked)."""
        for i, A in enumerate(self.factors):
            if transitive and not A.is_transitive():
                raise ValueError(f"factor {i} is not transitive")
            if perfect and not A.is_perfect():
                raise ValueError(f"factor {i} is not perfect")


def _placed(seq: DegreeSequence, factors, levels, below: Vertex = ()) -> list:
    gens = []
    for i in levels:
        for v in seq.level_vertices(i):
            if not is_below(below, v):
                continue
            for a in factors[i].generators:
                gens.append(Portrait.from_mapping(seq, {v: a}))
    return gens


class TowerGroup(TreeGroup):
    """The depth-``n`` truncation of ``W((A_i, X_i))`` as a group of tree automorphisms."""

    def __init__(self, spec: TowerSpec):
        self.spec = spec
        seq = spec.seq
        gens = _placed(seq, spec.factors, range(spec.depth))
        base = TreeGroup.from_portraits(seq, gens)
        super().__init__(seq, base.group)

    def _from_portraits(self, portraits) -> TreeGroup:
        return TreeGroup.from_portraits(self.seq, portraits)

    def level_stabilizer(self, n: int) -> TreeGroup:
        if not 0 <= n <= self.depth:
            raise ValueError(f"level {n} outside 0..{self.depth}")
        return self._from_portraits(_placed(self.seq, self.spec.factors, range(n, self.depth)))

    def rigid_stabilizer(self, v: Vertex) -> TreeGroup:
        v = self.seq.check_vertex(v)
        return self._from_portraits(_placed(self.seq, self.spec.factors, range(len(v), self.depth), v))

    def rigid_level_stabilizer(self, n: int) -> TreeGroup:
        # the placed generators below V_n are exactly the union over v in V_n
        return self.level_stabilizer(n)

    def rist_order(self, n: int) -> int:
        """Order of ``rist(v)`` for ``v`` in ``V_n``, from the tail tower."""
        if n == self.depth:
            return 1
        return self.spec.tail(n).predicted_order()


def build_tower(spec: TowerSpec | Sequence, budget: int | None = None, *, check_order: bool = True) -> TowerGroup:
    """Realize the tower on ``V_depth``.

    The order is certified by Schreier-Sims against the product formula, so the
    element budget only matters when elements are later enumerated.
    """
    if not isinstance(spec, TowerSpec):
        spec = TowerSpec(tuple(spec))
    G = TowerGroup(spec)
    if check_order and G.order() != spec.predicted_order():
        raise AssertionError("tower order disagrees with the product formula")
    return G


def predicted_order(spec: TowerSpec) -> int:
    return spec.predicted_order()


def tower_by_folding(spec: TowerSpec) -> PermGroup:
    """The same tower as an iterated :func:`wreath_product`, bottom factors added one at a time."""
    W = spec.factors[0]
    for A in spec.factors[1:]:
        W = wreath_product(A, W)
    return W


def level_stabilizer(G: TowerGroup, n: int) -> TreeGroup:
    return G.level_stabilizer(n)


def rigid_stabilizer(G: TowerGroup, v: Vertex) -> TreeGroup:
    return G.rigid_stabilizer(v)


def rigid_level_stabilizer(G: TowerGroup, n: int) -> TreeGroup:
    return G.rigid_level_stabilizer(n)


def locally_has_derangements_witness(G: TowerGroup, n: int) -> tuple:
    """``(n + 1, z)`` with ``z`` in ``rist(n)`` moving every vertex of ``V_{n+1}``.

    ``z`` puts the same derangement of ``X_n`` at every vertex of ``V_n``.
    """
    if not 0 <= n < G.depth:
        raise ValueError(f"need 0 <= n < {G.depth}")
    bad = G.spec.intransitive_levels()
    if bad:
        raise ValueError(f"factor {bad[0]} is intransitive, so it need not contain a derangement")
    x = G.spec.factors[n].find_derangement()
    if x is None:
        raise AssertionError(f"transitive factor {n} has no derangement")
    z = Portrait.from_mapping(G.seq, {v: x for v in G.seq.level_vertices(n)})
    if not z.is_derangement_of_level(n + 1):
        raise AssertionError("witness is not a derangement")
    if not G.rigid_level_stabilizer(n).contains(z):
        raise AssertionError("witness escaped the rigid level stabilizer")
    return n + 1, z


def check_sji_criterion(G: TowerGroup, n: int) -> bool:
    """Is ``rist(n)`` perfect, i.e. does its derived subgroup have index 1?"""
    return sji_report(G, n)["perfect"]


def sji_report(G: TowerGroup, n: int) -> dict:
    rist = G.rigid_level_stabilizer(n)
    order = rist.order()
    derived = rist.group.derived_subgroup().order()
    return {"level": n, "rist_order": order, "derived_order": derived, "index": order // derived, "perfect": order == derived}


def conjugating_element(G: TreeGroup, v: Vertex, w: Vertex) -> Portrait:
    """``g`` with ``g.v = w`` and ``g rist(v) g^-1 = rist(w)``, checked on generators and orders."""
    g = G.transporter(v, w)
    if g is None:
        raise ValueError(f"{list(v)} and {list(w)} are in different orbits")
    rv, rw = G.rigid_stabilizer(v), G.rigid_stabilizer(w)
    ginv = g.inverse()
    for r in rv.generator_portraits():
        if not rw.contains(g * r * ginv):
            raise AssertionError("conjugate of rist(v) is not inside rist(w)")
    if rv.order() != rw.order():
        raise AssertionError("rigid stabilizers of the same level differ in order")
    return g


def centralizer_fixes_subtree(G: TreeGroup, v: Vertex, budget: int | None = None) -> bool:
    """Brute force: every element centralizing ``rist(v)`` fixes the subtree below ``v``.

    Only vertices above the leaves are checked.  A leaf carries a trivial
    rigid stabilizer in the truncation, and the centre of ``rist(v)`` can
    genuinely move leaves (already for ``[Sym(2)] * 2``).
    """
    v = G.seq.check_vertex(v)
    rist = G.rigid_stabilizer(v)
    for g in G.centralizer(rist, budget):
        for k in range(len(v), G.depth):
            for u in G.seq.subtree_vertices(v, k):
                if g.act(u) != u:
                    return False
    return True


@dataclass
class WidthSurvey:
    """Commutator widths of the truncations and rigid stabilizers that fit the budget."""

    rows: list  # {"object", "order", "width"}
    skipped: list  # {"object", "order"}

    @property
    def bound(self) -> int | None:
        return max((r["width"] for r in self.rows), default=None)

    def to_json(self) -> dict:
        return {"bound_on_computed": self.bound, "computed": self.rows, "skipped": self.skipped}


def commutator_width_survey(spec: TowerSpec, budget: int | None = None) -> WidthSurvey:
    """Brute-force widths of every truncation ``W_m`` and every ``rist(v)`` inside it.

    ``rist(v)`` for ``v`` in ``V_n`` of ``W_m`` is the tail tower of factors
    ``n .. m-1``, so the distinct objects are the contiguous factor windows.
    Objects whose order exceeds the element budget are listed as skipped.
    """
    limit = element_budget(budget)
    rows, skipped = [], []
    seen = {}
    for m in range(1, spec.depth + 1):
        for n in range(m):
            window = TowerSpec(spec.factors[n:m])
            label = f"W_{m}" if n == 0 else f"rist(v), v in V_{n}, of W_{m}"
            order = window.predicted_order()
            if order > limit:
                skipped.append({"object": label, "order": order})
                continue
            key = tuple((f.degree, f.generators) for f in window.factors)
            if key not in seen:
                seen[key] = commutator_width_profile(build_tower(window).group, limit)["width"]
            rows.append({"object": label, "order": order, "width": seen[key]})
    return WidthSurvey(rows, skipped)
