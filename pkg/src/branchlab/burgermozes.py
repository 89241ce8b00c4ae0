"""Legal colorings and the local-action condition on finite balls of the d-regular tree.

The ball ``B(o, r)`` is stored as a rooted tree around the centre: the centre
has ``d`` children and every other internal vertex ``d - 1``.  A vertex is its
path from the centre and an edge is named by its endpoint farther from the
centre.  The centre is the only vertex of eccentricity ``r`` in the ball, so
every graph automorphism of the ball fixes it; ball automorphisms are therefore
exactly the portraits of that rooted tree.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Mapping

from . import perm as _perm
from .config import BudgetExceeded, element_budget
from .permgroup import PermGroup
from .portrait import Portrait
from .tree import ROOT, DegreeSequence, Vertex
from .treegroup import TreeGroup
from .wreathtower import TowerSpec, build_tower


def ball_tree(d: int, r: int) -> DegreeSequence:
    if d < 3:
        raise ValueError("degree must be >= 3")
    if r < 1:
        raise ValueError("radius must be >= 1")
    return DegreeSequence((d,) + (d - 1,) * (r - 1))


@dataclass(frozen=True)
class ColoredBall:
    d: int
    radius: int
    colors: Mapping  # edge (= far endpoint) -> color in range(d)

    def __post_init__(self):
        seq = self.seq
        for v in seq.vertices():
            if v == ROOT:
                continue
            if v not in self.colors:
                raise ValueError(f"edge to {list(v)} has no color")
        for v in self.internal_vertices():
            seen = sorted(self.colors[e] for e in self.edges_at(v))
            if seen != list(range(self.d)):
                raise ValueError(f"coloring is not a bijection at vertex {list(v)}")

    @property
    def seq(self) -> DegreeSequence:
        return ball_tree(self.d, self.radius)

    @property
    def center(self) -> Vertex:
        return ROOT

    def vertices(self) -> list:
        return list(self.seq.vertices())

    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices())}

    def is_internal(self, v: Vertex) -> bool:
        return len(v) < self.radius

    def internal_vertices(self) -> list:
        return [v for v in self.seq.vertices() if self.is_internal(v)]

    def edges_at(self, v: Vertex) -> list:
        """Edges at ``v``: the edge toward the centre first (if any), then the child edges."""
        edges = [] if v == ROOT else [v]
        if self.is_internal(v):
            edges += self.seq.children(v)
        return edges

    def parent_color(self, v: Vertex):
        return None if v == ROOT else self.colors[v]

    def coloring_at(self, v: Vertex) -> dict:
        """``c_v``: edge at ``v`` -> color."""
        if not self.is_internal(v):
            raise ValueError("local action undefined: boundary vertex")
        return {e: self.colors[e] for e in self.edges_at(v)}

    def child_with_color(self, v: Vertex, color: int) -> Vertex:
        for e in self.seq.children(v):
            if self.colors[e] == color:
                return e
        raise ValueError(f"no child edge of color {color} at {list(v)}")

    def to_json(self) -> dict:
        idx = self.vertex_index()
        return {
            "d": self.d,
            "radius": self.radius,
            "vertices": [list(v) for v in self.vertices()],
            "edges": [[idx[v[:-1]], idx[v], self.colors[v]] for v in self.vertices() if v != ROOT],
        }

    @classmethod
    def from_json(cls, data: dict) -> ColoredBall:
        verts = [tuple(v) for v in data["vertices"]]
        colors = {verts[child]: int(c) for _, child, c in data["edges"]}
        return cls(int(data["d"]), int(data["radius"]), colors)


def make_legal_coloring(d: int, r: int, rng: random.Random | None = None) -> ColoredBall:
    """Canonical legal coloring, or a random one when ``rng`` is given.

    Canonical: the centre's edges get colors ``0..d-1`` in child order; a vertex
    whose edge toward the centre has color ``p`` gives its child edges the
    remaining colors in increasing order.
    """
    seq = ball_tree(d, r)
    colors = {}
    for v in seq.vertices():
        if len(v) == r:
            continue
        free = [c for c in range(d) if v == ROOT or c != colors[v]]
        if rng is not None:
            rng.shuffle(free)
        for child, c in zip(seq.children(v), free):
            colors[child] = c
    return ColoredBall(d, r, colors)


# -- automorphisms and local actions -----------------------------------------------


BallAutomorphism = Portrait


def vertex_permutation(ball: ColoredBall, g: BallAutomorphism) -> tuple:
    """``g`` as a permutation of all ball vertices (boundary included)."""
    idx = ball.vertex_index()
    return tuple(idx[g.act(v)] for v in ball.vertices())


def _edge_image(g: BallAutomorphism, e: Vertex) -> Vertex:
    return g.act(e)


def local_action(ball: ColoredBall, g: BallAutomorphism, v: Vertex) -> tuple:
    """``c_{g.v} o g_v o c_v^-1`` as a permutation of the colors."""
    v = ball.seq.check_vertex(v)
    gv = g.act(v)
    if not (ball.is_internal(v) and ball.is_internal(gv)):
        raise ValueError("local action undefined: boundary vertex")
    out = [0] * ball.d
    for e in ball.edges_at(v):
        out[ball.colors[e]] = ball.colors[_edge_image(g, e)]
    return _perm.check(out, ball.d)


def is_legal(ball: ColoredBall, g: BallAutomorphism, F: PermGroup) -> bool:
    return all(F.contains(local_action(ball, g, v)) for v in ball.internal_vertices())


def from_local_actions(ball: ColoredBall, local) -> BallAutomorphism:
    """The automorphism with local action ``local(v)`` at every internal ``v``.

    ``local(v)`` must send the color of the edge toward the centre at ``v`` to
    the corresponding color at the image of ``v``.
    """
    seq = ball.seq
    image = {ROOT: ROOT}
    labels = {}
    for v in seq.vertices():
        if not ball.is_internal(v):
            continue
        f = _perm.check(local(v), ball.d)
        gv = image[v]
        if v != ROOT and f[ball.colors[v]] != ball.colors[gv]:
            raise ValueError(f"local action at {list(v)} does not respect the edge toward the centre")
        perm = []
        for child in seq.children(v):
            target = ball.child_with_color(gv, f[ball.colors[child]])
            image[child] = target
            perm.append(target[-1])
        labels[v] = tuple(perm)
    return Portrait.from_mapping(seq, labels)


def stabilizer_generators(ball: ColoredBall, F: PermGroup) -> list:
    """Generators of the legal automorphisms fixing the centre.

    Each generator of ``F`` acts at the centre and is repeated at every vertex
    below (repeating is always a legal lift).  For each other internal vertex
    ``u`` with centre-ward color ``p``, each generator of ``Stab_F(p)`` acts at
    ``u`` and below ``u``, trivially elsewhere.
    """
    if F.degree != ball.d:
        raise ValueError("F must act on the d colors")
    gens = []
    for a in F.generators:
        gens.append(from_local_actions(ball, lambda v, a=a: a))
    ident = _perm.identity(ball.d)
    for u in ball.internal_vertices():
        if u == ROOT:
            continue
        H = F.point_stabilizer(ball.colors[u])
        for h in H.generators:
            gens.append(
                from_local_actions(ball, lambda v, h=h, u=u: h if v[: len(u)] == u else ident)
            )
    return gens


def predicted_stabilizer_order(ball: ColoredBall, F: PermGroup) -> int:
    """``|F|`` times ``|Stab_F(p_u)|`` over the non-centre internal vertices ``u``."""
    out = F.order()
    for u in ball.internal_vertices():
        if u != ROOT:
            out *= F.point_stabilizer(ball.colors[u]).order()
    return out


def legal_stabilizer(ball: ColoredBall, F: PermGroup) -> TreeGroup:
    """Legal centre-fixing automorphisms as a group of portraits of the ball tree."""
    gens = stabilizer_generators(ball, F)
    for g in gens:
        if not is_legal(ball, g, F):
            raise AssertionError("a constructed generator is not legal")
    return TreeGroup.from_portraits(ball.seq, gens)


def enumerate_stabilizer(ball: ColoredBall, F: PermGroup) -> PermGroup:
    """The legal stabilizer of the centre acting on all ball vertices.

    Built level by level from :func:`stabilizer_generators`; its order is
    certified by Schreier-Sims against the count ``|F| |H|^{N_r}``.  Nothing is
    enumerated, so the element budget does not apply (the exhaustive oracle
    :func:`legal_automorphisms_exhaustive` is budgeted).
    """
    predicted = predicted_stabilizer_order(ball, F)
    G = legal_stabilizer(ball, F)
    perms = [vertex_permutation(ball, g) for g in G.generator_portraits()]
    out = PermGroup(len(ball.vertices()), perms)
    if out.order() != predicted:
        raise AssertionError(f"stabilizer order {out.order()} differs from the count {predicted}")
    return out


def all_ball_automorphisms(ball: ColoredBall, budget: int | None = None) -> list:
    """Every automorphism of the ball (all fix the centre), by brute force over portraits."""
    seq = ball.seq
    total = 1
    for k, d in enumerate(seq.degrees):
        total *= math.factorial(d) ** seq.level_size(k)
    limit = element_budget(budget)
    if total > limit:
        raise BudgetExceeded(f"ball has {total} automorphisms, over the element budget {limit}")
    internal = [v for v in seq.vertices() if len(v) < seq.depth]
    choices = [list(itertools.permutations(range(seq.degrees[len(v)]))) for v in internal]
    return [Portrait.from_mapping(seq, dict(zip(internal, pick))) for pick in itertools.product(*choices)]


def legal_automorphisms_exhaustive(ball: ColoredBall, F: PermGroup, budget: int | None = None) -> list:
    return [g for g in all_ball_automorphisms(ball, budget) if is_legal(ball, g, F)]


def recoloring_map(source: ColoredBall, target: ColoredBall) -> BallAutomorphism:
    """``phi`` with ``target.colors[phi(e)] == source.colors[e]`` for every edge ``e``.

    Conjugation by ``phi`` carries the legal group of ``source`` onto that of ``target``.
    """
    if (source.d, source.radius) != (target.d, target.radius):
        raise ValueError("balls differ in shape")
    seq = source.seq
    image = {ROOT: ROOT}
    labels = {}
    for v in seq.vertices():
        if not source.is_internal(v):
            continue
        perm = []
        for child in seq.children(v):
            t = target.child_with_color(image[v], source.colors[child])
            image[child] = t
            perm.append(t[-1])
        labels[v] = tuple(perm)
    phi = Portrait.from_mapping(seq, labels)
    for e in seq.vertices():
        if e != ROOT and target.colors[phi.act(e)] != source.colors[e]:
            raise AssertionError("recoloring map does not carry colors across")
    return phi


# -- hypotheses and the tower picture ---------------------------------------------------


@dataclass
class HypothesisReport:
    degree: int
    perfect: bool
    two_transitive: bool
    generated_by_point_stabilizers: bool
    point_stabilizer_perfect: bool

    @property
    def degree_at_least_6(self) -> bool:
        return self.degree >= 6

    @property
    def all_true(self) -> bool:
        return (
            self.perfect
            and self.two_transitive
            and self.generated_by_point_stabilizers
            and self.point_stabilizer_perfect
            and self.degree_at_least_6
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "perfect": self.perfect,
            "two_transitive": self.two_transitive,
            "generated_by_point_stabilizers": self.generated_by_point_stabilizers,
            "point_stabilizer_perfect": self.point_stabilizer_perfect,
            "degree_at_least_6": self.degree_at_least_6,
            "all_true": self.all_true,
        }


def check_theorem_hypotheses(F: PermGroup) -> HypothesisReport:
    if F.degree < 3:
        raise ValueError("F must act on at least 3 points")
    return HypothesisReport(
        degree=F.degree,
        perfect=F.is_perfect(),
        two_transitive=F.is_k_transitive(2),
        generated_by_point_stabilizers=F.is_generated_by_point_stabilizers(),
        point_stabilizer_perfect=F.point_stabilizer(0).is_perfect(),
    )


def stabilizer_on_rest(F: PermGroup, point: int = 0) -> PermGroup:
    """``Stab_F(point)`` acting on the other ``d - 1`` points, relabelled in increasing order."""
    rest = [x for x in range(F.degree) if x != point]
    pos = {x: i for i, x in enumerate(rest)}
    H = F.point_stabilizer(point)
    return PermGroup(len(rest), [tuple(pos[h[x]] for x in rest) for h in H.generators])


def _level_profile(G: TreeGroup) -> list:
    out = []
    for n in range(1, G.depth + 1):
        act = G.level_action(n)
        out.append({"level": n, "orbit_sizes": sorted(len(o) for o in act.orbits()), "quotient_order": act.order()})
    return out


@dataclass
class TowerMatch:
    ball_order: int
    tower_order: int
    ball_levels: list
    tower_levels: list

    @property
    def matches(self) -> bool:
        return self.ball_order == self.tower_order and self.ball_levels == self.tower_levels

    def to_json(self) -> dict:
        return {
            "match": self.matches,
            "ball_stabilizer_order": self.ball_order,
            "tower_order": self.tower_order,
            "ball_levels": self.ball_levels,
            "tower_levels": self.tower_levels,
        }


def tower_match_report(F: PermGroup, depth: int, ball: ColoredBall | None = None) -> TowerMatch:
    """Compare the legal centre stabilizer on ``B(o, depth)`` with the tower ``[F, H, ..., H]``.

    Both sides are computed independently; they must agree in order and, level
    by level, in orbit sizes and in the order of the induced quotient.
    """
    ball = ball or make_legal_coloring(F.degree, depth)
    stab = legal_stabilizer(ball, F)
    H = stabilizer_on_rest(F)
    tower = build_tower(TowerSpec((F,) + (H,) * (depth - 1)))
    return TowerMatch(stab.order(), tower.order(), _level_profile(stab), _level_profile(tower))


def tower_match(F: PermGroup, depth: int) -> bool:
    return tower_match_report(F, depth).matches
