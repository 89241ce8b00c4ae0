"""Checkable replays of constructive arguments: commutator trick, fullness,
the diagonal search, commutator containment in ``A^{10k}``, and derangements
in the Grigorchuk group.

Every search returns a witness object that re-verifies itself and serializes
to JSON, so a failing run can be replayed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import perm as _perm
from .config import BudgetExceeded, element_budget
from .permgroup import PermGroup, commutator_width_profile
from .portrait import Portrait
from .selfsimilar import GRIGORCHUK, _x, k_subgroup, quotient_tree_group
from .tree import DegreeSequence, Vertex, vertex_to_json
from .treegroup import TreeGroup


# -- uniform group operations on tuples and portraits ---------------------------


def _mul(p, q):
    return p.compose(q) if isinstance(p, Portrait) else _perm.compose(p, q)


def _inv(p):
    return p.inverse() if isinstance(p, Portrait) else _perm.inverse(p)


def _one(p):
    return Portrait.identity(p.seq) if isinstance(p, Portrait) else _perm.identity(len(p))


def _comm(g, h):
    return _mul(_mul(g, h), _mul(_inv(g), _inv(h)))


def _to_json(p):
    return p.to_json() if isinstance(p, Portrait) else list(p)


def _from_json(data):
    return Portrait.from_json(data) if isinstance(data, dict) else tuple(data)


# -- commutator trick -------------------------------------------------------------


def _support(p, level: int | None) -> set:
    """Support as a set of points; for portraits, the vertices of ``level`` whose subtree
    contains a moved leaf (so disjoint supports imply commuting elements)."""
    if not isinstance(p, Portrait):
        return _perm.support(p)
    seq = p.seq
    level = seq.depth if level is None else level
    leaves = p.level_permutation(seq.depth)
    width = seq.subtree_width(level, seq.depth)
    return {seq.vertex(level, i // width) for i, j in enumerate(leaves) if i != j}


def _image(p, point, level):
    if not isinstance(p, Portrait):
        return p[point]
    return p.act(point)


@dataclass
class CommutatorWitness:
    tau: object
    sigma1: object
    sigma2: object
    conjugators: tuple  # four (g, +1 | -1) pairs
    target: object

    def product(self):
        out = _one(self.tau)
        for g, e in self.conjugators:
            t = self.tau if e == 1 else _inv(self.tau)
            out = _mul(out, _mul(_mul(g, t), _inv(g)))
        return out

    def verify(self) -> bool:
        return (
            len(self.conjugators) == 4
            and self.target == _comm(self.sigma1, self.sigma2)
            and self.product() == self.target
        )

    def to_json(self) -> dict:
        return {
            "tau": _to_json(self.tau),
            "sigma1": _to_json(self.sigma1),
            "sigma2": _to_json(self.sigma2),
            "conjugators": [{"g": _to_json(g), "e": e} for g, e in self.conjugators],
            "target": _to_json(self.target),
        }

    @classmethod
    def from_json(cls, data: dict) -> CommutatorWitness:
        return cls(
            _from_json(data["tau"]),
            _from_json(data["sigma1"]),
            _from_json(data["sigma2"]),
            tuple((_from_json(c["g"]), int(c["e"])) for c in data["conjugators"]),
            _from_json(data["target"]),
        )


class HypothesisError(ValueError):
    pass


def commutator_trick(tau, sigma1, sigma2, level: int | None = None) -> CommutatorWitness:
    """Write ``[sigma1, sigma2]`` as a product of four conjugates of ``tau^{+-1}``.

    Needs ``tau(supp sigma1)`` disjoint from ``supp sigma1 | supp sigma2``.  For
    portraits the supports are read on ``level`` (default: the leaves).
    """
    s1, s2 = _support(sigma1, level), _support(sigma2, level)
    for p in sorted(s1):
        q = _image(tau, p, level)
        if q in s1 or q in s2:
            shown = list(p) if isinstance(p, tuple) else p
            raise HypothesisError(f"tau sends support point {shown} of sigma1 into the supports")
    one = _one(tau)
    conj = ((sigma1, 1), (one, -1), (sigma2, 1), (_mul(sigma2, sigma1), -1))
    w = CommutatorWitness(tau, sigma1, sigma2, conj, _comm(sigma1, sigma2))
    if not w.verify():
        raise AssertionError("four-conjugate identity failed; supports are not disjoint on the leaves")
    return w


def random_trick_instance(rng: random.Random, depth: int, max_degree: int = 3) -> tuple:
    """``(tau, sigma1, sigma2)`` on a random tree satisfying the hypothesis.

    ``sigma1, sigma2`` live below a random vertex ``v`` and ``tau`` moves ``v``.
    """
    seq = DegreeSequence(tuple(rng.randint(2, max_degree) for _ in range(depth)))
    level = rng.randint(1, depth)
    v = seq.vertex(level, rng.randrange(seq.level_size(level)))
    tail = seq.tail(level)
    s1 = Portrait.place(seq, v, Portrait.random(tail, rng))
    s2 = Portrait.place(seq, v, Portrait.random(tail, rng))
    while True:
        tau = Portrait.random(seq, rng)
        if tau.act(v) != v:
            return tau, s1, s2


# -- fullness -----------------------------------------------------------------------


def _matches(a: Portrait, r: Portrait, v: Vertex) -> bool:
    return a.act(v) == v and a.section_at(v) == r.section_at(v)


@dataclass
class FullnessCertificate:
    vertex: Vertex
    pairs: list  # (r in rist(v), a in A) with equal restriction to the subtree below v

    full = True

    def verify(self) -> bool:
        return all(_matches(a, r, self.vertex) for r, a in self.pairs)

    def to_json(self) -> dict:
        return {
            "full": True,
            "vertex": vertex_to_json(self.vertex),
            "pairs": [{"rist": r.to_json(), "match": a.to_json()} for r, a in self.pairs],
        }


@dataclass
class Refutation:
    vertex: Vertex
    element: Portrait  # in rist(v), matched by nothing in A

    full = False

    def verify(self, A: Iterable[Portrait]) -> bool:
        return not any(_matches(a, self.element, self.vertex) for a in A)

    def to_json(self) -> dict:
        return {"full": False, "vertex": vertex_to_json(self.vertex), "unmatched": self.element.to_json()}


def is_full_above(A: Iterable[Portrait], v: Vertex, ambient: TreeGroup, budget: int | None = None):
    """Certificate that ``A`` realizes every element of ``rist(v)`` below ``v``, or a refutation."""
    v = ambient.seq.check_vertex(v)
    by_section = {}
    for a in A:
        if a.act(v) == v:
            by_section.setdefault(a.section_at(v), a)
    pairs = []
    for r in ambient.rigid_stabilizer(v).portraits(budget):
        a = by_section.get(r.section_at(v))
        if a is None:
            return Refutation(v, r)
        pairs.append((r, a))
    return FullnessCertificate(v, pairs)


# -- diagonalization -----------------------------------------------------------------


def diagonal_candidates(seq: DegreeSequence, w: Vertex) -> list:
    """``v_k``: the first child of ``w_k``, where ``w_0 = w`` and ``w_{k+1}`` is the last child of ``w_k``."""
    w = seq.check_vertex(w)
    out = []
    while len(w) < seq.depth:
        kids = seq.children(w)
        out.append(kids[0])
        w = kids[-1]
    return out


@dataclass
class DiagonalResult:
    index: int
    vertex: Vertex
    certificate: FullnessCertificate

    def to_json(self) -> dict:
        return {"index": self.index, "vertex": vertex_to_json(self.vertex), "certificate": self.certificate.to_json()}


def diagonalization_search(family: Sequence[Iterable[Portrait]], w: Vertex, ambient: TreeGroup | None = None, budget: int | None = None) -> DiagonalResult:
    """First ``n`` with ``family[n]`` full above ``v_n`` along the rightmost branch below ``w``.

    The union of the family must be the ambient group.  If the ambient group
    is not given, the group generated by the union is used.  With at most as
    many sets as candidate vertices a hit is guaranteed: otherwise the product
    of the refuting elements would lie in no member of the family.
    """
    family = [list(A) for A in family]
    union = {a for A in family for a in A}
    if not union:
        raise ValueError("family is empty")
    seq = next(iter(union)).seq
    if ambient is None:
        ambient = TreeGroup.from_portraits(seq, union)
    if len(union) != ambient.order() or not all(ambient.contains(a) for a in union):
        raise ValueError("family does not cover the ambient group")
    candidates = diagonal_candidates(seq, w)
    for n in range(min(len(family), len(candidates))):
        cert = is_full_above(family[n], candidates[n], ambient, budget)
        if cert.full:
            return DiagonalResult(n, candidates[n], cert)
    if len(family) <= len(candidates):
        raise AssertionError("diagonal search failed on an exact cover")
    raise ValueError(f"{len(family)} sets but only {len(candidates)} candidate vertices below {list(w)}")


def random_cover(elements: Sequence[Portrait], parts: int, rng: random.Random) -> list:
    """Randomly split ``elements`` into ``parts`` sets (some may be empty)."""
    family = [[] for _ in range(parts)]
    for g in elements:
        family[rng.randrange(parts)].append(g)
    return family


# -- product sets ----------------------------------------------------------------------


def _power_sets(A: Sequence[Portrait], ambient: TreeGroup, budget: int | None = None):
    """Yield ``A^0 = {1}, A^1, A^2, ...`` as sets of leaf permutations.

    Once a power repeats, the sequence is constant from there on (this always
    happens when ``A`` is a subgroup or contains 1), and the generator stops
    growing it.
    """
    limit = element_budget(budget)
    n = ambient.group.degree
    gens = list(dict.fromkeys(a.level_permutation(ambient.depth) for a in A))
    one = _perm.identity(n)
    current = {one}
    yield current
    if not gens:
        while True:
            yield set()
    if len(gens) == PermGroup(n, gens).order():
        # A is a subgroup: every positive power is A itself
        closed = set(gens)
        while True:
            yield closed
    monotone = one in gens
    frontier = current
    while True:
        if len(frontier) * len(gens) > limit:
            raise BudgetExceeded(f"product set exceeds the element budget {limit}")
        grown = {_perm.compose(p, g) for p in frontier for g in gens}
        if monotone:
            nxt = current | grown
            frontier = grown - current
        else:
            nxt = grown
            frontier = grown
        if nxt == current:
            while True:
                yield current
        current = nxt
        yield current


def _product_power(A: Sequence[Portrait], m: int, ambient: TreeGroup, budget: int | None = None) -> set:
    """The set ``A^m`` as leaf permutations (``A^0 = {1}``)."""
    for k, P in enumerate(_power_sets(A, ambient, budget)):
        if k == m:
            return P


def _symmetrized(A: Iterable[Portrait]) -> list:
    out = dict.fromkeys(A)
    for a in list(out):
        out.setdefault(a.inverse())
    return list(out)


def syndetic_square_full(A: Iterable[Portrait], translates: Sequence[Portrait], ambient: TreeGroup, w: Vertex = (), budget: int | None = None) -> FullnessCertificate:
    """Finite form of: if translates of a symmetric ``A`` cover the group, ``A^2`` is full above some ``v >= w``."""
    A = _symmetrized(A)
    family = [[t * a for a in A] for t in translates]
    found = diagonalization_search(family, w, ambient, budget)
    square = {a * b for a in A for b in A}
    cert = is_full_above(square, found.vertex, ambient, budget)
    if not cert.full:
        raise AssertionError("A^2 is not full above the vertex found for a translate")
    return cert


# -- commutators inside A^{10k} -----------------------------------------------------


@dataclass
class ContainmentResult:
    vertex: Vertex  # w
    x: Portrait
    width: int  # k = cw(rist(w))
    bound: int  # 10k
    letters: int  # letters per commutator in the replayed identity
    sharpest_power: int | None  # least m with every commutator of rist(w) in A^m
    commutators_checked: int
    verified: bool
    symmetric_input: bool

    def to_json(self) -> dict:
        return {
            "w": vertex_to_json(self.vertex),
            "x": self.x.to_json(),
            "cw_rist_w": self.width,
            "exponent_bound": self.bound,
            "letters_per_commutator": self.letters,
            "sharpest_power_for_commutators": self.sharpest_power,
            "commutators_checked": self.commutators_checked,
            "A_was_symmetric": self.symmetric_input,
            "verified": self.verified,
        }


def comm_width_containment(A: Iterable[Portrait], v: Vertex, ambient: TreeGroup, budget: int | None = None) -> ContainmentResult:
    """Replay ``[g,h] = [g~, [h~, x]]`` for all ``g, h`` in ``rist(w)`` and check ``D(rist(w))`` inside ``A^{10k}``.

    ``A`` is closed under inverses first.  ``x`` is a nontrivial element of
    ``A`` inside ``rist(v)`` moving a vertex of least possible level (ties by
    leaf permutation), and ``w >= v`` is the lexicographically least vertex it moves.
    """
    A = list(dict.fromkeys(A))
    seq = ambient.seq
    v = seq.check_vertex(v)
    sym = _symmetrized(A)
    symmetric_input = len(sym) == len(A)
    cert = is_full_above(sym, v, ambient, budget)
    if not cert.full:
        raise HypothesisError(f"A is not full above {list(v)}")
    rist_v = ambient.rigid_stabilizer(v)
    inside = [a for a in sym if not a.is_identity() and rist_v.contains(a)]
    if not inside:
        raise HypothesisError(f"A meets rist({list(v)}) only in the identity")

    def moved_below_v(a):
        return [u for k in range(len(v), seq.depth + 1) for u in seq.subtree_vertices(v, k) if a.act(u) != u]

    # prefer an x moving a vertex as high as possible, so rist(w) stays large
    x = min(inside, key=lambda a: (min(len(u) for u in moved_below_v(a)), a.level_permutation(seq.depth)))
    w = min(moved_below_v(x))

    # matches below v, keyed by section
    by_section = {}
    for a in sym:
        if a.act(v) == v:
            by_section.setdefault(a.section_at(v), a)

    rist_w = ambient.rigid_stabilizer(w)
    elems = rist_w.portraits(budget)
    limit = element_budget(budget)
    if len(elems) ** 2 > limit:
        raise BudgetExceeded(f"{len(elems)}^2 commutator pairs exceed the element budget {limit}")
    tilde = {g: by_section[g.section_at(v)] for g in elems}
    comms = set()
    for g in elems:
        for h in elems:
            c = _comm(g, h)
            inner = _comm(tilde[h], x)
            if _comm(g, _comm(h, x)) != c or _comm(tilde[g], inner) != c:
                raise AssertionError(f"commutator identity failed at w={list(w)}")
            comms.add(c.level_permutation(seq.depth))

    profile = commutator_width_profile(rist_w.group, budget)
    k = profile["width"]
    power = _product_power(sym, 10 * k, ambient, budget)
    derived = rist_w.group.derived_subgroup()
    derived_elems = derived.elements(budget)
    verified = derived_elems <= power

    sharpest = None
    for m, P in enumerate(_power_sets(sym, ambient, budget)):
        if comms <= P:
            sharpest = m
            break
        if m == 10:
            break

    return ContainmentResult(
        vertex=w,
        x=x,
        width=k,
        bound=10 * k,
        letters=10,
        sharpest_power=sharpest,
        commutators_checked=len(elems) ** 2,
        verified=verified,
        symmetric_input=symmetric_input,
    )


# -- Grigorchuk derangements ------------------------------------------------------------


def grigorchuk_derangement(n: int, depth: int) -> Portrait:
    """``z``: a copy of ``x = (ca, ac)`` below every vertex of ``V_n``; it moves every vertex of ``V_{n+2}``."""
    if n < 0 or depth < n + 2:
        raise ValueError(f"need depth >= n + 2 = {n + 2}")
    seq = GRIGORCHUK.tree(depth)
    x = _x(depth - n)
    z = Portrait.identity(seq)
    for v in seq.level_vertices(n):
        z = z * Portrait.place(seq, v, x)
    return z


@dataclass
class DerangementReport:
    n: int
    depth: int
    element: Portrait
    derangement: bool
    in_group: bool
    in_rist: bool
    copies_in_K: bool

    @property
    def ok(self) -> bool:
        return self.derangement and self.in_group and self.in_rist and self.copies_in_K

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "level_deranged": self.n + 2,
            "derangement": self.derangement,
            "in_G": self.in_group,
            "in_rist_n": self.in_rist,
            "copies_in_K": self.copies_in_K,
            "ok": self.ok,
            "element": self.element.to_json(),
        }


def check_grigorchuk_derangement(n: int, depth: int) -> DerangementReport:
    """Build ``z`` and check it against the depth-``depth`` quotient.

    ``z`` is in ``rist(n)`` because each factor is in the group and acts only
    below its own vertex.
    """
    z = grigorchuk_derangement(n, depth)
    seq = z.seq
    G = quotient_tree_group(GRIGORCHUK, depth)
    K = k_subgroup(depth)
    x = _x(depth - n)
    copies = [Portrait.place(seq, v, x) for v in seq.level_vertices(n)]
    copies_in_K = all(K.contains(c) for c in copies)
    in_rist = all(G.contains(c) and c.fixes_outside(v) for c, v in zip(copies, seq.level_vertices(n)))
    return DerangementReport(
        n=n,
        depth=depth,
        element=z,
        derangement=z.is_derangement_of_level(n + 2),
        in_group=G.contains(z),
        in_rist=in_rist and z.level_permutation(n) == tuple(range(seq.level_size(n))),
        copies_in_K=copies_in_K,
    )


# -- Jordan ---------------------------------------------------------------------------


def random_transitive_group(rng: random.Random, max_degree: int = 10) -> PermGroup:
    """A random transitive group on 2..max_degree points.

    Generators are drawn with at least one fixed point each (when the degree
    allows), so a derangement has to be found in the group rather than among
    the generators; draws repeat until the group is transitive.
    """
    d = rng.randint(2, max_degree)
    while True:
        gens = []
        for _ in range(rng.randint(1, 3)):
            g = list(range(d))
            rng.shuffle(g)
            if d > 2:
                fixed = rng.randrange(d)
                j = g.index(fixed)
                g[j], g[fixed] = g[fixed], g[j]
            gens.append(tuple(g))
        G = PermGroup(d, gens)
        if G.is_transitive():
            return G
