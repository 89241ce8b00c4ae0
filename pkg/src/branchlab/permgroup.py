"""Finite permutation groups given by generators.

Group order, membership and stabilizers come from a deterministic
Schreier-Sims stabilizer chain over numpy index arrays.  Element enumeration
is an independent BFS closure on the generators, bounded by the element budget
(see :mod:`branchlab.config`), so the two routes can check each other.

Permutations are image tuples composed right-to-left, as in :mod:`branchlab.perm`.
"""

from __future__ import annotations

import math
import re
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import perm as _perm
from .config import BudgetExceeded, element_budget


def _as_array(p) -> np.ndarray:
    return np.asarray(p, dtype=np.intp)


def _inverse_array(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(p.size, dtype=p.dtype)
    return inv


def row_keys(rows: np.ndarray) -> np.ndarray:
    """Exact sortable keys for the rows of a 2-d array of permutations."""
    rows = np.atleast_2d(rows)
    dtype = np.uint8 if rows.shape[1] <= 256 else np.uint16
    packed = np.ascontiguousarray(rows, dtype=dtype)
    return packed.view(np.dtype((np.void, packed.dtype.itemsize * rows.shape[1]))).ravel()


class StabChain:
    """Base and strong generating set built by the incremental Schreier-Sims algorithm.

    ``base_prefix`` pins the first base points, so the chain also yields
    pointwise stabilizers of those points.
    """

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.identity = np.arange(degree, dtype=np.intp)
        self.base: list[int] = []
        self.strong: list[np.ndarray] = []
        self.level_gens: list[list[int]] = []
        self.transversal: list[dict] = []
        self._checked: list[set] = []
        for b in base_prefix:
            self._append_base_point(int(b))
        self.add_generators(generators)

    # -- construction --------------------------------------------------

    def _append_base_point(self, b: int):
        if b in self.base:
            raise ValueError(f"duplicate base point {b}")
        level = len(self.base)
        self.base.append(b)
        self.level_gens.append([gi for gi in range(len(self.strong)) if self._fixes_prefix(self.strong[gi], level)])
        self.transversal.append({b: (self.identity, self.identity)})
        self._checked.append(set())
        self._extend_orbit(level)

    def _fixes_prefix(self, g: np.ndarray, level: int) -> bool:
        return all(g[b] == b for b in self.base[:level])

    def _extend_orbit(self, level: int):
        trans = self.transversal[level]
        queue = list(trans)
        gens = [self.strong[gi] for gi in self.level_gens[level]]
        pos = 0
        while pos < len(queue):
            pt = queue[pos]
            pos += 1
            u = trans[pt][0]
            for g in gens:
                img = int(g[pt])
                if img not in trans:
                    w = g[u]
                    trans[img] = (w, _inverse_array(w))
                    queue.append(img)

    def _add_strong(self, g: np.ndarray, lo: int, hi: int):
        """Register ``g`` as a strong generator on levels ``lo..hi`` (inclusive)."""
        gi = len(self.strong)
        self.strong.append(g)
        for level in range(lo, min(hi, len(self.base) - 1) + 1):
            self.level_gens[level].append(gi)
            self._extend_orbit(level)

    def strip(self, g: np.ndarray, start: int = 0):
        """Sift ``g`` through the chain; returns the residue and the level where it stopped."""
        for level in range(start, len(self.base)):
            pt = int(g[self.base[level]])
            trans = self.transversal[level]
            if pt not in trans:
                return g, level
            g = trans[pt][1][g]
        return g, len(self.base)

    def _first_moved_level(self, g: np.ndarray) -> int:
        for level, b in enumerate(self.base):
            if g[b] != b:
                return level
        return len(self.base)

    def add_generators(self, generators: Iterable[Sequence[int]]):
        start = -1
        for p in generators:
            g = _as_array(p)
            if np.array_equal(g, self.identity):
                continue
            h, j = self.strip(g)
            if np.array_equal(h, self.identity):
                continue
            level = self._first_moved_level(h)
            if level == len(self.base):
                self._append_base_point(int(np.flatnonzero(h != self.identity)[0]))
            self._add_strong(h, 0, level)
            start = max(start, level)
        if start >= 0:
            self._close(start)

    def _close(self, i: int):
        while i >= 0:
            restart = None
            trans = self.transversal[i]
            for pt in list(trans):
                u = trans[pt][0]
                for gi in list(self.level_gens[i]):
                    if (pt, gi) in self._checked[i]:
                        continue
                    s = self.strong[gi]
                    img = int(s[pt])
                    schreier = trans[img][1][s[u]]
                    h, j = self.strip(schreier, i + 1)
                    if np.array_equal(h, self.identity):
                        self._checked[i].add((pt, gi))
                        continue
                    if j == len(self.base):
                        self._append_base_point(int(np.flatnonzero(h != self.identity)[0]))
                    self._add_strong(h, i + 1, j)
                    restart = j
                    break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                i = restart

    # -- queries -------------------------------------------------------

    def order(self, start: int = 0) -> int:
        return math.prod(len(t) for t in self.transversal[start:])

    def contains(self, p) -> bool:
        g = _as_array(p)
        if g.size != self.degree:
            return False
        h, _ = self.strip(g)
        return bool(np.array_equal(h, self.identity))

    def stabilizer_generators(self, level: int) -> list:
        """Strong generators of the pointwise stabilizer of ``base[:level]``."""
        if level >= len(self.base):
            return []
        return [self.strong[gi] for gi in self.level_gens[level]]

    def transversals(self) -> list:
        """Per level, the sorted list of (orbit point, coset representative)."""
        return [[(pt, trans[pt][0]) for pt in sorted(trans)] for trans in self.transversal]

    def rank_rows(self, rows: np.ndarray) -> np.ndarray:
        """Exact index in ``0 .. order-1`` of each row, by sifting all rows at once.

        The index is the mixed-radix number formed by the transversal positions,
        so distinct elements get distinct ranks.  Rows are assumed to lie in the
        group; only the images of the base points are tracked and checked.
        """
        rows = np.atleast_2d(rows)
        n = self.degree
        # one contiguous row per base point
        images = np.array(rows[:, self.base].T, dtype=np.int64, order="C")
        rank = np.zeros(rows.shape[0], dtype=np.int64)
        for level, trans in enumerate(self.transversal):
            pts = sorted(trans)
            pos = np.full(n, -1, dtype=np.int64)
            pos[pts] = np.arange(len(pts))
            inv = np.stack([trans[pt][1] for pt in pts]).astype(np.int64).ravel()
            idx = pos[images[level]]
            if np.any(idx < 0):
                raise ValueError("row is not an element of the group")
            rank *= len(pts)
            rank += idx
            if len(pts) > 1:
                rest = images[level + 1 :]
                rest += idx * n
                np.take(inv, rest, out=rest)
        return rank


class PermGroup:
    """A permutation group on ``range(degree)`` generated by ``generators``."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), name: str | None = None):
        if degree < 1:
            raise ValueError("domain size must be >= 1")
        self.degree = int(degree)
        gens = []
        for g in generators:
            g = _perm.check(g, self.degree)
            if not _perm.is_identity(g) and g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self.name = name
        self._prefixed_chains: dict = {}

    @property
    def domain_size(self) -> int:
        return self.degree

    def __repr__(self):
        if self.name:
            return f"PermGroup({self.name})"
        return f"PermGroup(degree={self.degree}, generators={len(self.generators)})"

    # -- named groups ----------------------------------------------------

    @classmethod
    def trivial(cls, degree: int) -> PermGroup:
        return cls(degree, (), name=f"Trivial({degree})")

    @classmethod
    def symmetric(cls, d: int) -> PermGroup:
        gens = []
        if d >= 2:
            gens = [_perm.from_cycles(d, [(0, 1)]), _perm.from_cycles(d, [tuple(range(d))])]
        return cls(d, gens, name=f"Sym({d})")

    @classmethod
    def alternating(cls, d: int) -> PermGroup:
        gens = [_perm.from_cycles(d, [(0, 1, i)]) for i in range(2, d)]
        return cls(d, gens, name=f"Alt({d})")

    @classmethod
    def cyclic(cls, d: int) -> PermGroup:
        gens = [_perm.from_cycles(d, [tuple(range(d))])] if d >= 2 else []
        return cls(d, gens, name=f"Cyclic({d})")

    @classmethod
    def parse(cls, spec) -> PermGroup:
        """Resolve ``"Sym(d)"``, ``"Alt(d)"``, ``"Cyclic(d)"`` or ``{"n": d, "gens": [...]}``."""
        if isinstance(spec, PermGroup):
            return spec
        if isinstance(spec, dict):
            return cls(int(spec["n"]), spec.get("gens", []))
        m = re.fullmatch(r"\s*(Sym|Alt|Cyclic|Trivial)\s*\(\s*(\d+)\s*\)\s*", str(spec))
        if not m:
            raise ValueError(f"unknown group {spec!r}; expected Sym(d), Alt(d), Cyclic(d) or a JSON object")
        kind, d = m.group(1), int(m.group(2))
        return {"Sym": cls.symmetric, "Alt": cls.alternating, "Cyclic": cls.cyclic, "Trivial": cls.trivial}[kind](d)

    def to_json(self) -> dict:
        return {"n": self.degree, "gens": [list(g) for g in self.generators]}

    # -- stabilizer chains -------------------------------------------------

    @cached_property
    def chain(self) -> StabChain:
        return StabChain(self.degree, self.generators)

    def chain_with_base(self, prefix: Sequence[int]) -> StabChain:
        key = tuple(int(b) for b in prefix)
        if key not in self._prefixed_chains:
            self._prefixed_chains[key] = StabChain(self.degree, self.generators, base_prefix=key)
        return self._prefixed_chains[key]

    def order(self) -> int:
        return self.chain.order()

    def __len__(self):
        return self.order()

    def contains(self, g) -> bool:
        return self.chain.contains(g)

    __contains__ = contains

    def is_subgroup_of(self, other: PermGroup) -> bool:
        return self.degree == other.degree and all(other.contains(g) for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.order() == other.order()
            and self.is_subgroup_of(other)
        )

    __hash__ = object.__hash__

    def is_trivial(self) -> bool:
        return not self.generators

    def subgroup(self, generators: Iterable[Sequence[int]], name: str | None = None) -> PermGroup:
        return PermGroup(self.degree, generators, name=name)

    # -- elements ----------------------------------------------------------

    def element_array(self, budget: int | None = None) -> np.ndarray:
        """All elements as rows of an array, sorted by :func:`row_keys`; BFS closure."""
        limit = element_budget(budget)
        ident = np.arange(self.degree, dtype=np.intp)[None, :]
        gens = [_as_array(g) for g in self.generators]
        seen = {row_keys(ident)[0].tobytes()}
        blocks = [ident]
        frontier = ident
        count = 1
        while frontier.shape[0] and gens:
            new_rows = []
            for g in gens:
                cand = g[frontier]
                keys = row_keys(cand)
                for row, key in zip(cand, keys):
                    kb = key.tobytes()
                    if kb not in seen:
                        seen.add(kb)
                        new_rows.append(row)
                        count += 1
                        if count > limit:
                            raise BudgetExceeded(
                                f"group too large: more than {limit} elements; use order() (Schreier-Sims) instead"
                            )
            frontier = np.array(new_rows, dtype=np.intp).reshape(-1, self.degree)
            blocks.append(frontier)
        allrows = np.concatenate(blocks)
        return allrows[np.argsort(row_keys(allrows), kind="stable")]

    def elements(self, budget: int | None = None) -> set:
        return {tuple(int(x) for x in row) for row in self.element_array(budget)}

    def iter_elements(self) -> Iterator[tuple]:
        """Lazy enumeration through the stabilizer chain (no budget, no storage)."""
        levels = self.chain.transversals()

        def walk(level, acc):
            if level == len(levels):
                yield tuple(int(x) for x in acc)
                return
            for _, u in levels[level]:
                yield from walk(level + 1, acc[u])

        yield from walk(0, self.chain.identity)

    def random_element(self, rng) -> tuple:
        acc = self.chain.identity
        for level in self.chain.transversals():
            _, u = level[rng.randrange(len(level))]
            acc = acc[u]
        return tuple(int(x) for x in acc)

    # -- orbits and transitivity ---------------------------------------------

    def orbit(self, x: int) -> list:
        seen = {x}
        queue = [x]
        for pt in queue:
            for g in self.generators:
                y = g[pt]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def orbits(self) -> list:
        remaining = set(range(self.degree))
        out = []
        while remaining:
            orb = self.orbit(min(remaining))
            out.append(orb)
            remaining.difference_update(orb)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def tuple_action(self, k: int) -> tuple:
        """Induced group on ordered ``k``-tuples of distinct points, plus the tuple list."""
        from itertools import permutations

        tuples = list(permutations(range(self.degree), k))
        index = {t: i for i, t in enumerate(tuples)}
        gens = [[index[tuple(g[x] for x in t)] for t in tuples] for g in self.generators]
        return PermGroup(max(len(tuples), 1), gens if tuples else []), tuples

    def is_k_transitive(self, k: int) -> bool:
        if not 0 <= k <= self.degree:
            raise ValueError(f"k={k} outside 0..{self.degree}")
        if k == 0:
            return True
        induced, tuples = self.tuple_action(k)
        return len(induced.orbit(0)) == len(tuples)

    # -- subgroups -----------------------------------------------------------

    def pointwise_stabilizer(self, points: Sequence[int]) -> PermGroup:
        points = sorted(set(int(p) for p in points))
        chain = self.chain_with_base(points)
        gens = chain.stabilizer_generators(len(points))
        return PermGroup(self.degree, [tuple(int(x) for x in g) for g in gens])

    def point_stabilizer(self, x: int) -> PermGroup:
        return self.pointwise_stabilizer([x])

    def is_generated_by_point_stabilizers(self) -> bool:
        gens = []
        for x in range(self.degree):
            gens.extend(self.point_stabilizer(x).generators)
        return PermGroup(self.degree, gens).order() == self.order()

    def normal_closure(self, elements: Iterable[Sequence[int]]) -> PermGroup:
        """Smallest subgroup normalized by this group containing ``elements``."""
        chain = StabChain(self.degree)
        gens = []
        queue = []
        for e in elements:
            e = _perm.check(e, self.degree)
            if not chain.contains(e):
                chain.add_generators([e])
                gens.append(e)
                queue.append(e)
        while queue:
            n = queue.pop()
            for s in self.generators:
                c = _perm.conjugate(s, n)
                if not chain.contains(c):
                    chain.add_generators([c])
                    gens.append(c)
                    queue.append(c)
        out = PermGroup(self.degree, gens)
        out.__dict__["chain"] = chain
        return out

    def derived_subgroup(self) -> PermGroup:
        comms = [
            _perm.commutator(g, h)
            for i, g in enumerate(self.generators)
            for h in self.generators[i + 1 :]
        ]
        return self.normal_closure(comms)

    def is_perfect(self) -> bool:
        return self.derived_subgroup().order() == self.order()

    def is_normal_subgroup(self, sub: PermGroup) -> bool:
        return sub.is_subgroup_of(self) and all(
            sub.contains(_perm.conjugate(s, n)) for s in self.generators for n in sub.generators
        )

    # -- commutator width ----------------------------------------------------

    def commutator_width(self, budget: int | None = None) -> int:
        return commutator_width_profile(self, budget)["width"]

    # -- derangements ----------------------------------------------------------

    def find_derangement(self):
        """First fixed-point-free element in chain order, or ``None``.

        Backtracks over transversal choices; a branch dies as soon as the
        image of the current base point equals the point itself.
        """
        chain = self.chain
        levels = chain.transversals()
        base = chain.base
        n = self.degree
        if n == 1:
            return None

        def walk(level, acc):
            if level == len(levels):
                if not np.any(acc == np.arange(n)):
                    return tuple(int(x) for x in acc)
                return None
            b = base[level]
            for _, u in levels[level]:
                nxt = acc[u]
                if nxt[b] == b:
                    continue
                found = walk(level + 1, nxt)
                if found is not None:
                    return found
            return None

        return walk(0, chain.identity)


def commutator_width_profile(G: PermGroup, budget: int | None = None) -> dict:
    """Brute-force commutator width with the growth of ``[G,G]^{*k}``.

    Works on conjugacy classes: the sets ``[G,G]^{*k}`` are unions of classes,
    so each step only multiplies class representatives against the commutator
    set.  Returns the width, the sizes ``|[G,G]^{*k}|`` for ``k = 0..width``
    and ``|D(G)|``.
    """
    elems = G.element_array(budget)
    m, n = elems.shape
    keys = row_keys(elems)

    def index_of(rows):
        idx = np.searchsorted(keys, row_keys(rows))
        return idx

    inv_rows = np.argsort(elems, axis=1)
    # conjugacy classes as connected components of the conjugation action of the generators
    src, dst = [np.arange(m)], [np.arange(m)]
    for s in G.generators:
        s = _as_array(s)
        sinv = _inverse_array(s)
        src.append(np.arange(m))
        dst.append(index_of(s[elems[:, sinv]]))
    src, dst = np.concatenate(src), np.concatenate(dst)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(m, m))
    n_classes, class_of = connected_components(graph, directed=True, connection="weak")
    reps = np.full(n_classes, -1)
    for i in range(m - 1, -1, -1):
        reps[class_of[i]] = i

    derived = G.derived_subgroup()
    derived_order = derived.order()
    if derived_order == 1:
        return {"width": 0, "sizes": [1], "derived_order": 1, "classes": int(n_classes)}
    in_derived = np.zeros(n_classes, dtype=bool)
    for c in range(n_classes):
        in_derived[c] = derived.contains(elems[reps[c]])

    hit = np.zeros(n_classes, dtype=bool)
    for c in range(n_classes):
        g = elems[reps[c]]
        ginv = _inverse_array(g)
        # [g, h] = g h g^-1 h^-1 for every h at once
        step = ginv[inv_rows]
        step = np.take_along_axis(elems, step, axis=1)
        comms = g[step]
        hit[np.unique(class_of[index_of(comms)])] = True
        if np.array_equal(hit, in_derived):
            break
    class_sizes = np.bincount(class_of, minlength=n_classes)
    commutator_set = hit.copy()
    comm_rows = elems[np.isin(class_of, np.flatnonzero(commutator_set))]
    current = commutator_set
    sizes = [1, int(class_sizes[current].sum())]
    width = 1
    while not np.array_equal(current, in_derived):
        nxt = current.copy()
        for c in np.flatnonzero(current):
            s = elems[reps[c]]
            nxt[np.unique(class_of[index_of(s[comm_rows])])] = True
        if np.array_equal(nxt, current):
            raise RuntimeError("commutator products stopped growing before reaching D(G)")
        current = nxt
        width += 1
        sizes.append(int(class_sizes[current].sum()))
    return {"width": width, "sizes": sizes, "derived_order": derived_order, "classes": int(n_classes)}


def elements(G: PermGroup, budget: int | None = None) -> set:
    return G.elements(budget)


def order(G: PermGroup) -> int:
    return G.order()


def orbits(G: PermGroup) -> list:
    return G.orbits()


def is_k_transitive(G: PermGroup, k: int) -> bool:
    return G.is_k_transitive(k)


def point_stabilizer(G: PermGroup, x: int) -> PermGroup:
    return G.point_stabilizer(x)


def is_generated_by_point_stabilizers(G: PermGroup) -> bool:
    return G.is_generated_by_point_stabilizers()


def derived_subgroup(G: PermGroup) -> PermGroup:
    return G.derived_subgroup()


def is_perfect(G: PermGroup) -> bool:
    return G.is_perfect()


def commutator_width(G: PermGroup, budget: int | None = None) -> int:
    return G.commutator_width(budget)


def find_derangement(G: PermGroup):
    return G.find_derangement()
