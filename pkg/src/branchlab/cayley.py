"""Cayley-graph diameters of finite groups by breadth-first search.

The generating set is closed under inverses and gets the identity added, so
the diameter is the least ``n`` with ``S^n = G``.  Cayley graphs are
vertex-transitive, so the eccentricity of the identity is the diameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import BudgetExceeded, element_budget
from .permgroup import PermGroup


@dataclass
class CayleyResult:
    group_order: int
    generated_order: int
    diameter: int | None  # None when the set does not generate
    sphere_sizes: list = field(default_factory=list)

    @property
    def generates(self) -> bool:
        return self.generated_order == self.group_order

    @property
    def index(self) -> int:
        return self.group_order // self.generated_order

    def to_json(self) -> dict:
        out = {
            "group_order": self.group_order,
            "generates": self.generates,
            "diameter": self.diameter,
            "sphere_sizes": self.sphere_sizes,
        }
        if not self.generates:
            out["index"] = self.index
        return out


def cayley_diameter(G: PermGroup, generators: Sequence[Sequence[int]], budget: int | None = None) -> CayleyResult:
    """BFS from the identity in the Cayley graph of ``<S>`` with ``S`` symmetric and containing 1.

    If ``S`` generates a proper subgroup, its index in ``G`` is reported instead of a diameter.
    """
    limit = element_budget(budget)
    gens = [np.asarray(g, dtype=np.intp) for g in generators]
    for g in gens:
        if g.size != G.degree or not G.contains(tuple(int(x) for x in g)):
            raise ValueError("generator is not an element of the group")
    H = PermGroup(G.degree, [tuple(int(x) for x in g) for g in gens])
    order_G, order_H = G.order(), H.order()
    if order_H != order_G:
        return CayleyResult(order_G, order_H, None)
    if order_G > limit:
        raise BudgetExceeded(f"group of order {order_G} exceeds the element budget {limit}")
    dtype = np.uint8 if G.degree <= 256 else np.intp
    moves = {}
    for g in gens:
        inv = np.empty_like(g)
        inv[g] = np.arange(g.size)
        for m in (g, inv):
            moves.setdefault(m.tobytes(), m)
    moves = list(moves.values())
    chain = G.chain
    seen = np.zeros(order_G, dtype=bool)
    frontier = np.arange(G.degree, dtype=dtype)[None, :]
    seen[chain.rank_rows(frontier)] = True
    spheres = [1]
    while True:
        # right multiplication by generators: (x s)(i) = x[s[i]]
        step = np.concatenate([frontier[:, s] for s in moves]) if moves else frontier[:0]
        ranks, first = np.unique(chain.rank_rows(step), return_index=True)
        fresh = ~seen[ranks]
        if not fresh.any():
            break
        frontier = step[first[fresh]]
        seen[ranks[fresh]] = True
        spheres.append(int(fresh.sum()))
    if int(seen.sum()) != order_G:
        raise AssertionError("BFS reached a different number of elements than the group order")
    return CayleyResult(order_G, order_H, len(spheres) - 1, spheres)
