"""Permutations as image tuples: ``p[i]`` is the image of ``i``.

Products follow function composition, ``compose(p, q)(i) == p[q[i]]``: apply
``q`` first.  The commutator is ``[g, h] = g h g^-1 h^-1``.
"""

from __future__ import annotations

from typing import Sequence


def identity(n: int) -> tuple:
    return tuple(range(n))


def is_permutation(p: Sequence[int], n: int | None = None) -> bool:
    if n is not None and len(p) != n:
        return False
    return sorted(p) == list(range(len(p)))


def check(p: Sequence[int], n: int | None = None) -> tuple:
    p = tuple(int(x) for x in p)
    if not is_permutation(p, n):
        raise ValueError(f"not a permutation of {n if n is not None else len(p)} points: {list(p)}")
    return p


def compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    if len(p) != len(q):
        raise ValueError("permutations act on different domains")
    return tuple(p[i] for i in q)


def inverse(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def commutator(g: Sequence[int], h: Sequence[int]) -> tuple:
    return compose(compose(g, h), compose(inverse(g), inverse(h)))


def conjugate(g: Sequence[int], x: Sequence[int]) -> tuple:
    """``g x g^-1``."""
    return compose(compose(g, x), inverse(g))


def power(p: Sequence[int], k: int) -> tuple:
    if k < 0:
        p, k = inverse(p), -k
    result = identity(len(p))
    base = tuple(p)
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def support(p: Sequence[int]) -> set:
    return {i for i, j in enumerate(p) if i != j}


def is_identity(p: Sequence[int]) -> bool:
    return all(i == j for i, j in enumerate(p))


def cycles(p: Sequence[int], include_fixed: bool = False) -> list:
    """Disjoint cycle decomposition, each cycle starting at its least point."""
    seen = set()
    out = []
    for start in range(len(p)):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        j = p[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = p[j]
        if len(cycle) > 1 or include_fixed:
            out.append(tuple(cycle))
    return out


def order(p: Sequence[int]) -> int:
    from math import lcm

    return lcm(*(len(c) for c in cycles(p, include_fixed=True))) if p else 1


def from_cycles(n: int, cycle_list) -> tuple:
    img = list(range(n))
    for cyc in cycle_list:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return check(img, n)


def format_cycles(p: Sequence[int]) -> str:
    cs = cycles(p)
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cs) or "()"
