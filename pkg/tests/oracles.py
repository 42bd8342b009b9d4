"""Brute-force reference computations, written without the package's algorithms.

Everything here uses plain Python lists and exhaustive enumeration, so it is
slow but independent of the elimination and lattice code under test.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np


def compose(a: list[int], b: list[int]) -> tuple[int, ...]:
    """``a after b`` on image arrays."""
    return tuple(a[b[i]] for i in range(len(b)))


def generate(gens: list[list[int]], degree: int) -> list[tuple[int, ...]]:
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(list(g), list(x))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def subgroups_by_subsets(elements: list[tuple[int, ...]]) -> list[frozenset]:
    """All subsets containing the identity and closed under composition (finite, so subgroups)."""
    ident = tuple(range(len(elements[0])))
    others = [e for e in elements if e != ident]
    out = []
    for k in range(len(others) + 1):
        for combo in combinations(others, k):
            S = set(combo) | {ident}
            if all(compose(list(a), list(b)) in S for a in S for b in S):
                out.append(frozenset(S))
    return out


def span_size(rows: list[list[int]], p: int) -> int:
    """Number of distinct vectors in the row span, by enumerating coefficient tuples."""
    if not rows:
        return 1
    n = len(rows[0])
    seen = set()
    for coeffs in product(range(p), repeat=len(rows)):
        seen.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(n)))
    return len(seen)


def rank_by_enumeration(rows: list[list[int]], p: int) -> int:
    size, r = span_size(rows, p), 0
    while p ** r < size:
        r += 1
    return r


def rank_plain(rows: list[list[int]], p: int) -> int:
    """Row reduction on Python lists with explicit modular inverses."""
    m = [[x % p for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def closure(simplices) -> list[list[tuple[int, ...]]]:
    faces = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            faces.update(combinations(s, k))
    top = max((len(f) for f in faces), default=0)
    return [sorted(f for f in faces if len(f) == k + 1) for k in range(top)]


def betti(simplices, p: int, top: int | None = None) -> list[int]:
    """Mod-p Betti numbers of the simplicial complex generated by ``simplices``."""
    levels = closure(simplices)
    n = len(levels) if top is None else top
    counts = [len(levels[q]) if q < len(levels) else 0 for q in range(n + 1)]
    ranks = [0] * (n + 2)
    for q in range(1, min(n, len(levels) - 1) + 1):
        index = {s: i for i, s in enumerate(levels[q - 1])}
        rows = []
        for s in levels[q]:
            row = [0] * len(levels[q - 1])
            for i in range(len(s)):
                row[index[s[:i] + s[i + 1:]]] = (-1) ** i
            rows.append(row)
        ranks[q] = rank_plain(rows, p)
    return [counts[q] - ranks[q] - ranks[q + 1] for q in range(n)]


def orbits(images: list[list[int]], n: int) -> list[list[int]]:
    """Orbits of points ``0..n-1`` under the listed permutations."""
    seen, out = set(), []
    for x in range(n):
        if x in seen:
            continue
        orb, stack = {x}, [x]
        while stack:
            y = stack.pop()
            for g in images:
                z = g[y]
                if z not in orb:
                    orb.add(z)
                    stack.append(z)
        seen |= orb
        out.append(sorted(orb))
    return out


def hom_dim_by_enumeration(L, M, limit: int = 1 << 14) -> int | None:
    """dim Hom(L, M) by checking every family of matrices against every structure map.

    Returns None when the search space exceeds ``limit``.
    """
    p = L.p
    n = len(L.dims)
    shapes = [(M.dims[H], L.dims[H]) for H in range(n)]
    total = sum(a * b for a, b in shapes)
    if p ** total > limit:
        return None
    lat = L.group.lattice
    pairs = [(H, K) for H in range(n) for K in range(n) if lat.le[K, H]]
    conj = [(g, H) for g in range(L.group.order) for H in range(n)]
    count = 0
    for entries in product(range(p), repeat=total):
        maps, pos = [], 0
        for a, b in shapes:
            maps.append(np.array(entries[pos:pos + a * b], dtype=np.int64).reshape(a, b))
            pos += a * b
        ok = all(
            not ((M.res_map(H, K).a @ maps[H] - maps[K] @ L.res_map(H, K).a) % p).any() for H, K in pairs
        ) and all(
            not ((M.conj_map(g, H).a @ maps[H] - maps[lat.conj(g, H)] @ L.conj_map(g, H).a) % p).any()
            for g, H in conj
        )
        count += ok
    dim = 0
    while p ** dim < count:
        dim += 1
    return dim
