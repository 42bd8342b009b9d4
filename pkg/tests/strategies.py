"""Hypothesis strategies for small equivariant complexes."""

from __future__ import annotations

from itertools import combinations

from hypothesis import strategies as st

from bredonfp.gcomplex import GComplex
from bredonfp.groups import FiniteGroup

# (group, vertex count, generator images) for a few small actions
ACTIONS = [
    (lambda: FiniteGroup.cyclic(2), 6, [[1, 0, 3, 2, 4, 5]]),
    (lambda: FiniteGroup.cyclic(2), 6, [[5, 4, 3, 2, 1, 0]]),
    (lambda: FiniteGroup.cyclic(3), 6, [[1, 2, 0, 4, 5, 3]]),
    (lambda: FiniteGroup.cyclic(3), 4, [[1, 2, 0, 3]]),
    (lambda: FiniteGroup.klein_four(), 5, [[1, 0, 2, 3, 4], [0, 1, 3, 2, 4]]),
    (lambda: FiniteGroup.cyclic(4), 5, [[1, 2, 3, 0, 4]]),
]


@st.composite
def g_complexes(draw, max_dim: int = 2, max_generators: int = 3, actions=None):
    """An invariant complex: the orbit closure of a few random simplices."""
    make, n, gens = draw(st.sampled_from(actions or ACTIONS))
    G = make()
    candidates = [s for k in range(1, max_dim + 2) for s in combinations(range(n), k)]
    seeds = draw(st.lists(st.sampled_from(candidates), min_size=1, max_size=max_generators))
    X = GComplex.from_generators(G, n, gens, seeds)
    images = X.vertex_images
    closed = {tuple(sorted(int(images[g, v]) for v in s)) for s in seeds for g in range(G.order)}
    return GComplex(G, n, images, sorted(closed))
