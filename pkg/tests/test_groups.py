from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bredonfp.errors import ActionError, FamilyError, ResourceError
from bredonfp.groups import (
    FiniteGroup,
    GSet,
    SubgroupFamily,
    conjugate_subgroup,
    coset_gset,
    fixed_points,
    orbits,
)

from .oracles import generate, subgroups_by_subsets

GROUPS = {
    "trivial": FiniteGroup.trivial,
    "C2": lambda: FiniteGroup.cyclic(2),
    "C4": lambda: FiniteGroup.cyclic(4),
    "V4": FiniteGroup.klein_four,
    "S3": lambda: FiniteGroup.symmetric(3),
    "D4": lambda: FiniteGroup.dihedral(4),
    "Q8": FiniteGroup.quaternion,
}


def _element_sets(G: FiniteGroup) -> set[frozenset]:
    return {frozenset(G.elements[g] for g in H.elements) for H in G.lattice}


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_lattice_matches_subset_closure(name):
    G = GROUPS[name]()
    brute = set(subgroups_by_subsets(generate([list(g) for g in G.generators], G.degree)))
    assert _element_sets(G) == brute


def test_lattice_counts():
    assert len(FiniteGroup.trivial().lattice) == 1
    assert len(FiniteGroup.cyclic(2).lattice) == 2
    orders = sorted(H.order for H in FiniteGroup.symmetric(3).lattice)
    assert orders == [1, 2, 2, 2, 3, 6]


def test_lattice_ids_are_ordered_by_size():
    lat = FiniteGroup.symmetric(3).lattice
    assert lat.trivial == 0 and lat[lat.whole].order == 6
    assert [H.order for H in lat] == sorted(H.order for H in lat)


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_inclusion_is_a_partial_order_and_covers_are_maximal(name):
    lat = GROUPS[name]().lattice
    le = lat.le
    n = len(lat)
    assert all(le[i, i] for i in range(n))
    for i in range(n):
        for j in range(n):
            if i != j:
                assert not (le[i, j] and le[j, i])
    for H in range(n):
        for K in lat.covers[H]:
            assert le[K, H] and K != H
            assert not any(M not in (H, K) and le[K, M] and le[M, H] for M in range(n))


def test_conjugation_in_s3():
    G = FiniteGroup.symmetric(3)
    lat = G.lattice
    t01 = G.index([1, 0, 2])
    t02 = G.index([2, 1, 0])
    t12 = G.index([0, 2, 1])
    H = lat.id_of([0, t01])
    assert lat.conj(t02, H) == lat.id_of([0, t12])
    assert conjugate_subgroup(G, t02, lat[H]).elements == lat[lat.id_of([0, t12])].elements
    classes = sorted(sorted(lat[H].order for H in c) for c in lat.conjugacy_classes())
    assert sorted(classes) == [[1], [2, 2, 2], [3], [6]]


def test_coset_gsets():
    G = FiniteGroup.cyclic(2)
    S = coset_gset(G, G.lattice[G.lattice.whole])
    assert S.size == 1
    S = coset_gset(G, G.lattice[0])
    assert S.size == 2 and sorted(S.images[1].tolist()) == [0, 1] and S.images[1, 0] == 1
    assert fixed_points(S, G.lattice[G.lattice.whole]) == []
    assert fixed_points(S, G.lattice[0]) == [0, 1]
    assert orbits(S) == [[0, 1]]


def test_s3_cosets_of_a_transposition():
    G = FiniteGroup.symmetric(3)
    lat = G.lattice
    H = lat[lat.id_of([0, G.index([1, 0, 2])])]
    S = coset_gset(G, H)
    assert S.size == 3
    assert len(orbits(S)) == 1
    assert len(fixed_points(S, H)) == 1
    # the action on cosets is faithful and transitive: it realizes S_3 on 3 points
    assert len({tuple(row) for row in S.images.tolist()}) == 6


def test_trivial_action_orbits_are_singletons():
    G = FiniteGroup.cyclic(3)
    S = GSet(G, np.tile(np.arange(4), (3, 1)))
    assert orbits(S) == [[0], [1], [2], [3]]


def test_gset_rejects_non_actions():
    with pytest.raises(ActionError):
        GSet.from_generators(FiniteGroup.cyclic(2), 3, [[1, 2, 0]])


def test_families():
    lat = FiniteGroup.symmetric(3).lattice
    assert SubgroupFamily.nontrivial(lat).members == frozenset(range(1, 6))
    with pytest.raises(FamilyError):
        SubgroupFamily(lat, [1])  # not closed under conjugation or supergroups
    fams = SubgroupFamily.all_families(lat)
    for A in fams:
        for H in A:
            assert all(K in A for K in range(len(lat)) if lat.le[H, K])


def test_json_round_trip():
    G = FiniteGroup.dihedral(4)
    H = FiniteGroup.from_json(G.to_json())
    assert H.elements == G.elements


def test_p_group_and_word_tree():
    assert FiniteGroup.quaternion().is_p_group(2)
    assert not FiniteGroup.symmetric(3).is_p_group(2)
    G = FiniteGroup.dihedral(4)
    for g, (s, h) in enumerate(G.word_tree):
        if g:
            assert G.mul(G.generator_indices[s], h) == g


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(4)), st.permutations(range(4)))
def test_generated_groups_are_closed(a, b):
    G = FiniteGroup(4, [list(a), list(b)])
    elems = set(G.elements)
    for x in G.elements:
        for y in G.elements:
            assert tuple(x[i] for i in y) in elems
    for H in G.lattice:
        S = set(H.elements)
        assert 0 in S
        assert all(G.mul(x, y) in S for x in S for y in S)
        assert G.order % H.order == 0


def test_lattice_refuses_large_groups():
    with pytest.raises(ResourceError):
        _ = FiniteGroup.symmetric(5).lattice
