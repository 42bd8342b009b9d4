from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bredonfp.coeffsys import (
    CoeffSys,
    CSMorphism,
    GroupModule,
    atomic_system,
    constant_system,
    direct_sum,
    dualize,
    dualize_eff,
    find_isomorphism,
    fixed_point_system,
    gset_system,
    hom_space,
    localize,
    module_homs,
    projective_system,
    sub_quotient,
)
from bredonfp.groups import FiniteGroup, GSet, SubgroupFamily
from bredonfp.linalg import FpMatrix

from .oracles import hom_dim_by_enumeration

GROUP_PRIMES = [
    (FiniteGroup.cyclic(2), 2),
    (FiniteGroup.cyclic(3), 3),
    (FiniteGroup.cyclic(4), 2),
    (FiniteGroup.klein_four(), 2),
    (FiniteGroup.symmetric(3), 2),
    (FiniteGroup.symmetric(3), 3),
]


def standard_systems(G: FiniteGroup, p: int) -> list[CoeffSys]:
    V = GroupModule.regular(G, p)
    return [
        constant_system(G, p),
        fixed_point_system(V),
        atomic_system(GroupModule.trivial(G, p), at_trivial_only=False),
        atomic_system(GroupModule.trivial(G, p), at_trivial_only=True),
        atomic_system(V),
        projective_system(G, 0, p),
        projective_system(G, G.lattice.whole, p),
    ]


@pytest.mark.parametrize("G,p", GROUP_PRIMES)
def test_standard_systems_validate(G, p):
    for L in standard_systems(G, p):
        assert L.validate().ok, L.name


def test_constant_system():
    G = FiniteGroup.symmetric(3)
    C = constant_system(G, 2)
    assert list(C.dims) == [1] * 6
    assert len(hom_space(C, C)) == 1


def test_fixed_point_dims_for_c2():
    F = fixed_point_system(GroupModule.regular(FiniteGroup.cyclic(2), 2))
    assert list(F.dims) == [2, 1]
    P = projective_system(FiniteGroup.cyclic(2), 0, 2)
    assert list(P.dims) == [2, 0]


def test_trivial_module_gives_constant_system():
    G = FiniteGroup.klein_four()
    F = fixed_point_system(GroupModule.trivial(G, 2))
    assert find_isomorphism(F, constant_system(G, 2)) is not None


def test_atomic_at_trivial():
    G = FiniteGroup.cyclic(2)
    R0 = atomic_system(GroupModule.trivial(G, 2))
    assert list(R0.dims) == [1, 0]
    assert len(hom_space(projective_system(G, 1, 2), R0)) == 0


def test_trivial_point_gset_is_constant():
    G = FiniteGroup.cyclic(3)
    pt = gset_system(GSet(G, np.zeros((3, 1), dtype=np.int64)), 3)
    assert find_isomorphism(pt, constant_system(G, 3)) is not None


def test_hom_from_fixed_coset_to_free_coset_is_zero():
    for G, p in GROUP_PRIMES:
        if G.order > 1:
            assert hom_space(projective_system(G, G.lattice.whole, p), projective_system(G, 0, p)) == []


@pytest.mark.parametrize("G,p", GROUP_PRIMES)
def test_projective_adjunction(G, p):
    for L in standard_systems(G, p):
        for H in range(len(G.lattice)):
            assert len(hom_space(projective_system(G, H, p), L)) == L.dims[H]


@pytest.mark.parametrize("G,p", GROUP_PRIMES)
def test_fixed_point_adjunction(G, p):
    V = GroupModule.regular(G, p)
    target = fixed_point_system(V)
    for L in standard_systems(G, p):
        assert len(hom_space(L, target)) == len(module_homs(L.module_at_trivial(), V))


@pytest.mark.parametrize("G,p", [(FiniteGroup.cyclic(2), 2), (FiniteGroup.cyclic(3), 3), (FiniteGroup.cyclic(2), 3)])
def test_hom_dims_match_enumeration(G, p):
    systems = standard_systems(G, p)
    checked = 0
    for L in systems:
        for M in systems:
            brute = hom_dim_by_enumeration(L, M)
            if brute is None:
                continue
            assert len(hom_space(L, M)) == brute, (L.name, M.name)
            checked += 1
    assert checked >= 20


def test_module_homs_against_enumeration():
    G, p = FiniteGroup.cyclic(2), 2
    V = GroupModule.regular(G, p)
    g = V.matrix(G.generator_indices[0]).a
    count = 0
    for entries in range(16):
        m = np.array([(entries >> k) & 1 for k in range(4)], dtype=np.int64).reshape(2, 2)
        count += not ((m @ g - g @ m) % p).any()
    assert 2 ** len(module_homs(V, V)) == count


def test_corrupted_conjugation_is_reported():
    G = FiniteGroup.cyclic(2)
    F = fixed_point_system(GroupModule.regular(G, 2))
    data = F.to_json()
    data["conj"]["0@0"] = [[0, 0], [0, 0]]
    rep = CoeffSys.from_json(json.dumps(data), G).validate()
    assert not rep.ok and rep.axiom == 3 and rep.location


def test_json_round_trip_and_generator_keys():
    G = FiniteGroup.symmetric(3)
    F = fixed_point_system(GroupModule.regular(G, 3))
    back = CoeffSys.from_json(F.to_json(), G)
    assert back.validate().ok and find_isomorphism(back, F) is not None
    data = F.to_json()
    data["conj"] = {"gen_" + k: v for k, v in data["conj"].items()}
    assert CoeffSys.from_json(data, G).validate().ok


def test_sub_quotient_examples():
    G, p = FiniteGroup.cyclic(2), 2
    F = fixed_point_system(GroupModule.regular(G, p))
    everything = sub_quotient(F, {H: FpMatrix.identity(p, F.dims[H]) for H in range(2)})
    assert list(everything.sub.dims) == list(F.dims)
    sq = sub_quotient(F, {0: FpMatrix.identity(p, 2)})
    assert list(sq.quotient.dims) == [0, 1]
    assert sq.quotient.validate().ok and sq.inclusion.validate().ok and sq.projection.validate().ok


@pytest.mark.parametrize("p", [2, 3, 5])
def test_augmentation_quotient_splits_off_atomic_part(p):
    G = FiniteGroup.cyclic(p)
    F = fixed_point_system(GroupModule.regular(G, p))
    diff = np.zeros((p, 1), dtype=np.int64)
    diff[0, 0], diff[1, 0] = 1, p - 1
    I0 = sub_quotient(F, {0: FpMatrix(diff, p)})
    top = sub_quotient(F, {0: FpMatrix.identity(p, p)}).quotient
    B = direct_sum(top, atomic_system(GroupModule.trivial(G, p)))
    assert list(I0.quotient.dims) == list(B.dims)
    assert find_isomorphism(I0.quotient, B) is not None


def test_localization():
    G, p = FiniteGroup.cyclic(2), 2
    lat = G.lattice
    P1 = projective_system(G, 0, p)
    loc, _ = localize(SubgroupFamily.everything(lat), P1)
    assert list(loc.dims) == list(P1.dims)
    loc, _ = localize(SubgroupFamily.nontrivial(lat), P1)
    assert list(loc.dims) == [0, 0]
    # vertices of the reflected hexagon: localizing keeps the two fixed vertices
    S = GSet.from_generators(G, 6, [[(-i) % 6 for i in range(6)]])
    loc, incl = localize(SubgroupFamily.nontrivial(lat), gset_system(S, p))
    fixed = gset_system(S.sub_gset([0, 3]), p)
    assert find_isomorphism(loc, fixed) is not None
    assert incl.is_mono()


@pytest.mark.parametrize("G,p", GROUP_PRIMES)
def test_duality(G, p):
    for L in standard_systems(G, p):
        D = dualize(L)
        assert D.validate().ok
        assert list(dualize_eff(D).dims) == list(L.dims)
        # a coefficient-system morphism space and its dual have equal dimension
        M = fixed_point_system(GroupModule.regular(G, p))
        assert len(hom_space(L, M)) == len(hom_space(dualize(M), D))
    const = dualize(constant_system(G, p))
    assert all(d == 1 for d in const.dims)


def test_morphism_algebra():
    G, p = FiniteGroup.cyclic(2), 2
    F = fixed_point_system(GroupModule.regular(G, p))
    one = CSMorphism.identity(F)
    zero = CSMorphism.zero(F, F)
    assert one.is_iso() and (one @ one) == one
    assert (one + one).is_zero() and (one - one) == zero
    assert zero.validate().ok


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(range(len(GROUP_PRIMES))), st.data())
def test_random_subsystems_are_systems(idx, data):
    G, p = GROUP_PRIMES[idx]
    L = data.draw(st.sampled_from(standard_systems(G, p)))
    H = data.draw(st.integers(0, len(G.lattice) - 1))
    d = L.dims[H]
    if d == 0:
        return
    vec = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=d, max_size=d)), dtype=np.int64)
    sq = sub_quotient(L, {H: FpMatrix(vec.reshape(d, 1), p)})
    assert sq.sub.validate().ok and sq.quotient.validate().ok
    assert sq.inclusion.is_mono() and sq.projection.is_epi()
    for K in range(len(G.lattice)):
        assert sq.sub.dims[K] + sq.quotient.dims[K] == L.dims[K]
