from __future__ import annotations

import numpy as np
import pytest

from bredonfp import suite
from bredonfp.bredon import CSComplex, equivariant_chains
from bredonfp.coeffsys import CSMorphism, PermutationSystem, projective_system
from bredonfp.gcomplex import GComplex
from bredonfp.groups import FiniteGroup
from bredonfp.homotopy import (
    ChainMap,
    HomotopyCertificate,
    cone,
    contracting_homotopy,
    homotopy_equivalence_check,
    induced_chain_map,
    nonsplit_module_demo,
    retraction,
    split_boundary,
    subdivision_chain_map,
    verify_certificate,
)
from bredonfp.linalg import FpMatrix


def identity_complex(G: FiniteGroup, H: int, p: int) -> CSComplex:
    """``R[G/H^?]`` in degrees 1 and 0 with the identity as boundary."""
    P = projective_system(G, H, p)
    d = P.level_one_morphism(P, FpMatrix.identity(p, P.dims[0]))
    return CSComplex(G, p, [P, P], [None, d])


def test_zero_complex_has_empty_contraction():
    G = FiniteGroup.cyclic(2)
    cert = contracting_homotopy(CSComplex(G, 2, [], []))
    assert cert is not None and cert.s == [] and verify_certificate(cert)


@pytest.mark.parametrize("H", [0, 1])
def test_identity_complexes_contract(H):
    G = FiniteGroup.cyclic(2)
    for method in ("inductive", "global"):
        cert = contracting_homotopy(identity_complex(G, H, 2), method)
        assert cert is not None and verify_certificate(cert)


def test_hexagon_identity_cone_contracts():
    C = equivariant_chains(suite.reflection_hexagon(), 2)
    K = cone(ChainMap.identity(C))
    for method in ("inductive", "global"):
        cert = contracting_homotopy(K, method)
        assert cert is not None and verify_certificate(cert)


def test_tampered_certificate_is_rejected():
    C = equivariant_chains(suite.reflection_hexagon(), 2)
    cert = contracting_homotopy(cone(ChainMap.identity(C)))
    bad = [m.copy() for m in cert.s]
    i = next(q for q, m in enumerate(bad) if m.size)
    bad[i][0, 0] ^= 1
    assert not verify_certificate(HomotopyCertificate(cert.complex, bad, cert.kind, cert.method))


def test_non_exact_complex_has_no_contraction():
    C = equivariant_chains(suite.reflection_hexagon(), 2)
    assert contracting_homotopy(C) is None
    # the cycle class sits in the free edge module as a norm element, which has no complement
    assert split_boundary(C) is None
    assert split_boundary(identity_complex(FiniteGroup.cyclic(2), 0, 2)) is not None


def test_retraction_examples():
    G, p = FiniteGroup.cyclic(2), 2
    A = projective_system(G, 0, p)
    B = projective_system(G, 1, p)
    both = PermutationSystem(A.gset.disjoint_union(B.gset), p)
    m = np.zeros((3, 2), dtype=np.int64)
    m[0, 0] = m[1, 1] = 1
    incl = A.level_one_morphism(both, FpMatrix(m, p))
    res = retraction(incl)
    assert res.ok and (res.morphism @ incl) == CSMorphism.identity(A)
    res = retraction(CSMorphism.zero(A, both))
    assert not res.ok and "not a monomorphism" in res.message


def test_identity_map_has_identity_inverse():
    C = equivariant_chains(suite.reflection_hexagon(), 2)
    rep = homotopy_equivalence_check(ChainMap.identity(C))
    assert rep.verified
    # g f - id is null-homotopic, so g agrees with the identity on homology
    assert rep.inverse.is_chain_map()


def test_collar_inclusion_is_an_equivalence():
    X, Y = suite.reflection_hexagon(), suite.collar_annulus()
    f = induced_chain_map(X, Y, list(range(6)), 2)
    rep = homotopy_equivalence_check(f)
    assert rep.quasi_iso_at_1 and rep.verified and all(rep.quasi_iso_at.values())
    g = rep.inverse
    assert g.is_chain_map() and (g @ f).is_chain_map()


@pytest.mark.parametrize("name,p", [("reflection_hexagon", 2), ("free_c3_hexagon", 3), ("klein_octahedron", 2)])
def test_subdivision_maps_are_equivalences(name, p):
    X = suite.member(name).for_prime(p)
    Y, f = subdivision_chain_map(X, p)
    assert f.is_chain_map()
    rep = homotopy_equivalence_check(f)
    assert rep.quasi_iso_at_1 and rep.verified
    assert all(rep.quasi_iso_at.values())


def test_subdivision_of_symmetric_group_action():
    for p in (2, 3):
        X = suite.member("s3_triangle").for_prime(p)
        _, f = subdivision_chain_map(X, p)
        assert homotopy_equivalence_check(f).verified


def test_quasi_isomorphism_at_trivial_subgroup_only():
    # the 12-gon wrapped three times round a square: an isomorphism on mod-2 homology,
    # but the rotation of order 3 fixes no point of the 12-gon and acts trivially on the square
    X = suite.dihedral_twelve_gon()
    square = GComplex.from_generators(X.group, 4, [[0, 1, 2, 3], [0, 3, 2, 1]], suite.hexagon_edges(4))
    f = induced_chain_map(X, square, [k % 4 for k in range(12)], 2)
    rep = homotopy_equivalence_check(f)
    assert rep.quasi_iso_at_1 and rep.certificate is None and not rep.verified
    assert not all(rep.quasi_iso_at.values())


def test_non_quasi_isomorphism_is_not_certified():
    # the hexagon collapsed onto a fixed point loses its one-dimensional class
    X = suite.reflection_hexagon()
    G = X.group
    pt = GComplex(G, 1, np.zeros((2, 1), dtype=np.int64), [(0,)])
    f = induced_chain_map(X, pt, [0] * X.vertex_count, 2)
    rep = homotopy_equivalence_check(f)
    assert not rep.quasi_iso_at_1 and rep.certificate is None and not rep.verified


def test_global_and_inductive_agree_on_existence():
    for name in ("reflection_hexagon", "klein_octahedron"):
        C = equivariant_chains(suite.member(name).complex, 2)
        K = cone(ChainMap.identity(C))
        a, b = contracting_homotopy(K, "inductive"), contracting_homotopy(K, "global")
        assert a is not None and b is not None
        assert verify_certificate(a) and verify_certificate(b)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_nonsplit_module_demo(p):
    out = nonsplit_module_demo(p)
    assert not out["split"] and "not split" in out["message"]
    assert nonsplit_module_demo(p, order=1)["split"]
    # coprime order splits by averaging
    assert nonsplit_module_demo(p, order=p + 1 if (p + 1) % p else p + 2)["split"] is ((p + 1) % p != 0)
