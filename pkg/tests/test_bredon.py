from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings

from bredonfp import suite
from bredonfp.bredon import (
    bredon_cohomology,
    bredon_restriction_system,
    coinvariants,
    equivariant_chains,
    localization_check,
    localize_complex,
    naturality_check,
    quotient_comparison,
    quotient_triangle,
    standard_identifications,
)
from bredonfp.coeffsys import GroupModule, atomic_system, constant_system, fixed_point_system
from bredonfp.gcomplex import GComplex, cohomology_dims, prepare
from bredonfp.groups import FiniteGroup, SubgroupFamily
from bredonfp.linalg import homology_dims

from .oracles import betti
from .strategies import g_complexes

SYSTEMS = [
    lambda G, p: constant_system(G, p),
    lambda G, p: fixed_point_system(GroupModule.regular(G, p)),
    lambda G, p: atomic_system(GroupModule.trivial(G, p), at_trivial_only=False),
    lambda G, p: atomic_system(GroupModule.trivial(G, p)),
]


@pytest.mark.parametrize("name", ["reflection_hexagon", "free_c3_hexagon", "klein_octahedron", "s3_triangle"])
def test_orbit_and_generic_cochains_agree(name):
    for p in (2, 3):
        X = prepare(suite.member(name).raw, 2, oriented=p != 2)
        for make in SYSTEMS:
            L = make(X.group, p)
            assert bredon_cohomology(X, L) == bredon_cohomology(X, L, method="generic")


def test_single_fixed_point():
    G = FiniteGroup.cyclic(2)
    pt = GComplex(G, 1, np.zeros((2, 1), dtype=np.int64), [(0,)])
    for make in SYSTEMS:
        L = make(G, 2)
        # cochains on a fixed point are the value at the whole group
        assert bredon_cohomology(pt, L) == [L.dims[G.lattice.whole]]


def test_evaluations_of_chain_systems():
    X = suite.reflection_hexagon()
    C = equivariant_chains(X, 2)
    assert C.check()
    at_G = C.evaluate(X.group.lattice.whole)
    assert at_G.dims == [2, 0]
    at_1 = C.evaluate(0)
    assert at_1.dims == [6, 6] and homology_dims(at_1) == [1, 1]


@pytest.mark.parametrize("name", suite.names(include_cones=False))
def test_standard_identifications(name):
    m = suite.member(name)
    for p in m.primes or (2, 3):
        X = m.for_prime(p)
        for ident in standard_identifications(X, p):
            assert ident.ok, (name, p, ident.coeff, ident.bredon, ident.topological)


def test_hexagon_identifications_values():
    rows = {i.coeff: i.bredon for i in standard_identifications(suite.reflection_hexagon(), 2)}
    assert rows == {"regular": [1, 1], "atomic-G": [2, 0], "constant": [1, 0]}


@pytest.mark.parametrize("name", ["reflection_hexagon", "klein_octahedron", "c4_octahedron", "s3_triangle"])
def test_restriction_table_and_naturality(name):
    X = suite.member(name).complex
    rows = bredon_restriction_system(X, 2)
    assert len(rows) == len(X.group.lattice)
    assert all(r["ok"] for r in rows)
    for H in range(len(X.group.lattice)):
        assert naturality_check(X, 2, H)


def test_localization_examples():
    X = suite.reflection_hexagon()
    lat = X.group.lattice
    C = equivariant_chains(X, 2)
    everything = localize_complex(SubgroupFamily.everything(lat), C)
    assert [t.gset.size for t in everything.terms] == [6, 6]
    nontrivial = localize_complex(SubgroupFamily.nontrivial(lat), C)
    assert [t.gset.size for t in nontrivial.terms] == [2, 0]
    R = suite.member("free_c3_hexagon").complex
    L = localize_complex(SubgroupFamily.nontrivial(R.group.lattice), equivariant_chains(R, 3))
    assert all(t.gset.size == 0 for t in L.terms)
    for A in SubgroupFamily.all_families(X.group.lattice):
        assert localization_check(X, A, 2)


def test_coinvariants_and_quotient():
    R = suite.member("free_c3_hexagon").complex
    co = coinvariants(equivariant_chains(R, 3))
    assert co.span_ok and homology_dims(co.chains) == [1, 1]
    cmp = quotient_comparison(suite.reflection_hexagon(), 2)
    assert cmp.ok and cmp.coinvariant_dims == [4, 3]


def test_quotient_triangle():
    rep = quotient_triangle(suite.reflection_hexagon(), 2)
    assert rep.ok and rep.dims_at_trivial == [4, 6]
    generic = quotient_triangle(suite.reflection_hexagon(), 2, method="generic")
    assert generic.ok and generic.dims_at_trivial == [4, 6]
    free = quotient_triangle(suite.member("free_c3_hexagon").complex, 3)
    C = equivariant_chains(suite.member("free_c3_hexagon").complex, 3)
    assert free.ok and free.dims_at_trivial == C.evaluate(0).dims


@settings(max_examples=30, deadline=None)
@given(g_complexes())
def test_identifications_on_random_complexes(X):
    for p in (2, 3):
        X = prepare(X, 2, oriented=p != 2)
        rows = {i.coeff: i for i in standard_identifications(X, p)}
        assert all(i.ok for i in rows.values())
        assert rows["regular"].bredon == betti(X.maximal_simplices(), p, max(X.dim + 1, 1))


@settings(max_examples=30, deadline=None)
@given(g_complexes())
def test_localization_and_triangle_on_random_complexes(X):
    X = prepare(X)
    for A in SubgroupFamily.all_families(X.group.lattice):
        assert localization_check(X, A, 2)
    assert quotient_comparison(X, 2).ok
    assert quotient_triangle(X, 2).ok
