from __future__ import annotations

import pytest
from hypothesis import given, settings

from bredonfp import suite
from bredonfp.errors import NotAPGroupError
from bredonfp.gcomplex import GComplex
from bredonfp.groups import FiniteGroup
from bredonfp.smith import (
    abc_bredon,
    abc_topological,
    classify,
    euler_check,
    fixed_point_corollary_check,
    floyd_may_check,
    floyd_may_instances,
    induction_shadow_check,
    ready,
    smith_report,
)

from .strategies import ACTIONS, g_complexes

P_GROUP_ACTIONS = [a for a in ACTIONS if a[0]().order in (2, 4)]


def test_hexagon_sequences():
    X = suite.reflection_hexagon()
    assert abc_bredon(X, 2) == ([0, 1], [1, 1], [2, 0])
    assert abc_topological(X, 2) == ([0, 1], [1, 1], [2, 0])


def test_antipodal_sequences():
    X = ready(suite.antipodal_octahedron(), 2)
    a, b, c = abc_bredon(X, 2)
    assert (a, b, c) == ([1, 1, 1], [1, 0, 1], [0, 0, 0])
    assert abc_topological(X, 2) == (a, b, c)


def test_trivial_group_is_degenerate():
    X = GComplex.trivial_action([(0, 1), (1, 2), (0, 2)])
    rep = smith_report(X, 5)
    assert rep.c == [0, 0] and rep.a == rep.b == [1, 1]
    assert any("degenerate" in n for n in rep.notes) and rep.ok


def test_non_p_group_is_rejected():
    with pytest.raises(NotAPGroupError):
        abc_bredon(suite.member("s3_triangle").complex, 2)


def test_instance_arithmetic():
    inst, stab = floyd_may_instances([0, 1], [1, 1], [2, 0], 2, 2, True, 1, r_max=0)
    by = {(i.q, i.r): i for i in inst}
    # q = 0, r = 0: a0 + c0 <= b0 + a1
    assert (by[0, 0].lhs, by[0, 0].rhs) == (2, 2) and by[0, 0].tight
    assert (by[1, 0].lhs, by[1, 0].rhs) == (1, 1)
    assert all(s["holds"] for s in stab)
    # weights grow as (|P| - 1)^i
    inst, _ = floyd_may_instances([0, 0, 0], [0, 0, 1], [0, 0, 0], 4, 2, False, 2, r_max=0)
    top = {(i.q, i.r): i for i in inst}[0, 2]
    assert top.rhs == 9 and top.refined is None


def test_report_examples():
    rep = smith_report(suite.reflection_hexagon(), 2)
    assert rep.ok and rep.pipelines_agree
    assert (0, 1, False) in rep.tight and (0, 1, True) in rep.tight
    rep = smith_report(suite.antipodal_octahedron(), 2)
    assert rep.ok and (1, 0, True) in rep.tight
    rep = smith_report(suite.free_rotation_hexagon(), 3)
    assert rep.ok and rep.euler["free"] and rep.euler["divisibility"]


def test_euler_examples():
    e = euler_check(suite.reflection_hexagon())
    assert (e["chi_X"], e["chi_SX"], e["chi_free_quotient"]) == (0, 2, -1) and e["identity_holds"]
    e = euler_check(ready(suite.antipodal_octahedron(), 2))
    assert e["free"] and e["chi_X"] == 2 and e["divisibility"]


def test_classify():
    assert classify([]) == ("empty", -1)
    assert classify([1, 0, 0]) == ("point", 0)
    assert classify([2]) == ("sphere", 0)
    assert classify([1, 0, 1]) == ("sphere", 2)
    assert classify([1, 1, 1]) == ("other", None)


def test_corollary_examples():
    out = fixed_point_corollary_check(suite.member("cone_reflection_hexagon").complex, 2)
    assert out["X"] == "point" and out["fixed"] == "point" and out["ok"]
    out = fixed_point_corollary_check(suite.reflection_hexagon(), 2)
    assert out["fixed"] == "sphere" and out["fixed_dim"] == 0 and out["ok"]
    out = fixed_point_corollary_check(ready(suite.antipodal_octahedron(), 2), 2)
    assert out["empty_fixed_set"] and out["ok"]
    out = fixed_point_corollary_check(ready(suite.free_rotation_hexagon(), 3), 3)
    assert out["parity_checked"] and out["ok"]
    # four points swapped in pairs: neither acyclic nor a sphere
    G = FiniteGroup.cyclic(2)
    X = GComplex.from_generators(G, 4, [[1, 0, 3, 2]], [(0,), (1,), (2,), (3,)])
    out = fixed_point_corollary_check(X, 2)
    assert not out["hypothesis"] and out["message"] == "hypothesis not satisfied" and out["ok"]


def test_induction_shadow():
    X = suite.member("klein_octahedron").complex
    lat = X.group.lattice
    for Q in range(len(lat)):
        assert induction_shadow_check(X, lat.whole, Q)
    with pytest.raises(ValueError):
        induction_shadow_check(X, 1, lat.whole)


@pytest.mark.parametrize("name", [n for n in suite.names() if suite.member(n).primes])
def test_suite_reports(name):
    m = suite.member(name)
    for p in m.primes:
        rep = smith_report(m.for_prime(p), p, max_subdivisions=0)
        assert rep.pipelines_agree and rep.inequalities_hold and rep.ok, (name, p)


@settings(max_examples=30, deadline=None)
@given(g_complexes(actions=P_GROUP_ACTIONS))
def test_pipelines_and_inequalities_on_random_complexes(X):
    rep = smith_report(X, 2)
    assert rep.pipelines_agree
    assert rep.inequalities_hold
    assert rep.euler["identity_holds"]


@settings(max_examples=20, deadline=None)
@given(g_complexes(actions=[a for a in ACTIONS if a[0]().order == 3]))
def test_odd_prime_random_complexes(X):
    rep = smith_report(X, 3)
    assert rep.pipelines_agree and rep.inequalities_hold


def test_restricted_report_for_subgroup():
    X = suite.member("c4_octahedron").complex
    lat = X.group.lattice
    half = next(H.id for H in lat if H.order == 2)
    rep = floyd_may_check(X, 2, subgroup=half)
    assert rep.group_order == 2 and rep.ok
    assert floyd_may_check(X, 2).group_order == 4
