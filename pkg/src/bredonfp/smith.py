"""Smith theory for a finite p-group P acting on a finite simplicial complex X.

Three sequences are attached to the action:

* ``a_q``: cohomology of the pair ``(X/P, SX/P)``, via the system ``R_0``;
* ``b_q``: cohomology of ``X``, via the fixed-point system of the regular module;
* ``c_q``: cohomology of the singular set ``SX``, via ``(RP)^? / (RP)_0``.

Each is computed twice, once with Bredon cohomology and once with a purely
non-equivariant pipeline, and the Floyd-May inequalities, the Euler identity
and the fixed-point corollaries are checked against them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .bredon import bredon_cohomology, equivariant_chains
from .coeffsys import FpMatrix, GroupModule, atomic_system, fixed_point_system, sub_quotient
from .errors import NotAPGroupError
from .gcomplex import (
    GComplex,
    cohomology_dims,
    euler_characteristics,
    fixed_subcomplex,
    prepare,
    quotient,
    relative_cohomology_dims,
    singular_set,
)
from .groups import SubgroupFamily
from .linalg import check_prime


def _require_p_group(X: GComplex, p: int) -> None:
    if not X.group.is_p_group(p):
        raise NotAPGroupError(f"a group of order {X.group.order} is not a {p}-group")


def ready(X: GComplex, p: int, max_subdivisions: int = 2) -> GComplex:
    """Subdivide as needed so the action is admissible, regular and, for odd p, oriented."""
    return prepare(X, max_subdivisions, oriented=p != 2)


def _length(X: GComplex) -> int:
    return max(X.dim + 1, 1)


def abc_bredon(X: GComplex, p: int) -> tuple[list[int], list[int], list[int]]:
    """``(a, b, c)`` as Bredon cohomology with ``R_0``, ``(RP)^?`` and ``(RP)^?/(RP)_0``."""
    p = check_prime(p)
    _require_p_group(X, p)
    P = X.group
    n = _length(X)
    C = equivariant_chains(X, p)
    regular = fixed_point_system(GroupModule.regular(P, p))
    top = sub_quotient(regular, {0: FpMatrix.identity(p, regular.dims[0])}).quotient
    r0 = atomic_system(GroupModule.trivial(P, p), at_trivial_only=True)
    a = bredon_cohomology(C, r0, length=n)
    b = bredon_cohomology(C, regular, length=n)
    c = bredon_cohomology(C, top, length=n)
    return a, b, c


def abc_topological(X: GComplex, p: int) -> tuple[list[int], list[int], list[int]]:
    """``(a, b, c)`` from ``H^*(X/P, SX/P)``, ``H^*(X)`` and ``H^*(SX)``, with no group action used
    beyond forming the singular set and the quotient."""
    p = check_prime(p)
    _require_p_group(X, p)
    n = _length(X)
    SX = singular_set(X, SubgroupFamily.nontrivial(X.group.lattice))
    Y, proj = quotient(X)
    SY = Y.with_simplices([tuple(sorted({int(proj[v]) for v in s})) for s in SX.maximal_simplices()])
    a = relative_cohomology_dims(Y, SY, p, n)
    b = cohomology_dims(X, p, n)
    c = cohomology_dims(SX, p, n)
    return a, b, c


@dataclass
class Instance:
    q: int
    r: int
    lhs: int
    rhs: int
    holds: bool
    tight: bool  # equality with both sides positive
    redundant: bool = False  # r > dim - q: the same inequality as for r = dim - q
    refined: dict | None = None  # the weight-free form, when its hypotheses hold


@dataclass
class SmithReport:
    p: int
    group_order: int
    dim: int
    a: list[int]
    b: list[int]
    c: list[int]
    a_top: list[int]
    b_top: list[int]
    c_top: list[int]
    refinement_applicable: bool
    instances: list[Instance]
    stabilized: list[dict]
    euler: dict
    corollary: dict
    notes: list[str] = field(default_factory=list)

    @property
    def pipelines_agree(self) -> bool:
        return (self.a, self.b, self.c) == (self.a_top, self.b_top, self.c_top)

    @property
    def inequalities_hold(self) -> bool:
        ok = all(i.holds and (i.refined is None or i.refined["holds"]) for i in self.instances)
        return ok and all(s["holds"] for s in self.stabilized)

    @property
    def tight(self) -> list[tuple[int, int, bool]]:
        """``(q, r, refined)`` for every non-redundant instance holding with equality."""
        out = []
        for i in self.instances:
            if i.redundant:
                continue
            if i.tight:
                out.append((i.q, i.r, False))
            if i.refined is not None and i.refined["tight"]:
                out.append((i.q, i.r, True))
        return out

    @property
    def ok(self) -> bool:
        return (
            self.pipelines_agree and self.inequalities_hold and self.euler["identity_holds"]
            and self.euler["divisibility"] is not False and self.corollary["ok"]
        )

    def to_json(self) -> dict:
        d = asdict(self)
        d["pipelines_agree"] = self.pipelines_agree
        d["inequalities_hold"] = self.inequalities_hold
        d["tight"] = [list(t) for t in self.tight]
        d["ok"] = self.ok
        return d


def _pad(seq: list[int], n: int) -> list[int]:
    return (list(seq) + [0] * n)[:n]


def floyd_may_instances(
    a: list[int], b: list[int], c: list[int], order: int, p: int, cyclic_of_order_p: bool,
    dim: int, r_max: int = 2,
) -> tuple[list[Instance], list[dict]]:
    """Every instance with ``q + r <= dim + 1 + r_max``, plus the stabilized forms."""
    bound = dim + 1 + r_max
    n = bound + 2
    a, b, c = _pad(a, n), _pad(b, n), _pad(c, n)
    w = order - 1
    out = []
    for q in range(bound + 1):
        for r in range(bound - q + 1):
            lhs = a[q] + sum(w ** i * c[q + i] for i in range(r + 1))
            rhs = sum(w ** i * b[q + i] for i in range(r + 1)) + w ** (r + 1) * a[q + r + 1]
            inst = Instance(q, r, lhs, rhs, lhs <= rhs, lhs == rhs > 0, redundant=q + r > max(dim, 0))
            if cyclic_of_order_p and (p == 2 or r % 2 == 0):
                rl = a[q] + sum(c[q + i] for i in range(r + 1))
                rr = sum(b[q + i] for i in range(r + 1)) + a[q + r + 1]
                inst.refined = {"lhs": rl, "rhs": rr, "holds": rl <= rr, "tight": rl == rr > 0}
            out.append(inst)
    stab = []
    for q in range(n):
        lhs = a[q] + sum(w ** i * c[q + i] for i in range(n - q))
        rhs = sum(w ** i * b[q + i] for i in range(n - q))
        stab.append({"q": q, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs})
    return out, stab


def euler_check(X: GComplex) -> dict:
    """``chi(X) = chi(SX) + |P| chi_c(free part / P)``, and ``|P|`` divides ``chi(X)`` for free actions."""
    e = euler_characteristics(X)
    order = X.group.order
    free = singular_set(X, SubgroupFamily.nontrivial(X.group.lattice)).dim < 0
    return {
        "chi_X": e.chi_X,
        "chi_SX": e.chi_SX,
        "chi_free_quotient": e.chi_c_free_orbits,
        "identity_holds": e.chi_X == e.chi_SX + order * e.chi_c_free_orbits,
        "free": free,
        "divisibility": (e.chi_X % order == 0) if free else None,
    }


def classify(dims: list[int]) -> tuple[str, int | None]:
    """``("point", 0)``, ``("sphere", n)``, ``("empty", -1)`` or ``("other", None)`` from Betti numbers."""
    nz = [(i, d) for i, d in enumerate(dims) if d]
    if not nz:
        return "empty", -1
    if nz == [(0, 1)]:
        return "point", 0
    if nz == [(0, 2)]:
        return "sphere", 0
    if len(nz) == 2 and nz[0] == (0, 1) and nz[1][1] == 1:
        return "sphere", nz[1][0]
    return "other", None


def fixed_point_corollary_check(X: GComplex, p: int) -> dict:
    """Acyclic ``X`` forces acyclic ``X^P``; a mod-p sphere ``X`` forces a mod-p sphere ``X^P``.

    An empty fixed set counts as the (-1)-sphere and is flagged.  The parity
    condition on the dimension drop is checked for odd p only.
    """
    p = check_prime(p)
    _require_p_group(X, p)
    n = _length(X)
    kind, dim = classify(cohomology_dims(X, p, n))
    XP = fixed_subcomplex(X, X.group.lattice.whole)
    fkind, fdim = classify(cohomology_dims(XP, p, n))
    out = {
        "X": kind, "X_dim": dim, "fixed": fkind, "fixed_dim": fdim,
        "hypothesis": kind in ("point", "sphere"), "empty_fixed_set": fkind == "empty",
        "parity_checked": False, "ok": True,
    }
    if kind == "point":
        out["ok"] = fkind == "point"
    elif kind == "sphere":
        out["ok"] = fkind in ("sphere", "empty")
        if out["ok"] and p != 2 and X.group.order > 1:
            out["parity_checked"] = True
            out["ok"] = (dim - fdim) % 2 == 0  # type: ignore[operator]
    else:
        out["message"] = "hypothesis not satisfied"
    return out


def induction_shadow_check(X: GComplex, P: int, Q: int) -> bool:
    """``X^P = (X^Q)^P`` as complexes, for ``Q`` normal in ``P``."""
    lat = X.group.lattice
    if not lat.le[Q, P]:
        raise ValueError("Q must be a subgroup of P")
    direct = fixed_subcomplex(X, P)
    XQ = fixed_subcomplex(X, Q, keep_action=True)
    twice = fixed_subcomplex(XQ, P)
    return direct.simplices == twice.simplices


def smith_report(X: GComplex, p: int, r_max: int = 2, max_subdivisions: int = 2) -> SmithReport:
    """All Smith-theory checks for the action of ``X.group`` (a p-group) on ``X``."""
    p = check_prime(p)
    _require_p_group(X, p)
    X = ready(X, p, max_subdivisions)
    P = X.group
    a, b, c = abc_bredon(X, p)
    at, bt, ct = abc_topological(X, p)
    cyclic_p = P.order == p
    inst, stab = floyd_may_instances(a, b, c, P.order, p, cyclic_p, X.dim, r_max)
    notes = ["sequences vanish above the dimension, so every 'sufficiently large' hypothesis holds"]
    if P.order == 1:
        notes.append("degenerate: trivial group, empty singular set, c = 0 and a = b")
    elif not any(c):
        notes.append("empty singular set: a is the cohomology of X/P")
    if cyclic_p and p != 2:
        notes.append("weight-free form not applied for odd r")
    return SmithReport(
        p=p, group_order=P.order, dim=X.dim, a=a, b=b, c=c, a_top=at, b_top=bt, c_top=ct,
        refinement_applicable=cyclic_p, instances=inst, stabilized=stab,
        euler=euler_check(X), corollary=fixed_point_corollary_check(X, p), notes=notes,
    )



def floyd_may_check(X: GComplex, p: int, r_max: int = 2, subgroup: int | None = None) -> SmithReport:
    """The Smith report for ``X.group``, or for the subgroup with lattice id ``subgroup`` acting by restriction."""
    if subgroup is not None:
        X = X.restrict(subgroup)
    return smith_report(X, p, r_max)
