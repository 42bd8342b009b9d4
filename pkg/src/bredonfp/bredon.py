"""Equivariant chains ``C[X^?]`` and Bredon cohomology ``H^*_G(X, L)``.

The degree-q term of ``C[X^?]`` is the permutation system on the G-set of
q-simplices.  Cochains ``Hom(C_q, L)`` are realized through the orbit
decomposition ``C_q = sum_i R[G/H_i^?]``, which identifies them with
``sum_i L(H_i)``; a slower path through the generic morphism solver is kept
for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coeffsys import (
    CoeffSys,
    CSMorphism,
    GroupModule,
    PermutationSystem,
    atomic_system,
    constant_system,
    fixed_point_system,
    hom_space,
    sub_quotient,
)
from .errors import AdmissibilityError, RegularityError
from .gcomplex import (
    GComplex,
    cohomology_dims,
    fixed_subcomplex,
    quotient,
    prepare,
    relative_chain_complex,
    require_admissible,
    singular_set,
    chain_complex,
)
from .groups import FiniteGroup, GSet, SubgroupFamily
from .linalg import FpChainComplex, FpMatrix, LinearSolver, check_prime, homology_dims, rank


@dataclass
class CSComplex:
    """A bounded chain complex of coefficient systems in degrees ``0..len(terms)-1``.

    ``boundaries[q]`` maps ``terms[q]`` to ``terms[q-1]``; ``boundaries[0]`` is None.
    """

    group: FiniteGroup
    p: int
    terms: list[CoeffSys]
    boundaries: list[CSMorphism | None]
    source: GComplex | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if len(self.boundaries) != len(self.terms):
            raise ValueError("need one boundary slot per degree")
        if self.terms and self.boundaries[0] is not None:
            raise ValueError("the degree-0 boundary must be None")

    @property
    def length(self) -> int:
        return len(self.terms)

    @property
    def is_projective(self) -> bool:
        """True when every term carries an explicit orbit decomposition."""
        return all(isinstance(t, PermutationSystem) for t in self.terms)

    def boundary_at(self, q: int, H: int) -> FpMatrix:
        d = self.boundaries[q]
        if d is None:
            return FpMatrix.zeros(self.p, 0, self.terms[q].dims[H])
        return d.maps[H]

    def evaluate(self, H: int) -> FpChainComplex:
        """The chain complex of F_p-spaces ``C(H)``."""
        dims = [t.dims[H] for t in self.terms]
        diffs: list[FpMatrix | None] = [None]
        diffs += [self.boundaries[q].maps[H] for q in range(1, self.length)]  # type: ignore[union-attr]
        return FpChainComplex(self.p, dims, diffs[: len(dims)], checked=False)

    def check(self) -> bool:
        """``d o d = 0`` at every subgroup, and every boundary commutes with the structure maps."""
        for q in range(2, self.length):
            comp = self.boundaries[q - 1] @ self.boundaries[q]  # type: ignore[operator]
            if not comp.is_zero():
                return False
        return all(d is None or d.validate().ok for d in self.boundaries)

    def orbit_decomposition(self, q: int) -> list[tuple[int, int]]:
        term = self.terms[q]
        if not isinstance(term, PermutationSystem):
            raise TypeError("term has no orbit decomposition")
        return term.orbit_decomposition()

    def level_one(self, q: int) -> FpMatrix:
        return self.boundary_at(q, 0)


def _boundary_level_one(X: GComplex, q: int, p: int) -> np.ndarray:
    faces = X.simplices[q - 1]
    index = {s: i for i, s in enumerate(faces)}
    cells = X.simplices[q]
    m = np.zeros((len(faces), len(cells)), dtype=np.int64)
    for j, s in enumerate(cells):
        for i in range(q + 1):
            m[index[s[:i] + s[i + 1:]], j] = 1 if i % 2 == 0 else p - 1
    return m


def equivariant_chains(X: GComplex, p: int) -> CSComplex:
    """``C[X^?]`` over F_p; the level-K evaluation is spanned by the K-fixed simplices.

    Requires an admissible action, and for odd p an orientation-preserving one
    (automatic after a subdivision).
    """
    p = check_prime(p)
    require_admissible(X)
    if p != 2 and not X.is_orientation_preserving():
        raise AdmissibilityError(
            "the action reverses the orientation of some simplex; over odd p subdivide once"
        )
    terms: list[CoeffSys] = []
    for q in range(X.dim + 1):
        S = GSet(X.group, X.simplex_images(q), labels=X.simplices[q])
        terms.append(PermutationSystem(S, p, name=f"C_{q}"))
    bounds: list[CSMorphism | None] = [None] if terms else []
    for q in range(1, X.dim + 1):
        M = FpMatrix(_boundary_level_one(X, q, p), p)
        bounds.append(terms[q].level_one_morphism(terms[q - 1], M))  # type: ignore[attr-defined]
    return CSComplex(X.group, p, terms, bounds, source=X)


def _as_complex(X: GComplex | CSComplex, p: int | None) -> CSComplex:
    if isinstance(X, CSComplex):
        return X
    if p is None:
        raise ValueError("p is required when passing a GComplex")
    return equivariant_chains(X, p)


# ---------------------------------------------------------------------------
# cochains


def _orbit_cochains(C: CSComplex, L: CoeffSys) -> FpChainComplex:
    p = C.p
    decomps = [C.orbit_decomposition(q) for q in range(C.length)]
    offsets = []
    for dec in decomps:
        off = [0]
        for _, H in dec:
            off.append(off[-1] + L.dims[H])
        offsets.append(off)
    dims = [off[-1] for off in offsets]
    diffs: list[FpMatrix | None] = []
    for q in range(C.length):
        if q + 1 >= C.length:
            diffs.append(None)
            continue
        src_sys: PermutationSystem = C.terms[q]  # type: ignore[assignment]
        S = src_sys.gset
        bd = C.level_one(q + 1).a
        delta = np.zeros((dims[q + 1], dims[q]), dtype=np.int64)
        for j, (tau, Hj) in enumerate(decomps[q + 1]):
            r0, r1 = offsets[q + 1][j], offsets[q + 1][j + 1]
            if r0 == r1:
                continue
            for rho in np.nonzero(bd[:, tau])[0]:
                rho = int(rho)
                i = S.orbit_of[rho]
                Hi = decomps[q][i][1]
                c0, c1 = offsets[q][i], offsets[q][i + 1]
                if c0 == c1:
                    continue
                block = L.res_map(S.stabilizers[rho], Hj) @ L.conj_map(S.transporters[rho], Hi)
                delta[r0:r1, c0:c1] += int(bd[rho, tau]) * block.a
        diffs.append(FpMatrix(delta, p))
    return FpChainComplex(p, dims, diffs, cochain=True)


def _generic_cochains(C: CSComplex, L: CoeffSys) -> FpChainComplex:
    p = C.p
    bases = [hom_space(C.terms[q], L) for q in range(C.length)]
    dims = [len(b) for b in bases]
    diffs: list[FpMatrix | None] = []
    for q in range(C.length):
        if q + 1 >= C.length or not dims[q] or not dims[q + 1]:
            diffs.append(None if q + 1 >= C.length else FpMatrix.zeros(p, dims[q + 1], dims[q]))
            continue
        tgt = FpMatrix(np.stack([b.flat() for b in bases[q + 1]], axis=1), p)
        solver = LinearSolver(tgt)
        d = C.boundaries[q + 1]
        pulled = FpMatrix(np.stack([(phi @ d).flat() for phi in bases[q]], axis=1), p)  # type: ignore[operator]
        coeffs = solver.solve(pulled)
        if coeffs is None:
            raise ArithmeticError("pulled-back morphism left the Hom space")
        diffs.append(coeffs)
    return FpChainComplex(p, dims, diffs, cochain=True)


def bredon_cochains(X: GComplex | CSComplex, L: CoeffSys, method: str = "orbit") -> FpChainComplex:
    """The cochain complex ``Hom(C[X^?], L)``."""
    C = _as_complex(X, L.p)
    if C.p != L.p:
        raise ValueError("complex and coefficient system over different fields")
    if C.group is not L.group:
        raise ValueError("complex and coefficient system over different groups")
    if method == "orbit":
        return _orbit_cochains(C, L)
    if method == "generic":
        return _generic_cochains(C, L)
    raise ValueError(f"unknown method {method!r}")


def bredon_cohomology(
    X: GComplex | CSComplex, L: CoeffSys, method: str = "orbit", length: int | None = None
) -> list[int]:
    """Dimensions of ``H^q_G(X, L)`` for ``q = 0, 1, ...``."""
    dims = homology_dims(bredon_cochains(X, L, method))
    if length is not None:
        if any(dims[length:]):
            raise ValueError("requested length truncates nonzero cohomology")
        dims = (dims + [0] * length)[:length]
    return dims


# ---------------------------------------------------------------------------
# identifications


@dataclass
class Identification:
    coeff: str
    bredon: list[int]
    topological: list[int]
    meaning: str

    @property
    def ok(self) -> bool:
        return self.bredon == self.topological

    def to_json(self) -> dict:
        return {
            "coeff": self.coeff, "dims": self.bredon, "topological": self.topological,
            "meaning": self.meaning, "ok": self.ok,
        }


def standard_identifications(X: GComplex, p: int) -> list[Identification]:
    """Bredon cohomology with the regular fixed-point, atomic-at-G and constant systems,
    each beside the non-equivariant cohomology it should equal."""
    G = X.group
    n = max(X.dim + 1, 1)
    C = equivariant_chains(X, p)
    regular = fixed_point_system(GroupModule.regular(G, p))
    at_G = atomic_system(GroupModule.trivial(G, p), at_trivial_only=False)
    const = constant_system(G, p)
    XG = fixed_subcomplex(X, G.lattice.whole)
    Y, _ = quotient(X)
    return [
        Identification("regular", bredon_cohomology(C, regular, length=n), cohomology_dims(X, p, n), "H^*(X)"),
        Identification("atomic-G", bredon_cohomology(C, at_G, length=n), cohomology_dims(XG, p, n), "H^*(X^G)"),
        Identification("constant", bredon_cohomology(C, const, length=n), cohomology_dims(Y, p, n), "H^*(X/G)"),
    ]


def bredon_restriction_system(X: GComplex, p: int) -> list[dict]:
    """``H^*_H(X, const)`` for every subgroup H, beside ``H^*(X/H)``."""
    n = max(X.dim + 1, 1)
    rows = []
    for H in X.group.lattice:
        XH = X.restrict(H.id)
        bredon = bredon_cohomology(XH, constant_system(XH.group, p), length=n) if XH.dim >= 0 else [0] * n
        # regularity need not pass to subgroups; subdivide when it fails
        try:
            top = cohomology_dims(quotient(prepare(XH))[0], p, n)
        except RegularityError:
            top = None
        rows.append({
            "subgroup": H.id, "order": H.order, "bredon": bredon, "quotient": top,
            "ok": top is not None and top == bredon,
        })
    return rows


# ---------------------------------------------------------------------------
# restriction, localization, comparison


def _restricted_system(term: PermutationSystem, sub: FiniteGroup, embed: np.ndarray) -> PermutationSystem:
    S = term.gset
    return PermutationSystem(GSet(sub, S.images[embed], S.labels), term.p, name=term.name)


def restrict_complex(C: CSComplex, H: int) -> CSComplex:
    """Forgetful restriction of a complex of permutation systems to the subgroup ``H``."""
    sub, embed = C.group.subgroup_as_group(C.group.lattice[H])
    terms = [_restricted_system(t, sub, embed) for t in C.terms]  # type: ignore[arg-type]
    bounds: list[CSMorphism | None] = [None] if terms else []
    for q in range(1, C.length):
        bounds.append(terms[q].level_one_morphism(terms[q - 1], C.level_one(q)))
    return CSComplex(sub, C.p, terms, bounds)  # type: ignore[arg-type]


def complexes_equal(C: CSComplex, D: CSComplex) -> bool:
    """Equal on the nose: same group, same cell labels and actions, same boundary matrices."""
    if C.p != D.p or not np.array_equal(C.group.perms, D.group.perms):
        return False
    n = max(C.length, D.length)
    for q in range(n):
        a = C.terms[q] if q < C.length else None
        b = D.terms[q] if q < D.length else None
        sa = a.gset if a is not None else None  # type: ignore[union-attr]
        sb = b.gset if b is not None else None  # type: ignore[union-attr]
        size_a = sa.size if sa is not None else 0
        size_b = sb.size if sb is not None else 0
        if size_a != size_b:
            return False
        if size_a == 0:
            continue
        if list(sa.labels) != list(sb.labels) or not np.array_equal(sa.images, sb.images):
            return False
        if q and C.level_one(q) != D.level_one(q):
            return False
    return True


def naturality_check(X: GComplex, p: int, H: int) -> bool:
    """Restricting ``C[X^?]`` to ``H`` agrees with building it over ``H`` directly."""
    C = restrict_complex(equivariant_chains(X, p), H)
    D = equivariant_chains(X.restrict(H), p)
    if not complexes_equal(C, D):
        return False
    for K in range(len(C.group.lattice)):
        for q in range(C.length):
            if C.terms[q].dims[K] != D.terms[q].dims[K]:
                return False
    return True


def localize_complex(A: SubgroupFamily, C: CSComplex) -> CSComplex:
    """``L_A C`` for a complex of permutation systems.

    On ``R[S^?]`` the localization is ``R[S_A^?]``, where ``S_A`` collects the
    points whose stabilizer lies in A.
    """
    if A.lattice is not C.group.lattice:
        raise ValueError("family belongs to a different group")
    terms: list[PermutationSystem] = []
    kept: list[list[int]] = []
    for t in C.terms:
        S = t.gset  # type: ignore[attr-defined]
        pts = [x for x in range(S.size) if S.stabilizers[x] in A]
        kept.append(pts)
        terms.append(PermutationSystem(S.sub_gset(pts), C.p, name=f"L_A {t.name}"))
    bounds: list[CSMorphism | None] = [None] if terms else []
    for q in range(1, C.length):
        M = C.level_one(q).submatrix(kept[q - 1], kept[q])
        bounds.append(terms[q].level_one_morphism(terms[q - 1], M))
    return CSComplex(C.group, C.p, terms, bounds)  # type: ignore[arg-type]


def localization_check(X: GComplex, A: SubgroupFamily, p: int) -> bool:
    """``L_A C[X^?]`` equals ``C[(S_A X)^?]`` with identical bases."""
    C = equivariant_chains(X, p)
    return complexes_equal(localize_complex(A, C), equivariant_chains(singular_set(X, A), p))


# ---------------------------------------------------------------------------
# coinvariants and the quotient complex


@dataclass
class Coinvariants:
    chains: FpChainComplex
    orbits: list[list[int]]  # per degree, the least-index representative of every orbit
    span_ok: bool  # n - rank(span of (g-1)e) equals the number of orbits in every degree


def coinvariants(C: CSComplex) -> Coinvariants:
    """Coinvariants ``C(1)_G``; its basis is the set of cell orbits."""
    p = C.p
    reps_all, projs, lifts, span_ok = [], [], [], True
    for t in C.terms:
        S: GSet = t.gset  # type: ignore[attr-defined]
        reps = [orb[0] for orb in S.orbits]
        reps_all.append(reps)
        proj = np.zeros((len(reps), S.size), dtype=np.int64)
        proj[np.asarray(S.orbit_of, dtype=np.int64), np.arange(S.size)] = 1
        projs.append(FpMatrix(proj, p))
        lift = np.zeros((S.size, len(reps)), dtype=np.int64)
        lift[reps, np.arange(len(reps))] = 1
        lifts.append(FpMatrix(lift, p))
        if S.size:
            moved = []
            for gs in S.group.generator_indices:
                m = np.zeros((S.size, S.size), dtype=np.int64)
                m[S.images[gs], np.arange(S.size)] = 1
                moved.append(m - np.eye(S.size, dtype=np.int64))
            r = rank(FpMatrix(np.hstack(moved), p)) if moved else 0
            span_ok &= S.size - r == len(reps)
    diffs: list[FpMatrix | None] = [None] if C.terms else []
    for q in range(1, C.length):
        diffs.append(projs[q - 1] @ C.level_one(q) @ lifts[q])
    chains = FpChainComplex(p, [len(r) for r in reps_all], diffs)
    return Coinvariants(chains, reps_all, span_ok)


def _sort_sign(seq: Sequence[int]) -> int:
    order = np.argsort(np.asarray(seq))
    seen = np.zeros(len(order), dtype=bool)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = int(order[j])
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass
class QuotientComparison:
    ok: bool
    coinvariant_dims: list[int]
    quotient_dims: list[int]
    phi: list[FpMatrix]
    detail: str = ""


def quotient_comparison(X: GComplex, p: int) -> QuotientComparison:
    """The orbit-to-image map ``C(1)_G -> C[X/G]``: an isomorphism of chain complexes."""
    co = coinvariants(equivariant_chains(X, p))
    Y, proj = quotient(X)
    Yc = chain_complex(Y, p)
    phis = []
    for q, reps in enumerate(co.orbits):
        level = Y.simplices[q] if q <= Y.dim else ()
        idx = {s: i for i, s in enumerate(level)}
        m = np.zeros((len(level), len(reps)), dtype=np.int64)
        for j, rep in enumerate(reps):
            image = [int(proj[v]) for v in X.simplices[q][rep]]
            target = tuple(sorted(image))
            if len(set(image)) != len(image) or target not in idx:
                return QuotientComparison(False, co.chains.dims, Yc.dims, phis, f"degenerate image in degree {q}")
            m[idx[target], j] = _sort_sign(image) % p
        phis.append(FpMatrix(m, p))
    for q, phi in enumerate(phis):
        if phi.rows != phi.cols or rank(phi) != phi.cols:
            return QuotientComparison(False, co.chains.dims, Yc.dims, phis, f"not invertible in degree {q}")
        if q and Yc.diffs[q] @ phi != phis[q - 1] @ co.chains.diffs[q]:
            return QuotientComparison(False, co.chains.dims, Yc.dims, phis, f"not a chain map in degree {q}")
    return QuotientComparison(True, co.chains.dims, Yc.dims, phis)


@dataclass
class TriangleReport:
    quotient: CSComplex
    vanishes_off_trivial: bool
    matches_relative: bool
    dims_at_trivial: list[int]

    @property
    def ok(self) -> bool:
        return self.vanishes_off_trivial and self.matches_relative


def quotient_complex(C: CSComplex, sub: CSComplex, method: str = "direct") -> CSComplex:
    """``C / sub`` for a subcomplex of permutation systems on G-invariant subsets of cells.

    ``direct`` uses that ``R[S^?] / R[T^?]`` is the permutation system on ``S - T``
    with the boundary restricted to the surviving cells; ``generic`` forms the
    quotient systems by linear algebra in every subgroup.
    """
    p = C.p
    keeps = []
    for t, s in zip(C.terms, sub.terms):
        labels = set(s.gset.labels)  # type: ignore[attr-defined]
        S = t.gset  # type: ignore[attr-defined]
        keeps.append([x for x in range(S.size) if S.labels[x] not in labels])
    if method == "direct":
        terms = [PermutationSystem(t.gset.sub_gset(k), p, name=f"{t.name}/sub")  # type: ignore[attr-defined]
                 for t, k in zip(C.terms, keeps)]
        bounds: list[CSMorphism | None] = [None] if terms else []
        for q in range(1, C.length):
            M = C.level_one(q).submatrix(keeps[q - 1], keeps[q])
            bounds.append(terms[q].level_one_morphism(terms[q - 1], M))
        return CSComplex(C.group, p, terms, bounds)  # type: ignore[arg-type]
    if method != "generic":
        raise ValueError(f"unknown method {method!r}")
    qterms, sqs = [], []
    for t, keep in zip(C.terms, keeps):
        drop = set(range(t.gset.size)) - set(keep)  # type: ignore[attr-defined]
        gens = {}
        for H in range(len(C.group.lattice)):
            cols = [t.position[H][x] for x in t.fixed[H] if x in drop]  # type: ignore[attr-defined]
            m = np.zeros((t.dims[H], len(cols)), dtype=np.int64)
            m[cols, np.arange(len(cols))] = 1
            gens[H] = FpMatrix(m, p)
        sq = sub_quotient(t, gens)
        sqs.append(sq)
        qterms.append(sq.quotient)
    qbounds: list[CSMorphism | None] = [None] if qterms else []
    for q in range(1, C.length):
        maps = [
            sqs[q - 1].projection.maps[H] @ C.boundaries[q].maps[H] @ sqs[q].lifts[H]  # type: ignore[union-attr]
            for H in range(len(C.group.lattice))
        ]
        qbounds.append(CSMorphism(qterms[q], qterms[q - 1], maps))
    return CSComplex(C.group, p, qterms, qbounds)


def _same_map(a: FpMatrix | None, b: FpMatrix | None) -> bool:
    if a is None or b is None:
        return (a is None or a.is_zero()) and (b is None or b.is_zero())
    return a == b


def quotient_triangle(X: GComplex, p: int, method: str = "direct") -> TriangleReport:
    """``C[X^?] / L C[X^?]`` with L localizing at nontrivial subgroups.

    It should vanish at every nontrivial subgroup and be the relative chain
    complex of ``(X, SX)`` at the trivial one.
    """
    C = equivariant_chains(X, p)
    A = SubgroupFamily.nontrivial(X.group.lattice)
    Q = quotient_complex(C, localize_complex(A, C), method)
    vanish = all(t.dims[H] == 0 for t in Q.terms for H in range(1, len(X.group.lattice)))
    rel = relative_chain_complex(X, singular_set(X, A), p)
    at1 = Q.evaluate(0)
    match = at1.dims == rel.dims and all(_same_map(a, b) for a, b in zip(at1.diffs, rel.diffs))
    return TriangleReport(Q, vanish, match and Q.check(), at1.dims)

