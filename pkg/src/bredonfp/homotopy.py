"""Contracting homotopies, splittings and homotopy equivalences for complexes of
permutation (hence projective) coefficient systems.

A morphism out of ``R[S^?]`` is fixed by the images of the orbit generators,
each an arbitrary vector of the target evaluated at the stabilizer.  All
splittings below are found by solving for those generator values, so every
solution is a genuine morphism of coefficient systems by construction.
Morphisms between permutation systems are stored by their matrix at the
trivial subgroup; the other components are submatrices of it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bredon import CSComplex, equivariant_chains
from .coeffsys import CSMorphism, GroupModule, PermutationSystem
from .gcomplex import GComplex, subdivide
from .groups import FiniteGroup, GSet
from .linalg import FpMatrix, LinearSolver, homology_dims, matmul_mod, solve_affine_operator


def _empty_system(C: CSComplex) -> PermutationSystem:
    return PermutationSystem(GSet(C.group, np.zeros((C.group.order, 0), dtype=np.int64), []), C.p)


def _term(C: CSComplex, q: int) -> PermutationSystem:
    if 0 <= q < C.length:
        return C.terms[q]  # type: ignore[return-value]
    return _empty_system(C)


def _size(C: CSComplex, q: int) -> int:
    return C.terms[q].dims[0] if 0 <= q < C.length else 0


def _d(C: CSComplex, q: int) -> np.ndarray:
    """Level-one boundary ``C_q -> C_{q-1}`` as an array (zero outside the range)."""
    if 1 <= q < C.length:
        return C.level_one(q).a
    return np.zeros((_size(C, q - 1), _size(C, q)), dtype=np.int64)


def _morphism(src: PermutationSystem, tgt: PermutationSystem, m: np.ndarray, p: int) -> CSMorphism:
    return src.level_one_morphism(tgt, FpMatrix(m, p))


# ---------------------------------------------------------------------------
# chain maps


@dataclass
class ChainMap:
    """Degreewise morphisms ``source_q -> target_q`` commuting with the boundaries."""

    source: CSComplex
    target: CSComplex
    maps: list[CSMorphism]

    def __post_init__(self) -> None:
        n = max(self.source.length, self.target.length)
        if len(self.maps) != n:
            raise ValueError(f"need {n} components")

    @classmethod
    def from_level_one(cls, source: CSComplex, target: CSComplex, mats: Sequence[np.ndarray]) -> "ChainMap":
        p = source.p
        n = max(source.length, target.length)
        maps = [_morphism(_term(source, q), _term(target, q), np.asarray(mats[q]) % p, p) for q in range(n)]
        return cls(source, target, maps)

    @classmethod
    def identity(cls, C: CSComplex) -> "ChainMap":
        return cls.from_level_one(C, C, [np.eye(_size(C, q), dtype=np.int64) for q in range(C.length)])

    def level_one(self, q: int) -> np.ndarray:
        if 0 <= q < len(self.maps):
            return self.maps[q].maps[0].a
        return np.zeros((_size(self.target, q), _size(self.source, q)), dtype=np.int64)

    def is_chain_map(self) -> bool:
        for q in range(1, len(self.maps)):
            lhs = matmul_mod(_d(self.target, q), self.level_one(q), self.source.p)
            rhs = matmul_mod(self.level_one(q - 1), _d(self.source, q), self.source.p)
            if ((lhs - rhs) % self.source.p).any():
                return False
        return all(f.validate().ok for f in self.maps)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        n = max(other.source.length, self.target.length, len(self.maps), len(other.maps))
        mats = [matmul_mod(self.level_one(q), other.level_one(q), self.source.p) for q in range(n)]
        return ChainMap.from_level_one(other.source, self.target, mats[: max(other.source.length, self.target.length)])


# ---------------------------------------------------------------------------
# certificates


@dataclass
class HomotopyCertificate:
    """Degreewise ``s_q: C_q -> C_{q+1}``; ``kind`` is "contracting" or "homotopy"."""

    complex: CSComplex
    s: list[np.ndarray]  # level-one matrices
    kind: str = "contracting"
    method: str = "inductive"

    def morphisms(self) -> list[CSMorphism]:
        C, p = self.complex, self.complex.p
        return [_morphism(_term(C, q), _term(C, q + 1), self.s[q], p) for q in range(C.length)]

    def to_json(self) -> dict:
        C = self.complex
        return {
            "kind": self.kind,
            "method": self.method,
            "p": C.p,
            "sizes": [_size(C, q) for q in range(C.length)],
            "s": [np.asarray(m).tolist() for m in self.s],
            "d": [_d(C, q).tolist() for q in range(1, C.length)],
        }


def verify_certificate(cert: HomotopyCertificate) -> bool:
    """``d s + s d = id`` at every subgroup, by direct matrix arithmetic on the morphisms."""
    C = cert.complex
    if len(cert.s) != C.length:
        return False
    try:
        s = cert.morphisms()
    except ValueError:
        return False
    if not all(m.validate().ok for m in s):
        return False
    p = C.p
    for q in range(C.length):
        for H in range(len(C.group.lattice)):
            n = C.terms[q].dims[H]
            total = np.zeros((n, n), dtype=np.int64)
            if q + 1 < C.length:
                total += matmul_mod(C.boundaries[q + 1].maps[H].a, s[q].maps[H].a, p)  # type: ignore[union-attr]
            if q >= 1:
                total += matmul_mod(s[q - 1].maps[H].a, C.boundaries[q].maps[H].a, p)  # type: ignore[union-attr]
            if ((total - np.eye(n, dtype=np.int64)) % p).any():
                return False
    return True


def _contract_inductive(C: CSComplex) -> list[np.ndarray] | None:
    p = C.p
    s: list[np.ndarray] = []
    prev = np.zeros((_size(C, 0), _size(C, -1)), dtype=np.int64)
    for q in range(C.length):
        src: PermutationSystem = C.terms[q]  # type: ignore[assignment]
        tgt = _term(C, q + 1)
        dq, dnext = _d(C, q), _d(C, q + 1)
        decomp = src.orbit_decomposition()
        by_subgroup: dict[int, list[int]] = defaultdict(list)
        for i, (_, H) in enumerate(decomp):
            by_subgroup[H].append(i)
        values: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * len(decomp)
        for H, idx in sorted(by_subgroup.items()):
            rows = list(src.fixed[H])
            cols = list(tgt.fixed[H])
            reps = [decomp[i][0] for i in idx]
            # right-hand sides e_x - s_{q-1} d_q e_x, restricted to the H-fixed q-cells
            rhs = -matmul_mod(prev, dq[:, reps], p) if q else np.zeros((_size(C, q), len(reps)), dtype=np.int64)
            rhs[reps, np.arange(len(reps))] += 1
            rhs %= p
            block = FpMatrix(dnext[np.ix_(rows, cols)], p)
            sol = LinearSolver(block).solve(FpMatrix(rhs[rows], p))
            if sol is None:
                return None
            for k, i in enumerate(idx):
                values[i] = sol.a[:, k]
        cur = src.extend_level_one(tgt, values)
        s.append(cur)
        prev = cur
    return s


def _generator_layout(C: CSComplex) -> list[list[tuple[int, int, int]]]:
    """Per degree, ``(orbit index, offset, width)`` of the unknowns for ``s_q``."""
    out, off = [], 0
    for q in range(C.length):
        src: PermutationSystem = C.terms[q]  # type: ignore[assignment]
        tgt = _term(C, q + 1)
        level = []
        for i, (_, H) in enumerate(src.orbit_decomposition()):
            w = tgt.dims[H]
            level.append((i, off, w))
            off += w
        out.append(level)
    return out


def _contract_global(C: CSComplex) -> list[np.ndarray] | None:
    p = C.p
    layout = _generator_layout(C)
    n_unknowns = sum(w for level in layout for _, _, w in level)

    def build(x: np.ndarray) -> list[np.ndarray]:
        mats = []
        for q, level in enumerate(layout):
            vals = [x[o:o + w] for _, o, w in level]
            mats.append(C.terms[q].extend_level_one(_term(C, q + 1), vals))  # type: ignore[attr-defined]
        return mats

    def op(x: np.ndarray) -> np.ndarray:
        s = build(x)
        parts = []
        for q in range(C.length):
            total = _d(C, q + 1) @ s[q]
            if q:
                total = total + s[q - 1] @ _d(C, q)
            parts.append(total.reshape(-1))
        return np.concatenate(parts) % p if parts else np.zeros(0, dtype=np.int64)

    target = np.concatenate([np.eye(_size(C, q), dtype=np.int64).reshape(-1) for q in range(C.length)])
    if n_unknowns == 0:
        return [np.zeros((_size(C, q + 1), _size(C, q)), dtype=np.int64) for q in range(C.length)] \
            if not target.any() else None
    x = solve_affine_operator(op, target, p, n_unknowns)
    return None if x is None else build(x)


def contracting_homotopy(C: CSComplex, method: str = "inductive") -> HomotopyCertificate | None:
    """A contracting homotopy of a complex of permutation systems, or None if none exists.

    ``inductive`` solves degree by degree at the orbit generators, which finds a
    contraction whenever the complex is exact at every subgroup; ``global``
    solves the whole affine system ``ds + sd = id`` at once.
    """
    if not C.is_projective:
        raise TypeError("contracting homotopies need complexes of permutation systems")
    if method == "inductive":
        s = _contract_inductive(C)
    elif method == "global":
        s = _contract_global(C)
    else:
        raise ValueError(f"unknown method {method!r}")
    if s is None:
        return None
    return HomotopyCertificate(C, [m % C.p for m in s], "contracting", method)


# ---------------------------------------------------------------------------
# retractions and splittings


@dataclass
class SplitResult:
    ok: bool
    message: str
    morphism: CSMorphism | None = None


def retraction(f: CSMorphism) -> SplitResult:
    """A morphism ``r`` with ``r f = id`` for a monomorphism of permutation systems."""
    src, tgt = f.source, f.target
    if not isinstance(src, PermutationSystem) or not isinstance(tgt, PermutationSystem):
        raise TypeError("retractions are computed between permutation systems")
    if not f.is_mono():
        bad = [H for H, m in enumerate(f.maps) if m.rank() < m.cols]
        return SplitResult(False, f"not a monomorphism (fails at subgroups {bad})")
    p = f.p
    F = f.maps[0].a
    widths = [src.dims[H] for _, H in tgt.orbit_decomposition()]
    offs = np.concatenate([[0], np.cumsum(widths)]).astype(int)

    def build(x: np.ndarray) -> np.ndarray:
        return tgt.extend_level_one(src, [x[offs[i]:offs[i + 1]] for i in range(len(widths))])

    n = int(offs[-1])
    target = np.eye(src.dims[0], dtype=np.int64).reshape(-1)
    if n == 0:
        if target.any():
            return SplitResult(False, "no retraction exists")
        return SplitResult(True, "retraction found", _morphism(tgt, src, np.zeros((0, tgt.dims[0]), np.int64), p))
    x = solve_affine_operator(lambda u: (build(u) @ F).reshape(-1) % p, target, p, n)
    if x is None:
        return SplitResult(False, "no retraction exists")
    return SplitResult(True, "retraction found", _morphism(tgt, src, build(x) % p, p))


def split_boundary(C: CSComplex) -> list[np.ndarray] | None:
    """Level-one ``sigma_q: C_{q-1} -> C_q`` with ``d sigma d = d`` in every degree, or None."""
    p = C.p
    out = [np.zeros((_size(C, 0), 0), dtype=np.int64)]
    for q in range(1, C.length):
        D = _d(C, q)
        src: PermutationSystem = C.terms[q - 1]  # type: ignore[assignment]
        tgt: PermutationSystem = C.terms[q]  # type: ignore[assignment]
        reps = [x for x, _ in tgt.orbit_decomposition()]
        widths = [tgt.dims[H] for _, H in src.orbit_decomposition()]
        offs = np.concatenate([[0], np.cumsum(widths)]).astype(int)

        def build(x: np.ndarray) -> np.ndarray:
            return src.extend_level_one(tgt, [x[offs[i]:offs[i + 1]] for i in range(len(widths))])

        n = int(offs[-1])
        target = D[:, reps] % p
        if n == 0:
            if target.any():
                return None
            out.append(np.zeros((_size(C, q), _size(C, q - 1)), dtype=np.int64))
            continue
        # equivariance reduces D sigma D = D to the orbit representatives of C_q
        x = solve_affine_operator(lambda u: (D @ build(u) @ D[:, reps]).reshape(-1) % p, target.reshape(-1), p, n)
        if x is None:
            return None
        out.append(build(x) % p)
    return out


# ---------------------------------------------------------------------------
# cones and homotopy equivalences


def cone(f: ChainMap) -> CSComplex:
    """``cone_q = source_{q-1} + target_q`` with ``d(x, y) = (-dx, f x + dy)``."""
    C, D, p = f.source, f.target, f.source.p
    n = max(C.length + 1, D.length)
    terms: list[PermutationSystem] = []
    for q in range(n):
        S = _term(C, q - 1).gset.disjoint_union(_term(D, q).gset, tags=("s", "t"))
        terms.append(PermutationSystem(S, p, name=f"cone_{q}"))
    bounds: list[CSMorphism | None] = [None] if terms else []
    for q in range(1, n):
        a, b = _size(C, q - 1), _size(D, q)
        a2, b2 = _size(C, q - 2), _size(D, q - 1)
        m = np.zeros((a2 + b2, a + b), dtype=np.int64)
        m[:a2, :a] = -_d(C, q - 1)
        m[a2:, :a] = f.level_one(q - 1)
        m[a2:, a:] = _d(D, q)
        bounds.append(_morphism(terms[q], terms[q - 1], m % p, p))
    return CSComplex(C.group, p, terms, bounds)  # type: ignore[arg-type]


def _exact(C: CSComplex, H: int) -> bool:
    return not any(homology_dims(C.evaluate(H)))


@dataclass
class EquivalenceReport:
    quasi_iso_at_1: bool
    certificate: HomotopyCertificate | None = None
    inverse: ChainMap | None = None
    homotopy_source: list[np.ndarray] = field(default_factory=list)  # k with gf - id = dk + kd
    homotopy_target: list[np.ndarray] = field(default_factory=list)  # h' with fg - id = dh' + h'd
    verified: bool = False
    quasi_iso_at: dict[int, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "quasi_iso_at_1": self.quasi_iso_at_1,
            "certificate": self.certificate is not None,
            "verified": self.verified,
            "quasi_iso_at": {str(k): v for k, v in sorted(self.quasi_iso_at.items())},
        }


def _homotopy_identity(
    src: CSComplex, lhs: list[np.ndarray], k: list[np.ndarray], p: int
) -> bool:
    """``lhs_q = d_{q+1} k_q + k_{q-1} d_q`` at every subgroup (via fixed-cell submatrices)."""
    for q in range(src.length):
        total = matmul_mod(_d(src, q + 1), k[q], p)
        if q:
            total = total + matmul_mod(k[q - 1], _d(src, q), p)
        if ((total - lhs[q]) % p).any():
            return False
    # the level-K identities are submatrices of the level-one identity
    return all(
        _morphism(_term(src, q), _term(src, q + 1), k[q] % p, p).validate().ok for q in range(src.length)
    )


def homotopy_equivalence_check(f: ChainMap, method: str = "inductive") -> EquivalenceReport:
    """If ``f`` is a quasi-isomorphism at the trivial subgroup, certify it as a homotopy equivalence.

    The certificate is a contracting homotopy of ``cone(f)``; from it come a
    homotopy inverse ``g`` and homotopies ``gf ~ id`` and ``fg ~ id``.
    """
    C, D, p = f.source, f.target, f.source.p
    K = cone(f)
    q1 = _exact(K, 0)  # f(1) is a quasi-isomorphism iff its cone is exact at 1
    rep = EquivalenceReport(q1)
    if not q1:
        return rep
    for H in range(len(C.group.lattice)):
        rep.quasi_iso_at[H] = _exact(K, H)
    cert = contracting_homotopy(K, method)
    if cert is None:
        return rep
    rep.certificate = cert
    nC, nD = C.length, D.length
    n = max(nC, nD)
    g, k, h = [], [], []
    for q in range(n):
        # s_q on cone_q = C_{q-1} + D_q lands in cone_{q+1} = C_q + D_{q+1}
        s = cert.s[q] if q < len(cert.s) else np.zeros((_size(C, q) + _size(D, q + 1), _size(C, q - 1) + _size(D, q)), np.int64)
        a_in = _size(C, q - 1)
        a_out = _size(C, q)
        g.append(s[:a_out, a_in:])
        h.append(s[a_out:, a_in:])
    for q in range(nC):
        # k_q: C_q -> C_{q+1} is the C-block of s_{q+1} on the C_q summand of cone_{q+1}
        s = cert.s[q + 1] if q + 1 < len(cert.s) else None
        a_out = _size(C, q + 1)
        k.append(s[:a_out, :_size(C, q)] if s is not None else np.zeros((a_out, _size(C, q)), np.int64))
    ginv = ChainMap.from_level_one(D, C, [g[q] % p for q in range(n)])
    rep.inverse = ginv
    rep.homotopy_source = [m % p for m in k]
    rep.homotopy_target = [(-m) % p for m in h[:nD]]
    eye = lambda X, q: np.eye(_size(X, q), dtype=np.int64)  # noqa: E731
    gf = [(matmul_mod(ginv.level_one(q), f.level_one(q), p) - eye(C, q)) % p for q in range(nC)]
    fg = [(matmul_mod(f.level_one(q), ginv.level_one(q), p) - eye(D, q)) % p for q in range(nD)]
    rep.verified = (
        verify_certificate(cert)
        and ginv.is_chain_map()
        and _homotopy_identity(C, gf, rep.homotopy_source, p)
        and _homotopy_identity(D, fg, rep.homotopy_target, p)
    )
    return rep


# ---------------------------------------------------------------------------
# maps induced by simplicial maps


def _sort_with_sign(seq: Sequence[int]) -> tuple[tuple[int, ...], int]:
    arr = list(seq)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return tuple(arr), sign


def _same_group(X: GComplex, Y: GComplex) -> GComplex:
    if Y.group is X.group:
        return Y
    if not np.array_equal(Y.group.perms, X.group.perms):
        raise ValueError("complexes carry actions of different groups")
    return GComplex(X.group, Y.vertex_count, Y.vertex_images, Y.maximal_simplices(),
                    is_subdivision=Y.is_subdivision, origin=Y.origin)


def induced_chain_map(X: GComplex, Y: GComplex, vertex_map: Sequence[int], p: int) -> ChainMap:
    """Chain map ``C[X^?] -> C[Y^?]`` of an equivariant simplicial map given on vertices."""
    Y = _same_group(X, Y)
    vm = np.asarray(vertex_map, dtype=np.int64)
    for g in range(X.group.order):
        if not np.array_equal(vm[X.vertex_images[g]], Y.vertex_images[g][vm]):
            raise ValueError(f"vertex map is not equivariant under element {g}")
    CX, CY = equivariant_chains(X, p), equivariant_chains(Y, p)
    mats = []
    for q in range(max(CX.length, CY.length)):
        m = np.zeros((_size(CY, q), _size(CX, q)), dtype=np.int64)
        if q <= X.dim:
            for j, s in enumerate(X.simplices[q]):
                image = [int(vm[v]) for v in s]
                if len(set(image)) < len(image):
                    continue
                srt, sign = _sort_with_sign(image)
                if not Y.contains(srt):
                    raise ValueError(f"simplex {s} maps onto the non-simplex {srt}")
                m[Y.index(srt), j] = sign % p
        mats.append(m)
    f = ChainMap.from_level_one(CX, CY, mats)
    return f


def subdivision_chain_map(X: GComplex, p: int) -> tuple[GComplex, ChainMap]:
    """The subdivision operator ``C[X^?] -> C[(sd X)^?]``.

    ``sd(v) = b_v`` and ``sd(sigma) = (-1)^n (sd(boundary sigma)) * b_sigma``,
    where ``* b`` appends the barycentre, the largest label in every flag.
    """
    Y = subdivide(X)
    bary = {s: i for i, s in enumerate(Y.origin)}  # type: ignore[arg-type]
    chains: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {}
    for q in range(X.dim + 1):
        for s in X.simplices[q]:
            b = bary[s]
            if q == 0:
                chains[s] = {(b,): 1}
                continue
            acc: dict[tuple[int, ...], int] = defaultdict(int)
            for i in range(q + 1):
                face = s[:i] + s[i + 1:]
                for flag, c in chains[face].items():
                    acc[flag + (b,)] += (-1) ** i * c
            sign = (-1) ** q
            chains[s] = {k: sign * v for k, v in acc.items() if v % p}
    CX, CY = equivariant_chains(X, p), equivariant_chains(Y, p)
    mats = []
    for q in range(CX.length):
        m = np.zeros((_size(CY, q), _size(CX, q)), dtype=np.int64)
        for j, s in enumerate(X.simplices[q]):
            for flag, c in chains[s].items():
                m[Y.index(flag), j] = c % p
        mats.append(m)
    return Y, ChainMap.from_level_one(CX, CY, mats)


# ---------------------------------------------------------------------------
# the module-level counterexample


def nonsplit_module_demo(p: int, order: int | None = None) -> dict:
    """The inclusion ``R -> R C_n`` of the invariant line has no module retraction when ``p | n``.

    ``order`` defaults to p; ``order = 1`` is the trivial-group control.
    """
    n = p if order is None else order
    G = FiniteGroup.cyclic(n) if n > 1 else FiniteGroup.trivial()
    V = GroupModule.regular(G, p)
    incl = np.ones((V.dim, 1), dtype=np.int64)  # sum of the group elements

    # unknown row vector r with r rho(s) = r for every generator and r incl = 1
    def op(r: np.ndarray) -> np.ndarray:
        parts = [(r @ V.matrix(gs).a - r) for gs in G.generator_indices]
        parts.append(r @ incl)
        return np.concatenate([np.asarray(x).reshape(-1) for x in parts]) % p

    target = np.zeros(len(G.generator_indices) * V.dim + 1, dtype=np.int64)
    target[-1] = 1
    x = solve_affine_operator(op, target, p, V.dim)
    quotient_dim = V.dim - 1
    return {
        "p": p,
        "group_order": n,
        "sequence": f"R -> RC_{n} -> quotient of dimension {quotient_dim}",
        "retraction_exists": x is not None,
        "split": x is not None,
        "message": "split" if x is not None else "not split: no module retraction of the invariant line",
    }
