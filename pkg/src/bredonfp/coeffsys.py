"""Coefficient systems over F_p on a finite group, and their morphisms.

A coefficient system assigns a vector space ``L(H)`` to every subgroup and
carries restriction maps ``L(H) -> L(K)`` for ``K <= H`` and conjugation maps
``L(H) -> L(gHg^-1)``.  Only the maps along covering pairs ``K < H`` (``K``
maximal in ``H``) and conjugations by group generators are stored; all other
structure maps are composites, and ``validate`` checks that the composites
are independent of the path chosen.

Every ``L(H)`` has a fixed ordered basis and all maps are matrices acting on
coordinate columns.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CharacteristicError, DimensionError, FamilyError
from .groups import FiniteGroup, GSet, SubgroupFamily, SubgroupLattice, coset_gset
from .linalg import FpMatrix, block_diag, check_prime, nullspace, rank, rref_array, solve

ArrowKey = tuple  # ("res", H, K) | ("up", K, H) | ("conj", s, H)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    axiom: int | None = None
    location: str = ""
    message: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "axiom": self.axiom, "location": self.location, "message": self.message}


def _as_matrix(m, p: int, shape: tuple[int, int]) -> FpMatrix:
    if isinstance(m, FpMatrix):
        if m.p != p:
            raise CharacteristicError(f"matrix over F_{m.p} in a system over F_{p}")
        mat = m
    else:
        arr = np.array(m, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(shape)
        mat = FpMatrix(arr, p)
    if mat.shape != shape:
        raise DimensionError(f"structure map has shape {mat.shape}, expected {shape}")
    return mat


class _System:
    """Shared storage for coefficient and efficient systems."""

    group: FiniteGroup
    lattice: SubgroupLattice
    p: int
    dims: tuple[int, ...]
    name: str

    def _init_common(self, group: FiniteGroup, p: int, dims: Sequence[int], name: str) -> None:
        self.group = group
        self.lattice = group.lattice
        self.p = check_prime(p)
        dims = tuple(int(d) for d in dims)
        if len(dims) != len(self.lattice):
            raise DimensionError(f"need {len(self.lattice)} dimensions, got {len(dims)}")
        self.dims = dims
        self.name = name

    def _check_compatible(self, other: "_System") -> None:
        if other.group is not self.group:
            raise ValueError("systems over different groups")
        if other.p != self.p:
            raise CharacteristicError(f"mixing F_{self.p} and F_{other.p}")

    def arrows(self) -> list[tuple[ArrowKey, int, int]]:
        raise NotImplementedError

    def arrow_matrix(self, key: ArrowKey) -> FpMatrix:
        raise NotImplementedError


class CoeffSys(_System):
    """A coefficient system: restrictions go from larger to smaller subgroups."""

    def __init__(
        self,
        group: FiniteGroup,
        p: int,
        dims: Sequence[int],
        res: Mapping[tuple[int, int], object] | None = None,
        conj: Mapping[tuple[int, int], object] | None = None,
        name: str = "",
    ) -> None:
        self._init_common(group, p, dims, name)
        lat = self.lattice
        res = dict(res or {})
        conj = dict(conj or {})
        self.res: dict[tuple[int, int], FpMatrix] = {}
        for H, K in lat.covering_pairs():
            shape = (self.dims[K], self.dims[H])
            m = res.pop((H, K), None)
            self.res[(H, K)] = FpMatrix.zeros(self.p, *shape) if m is None else _as_matrix(m, self.p, shape)
        if res:
            raise ValueError(f"restriction given on non-covering pairs {sorted(res)}")
        self.conj: dict[tuple[int, int], FpMatrix] = {}
        for s, gs in enumerate(group.generator_indices):
            for H in range(len(lat)):
                shape = (self.dims[lat.conj(gs, H)], self.dims[H])
                m = conj.pop((s, H), None)
                self.conj[(s, H)] = FpMatrix.zeros(self.p, *shape) if m is None else _as_matrix(m, self.p, shape)
        if conj:
            raise ValueError(f"conjugation given for unknown keys {sorted(conj)}")
        self._res_cache: dict[tuple[int, int], FpMatrix] = {}
        self._conj_cache: dict[tuple[int, int], FpMatrix] = {}

    # derived structure maps ------------------------------------------------

    def res_map(self, H: int, K: int) -> FpMatrix:
        """Restriction ``L(H) -> L(K)`` along a canonical chain of covering pairs."""
        key = (H, K)
        hit = self._res_cache.get(key)
        if hit is not None:
            return hit
        lat = self.lattice
        if not lat.le[K, H]:
            raise ValueError(f"subgroup {K} is not contained in {H}")
        if H == K:
            out = FpMatrix.identity(self.p, self.dims[H])
        else:
            mid = next(M for M in lat.covers[H] if lat.le[K, M])
            out = self.res_map(mid, K) @ self.res[(H, mid)]
        self._res_cache[key] = out
        return out

    def conj_map(self, g: int, H: int) -> FpMatrix:
        """Conjugation ``L(H) -> L(gHg^-1)`` along the canonical generator word for ``g``."""
        key = (g, H)
        hit = self._conj_cache.get(key)
        if hit is not None:
            return hit
        if g == 0:
            out = FpMatrix.identity(self.p, self.dims[H])
        else:
            s, h = self.group.word_tree[g]
            out = self.conj[(s, self.lattice.conj(h, H))] @ self.conj_map(h, H)
        self._conj_cache[key] = out
        return out

    def arrows(self) -> list[tuple[ArrowKey, int, int]]:
        lat = self.lattice
        out = [(("res", H, K), H, K) for H, K in lat.covering_pairs()]
        for s, gs in enumerate(self.group.generator_indices):
            out.extend((("conj", s, H), H, lat.conj(gs, H)) for H in range(len(lat)))
        return out

    def arrow_matrix(self, key: ArrowKey) -> FpMatrix:
        kind, a, b = key
        return self.res[(a, b)] if kind == "res" else self.conj[(a, b)]

    # checks ----------------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check the five axioms; report the first violation found."""
        lat, G, p = self.lattice, self.group, self.p
        n = len(lat)
        for H in range(n):
            if self.res_map(H, H) != FpMatrix.identity(p, self.dims[H]):
                return ValidationReport(False, 1, f"H={H}", "res^H_H is not the identity")
        for H in range(n):
            for K in lat.covers[H]:
                for J in range(n):
                    if lat.le[J, K] and self.res_map(K, J) @ self.res[(H, K)] != self.res_map(H, J):
                        return ValidationReport(
                            False, 2, f"H={H}, K={K}, J={J}",
                            "restriction depends on the chain of subgroups",
                        )
        for s, gs in enumerate(G.generator_indices):
            for g in range(G.order):
                sg = G.mul(gs, g)
                for H in range(n):
                    lhs = self.conj[(s, lat.conj(g, H))] @ self.conj_map(g, H)
                    if lhs != self.conj_map(sg, H):
                        return ValidationReport(
                            False, 3, f"generator {s}, g={g}, H={H}",
                            "c_{s,gH} c_{g,H} != c_{sg,H}",
                        )
        for s, gs in enumerate(G.generator_indices):
            for H, K in lat.covering_pairs():
                sH, sK = lat.conj(gs, H), lat.conj(gs, K)
                if self.res[(sH, sK)] @ self.conj[(s, H)] != self.conj[(s, K)] @ self.res[(H, K)]:
                    return ValidationReport(
                        False, 4, f"generator {s}, H={H}, K={K}",
                        "restriction does not commute with conjugation",
                    )
        for H in lat:
            for h in H.elements:
                if self.conj_map(h, H.id) != FpMatrix.identity(p, self.dims[H.id]):
                    return ValidationReport(
                        False, 5, f"h={h}, H={H.id}", "an element of H acts nontrivially on L(H)"
                    )
        return ValidationReport(True)

    # module views ------------------------------------------------------------

    def module_at_trivial(self) -> "GroupModule":
        """``L(1)`` as an F_pG-module via the conjugation maps."""
        return GroupModule(
            self.group, self.p,
            [self.conj[(s, 0)] for s in range(len(self.group.generators))],
            name=f"{self.name}(1)",
        )

    def restrict_to(self, H: int) -> "CoeffSys":
        """Forgetful restriction to the subgroup ``H`` (a system over ``H`` as its own group)."""
        sub, embed = self.group.subgroup_as_group(self.lattice[H])
        ids = subgroup_id_map(sub, embed, self.lattice)
        slat = sub.lattice
        res = {(A, B): self.res_map(ids[A], ids[B]) for A, B in slat.covering_pairs()}
        conj = {
            (s, A): self.conj_map(int(embed[gs]), ids[A])
            for s, gs in enumerate(sub.generator_indices)
            for A in range(len(slat))
        }
        return CoeffSys(sub, self.p, [self.dims[ids[A]] for A in range(len(slat))], res, conj,
                        name=f"Res({self.name})")

    # serialization ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "dims": {str(H): d for H, d in enumerate(self.dims)},
            "res": {f"{H}>{K}": m.to_list() for (H, K), m in self.res.items()},
            "conj": {f"{s}@{H}": m.to_list() for (s, H), m in self.conj.items()},
        }

    @classmethod
    def from_json(cls, data: dict | str, group: FiniteGroup) -> "CoeffSys":
        if isinstance(data, str):
            data = json.loads(data)
        p = int(data["p"])
        dims_in = data["dims"]
        dims = [int(dims_in.get(str(H), 0)) for H in range(len(group.lattice))]
        res = {}
        for key, m in data.get("res", {}).items():
            H, K = (int(x) for x in key.split(">"))
            res[(H, K)] = np.array(m, dtype=np.int64).reshape(dims[K], dims[H])
        conj = {}
        for key, m in data.get("conj", {}).items():
            s, H = key.split("@")
            s = int(s.replace("gen_", "").replace("gen", ""))
            H = int(H)
            tgt = group.lattice.conj(group.generator_indices[s], H)
            conj[(s, H)] = np.array(m, dtype=np.int64).reshape(dims[tgt], dims[H])
        return cls(group, p, dims, res, conj, name=data.get("name", ""))

    def __repr__(self) -> str:
        return f"CoeffSys({self.name or '?'}, p={self.p}, dims={list(self.dims)})"


class EffSys(_System):
    """An efficient system: structure maps ``E(K) -> E(H)`` for ``K <= H``.

    Conjugation is stored as plain transposes, ``conj[(s, H)]: E(sHs^-1) -> E(H)``;
    no contragredient convention is imposed.
    """

    def __init__(
        self,
        group: FiniteGroup,
        p: int,
        dims: Sequence[int],
        up: Mapping[tuple[int, int], FpMatrix],
        conj: Mapping[tuple[int, int], FpMatrix],
        name: str = "",
    ) -> None:
        self._init_common(group, p, dims, name)
        lat = self.lattice
        self.up = {
            (K, H): _as_matrix(up[(K, H)], self.p, (self.dims[H], self.dims[K]))
            for H, K in lat.covering_pairs()
        }
        self.conj = {
            (s, H): _as_matrix(conj[(s, H)], self.p, (self.dims[H], self.dims[lat.conj(gs, H)]))
            for s, gs in enumerate(group.generator_indices)
            for H in range(len(lat))
        }

    def arrows(self) -> list[tuple[ArrowKey, int, int]]:
        lat = self.lattice
        out = [(("up", K, H), K, H) for H, K in lat.covering_pairs()]
        for s, gs in enumerate(self.group.generator_indices):
            out.extend((("conj", s, H), lat.conj(gs, H), H) for H in range(len(lat)))
        return out

    def arrow_matrix(self, key: ArrowKey) -> FpMatrix:
        kind, a, b = key
        return self.up[(a, b)] if kind == "up" else self.conj[(a, b)]

    def validate(self) -> ValidationReport:
        """The dual axioms are the axioms of the transposed coefficient system."""
        return dualize_eff(self).validate()

    def __repr__(self) -> str:
        return f"EffSys({self.name or '?'}, p={self.p}, dims={list(self.dims)})"


def subgroup_id_map(sub: FiniteGroup, embed: np.ndarray, lattice: SubgroupLattice) -> list[int]:
    """Lattice ids in ``lattice`` of the subgroups of ``sub`` (embedded via ``embed``)."""
    return [lattice.id_of(int(embed[e]) for e in K.elements) for K in sub.lattice]


# ---------------------------------------------------------------------------
# morphisms


class CSMorphism:
    """A morphism of (coefficient or efficient) systems: one matrix per subgroup."""

    def __init__(self, source: _System, target: _System, maps: Sequence[FpMatrix]) -> None:
        source._check_compatible(target)
        if len(maps) != len(source.lattice):
            raise DimensionError("need one matrix per subgroup")
        for H, m in enumerate(maps):
            if m.shape != (target.dims[H], source.dims[H]):
                raise DimensionError(
                    f"component at subgroup {H} has shape {m.shape}, "
                    f"expected {(target.dims[H], source.dims[H])}"
                )
        self.source = source
        self.target = target
        self.maps = tuple(maps)

    @classmethod
    def identity(cls, L: _System) -> "CSMorphism":
        return cls(L, L, [FpMatrix.identity(L.p, d) for d in L.dims])

    @classmethod
    def zero(cls, L: _System, M: _System) -> "CSMorphism":
        return cls(L, M, [FpMatrix.zeros(L.p, M.dims[H], L.dims[H]) for H in range(len(L.dims))])

    @property
    def p(self) -> int:
        return self.source.p

    def __getitem__(self, H: int) -> FpMatrix:
        return self.maps[H]

    def __matmul__(self, other: "CSMorphism") -> "CSMorphism":
        """Composition ``self o other``."""
        return CSMorphism(other.source, self.target, [a @ b for a, b in zip(self.maps, other.maps)])

    def __add__(self, other: "CSMorphism") -> "CSMorphism":
        return CSMorphism(self.source, self.target, [a + b for a, b in zip(self.maps, other.maps)])

    def __sub__(self, other: "CSMorphism") -> "CSMorphism":
        return CSMorphism(self.source, self.target, [a - b for a, b in zip(self.maps, other.maps)])

    def __neg__(self) -> "CSMorphism":
        return CSMorphism(self.source, self.target, [-a for a in self.maps])

    def scale(self, c: int) -> "CSMorphism":
        return CSMorphism(self.source, self.target, [a.scale(c) for a in self.maps])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CSMorphism):
            return NotImplemented
        return all(a == b for a, b in zip(self.maps, other.maps))

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.maps)

    def validate(self) -> ValidationReport:
        """Check that the components commute with every stored structure map."""
        for key, a, b in self.source.arrows():
            lhs = self.target.arrow_matrix(key) @ self.maps[a]
            rhs = self.maps[b] @ self.source.arrow_matrix(key)
            if lhs != rhs:
                return ValidationReport(False, None, str(key), "morphism does not commute")
        return ValidationReport(True)

    def is_mono(self) -> bool:
        return all(rank(m) == m.cols for m in self.maps)

    def is_epi(self) -> bool:
        return all(rank(m) == m.rows for m in self.maps)

    def is_iso(self) -> bool:
        return all(m.rows == m.cols and rank(m) == m.cols for m in self.maps)

    def flat(self) -> np.ndarray:
        return np.concatenate([m.a.reshape(-1) for m in self.maps]) if self.maps else np.zeros(0, np.int64)

    def to_json(self) -> dict:
        return {"maps": {str(H): m.to_list() for H, m in enumerate(self.maps)}}


# ---------------------------------------------------------------------------
# group modules


class GroupModule:
    """A finite-dimensional F_pG-module given by the matrices of the generators."""

    def __init__(self, group: FiniteGroup, p: int, gen_matrices: Sequence, name: str = "") -> None:
        self.group = group
        self.p = check_prime(p)
        self.name = name
        mats = [m if isinstance(m, FpMatrix) else FpMatrix(np.array(m, dtype=np.int64), p) for m in gen_matrices]
        if len(mats) != len(group.generators):
            raise ValueError("one matrix per group generator required")
        dims = {m.shape for m in mats}
        if len(dims) > 1 or any(r != c for r, c in dims):
            raise DimensionError("generator matrices must be square and of equal size")
        self.dim = mats[0].rows if mats else int(name and 0)
        self.gens = tuple(mats)
        elems: list[FpMatrix | None] = [None] * group.order
        elems[0] = FpMatrix.identity(self.p, self.dim)
        tree = group.word_tree
        pending = list(range(1, group.order))
        while pending:
            rest = []
            for g in pending:
                s, h = tree[g]
                if elems[h] is None:
                    rest.append(g)
                else:
                    elems[g] = mats[s] @ elems[h]
            pending = rest
        self.elements = tuple(elems)  # type: ignore[arg-type]
        for s, gs in enumerate(group.generator_indices):
            for g in range(group.order):
                if mats[s] @ self.elements[g] != self.elements[group.mul(gs, g)]:
                    raise ValueError("generator matrices violate the group relations")

    @classmethod
    def with_dim(cls, group: FiniteGroup, p: int, gen_matrices: Sequence, dim: int, name: str = "") -> "GroupModule":
        if not group.generators:
            mod = cls.__new__(cls)
            mod.group, mod.p, mod.name, mod.dim = group, check_prime(p), name, dim
            mod.gens = ()
            mod.elements = (FpMatrix.identity(mod.p, dim),)
            return mod
        return cls(group, p, gen_matrices, name)

    def matrix(self, g: int) -> FpMatrix:
        return self.elements[g]

    @classmethod
    def trivial(cls, group: FiniteGroup, p: int, dim: int = 1) -> "GroupModule":
        return cls.with_dim(group, p, [FpMatrix.identity(p, dim)] * len(group.generators), dim, name="R")

    @classmethod
    def permutation(cls, S: GSet, p: int, name: str = "") -> "GroupModule":
        mats = []
        for gs in S.group.generator_indices:
            m = np.zeros((S.size, S.size), dtype=np.int64)
            m[S.images[gs], np.arange(S.size)] = 1
            mats.append(FpMatrix(m, p))
        return cls.with_dim(S.group, p, mats, S.size, name=name or "R[S]")

    @classmethod
    def regular(cls, group: FiniteGroup, p: int) -> "GroupModule":
        trivial = group.lattice[0]
        return cls.permutation(coset_gset(group, trivial), p, name="RG")

    def invariants(self, elements: Iterable[int]) -> FpMatrix:
        """Reduced-echelon basis (as columns) of the vectors fixed by the given elements."""
        blocks = [self.matrix(h) - FpMatrix.identity(self.p, self.dim) for h in elements]
        if not blocks:
            return FpMatrix.identity(self.p, self.dim)
        stacked = FpMatrix(np.vstack([b.a for b in blocks]), self.p)
        return nullspace(stacked)


def module_homs(V: GroupModule, W: GroupModule) -> list[FpMatrix]:
    """Basis of Hom_{F_pG}(V, W), solved directly on generator matrices."""
    if V.p != W.p:
        raise CharacteristicError("modules over different fields")
    m, n = W.dim, V.dim
    rows = []
    for A, B in zip(W.gens, V.gens):
        # A X - X B = 0, row-major vec(X)
        rows.append(np.kron(A.a, np.eye(n, dtype=np.int64)) - np.kron(np.eye(m, dtype=np.int64), B.a.T))
    if not rows:
        basis = FpMatrix.identity(V.p, m * n)
    else:
        basis = nullspace(FpMatrix(np.vstack(rows), V.p))
    return [FpMatrix(basis.a[:, k].reshape(m, n), V.p) for k in range(basis.cols)]


# ---------------------------------------------------------------------------
# standard systems


def constant_system(G: FiniteGroup, p: int) -> CoeffSys:
    lat = G.lattice
    one = FpMatrix.identity(p, 1)
    res = {pair: one for pair in lat.covering_pairs()}
    conj = {(s, H): one for s in range(len(G.generators)) for H in range(len(lat))}
    return CoeffSys(G, p, [1] * len(lat), res, conj, name="const")


def fixed_point_system(V: GroupModule) -> CoeffSys:
    """``V^?``: the fixed vectors ``V^H``, with inclusions and the module action."""
    G, p = V.group, V.p
    lat = G.lattice
    bases = [V.invariants(lat.generators_of(H)) for H in range(len(lat))]
    res = {(H, K): solve(bases[K], bases[H]) for H, K in lat.covering_pairs()}
    conj = {}
    for s, gs in enumerate(G.generator_indices):
        for H in range(len(lat)):
            conj[(s, H)] = solve(bases[lat.conj(gs, H)], V.matrix(gs) @ bases[H])
    L = CoeffSys(G, p, [b.cols for b in bases], res, conj, name=f"{V.name}^?")
    L.bases = bases  # type: ignore[attr-defined]
    return L


def atomic_system(V: GroupModule, at_trivial_only: bool = True) -> CoeffSys:
    """``V`` placed at one subgroup and zero elsewhere.

    With ``at_trivial_only`` the value sits at the trivial subgroup and carries
    the module action (``V_0``); otherwise it sits at the whole group with
    trivial conjugation (``R_G``-style).
    """
    G, p = V.group, V.p
    lat = G.lattice
    at = lat.trivial if at_trivial_only else lat.whole
    dims = [0] * len(lat)
    dims[at] = V.dim
    conj = {}
    for s, gs in enumerate(G.generator_indices):
        if at_trivial_only:
            conj[(s, at)] = V.matrix(gs)
        else:
            conj[(s, at)] = FpMatrix.identity(p, V.dim)
    suffix = "0" if at_trivial_only else "G"
    return CoeffSys(G, p, dims, {}, conj, name=f"{V.name}_{suffix}")


class PermutationSystem(CoeffSys):
    """``R[S^?]`` for a finite G-set S: the free module on ``S^H`` at each ``H``.

    The basis of ``L(H)`` is the sorted list of ``H``-fixed points.  These
    systems are projective; their orbit decomposition exhibits them as a sum
    of the systems ``R[G/H^?]``.
    """

    def __init__(self, S: GSet, p: int, name: str = "") -> None:
        G = S.group
        lat = G.lattice
        self.gset = S
        fixed = [S.fixed_points(H) for H in range(len(lat))]
        self.fixed = tuple(tuple(f) for f in fixed)
        self.position = tuple({x: i for i, x in enumerate(f)} for f in fixed)
        res = {}
        for H, K in lat.covering_pairs():
            m = np.zeros((len(fixed[K]), len(fixed[H])), dtype=np.int64)
            for j, x in enumerate(fixed[H]):
                m[self.position[K][x], j] = 1
            res[(H, K)] = FpMatrix(m, p)
        conj = {}
        for s, gs in enumerate(G.generator_indices):
            for H in range(len(lat)):
                sH = lat.conj(gs, H)
                m = np.zeros((len(fixed[sH]), len(fixed[H])), dtype=np.int64)
                for j, x in enumerate(fixed[H]):
                    m[self.position[sH][int(S.images[gs, x])], j] = 1
                conj[(s, H)] = FpMatrix(m, p)
        super().__init__(G, p, [len(f) for f in fixed], res, conj, name=name or "R[S^?]")

    def conj_map(self, g: int, H: int) -> FpMatrix:
        key = (g, H)
        hit = self._conj_cache.get(key)
        if hit is None:
            gH = self.lattice.conj(g, H)
            m = np.zeros((self.dims[gH], self.dims[H]), dtype=np.int64)
            for j, x in enumerate(self.fixed[H]):
                m[self.position[gH][int(self.gset.images[g, x])], j] = 1
            hit = self._conj_cache[key] = FpMatrix(m, self.p)
        return hit

    def res_map(self, H: int, K: int) -> FpMatrix:
        key = (H, K)
        hit = self._res_cache.get(key)
        if hit is None:
            if not self.lattice.le[K, H]:
                raise ValueError(f"subgroup {K} is not contained in {H}")
            m = np.zeros((self.dims[K], self.dims[H]), dtype=np.int64)
            for j, x in enumerate(self.fixed[H]):
                m[self.position[K][x], j] = 1
            hit = self._res_cache[key] = FpMatrix(m, self.p)
        return hit

    def orbit_decomposition(self) -> list[tuple[int, int]]:
        """``(representative point, stabilizer id)`` for every orbit, by least representative."""
        stab = self.gset.stabilizers
        return [(orb[0], stab[orb[0]]) for orb in self.gset.orbits]

    def generator_values(self, f: CSMorphism) -> list[FpMatrix]:
        """Images of the orbit generators: ``f(H_i)(e_{x_i})`` in ``target(H_i)``."""
        out = []
        for x, H in self.orbit_decomposition():
            col = self.position[H][x]
            out.append(FpMatrix(f.maps[H].a[:, col:col + 1], self.p))
        return out

    def morphism_from_generators(self, target: CoeffSys, values: Sequence[FpMatrix]) -> CSMorphism:
        """The unique morphism sending each orbit generator to the given vector (adjunction)."""
        decomp = self.orbit_decomposition()
        if len(values) != len(decomp):
            raise DimensionError("one value per orbit required")
        lat = self.lattice
        if isinstance(target, PermutationSystem):
            level1 = self.extend_level_one(target, [v.a[:, 0] for v in values])
            return self.level_one_morphism(target, FpMatrix(level1, self.p))
        maps = []
        for K in range(len(lat)):
            m = np.zeros((target.dims[K], self.dims[K]), dtype=np.int64)
            for j, x in enumerate(self.fixed[K]):
                i = self.gset.orbit_of[x]
                rep, H = decomp[i]
                g = self.gset.transporters[x]
                stab = lat.conj(g, H)
                vec = target.res_map(stab, K) @ target.conj_map(g, H) @ values[i]
                m[:, j] = vec.a[:, 0]
            maps.append(FpMatrix(m, self.p))
        return CSMorphism(self, target, maps)

    def extend_level_one(self, target: "PermutationSystem", values: Sequence[np.ndarray]) -> np.ndarray:
        """Level-one matrix of the morphism sending orbit generator i to ``values[i]``.

        ``values[i]`` holds coordinates in the target's ``H_i``-fixed basis.
        """
        S, T = self.gset, target.gset
        out = np.zeros((target.dims[0], S.size), dtype=np.int64)
        decomp = self.orbit_decomposition()
        trans = np.asarray(S.transporters, dtype=np.int64)
        orbit_of = np.asarray(S.orbit_of, dtype=np.int64)
        for i, (_, H) in enumerate(decomp):
            v = np.asarray(values[i], dtype=np.int64).reshape(-1) % self.p
            nz = np.nonzero(v)[0]
            if not len(nz):
                continue
            ys = np.asarray(target.fixed[H], dtype=np.int64)[nz]
            xs = np.nonzero(orbit_of == i)[0]
            rows = T.images[trans[xs][:, None], ys[None, :]]
            out[rows, xs[:, None]] = v[nz][None, :]
        return out

    def level_one_morphism(self, target: "PermutationSystem", M: FpMatrix) -> CSMorphism:
        """Morphism ``R[S^?] -> R[T^?]`` with the given matrix at the trivial subgroup.

        The matrix must be G-equivariant and map each ``K``-fixed point into the
        span of ``K``-fixed points; the other components are its restrictions.
        """
        maps = [M]
        for K in range(1, len(self.lattice)):
            maps.append(M.submatrix(target.fixed[K], self.fixed[K]))
        f = CSMorphism(self, target, maps)
        # support condition: entries from K-fixed columns land in K-fixed rows
        for K in range(1, len(self.lattice)):
            cols = list(self.fixed[K])
            if not cols:
                continue
            block = M.a[:, cols]
            mask = np.ones(M.rows, dtype=bool)
            mask[list(target.fixed[K])] = False
            if block[mask].any():
                raise ValueError(f"matrix does not preserve fixed points of subgroup {K}")
        return f

    def direct_sum(self, other: "PermutationSystem") -> "PermutationSystem":
        return PermutationSystem(self.gset.disjoint_union(other.gset), self.p)


def gset_system(S: GSet, p: int) -> PermutationSystem:
    return PermutationSystem(S, p)


def projective_system(G: FiniteGroup, H: int, p: int) -> PermutationSystem:
    """``R[G/H^?]``, which represents evaluation at ``H``."""
    return PermutationSystem(coset_gset(G, G.lattice[H]), p, name=f"R[G/{H}^?]")


def direct_sum(L: CoeffSys, M: CoeffSys) -> CoeffSys:
    L._check_compatible(M)
    res = {k: block_diag([L.res[k], M.res[k]], L.p) for k in L.res}
    conj = {k: block_diag([L.conj[k], M.conj[k]], L.p) for k in L.conj}
    dims = [a + b for a, b in zip(L.dims, M.dims)]
    return CoeffSys(L.group, L.p, dims, res, conj, name=f"({L.name}+{M.name})")


# ---------------------------------------------------------------------------
# Hom spaces


def hom_space(L: _System, M: _System) -> list[CSMorphism]:
    """Basis of the morphisms ``L -> M``, from the linear system of commuting squares."""
    L._check_compatible(M)
    if type(L) is not type(M) and not (isinstance(L, CoeffSys) and isinstance(M, CoeffSys)):
        raise TypeError("cannot mix coefficient and efficient systems")
    p = L.p
    n = len(L.dims)
    offs = [0]
    for H in range(n):
        offs.append(offs[-1] + M.dims[H] * L.dims[H])
    total = offs[-1]
    blocks = []
    for key, a, b in L.arrows():
        Ma, La = M.arrow_matrix(key), L.arrow_matrix(key)
        rows = M.dims[b] * L.dims[a]
        if rows == 0:
            continue
        eq = np.zeros((rows, total), dtype=np.int64)
        # M_a X_a - X_b L_a = 0 in row-major coordinates
        eq[:, offs[a]:offs[a + 1]] += np.kron(Ma.a, np.eye(L.dims[a], dtype=np.int64))
        eq[:, offs[b]:offs[b + 1]] -= np.kron(np.eye(M.dims[b], dtype=np.int64), La.a.T)
        blocks.append(eq)
    if blocks:
        basis = nullspace(FpMatrix(np.vstack(blocks), p))
    else:
        basis = FpMatrix.identity(p, total)
    out = []
    for k in range(basis.cols):
        v = basis.a[:, k]
        maps = [
            FpMatrix(v[offs[H]:offs[H + 1]].reshape(M.dims[H], L.dims[H]), p) for H in range(n)
        ]
        out.append(CSMorphism(L, M, maps))
    return out


def find_isomorphism(L: _System, M: _System, max_enumerate: int = 1 << 12, tries: int = 4000,
                     seed: int = 0) -> CSMorphism | None:
    """An invertible morphism ``L -> M`` from the Hom space, or None.

    Small Hom spaces are enumerated exhaustively (so None is then a proof of
    non-isomorphism); larger ones are sampled with a seeded generator.
    """
    if L.dims != M.dims:
        return None
    basis = hom_space(L, M)
    p = L.p
    if not basis:
        return CSMorphism.zero(L, M) if not any(L.dims) else None

    def combo(coeffs) -> CSMorphism:
        f = CSMorphism.zero(L, M)
        for c, b in zip(coeffs, basis):
            if c:
                f = f + b.scale(int(c))
        return f

    if p ** len(basis) <= max_enumerate:
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            f = combo(coeffs)
            if f.is_iso():
                return f
        return None
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        f = combo(rng.integers(0, p, size=len(basis)))
        if f.is_iso():
            return f
    return None


# ---------------------------------------------------------------------------
# subsystems, quotients, localization


@dataclass
class SubQuotient:
    sub: CoeffSys
    quotient: CoeffSys
    inclusion: CSMorphism
    projection: CSMorphism
    lifts: list[FpMatrix]  # per subgroup, a section of the projection


def _span_rows(a: np.ndarray, p: int) -> np.ndarray:
    R, piv = rref_array(a, p)
    return R[: len(piv)]


def sub_quotient(L: CoeffSys, generators: Mapping[int, FpMatrix | np.ndarray]) -> SubQuotient:
    """Smallest subsystem containing the given vectors (columns, per subgroup), and the quotient."""
    p, lat = L.p, L.lattice
    n = len(lat)
    spans = [np.zeros((0, L.dims[H]), dtype=np.int64) for H in range(n)]
    for H, vecs in generators.items():
        a = vecs.a if isinstance(vecs, FpMatrix) else np.asarray(vecs, dtype=np.int64)
        if L.dims[H] == 0 or a.size == 0:
            continue
        a = a.reshape(L.dims[H], -1)
        spans[H] = _span_rows(np.vstack([spans[H], a.T]), p)
    changed = True
    arrows = L.arrows()
    while changed:
        changed = False
        for key, a, b in arrows:
            if spans[a].shape[0] == 0:
                continue
            pushed = (L.arrow_matrix(key).a @ spans[a].T % p).T
            new = _span_rows(np.vstack([spans[b], pushed]), p)
            if new.shape[0] > spans[b].shape[0]:
                spans[b] = new
                changed = True

    pivots = []
    for H in range(n):
        piv = [int(np.nonzero(row)[0][0]) for row in spans[H]]
        pivots.append(piv)
    bases = [FpMatrix(spans[H].T.reshape(L.dims[H], spans[H].shape[0]), p) for H in range(n)]
    nonpiv = [[j for j in range(L.dims[H]) if j not in set(pivots[H])] for H in range(n)]

    def coords(H: int, M: FpMatrix) -> FpMatrix:
        # coordinates of columns of M (lying in the span) in the echelon basis
        return M.submatrix(pivots[H], range(M.cols))

    proj = []
    lift = []
    for H in range(n):
        d = L.dims[H]
        q = np.zeros((len(nonpiv[H]), d), dtype=np.int64)
        for i, j in enumerate(nonpiv[H]):
            q[i, j] = 1
        if pivots[H]:
            R = spans[H]
            q[:, pivots[H]] -= R[:, nonpiv[H]].T
        proj.append(FpMatrix(q, p))
        up = np.zeros((d, len(nonpiv[H])), dtype=np.int64)
        for i, j in enumerate(nonpiv[H]):
            up[j, i] = 1
        lift.append(FpMatrix(up, p))

    sres, sconj, qres, qconj = {}, {}, {}, {}
    for key, a, b in arrows:
        m = L.arrow_matrix(key)
        kind, x, y = key
        sm = coords(b, m @ bases[a])
        qm = proj[b] @ m @ lift[a]
        if kind == "res":
            sres[(x, y)], qres[(x, y)] = sm, qm
        else:
            sconj[(x, y)], qconj[(x, y)] = sm, qm
    sub = CoeffSys(L.group, p, [b.cols for b in bases], sres, sconj, name=f"sub({L.name})")
    quo = CoeffSys(L.group, p, [len(nv) for nv in nonpiv], qres, qconj, name=f"{L.name}/sub")
    sub.bases = bases  # type: ignore[attr-defined]
    return SubQuotient(sub, quo, CSMorphism(sub, L, bases), CSMorphism(L, quo, proj), lift)


def localize(A: SubgroupFamily, L: CoeffSys) -> tuple[CoeffSys, CSMorphism]:
    """``L_A L``: the smallest subsystem equal to ``L(H)`` for every ``H`` in the family."""
    if A.lattice is not L.lattice:
        raise FamilyError("family belongs to a different group")
    # re-validate closure (families are validated on construction, but be strict here)
    SubgroupFamily(L.lattice, A.members)
    gens = {H: FpMatrix.identity(L.p, L.dims[H]) for H in A}
    sq = sub_quotient(L, gens)
    sq.sub.name = f"L_A({L.name})"
    return sq.sub, sq.inclusion


def quotient_system(L: CoeffSys, generators: Mapping[int, FpMatrix]) -> CoeffSys:
    return sub_quotient(L, generators).quotient


# ---------------------------------------------------------------------------
# duality


def dualize(L: CoeffSys) -> EffSys:
    """``Hom(-, F_p)`` applied pointwise: transpose every structure map."""
    up = {(K, H): m.T for (H, K), m in L.res.items()}
    conj = {k: m.T for k, m in L.conj.items()}
    return EffSys(L.group, L.p, L.dims, up, conj, name=f"{L.name}*")


def dualize_eff(E: EffSys) -> CoeffSys:
    res = {(H, K): m.T for (K, H), m in E.up.items()}
    conj = {k: m.T for k, m in E.conj.items()}
    name = E.name[:-1] if E.name.endswith("*") else f"{E.name}*"
    return CoeffSys(E.group, E.p, E.dims, res, conj, name=name)


def dual_morphism(f: CSMorphism) -> CSMorphism:
    """The transpose ``M* -> L*`` of ``f: L -> M``."""
    src, tgt = f.target, f.source
    src_d = dualize(src) if isinstance(src, CoeffSys) else dualize_eff(src)  # type: ignore[arg-type]
    tgt_d = dualize(tgt) if isinstance(tgt, CoeffSys) else dualize_eff(tgt)  # type: ignore[arg-type]
    return CSMorphism(src_d, tgt_d, [m.T for m in f.maps])
