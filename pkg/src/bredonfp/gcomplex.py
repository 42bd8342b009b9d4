"""Finite simplicial complexes with a simplicial action of a finite group.

Vertices carry integer labels ``0..vertex_count-1``; a subcomplex keeps the
labels of its ambient complex, so the 0-simplices may be a proper subset of
the label range.  Simplices are stored as sorted vertex tuples, sorted
lexicographically within each dimension.  An oriented simplex is its sorted
vertex tuple.

The non-equivariant chain functions at the bottom of this module form the
reference pipeline used to cross-check Bredon computations; they do not use
any of the coefficient-system code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import ActionError, AdmissibilityError, RegularityError
from .groups import FiniteGroup, SubgroupFamily, extend_action
from .linalg import FpChainComplex, FpMatrix, check_prime, homology_dims

Simplex = tuple[int, ...]


def _face_closure(simplices: Iterable[Sequence[int]]) -> list[list[Simplex]]:
    faces: set[Simplex] = set()
    for s in simplices:
        s = tuple(sorted(int(v) for v in s))
        if len(set(s)) != len(s):
            raise ValueError(f"repeated vertex in simplex {s}")
        if not s or s in faces:
            continue
        for k in range(1, len(s) + 1):
            faces.update(combinations(s, k))
    if not faces:
        return []
    top = max(len(f) for f in faces)
    by_dim: list[list[Simplex]] = [[] for _ in range(top)]
    for f in faces:
        by_dim[len(f) - 1].append(f)
    return [sorted(level) for level in by_dim]


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class GComplex:
    """A finite simplicial complex with a simplicial G-action on vertex labels."""

    def __init__(
        self,
        group: FiniteGroup,
        vertex_count: int,
        vertex_images: np.ndarray,
        simplices: Iterable[Sequence[int]],
        *,
        is_subdivision: bool = False,
        origin: Sequence | None = None,
    ) -> None:
        vertex_images = np.asarray(vertex_images, dtype=np.int64).reshape(group.order, vertex_count)
        self.group = group
        self.vertex_count = int(vertex_count)
        self.vertex_images = vertex_images
        self.vertex_images.flags.writeable = False
        levels = _face_closure(simplices)
        for level in levels:
            for s in level:
                if s[-1] >= vertex_count or s[0] < 0:
                    raise ValueError(f"simplex {s} uses a label outside 0..{vertex_count - 1}")
        self.simplices: tuple[tuple[Simplex, ...], ...] = tuple(tuple(lv) for lv in levels)
        self._index = tuple({s: i for i, s in enumerate(lv)} for lv in self.simplices)
        self.is_subdivision = is_subdivision
        # for subdivisions: the simplex of the parent complex each vertex label stands for
        self.origin = tuple(origin) if origin is not None else None

    @classmethod
    def from_generators(
        cls,
        group: FiniteGroup,
        vertex_count: int,
        gen_actions: Sequence[Sequence[int]],
        simplices: Iterable[Sequence[int]],
        **kw,
    ) -> "GComplex":
        return cls(group, vertex_count, extend_action(group, vertex_count, gen_actions), simplices, **kw)

    @classmethod
    def trivial_action(cls, simplices: Iterable[Sequence[int]], vertex_count: int | None = None) -> "GComplex":
        simplices = [tuple(s) for s in simplices]
        if vertex_count is None:
            vertex_count = 1 + max((max(s) for s in simplices if s), default=-1)
        G = FiniteGroup.trivial()
        return cls(G, vertex_count, np.arange(vertex_count).reshape(1, -1), simplices)

    # JSON --------------------------------------------------------------

    @classmethod
    def from_json(cls, data: dict | str, group: FiniteGroup | None = None) -> "GComplex":
        if isinstance(data, str):
            data = json.loads(data)
        if group is None:
            if "group" not in data:
                raise ValueError("complex file has no embedded group; supply one")
            group = FiniteGroup.from_json(data["group"])
        m = int(data["vertices"])
        action = data.get("action", {})
        gens = []
        for s in range(len(group.generators)):
            key = next((k for k in (str(s), f"gen_{s}", f"gen{s}") if k in action), None)
            gens.append(action[key] if key is not None else list(range(m)))
        return cls.from_generators(group, m, gens, data.get("simplices", []))

    def to_json(self, include_group: bool = True) -> dict:
        out: dict = {}
        if include_group:
            out["group"] = self.group.to_json()
        out["vertices"] = self.vertex_count
        out["action"] = {
            str(s): self.vertex_images[g].tolist() for s, g in enumerate(self.group.generator_indices)
        }
        out["simplices"] = [list(s) for s in self.maximal_simplices()]
        return out

    # basic queries -----------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def n_simplices(self, q: int) -> int:
        return len(self.simplices[q]) if 0 <= q <= self.dim else 0

    @property
    def f_vector(self) -> list[int]:
        return [len(lv) for lv in self.simplices]

    def index(self, simplex: Sequence[int]) -> int:
        s = tuple(sorted(simplex))
        return self._index[len(s) - 1][s]

    def contains(self, simplex: Sequence[int]) -> bool:
        s = tuple(sorted(simplex))
        return 0 < len(s) <= len(self.simplices) and s in self._index[len(s) - 1]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(s[0] for s in self.simplices[0]) if self.simplices else ()

    def maximal_simplices(self) -> list[Simplex]:
        out = []
        for q, level in enumerate(self.simplices):
            upper = set()
            if q + 1 <= self.dim:
                for t in self.simplices[q + 1]:
                    upper.update(combinations(t, q + 1))
            out.extend(s for s in level if s not in upper)
        return out

    def simplex_images(self, q: int) -> np.ndarray:
        """``out[g, i]`` = index of the image of q-simplex ``i`` under element ``g``."""
        return self._simplex_action[q][0]

    def action_signs(self, q: int) -> np.ndarray:
        """Orientation sign (+1/-1) of each element on each oriented q-simplex."""
        return self._simplex_action[q][1]

    @cached_property
    def _simplex_action(self) -> list[tuple[np.ndarray, np.ndarray]]:
        out = []
        for q, level in enumerate(self.simplices):
            verts = np.array(level, dtype=np.int64).reshape(len(level), q + 1)
            idx = self._index[q]
            imgs = np.empty((self.group.order, len(level)), dtype=np.int64)
            signs = np.ones((self.group.order, len(level)), dtype=np.int64)
            for g in range(self.group.order):
                moved = self.vertex_images[g][verts]
                srt = np.sort(moved, axis=1)
                for i, row in enumerate(map(tuple, srt.tolist())):
                    j = idx.get(row)
                    if j is None:
                        raise ActionError(
                            f"element {g} maps simplex {level[i]} to {row}, which is not a simplex"
                        )
                    imgs[g, i] = j
                if q:
                    # moved rows are strictly increasing iff orientation is preserved
                    for i in np.nonzero(np.any(np.diff(moved, axis=1) < 0, axis=1))[0]:
                        signs[g, i] = _perm_sign(moved[i])
            imgs.flags.writeable = False
            signs.flags.writeable = False
            out.append((imgs, signs))
        return out

    def is_orientation_preserving(self) -> bool:
        return all(bool(np.all(self.action_signs(q) == 1)) for q in range(self.dim + 1))

    def simplex_orbits(self, q: int) -> np.ndarray:
        """Orbit representative (least index) for every q-simplex."""
        return self.simplex_images(q).min(axis=0)

    def pointwise_stabilizer(self, simplex: Sequence[int]) -> list[int]:
        cols = list(simplex)
        fixed = np.all(self.vertex_images[:, cols] == np.array(cols)[None, :], axis=1)
        return [int(g) for g in np.nonzero(fixed)[0]]

    def fixed_vertex_mask(self, elements: Sequence[int]) -> np.ndarray:
        if not len(elements):
            return np.ones(self.vertex_count, dtype=bool)
        return np.all(self.vertex_images[list(elements)] == np.arange(self.vertex_count)[None, :], axis=0)

    def restrict(self, H: int) -> "GComplex":
        """The same complex with the action restricted to the subgroup with lattice id ``H``."""
        sub, embed = self.group.subgroup_as_group(self.group.lattice[H])
        return GComplex(
            sub, self.vertex_count, self.vertex_images[embed], self._all_simplices(),
            is_subdivision=self.is_subdivision, origin=self.origin,
        )

    def _all_simplices(self) -> list[Simplex]:
        return self.maximal_simplices()

    def with_simplices(self, simplices: Iterable[Sequence[int]], group_action: bool = True) -> "GComplex":
        """A subcomplex on the same labels, keeping the action or dropping to the trivial group."""
        if group_action:
            return GComplex(self.group, self.vertex_count, self.vertex_images, simplices)
        G = FiniteGroup.trivial(self.group.degree)
        return GComplex(G, self.vertex_count, np.arange(self.vertex_count).reshape(1, -1), simplices)

    def __repr__(self) -> str:
        return f"GComplex(|G|={self.group.order}, f={self.f_vector})"


# ---------------------------------------------------------------------------
# action checks


@dataclass(frozen=True)
class ActionReport:
    simplicial: bool
    admissible: bool
    regular: bool
    detail: str = ""


def _is_admissible(X: GComplex) -> tuple[bool, str]:
    for q in range(1, X.dim + 1):
        verts = np.array(X.simplices[q], dtype=np.int64)
        imgs = X.simplex_images(q)
        own = np.arange(len(X.simplices[q]))
        for g in range(X.group.order):
            setwise = imgs[g] == own
            if not setwise.any():
                continue
            pointwise = np.all(X.vertex_images[g][verts] == verts, axis=1)
            bad = np.nonzero(setwise & ~pointwise)[0]
            if bad.size:
                return False, f"element {g} fixes simplex {X.simplices[q][bad[0]]} setwise but not pointwise"
    return True, ""


def _vertex_projection(X: GComplex) -> np.ndarray:
    proj = np.full(X.vertex_count, -1, dtype=np.int64)
    k = 0
    for v in X.vertices:
        if proj[v] >= 0:
            continue
        proj[np.unique(X.vertex_images[:, v])] = k
        k += 1
    return proj


def _quotient_simplices(X: GComplex) -> tuple[list[list[Simplex]], str]:
    """Images of simplex orbits under the vertex projection; empty detail if regular."""
    proj = _vertex_projection(X)
    levels: list[list[Simplex]] = []
    for q in range(X.dim + 1):
        reps = X.simplex_orbits(q)
        seen: dict[Simplex, int] = {}
        for i, s in enumerate(X.simplices[q]):
            img = tuple(sorted(set(int(proj[v]) for v in s)))
            if len(img) != q + 1:
                return [], f"simplex {s} collapses to {img} in the quotient"
            r = int(reps[i])
            if seen.setdefault(img, r) != r:
                return [], f"two simplex orbits map to the same quotient simplex {img}"
        levels.append(sorted(seen))
    return levels, ""


def validate_action(X: GComplex) -> ActionReport:
    """Report whether the action is simplicial, admissible and regular (no exceptions)."""
    try:
        for q in range(X.dim + 1):
            X.simplex_images(q)
    except ActionError as exc:
        return ActionReport(False, False, False, str(exc))
    adm, why = _is_admissible(X)
    if not adm:
        return ActionReport(True, False, False, why)
    _, why = _quotient_simplices(X)
    return ActionReport(True, True, why == "", why)


def require_admissible(X: GComplex) -> None:
    ok, why = _is_admissible(X)
    if not ok:
        raise AdmissibilityError(f"complex is not admissible ({why}); subdivide it once")


def require_regular(X: GComplex) -> None:
    require_admissible(X)
    _, why = _quotient_simplices(X)
    if why:
        raise RegularityError(f"action is not regular ({why}); subdivide the complex twice")


# ---------------------------------------------------------------------------
# constructions


def subdivide(X: GComplex) -> GComplex:
    """First barycentric subdivision with the induced action.

    New vertex labels are the simplices of ``X`` ordered by (dimension, lex), so
    every flag lists its vertices in increasing label order and the induced
    action preserves orientations.
    """
    old = [s for level in X.simplices for s in level]
    label = {s: i for i, s in enumerate(old)}
    G = X.group
    images = np.empty((G.order, len(old)), dtype=np.int64)
    offset = 0
    for q in range(X.dim + 1):
        n = X.n_simplices(q)
        images[:, offset:offset + n] = X.simplex_images(q) + offset
        offset += n

    chains: dict[Simplex, list[tuple[int, ...]]] = {}
    for q in range(X.dim + 1):
        for s in X.simplices[q]:
            own = [(label[s],)]
            for k in range(1, q + 1):
                for f in combinations(s, k):
                    own.extend(c + (label[s],) for c in chains[f])
            chains[s] = own
    flags = [c for s in old for c in chains[s]]
    return GComplex(G, len(old), images, flags, is_subdivision=True, origin=old)


def prepare(X: GComplex, max_subdivisions: int = 2, *, oriented: bool = False) -> GComplex:
    """Subdivide until the action is admissible and regular, at most ``max_subdivisions`` times.

    With ``oriented`` the action must also preserve orientations, as odd p requires.
    """
    for _ in range(max_subdivisions):
        rep = validate_action(X)
        if rep.admissible and rep.regular and (not oriented or X.is_orientation_preserving()):
            return X
        X = subdivide(X)
    return X


def fixed_subcomplex(X: GComplex, H: int, keep_action: bool = False) -> GComplex:
    """Simplices all of whose vertices are fixed by the subgroup with lattice id ``H``.

    The result carries the trivial action unless ``keep_action`` is set, in
    which case ``H`` must be normal and the ambient action is kept.
    """
    require_admissible(X)
    lat = X.group.lattice
    if keep_action and not lat.is_normal(H):
        raise ValueError("keep_action requires a normal subgroup")
    fixed = X.fixed_vertex_mask(lat[H].elements)
    keep = [s for level in X.simplices for s in level if all(fixed[v] for v in s)]
    return X.with_simplices(keep, group_action=keep_action)


def singular_set(X: GComplex, A: SubgroupFamily) -> GComplex:
    """Union of the fixed subcomplexes over the family; G-invariant, keeps the action."""
    require_admissible(X)
    lat = X.group.lattice
    keep: set[Simplex] = set()
    for J in A:
        fixed = X.fixed_vertex_mask(lat[J].elements)
        keep.update(s for level in X.simplices for s in level if all(fixed[v] for v in s))
    return X.with_simplices(sorted(keep), group_action=True)


def quotient(X: GComplex) -> tuple[GComplex, np.ndarray]:
    """Orbit complex X/G (trivial action) and the vertex projection (label -> orbit, -1 if unused)."""
    require_regular(X)
    levels, _ = _quotient_simplices(X)
    proj = _vertex_projection(X)
    n = int(proj.max()) + 1 if proj.size and proj.max() >= 0 else 0
    simplices = [s for level in levels for s in level]
    return GComplex.trivial_action(simplices, vertex_count=n), proj


def cone(X: GComplex) -> GComplex:
    """Join with a new G-fixed apex, labelled ``vertex_count``."""
    a = X.vertex_count
    images = np.hstack([X.vertex_images, np.full((X.group.order, 1), a, dtype=np.int64)])
    simplices = [(a,)] + [s + (a,) for s in X.maximal_simplices()]
    return GComplex(X.group, a + 1, images, simplices)


@dataclass(frozen=True)
class EulerData:
    chi_X: int
    chi_SX: int
    chi_c_free_orbits: int


def euler_characteristics(X: GComplex, A: SubgroupFamily | None = None) -> EulerData:
    """Alternating cell counts of X, of S_A X, and of the G-orbits of cells outside S_A X."""
    require_admissible(X)
    if A is None:
        A = SubgroupFamily.nontrivial(X.group.lattice)
    S = singular_set(X, A)
    chi_X = sum((-1) ** q * X.n_simplices(q) for q in range(X.dim + 1))
    chi_S = sum((-1) ** q * S.n_simplices(q) for q in range(S.dim + 1))
    chi_free = 0
    for q in range(X.dim + 1):
        reps = X.simplex_orbits(q)
        free = {int(reps[i]) for i, s in enumerate(X.simplices[q]) if not S.contains(s)}
        chi_free += (-1) ** q * len(free)
    return EulerData(chi_X, chi_S, chi_free)


# ---------------------------------------------------------------------------
# non-equivariant chains (reference pipeline)


def relative_chain_complex(X: GComplex, A: GComplex | None, p: int, top: int | None = None) -> FpChainComplex:
    """Simplicial chains of the pair (X, A) over F_p, degrees 0..top (default dim X)."""
    p = check_prime(p)
    top = X.dim if top is None else top
    if top < 0:
        return FpChainComplex(p, [], [])
    cells: list[list[Simplex]] = []
    for q in range(top + 1):
        level = X.simplices[q] if q <= X.dim else ()
        cells.append([s for s in level if A is None or not A.contains(s)])
    index = [{s: i for i, s in enumerate(level)} for level in cells]
    dims = [len(level) for level in cells]
    diffs: list[FpMatrix | None] = [None]
    for q in range(1, top + 1):
        m = np.zeros((dims[q - 1], dims[q]), dtype=np.int64)
        for j, s in enumerate(cells[q]):
            for i in range(len(s)):
                r = index[q - 1].get(s[:i] + s[i + 1:])
                if r is not None:
                    m[r, j] = (-1) ** i
        diffs.append(FpMatrix(m, p))
    return FpChainComplex(p, dims, diffs)


def chain_complex(X: GComplex, p: int, top: int | None = None) -> FpChainComplex:
    return relative_chain_complex(X, None, p, top)


def cohomology_dims(X: GComplex, p: int, length: int | None = None) -> list[int]:
    """dim H^q(X; F_p) for q = 0..length-1 (over a field these equal the homology dimensions)."""
    return _padded(homology_dims(chain_complex(X, p)), length)


def relative_cohomology_dims(X: GComplex, A: GComplex, p: int, length: int | None = None) -> list[int]:
    return _padded(homology_dims(relative_chain_complex(X, A, p)), length)


def _padded(dims: list[int], length: int | None) -> list[int]:
    if length is None:
        return dims
    if any(dims[length:]):
        raise ValueError("requested length cuts off nonzero cohomology")
    return (dims + [0] * length)[:length]
