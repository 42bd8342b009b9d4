"""Finite permutation groups, their subgroup lattices, and finite G-sets.

Elements of a group are indexed 0..|G|-1 in lexicographic order of their
image arrays, so index 0 is always the identity.  Products follow the
composition convention ``(a * b)(i) = a(b(i))``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ActionError, FamilyError, ResourceError

DEFAULT_LATTICE_BOUND = 64
DEFAULT_CLOSURE_BOUND = 100_000

Perm = tuple[int, ...]


def _check_perm(perm: Sequence[int], degree: int) -> Perm:
    perm = tuple(int(x) for x in perm)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise ValueError(f"{list(perm)} is not a permutation of 0..{degree - 1}")
    return perm


class FiniteGroup:
    """A permutation group given by generators, with all elements enumerated."""

    def __init__(
        self,
        degree: int,
        generators: Iterable[Sequence[int]] = (),
        *,
        max_order: int = DEFAULT_CLOSURE_BOUND,
    ) -> None:
        if degree < 1:
            raise ValueError("degree must be positive")
        self.degree = int(degree)
        self.generators: tuple[Perm, ...] = tuple(_check_perm(g, degree) for g in generators)

        identity = tuple(range(degree))
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = tuple(g[i] for i in x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > max_order:
                            raise ResourceError(
                                f"group order exceeds closure bound {max_order}"
                            )
            frontier = nxt

        self.elements: tuple[Perm, ...] = tuple(sorted(seen))
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.perms = np.array(self.elements, dtype=np.int64).reshape(len(self.elements), degree)
        self.perms.flags.writeable = False
        self.generator_indices: tuple[int, ...] = tuple(self._index[g] for g in self.generators)
        self._lattice: SubgroupLattice | None = None

    # construction helpers -------------------------------------------------

    @classmethod
    def trivial(cls, degree: int = 1) -> "FiniteGroup":
        return cls(degree, [])

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.trivial()
        return cls(n, [[(i + 1) % n for i in range(n)]])

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.trivial()
        if n == 2:
            return cls(2, [[1, 0]])
        cycle = [(i + 1) % n for i in range(n)]
        swap = [1, 0] + list(range(2, n))
        return cls(n, [cycle, swap])

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of a regular n-gon, order 2n, acting on its n vertices."""
        rot = [(i + 1) % n for i in range(n)]
        ref = [(-i) % n for i in range(n)]
        return cls(n, [rot, ref])

    @classmethod
    def klein_four(cls) -> "FiniteGroup":
        return cls(4, [[1, 0, 2, 3], [0, 1, 3, 2]])

    @classmethod
    def quaternion(cls) -> "FiniteGroup":
        """Q_8 in its left regular representation on 8 points."""
        # elements (sign, unit) with unit in 1,i,j,k; point = 2*unit + (sign<0)
        table = {
            (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
            (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
            (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
            (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
            (1, 0): (1, 1), (2, 0): (1, 2), (3, 0): (1, 3),
        }

        def left_mult(unit: int) -> list[int]:
            img = []
            for pt in range(8):
                u, neg = divmod(pt, 2)
                s, v = table[(unit, u)]
                if neg:
                    s = -s
                img.append(2 * v + (1 if s < 0 else 0))
            return img

        return cls(8, [left_mult(1), left_mult(2)])

    @classmethod
    def from_json(cls, data: dict | str) -> "FiniteGroup":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["degree"]), data.get("generators", []))

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators]}

    # basic arithmetic -----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def index(self, perm: Sequence[int]) -> int:
        try:
            return self._index[tuple(int(x) for x in perm)]
        except KeyError:
            raise ValueError(f"{list(perm)} is not an element of the group") from None

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    @cached_property
    def mul_table(self) -> np.ndarray:
        n = self.order
        if n > 4096:
            raise ResourceError("multiplication table requested for a group above 4096 elements")
        table = np.empty((n, n), dtype=np.int64)
        for b in range(n):
            composed = self.perms[:, self.perms[b]]
            table[:, b] = [self._index[tuple(row)] for row in composed.tolist()]
        table.flags.writeable = False
        return table

    @cached_property
    def inv_table(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        for a, perm in enumerate(self.perms):
            inv[a] = self._index[tuple(np.argsort(perm).tolist())]
        inv.flags.writeable = False
        return inv

    @cached_property
    def word_tree(self) -> tuple[tuple[int, int], ...]:
        """BFS tree over left multiplication by generators.

        Entry ``g`` is ``(s, h)`` with ``g = generators[s] * h``; the identity maps to ``(-1, 0)``.
        """
        tree: list[tuple[int, int] | None] = [None] * self.order
        tree[0] = (-1, 0)
        queue = deque([0])
        while queue:
            h = queue.popleft()
            for s, gs in enumerate(self.generator_indices):
                g = self.mul(gs, h)
                if tree[g] is None:
                    tree[g] = (s, h)
                    queue.append(g)
        return tuple(tree)  # type: ignore[arg-type]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(a, x)
            k += 1
        return k

    def is_p_group(self, p: int) -> bool:
        n = self.order
        while n % p == 0:
            n //= p
        return n == 1

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in range(self.order))

    @property
    def lattice(self) -> "SubgroupLattice":
        if self._lattice is None:
            self._lattice = subgroup_lattice(self)
        return self._lattice

    def subgroup_as_group(self, H: "Subgroup") -> tuple["FiniteGroup", np.ndarray]:
        """Return ``H`` as a standalone group plus the map of its element indices into ``self``."""
        gens = [self.elements[g] for g in self.lattice.generators_of(H.id)]
        sub = FiniteGroup(self.degree, gens)
        embed = np.array([self._index[e] for e in sub.elements], dtype=np.int64)
        return sub, embed

    def __repr__(self) -> str:
        return f"FiniteGroup(degree={self.degree}, order={self.order})"


@dataclass(frozen=True)
class Subgroup:
    id: int
    elements: tuple[int, ...]
    mask: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return (self.mask >> g) & 1 == 1


def _closure(G: FiniteGroup, gens: Sequence[int]) -> int:
    mask = 1
    frontier = [0]
    table = G.mul_table
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(table[g, x])
                if not (mask >> y) & 1:
                    mask |= 1 << y
                    nxt.append(y)
        frontier = nxt
    return mask


def _mask_elements(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class SubgroupLattice:
    """All subgroups of a group with inclusion, covering, conjugation and normalizer tables."""

    def __init__(self, group: FiniteGroup, masks: Iterable[int]) -> None:
        self.group = group
        ordered = sorted(((m.bit_count(), _mask_elements(m), m) for m in set(masks)))
        self.subgroups: tuple[Subgroup, ...] = tuple(
            Subgroup(i, elems, m) for i, (_, elems, m) in enumerate(ordered)
        )
        self._by_mask = {s.mask: s.id for s in self.subgroups}
        n = len(self.subgroups)
        le = np.zeros((n, n), dtype=bool)
        for K in self.subgroups:
            for H in self.subgroups:
                le[K.id, H.id] = (K.mask & H.mask) == K.mask
        le.flags.writeable = False
        self.le = le

        covers: list[tuple[int, ...]] = []
        for H in range(n):
            below = [K for K in range(n) if K != H and le[K, H]]
            maximal = [
                K for K in below if not any(M != K and le[K, M] for M in below)
            ]
            covers.append(tuple(maximal))
        self.covers: tuple[tuple[int, ...], ...] = tuple(covers)

        mul, inv = group.mul_table, group.inv_table
        conj = np.empty((group.order, n), dtype=np.int64)
        for g in range(group.order):
            gi = int(inv[g])
            for H in self.subgroups:
                m = 0
                for h in H.elements:
                    m |= 1 << int(mul[mul[g, h], gi])
                conj[g, H.id] = self._by_mask[m]
        conj.flags.writeable = False
        self.conj_table = conj

        self.normalizers: tuple[int, ...] = tuple(
            self._by_mask[sum(1 << g for g in range(group.order) if conj[g, H] == H)]
            for H in range(n)
        )

        gens: list[tuple[int, ...]] = []
        for H in self.subgroups:
            chosen: list[int] = []
            span = 1
            for h in H.elements:
                if not (span >> h) & 1:
                    chosen.append(h)
                    span = _closure(group, chosen)
            gens.append(tuple(chosen))
        self._gens = tuple(gens)

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)

    def __getitem__(self, i: int) -> Subgroup:
        return self.subgroups[i]

    @property
    def trivial(self) -> int:
        return 0

    @property
    def whole(self) -> int:
        return len(self.subgroups) - 1

    def id_of(self, elements: Iterable[int]) -> int:
        m = 0
        for e in elements:
            m |= 1 << int(e)
        try:
            return self._by_mask[m]
        except KeyError:
            raise ValueError("element set is not a subgroup") from None

    def generated(self, elements: Iterable[int]) -> int:
        """Id of the subgroup generated by the given element indices."""
        return self._by_mask[_closure(self.group, list(elements))]

    def is_subgroup(self, K: int, H: int) -> bool:
        return bool(self.le[K, H])

    def conj(self, g: int, H: int) -> int:
        return int(self.conj_table[g, H])

    def is_normal(self, H: int) -> bool:
        return self.normalizers[H] == self.whole

    def generators_of(self, H: int) -> tuple[int, ...]:
        return self._gens[H]

    def covering_pairs(self) -> list[tuple[int, int]]:
        """All ``(H, K)`` with ``K`` a maximal proper subgroup of ``H``."""
        return [(H, K) for H in range(len(self)) for K in self.covers[H]]

    def conjugacy_classes(self) -> list[list[int]]:
        seen: set[int] = set()
        classes = []
        for H in range(len(self)):
            if H in seen:
                continue
            cls = sorted({self.conj(g, H) for g in range(self.group.order)})
            seen.update(cls)
            classes.append(cls)
        return classes


def subgroup_lattice(G: FiniteGroup, max_order: int = DEFAULT_LATTICE_BOUND) -> SubgroupLattice:
    """Enumerate every subgroup of ``G`` (by joining cyclic subgroups until closure)."""
    if G.order > max_order:
        raise ResourceError(
            f"|G| = {G.order} exceeds the subgroup-lattice bound {max_order}"
        )
    found = {1: ()}
    queue = deque([1])
    while queue:
        m = queue.popleft()
        gens = found[m]
        for g in range(G.order):
            if (m >> g) & 1:
                continue
            new = _closure(G, gens + (g,))
            if new not in found:
                found[new] = gens + (g,)
                queue.append(new)
    return SubgroupLattice(G, found)


class SubgroupFamily:
    """A set of subgroups closed under passing to supergroups and under conjugation."""

    def __init__(self, lattice: SubgroupLattice, members: Iterable[int]) -> None:
        self.lattice = lattice
        self.members = frozenset(int(m) for m in members)
        for H in self.members:
            for K in range(len(lattice)):
                if lattice.le[H, K] and K not in self.members:
                    raise FamilyError(f"family contains {H} but not its supergroup {K}")
            for g in range(lattice.group.order):
                if lattice.conj(g, H) not in self.members:
                    raise FamilyError(f"family contains {H} but not its conjugate {lattice.conj(g, H)}")

    @classmethod
    def nontrivial(cls, lattice: SubgroupLattice) -> "SubgroupFamily":
        return cls(lattice, range(1, len(lattice)))

    @classmethod
    def everything(cls, lattice: SubgroupLattice) -> "SubgroupFamily":
        return cls(lattice, range(len(lattice)))

    @classmethod
    def generated_by(cls, lattice: SubgroupLattice, seeds: Iterable[int]) -> "SubgroupFamily":
        """Smallest family containing the seeds."""
        members = set()
        for H in seeds:
            for g in range(lattice.group.order):
                Hg = lattice.conj(g, H)
                members.update(K for K in range(len(lattice)) if lattice.le[Hg, K])
        return cls(lattice, members)

    @classmethod
    def all_families(cls, lattice: SubgroupLattice) -> list["SubgroupFamily"]:
        """Every family generated by a single conjugacy class, plus the empty family."""
        fams = [cls(lattice, ())]
        keys = {frozenset()}
        for c in lattice.conjugacy_classes():
            fam = cls.generated_by(lattice, c)
            if fam.members not in keys:
                keys.add(fam.members)
                fams.append(fam)
        return fams

    def __contains__(self, H: int) -> bool:
        return H in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"SubgroupFamily({sorted(self.members)})"


class GSet:
    """A finite left G-set; ``images[g, x]`` is the image of point ``x`` under element ``g``."""

    def __init__(self, group: FiniteGroup, images: np.ndarray, labels: Sequence | None = None) -> None:
        images = np.asarray(images, dtype=np.int64)
        if images.ndim != 2 or images.shape[0] != group.order:
            raise ActionError("images must have one row per group element")
        self.group = group
        self.size = int(images.shape[1])
        self.images = images
        self.images.flags.writeable = False
        self.labels = tuple(labels) if labels is not None else tuple(range(self.size))
        if len(self.labels) != self.size:
            raise ValueError("one label per point required")

    @classmethod
    def from_generators(
        cls,
        group: FiniteGroup,
        size: int,
        gen_images: Sequence[Sequence[int]],
        labels: Sequence | None = None,
    ) -> "GSet":
        """Extend an action given on generators to all elements, verifying the relations."""
        images = extend_action(group, size, gen_images)
        return cls(group, images, labels)

    @cached_property
    def stabilizers(self) -> tuple[int, ...]:
        lat = self.group.lattice
        fixed = self.images == np.arange(self.size)[None, :]
        out = []
        for x in range(self.size):
            out.append(lat.id_of(np.nonzero(fixed[:, x])[0]))
        return tuple(out)

    def fixed_points(self, K: int) -> list[int]:
        le = self.group.lattice.le
        return [x for x, S in enumerate(self.stabilizers) if le[K, S]]

    @cached_property
    def _orbit_data(self) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...], tuple[int, ...]]:
        orbit_of = [-1] * self.size
        transporter = [0] * self.size
        orbits = []
        for x in range(self.size):
            if orbit_of[x] >= 0:
                continue
            k = len(orbits)
            members = set()
            for g in range(self.group.order):
                y = int(self.images[g, x])
                if orbit_of[y] < 0:
                    orbit_of[y] = k
                    transporter[y] = g
                members.add(y)
            orbits.append(tuple(sorted(members)))
        return tuple(orbits), tuple(orbit_of), tuple(transporter)

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        return self._orbit_data[0]

    @property
    def orbit_of(self) -> tuple[int, ...]:
        return self._orbit_data[1]

    @property
    def transporters(self) -> tuple[int, ...]:
        """For each point x, the least element g with g * rep(orbit(x)) = x."""
        return self._orbit_data[2]

    def sub_gset(self, points: Sequence[int]) -> "GSet":
        """Restrict to a G-invariant subset, keeping labels and relative order."""
        points = sorted(points)
        lookup = np.full(self.size, -1, dtype=np.int64)
        lookup[points] = np.arange(len(points))
        images = lookup[self.images[:, points]]
        if np.any(images < 0):
            raise ActionError("subset is not G-invariant")
        return GSet(self.group, images, [self.labels[x] for x in points])

    def disjoint_union(self, other: "GSet", tags: tuple = (0, 1)) -> "GSet":
        if other.group is not self.group:
            raise ActionError("G-sets over different groups")
        images = np.hstack([self.images, other.images + self.size])
        labels = [(tags[0], lab) for lab in self.labels] + [(tags[1], lab) for lab in other.labels]
        return GSet(self.group, images, labels)


def extend_action(group: FiniteGroup, size: int, gen_images: Sequence[Sequence[int]]) -> np.ndarray:
    """Images of every point under every element, from images under the generators.

    Raises ActionError if the generator images are not permutations or do not
    satisfy the relations of the group.
    """
    if len(gen_images) != len(group.generators):
        raise ActionError(
            f"expected an image list for each of the {len(group.generators)} generators"
        )
    gens = []
    for img in gen_images:
        img = [int(x) for x in img]
        if sorted(img) != list(range(size)):
            raise ActionError(f"generator image {img} is not a permutation of 0..{size - 1}")
        gens.append(np.array(img, dtype=np.int64))
    images = np.empty((group.order, size), dtype=np.int64)
    images[0] = np.arange(size)
    tree = group.word_tree
    order = sorted(range(1, group.order), key=lambda g: _depth(tree, g))
    for g in order:
        s, h = tree[g]
        images[g] = gens[s][images[h]]
    # relations: the action must be a homomorphism on generators times all elements
    mul = group.mul_table
    for s, gs in enumerate(group.generator_indices):
        if not np.array_equal(images[mul[gs]], gens[s][images]):
            raise ActionError("generator images do not respect the group relations")
    return images


def _depth(tree: Sequence[tuple[int, int]], g: int) -> int:
    d = 0
    while g != 0:
        g = tree[g][1]
        d += 1
    return d


def coset_gset(G: FiniteGroup, H: Subgroup) -> GSet:
    """Left cosets gH with the left action, ordered by their minimal element index."""
    mul = G.mul_table
    coset_of = [-1] * G.order
    reps = []
    for g in range(G.order):
        if coset_of[g] >= 0:
            continue
        for h in H.elements:
            coset_of[int(mul[g, h])] = len(reps)
        reps.append(g)
    images = np.array(
        [[coset_of[int(mul[g, r])] for r in reps] for g in range(G.order)], dtype=np.int64
    ).reshape(G.order, len(reps))
    return GSet(G, images, labels=reps)


def fixed_points(S: GSet, K: Subgroup) -> list[int]:
    """Points fixed by every element of ``K``."""
    if len(K.elements) == 0:
        return list(range(S.size))
    fixed = np.all(S.images[list(K.elements)] == np.arange(S.size)[None, :], axis=0)
    return [int(x) for x in np.nonzero(fixed)[0]]


def orbits(S: GSet) -> list[list[int]]:
    return [list(o) for o in S.orbits]


def conjugate_subgroup(G: FiniteGroup, g: int, H: Subgroup) -> Subgroup:
    """The subgroup ``g H g^-1``."""
    return G.lattice[G.lattice.conj(g, H.id)]
