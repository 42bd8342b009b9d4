"""Small G-complexes used as worked examples, regression members and CLI presets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .gcomplex import GComplex, cone, prepare
from .groups import FiniteGroup

OCTAHEDRON_FACES = [tuple(sorted(f)) for f in product((0, 1), (2, 3), (4, 5))]


def hexagon_edges(n: int = 6) -> list[tuple[int, int]]:
    return [tuple(sorted((i, (i + 1) % n))) for i in range(n)]


def reflection_hexagon() -> GComplex:
    """C_2 acting on a hexagon by ``i -> -i``; fixes vertices 0 and 3."""
    return GComplex.from_generators(FiniteGroup.cyclic(2), 6, [[(-i) % 6 for i in range(6)]], hexagon_edges())


def free_rotation_hexagon() -> GComplex:
    """C_3 acting freely on a hexagon by ``i -> i + 2``."""
    return GComplex.from_generators(FiniteGroup.cyclic(3), 6, [[(i + 2) % 6 for i in range(6)]], hexagon_edges())


def octahedron(gens: list[list[int]], group: FiniteGroup) -> GComplex:
    """Boundary of the octahedron with vertices ``+-e1 = 0,1``, ``+-e2 = 2,3``, ``+-e3 = 4,5``."""
    return GComplex.from_generators(group, 6, gens, OCTAHEDRON_FACES)


def antipodal_octahedron() -> GComplex:
    return octahedron([[1, 0, 3, 2, 5, 4]], FiniteGroup.cyclic(2))


def reflection_octahedron() -> GComplex:
    """Reflection in the equatorial plane; the fixed set is the equator circle."""
    return octahedron([[0, 1, 2, 3, 5, 4]], FiniteGroup.cyclic(2))


def rotoreflection_octahedron() -> GComplex:
    """C_4 generated by a quarter turn about e3 composed with the reflection in the equator.

    The square of the generator is the half turn, which fixes the two poles.
    """
    return octahedron([[2, 3, 1, 0, 5, 4]], FiniteGroup.cyclic(4))


def klein_octahedron() -> GComplex:
    """Klein four group of reflections in the planes orthogonal to e1 and e2."""
    return octahedron([[1, 0, 2, 3, 4, 5], [0, 1, 3, 2, 4, 5]], FiniteGroup.klein_four())


def symmetric_triangle() -> GComplex:
    """S_3 permuting the vertices of the boundary of a triangle."""
    return GComplex(FiniteGroup.symmetric(3), 3, FiniteGroup.symmetric(3).perms, [(0, 1), (0, 2), (1, 2)])


def collar_annulus() -> GComplex:
    """An annulus around the hexagon with the reflection ``i -> -i`` on both boundary circles.

    Inner vertices 0..5, outer vertices 6..11, quad centres 12..17; the inner
    hexagon is a subcomplex and a deformation retract.
    """
    tri = []
    for i in range(6):
        j = (i + 1) % 6
        a, b, c, d, m = i, j, i + 6, j + 6, 12 + i
        tri += [(a, b, m), (c, d, m), (a, c, m), (b, d, m)]
    perm = [(-i) % 6 for i in range(6)] + [6 + (-i) % 6 for i in range(6)] + [12 + (-i - 1) % 6 for i in range(6)]
    return GComplex.from_generators(FiniteGroup.cyclic(2), 18, [perm], tri)


def dihedral_twelve_gon() -> GComplex:
    """D_3 (as S_3) acting on a 12-gon: ``a: k -> k + 4``, ``b: k -> -k``."""
    a = [(k + 4) % 12 for k in range(12)]
    b = [(-k) % 12 for k in range(12)]
    return GComplex.from_generators(FiniteGroup(12, [a, b]), 12, [a, b], hexagon_edges(12))


@dataclass(frozen=True)
class SuiteMember:
    name: str
    raw: GComplex
    complex: GComplex  # subdivided until admissible and regular
    primes: tuple[int, ...]  # primes p for which the whole group is a p-group
    acyclic: bool = False

    @property
    def group(self) -> FiniteGroup:
        return self.complex.group

    def for_prime(self, p: int) -> GComplex:
        """The prepared complex, subdivided once more if odd p needs orientations preserved."""
        return self.complex if p == 2 else prepare(self.complex, 1, oriented=True)


_BASE = {
    "reflection_hexagon": (reflection_hexagon, (2,)),
    "free_c3_hexagon": (free_rotation_hexagon, (3,)),
    "antipodal_octahedron": (antipodal_octahedron, (2,)),
    "reflection_octahedron": (reflection_octahedron, (2,)),
    "c4_octahedron": (rotoreflection_octahedron, (2,)),
    "klein_octahedron": (klein_octahedron, (2,)),
    "s3_triangle": (symmetric_triangle, ()),
}


@lru_cache(maxsize=None)
def member(name: str) -> SuiteMember:
    if name.startswith("cone_"):
        base = member(name[5:])
        X = cone(base.complex)
        return SuiteMember(name, cone(base.raw), prepare(X), base.primes, acyclic=True)
    build, primes = _BASE[name]
    raw = build()
    return SuiteMember(name, raw, prepare(raw), primes)


def names(include_cones: bool = True) -> list[str]:
    base = list(_BASE)
    return base + [f"cone_{n}" for n in base] if include_cones else base


def suite(include_cones: bool = True) -> list[SuiteMember]:
    return [member(n) for n in names(include_cones)]
