"""Bredon cohomology over F_p, Smith theory for p-groups and split exactness of
equivariant chain complexes, for finite groups acting on simplicial complexes."""

from __future__ import annotations

from .bredon import (
    CSComplex,
    bredon_cochains,
    bredon_cohomology,
    coinvariants,
    equivariant_chains,
    localize_complex,
    quotient_triangle,
    standard_identifications,
)
from .coeffsys import (
    CoeffSys,
    CSMorphism,
    EffSys,
    GroupModule,
    PermutationSystem,
    atomic_system,
    constant_system,
    fixed_point_system,
    gset_system,
    hom_space,
    module_homs,
    projective_system,
)
from .errors import BredonError
from .gcomplex import (
    GComplex,
    cohomology_dims,
    fixed_subcomplex,
    prepare,
    quotient,
    singular_set,
    subdivide,
    validate_action,
)
from .groups import FiniteGroup, GSet, SubgroupFamily, SubgroupLattice
from .homotopy import (
    ChainMap,
    HomotopyCertificate,
    contracting_homotopy,
    homotopy_equivalence_check,
    nonsplit_module_demo,
    verify_certificate,
)
from .linalg import FpChainComplex, FpMatrix
from .smith import SmithReport, abc_bredon, abc_topological, floyd_may_check, smith_report

__version__ = "0.1.0"

__all__ = [
    "BredonError", "CSComplex", "CSMorphism", "ChainMap", "CoeffSys", "EffSys", "FiniteGroup",
    "FpChainComplex", "FpMatrix", "GComplex", "GSet", "GroupModule", "HomotopyCertificate",
    "PermutationSystem", "SmithReport", "SubgroupFamily", "SubgroupLattice", "abc_bredon",
    "abc_topological", "atomic_system", "bredon_cochains", "bredon_cohomology", "cohomology_dims",
    "coinvariants", "constant_system", "contracting_homotopy", "equivariant_chains", "fixed_point_system",
    "fixed_subcomplex", "gset_system", "hom_space", "homotopy_equivalence_check", "localize_complex",
    "module_homs", "nonsplit_module_demo", "prepare", "projective_system", "quotient", "quotient_triangle",
    "floyd_may_check", "singular_set", "smith_report", "standard_identifications", "subdivide", "validate_action",
    "verify_certificate",
]
