"""Exception types raised across the package."""

from __future__ import annotations


class BredonError(Exception):
    """Base class for all package errors."""


class ResourceError(BredonError):
    """A configured size bound was exceeded."""


class DimensionError(BredonError, ValueError):
    """Matrix or vector shapes do not fit together."""


class CharacteristicError(BredonError, ValueError):
    """Objects over different prime fields were combined, or p is not prime."""


class ActionError(BredonError, ValueError):
    """A group action is not simplicial, or generator relations fail."""


class AdmissibilityError(BredonError):
    """The complex is not admissible (or not orientation preserving for odd p).

    Subdividing once fixes this.
    """


class RegularityError(BredonError):
    """The simplicial quotient would not be a simplicial complex of the same dimension.

    Subdividing twice fixes this.
    """


class FamilyError(BredonError, ValueError):
    """A subgroup family is not closed under supergroups and conjugation."""


class NotAPGroupError(BredonError, ValueError):
    """A Smith-theory check was requested for a group that is not a p-group."""
