"""
Errors
------
Exceptions raised by the identification layer.

:py:class:`NotIdentified` and :py:class:`NotDefined` are verdicts, not bugs: effect-level functions
turn them into an :py:class:`~regimecalc.identify.query.IdentificationResult` with ``identified=False``.
"""

from typing import Optional

from regimecalc.identify.query import Witness


class IdentificationError(Exception):
    """Base class of identification verdicts carrying a failure witness."""

    def __init__(self, message: str, witness: Optional[Witness] = None):
        super().__init__(message)
        self.witness = witness


class NotIdentified(IdentificationError):
    """The requested distribution cannot be expressed through observable quantities by the available criteria."""


class NotDefined(IdentificationError):
    """The requested effect is not defined, e.g. no ``W`` makes the natural mediator regime well posed."""


class InvalidRoleError(ValueError):
    """A covariate role set breaks a structural requirement (e.g. ``W`` touches the treatment or its descendants)."""
