"""Exception hierarchy for numerical failures.

Bad inputs raise plain ``ValueError``; everything below signals that the
numbers themselves did not cooperate.
"""
from __future__ import annotations


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure."""


class SingularFitError(NumericalError):
    """A least squares system has no unique solution."""


class DivisionRemainderError(NumericalError):
    """A symbol is not divisible by the requested power of (1+z)."""


class EigenspaceError(NumericalError):
    """The eigenvalue-1 eigenspace of a subdivision matrix is not one-dimensional."""
