"""Exception types raised by the public API.

Everything derives from :class:`BelldiscError` so callers (notably the CLI)
can catch one base class for "bad input or bad data" and map it to a nonzero
exit code.
"""
from __future__ import annotations


class BelldiscError(Exception):
    """Base class for all errors raised by this package."""


# ---- linear algebra / state validation ----

class DimensionMismatch(BelldiscError):
    """Operands have incompatible shapes."""


class NotSquare(BelldiscError):
    """A matrix argument is not square."""


class NotHermitian(BelldiscError):
    """A matrix argument is not Hermitian within tolerance."""


class GrosslyNonHermitian(BelldiscError):
    """Asymmetry too large to be repaired by symmetrization."""


class StronglyNonPositive(BelldiscError):
    """A density matrix has an eigenvalue well below zero."""


# ---- circuit model ----

class BadQubitIndex(BelldiscError):
    """A gate or measurement references a qubit outside the register."""


class HasMeasurements(BelldiscError):
    """Operation requires a measurement-free circuit."""


class HasMeasurementsBeforeEnd(BelldiscError):
    """A gate acts on a qubit that was already marked measured."""


class ParseError(BelldiscError):
    """Malformed circuit text or matrix file."""


class UnroutableCircuit(BelldiscError):
    """No rewrite rule can realize a CNOT on the coupling map."""


# ---- sampling ----

class NoMeasurements(BelldiscError):
    """Sampling requires at least one measured qubit."""


class ZeroShots(BelldiscError):
    """Shot count must be a positive integer."""


class IdentityInSetting(BelldiscError):
    """Measurement settings must name a basis (X, Y or Z) on every qubit."""


# ---- tomography ----

class TooManyQubits(BelldiscError):
    """Full Pauli tomography is only supported for small registers."""


class MissingSetting(BelldiscError):
    """A histogram is missing for one of the planned settings."""


class InconsistentShotTotals(BelldiscError):
    """Histograms for different settings disagree on shots or width."""


class IncompleteTable(BelldiscError):
    """Reconstruction needs a coefficient for every Pauli label."""


# ---- reference dataset ----

class BadDimensions(BelldiscError):
    """A matrix payload does not have the expected 8x8 shape."""


class NonHermitianBeyondTolerance(BelldiscError):
    """A loaded matrix exceeds the dataset's Hermiticity tolerance."""
