"""Exception taxonomy shared by all modules.

Construction-time contract violations raise; verification batteries never
raise on a failed inequality (failures go into the report instead).
"""

from __future__ import annotations


class SsdkitError(Exception):
    """Base class for all toolkit errors."""


# -- space construction ------------------------------------------------------

class NotSymmetric(SsdkitError):
    """Pairing matrix is not exactly symmetric."""


class ZeroDimension(SsdkitError):
    """Space dimension must be >= 1."""


class DimensionMismatch(SsdkitError):
    """Vector length does not match the space dimension."""


class UnsupportedProbe(SsdkitError):
    """Analytic probe requested for a norm that has no quadratic form."""


# -- grids and grid functions ------------------------------------------------

class BudgetExceeded(SsdkitError):
    """Grid would exceed the configured point budget (SSDKIT_BUDGET)."""


class GridMismatch(SsdkitError):
    """Operands live on different grids."""


class Improper(SsdkitError):
    """Function is identically +inf."""


class NotConvex(SsdkitError):
    """Midpoint convexity check failed along a grid line."""


class NoAffineMinorant(SsdkitError):
    """Conjugate is +inf everywhere on the dual grid."""


class HNotFinite(SsdkitError):
    """Summand must be finite on the whole grid."""


# -- point sets and projection ----------------------------------------------

class EmptySet(SsdkitError):
    """Operation requires a nonempty point set."""


class FBelowQ(SsdkitError):
    """Function dips below the quadratic form beyond tolerance."""


class NotVZ(SsdkitError):
    """Function fails the zero inf-convolution precondition."""


class EpsilonOutOfRange(SsdkitError):
    """Projection parameter must lie strictly between 0 and 1."""


class StepInfeasible(SsdkitError):
    """No grid point meets the per-step certificate (grid too coarse)."""

    def __init__(self, message, trace=None, best=None):
        super().__init__(message)
        self.trace = trace
        self.best = best


class PreconditionFailed(SsdkitError):
    """A battery precondition (density, maximality, ...) does not hold."""


# -- dual structures ----------------------------------------------------------

class NoDual(SsdkitError):
    """No compatible dual structure: the dual quadratic gauge goes negative."""

    def __init__(self, message, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class SingularPairing(SsdkitError):
    """Pairing matrix is singular; the canonical dual pairing is undefined."""


class DensityNotVerified(SsdkitError):
    """Image-density precondition has not been verified for this pair."""


# -- representer checks --------------------------------------------------------

class BracketViolated(SsdkitError):
    """Candidate function leaves the representer sandwich."""


class NotAMinorant(SsdkitError):
    """Candidate exceeds the quadratic form on the anchor set."""


# -- CLI ----------------------------------------------------------------------

class MissingArtifacts(SsdkitError):
    """Report aggregation found no prior run artifacts."""
