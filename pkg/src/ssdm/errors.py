"""Exception types shared across the library."""


class SSDMError(Exception):
    """Base class for all library errors."""


class ZeroGradient(SSDMError):
    """A separator gradient vanished; the certificate is degenerate."""


class BadBox(SSDMError):
    """Box bounds are inconsistent or non-finite."""


class NumericalFailure(SSDMError):
    """The LP kernel exceeded its pivot cap; the instance is ill-conditioned."""


class EmptyBundle(SSDMError):
    """A bundle operation was called with no cuts."""


class EmptyLevelSet(SSDMError):
    """The requested level set is empty inside the ball (caller logic error)."""


class ModelContractViolation(SSDMError):
    """A model callback broke its contract (e.g. an empty stage set)."""


class ShapeDegenerate(SSDMError):
    """The ellipsoid shape matrix lost positive definiteness beyond repair."""


class UnboundedObjective(SSDMError):
    """A linear objective is unbounded over the static set (boundedness violated)."""


class BadInstance(SSDMError):
    """Inventory instance data is inconsistent."""


class ClairvoyantInfeasible(SSDMError):
    """The hindsight LP has no feasible control for the given scenario."""


class BasisDimensionMismatch(SSDMError):
    """A decision-rule basis term returned the wrong output dimension."""


class UnboundedChi(SSDMError):
    """A rule lift was requested without coefficient bounds."""
