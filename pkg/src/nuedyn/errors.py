"""Exception types shared across the package."""


class NuedynError(Exception):
    """Base class for all package errors."""


class NotIrreducible(NuedynError):
    """The transition matrix is not irreducible (reachability closure failed)."""


class NoConvergence(NuedynError):
    """An iterative computation exceeded its iteration cap."""


class DepthMismatch(NuedynError):
    """Potential word depth is incompatible with the measure or matrix."""


class SingularJacobian(NuedynError):
    """The Jacobian determinant vanished (below 1e-14) at an orbit point."""


class GridTooCoarse(NuedynError):
    """Adjacent-cell variation on the verification grid exceeds the safety cap."""


class InverseBranchLost(NuedynError):
    """A backward-orbit pullback left the injectivity domain of its branch."""


class Unsupported(NuedynError):
    """The requested construction is outside the supported parameter range."""


class BoundaryHit(NuedynError):
    """An orbit point fell within resolution of a partition face."""


class EmptyCylinder(NuedynError):
    """The requested itinerary word is not admissible / has empty interior."""
