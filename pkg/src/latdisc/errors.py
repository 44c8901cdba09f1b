"""Exception types shared across the package."""


class LatdiscError(Exception):
    """Base class for package-specific failures."""


class EnumerationCapExceeded(LatdiscError):
    """Point enumeration would produce more points than the configured cap."""


class DimensionGuardError(LatdiscError):
    """Exact enumeration requested beyond the supported dimension."""


class ProjectionConvergenceError(LatdiscError):
    """Dykstra projection failed to reach tolerance within the iteration cap."""


class EmptyBodyError(LatdiscError):
    """A convex body turned out to be empty (violates its type invariant)."""


class RefinementBudgetExceeded(LatdiscError):
    """Certified refinement ran out of budget before reaching the tolerance."""
