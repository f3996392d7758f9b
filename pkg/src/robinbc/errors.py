"""Exception hierarchy shared by all modules."""


class RobinBCError(Exception):
    """Base class for numerical failures raised by this package."""


class PoleError(RobinBCError, ValueError):
    """Argument sits on (or numerically at) a pole of a special function."""


class DomainError(RobinBCError, ValueError):
    """Argument outside the domain where an operation is defined."""


class SeriesRadiusError(DomainError):
    """Power series requested outside its trusted radius."""


class ConvergenceError(RobinBCError, RuntimeError):
    """Iteration or series did not converge within its budget."""


class TurningPointError(DomainError):
    """No classical turning point exists for the requested energy."""


class WindowCollapseError(RobinBCError):
    """No low-k fit window satisfies the linearity criterion."""


class FreeRegionError(DomainError):
    """Start point or energies violate the free-region requirement."""
