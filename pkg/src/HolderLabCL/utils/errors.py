"""Exceptions and warnings raised across HolderLabCL.

Every error also derives from the builtin a caller would expect (``ValueError`` or
``RuntimeError``) so code catching builtins keeps working.
"""


class HolderLabError(Exception):
    """Base class for all HolderLabCL errors."""


class ConfigurationError(HolderLabError, ValueError):
    """Malformed configuration or resolution out of range."""


class ParameterError(HolderLabError, ValueError):
    """A numerical parameter lies outside its admissible range."""


class PreconditionError(ParameterError):
    """An operation's precondition on its inputs does not hold."""


class InadmissibleProfileError(ParameterError):
    """Radial profile is not plurisubharmonic (non-monotone derivative)."""


class KernelInadmissibleError(ParameterError):
    """Kernel has no plateau, so the averaging constant kappa vanishes."""


class DomainError(HolderLabError, ValueError):
    """Point outside the domain, empty shrunk domain or negative density."""


class SingularDataError(DomainError):
    """Density is not integrable near the origin."""


class ShapeError(HolderLabError, ValueError):
    """Grid functions live on different grids."""


class DegenerateFitError(HolderLabError, ValueError):
    """Log-log fit requested on zero or too few modulus values."""


class SolverFailureError(HolderLabError, RuntimeError):
    """Iterative solver did not reach its tolerance within the iteration cap."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BarrierConstructionError(HolderLabError, RuntimeError):
    """No barrier constant/radius pair on the ladder satisfies rho >= |z|^2."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class KernelUnresolvedWarning(UserWarning):
    """Kernel support is smaller than one grid cell."""


class ModulusTruncatedWarning(UserWarning):
    """Requested dyadic radii fall below twice the grid spacing."""


class NonSubharmonicWarning(UserWarning):
    """Input violates the discrete sub-mean-value property."""
