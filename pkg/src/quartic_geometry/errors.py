"""Exception types shared across the package."""


class QuarticGeometryError(Exception):
    """Base class for all package errors."""


class DomainError(QuarticGeometryError, ValueError):
    """Parameters outside the region where a method is defined."""


class ConvergenceError(QuarticGeometryError, RuntimeError):
    """A truncation, quadrature or integrator failed to converge."""


class SignAlignmentError(QuarticGeometryError, RuntimeError):
    """Neighbouring ground states overlap too weakly to fix a common gauge."""


class PairingError(QuarticGeometryError, RuntimeError):
    """Double-well spectrum is not organised in quasi-degenerate doublets."""


class GridError(QuarticGeometryError, ValueError):
    """Parameter grid unsuitable for finite-difference evaluation."""


class SeriesOrderError(QuarticGeometryError, ArithmeticError):
    """Truncation-order bookkeeping of a perturbation series was violated."""
