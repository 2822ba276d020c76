"""Exception types shared across the package."""


class MaserlineError(Exception):
    """Base class for all maserline errors."""


class VacuumStateError(MaserlineError):
    """The photon statistics carry no excitation; a linewidth is undefined."""


class TruncationError(MaserlineError):
    """The Fock-basis truncation is too small for the requested state."""


class ResourceLimitError(TruncationError):
    """Automatic truncation search exceeded the configured hard limit."""


class QuadratureError(MaserlineError):
    """Quadrature nodes could not be computed or a node-doubling ladder
    ran out of headroom before the target tolerance was met."""


class IntegrationError(MaserlineError):
    """Time integration stopped before the end of the requested grid."""

    def __init__(self, message: str, t_reached: float | None = None):
        super().__init__(message)
        self.t_reached = t_reached


class SpectralError(MaserlineError):
    """Eigen-decomposition of a sideband generator is unreliable: large
    residual, (near-)defective generator, or sum-rule violation."""


class ConfigError(MaserlineError):
    """Invalid scan configuration passed to the command-line front end."""
