"""Exception hierarchy for the axirh solver library."""


class AxirhError(Exception):
    """Base class for all library errors."""


class DimensionError(AxirhError):
    """Grid or array too small / shape mismatch for the requested stencil."""


class DomainError(AxirhError):
    """Geometric precondition violated (r <= 0, point outside domain, ...)."""


class SingularityError(AxirhError):
    """Evaluation requested at a singular point of a kernel."""


class ExtrapolationError(AxirhError):
    """Interpolation target lies outside the sampled grid."""


class InvalidMapError(AxirhError):
    """Supplied conformal map fails the injectivity / winding checks."""


class InversionError(AxirhError):
    """Newton inversion of a conformal map did not converge."""


class UnsupportedDomainError(AxirhError):
    """Domain outside the supported class (e.g. not star-shaped)."""


class MapConvergenceError(AxirhError):
    """Boundary-correspondence iteration diverged."""


class MapConsistencyError(AxirhError):
    """Mapped quadrature nodes violate the domain's certified bounds."""


class DegenerateCoefficientError(AxirhError):
    """Boundary coefficient has (near-)zero modulus at a sample."""


class UndersampledError(AxirhError):
    """Argument increments too large for reliable winding extraction."""


class AliasingError(AxirhError):
    """Non-negligible top-frequency content in data fed to the FFT stage."""


class TransplantError(AxirhError):
    """Boundary-data pullback through the conformal map failed."""


class CongruenceError(AxirhError):
    """Solution and problem grids are not congruent."""


class SolverNumericsError(AxirhError):
    """Numerical breakdown in a linear-algebra kernel."""


class ConfigError(AxirhError):
    """Invalid run configuration (unknown keys, missing fields, bad paths)."""
