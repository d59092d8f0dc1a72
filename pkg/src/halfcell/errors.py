"""Exception hierarchy shared by all subpackages."""


class HalfcellError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(HalfcellError):
    """Structure generation failed (impossible packing, infeasible constraint, ...)."""


class DomainError(HalfcellError):
    """A physical quantity left its admissible domain (e.g. nonpositive concentration)."""


class ModelError(HalfcellError):
    """The discrete model is inconsistent with the geometry (forbidden interface, missing phase)."""


class NumericsError(HalfcellError):
    """A numerical evaluation produced NaN/Inf."""


class NonConvergence(HalfcellError):
    """Newton iteration exceeded its budget; the caller may retry with a smaller step."""


class SimulationError(HalfcellError):
    """A transient solve failed irrecoverably (time step underflow)."""


class ReductionError(HalfcellError):
    """Model order reduction failed (degenerate data, dimension mismatch, reduced solve failure)."""


class ConfigError(HalfcellError):
    """A configuration file or value is malformed."""
