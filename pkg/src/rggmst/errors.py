"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid density, weight or experiment configuration."""


class ParameterError(ValueError):
    """Parameter outside its admissible range (radius, grid sizes, ...)."""


class DomainError(ValueError):
    """Numerical routine called outside its domain."""


class ConstructionError(RuntimeError):
    """A constructive guarantee failed (signals a logic bug upstream)."""
