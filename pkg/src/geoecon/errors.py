"""Exception types shared across geoecon."""


class GeoEconError(Exception):
    """Base class for all geoecon errors."""


class DomainError(GeoEconError, ValueError):
    """A numeric input lies outside the domain where a quantity is defined."""


class DimensionError(GeoEconError, ValueError):
    """Operands have incompatible shapes."""


class ConfigError(GeoEconError, ValueError):
    """Malformed or incomplete run configuration."""
