"""Exception taxonomy shared across the package."""


class PdcLabError(Exception):
    """Base class for all errors raised by pdc_lab."""


class NonPositiveParameter(PdcLabError):
    """A physical parameter that must be strictly positive is not."""


class DimensionOverflow(PdcLabError):
    """A composite Hilbert-space dimension exceeds the configured guard."""


class VacuumStatistics(PdcLabError):
    """Normalized correlation functions are undefined on (numerical) vacuum."""


class MixedPumpUnsupported(PdcLabError):
    """Operation requires a pure pump state; a diagonal mixture was given."""


class UnsupportedOrder(PdcLabError):
    """Requested series order exceeds the hard-coded fourth-order tables."""


class NegativeNorm(PdcLabError):
    """Truncated-series norm came out non-positive; theta is outside validity."""


class SeriesDiverged(PdcLabError):
    """Truncated-series denominator is non-positive; no finite prediction."""


class VacuumPump(PdcLabError):
    """Pump carries no photons, so the requested prediction is undefined."""


class ConfigError(PdcLabError):
    """Invalid or inconsistent run configuration."""
