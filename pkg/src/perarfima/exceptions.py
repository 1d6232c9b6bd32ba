"""Exception hierarchy; the CLI maps these onto exit codes."""


class SpecError(ValueError):
    """Invalid model specification or run configuration."""


class NonStationaryError(SpecError):
    """Model violates the periodic stationarity conditions."""


class NumericalError(ArithmeticError):
    """A computation failed numerically (singular system, non-positive data)."""
