"""Exception hierarchy shared across the package."""


class GridcastError(Exception):
    """Base class for all errors raised by gridcast."""


class SchemaError(GridcastError):
    """A file or config does not have the structure it must have."""


class DataError(GridcastError):
    """Values inside an otherwise well-formed input are unusable."""


class NumericalError(GridcastError):
    """A numerical procedure diverged or hit a singular system."""


class ConfigError(GridcastError):
    """An experiment configuration is inconsistent or incomplete."""
