"""Exception types shared across the package."""


class LinkvarError(Exception):
    """Base class for all package errors."""


class MatrixMarketError(LinkvarError):
    """Malformed MatrixMarket file; message carries path and line number."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class ConfigError(LinkvarError):
    """Invalid experiment configuration; message names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class DimensionError(LinkvarError):
    """Operands have inconsistent shapes."""


class SolverError(LinkvarError):
    """Iterative routine diverged or failed to make progress."""


class SingleClassError(LinkvarError):
    """AUC requested but the truth labels contain only one class."""
