from __future__ import annotations

"""
Custom exceptions for ICE BeamSim.

Scope:
- Numerical library (arrays, channel, sensing, recovery, locbf, metrics)
- Scenario configuration
- Result files (CSV / YAML manifest)

⚠️ IMPORTANT:
- Numerical code raises InvalidParameterError / DegenerateInputError only.
- File and config problems belong to ConfigurationError / ParsingError / StorageError.
"""


# ======================================================================
# BASE
# ======================================================================

class BeamSimError(Exception):
    """
    Base exception for all ICE BeamSim errors.
    """
    pass


# ======================================================================
# NUMERICAL
# ======================================================================

class InvalidParameterError(BeamSimError, ValueError):
    """
    Raised when an operation receives an argument outside its domain
    (odd beam count, shape mismatch, negative power, index out of range...).
    """
    pass


class DegenerateInputError(BeamSimError):
    """
    Raised when the input is well-formed but carries no usable signal.

    Examples:
    - all-zero channel matrix passed to normalization
    - sensing matrix whose columns are all zero
    """
    pass


# ======================================================================
# CONFIGURATION
# ======================================================================

class ConfigurationError(BeamSimError):
    """
    Raised when a scenario configuration is invalid or inconsistent.
    """

    def __init__(
        self,
        message: str,
        *,
        field: str | None = None,
        line_number: int | None = None,
    ) -> None:
        self.field = field
        self.line_number = line_number
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)


# ======================================================================
# PARSING
# ======================================================================

class ParsingError(BeamSimError):
    """
    Raised when a config, manifest or results file cannot be read.
    """

    def __init__(
        self,
        message: str,
        *,
        line: str | None = None,
        line_number: int | None = None,
        source: str | None = None,
    ) -> None:
        self.line = line
        self.line_number = line_number
        self.source = source
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)


# ======================================================================
# STORAGE / IO
# ======================================================================

class StorageError(BeamSimError):
    """
    Raised on result persistence errors (output directory, CSV, manifest).
    """
    pass
