"""Standardized exit codes and custom exceptions for pdflap."""

from __future__ import annotations

# ---------------------------------------------------------------------------
# Exit codes
# ---------------------------------------------------------------------------

EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_RUNTIME_ERROR = 3


# ---------------------------------------------------------------------------
# Custom exceptions
# ---------------------------------------------------------------------------

class PdflapError(Exception):
    """Base exception for pdflap."""

    exit_code: int = EXIT_RUNTIME_ERROR

    def __init__(self, message: str, exit_code: int | None = None) -> None:
        super().__init__(message)
        if exit_code is not None:
            self.exit_code = exit_code


class ValidationError(PdflapError):
    """Invalid user input or violated pre-condition (dimension, pair, tolerance)."""

    exit_code = EXIT_USAGE


class GraphError(ValidationError):
    """Digraph construction rejected (self-loop, duplicate edge, dangling endpoint)."""


class ParseError(ValidationError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputError(PdflapError):
    """Input could not be read or output could not be written."""

    exit_code = EXIT_USAGE


class CapacityError(PdflapError):
    """A matrix exceeds the configured size cap."""

    exit_code = EXIT_RUNTIME_ERROR


class SolverError(PdflapError):
    """The symmetric eigensolver failed to converge."""

    exit_code = EXIT_RUNTIME_ERROR


class VerificationError(PdflapError):
    """Spectral Betti numbers disagree with the exact oracle."""

    exit_code = EXIT_VERIFICATION_FAILED

    def __init__(
        self,
        message: str,
        mismatches: list[str] | None = None,
        report: object | None = None,
    ) -> None:
        super().__init__(message)
        self.mismatches = list(mismatches or [])
        # The full report, so callers can still write it out.
        self.report = report
