"""Exception types shared across the toolkit."""

from __future__ import annotations


class GecEvalError(Exception):
    """Base class for all toolkit errors."""


class M2ParseError(GecEvalError):
    """Malformed M2 input. Carries the 1-based line number of the offending line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ContractViolation(GecEvalError):
    """A documented precondition was violated by the caller."""


class InsufficientData(GecEvalError):
    """Not enough data points to compute the requested statistic."""


class ConfigurationError(GecEvalError):
    """Missing or inconsistent runtime configuration (providers, endpoints, flags)."""


class AdjudicationError(GecEvalError):
    """Rejected state transition in the judge/adjudication pipeline.

    ``code`` is a stable machine-readable identifier: unknown_case,
    duplicate_annotator, wrong_state, bad_verdict, two_annotator_protocol.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class IncompleteCasesError(GecEvalError):
    """Raised when an operation requires all cases finished but some are pending."""

    def __init__(self, pending_ids: list[str]):
        super().__init__(
            f"{len(pending_ids)} case(s) not yet final: {', '.join(pending_ids[:5])}"
            + ("..." if len(pending_ids) > 5 else "")
        )
        self.pending_ids = pending_ids
