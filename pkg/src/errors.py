"""
Exception hierarchy for ghzwl

Library code raises these; only the command line front end catches them and
turns them into exit codes.
"""

from typing import Optional


class GhzwlError(Exception):
    """Base class for every error raised by the package"""


class ValidationError(GhzwlError):
    """Malformed or out-of-range input"""


class NegativeProbabilityError(ValidationError):
    """
    Correlations that do not belong to any GHZ-diagonal state

    Args:
        index: 1-based basis index of the most negative probability
        value: The offending probability
    """
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"p_{index} = {value:.3e} is negative; correlations lie outside the state set")


class AssumptionViolationError(ValidationError):
    """Witness coefficients do not satisfy the symmetric assumptions"""


class FamilyRegimeError(ValidationError):
    """Unphysical family point or a p16 regime the boundary assembly does not cover"""


class NonPositiveDenominatorError(GhzwlError):
    """Witness expectation is not positive; flip the witness sign and retry"""


class DomainError(GhzwlError):
    """A numerical routine found no admissible candidate or no root bracket"""


class InfeasibleError(GhzwlError):
    """
    A separable construction has no solution at the requested point

    Args:
        reason: Short description of the failed constraint
        detail: Optional numeric detail (e.g. the violating value)
    """
    def __init__(self, reason: str, detail: Optional[float] = None):
        self.reason = reason
        self.detail = detail
        msg = reason if detail is None else f"{reason} ({detail:.6g})"
        super().__init__(msg)
