"""Exception types shared by the mass spectrum modules."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from covariance import VerificationReport


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Raised when a propagator is evaluated on (or too close to) its pole."""


class ConfigError(ValueError):
    """Raised for invalid run or quadrature configuration."""


class VerificationFailure(AssertionError):
    """Raised by a verification check whose worst residual exceeds its tolerance."""

    def __init__(self, report: VerificationReport) -> None:
        super().__init__(
            f"{report.name} failed: max residual {report.max_residual:.3e} "
            f"> tolerance {report.tolerance:.1e} (witness trial {report.witness})"
        )
        self.report = report
