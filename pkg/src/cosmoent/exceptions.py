"""Domain exceptions raised by cosmoent.

Every error carries the process exit code the CLI reports for it, so the command modules
translate any library failure with a single ``except CosmoEntError`` clause.
"""

from __future__ import annotations

from typing import ClassVar

from cosmoent.constants import ExitCode


class CosmoEntError(Exception):
    """Base class for every error cosmoent raises."""

    exit_code: ClassVar[ExitCode] = ExitCode.USAGE


class DegenerateMode(CosmoEntError):
    """The zero mode of a massless field has no frequency scale."""


class GammaOutOfRange(CosmoEntError):
    """A Bogoliubov ratio lies outside [0, 1) or past the divergence guard."""


class EntropyOutOfRange(CosmoEntError):
    """An entropy is negative or larger than any representable gamma produces."""


class RegimeUnsupported(CosmoEntError):
    """The mode oracle was asked to integrate outside its supported regime.

    Covers expansions slower than the supported rapidity bound and windows holding too
    many oscillations for plain adaptive stepping.
    """


class StepLimitExceeded(CosmoEntError):
    """The mode integration hit its step budget before reaching the out-region."""

    exit_code = ExitCode.ORACLE_THRESHOLD


class MatchingIllConditioned(CosmoEntError):
    """The out-region plane-wave basis is too ill-conditioned to match against."""

    exit_code = ExitCode.ORACLE_THRESHOLD


class OracleThresholdExceeded(CosmoEntError):
    """At least one mode disagreed with the closed form by more than the threshold."""

    exit_code = ExitCode.ORACLE_THRESHOLD

    def __init__(self, failed_modes: list[float], threshold: float) -> None:
        """Build a message naming every momentum that failed the comparison.

        Args:
            failed_modes (list[float]): The momenta whose discrepancy exceeded the threshold.
            threshold (float): The relative gamma error that was allowed.
        """
        self.failed_modes = failed_modes
        self.threshold = threshold
        listed = ", ".join(f"{k:g}" for k in failed_modes)
        super().__init__(
            f"Oracle discrepancy above max-rel-err {threshold:g} for k = {listed}"
        )


class RegimeViolation(CosmoEntError):
    """An estimator was applied outside the light-particle window it is derived in."""

    exit_code = ExitCode.REGIME_VIOLATION


class DenominatorNonpositive(CosmoEntError):
    """The rapidity estimator's denominator is not positive for the given data."""

    exit_code = ExitCode.REGIME_VIOLATION


class StepOutOfRange(CosmoEntError):
    """Two samples are too close (or too far apart) in energy to difference."""


class MasslessUnidentifiable(CosmoEntError):
    """Massless modes carry no entanglement, so they say nothing about the expansion."""

    exit_code = ExitCode.UNIDENTIFIABLE


class Unidentifiable(CosmoEntError):
    """Every sample has zero entropy, so no expansion parameter can be recovered."""

    exit_code = ExitCode.UNIDENTIFIABLE


class InsufficientData(CosmoEntError):
    """Too few samples, or too few distinct entropies, to fit two parameters."""


class InputParseError(CosmoEntError):
    """An input table could not be read."""


class FitNotConverged(CosmoEntError):
    """The least-squares fit stopped at its iteration cap.

    The library reports this through ``FitResult.converged``; only the CLI raises it, to exit
    non-zero after printing the best iterate.
    """

    exit_code = ExitCode.NOT_CONVERGED
