"""The entropy command for the cosmoent CLI."""

from __future__ import annotations

import cappa
from loguru import logger

from cosmoent.cli import CosmoEntCLI, build_config, exit_on_error
from cosmoent.constants import ExitCode
from cosmoent.entanglement import entropy_closed, entropy_series
from cosmoent.exceptions import CosmoEntError, GammaOutOfRange
from cosmoent.inversion import gamma_from_entropy
from cosmoent.tables import write_table

COLUMNS = ("gamma", "entropy_bits", "entropy_series_bits", "n_mean")


def _row(ratio: float, tail_tol: float) -> dict[str, float | None]:
    closed = entropy_closed(ratio)
    try:
        series: float | None = entropy_series(ratio, tail_tol)
    except GammaOutOfRange as e:
        logger.warning(f"gamma={ratio:.16e}: series skipped: {e}")
        series = None
    return {
        "gamma": ratio,
        "entropy_bits": closed,
        "entropy_series_bits": series,
        "n_mean": ratio / (1.0 - ratio),
    }


def main(cmd: CosmoEntCLI) -> None:
    """Convert --gamma to bits and each --entropy to gamma, one row per value.

    Raises:
        cappa.Exit: With code 2 if no value is given or a value is out of range.
    """
    config = build_config(cmd)
    if config.gamma is None and not config.entropy:
        logger.error("Give --gamma or at least one --entropy")
        raise cappa.Exit(code=ExitCode.USAGE)

    try:
        ratios = [config.gamma] if config.gamma is not None else []
        ratios += [gamma_from_entropy(s) for s in config.entropy or []]
        rows = [_row(ratio, config.tail_tol) for ratio in ratios]
    except CosmoEntError as e:
        raise exit_on_error(e) from e

    write_table(rows, COLUMNS, config.output_format, config.output, title="Entropy")
