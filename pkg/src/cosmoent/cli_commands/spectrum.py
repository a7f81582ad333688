"""The spectrum command for the cosmoent CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

from loguru import logger

from cosmoent.cli import CosmoEntCLI, build_config, exit_on_error
from cosmoent.constants import ModeStatus
from cosmoent.entanglement import entanglement_spectrum
from cosmoent.exceptions import CosmoEntError
from cosmoent.tables import write_table

if TYPE_CHECKING:
    from cosmoent.entanglement import EntanglementRecord
    from cosmoent.tables import Row

COLUMNS = ("k", "omega_in", "omega_out", "gamma", "n_mean", "entropy_bits", "status")


def _row(record: EntanglementRecord) -> Row:
    return {
        "k": record.k,
        "omega_in": record.omega_in,
        "omega_out": record.omega_out,
        "gamma": record.gamma,
        "n_mean": record.mean_n,
        "entropy_bits": record.entropy_bits,
        "status": record.status,
    }


def main(cmd: CosmoEntCLI) -> None:
    """Write one row per momentum, ordered by k. Degenerate and saturated modes are flagged, not fatal.

    Raises:
        cappa.Exit: If the parameters are invalid.
    """
    config = build_config(cmd)
    try:
        records = entanglement_spectrum(config.params, config.k_values(), workers=config.workers)
    except CosmoEntError as e:
        raise exit_on_error(e) from e

    degenerate = sum(1 for r in records if r.status is ModeStatus.DEGENERATE)
    if degenerate:
        logger.warning(f"{degenerate} degenerate mode(s) reported with zero entanglement")
    saturated = sum(1 for r in records if r.status is ModeStatus.SATURATED)
    if saturated:
        logger.warning(f"{saturated} mode(s) have gamma past 1 - 1e-12; their entropy is reported as nan")

    write_table(
        [_row(r) for r in records],
        COLUMNS,
        config.output_format,
        config.output,
        title="Entanglement spectrum",
    )
