"""The oracle command for the cosmoent CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

from loguru import logger

from cosmoent.cli import CosmoEntCLI, build_config, exit_on_error
from cosmoent.constants import NORMALIZATION_TOLERANCE, ModeStatus
from cosmoent.exceptions import CosmoEntError, OracleThresholdExceeded
from cosmoent.oracle import oracle_sweep
from cosmoent.tables import write_table

if TYPE_CHECKING:
    from cosmoent.oracle import OracleReport
    from cosmoent.tables import Row

COLUMNS = (
    "k",
    "gamma_closed",
    "gamma_oracle",
    "rel_err",
    "abs_err",
    "normalization_defect",
    "wronskian_drift",
    "steps",
    "status",
)


def _row(report: OracleReport, max_rel_err: float) -> Row:
    status = report.status
    if status is ModeStatus.OK and not report.passes(max_rel_err):
        status = ModeStatus.FAILED
    return {
        "k": report.k,
        "gamma_closed": report.gamma_closed,
        "gamma_oracle": report.gamma_oracle,
        "rel_err": report.rel_err,
        "abs_err": report.abs_err,
        "normalization_defect": report.normalization_defect,
        "wronskian_drift": report.wronskian_drift,
        "steps": report.trace.steps_taken if report.trace else None,
        "status": status,
    }


def main(cmd: CosmoEntCLI) -> None:
    """Cross-check every momentum and write the discrepancy table.

    Raises:
        cappa.Exit: With code 2 outside the oracle's regime and 3 if any mode disagrees.
    """
    config = build_config(cmd)
    try:
        reports = oracle_sweep(
            config.params, config.k_values(), config.integration, workers=config.workers
        )
    except CosmoEntError as e:
        raise exit_on_error(e) from e

    write_table(
        [_row(r, config.max_rel_err) for r in reports],
        COLUMNS,
        config.output_format,
        config.output,
        title="Oracle cross-check",
    )

    for report in reports:
        if report.normalization_defect > NORMALIZATION_TOLERANCE:
            logger.warning(
                f"k={report.k:g}: |alpha|^2 - |beta|^2 misses 1 by {report.normalization_defect:.3e}"
            )

    failed = [r.k for r in reports if not r.passes(config.max_rel_err)]
    if failed:
        raise exit_on_error(OracleThresholdExceeded(failed, config.max_rel_err))

    logger.info(f"All {len(reports)} modes agree within {config.max_rel_err:g}")
