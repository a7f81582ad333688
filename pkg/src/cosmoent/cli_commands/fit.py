"""The fit command for the cosmoent CLI."""

from __future__ import annotations

import cappa
from loguru import logger

from cosmoent.cli import CosmoEntCLI, build_config, exit_on_error
from cosmoent.constants import ExitCode
from cosmoent.exceptions import CosmoEntError, FitNotConverged
from cosmoent.inversion import fit_parameters
from cosmoent.tables import read_samples, write_table

COLUMNS = ("epsilon_hat", "sigma_hat", "residual_norm", "gradient_norm", "iterations", "converged")


def main(cmd: CosmoEntCLI) -> None:
    """Fit (epsilon, sigma) to a k,entropy_bits file and print the result.

    The best iterate is printed even when the fit does not converge.

    Raises:
        cappa.Exit: With code 2 for unreadable or insufficient data, 5 if nothing is identifiable, 6 without convergence.
    """
    config = build_config(cmd)
    if config.input_path is None:
        logger.error("fit needs an --input file with header k,entropy_bits")
        raise cappa.Exit(code=ExitCode.USAGE)
    if (config.init_epsilon is None) != (config.init_sigma is None):
        logger.error("Give both --init-epsilon and --init-sigma, or neither")
        raise cappa.Exit(code=ExitCode.USAGE)

    try:
        samples = read_samples(config.input_path, ("k", "entropy_bits"))
        result = fit_parameters(samples, config.mass, init=config.init)
    except CosmoEntError as e:
        raise exit_on_error(e) from e

    write_table(
        [
            {
                "epsilon_hat": result.epsilon_hat,
                "sigma_hat": result.sigma_hat,
                "residual_norm": result.residual_norm,
                "gradient_norm": result.gradient_norm,
                "iterations": result.iterations,
                "converged": result.converged,
            }
        ],
        COLUMNS,
        config.output_format,
        config.output,
        title="Least-squares fit",
    )

    if not result.converged:
        raise exit_on_error(
            FitNotConverged(f"Fit stopped after {result.iterations} iterations without converging")
        )
