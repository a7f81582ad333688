"""The invert command for the cosmoent CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

import cappa
from loguru import logger

from cosmoent.cli import CosmoEntCLI, build_config, exit_on_error
from cosmoent.config import CosmologyParams
from cosmoent.constants import REGIME_RATIO_MAX, ExitCode
from cosmoent.exceptions import CosmoEntError
from cosmoent.inversion import (
    EntanglementSample,
    estimate_epsilon,
    estimate_sigma,
    gamma_from_entropy,
)
from cosmoent.model import validity_window
from cosmoent.tables import read_samples, write_table

if TYPE_CHECKING:
    from cosmoent.config import RunConfig

COLUMNS = ("energy", "entropy_bits", "gamma", "n_mean", "epsilon_hat", "regime_ratio", "sigma_hat")


def _collect_samples(config: RunConfig) -> list[tuple[float | None, float]]:
    """Gather (energy, entropy) pairs from the input file or the flags.

    Raises:
        cappa.Exit: If no entropy was given or the energies do not pair up with the entropies.
    """
    if config.input_path is not None:
        return list(read_samples(config.input_path, ("energy", "entropy_bits")))

    entropies = config.entropy or []
    if not entropies:
        logger.error("Give at least one --entropy or an --input file")
        raise cappa.Exit(code=ExitCode.USAGE)

    energies = config.energy or []
    if energies and len(energies) != len(entropies):
        logger.error(f"Got {len(energies)} --energy values for {len(entropies)} --entropy values")
        raise cappa.Exit(code=ExitCode.USAGE)
    if not energies:
        return [(None, s) for s in entropies]
    return list(zip(energies, entropies, strict=True))


def _invert(config: RunConfig, pairs: list[tuple[float | None, float]]) -> list[dict[str, float | None]]:
    """Invert every entropy, then estimate epsilon per energy and sigma from a pair of energies."""
    rows: list[dict[str, float | None]] = []
    samples: list[EntanglementSample] = []
    epsilon_hats: list[float] = []
    for energy, entropy in pairs:
        ratio = gamma_from_entropy(entropy)
        row: dict[str, float | None] = {
            "energy": energy,
            "entropy_bits": entropy,
            "gamma": ratio,
            "n_mean": ratio / (1.0 - ratio),
        }
        if energy is not None:
            sample = EntanglementSample(energy=energy, entropy_bits=entropy)
            estimate = estimate_epsilon(sample, config.mass)
            row |= {"epsilon_hat": estimate.epsilon_hat, "regime_ratio": estimate.regime_ratio}
            samples.append(sample)
            epsilon_hats.append(estimate.epsilon_hat)
        rows.append(row)

    if len(samples) != 2:  # ruff:ignore[magic-value-comparison]
        return rows

    sigma = estimate_sigma((samples[0], samples[1]), config.mass)
    for row in rows:
        row["sigma_hat"] = sigma.sigma_hat

    estimated = CosmologyParams(epsilon=min(epsilon_hats), sigma=sigma.sigma_hat, mass=config.mass)
    window = validity_window(estimated, sigma.energy)
    if not window.satisfied(REGIME_RATIO_MAX):
        logger.warning(
            f"Samples sit outside the light-particle window: m sqrt(eps)/E={window.mass_ratio:.3g}, "
            f"E/(2 sigma)={window.energy_ratio:.3g}, m sqrt(eps)/(2 sigma)={window.species_ratio:.3g}"
        )
    return rows


def main(cmd: CosmoEntCLI) -> None:
    """Print gamma for every entropy, epsilon for every sample with an energy, and sigma from a pair of energies.

    Raises:
        cappa.Exit: With code 2 for bad entropies or inputs, 4 outside the light-particle regime, 5 for massless fields.
    """
    config = build_config(cmd)
    try:
        pairs = _collect_samples(config)
        rows = _invert(config, pairs)
    except CosmoEntError as e:
        raise exit_on_error(e) from e

    write_table(rows, COLUMNS, config.output_format, config.output, title="Inversion")
