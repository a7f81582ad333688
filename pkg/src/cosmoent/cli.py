"""The CLI for cosmoent."""

from __future__ import annotations

# Runtime import (not TYPE_CHECKING-only): cappa resolves annotations via get_type_hints
# at collection time, which needs Path in the module namespace.
from pathlib import Path  # ruff:ignore[typing-only-standard-library-import]
from typing import Annotated, Any

import cappa
from loguru import logger
from nclutils import pp
from pydantic import ValidationError

from cosmoent.constants import CLILogLevel, ExitCode, LogLevel, OutputFormat
from cosmoent.exceptions import CosmoEntError
from cosmoent.logging import instantiate_logger, log_validation_errors
from cosmoent.settings import FileSettings

MODEL_GROUP = (1, "Model")
MODES_GROUP = (2, "Modes")
OUTPUT_GROUP = (4, "Output")


@cappa.command(name="cosmoent")
class CosmoEntCLI:
    """Entanglement generated by a smooth cosmological expansion: spectra, oracle checks, and parameter recovery."""

    command: cappa.Subcommands[
        SpectrumCommand | OracleCommand | InvertCommand | FitCommand | EntropyCommand
    ]

    epsilon: Annotated[
        float,
        cappa.Arg(
            long="epsilon",
            help="Expansion volume: the scale factor grows from 1 to 1 + 2 epsilon. [default: 1]",
            propagate=True,
            group=MODEL_GROUP,
        ),
    ] = None
    sigma: Annotated[
        float,
        cappa.Arg(
            long="sigma",
            help="Expansion rapidity, in inverse conformal time. [default: 1]",
            propagate=True,
            group=MODEL_GROUP,
        ),
    ] = None
    mass: Annotated[
        float,
        cappa.Arg(
            long="mass",
            help="Field mass. [default: 1]",
            propagate=True,
            group=MODEL_GROUP,
        ),
    ] = None

    k: Annotated[
        list[float],
        cappa.Arg(
            long="k",
            help="Mode momentum. Repeat --k for several; overrides the k grid.",
            propagate=True,
            group=MODES_GROUP,
        ),
    ] = None
    k_min: Annotated[
        float,
        cappa.Arg(long="k-min", help="Lower end of the k grid. [default: 0]", propagate=True, group=MODES_GROUP),
    ] = None
    k_max: Annotated[
        float,
        cappa.Arg(long="k-max", help="Upper end of the k grid. [default: 3]", propagate=True, group=MODES_GROUP),
    ] = None
    k_count: Annotated[
        int,
        cappa.Arg(long="k-count", help="Points in the k grid. [default: 7]", propagate=True, group=MODES_GROUP),
    ] = None
    k_scale: Annotated[
        str,
        cappa.Arg(
            long="k-scale",
            help="Spacing of the k grid. [default: linear]",
            choices=["linear", "log"],
            propagate=True,
            group=MODES_GROUP,
        ),
    ] = None

    output_format: Annotated[
        str,
        cappa.Arg(
            long="format",
            help="Output format. [default: csv]",
            choices=[x.value for x in OutputFormat],
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = None
    output: Annotated[
        Path,
        cappa.Arg(
            long="output",
            short="o",
            help="Write the table to this file instead of stdout.",
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = None
    config: Annotated[
        Path,
        cappa.Arg(
            long="config",
            help="A key=value file of options. Flags override its values.",
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = None
    workers: Annotated[
        int,
        cappa.Arg(
            long="workers",
            help="Threads to spread modes over. Output order does not depend on it. [default: 1]",
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = None

    verbosity: Annotated[
        CLILogLevel,
        cappa.Arg(
            short=True,
            count=True,
            help="Verbosity level (`-v` or `-vv`)",
            choices=[],
            show_default=False,
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = CLILogLevel.INFO

    log_file: Annotated[
        Path | str,
        cappa.Arg(
            long="log-file",
            required=False,
            help="The log file.",
            propagate=True,
            group=OUTPUT_GROUP,
        ),
    ] = None


@cappa.command(name="spectrum", invoke="cosmoent.cli_commands.spectrum.main")
class SpectrumCommand:
    """Tabulate gamma, particle number and entanglement entropy over a set of momenta."""


@cappa.command(name="oracle", invoke="cosmoent.cli_commands.oracle.main")
class OracleCommand:
    """Integrate the mode equation and compare gamma with the closed form. Exits 3 on disagreement."""

    rel_tol: Annotated[
        float,
        cappa.Arg(long="rel-tol", help="Integrator local relative tolerance, in [1e-14, 1e-6]. [default: 1e-10]", group=(3, "Oracle")),
    ] = None
    max_rel_err: Annotated[
        float,
        cappa.Arg(long="max-rel-err", help="Largest accepted relative gamma error. [default: 1e-6]", group=(3, "Oracle")),
    ] = None
    tau_span_factor: Annotated[
        float,
        cappa.Arg(long="tau-span-factor", help="Half-width of the window in units of 1/sigma, at least 15. [default: 20]", group=(3, "Oracle")),
    ] = None
    max_steps: Annotated[
        int,
        cappa.Arg(long="max-steps", help="Integrator step budget per mode. [default: 5000000]", group=(3, "Oracle")),
    ] = None


@cappa.command(name="invert", invoke="cosmoent.cli_commands.invert.main")
class InvertCommand:
    """Recover gamma from entropies, and epsilon (and sigma, from two nearby energies) for light particles."""

    entropy: Annotated[
        list[float],
        cappa.Arg(long="entropy", help="Entanglement entropy in bits. Repeat for several samples.", group=(3, "Samples")),
    ] = None
    energy: Annotated[
        list[float],
        cappa.Arg(long="energy", help="Particle energy of each --entropy, in the same order.", group=(3, "Samples")),
    ] = None
    input_path: Annotated[
        Path,
        cappa.Arg(long="input", help="CSV file with header energy,entropy_bits.", group=(3, "Samples")),
    ] = None


@cappa.command(name="fit", invoke="cosmoent.cli_commands.fit.main")
class FitCommand:
    """Fit epsilon and sigma to an entanglement spectrum by least squares. Exits 6 if the fit does not converge."""

    input_path: Annotated[
        Path,
        cappa.Arg(long="input", help="CSV file with header k,entropy_bits.", group=(3, "Samples")),
    ] = None
    init_epsilon: Annotated[
        float,
        cappa.Arg(long="init-epsilon", help="Starting epsilon; needs --init-sigma.", group=(3, "Samples")),
    ] = None
    init_sigma: Annotated[
        float,
        cappa.Arg(long="init-sigma", help="Starting sigma; needs --init-epsilon.", group=(3, "Samples")),
    ] = None


@cappa.command(name="entropy", invoke="cosmoent.cli_commands.entropy.main")
class EntropyCommand:
    """Convert between gamma and entanglement entropy."""

    gamma: Annotated[
        float,
        cappa.Arg(long="gamma", help="Bogoliubov ratio |beta/alpha|^2 to convert to bits.", group=(3, "Values")),
    ] = None
    entropy: Annotated[
        list[float],
        cappa.Arg(long="entropy", help="Entropy in bits to convert to gamma. Repeat for several.", group=(3, "Values")),
    ] = None


def _command_options(cmd: object) -> dict[str, Any]:
    """Collect the flags of the active subcommand that map onto ``RunConfig`` fields."""
    if isinstance(cmd, OracleCommand):
        return {
            "rel_tol": cmd.rel_tol,
            "max_rel_err": cmd.max_rel_err,
            "tau_span_factor": cmd.tau_span_factor,
            "max_steps": cmd.max_steps,
        }
    if isinstance(cmd, InvertCommand):
        return {"entropy": cmd.entropy, "energy": cmd.energy, "input_path": cmd.input_path}
    if isinstance(cmd, FitCommand):
        return {
            "input_path": cmd.input_path,
            "init_epsilon": cmd.init_epsilon,
            "init_sigma": cmd.init_sigma,
        }
    if isinstance(cmd, EntropyCommand):
        return {"gamma": cmd.gamma, "entropy": cmd.entropy}
    return {}


def build_config(cli: CosmoEntCLI) -> FileSettings:
    """Assemble the run configuration from parsed CLI arguments and the optional config file.

    Flags left unset are dropped so the config file, then the schema defaults, fill them. The logger is configured from the result.

    Args:
        cli (CosmoEntCLI): The parsed top-level CLI object.

    Returns:
        FileSettings: The validated run configuration.

    Raises:
        cappa.Exit: With code 2 if the config file is missing or the options are invalid.
    """
    if cli.config is not None and not cli.config.is_file():
        logger.error(f"Config file not found: {cli.config}")
        raise cappa.Exit(code=ExitCode.USAGE)

    flags: dict[str, Any] = {
        "epsilon": cli.epsilon,
        "sigma": cli.sigma,
        "mass": cli.mass,
        "k": cli.k,
        "k_min": cli.k_min,
        "k_max": cli.k_max,
        "k_count": cli.k_count,
        "k_scale": cli.k_scale,
        "output_format": cli.output_format,
        "output": cli.output,
        "workers": cli.workers,
        "log_level": LogLevel(cli.verbosity.name) if cli.verbosity != CLILogLevel.INFO else None,
        "log_file": str(cli.log_file) if cli.log_file else None,
        **_command_options(cli.command),
    }
    explicit = {key: value for key, value in flags.items() if value is not None}

    try:
        config = FileSettings(**explicit, _env_file=cli.config)  # type: ignore[call-arg]
    except ValidationError as e:
        log_validation_errors(e)
        raise cappa.Exit(code=ExitCode.USAGE) from e

    instantiate_logger(config.log_level or LogLevel.INFO, config.log_file)
    logger.debug(f"Run config: {config.model_dump(exclude_none=True)}")
    return config


def exit_on_error(error: CosmoEntError) -> cappa.Exit:
    """Log a domain error and build the exit carrying its code.

    Args:
        error (CosmoEntError): The error raised by the library.

    Returns:
        cappa.Exit: The exit to raise from the command.
    """
    logger.error(error)
    return cappa.Exit(code=int(error.exit_code))


def main() -> None:  # pragma: no cover
    """Main function."""  # ruff:ignore[docstring-missing-exception]
    try:
        cappa.invoke(obj=CosmoEntCLI, completion=False)
    except KeyboardInterrupt as e:
        pp.info("Exiting...")
        raise cappa.Exit(code=130) from e


if __name__ == "__main__":  # pragma: no cover
    main()
