"""Log configuration for cosmoent."""

import sys
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from cosmoent.constants import LogLevel


def log_validation_errors(error: ValidationError) -> None:
    """Log each validation message so a bad flag or config file reads cleanly at the CLI.

    Args:
        error (ValidationError): The validation error raised while building a model.
    """
    for err in error.errors():
        location = ".".join(str(x) for x in err["loc"])
        logger.error(f"{location}: {err['msg']}" if location else err["msg"])


def _stderr_log_formatter(record: dict) -> str:
    """Build the colorized loguru format template for the stderr sink.

    Bound ``extra`` fields, such as the start index the fit logs under, are appended after the message, and the traceback follows when present.

    Args:
        record (dict): The loguru record whose `extra`/`exception` keys decide which optional segments appear.

    Returns:
        str: The loguru format template string with color tags.
    """
    level = "<level>{level: <8}</level> | "
    message = "<level>{message}</level>"
    extras = " | <level>{extra}</level>" if record["extra"] else ""
    exception = "\n{exception}" if record["exception"] else ""

    return f"{level}{message}{extras}{exception}\n"


def _log_file_formatter(record: dict) -> str:
    """Build the plain-text loguru format template for the log-file sink.

    Args:
        record (dict): The loguru record whose `extra`/`exception` keys decide which optional segments appear.

    Returns:
        str: The loguru format template string without color tags.
    """
    timestamp = "{time:YYYY-MM-DD HH:mm:ss.SSS} | "
    level = "{level: <8} | "
    extras = " | {extra}" if record["extra"] else ""
    exception = "\n{exception}" if record["exception"] else ""

    return f"{timestamp}{level}{{message}}{extras}{exception}\n"


def instantiate_logger(log_level: LogLevel, log_file: Path | str | None = None) -> None:
    """Instantiate the Loguru logger for cosmoent.

    Tables are written to stdout, so every sink configured here goes to stderr or a file.

    Args:
        log_level (LogLevel): The verbosity level for the logger.
        log_file (Path | str | None): Also write logs to this file. Defaults to None.
    """
    log_level_name = log_level.value

    logger.remove()
    logger.add(
        sys.stderr,
        level=log_level_name,
        format=_stderr_log_formatter,
        colorize=True,
    )
    if log_file:
        path_to_log_file = Path(log_file).expanduser().resolve()
        path_to_log_file.parent.mkdir(parents=True, exist_ok=True)

        logger.add(
            path_to_log_file,
            level=log_level_name,
            format=_log_file_formatter,
            rotation="10 MB",
            retention=3,
        )
