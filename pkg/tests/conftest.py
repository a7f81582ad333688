"""Configuration for pytest."""

from collections.abc import Callable, Generator
from pathlib import Path

import pytest
from loguru import logger

from cosmoent.config import CosmologyParams, ModeSpec
from cosmoent.entanglement import entanglement_spectrum


@pytest.fixture
def unit_params() -> CosmologyParams:
    """Return the reference expansion epsilon = sigma = m = 1."""
    return CosmologyParams(epsilon=1.0, sigma=1.0, mass=1.0)


@pytest.fixture
def mode() -> Callable[[float], ModeSpec]:
    """Provide a shorthand for building a ModeSpec from a momentum."""
    return lambda k: ModeSpec(k=k)


@pytest.fixture
def spectrum_file(tmp_path: Path) -> Callable[..., Path]:
    """Provide a callable that writes a noiseless k,entropy_bits file from the forward model.

    Returns:
        Callable[..., Path]: Call with parameters and momenta; returns the written CSV path.
    """

    def _write(params: CosmologyParams, momenta: list[float], name: str = "spectrum.csv") -> Path:
        records = entanglement_spectrum(params, momenta)
        lines = ["# noiseless forward model", "k,entropy_bits"]
        lines += [f"{r.k!r},{r.entropy_bits!r}" for r in records]
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write


@pytest.fixture(autouse=True)
def reset_logger() -> Generator[None, None, None]:
    """Reset logger handlers between tests to prevent closed file handle issues.

    The logger from loguru persists across test runs as a singleton. When tests
    configure logging with file handlers, these handlers can point to closed files
    in subsequent test runs, causing ValueError: I/O operation on closed file.
    This fixture removes all handlers after each test to ensure clean state.
    """
    yield
    logger.remove()
