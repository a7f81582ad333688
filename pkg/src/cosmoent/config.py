"""Typed parameter and run configuration schema for cosmoent.

Library callers construct ``CosmologyParams``, ``ModeSpec`` and ``IntegrationConfig`` directly and never trigger file loading. The CLI builds a ``RunConfig`` (or its file-backed subclass in ``cosmoent.settings``) that carries every command option in one schema.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Self, TypeVar, cast

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from cosmoent.constants import (
    DEFAULT_MAX_REL_ERR,
    DEFAULT_MAX_STEPS,
    DEFAULT_REL_TOL,
    DEFAULT_TAIL_TOL,
    DEFAULT_TAU_SPAN_FACTOR,
    KScale,
    LogLevel,
    OutputFormat,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import NDArray

E = TypeVar("E", bound=Enum)


def make_enum_coercer(
    enum_cls: type[E],
    *,
    error_label: str,
    transform: Callable[[str], str] = str.lower,
) -> Callable[[str | E | None], E | None]:
    """Build a pydantic BeforeValidator that coerces a string into an enum member.

    Args:
        enum_cls (type[E]): The enum the value must resolve to.
        error_label (str): Human-readable name used in the error message.
        transform (Callable[[str], str]): Case normalizer applied before lookup. Defaults to str.lower.

    Returns:
        Callable[[str | E | None], E | None]: A validator for use with pydantic BeforeValidator.
    """

    def coerce(value: str | E | None) -> E | None:
        if value is None:
            return None
        if isinstance(value, enum_cls):
            return value
        try:
            return enum_cls(transform(cast("str", value).strip()))
        except ValueError as e:
            msg = f"Invalid {error_label}: must be one of {[x.value for x in enum_cls]}"
            raise ValueError(msg) from e

    return coerce


coerce_log_level = make_enum_coercer(LogLevel, error_label="log level", transform=str.upper)
coerce_output_format = make_enum_coercer(OutputFormat, error_label="output format")
coerce_k_scale = make_enum_coercer(KScale, error_label="k scale")


def coerce_float_list(value: list[float] | str | float | None) -> list[float] | None:
    """Coerce a comma-separated string or scalar into a list of floats.

    Config files carry lists as ``k=0.5,1,2``; flags arrive as lists already.

    Args:
        value (list[float] | str | float | None): The raw value.

    Returns:
        list[float] | None: The parsed list, or None when unset or blank.
    """
    if value is None:
        return None
    if isinstance(value, str):
        items = [x.strip() for x in value.strip().strip("[]").split(",") if x.strip()]
        return [float(x) for x in items] or None
    if isinstance(value, int | float):
        return [float(value)]
    return [float(x) for x in value] or None


class CosmologyParams(BaseModel):
    """The toy-universe parameters and the field mass.

    ``epsilon`` sets the expansion volume, ``sigma`` its rapidity (inverse conformal time) and ``mass`` the field mass, all in natural units. ``mass = 0`` and ``epsilon = 0`` are the physically meaningful degenerate cases of a decoupled field and a static spacetime.
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    epsilon: float = Field(ge=0)
    sigma: float = Field(gt=0)
    mass: float = Field(default=1.0, ge=0)


class ModeSpec(BaseModel):
    """A field mode label: the momentum k, mixed only with -k."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    k: float


class IntegrationConfig(BaseModel):
    """Controls for the mode-equation integration."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    rel_tol: float = Field(default=DEFAULT_REL_TOL, ge=1e-14, le=1e-6)
    # Half-width of the window in units of 1/sigma.
    tau_span_factor: float = Field(default=DEFAULT_TAU_SPAN_FACTOR, ge=15)
    max_steps: int = Field(default=DEFAULT_MAX_STEPS, ge=10_000)


class KGrid(BaseModel):
    """A momentum grid: ``count`` points from ``k_min`` to ``k_max``, linear or logarithmic."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    k_min: float
    k_max: float
    count: int = Field(ge=1)
    scale: Annotated[KScale, BeforeValidator(coerce_k_scale)] = KScale.LINEAR

    @model_validator(mode="after")
    def validate_bounds(self) -> Self:
        """Reject reversed bounds and non-positive bounds on a logarithmic grid.

        Returns:
            Self: The validated grid.

        Raises:
            ValueError: If the bounds cannot describe a grid of the requested scale.
        """
        if self.k_max < self.k_min:
            msg = f"k_max ({self.k_max}) is below k_min ({self.k_min})"
            raise ValueError(msg)
        if self.scale is KScale.LOG and self.k_min <= 0:
            msg = "A log-spaced k grid needs k_min > 0"
            raise ValueError(msg)
        return self

    def values(self) -> NDArray[np.float64]:
        """Return the grid points in increasing order."""
        if self.count == 1:
            return np.array([self.k_min])
        if self.scale is KScale.LOG:
            return np.geomspace(self.k_min, self.k_max, self.count)
        return np.linspace(self.k_min, self.k_max, self.count)


class RunConfig(BaseModel):
    """Validated configuration for one CLI run.

    One schema carries every command's options so a run is described by its argv plus at most one config file. Commands read only the fields they need.
    """

    epsilon: float = Field(default=1.0, ge=0, allow_inf_nan=False)
    sigma: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    mass: float = Field(default=1.0, ge=0, allow_inf_nan=False)

    # Explicit momenta take precedence over the grid description.
    k: Annotated[list[float] | None, BeforeValidator(coerce_float_list)] = None
    k_min: float = 0.0
    k_max: float = 3.0
    k_count: int = Field(default=7, ge=1)
    k_scale: Annotated[KScale, BeforeValidator(coerce_k_scale)] = KScale.LINEAR

    output_format: Annotated[OutputFormat, BeforeValidator(coerce_output_format)] = OutputFormat.CSV
    output: Path | None = None
    input_path: Path | None = None
    workers: int = Field(default=1, ge=1)

    rel_tol: float = Field(default=DEFAULT_REL_TOL, ge=1e-14, le=1e-6)
    tau_span_factor: float = Field(default=DEFAULT_TAU_SPAN_FACTOR, ge=15)
    max_steps: int = Field(default=DEFAULT_MAX_STEPS, ge=10_000)
    max_rel_err: float = Field(default=DEFAULT_MAX_REL_ERR, gt=0)
    tail_tol: float = Field(default=DEFAULT_TAIL_TOL, ge=1e-14, le=1e-6)

    # invert / entropy
    entropy: Annotated[list[float] | None, BeforeValidator(coerce_float_list)] = None
    energy: Annotated[list[float] | None, BeforeValidator(coerce_float_list)] = None
    gamma: float | None = None

    # fit
    init_epsilon: float | None = Field(default=None, gt=0)
    init_sigma: float | None = Field(default=None, gt=0)

    log_level: Annotated[LogLevel | None, BeforeValidator(coerce_log_level)] = LogLevel.INFO
    log_file: str | Path | None = None

    @property
    def params(self) -> CosmologyParams:
        """Cosmological parameters of this run."""
        return CosmologyParams(epsilon=self.epsilon, sigma=self.sigma, mass=self.mass)

    @property
    def integration(self) -> IntegrationConfig:
        """Oracle integration controls of this run."""
        return IntegrationConfig(
            rel_tol=self.rel_tol, tau_span_factor=self.tau_span_factor, max_steps=self.max_steps
        )

    @property
    def grid(self) -> KGrid:
        """The momentum grid described by the k_min/k_max/k_count/k_scale options."""
        return KGrid(k_min=self.k_min, k_max=self.k_max, count=self.k_count, scale=self.k_scale)

    def k_values(self) -> list[float]:
        """Return the momenta to evaluate: explicit ``k`` values, else the grid, sorted ascending."""
        if self.k:
            return sorted(self.k)
        return [float(x) for x in self.grid.values()]

    @property
    def init(self) -> tuple[float, float] | None:
        """Initial (epsilon, sigma) for the fit, when both are given."""
        if self.init_epsilon is None or self.init_sigma is None:
            return None
        return self.init_epsilon, self.init_sigma

    @model_validator(mode="after")
    def validate_settings(self) -> Self:
        """Validate the grid description eagerly so a bad grid fails before any work starts.

        Returns:
            Self: The validated settings.
        """
        if not self.k:
            _ = self.grid
        return self
