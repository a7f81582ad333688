"""Mode-equation integration oracle.

Integrates ``chi'' + omega^2(tau) chi = 0`` with ``omega^2 = k^2 + m^2 C(tau)`` through the expansion epoch, starting from the unit-Wronskian in-mode, and matches the result onto out-region plane waves. Nothing here calls the closed forms except ``check_against_closed_form``, which exists to compare against them.

The mode is carried in the instantaneous plane-wave basis::

    chi  = (a e^{-i theta} + b e^{+i theta}) / sqrt(2 omega)
    chi' = -i omega (a e^{-i theta} - b e^{+i theta}) / sqrt(2 omega)
    a' = w e^{+2 i theta} b,  b' = w e^{-2 i theta} a,  theta' = omega,  w = omega' / (2 omega)

an exact rewrite of the first-order system for (chi, chi'). The amplitudes are constant wherever C is flat, and the error control acts on ``b`` relative to its own size, so tiny mixing coefficients keep their relative precision. The Wronskian is ``i (|a|^2 - |b|^2)``.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger
from scipy.integrate import DOP853

from cosmoent.bogoliubov import gamma as closed_gamma
from cosmoent.config import IntegrationConfig, ModeSpec
from cosmoent.constants import (
    GAMMA_ABS_FLOOR,
    GAMMA_REL_FLOOR,
    MATCHING_MAX_CONDITION,
    ORACLE_MAX_OSCILLATION_SCALE,
    ORACLE_MIN_SIGMA,
    ModeStatus,
)
from cosmoent.exceptions import (
    DegenerateMode,
    MatchingIllConditioned,
    RegimeUnsupported,
    StepLimitExceeded,
)
from cosmoent.model import frequencies, scale_factor, scale_factor_rate

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import NDArray

    from cosmoent.config import CosmologyParams

# Absolute floor of the error control; each amplitude is otherwise controlled relative to its own size.
_ATOL = 1e-300
# Opening step, in units of 1 / omega_out.
_FIRST_STEP = 1e-2


@dataclass(frozen=True, slots=True)
class ComplexBogoliubov:
    """Out-basis expansion ``chi = alpha f_out + beta f_out*`` of the in-mode at the end of the window.

    Phases depend on where the window starts and ends; only magnitudes are physical.
    """

    alpha: complex
    beta: complex

    @property
    def gamma(self) -> float:
        """The ratio ``|beta / alpha|^2``."""
        return abs(self.beta) ** 2 / abs(self.alpha) ** 2

    @property
    def normalization_defect(self) -> float:
        """``| |alpha|^2 - |beta|^2 - 1 |``, zero for an exact Bogoliubov map."""
        return abs(abs(self.alpha) ** 2 - abs(self.beta) ** 2 - 1.0)


@dataclass(frozen=True, slots=True)
class IntegrationTrace:
    """Diagnostics of one integration.

    Attributes:
        steps_taken: Accepted integrator steps.
        wronskian_drift: Largest ``|W(tau) - W(tau0)| / |W(tau0)|`` over the accepted steps.
        final_tau: The conformal time the integration stopped at.
    """

    steps_taken: int
    wronskian_drift: float
    final_tau: float


@dataclass(frozen=True, slots=True, eq=False)
class ModeProfile:
    """The in-mode sampled through the expansion, where no particle notion exists."""

    tau: NDArray[np.float64]
    mode_sq: NDArray[np.float64]
    scale: NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class OracleReport:
    """Discrepancy between the integrated and the closed-form gamma of one mode."""

    k: float
    gamma_oracle: float
    gamma_closed: float
    rel_err: float
    abs_err: float
    normalization_defect: float
    trace: IntegrationTrace | None = None
    coefficients: ComplexBogoliubov | None = field(default=None, repr=False)
    status: ModeStatus = ModeStatus.OK

    @property
    def wronskian_drift(self) -> float:
        """Wronskian drift of the underlying integration, NaN when nothing was integrated."""
        return self.trace.wronskian_drift if self.trace else math.nan

    def passes(self, max_rel_err: float) -> bool:
        """Report whether the mode agrees with the closed form.

        A mode agrees when its relative gamma error is within ``max_rel_err`` or its absolute gamma error is below GAMMA_ABS_FLOOR, the resolution of an O(1) amplitude in double precision.

        Args:
            max_rel_err (float): The admissible relative gamma error.

        Returns:
            bool: True when the mode agrees or was skipped as degenerate.
        """
        if self.status is ModeStatus.DEGENERATE:
            return True
        return self.rel_err <= max_rel_err or self.abs_err < GAMMA_ABS_FLOOR


def _wronskian(a: complex, b: complex) -> complex:
    """The Wronskian ``chi chi'* - chi* chi'`` expressed through the plane-wave amplitudes."""
    return 1j * (abs(a) ** 2 - abs(b) ** 2)


def _plane_wave(omega: float, tau: float) -> complex:
    """Positive-frequency flat-region mode ``e^{-i omega tau} / sqrt(2 omega)``."""
    return cmath.exp(-1j * omega * tau) / math.sqrt(2.0 * omega)


def _mode_from_amplitudes(a: complex, b: complex, theta: float, omega: float) -> tuple[complex, complex]:
    """Rebuild ``(chi, chi')`` from the plane-wave amplitudes at one instant."""
    forward = a * cmath.exp(-1j * theta)
    backward = b * cmath.exp(1j * theta)
    norm = math.sqrt(2.0 * omega)
    return (forward + backward) / norm, -1j * omega * (forward - backward) / norm


def _check_regime(params: CosmologyParams, omega_out: float, config: IntegrationConfig) -> None:
    """Raise RegimeUnsupported outside the range plain adaptive stepping handles.

    Raises:
        RegimeUnsupported: If sigma is below ORACLE_MIN_SIGMA or the window holds too many oscillations.
    """
    if params.sigma < ORACLE_MIN_SIGMA:
        msg = (
            f"sigma = {params.sigma:g} is below the smallest rapidity the oracle integrates "
            f"(sigma >= {ORACLE_MIN_SIGMA:g}); use the closed form"
        )
        raise RegimeUnsupported(msg)

    oscillation_scale = omega_out * config.tau_span_factor / params.sigma
    if oscillation_scale > ORACLE_MAX_OSCILLATION_SCALE:
        msg = (
            f"omega_out * tau_span_factor / sigma = {oscillation_scale:.3g} exceeds "
            f"{ORACLE_MAX_OSCILLATION_SCALE:g}; too many oscillations to integrate"
        )
        raise RegimeUnsupported(msg)


def _match_out_region(chi: complex, chi_prime: complex, omega: float, tau: float) -> ComplexBogoliubov:
    """Solve ``[chi, chi'] = alpha [f, f'] + beta [f*, f*']`` at a flat-region time.

    Raises:
        MatchingIllConditioned: If the plane-wave basis matrix is too ill-conditioned to invert.
    """
    f = _plane_wave(omega, tau)
    basis = np.array([[f, f.conjugate()], [-1j * omega * f, 1j * omega * f.conjugate()]])
    condition = float(np.linalg.cond(basis))
    if condition > MATCHING_MAX_CONDITION:
        msg = f"Out-region basis condition number {condition:.3g} exceeds {MATCHING_MAX_CONDITION:g}"
        raise MatchingIllConditioned(msg)

    alpha, beta = np.linalg.solve(basis, np.array([chi, chi_prime]))
    return ComplexBogoliubov(alpha=complex(alpha), beta=complex(beta))


def _integrate(
    params: CosmologyParams,
    mode: ModeSpec,
    config: IntegrationConfig,
    sample_taus: NDArray[np.float64] | None = None,
) -> tuple[ComplexBogoliubov, IntegrationTrace, NDArray[np.complex128] | None]:
    """Run the DOP853 step loop over the window and match at its end.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.
        config (IntegrationConfig): Tolerance, window and step budget.
        sample_taus (NDArray[np.float64] | None): Increasing times inside the window at which to record chi from the dense output.

    Returns:
        tuple: The coefficients, the trace, and chi at ``sample_taus`` (None when no samples were asked for).

    Raises:
        StepLimitExceeded: If the step budget runs out or the step size collapses.
    """
    freqs = frequencies(params, mode)
    _check_regime(params, freqs.omega_out, config)

    k_sq = mode.k * mode.k
    mass_sq = params.mass * params.mass
    half_width = config.tau_span_factor / params.sigma
    tau0, tau1 = -half_width, half_width
    theta0 = freqs.omega_in * tau0

    def omega(tau: float) -> float:
        return math.sqrt(k_sq + mass_sq * scale_factor(params, tau))

    def rhs(tau: float, y: NDArray[np.complex128]) -> NDArray[np.complex128]:
        omega_sq = k_sq + mass_sq * scale_factor(params, tau)
        coupling = mass_sq * scale_factor_rate(params, tau) / (4.0 * omega_sq)
        rotation = cmath.exp(2j * (theta0 + y[2].real))
        return np.array(
            [coupling * rotation * y[1], coupling * rotation.conjugate() * y[0], math.sqrt(omega_sq)],
            dtype=complex,
        )

    # In-mode e^{-i omega_in tau} / sqrt(2 omega_in): a = 1, b = 0. The third slot holds theta - theta0.
    y0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    w0 = _wronskian(y0[0], y0[1])
    solver = DOP853(
        rhs,
        tau0,
        y0,
        t_bound=tau1,
        rtol=config.rel_tol,
        atol=_ATOL,
        first_step=min(_FIRST_STEP / freqs.omega_out, half_width),
    )

    samples = np.empty(0 if sample_taus is None else len(sample_taus), dtype=complex)
    next_sample = 0
    steps = 0
    drift = 0.0
    while solver.status == "running":
        if steps >= config.max_steps:
            msg = f"k={mode.k:g}: step budget of {config.max_steps} exhausted at tau={solver.t:.6g}"
            raise StepLimitExceeded(msg)

        message = solver.step()
        if solver.status == "failed":
            msg = f"k={mode.k:g}: integration failed at tau={solver.t:.6g}: {message}"
            raise StepLimitExceeded(msg)
        steps += 1

        drift = max(drift, abs(_wronskian(solver.y[0], solver.y[1]) - w0) / abs(w0))

        if sample_taus is not None and next_sample < len(sample_taus):
            interpolant = solver.dense_output()
            while next_sample < len(sample_taus) and sample_taus[next_sample] <= solver.t:
                tau = float(sample_taus[next_sample])
                a, b, phase = interpolant(tau)
                samples[next_sample] = _mode_from_amplitudes(a, b, theta0 + phase.real, omega(tau))[0]
                next_sample += 1

    trace = IntegrationTrace(steps_taken=steps, wronskian_drift=drift, final_tau=solver.t)
    logger.trace(f"k={mode.k:g}: {steps} steps, wronskian drift {drift:.3e}")

    a, b, phase = solver.y
    chi, chi_prime = _mode_from_amplitudes(a, b, theta0 + phase.real, omega(solver.t))
    coefficients = _match_out_region(chi, chi_prime, freqs.omega_out, solver.t)
    return coefficients, trace, samples if sample_taus is not None else None


def evolve_mode(
    params: CosmologyParams, mode: ModeSpec, config: IntegrationConfig | None = None
) -> tuple[ComplexBogoliubov, IntegrationTrace]:
    """Integrate the in-mode across the expansion and extract its Bogoliubov coefficients.

    The window is ``[-tau_span_factor / sigma, +tau_span_factor / sigma]``. The in-mode starts as ``e^{-i omega_in tau} / sqrt(2 omega_in)`` with unit Wronskian and is matched onto ``e^{-+i omega_out tau} / sqrt(2 omega_out)`` using chi and chi' at the end of the window.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.
        config (IntegrationConfig | None): Integration controls. Defaults to IntegrationConfig().

    Returns:
        tuple[ComplexBogoliubov, IntegrationTrace]: The complex coefficients and the integration diagnostics.
    """
    config = config or IntegrationConfig()
    coefficients, trace, _ = _integrate(params, mode, config)
    return coefficients, trace


def check_against_closed_form(
    params: CosmologyParams, mode: ModeSpec, config: IntegrationConfig | None = None
) -> OracleReport:
    """Compare the integrated gamma of a mode with the closed form.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.
        config (IntegrationConfig | None): Integration controls. Defaults to IntegrationConfig().

    Returns:
        OracleReport: ``rel_err = |gamma_oracle - gamma_closed| / max(gamma_closed, 1e-30)`` with the normalization defect and the trace.
    """
    coefficients, trace = evolve_mode(params, mode, config)
    gamma_oracle = coefficients.gamma
    gamma_closed = closed_gamma(params, mode)
    abs_err = abs(gamma_oracle - gamma_closed)

    report = OracleReport(
        k=mode.k,
        gamma_oracle=gamma_oracle,
        gamma_closed=gamma_closed,
        rel_err=abs_err / max(gamma_closed, GAMMA_REL_FLOOR),
        abs_err=abs_err,
        normalization_defect=coefficients.normalization_defect,
        trace=trace,
        coefficients=coefficients,
    )
    logger.debug(
        f"k={mode.k:g}: gamma oracle={gamma_oracle:.10e} closed={gamma_closed:.10e} "
        f"rel_err={report.rel_err:.3e}"
    )
    return report


def _degenerate_report(k: float) -> OracleReport:
    return OracleReport(
        k=k,
        gamma_oracle=math.nan,
        gamma_closed=math.nan,
        rel_err=math.nan,
        abs_err=math.nan,
        normalization_defect=math.nan,
        status=ModeStatus.DEGENERATE,
    )


def oracle_sweep(
    params: CosmologyParams,
    k_values: Iterable[float],
    config: IntegrationConfig | None = None,
    *,
    workers: int = 1,
) -> list[OracleReport]:
    """Cross-check every momentum against the closed form, in input order.

    A degenerate mode is flagged in its report. Regime and integration errors abort the sweep.

    Args:
        params (CosmologyParams): The cosmological parameters.
        k_values (Iterable[float]): The momenta to check.
        config (IntegrationConfig | None): Integration controls. Defaults to IntegrationConfig().
        workers (int): Threads to fan the modes out over. Defaults to 1.

    Returns:
        list[OracleReport]: One report per momentum.
    """
    config = config or IntegrationConfig()

    def check(k: float) -> OracleReport:
        try:
            return check_against_closed_form(params, ModeSpec(k=k), config)
        except DegenerateMode as e:
            logger.debug(f"k={k:g}: {e}")
            return _degenerate_report(k)

    momenta = [float(k) for k in k_values]
    if workers <= 1:
        return [check(k) for k in momenta]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(check, momenta))


def mode_profile(
    params: CosmologyParams,
    mode: ModeSpec,
    config: IntegrationConfig | None = None,
    samples: int = 201,
) -> ModeProfile:
    """Sample ``|chi|^2`` and ``C(tau)`` on an even grid across the integration window.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.
        config (IntegrationConfig | None): Integration controls. Defaults to IntegrationConfig().
        samples (int): Number of grid points, at least 2. Defaults to 201.

    Returns:
        ModeProfile: The sampled mode, including both window endpoints.

    Raises:
        ValueError: If fewer than two samples are requested.
    """
    if samples < 2:  # ruff:ignore[magic-value-comparison]
        msg = f"A mode profile needs at least 2 samples, got {samples}"
        raise ValueError(msg)

    config = config or IntegrationConfig()
    half_width = config.tau_span_factor / params.sigma
    tau = np.linspace(-half_width, half_width, samples)
    _, _, chi = _integrate(params, mode, config, sample_taus=tau)

    return ModeProfile(tau=tau, mode_sq=np.abs(chi) ** 2, scale=scale_factor(params, tau))
