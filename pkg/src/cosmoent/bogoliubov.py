"""Closed-form Bogoliubov spectrum of the tanh expansion.

The in-vacuum of the mode pair (k, -k) maps onto the out-region with

    gamma = |beta_k / alpha_k|^2 = sinh^2(pi omega_- / sigma) / sinh^2(pi omega_+ / sigma)

and the bosonic normalization ``|alpha|^2 - |beta|^2 = 1`` fixes both magnitudes. Phases are convention-dependent and are only available from the integration oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from loguru import logger

from cosmoent.config import ModeSpec
from cosmoent.constants import LOGSINH_THRESHOLD, SINH_TAYLOR_THRESHOLD
from cosmoent.model import frequencies, momentum_for_energy

if TYPE_CHECKING:
    from cosmoent.config import CosmologyParams


@dataclass(frozen=True, slots=True)
class BogoliubovCoefficients:
    """Magnitudes of the Bogoliubov coefficients of one mode pair.

    ``alpha_sq - beta_sq = 1`` and ``gamma = beta_sq / alpha_sq``.
    """

    alpha_sq: float
    beta_sq: float
    gamma: float


@dataclass(frozen=True, slots=True)
class GammaLogDerivatives:
    """Sensitivities of ln(gamma) to the log-parameters, the Jacobian the fit is built on."""

    d_log_epsilon: float
    d_log_sigma: float


def _sinh(x: float) -> float:
    """Evaluate sinh for a non-negative argument, via its Taylor series below 1e-4."""
    if x < SINH_TAYLOR_THRESHOLD:
        return x * (1.0 + x * x / 6.0)
    return math.sinh(x)


def log_sinh(x: float) -> float:
    """Evaluate ln(sinh(x)) for x > 0 without overflow or loss of small-argument precision.

    Args:
        x (float): A positive argument.

    Returns:
        float: ``x + ln(1 - e^{-2x}) - ln 2`` for large x, ``ln x + ln(1 + x^2/6)`` for tiny x, else ``ln(sinh x)``.
    """
    if x > LOGSINH_THRESHOLD:
        return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0)
    if x < SINH_TAYLOR_THRESHOLD:
        return math.log(x) + math.log1p(x * x / 6.0)
    return math.log(math.sinh(x))


def x_coth(x: float) -> float:
    """Evaluate ``x coth(x)`` for x >= 0, with the limit 1 at x = 0."""
    if x < SINH_TAYLOR_THRESHOLD:
        return 1.0 + x * x / 3.0
    if x > LOGSINH_THRESHOLD:
        return x
    return x / math.tanh(x)


def gamma(params: CosmologyParams, mode: ModeSpec) -> float:
    """Return the Bogoliubov ratio ``gamma = |beta_k / alpha_k|^2`` of a mode pair.

    Massless fields and a static spacetime give exactly 0. When ``pi omega_+ / sigma`` exceeds 20 the ratio is formed from log-sinh differences and exponentiated, so the adiabatic regime underflows gracefully instead of overflowing.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.

    Returns:
        float: gamma in [0, 1).
    """
    freqs = frequencies(params, mode)
    if freqs.omega_minus == 0:
        return 0.0

    scale = math.pi / params.sigma
    x_minus = scale * freqs.omega_minus
    x_plus = scale * freqs.omega_plus

    if x_plus > LOGSINH_THRESHOLD:
        return math.exp(2.0 * (log_sinh(x_minus) - log_sinh(x_plus)))

    return (_sinh(x_minus) / _sinh(x_plus)) ** 2


def gamma_sudden_limit(params: CosmologyParams, mode: ModeSpec) -> float:
    """Return ``(omega_- / omega_+)^2``, the sigma -> infinity limit and upper bound of gamma.

    Args:
        params (CosmologyParams): The cosmological parameters; sigma is ignored.
        mode (ModeSpec): The mode momentum.

    Returns:
        float: The sudden-expansion ratio.
    """
    freqs = frequencies(params, mode)
    return (freqs.omega_minus / freqs.omega_plus) ** 2


def alpha_beta_sq(params: CosmologyParams, mode: ModeSpec) -> BogoliubovCoefficients:
    """Reconstruct ``|alpha|^2`` and ``|beta|^2`` from gamma and the bosonic normalization.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.

    Returns:
        BogoliubovCoefficients: ``alpha_sq = 1/(1 - gamma)``, ``beta_sq = gamma/(1 - gamma)``.
    """
    ratio = gamma(params, mode)
    return coefficients_from_gamma(ratio)


def coefficients_from_gamma(ratio: float) -> BogoliubovCoefficients:
    """Build the coefficient magnitudes for a given gamma in [0, 1).

    Returns:
        BogoliubovCoefficients: The normalized magnitudes.
    """
    alpha_sq = 1.0 / (1.0 - ratio)
    return BogoliubovCoefficients(alpha_sq=alpha_sq, beta_sq=ratio * alpha_sq, gamma=ratio)


def mean_particle_number(params: CosmologyParams, mode: ModeSpec) -> float:
    """Return the mean out-region occupation ``n = |beta_k|^2 = gamma / (1 - gamma)`` of a mode.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.

    Returns:
        float: The expected number of particles created in the mode.
    """
    return alpha_beta_sq(params, mode).beta_sq


def lngamma_derivatives(params: CosmologyParams, mode: ModeSpec) -> GammaLogDerivatives:
    """Differentiate ln(gamma) analytically with respect to ln(epsilon) and ln(sigma).

    With ``x_pm = pi omega_pm / sigma``::

        d ln gamma / d ln sigma   = 2 [x_+ coth x_+ - x_- coth x_-]
        d ln gamma / d ln epsilon = (omega_out + omega_in)/omega_out * x_- coth x_-
                                    - epsilon m^2 / (omega_out omega_+) * x_+ coth x_+

    Both stay finite as epsilon -> 0, where gamma ~ epsilon^2.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum.

    Returns:
        GammaLogDerivatives: The two log-derivatives.
    """
    freqs = frequencies(params, mode)
    scale = math.pi / params.sigma
    xc_minus = x_coth(scale * freqs.omega_minus)
    xc_plus = x_coth(scale * freqs.omega_plus)
    mass_term = params.epsilon * params.mass**2

    return GammaLogDerivatives(
        d_log_epsilon=(freqs.omega_out + freqs.omega_in) / freqs.omega_out * xc_minus
        - mass_term / (freqs.omega_out * freqs.omega_plus) * xc_plus,
        d_log_sigma=2.0 * (xc_plus - xc_minus),
    )


def dlngamma_denergy(params: CosmologyParams, energy: float) -> float:
    """Differentiate ln(gamma) analytically with respect to the particle energy.

    With ``E = omega_in`` and ``omega_out = sqrt(E^2 + 2 epsilon m^2)`` the derivative reduces to ``-(2 / omega_out) [x_- coth x_- + x_+ coth x_+]``. This is the reference the rapidity estimator's finite difference is checked against.

    Args:
        params (CosmologyParams): The cosmological parameters.
        energy (float): The particle energy, at least the mass.

    Returns:
        float: d ln(gamma) / dE.
    """
    mode = ModeSpec(k=momentum_for_energy(params.mass, energy))
    freqs = frequencies(params, mode)
    scale = math.pi / params.sigma
    derivative = (
        -2.0
        / freqs.omega_out
        * (x_coth(scale * freqs.omega_minus) + x_coth(scale * freqs.omega_plus))
    )
    logger.trace(f"d ln(gamma)/dE at E={energy:g}: {derivative:.6e}")
    return derivative
