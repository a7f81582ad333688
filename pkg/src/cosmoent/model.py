"""The expanding toy universe: its conformal scale factor and the asymptotic mode frequencies.

The line element is ``ds^2 = C(tau) (dtau^2 - dx^2)`` with ``C(tau) = 1 + epsilon (1 + tanh(sigma tau))``, flat in the far past (``C -> 1``) and the far future (``C -> 1 + 2 epsilon``). Natural units throughout; ``tau`` is conformal time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, overload

import numpy as np
from scipy.special import expit

from cosmoent.exceptions import DegenerateMode

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from cosmoent.config import CosmologyParams, ModeSpec


@dataclass(frozen=True, slots=True)
class FrequencySet:
    """Angular frequencies of a mode in the in-region and the out-region.

    ``omega_plus`` and ``omega_minus`` are the half-sum and half-difference of the out and in frequencies.
    """

    omega_in: float
    omega_out: float
    omega_plus: float
    omega_minus: float


@dataclass(frozen=True, slots=True)
class LightMassFrequencies:
    """Leading-order frequencies of a light particle of energy E: ``omega_plus ~ E``, ``omega_minus ~ m^2 epsilon / (2E)``."""

    omega_plus: float
    omega_minus: float


@dataclass(frozen=True, slots=True)
class ValidityWindow:
    """Ratios that must all be small for the light-particle estimators to apply.

    Attributes:
        mass_ratio: m sqrt(epsilon) / E, the lower edge of the window.
        energy_ratio: E / (2 sigma), the upper edge of the window.
        species_ratio: m sqrt(epsilon) / (2 sigma), whether any window exists for this species.
    """

    mass_ratio: float
    energy_ratio: float
    species_ratio: float

    def satisfied(self, limit: float) -> bool:
        """Report whether every ratio is at most ``limit``."""
        return max(self.mass_ratio, self.energy_ratio, self.species_ratio) <= limit


@overload
def scale_factor(params: CosmologyParams, tau: float) -> float: ...


@overload
def scale_factor(params: CosmologyParams, tau: NDArray[np.float64]) -> NDArray[np.float64]: ...


def scale_factor(
    params: CosmologyParams, tau: float | NDArray[np.float64]
) -> float | NDArray[np.float64]:
    """Evaluate the conformal scale factor ``C(tau) = 1 + epsilon (1 + tanh(sigma tau))``.

    ``1 + tanh(x)`` is evaluated as ``2 expit(2x)`` so the far-past limit approaches 1 without cancellation.

    Args:
        params (CosmologyParams): The cosmological parameters.
        tau (float | NDArray[np.float64]): Conformal time, scalar or array.

    Returns:
        float | NDArray[np.float64]: C(tau), with the shape of ``tau``.
    """
    value = 1.0 + 2.0 * params.epsilon * expit(2.0 * params.sigma * np.asarray(tau, dtype=float))
    if np.ndim(value) == 0:
        return float(value)
    return value


def scale_factor_rate(params: CosmologyParams, tau: float) -> float:
    """Evaluate ``dC/dtau = epsilon sigma sech^2(sigma tau)``, written as ``4 epsilon sigma s (1 - s)`` with ``s = expit(2 sigma tau)``."""
    s = float(expit(2.0 * params.sigma * tau))
    return 4.0 * params.epsilon * params.sigma * s * (1.0 - s)


def frequencies(params: CosmologyParams, mode: ModeSpec) -> FrequencySet:
    """Return the in/out angular frequencies of a mode and their half-sum and half-difference.

    ``omega_minus`` is computed as ``epsilon m^2 / (omega_out + omega_in)``, algebraically equal to the half-difference but free of cancellation, so tiny values keep full relative precision.

    Args:
        params (CosmologyParams): The cosmological parameters.
        mode (ModeSpec): The mode momentum. Only k^2 enters.

    Returns:
        FrequencySet: The four frequencies.

    Raises:
        DegenerateMode: For the zero mode of a massless field.
    """
    k = abs(mode.k)
    mass = params.mass
    if mass == 0 and k == 0:
        msg = "The k = 0 mode of a massless field has no frequency scale"
        raise DegenerateMode(msg)

    omega_in = math.hypot(k, mass)
    omega_out = math.hypot(k, mass * math.sqrt(1.0 + 2.0 * params.epsilon))
    total = omega_out + omega_in

    return FrequencySet(
        omega_in=omega_in,
        omega_out=omega_out,
        omega_plus=0.5 * total,
        omega_minus=params.epsilon * mass * mass / total,
    )


def light_mass_frequencies(params: CosmologyParams, energy: float) -> LightMassFrequencies:
    """Approximate the frequencies of a light particle of energy ``E = sqrt(k^2 + m^2)``.

    Valid when ``m sqrt(epsilon) << E``; these are the approximations the epsilon and sigma estimators are derived from.

    Args:
        params (CosmologyParams): The cosmological parameters.
        energy (float): The particle energy, positive.

    Returns:
        LightMassFrequencies: ``omega_plus ~ E`` and ``omega_minus ~ omega_plus m^2 epsilon / (2 E^2)``.
    """
    return LightMassFrequencies(
        omega_plus=energy,
        omega_minus=energy * params.mass**2 * params.epsilon / (2.0 * energy**2),
    )


def validity_window(params: CosmologyParams, energy: float) -> ValidityWindow:
    """Measure how deep a particle of energy E sits inside the window ``m sqrt(epsilon) << E << 2 sigma``.

    Args:
        params (CosmologyParams): The cosmological parameters.
        energy (float): The particle energy, positive.

    Returns:
        ValidityWindow: The three ratios that must be small.
    """
    mass_scale = params.mass * math.sqrt(params.epsilon)
    return ValidityWindow(
        mass_ratio=mass_scale / energy,
        energy_ratio=energy / (2.0 * params.sigma),
        species_ratio=mass_scale / (2.0 * params.sigma),
    )


def momentum_for_energy(mass: float, energy: float) -> float:
    """Return the momentum |k| of a particle with the given in-region energy.

    Args:
        mass (float): The field mass.
        energy (float): The energy ``sqrt(k^2 + m^2)``; must be at least ``mass``.

    Returns:
        float: ``sqrt(E^2 - m^2)``, evaluated as ``sqrt((E - m)(E + m))``.

    Raises:
        ValueError: If the energy is below the mass.
    """
    if energy < mass:
        msg = f"Energy {energy} is below the particle mass {mass}"
        raise ValueError(msg)
    return math.sqrt((energy - mass) * (energy + mass))
