"""Test the scale factor and mode frequencies."""

import math

import numpy as np
import pytest

from cosmoent.config import CosmologyParams, ModeSpec
from cosmoent.exceptions import DegenerateMode
from cosmoent.model import (
    frequencies,
    light_mass_frequencies,
    momentum_for_energy,
    scale_factor,
    validity_window,
)


def test_scale_factor_limits(unit_params: CosmologyParams) -> None:
    """Verify the scale factor runs from 1 in the far past to 1 + 2 epsilon in the far future."""
    # Given: An expansion with epsilon = 1

    # When: Evaluating the scale factor at the ends and the middle of the epoch
    past = scale_factor(unit_params, -50.0)
    middle = scale_factor(unit_params, 0.0)
    future = scale_factor(unit_params, 50.0)

    # Then: The values are 1, 1 + epsilon and 1 + 2 epsilon
    assert past == pytest.approx(1.0, abs=1e-15)
    assert middle == pytest.approx(2.0)
    assert future == pytest.approx(3.0)
    assert isinstance(middle, float)


def test_scale_factor_array_matches_tanh() -> None:
    """Verify the array form agrees with 1 + epsilon (1 + tanh(sigma tau))."""
    # Given: A set of conformal times
    params = CosmologyParams(epsilon=0.7, sigma=2.5, mass=1.0)
    tau = np.linspace(-3.0, 3.0, 25)

    # When: Evaluating the scale factor on the array
    values = scale_factor(params, tau)

    # Then: It matches the tanh expression element-wise
    assert values.shape == tau.shape
    np.testing.assert_allclose(values, 1.0 + 0.7 * (1.0 + np.tanh(2.5 * tau)), rtol=1e-14)


def test_frequencies_unit_params(unit_params: CosmologyParams) -> None:
    """Verify the in/out frequencies and their half-sum and half-difference."""
    # Given: epsilon = sigma = m = 1 and k = 1

    # When: Computing the frequencies
    freqs = frequencies(unit_params, ModeSpec(k=1.0))

    # Then: omega_in = sqrt(2), omega_out = 2, and the pair sums back to them
    assert freqs.omega_in == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert freqs.omega_out == pytest.approx(2.0, rel=1e-15)
    assert freqs.omega_plus + freqs.omega_minus == pytest.approx(freqs.omega_out, rel=1e-15)
    assert freqs.omega_plus - freqs.omega_minus == pytest.approx(freqs.omega_in, rel=1e-15)


def test_frequencies_depend_on_k_squared(unit_params: CosmologyParams) -> None:
    """Verify a mode and its mirror image share their frequencies."""
    # Given: Opposite momenta

    # When: Computing both frequency sets
    forward = frequencies(unit_params, ModeSpec(k=1.3))
    backward = frequencies(unit_params, ModeSpec(k=-1.3))

    # Then: They are identical
    assert forward == backward


def test_omega_minus_keeps_precision_for_high_momenta() -> None:
    """Verify omega_minus stays accurate where the plain difference would cancel."""
    # Given: A very energetic light particle
    params = CosmologyParams(epsilon=1.0, sigma=1.0, mass=1e-3)

    # When: Computing the frequencies at k = 1e4
    freqs = frequencies(params, ModeSpec(k=1e4))

    # Then: omega_minus is close to epsilon m^2 / (2 k)
    assert freqs.omega_minus == pytest.approx(1e-6 / 2e4, rel=1e-9)


@pytest.mark.parametrize(("epsilon", "mass", "k"), [(0.0, 1.0, 1.0), (1.0, 0.0, 2.0)])
def test_omega_minus_vanishes_without_coupling(epsilon: float, mass: float, k: float) -> None:
    """Verify a static spacetime or a massless field leaves the frequency unchanged."""
    # Given: No expansion, or no mass
    params = CosmologyParams(epsilon=epsilon, sigma=1.0, mass=mass)

    # When: Computing the frequencies
    freqs = frequencies(params, ModeSpec(k=k))

    # Then: omega_minus is exactly zero
    assert freqs.omega_minus == 0.0
    assert freqs.omega_in == freqs.omega_out


def test_massless_zero_mode_is_degenerate() -> None:
    """Verify the k = 0 mode of a massless field is rejected."""
    # Given: A massless field
    params = CosmologyParams(epsilon=1.0, sigma=1.0, mass=0.0)

    # When/Then: Computing the zero mode's frequencies raises
    with pytest.raises(DegenerateMode, match="no frequency scale"):
        frequencies(params, ModeSpec(k=0.0))


def test_light_mass_frequencies_approximate_exact() -> None:
    """Verify the light-particle frequencies approach the exact ones deep in the window."""
    # Given: A light particle of energy 0.05
    params = CosmologyParams(epsilon=1.0, sigma=1.0, mass=1e-3)
    energy = 0.05

    # When: Comparing the approximation with the exact frequencies
    approx = light_mass_frequencies(params, energy)
    exact = frequencies(params, ModeSpec(k=momentum_for_energy(params.mass, energy)))

    # Then: They agree to the order of (m sqrt(epsilon) / E)^2
    assert approx.omega_plus == pytest.approx(exact.omega_plus, rel=1e-3)
    assert approx.omega_minus == pytest.approx(exact.omega_minus, rel=1e-3)


def test_validity_window_ratios() -> None:
    """Verify the three window ratios and the limit check."""
    # Given: A light particle well inside the window
    params = CosmologyParams(epsilon=1.0, sigma=1.0, mass=1e-3)

    # When: Measuring the window at E = 0.05
    window = validity_window(params, 0.05)

    # Then: Each ratio has its defining value
    assert window.mass_ratio == pytest.approx(0.02)
    assert window.energy_ratio == pytest.approx(0.025)
    assert window.species_ratio == pytest.approx(5e-4)
    assert window.satisfied(0.1)
    assert not window.satisfied(0.01)


def test_momentum_for_energy() -> None:
    """Verify the momentum of a particle of given energy, and the below-mass rejection."""
    # Given/When/Then: E = 5 and m = 3 give k = 4
    assert momentum_for_energy(3.0, 5.0) == pytest.approx(4.0, rel=1e-15)
    assert momentum_for_energy(1.0, 1.0) == 0.0

    # When/Then: An energy below the mass raises
    with pytest.raises(ValueError, match="below the particle mass"):
        momentum_for_energy(2.0, 1.0)
