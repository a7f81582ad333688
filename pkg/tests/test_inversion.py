"""Test recovering the expansion from entanglement."""

import math

import numpy as np
import pytest
from pytest_mock import MockerFixture

from cosmoent import inversion
from cosmoent.bogoliubov import dlngamma_denergy
from cosmoent.config import CosmologyParams
from cosmoent.constants import FIT_GRADIENT_TOL, LogLevel
from cosmoent.entanglement import entanglement_spectrum, entropy_closed
from cosmoent.exceptions import (
    DenominatorNonpositive,
    EntropyOutOfRange,
    InsufficientData,
    MasslessUnidentifiable,
    RegimeViolation,
    StepOutOfRange,
    Unidentifiable,
)
from cosmoent.inversion import (
    EntanglementSample,
    estimate_epsilon,
    estimate_sigma,
    finite_difference_dlngamma,
    fit_parameters,
    forward_pair,
    forward_sample,
    gamma_from_entropy,
)
from cosmoent.logging import instantiate_logger

LIGHT = CosmologyParams(epsilon=1.0, sigma=1.0, mass=1e-3)


def _spectrum(params: CosmologyParams, count: int) -> list[tuple[float, float]]:
    momenta = np.linspace(0.1, 5.0, count)
    return [(r.k, r.entropy_bits) for r in entanglement_spectrum(params, momenta)]


def test_gamma_from_entropy_reference_points() -> None:
    """Verify the inverse entropy at known points."""
    assert gamma_from_entropy(0.0) == 0.0
    assert gamma_from_entropy(2.0) == pytest.approx(0.5, abs=1e-12)
    assert gamma_from_entropy(0.383874) == pytest.approx(0.067845, rel=1e-4)


def test_gamma_from_entropy_round_trip() -> None:
    """Verify entropy followed by its inverse returns gamma across [0, 0.99]."""
    # Given: 1,000 gammas
    ratios = np.linspace(0.0, 0.99, 1000)

    # When: Round-tripping each through the entropy
    recovered = np.array([gamma_from_entropy(entropy_closed(float(r))) for r in ratios])

    # Then: Every gamma comes back within 1e-11
    assert np.max(np.abs(recovered - ratios)) < 1e-11


def test_gamma_from_entropy_keeps_relative_precision_for_tiny_gamma() -> None:
    """Verify light-particle gammas come back with relative, not only absolute, precision."""
    assert gamma_from_entropy(entropy_closed(4e-8)) == pytest.approx(4e-8, rel=1e-12)


@pytest.mark.parametrize("entropy", [-1.0, 41.5, math.nan, math.inf])
def test_gamma_from_entropy_rejects_bad_entropy(entropy: float) -> None:
    """Verify entropies outside [0, 41] bits are rejected."""
    with pytest.raises(EntropyOutOfRange, match="outside"):
        gamma_from_entropy(entropy)


def test_estimate_epsilon_light_particle() -> None:
    """Verify the volume estimate deep inside the light-particle window."""
    # Given: A synthetic entropy from epsilon = sigma = 1, m = 1e-3 at E = 0.05
    sample = forward_sample(LIGHT, 0.05)

    # When: Estimating epsilon
    estimate = estimate_epsilon(sample, LIGHT.mass)

    # Then: The estimate is within 2% and the regime ratio is small
    assert estimate.gamma == pytest.approx(4.0e-8, rel=2e-2)
    assert estimate.epsilon_hat == pytest.approx(1.0, rel=2e-2)
    assert estimate.regime_ratio == pytest.approx(0.02, rel=2e-2)


def test_estimate_epsilon_improves_at_lower_energy() -> None:
    """Verify the estimate is more accurate further inside the window."""
    # Given/When: Estimates at E = 0.05 and E = 0.1
    near = estimate_epsilon(forward_sample(LIGHT, 0.05), LIGHT.mass)
    far = estimate_epsilon(forward_sample(LIGHT, 0.1), LIGHT.mass)

    # Then: The lower energy is closer to the truth
    assert abs(near.epsilon_hat - 1.0) < abs(far.epsilon_hat - 1.0)
    assert far.epsilon_hat == pytest.approx(0.98, abs=0.01)


def test_estimate_epsilon_zero_entropy() -> None:
    """Verify no entanglement means no detected expansion."""
    estimate = estimate_epsilon(EntanglementSample(energy=0.05, entropy_bits=0.0), 1e-3)
    assert estimate.epsilon_hat == 0.0
    assert estimate.regime_ratio == 0.0


def test_estimate_epsilon_regime_violation() -> None:
    """Verify a heavy particle is refused."""
    # Given: gamma = 1/2 at E = m = 1, far outside the window
    sample = EntanglementSample(energy=1.0, entropy_bits=2.0)

    # When/Then: Estimating epsilon raises
    with pytest.raises(RegimeViolation, match="exceeds 0.5"):
        estimate_epsilon(sample, 1.0)


def test_estimate_epsilon_warns_near_window_edge(capsys: pytest.CaptureFixture[str]) -> None:
    """Verify a regime ratio between 0.1 and 0.5 logs a warning."""
    # Given: A sample whose estimate gives m sqrt(epsilon_hat) / E = 0.2
    instantiate_logger(LogLevel.INFO)
    sample = EntanglementSample(energy=1.0, entropy_bits=entropy_closed(4e-4))

    # When: Estimating epsilon
    estimate = estimate_epsilon(sample, 1.0)

    # Then: The estimate is returned and a warning is logged
    output = capsys.readouterr().err
    assert estimate.regime_ratio == pytest.approx(0.2, rel=1e-6)
    assert "large corrections" in output


def test_estimate_epsilon_massless() -> None:
    """Verify massless data cannot identify the expansion."""
    with pytest.raises(MasslessUnidentifiable):
        estimate_epsilon(EntanglementSample(energy=1.0, entropy_bits=0.1), 0.0)


def test_finite_difference_matches_analytic_derivative() -> None:
    """Verify the central difference of ln(gamma) against the analytic derivative at h = 1e-4."""
    # Given: Two light-particle samples a relative step of 1e-4 apart around E = 0.05
    samples = forward_pair(LIGHT, 0.05, step=1e-4)

    # When: Taking the finite difference
    energy, _, derivative = finite_difference_dlngamma(samples)

    # Then: It matches d ln(gamma)/dE to 1e-5 relative
    assert energy == pytest.approx(0.05, rel=1e-15)
    assert derivative == pytest.approx(dlngamma_denergy(LIGHT, energy), rel=1e-5)


def test_finite_difference_converges_at_second_order() -> None:
    """Verify the finite-difference error falls about a hundredfold when the step shrinks tenfold."""
    # Given: The analytic derivative at E = 0.05
    exact = dlngamma_denergy(LIGHT, 0.05)

    # When: Differencing with steps 1e-2 and 1e-3
    coarse = finite_difference_dlngamma(forward_pair(LIGHT, 0.05, step=1e-2))[2]
    fine = finite_difference_dlngamma(forward_pair(LIGHT, 0.05, step=1e-3))[2]

    # Then: The error ratio reflects a second-order scheme
    assert abs(fine - exact) < abs(coarse - exact) / 50


def test_finite_difference_accepts_either_order() -> None:
    """Verify the two samples may be given high-energy first."""
    low, high = forward_pair(LIGHT, 0.05)
    assert finite_difference_dlngamma((high, low)) == finite_difference_dlngamma((low, high))


@pytest.mark.parametrize("energies", [(0.05, 0.05), (0.05, 0.050001), (0.05, 0.051)])
def test_finite_difference_rejects_step(energies: tuple[float, float]) -> None:
    """Verify relative steps outside [1e-4, 1e-2] are rejected."""
    # Given: Samples with a zero, a too-small and a too-large step
    samples = (
        EntanglementSample(energy=energies[0], entropy_bits=1e-6),
        EntanglementSample(energy=energies[1], entropy_bits=1e-6),
    )

    # When/Then: Differencing raises
    with pytest.raises(StepOutOfRange, match="outside"):
        finite_difference_dlngamma(samples)


def test_finite_difference_needs_positive_entropies() -> None:
    """Verify a zero entropy cannot enter the log-derivative."""
    samples = (
        EntanglementSample(energy=0.05, entropy_bits=0.0),
        EntanglementSample(energy=0.05005, entropy_bits=1e-6),
    )
    with pytest.raises(EntropyOutOfRange, match="positive"):
        finite_difference_dlngamma(samples)


def test_estimate_sigma_light_particle() -> None:
    """Verify the rapidity estimate is within a factor 1.5 of the truth."""
    # Given: Synthetic samples from epsilon = sigma = 1, m = 1e-3 around E = 0.05 with h = 1e-3
    samples = forward_pair(LIGHT, 0.05)

    # When: Estimating sigma
    estimate = estimate_sigma(samples, LIGHT.mass)

    # Then: The estimate sits within a factor 1.5, biased high
    assert 1.0 < estimate.sigma_hat < 1.5
    assert estimate.step == pytest.approx(1e-3, rel=1e-9)
    assert estimate.energy == pytest.approx(0.05)


def test_estimate_sigma_nonpositive_denominator() -> None:
    """Verify an entropy rising with energy is outside the estimator's reach."""
    # Given: Entanglement that grows with energy
    samples = (
        EntanglementSample(energy=1.0, entropy_bits=0.1),
        EntanglementSample(energy=1.001, entropy_bits=0.2),
    )

    # When/Then: Estimating sigma raises
    with pytest.raises(DenominatorNonpositive, match="does not apply"):
        estimate_sigma(samples, 1.0)


def test_estimate_sigma_massless() -> None:
    """Verify massless data cannot identify the rapidity."""
    with pytest.raises(MasslessUnidentifiable):
        estimate_sigma(forward_pair(LIGHT, 0.05), 0.0)


@pytest.mark.parametrize(
    ("params", "count"),
    [
        (CosmologyParams(epsilon=1.0, sigma=1.0, mass=1.0), 50),
        (CosmologyParams(epsilon=0.3, sigma=2.0, mass=0.5), 30),
    ],
)
def test_fit_recovers_parameters(params: CosmologyParams, count: int) -> None:
    """Verify the least-squares fit recovers both parameters from a noiseless spectrum."""
    # Given: A noiseless spectrum over k in [0.1, 5]
    samples = _spectrum(params, count)

    # When: Fitting from the default starting point
    result = fit_parameters(samples, params.mass)

    # Then: Both parameters come back to 1e-6 relative at a stationary point
    assert result.converged
    assert result.gradient_norm < FIT_GRADIENT_TOL
    assert result.epsilon_hat == pytest.approx(params.epsilon, rel=1e-6)
    assert result.sigma_hat == pytest.approx(params.sigma, rel=1e-6)
    assert result.residual_norm < 1e-9
    assert 0 <= result.iterations <= 200


def test_fit_accepts_initial_guess(unit_params: CosmologyParams) -> None:
    """Verify an explicit starting point is accepted and the fit still finds the global minimum."""
    result = fit_parameters(_spectrum(unit_params, 20), 1.0, init=(0.5, 2.0))
    assert result.converged
    assert result.gradient_norm < FIT_GRADIENT_TOL
    assert result.epsilon_hat == pytest.approx(1.0, rel=1e-6)
    assert result.sigma_hat == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("init", [(0.3, 0.5), (0.077, 0.3), (1e-3, 50.0)])
def test_fit_from_poor_starts_reaches_the_global_minimum(
    unit_params: CosmologyParams, init: tuple[float, float]
) -> None:
    """Verify a start in another basin does not decide the result."""
    # Given: A 50-point noiseless spectrum and a start far from the truth
    samples = _spectrum(unit_params, 50)

    # When: Fitting
    result = fit_parameters(samples, 1.0, init=init)

    # Then: The lowest-cost converged run is the truth
    assert result.converged
    assert result.gradient_norm < FIT_GRADIENT_TOL
    assert result.epsilon_hat == pytest.approx(1.0, rel=1e-6)
    assert result.sigma_hat == pytest.approx(1.0, rel=1e-6)


def test_fit_reports_non_convergence(unit_params: CosmologyParams, mocker: MockerFixture) -> None:
    """Verify hitting the iteration cap returns the best iterate flagged as not converged."""
    # Given: An iteration cap of one and a single distant start
    mocker.patch("cosmoent.inversion.FIT_MAX_ITER", 1)
    mocker.patch("cosmoent.inversion._lattice_starts", return_value=[])

    # When: Fitting
    result = fit_parameters(_spectrum(unit_params, 20), 1.0, init=(0.05, 20.0))

    # Then: The fit stops after one iteration without claiming convergence
    assert not result.converged
    assert result.gradient_norm >= FIT_GRADIENT_TOL
    assert result.iterations == 1
    assert result.epsilon_hat > 0
    assert result.sigma_hat > 0


def test_fit_damping_exhaustion_is_not_convergence(unit_params: CosmologyParams, mocker: MockerFixture) -> None:
    """Verify a fit that cannot lower the cost stops without claiming convergence."""
    # Given: A model whose cost rises everywhere except at the single start
    start = np.array([math.log(0.5), math.log(2.0)])
    exact = inversion._residuals_and_jacobian

    def worse_away_from_start(log_params, modes, entropies, mass):
        residuals, jacobian = exact(log_params, modes, entropies, mass)
        if np.array_equal(log_params, start):
            return residuals, jacobian
        return residuals + 1.0, jacobian

    mocker.patch("cosmoent.inversion._residuals_and_jacobian", side_effect=worse_away_from_start)
    mocker.patch("cosmoent.inversion._lattice_starts", return_value=[])

    # When: Fitting from that start
    result = fit_parameters(_spectrum(unit_params, 20), 1.0, init=(0.5, 2.0))

    # Then: The start is returned, flagged as not converged
    assert not result.converged
    assert result.gradient_norm >= FIT_GRADIENT_TOL
    assert result.iterations == 1
    assert result.epsilon_hat == pytest.approx(0.5)
    assert result.sigma_hat == pytest.approx(2.0)


def test_fit_skips_non_positive_start(unit_params: CosmologyParams) -> None:
    """Verify an unusable explicit start falls back to the lattice starts."""
    result = fit_parameters(_spectrum(unit_params, 20), 1.0, init=(0.0, 1.0))
    assert result.converged
    assert result.epsilon_hat == pytest.approx(1.0, rel=1e-6)


def test_fit_logs_each_start(unit_params: CosmologyParams, capsys: pytest.CaptureFixture[str]) -> None:
    """Verify debug logs carry the index of the start they belong to."""
    # Given: Debug logging
    instantiate_logger(LogLevel.DEBUG)

    # When: Fitting
    fit_parameters(_spectrum(unit_params, 20), 1.0)

    # Then: Each start's summary is tagged with its index
    output = capsys.readouterr().err
    assert "'start': 0" in output
    assert "'start': 1" in output


def test_fit_all_zero_entropies_is_unidentifiable() -> None:
    """Verify data without entanglement identifies nothing."""
    with pytest.raises(Unidentifiable, match="zero entropy"):
        fit_parameters([(0.5, 0.0), (1.0, 0.0), (2.0, 0.0)], 1.0)


@pytest.mark.parametrize(
    "samples",
    [
        [(0.5, 0.01), (1.0, 0.001)],
        [(0.5, 0.01), (1.0, 0.01), (2.0, 0.0)],
    ],
)
def test_fit_insufficient_data(samples: list[tuple[float, float]]) -> None:
    """Verify fewer than 3 samples or 2 distinct nonzero entropies are rejected."""
    with pytest.raises(InsufficientData):
        fit_parameters(samples, 1.0)


def test_fit_massless() -> None:
    """Verify a massless fit is refused."""
    with pytest.raises(MasslessUnidentifiable):
        fit_parameters([(0.5, 0.01), (1.0, 0.001), (2.0, 1e-5)], 0.0)


def test_fit_rejects_bad_entropy() -> None:
    """Verify a negative entropy in the data is rejected."""
    with pytest.raises(EntropyOutOfRange):
        fit_parameters([(0.5, 0.01), (1.0, -0.001), (2.0, 1e-5)], 1.0)
