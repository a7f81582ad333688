"""Recover the expansion from entanglement.

``gamma_from_entropy`` undoes the entropy formula. ``estimate_epsilon`` and ``estimate_sigma`` are the light-particle estimators, valid in the window ``m sqrt(epsilon) << E << 2 sigma``. ``fit_parameters`` recovers (epsilon, sigma) from a whole spectrum by damped Gauss-Newton on the exact forward model, run from several starts.
"""

from __future__ import annotations

import contextlib
import math
import statistics
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger
from scipy.optimize import bisect
from scipy.special import xlogy

from cosmoent.bogoliubov import gamma as closed_gamma
from cosmoent.bogoliubov import lngamma_derivatives
from cosmoent.config import CosmologyParams, ModeSpec
from cosmoent.constants import (
    BISECT_MAX_ITER,
    BISECT_XTOL,
    DEFAULT_SIGMA_STEP,
    ENTROPY_MAX_BITS,
    FIT_GRADIENT_TOL,
    FIT_INITIAL_DAMPING,
    FIT_LATTICE_EPSILON_DECADES,
    FIT_LATTICE_PER_DECADE,
    FIT_LATTICE_SIGMA_DECADES,
    FIT_LATTICE_STARTS,
    FIT_MAX_ABS_LOG,
    FIT_MAX_DAMPING,
    FIT_MAX_ITER,
    FIT_MAX_LOG_STEP,
    FIT_MIN_SAMPLES,
    FIT_STEP_TOL,
    GAMMA_MAX,
    REGIME_RATIO_MAX,
    REGIME_RATIO_WARN,
    SIGMA_STEP_MAX,
    SIGMA_STEP_MIN,
)
from cosmoent.entanglement import entropy_closed
from cosmoent.exceptions import (
    DenominatorNonpositive,
    EntropyOutOfRange,
    GammaOutOfRange,
    InsufficientData,
    MasslessUnidentifiable,
    RegimeViolation,
    StepOutOfRange,
    Unidentifiable,
)
from cosmoent.model import momentum_for_energy

if TYPE_CHECKING:
    from collections.abc import Sequence

    from loguru import Logger
    from numpy.typing import NDArray

_LN2 = math.log(2.0)
# Energies placed exactly at a step bound round slightly to either side of it.
_STEP_SLACK = 1e-9


@dataclass(frozen=True, slots=True)
class EntanglementSample:
    """A measured entanglement entropy of the pair (k, -k) of a particle with energy ``E = sqrt(k^2 + m^2)``."""

    energy: float
    entropy_bits: float


@dataclass(frozen=True, slots=True)
class EpsilonEstimate:
    """An expansion-volume estimate and how deep it sits inside the light-particle window.

    ``regime_ratio = m sqrt(epsilon_hat) / E`` must be small for the estimate to mean anything.
    """

    epsilon_hat: float
    gamma: float
    regime_ratio: float


@dataclass(frozen=True, slots=True)
class SigmaEstimate:
    """A rapidity estimate from two nearby energies.

    Attributes:
        sigma_hat: The estimated rapidity.
        energy: The midpoint energy the derivative is taken at.
        gamma: The geometric-mean gamma at the midpoint.
        dlngamma_denergy: The central finite difference of ln(gamma).
        step: The relative energy step ``(E2 - E1) / E``.
    """

    sigma_hat: float
    energy: float
    gamma: float
    dlngamma_denergy: float
    step: float


@dataclass(frozen=True, slots=True)
class FitResult:
    """Outcome of a least-squares fit of (epsilon, sigma).

    When ``converged`` is False the fields hold the best iterate found.
    """

    epsilon_hat: float
    sigma_hat: float
    residual_norm: float
    iterations: int
    converged: bool
    gradient_norm: float


def _check_entropy(entropy_bits: float) -> None:
    if not math.isfinite(entropy_bits) or entropy_bits < 0 or entropy_bits > ENTROPY_MAX_BITS:
        msg = f"Entropy {entropy_bits!r} bits is outside [0, {ENTROPY_MAX_BITS:g}]"
        raise EntropyOutOfRange(msg)


def _check_mass(mass: float) -> None:
    if mass == 0:
        msg = "Massless modes carry no entanglement; the expansion cannot be recovered from them"
        raise MasslessUnidentifiable(msg)


def gamma_from_entropy(entropy_bits: float) -> float:
    """Invert the entropy formula for gamma by bisection.

    ``entropy_closed`` is strictly increasing on [0, 1 - 1e-12], so bisection on that bracket always converges. It runs to relative machine precision, which the rapidity estimator needs for the tiny gammas of light particles.

    Args:
        entropy_bits (float): An entropy in [0, 41] bits.

    Returns:
        float: The unique gamma with ``entropy_closed(gamma) == entropy_bits``.

    Raises:
        EntropyOutOfRange: If the entropy is negative, not finite, or above 41 bits.

    Examples:
        >>> round(gamma_from_entropy(2.0), 12)
        0.5
    """
    _check_entropy(entropy_bits)
    if entropy_bits == 0:
        return 0.0

    root, result = bisect(
        lambda g: entropy_closed(g) - entropy_bits,
        0.0,
        GAMMA_MAX,
        xtol=BISECT_XTOL,
        maxiter=BISECT_MAX_ITER,
        full_output=True,
        disp=False,
    )
    logger.trace(f"gamma from S={entropy_bits:.6e}: {root:.16e} in {result.iterations} bisections")
    return float(root)


def estimate_epsilon(sample: EntanglementSample, mass: float) -> EpsilonEstimate:
    """Estimate the expansion volume from one light-particle entropy.

    ``epsilon_hat = (2 E^2 / m^2) sqrt(gamma(S))``, from ``gamma ~ (omega_- / omega_+)^2`` and ``omega_- ~ m^2 epsilon / (2E)``.

    Args:
        sample (EntanglementSample): Energy and measured entropy.
        mass (float): The particle mass, known.

    Returns:
        EpsilonEstimate: The estimate and its regime ratio ``m sqrt(epsilon_hat) / E``.

    Raises:
        MasslessUnidentifiable: If the mass is zero.
        RegimeViolation: If the regime ratio exceeds 0.5.
    """
    _check_mass(mass)
    ratio = gamma_from_entropy(sample.entropy_bits)
    epsilon_hat = 2.0 * sample.energy**2 / mass**2 * math.sqrt(ratio)
    regime_ratio = mass * math.sqrt(epsilon_hat) / sample.energy

    if regime_ratio > REGIME_RATIO_MAX:
        msg = (
            f"m sqrt(epsilon_hat) / E = {regime_ratio:.3g} exceeds {REGIME_RATIO_MAX:g}; "
            f"E = {sample.energy:g} is not a light-particle energy for this expansion"
        )
        raise RegimeViolation(msg)
    if regime_ratio > REGIME_RATIO_WARN:
        logger.warning(
            f"m sqrt(epsilon_hat) / E = {regime_ratio:.3g}: estimate carries large corrections"
        )

    logger.debug(f"epsilon_hat={epsilon_hat:.10g} at E={sample.energy:g} (ratio {regime_ratio:.3g})")
    return EpsilonEstimate(epsilon_hat=epsilon_hat, gamma=ratio, regime_ratio=regime_ratio)


def finite_difference_dlngamma(
    samples: tuple[EntanglementSample, EntanglementSample],
) -> tuple[float, float, float]:
    """Take the central difference of ln(gamma(S)) between two energies.

    Args:
        samples (tuple[EntanglementSample, EntanglementSample]): Two samples, in any order.

    Returns:
        tuple[float, float, float]: The midpoint energy, the geometric-mean gamma there, and d ln(gamma)/dE.

    Raises:
        EntropyOutOfRange: If either entropy is not positive.
        StepOutOfRange: If the relative energy step is outside [1e-4, 1e-2].
    """
    low, high = sorted(samples, key=lambda s: s.energy)
    for sample in (low, high):
        if sample.entropy_bits <= 0:
            msg = f"The rapidity estimator needs positive entropies, got {sample.entropy_bits!r} at E={sample.energy:g}"
            raise EntropyOutOfRange(msg)

    energy = 0.5 * (low.energy + high.energy)
    step = (high.energy - low.energy) / energy
    if not SIGMA_STEP_MIN * (1.0 - _STEP_SLACK) <= step <= SIGMA_STEP_MAX * (1.0 + _STEP_SLACK):
        msg = f"Relative energy step {step:.3g} is outside [{SIGMA_STEP_MIN:g}, {SIGMA_STEP_MAX:g}]"
        raise StepOutOfRange(msg)

    log_low = math.log(gamma_from_entropy(low.entropy_bits))
    log_high = math.log(gamma_from_entropy(high.entropy_bits))
    derivative = (log_high - log_low) / (high.energy - low.energy)
    return energy, math.exp(0.5 * (log_low + log_high)), derivative


def estimate_sigma(
    samples: tuple[EntanglementSample, EntanglementSample], mass: float
) -> SigmaEstimate:
    """Estimate the expansion rapidity from two entropies at nearby energies.

    ``sigma_hat = (pi / 2) sqrt((1 + gamma) / (-(E/4) d ln(gamma)/dE - 1)) E`` with the derivative replaced by a central finite difference. The formula is approximate: deep inside the window it overestimates sigma by about ``sqrt(6) / 2``.

    Args:
        samples (tuple[EntanglementSample, EntanglementSample]): Two samples a relative step of 1e-4 to 1e-2 apart.
        mass (float): The particle mass, known.

    Returns:
        SigmaEstimate: The estimate with the intermediate quantities.

    Raises:
        DenominatorNonpositive: If ``-(E/4) d ln(gamma)/dE - 1 <= 0``.
    """
    _check_mass(mass)
    energy, ratio, derivative = finite_difference_dlngamma(samples)

    denominator = -0.25 * energy * derivative - 1.0
    if denominator <= 0:
        msg = (
            f"-(E/4) d ln(gamma)/dE - 1 = {denominator:.3g} at E={energy:g}; "
            "the rapidity estimator does not apply to these samples"
        )
        raise DenominatorNonpositive(msg)

    sigma_hat = 0.5 * math.pi * math.sqrt((1.0 + ratio) / denominator) * energy
    logger.debug(f"sigma_hat={sigma_hat:.10g} at E={energy:g} (d ln gamma/dE={derivative:.6e})")
    return SigmaEstimate(
        sigma_hat=sigma_hat,
        energy=energy,
        gamma=ratio,
        dlngamma_denergy=derivative,
        step=(max(s.energy for s in samples) - min(s.energy for s in samples)) / energy,
    )


def forward_sample(params: CosmologyParams, energy: float) -> EntanglementSample:
    """Generate the exact entropy a particle of the given energy would show.

    Args:
        params (CosmologyParams): The true cosmological parameters.
        energy (float): The particle energy, at least the mass.

    Returns:
        EntanglementSample: The noiseless sample.
    """
    k = momentum_for_energy(params.mass, energy)
    return EntanglementSample(
        energy=energy, entropy_bits=entropy_closed(closed_gamma(params, ModeSpec(k=k)))
    )


def _residuals(
    params: CosmologyParams, modes: Sequence[ModeSpec], entropies: NDArray[np.float64]
) -> NDArray[np.float64]:
    predicted = np.array([entropy_closed(closed_gamma(params, mode)) for mode in modes])
    return predicted - entropies


def _residuals_and_jacobian(
    log_params: NDArray[np.float64], modes: Sequence[ModeSpec], entropies: NDArray[np.float64], mass: float
) -> tuple[NDArray[np.float64], NDArray[np.float64]] | None:
    """Evaluate the entropy residuals and their Jacobian with respect to (ln epsilon, ln sigma).

    ``dS/d ln(theta) = -gamma log2(gamma) / (1 - gamma)^2 * d ln(gamma)/d ln(theta)``.

    Returns None where a parameter would overflow or gamma passes the entropy guard.
    """
    if not np.all(np.abs(log_params) < FIT_MAX_ABS_LOG):
        return None
    params = CosmologyParams(
        epsilon=math.exp(log_params[0]), sigma=math.exp(log_params[1]), mass=mass
    )
    residuals = np.empty(len(modes))
    jacobian = np.empty((len(modes), 2))
    try:
        for i, mode in enumerate(modes):
            ratio = closed_gamma(params, mode)
            residuals[i] = entropy_closed(ratio) - entropies[i]
            derivs = lngamma_derivatives(params, mode)
            weight = -xlogy(ratio, ratio) / _LN2 / (1.0 - ratio) ** 2
            jacobian[i] = (weight * derivs.d_log_epsilon, weight * derivs.d_log_sigma)
    except GammaOutOfRange:
        return None
    return residuals, jacobian


def _initial_guess(momenta: NDArray[np.float64], entropies: NDArray[np.float64], mass: float) -> tuple[float, float]:
    """Start from the light-particle epsilon on the lowest-energy entangled sample and sigma at the median energy."""
    energies = np.hypot(momenta, mass)
    entangled = np.flatnonzero(entropies > 0)
    lowest = entangled[np.argmin(energies[entangled])]
    epsilon0 = 2.0 * energies[lowest] ** 2 / mass**2 * math.sqrt(gamma_from_entropy(float(entropies[lowest])))
    return epsilon0, float(statistics.median(energies.tolist()))


def _lattice_axis(decades: tuple[int, int]) -> NDArray[np.float64]:
    low, high = decades
    return np.logspace(low, high, (high - low) * FIT_LATTICE_PER_DECADE + 1)


def _lattice_starts(
    modes: Sequence[ModeSpec], entropies: NDArray[np.float64], mass: float
) -> list[tuple[float, float]]:
    """Pick further fit starts from a log-spaced lattice over epsilon and sigma / m.

    Nodes that are local minima of the cost on the lattice come first, lowest cost first, then the remaining nodes by cost. Ties keep lattice order, so the starts depend only on the data.

    Returns:
        list[tuple[float, float]]: Up to ``FIT_LATTICE_STARTS`` (epsilon, sigma) pairs.
    """
    epsilons = _lattice_axis(FIT_LATTICE_EPSILON_DECADES)
    sigmas = mass * _lattice_axis(FIT_LATTICE_SIGMA_DECADES)
    costs = np.full((len(epsilons), len(sigmas)), np.inf)
    for i, epsilon in enumerate(epsilons):
        for j, sigma in enumerate(sigmas):
            params = CosmologyParams(epsilon=float(epsilon), sigma=float(sigma), mass=mass)
            with contextlib.suppress(GammaOutOfRange):
                residuals = _residuals(params, modes, entropies)
                costs[i, j] = float(residuals @ residuals)

    rows, cols = costs.shape
    padded = np.pad(costs, 1, constant_values=np.inf)
    neighbours = [
        padded[1 + di : 1 + di + rows, 1 + dj : 1 + dj + cols]
        for di in (-1, 0, 1)
        for dj in (-1, 0, 1)
        if (di, dj) != (0, 0)
    ]
    is_minimum = (np.isfinite(costs) & np.all([costs <= n for n in neighbours], axis=0)).ravel()

    order = np.argsort(costs, axis=None, kind="stable")
    ranked = [*order[is_minimum[order]], *order[~is_minimum[order]]]
    picks = [int(index) for index in ranked if np.isfinite(costs.flat[index])][:FIT_LATTICE_STARTS]
    return [(float(epsilons[index // cols]), float(sigmas[index % cols])) for index in picks]


def _descend(
    start: tuple[float, float],
    modes: Sequence[ModeSpec],
    entropies: NDArray[np.float64],
    mass: float,
    log: Logger,
) -> FitResult | None:
    """Run damped Gauss-Newton in log-parameters from one start.

    Stops on a gradient infinity-norm below 1e-12, an accepted step below 1e-14, a damping that exceeds 1e16 without lowering the cost, or the iteration cap. Only the gradient test marks the result converged.

    Returns:
        FitResult | None: The final iterate, or None when the start is not a finite positive point.
    """
    if not all(math.isfinite(value) and value > 0 for value in start):
        log.warning(f"Skipping fit start {start}: parameters must be finite and positive")
        return None
    log_params = np.array([math.log(value) for value in start])
    evaluated = _residuals_and_jacobian(log_params, modes, entropies, mass)
    if evaluated is None:
        return None

    residuals, jacobian = evaluated
    cost = float(residuals @ residuals)
    gradient = jacobian.T @ residuals
    damping = FIT_INITIAL_DAMPING
    iteration = 0

    while iteration < FIT_MAX_ITER and float(np.max(np.abs(gradient))) >= FIT_GRADIENT_TOL:
        iteration += 1
        normal = jacobian.T @ jacobian
        scaling = np.maximum(np.diag(normal), np.finfo(float).tiny)
        accepted: NDArray[np.float64] | None = None
        while damping <= FIT_MAX_DAMPING:
            step = np.linalg.solve(normal + damping * np.diag(scaling), -gradient)
            if not np.all(np.isfinite(step)):
                damping *= 10.0
                continue
            largest = float(np.max(np.abs(step)))
            if largest > FIT_MAX_LOG_STEP:
                step *= FIT_MAX_LOG_STEP / largest

            trial = _residuals_and_jacobian(log_params + step, modes, entropies, mass)
            if trial is not None and float(trial[0] @ trial[0]) < cost:
                accepted = step
                log_params = log_params + step
                residuals, jacobian = trial
                cost = float(residuals @ residuals)
                gradient = jacobian.T @ residuals
                damping = max(damping / 10.0, FIT_INITIAL_DAMPING * 1e-6)
                break
            damping *= 10.0

        log.trace(
            f"fit iteration {iteration}: cost={cost:.6e} damping={damping:.1e} "
            f"epsilon={math.exp(log_params[0]):.12g} sigma={math.exp(log_params[1]):.12g}"
        )
        if accepted is None:
            log.debug(f"Damping exhausted at iteration {iteration} without lowering the cost")
            break
        if float(np.max(np.abs(accepted))) < FIT_STEP_TOL:
            break

    gradient_norm = float(np.max(np.abs(gradient)))
    return FitResult(
        epsilon_hat=math.exp(log_params[0]),
        sigma_hat=math.exp(log_params[1]),
        residual_norm=math.sqrt(cost),
        iterations=iteration,
        # a flat Jacobian has a zero gradient without being a fit
        converged=gradient_norm < FIT_GRADIENT_TOL and bool(np.any(jacobian)),
        gradient_norm=gradient_norm,
    )


def fit_parameters(
    samples: Sequence[tuple[float, float]],
    mass: float,
    init: tuple[float, float] | None = None,
) -> FitResult:
    """Fit (epsilon, sigma) to an entanglement spectrum by least squares.

    Minimizes ``sum_i [entropy_closed(gamma(epsilon, sigma; k_i)) - S_i]^2`` with Levenberg-Marquardt damping in log-parameters, so both parameters stay positive. The Jacobian is analytic.

    The cost has more than one local minimum along the valley where epsilon and sigma trade off, so the descent runs from several starts: ``init`` (or the light-particle estimates) first, then the best nodes of a log-spaced lattice. The lowest-cost converged run wins; when none converged, the lowest-cost run is returned with ``converged = False``.

    Args:
        samples (Sequence[tuple[float, float]]): ``(k, entropy_bits)`` pairs, equally weighted.
        mass (float): The particle mass, known.
        init (tuple[float, float] | None): First starting (epsilon, sigma). Defaults to the light-particle estimates.

    Returns:
        FitResult: The fit; ``converged`` is True only when the gradient infinity-norm fell below 1e-12.

    Raises:
        InsufficientData: If there are fewer than 3 samples or fewer than 2 distinct nonzero entropies.
        Unidentifiable: If every entropy is zero.
    """
    _check_mass(mass)
    if len(samples) < FIT_MIN_SAMPLES:
        msg = f"Fitting two parameters needs at least {FIT_MIN_SAMPLES} samples, got {len(samples)}"
        raise InsufficientData(msg)

    momenta = np.array([abs(float(k)) for k, _ in samples])
    entropies = np.array([float(s) for _, s in samples])
    for entropy in entropies:
        _check_entropy(float(entropy))
    if not np.any(entropies > 0):
        msg = "Every sample has zero entropy: no expansion parameter is identifiable"
        raise Unidentifiable(msg)
    if len(set(entropies[entropies > 0].tolist())) < 2:  # ruff:ignore[magic-value-comparison]
        msg = "Fitting two parameters needs at least 2 distinct nonzero entropies"
        raise InsufficientData(msg)

    modes = [ModeSpec(k=float(k)) for k in momenta]
    starts = [init or _initial_guess(momenta, entropies, mass), *_lattice_starts(modes, entropies, mass)]
    logger.debug(f"Fitting {len(samples)} samples from {len(starts)} starts")

    results: list[FitResult] = []
    for index, start in enumerate(starts):
        log = logger.bind(start=index)
        result = _descend(start, modes, entropies, mass, log)
        if result is None:
            continue
        log.debug(
            f"{'converged' if result.converged else 'stopped'} after {result.iterations} iterations: "
            f"epsilon={result.epsilon_hat:.12g}, sigma={result.sigma_hat:.12g}, residual={result.residual_norm:.3e}"
        )
        results.append(result)

    if not results:
        msg = "No fit start gives finite model entropies"
        raise Unidentifiable(msg)
    best = min([r for r in results if r.converged] or results, key=lambda r: r.residual_norm)
    logger.debug(
        f"Fit {'converged' if best.converged else 'stopped'}: epsilon={best.epsilon_hat:.12g}, "
        f"sigma={best.sigma_hat:.12g}, residual={best.residual_norm:.3e}"
    )
    return best


def forward_pair(
    params: CosmologyParams, energy: float, step: float = DEFAULT_SIGMA_STEP
) -> tuple[EntanglementSample, EntanglementSample]:
    """Generate exact samples at ``E (1 - h/2)`` and ``E (1 + h/2)``, centered on ``energy``.

    Args:
        params (CosmologyParams): The true cosmological parameters.
        energy (float): The midpoint energy.
        step (float): The relative step h. Defaults to 1e-3.

    Returns:
        tuple[EntanglementSample, EntanglementSample]: The lower and upper sample.
    """
    return (
        forward_sample(params, energy * (1.0 - 0.5 * step)),
        forward_sample(params, energy * (1.0 + 0.5 * step)),
    )
