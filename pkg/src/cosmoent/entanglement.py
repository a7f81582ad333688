"""Out-region structure of the in-vacuum: Schmidt spectrum and entanglement entropy.

Seen from the out-region the in-vacuum of the pair (k, -k) is a two-mode squeezed state
``sum_n c_n |n>_k |n>_-k`` with ``|c_n|^2 = (1 - gamma) gamma^n``. The reduced state of either
mode is diagonal in the number basis, so a probability sequence represents it completely.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger
from scipy.special import entr

from cosmoent.bogoliubov import gamma as closed_gamma
from cosmoent.config import ModeSpec
from cosmoent.constants import (
    DEFAULT_TAIL_TOL,
    GAMMA_MAX,
    MAX_SERIES_TERMS,
    TAIL_TOL_MAX,
    TAIL_TOL_MIN,
    ModeStatus,
)
from cosmoent.exceptions import DegenerateMode, GammaOutOfRange
from cosmoent.model import FrequencySet, frequencies

if TYPE_CHECKING:
    from collections.abc import Iterable

    from numpy.typing import NDArray

    from cosmoent.config import CosmologyParams
    from cosmoent.oracle import ComplexBogoliubov

_LN2 = math.log(2.0)


@dataclass(frozen=True, slots=True, eq=False)
class SchmidtSpectrum:
    """Schmidt probabilities ``p_n = (1 - gamma) gamma^n`` up to a truncation level.

    ``tail_mass`` is the exact weight ``gamma^(N+1)`` of the discarded levels, so ``sum(probs) + tail_mass == 1``.
    """

    gamma: float
    probs: NDArray[np.float64]
    tail_mass: float

    @property
    def truncation(self) -> int:
        """The highest occupation number kept."""
        return len(self.probs) - 1

    def total(self) -> float:
        """Return ``sum(probs) + tail_mass``, summed without rounding drift."""
        return math.fsum([*self.probs.tolist(), self.tail_mass])


@dataclass(frozen=True, slots=True)
class EntanglementRecord:
    """Entanglement of one mode pair.

    A degenerate mode (the zero mode of a massless field) is reported with zero entanglement and ``status = ModeStatus.DEGENERATE`` instead of aborting a batch. A mode whose gamma passes ``1 - 1e-12`` keeps its gamma but has ``entropy_bits = nan`` and ``status = ModeStatus.SATURATED``.
    """

    k: float
    gamma: float
    mean_n: float
    entropy_bits: float
    omega_in: float
    omega_out: float
    status: ModeStatus = ModeStatus.OK


def _check_gamma(gamma: float, *, upper: float) -> None:
    """Raise GammaOutOfRange unless ``0 <= gamma`` and gamma is below (or at) the given bound.

    Raises:
        GammaOutOfRange: If gamma is negative, not finite, or beyond ``upper``.
    """
    if not math.isfinite(gamma) or gamma < 0 or gamma > upper:
        msg = f"gamma = {gamma!r} is outside [0, {upper!r}]"
        raise GammaOutOfRange(msg)


def schmidt_spectrum(gamma: float, truncation: int) -> SchmidtSpectrum:
    """Return the Schmidt probabilities of the out-state up to occupation ``truncation``.

    Args:
        gamma (float): The Bogoliubov ratio, in [0, 1).
        truncation (int): Highest occupation number N to keep; N = 0 keeps the vacuum term only.

    Returns:
        SchmidtSpectrum: ``probs[n] = (1 - gamma) gamma^n`` for n = 0..N and the tail ``gamma^(N+1)``.

    Raises:
        GammaOutOfRange: If gamma is negative or at least 1.
        ValueError: If the truncation is negative.
    """
    if not math.isfinite(gamma) or gamma < 0 or gamma >= 1:
        msg = f"gamma = {gamma!r} is outside [0, 1)"
        raise GammaOutOfRange(msg)
    if truncation < 0:
        msg = f"Truncation must be non-negative, got {truncation}"
        raise ValueError(msg)

    probs = (1.0 - gamma) * np.power(gamma, np.arange(truncation + 1, dtype=float))
    return SchmidtSpectrum(gamma=gamma, probs=probs, tail_mass=gamma ** (truncation + 1))


def schmidt_amplitudes(coefficients: ComplexBogoliubov, truncation: int) -> NDArray[np.complex128]:
    """Return the phased Schmidt coefficients ``c_n = (beta*/alpha*)^n c_0`` of the out-state.

    ``c_0 = sqrt(1 - |beta/alpha|^2)``. The phases depend on the integration window and carry no physics; ``|c_n|^2`` reproduces ``schmidt_spectrum``.

    Args:
        coefficients (ComplexBogoliubov): Complex coefficients from the integration oracle.
        truncation (int): Highest occupation number to keep.

    Returns:
        NDArray[np.complex128]: c_0 .. c_N.
    """
    ratio = np.conj(coefficients.beta) / np.conj(coefficients.alpha)
    c0 = math.sqrt(1.0 - abs(ratio) ** 2)
    return c0 * np.power(ratio, np.arange(truncation + 1))


def series_truncation(gamma: float, tail_tol: float) -> int:
    """Pick the smallest N whose discarded entropy is provably below ``tail_tol``.

    The entropy carried by levels above N of a geometric distribution is bounded by ``gamma^(N+1) (N |log2 gamma| + |log2(1 - gamma)| + 4)``.

    Args:
        gamma (float): The Bogoliubov ratio, in (0, 1).
        tail_tol (float): The admissible entropy tail, in bits.

    Returns:
        int: The truncation level.

    Raises:
        GammaOutOfRange: If the series needs more than MAX_SERIES_TERMS terms.
    """
    log_gamma = math.log(gamma)
    abs_log2_gamma = abs(log_gamma) / _LN2
    abs_log2_vacuum = abs(math.log1p(-gamma)) / _LN2
    log_tol = math.log(tail_tol)

    def log_bound(n: int) -> float:
        return (n + 1) * log_gamma + math.log(n * abs_log2_gamma + abs_log2_vacuum + 4.0)

    # gamma^(N+1) * (|log2(1-gamma)| + 4) < tol is necessary, which gives a lower bound.
    start = math.ceil((log_tol - math.log(abs_log2_vacuum + 4.0)) / log_gamma) - 1
    if start > MAX_SERIES_TERMS:
        msg = f"gamma = {gamma!r} needs more than {MAX_SERIES_TERMS} series terms"
        raise GammaOutOfRange(msg)

    n = max(start, 1)
    while log_bound(n) >= log_tol:
        n += 1
        if n > MAX_SERIES_TERMS:
            msg = f"gamma = {gamma!r} needs more than {MAX_SERIES_TERMS} series terms"
            raise GammaOutOfRange(msg)
    return n


def entropy_series(gamma: float, tail_tol: float = DEFAULT_TAIL_TOL) -> float:
    """Sum ``-sum_n p_n log2 p_n`` over the Schmidt spectrum, truncated with a rigorous tail bound.

    Args:
        gamma (float): The Bogoliubov ratio, in [0, 1 - 1e-12].
        tail_tol (float): Bound on the discarded entropy, in [1e-14, 1e-6]. Defaults to 1e-12.

    Returns:
        float: The entanglement entropy in bits.

    Raises:
        ValueError: If tail_tol is outside its range.
    """
    _check_gamma(gamma, upper=GAMMA_MAX)
    if not TAIL_TOL_MIN <= tail_tol <= TAIL_TOL_MAX:
        msg = f"tail_tol = {tail_tol!r} is outside [1e-14, 1e-6]"
        raise ValueError(msg)
    if gamma == 0:
        return 0.0

    truncation = series_truncation(gamma, tail_tol)
    spectrum = schmidt_spectrum(gamma, truncation)
    logger.trace(f"entropy series for gamma={gamma:.6e}: {truncation + 1} terms")
    # entr(p) = -p ln p with entr(0) = 0
    return math.fsum(entr(spectrum.probs).tolist()) / _LN2


def entropy_closed(gamma: float) -> float:
    """Evaluate the closed-form entropy ``log2(gamma^(gamma/(gamma - 1)) / (1 - gamma))``.

    Computed as ``-[gamma ln(gamma) / (1 - gamma) + ln(1 - gamma)] / ln 2`` with the limit 0 at gamma = 0.

    Args:
        gamma (float): The Bogoliubov ratio, in [0, 1 - 1e-12].

    Returns:
        float: The entanglement entropy in bits.
    """
    _check_gamma(gamma, upper=GAMMA_MAX)
    if gamma == 0:
        return 0.0
    return -(gamma * math.log(gamma) / (1.0 - gamma) + math.log1p(-gamma)) / _LN2


def entropy_from_occupation(mean_n: float) -> float:
    """Evaluate the entropy of a thermal-like mode from its mean occupation.

    ``(n + 1) log2(n + 1) - n log2(n)``, arranged as ``log2(n + 1) + n log2(1 + 1/n)`` so neither large nor small occupations cancel.

    Args:
        mean_n (float): The mean particle number, non-negative.

    Returns:
        float: The entropy in bits.

    Raises:
        ValueError: If the occupation is negative or not finite.
    """
    if not math.isfinite(mean_n) or mean_n < 0:
        msg = f"Mean occupation must be a non-negative number, got {mean_n!r}"
        raise ValueError(msg)
    if mean_n == 0:
        return 0.0
    return (math.log1p(mean_n) + mean_n * math.log1p(1.0 / mean_n)) / _LN2


def entanglement_record(params: CosmologyParams, k: float) -> EntanglementRecord:
    """Compute the entanglement record of the pair (k, -k).

    Args:
        params (CosmologyParams): The cosmological parameters.
        k (float): The mode momentum.

    Returns:
        EntanglementRecord: The record; degenerate and saturated modes are flagged rather than raised.
    """
    mode = ModeSpec(k=k)
    try:
        freqs: FrequencySet = frequencies(params, mode)
    except DegenerateMode as e:
        logger.debug(f"k={k:g}: {e}")
        return EntanglementRecord(
            k=k,
            gamma=0.0,
            mean_n=0.0,
            entropy_bits=0.0,
            omega_in=0.0,
            omega_out=0.0,
            status=ModeStatus.DEGENERATE,
        )

    ratio = closed_gamma(params, mode)
    if ratio > GAMMA_MAX:
        logger.debug(f"k={k:g}: gamma={ratio!r} is past the entropy guard")
        return EntanglementRecord(
            k=k,
            gamma=ratio,
            mean_n=ratio / (1.0 - ratio) if ratio < 1 else math.inf,
            entropy_bits=math.nan,
            omega_in=freqs.omega_in,
            omega_out=freqs.omega_out,
            status=ModeStatus.SATURATED,
        )
    return EntanglementRecord(
        k=k,
        gamma=ratio,
        mean_n=ratio / (1.0 - ratio),
        entropy_bits=entropy_closed(ratio),
        omega_in=freqs.omega_in,
        omega_out=freqs.omega_out,
    )


def entanglement_spectrum(
    params: CosmologyParams, k_values: Iterable[float], *, workers: int = 1
) -> list[EntanglementRecord]:
    """Compute one entanglement record per momentum, in input order.

    Args:
        params (CosmologyParams): The cosmological parameters.
        k_values (Iterable[float]): The momenta to evaluate.
        workers (int): Threads to fan the modes out over. Defaults to 1.

    Returns:
        list[EntanglementRecord]: Records in the order of ``k_values``.
    """
    momenta = [float(k) for k in k_values]
    logger.debug(
        f"Entanglement spectrum over {len(momenta)} modes (epsilon={params.epsilon:g}, "
        f"sigma={params.sigma:g}, m={params.mass:g})"
    )
    if workers <= 1:
        return [entanglement_record(params, k) for k in momenta]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: entanglement_record(params, k), momenta))
