"""Entanglement generated by a smooth cosmological expansion, and the expansion recovered from it."""

from cosmoent.bogoliubov import alpha_beta_sq, gamma, mean_particle_number
from cosmoent.config import CosmologyParams, IntegrationConfig, KGrid, ModeSpec
from cosmoent.entanglement import (
    entanglement_spectrum,
    entropy_closed,
    entropy_series,
    schmidt_spectrum,
)
from cosmoent.inversion import (
    EntanglementSample,
    estimate_epsilon,
    estimate_sigma,
    fit_parameters,
    gamma_from_entropy,
)
from cosmoent.model import frequencies, scale_factor
from cosmoent.oracle import check_against_closed_form, evolve_mode

__all__ = [
    "CosmologyParams",
    "EntanglementSample",
    "IntegrationConfig",
    "KGrid",
    "ModeSpec",
    "alpha_beta_sq",
    "check_against_closed_form",
    "entanglement_spectrum",
    "entropy_closed",
    "entropy_series",
    "estimate_epsilon",
    "estimate_sigma",
    "evolve_mode",
    "fit_parameters",
    "frequencies",
    "gamma",
    "gamma_from_entropy",
    "mean_particle_number",
    "scale_factor",
    "schmidt_spectrum",
]
