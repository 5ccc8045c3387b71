"""Gaussian-state dynamics of two coupled waveguides with gain, loss and squeezing."""

from .model import (
    OMEGA,
    CoherentInput,
    GaussianState,
    Placement,
    SystemConfig,
    build_diffusion_matrix,
    build_dynamic_matrix,
    initial_state,
)
from .observables import (
    EntanglementReport,
    EsdReport,
    correlation_function,
    detect_esd,
    entanglement,
    log_negativity,
    photon_number,
    physicality_margin,
)
from .propagator import (
    EvolutionRecord,
    NumericOverflowError,
    TimeGrid,
    evolve_covariance,
    evolve_covariance_ode,
    evolve_mean,
    evolve_series,
    matrix_exp,
    state_at,
)
from .spectrum import Regime, RegimeClass, classify_regime, eigenvalues, exceptional_scan, spectral_gap
from .stochastic import McEstimate, McSettings, StabilityError, sample_trajectories

__all__ = [
    "OMEGA", "CoherentInput", "GaussianState", "Placement", "SystemConfig",
    "build_diffusion_matrix", "build_dynamic_matrix", "initial_state",
    "EntanglementReport", "EsdReport", "correlation_function", "detect_esd",
    "entanglement", "log_negativity", "photon_number", "physicality_margin",
    "EvolutionRecord", "NumericOverflowError", "TimeGrid", "evolve_covariance",
    "evolve_covariance_ode", "evolve_mean", "evolve_series", "matrix_exp", "state_at",
    "Regime", "RegimeClass", "classify_regime", "eigenvalues", "exceptional_scan",
    "spectral_gap", "McEstimate", "McSettings", "StabilityError", "sample_trajectories",
]
