"""Simulation and analysis engine for a quadratically coupled optomechanical
system under strong resonant drive: mean-field steady states and their
pitchfork bifurcation, anti-PT spectral structure, mechanical
susceptibility, position noise spectra, and temperature-sensing
sensitivity, with independent numerical oracles for every closed form."""

__version__ = "0.1.0"

from .core import (
    CONSTANTS,
    DegeneracyError,
    DomainError,
    ParameterError,
    PhysicalConstants,
    RegimeError,
    SidebandResolutionWarning,
    SystemParams,
    load_params_file,
    params_from_experiment,
)
from .noise import (
    SpectrumKind,
    SpectrumSeries,
    position_psd,
    psd_series,
    radiation_spectrum,
    thermal_spectrum,
)
from .sensing import (
    LimitForm,
    OmegaPolicy,
    SensitivityReport,
    sensitivity_broken,
    sensitivity_numeric,
    sensitivity_report,
    sensitivity_sweep,
    sensitivity_symmetric,
    sensitivity_undriven,
)
from .spectral import (
    ChiMode,
    Regime,
    SpectralStructure,
    backaction_factor,
    backaction_factor_static,
    classify_regime,
    default_omega_grid,
    eigenfrequencies,
    exceptional_points,
    optical_noise_transfer,
    shifted_frequency_sq,
    spectral_structure,
    susceptibility,
)
from .steady import (
    SteadyState,
    critical_drive,
    effective_potential,
    fixed_point_residuals,
    steady_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
