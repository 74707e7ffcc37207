"""Thermal and radiation noise floors and the position power spectral density.

    S_qq(omega) = |chi(omega)|^2 [ S_m,th(omega) + S_c,vac(omega) ]

with the quantum Brownian force spectrum

    S_m,th(omega) = (gamma_m/omega_m) * omega * [1 + coth(hbar omega / 2 k_B T)]

carrying the temperature signal, and the temperature-independent
radiation-pressure floor

    S_c,vac(omega) = 16 g^2 Q_s^2 |alpha|^2 gamma_c
                     / ((gamma_c/2)^2 + (2 g Q_s^2 - omega)^2).

Spectra follow the convention Var(q) = integral S_qq(omega) domega / 2 pi,
so S_qq carries units of seconds for the dimensionless displacement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import CONSTANTS, SystemParams
from .spectral import ChiMode, susceptibility
from .steady import SteadyState

# Below this |hbar omega / 2 kB T| the Laurent form coth(x) ~ 1/x + x/3 is
# used; the direct 1/tanh evaluation would lose the omega -> 0 limit.
_COTH_SERIES_CUTOFF = 1e-6


class SpectrumKind(enum.Enum):
    CHI = "chi"
    THERMAL_NOISE = "thermal_noise"
    RADIATION_NOISE = "radiation_noise"
    PSD = "psd"


@dataclass(frozen=True)
class SpectrumSeries:
    """A spectrum sampled on a strictly increasing frequency grid."""

    omega_grid: np.ndarray
    values: np.ndarray
    kind: SpectrumKind
    units: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=float)
        values = np.asarray(self.values)
        if grid.ndim != 1 or values.shape != grid.shape:
            raise ValueError("values must be a 1-D array matching the frequency grid")
        if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
            raise ValueError("omega_grid must be strictly increasing")
        if self.kind is not SpectrumKind.CHI:
            if np.iscomplexobj(values):
                raise ValueError(f"{self.kind.value} series must be real")
            positive = grid > 0.0
            finite = np.isfinite(values)
            if np.any(values[positive & finite] < 0.0):
                raise ValueError(f"{self.kind.value} series must be nonnegative for omega > 0")
        object.__setattr__(self, "omega_grid", grid)
        object.__setattr__(self, "values", values)


def thermal_spectrum(params: SystemParams, omega, T: float):
    """Quantum Brownian force spectrum S_m,th(omega) at bath temperature T.

    Finite for all inputs: the omega -> 0 limit is 2 gamma_m k_B T /
    (hbar omega_m), and T = 0 gives the zero-point asymmetric spectrum
    2 (gamma_m/omega_m) omega for omega > 0 and 0 for omega < 0.
    """
    if T < 0.0:
        raise ValueError("temperature must be >= 0")
    gm, wm = params.gamma_m, params.omega_m
    hbar, k_B = CONSTANTS.hbar, CONSTANTS.k_B
    omega = np.asarray(omega, dtype=float)
    if T == 0.0:
        out = (gm / wm) * omega * (1.0 + np.sign(omega))
        return out if out.ndim else float(out)
    x = hbar * omega / (2.0 * k_B * T)
    small = np.abs(x) < _COTH_SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = omega * (1.0 + 1.0 / np.tanh(x))
    series = omega + 2.0 * k_B * T / hbar + hbar * omega**2 / (6.0 * k_B * T)
    out = (gm / wm) * np.where(small, series, direct)
    return out if out.ndim else float(out)


def radiation_spectrum(params: SystemParams, steady: SteadyState, omega):
    """Radiation-pressure noise floor S_c,vac(omega); temperature independent.

    Zero below threshold; otherwise a Lorentzian of half-width gamma_c/2
    centered at omega = 2 g Q_s^2.
    """
    g, gc = params.g, params.gamma_c
    omega = np.asarray(omega, dtype=float)
    q2 = steady.Q_s2
    if q2 == 0.0:
        out = np.zeros_like(omega)
        return out if out.ndim else 0.0
    out = (
        16.0 * g**2 * q2 * abs(steady.alpha) ** 2 * gc
        / ((gc / 2.0) ** 2 + (2.0 * g * q2 - omega) ** 2)
    )
    return out if out.ndim else float(out)


def position_psd(params: SystemParams, steady: SteadyState, omega, T: float,
                 chi_mode: ChiMode = ChiMode.EXACT):
    """Position PSD S_qq(omega) = |chi|^2 (S_m,th + S_c,vac), in seconds.

    A critical-point divergence of chi propagates as an infinite value.
    """
    chi = susceptibility(params, steady, omega, chi_mode)
    floor = thermal_spectrum(params, omega, T) + radiation_spectrum(params, steady, omega)
    out = np.abs(np.asarray(chi)) ** 2 * floor
    return out if out.ndim else float(out)


def thermal_series(params: SystemParams, omega_grid, T: float) -> SpectrumSeries:
    return SpectrumSeries(
        omega_grid=np.asarray(omega_grid, dtype=float),
        values=thermal_spectrum(params, omega_grid, T),
        kind=SpectrumKind.THERMAL_NOISE,
        units="1/s",
        meta={"temperature_k": T},
    )


def radiation_series(params: SystemParams, steady: SteadyState, omega_grid) -> SpectrumSeries:
    return SpectrumSeries(
        omega_grid=np.asarray(omega_grid, dtype=float),
        values=radiation_spectrum(params, steady, omega_grid),
        kind=SpectrumKind.RADIATION_NOISE,
        units="1/s",
    )


def chi_series(params: SystemParams, steady: SteadyState, omega_grid,
               chi_mode: ChiMode = ChiMode.EXACT) -> SpectrumSeries:
    return SpectrumSeries(
        omega_grid=np.asarray(omega_grid, dtype=float),
        values=np.asarray(susceptibility(params, steady, omega_grid, chi_mode)),
        kind=SpectrumKind.CHI,
        units="s",
        meta={"mode": chi_mode.value},
    )


def psd_series(params: SystemParams, steady: SteadyState, omega_grid, T: float,
               chi_mode: ChiMode = ChiMode.EXACT) -> SpectrumSeries:
    return SpectrumSeries(
        omega_grid=np.asarray(omega_grid, dtype=float),
        values=position_psd(params, steady, omega_grid, T, chi_mode),
        kind=SpectrumKind.PSD,
        units="s",
        meta={"temperature_k": T, "mode": chi_mode.value},
    )
