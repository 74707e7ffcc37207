"""Exportable figure datasets: the standard sweeps of this analysis engine.

Each dataset id maps to a builder producing a `SweepResult` whose column
schema is frozen (schema_version bumps on any change).  Grids are chosen
to cover the interesting structure around the critical drive; the drive
axis is expressed as (Omega - Omega_c)/gamma_m and frequencies as
omega/omega_m, with raw rad/s companions where useful.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import SystemParams
from .noise import position_psd
from .runio import SweepResult, build_manifest
from .sensing import LimitForm, sensitivity_broken, sensitivity_undriven, slope_at_zero
from .spectral import (
    ChiMode,
    Regime,
    classify_regime,
    critical_drive,
    default_omega_grid,
    eigenfrequencies,
    exceptional_points,
    susceptibility,
)
from .steady import drive_sweep, steady_state


def _log_chi_sq(params: SystemParams, omega_grid) -> np.ndarray:
    steady = steady_state(params)
    chi = susceptibility(params, steady, omega_grid, ChiMode.EXACT)
    with np.errstate(divide="ignore"):
        return np.log10(np.abs(chi) ** 2)


def _zero_centered_log_grid(omega_m: float, span: float, n_side: int = 300) -> np.ndarray:
    offs = np.geomspace(1e-8 * omega_m, span * omega_m, n_side)
    return np.concatenate([-offs[::-1], [0.0], offs])


def bifurcation_sweep(params: SystemParams, n_points: int = 401) -> SweepResult:
    """Steady squared displacement versus drive, (Omega-Omega_c)/gamma_m in [-2, 2]."""
    omega_c = critical_drive(params)
    drives = omega_c + np.linspace(-2.0, 2.0, n_points) * params.gamma_m
    drives = np.sort(np.append(drives, omega_c))
    cols = drive_sweep(params, drives)
    return SweepResult(columns=cols)


def eigenfrequency_sweep(params: SystemParams, n_points: int = 801) -> SweepResult:
    """Re/Im of omega_± versus drive; normalized and raw rad/s columns."""
    omega_c = critical_drive(params)
    ep1, ep2 = exceptional_points(params)
    drives = omega_c + np.linspace(-2.0, 2.0, n_points) * params.gamma_m
    drives = np.unique(np.concatenate([drives, [ep1, omega_c, ep2]]))
    wp = np.array([eigenfrequencies(params.with_drive(Om))[0] for Om in drives])
    wm_ = np.array([eigenfrequencies(params.with_drive(Om))[1] for Om in drives])
    cols = {
        "omega_drive_offset_over_gamma_m": (drives - omega_c) / params.gamma_m,
        "re_omega_plus": wp.real / params.omega_m,
        "re_omega_minus": wm_.real / params.omega_m,
        "im_omega_plus": wp.imag / params.gamma_m,
        "im_omega_minus": wm_.imag / params.gamma_m,
        "re_omega_plus_rad_s": wp.real,
        "re_omega_minus_rad_s": wm_.real,
        "im_omega_plus_rad_s": wp.imag,
        "im_omega_minus_rad_s": wm_.imag,
    }
    return SweepResult(columns=cols)


def susceptibility_map_sweep(params: SystemParams, n_omega: int = 301, n_drive: int = 81,
                             jobs: int = 1) -> SweepResult:
    """log10 |chi|^2 on a (drive, frequency) grid, long format."""
    omega_c = critical_drive(params)
    omegas = np.linspace(-1.5, 1.5, n_omega) * params.omega_m
    drives = omega_c + np.linspace(-1.0, 1.0, n_drive) * params.gamma_m

    def one(Om: float) -> np.ndarray:
        return _log_chi_sq(params.with_drive(Om), omegas)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            blocks = list(pool.map(one, drives))
    else:
        blocks = [one(Om) for Om in drives]
    cols = {
        "omega_over_omega_m": np.tile(omegas / params.omega_m, drives.size),
        "omega_drive_offset_over_gamma_m": np.repeat((drives - omega_c) / params.gamma_m, omegas.size),
        "log10_abs_chi_sq": np.concatenate(blocks),
    }
    return SweepResult(columns=cols)


def susceptibility_near_critical(params: SystemParams) -> SweepResult:
    """Two curves: at the critical drive (divergent at omega = 0, rendered
    as inf) and at Omega_c + 0.01 gamma_m."""
    omega_c = critical_drive(params)
    grid = default_omega_grid(params.omega_m)
    cols = {
        "omega_over_omega_m": grid / params.omega_m,
        "log10_abs_chi_sq_at_critical": _log_chi_sq(params.with_drive(omega_c), grid),
        "log10_abs_chi_sq_near_critical": _log_chi_sq(params.with_drive(omega_c + 0.01 * params.gamma_m), grid),
    }
    return SweepResult(columns=cols)


def susceptibility_undriven(params: SystemParams) -> SweepResult:
    """log10 |chi|^2 of the undriven resonator."""
    grid = default_omega_grid(params.omega_m)
    cols = {
        "omega_over_omega_m": grid / params.omega_m,
        "log10_abs_chi_sq": _log_chi_sq(params.with_drive(0.0), grid),
    }
    return SweepResult(columns=cols)


def psd_vs_frequency(params: SystemParams, temperatures=(100.0, 200.0, 300.0),
                     drive_offset_over_gamma_m: float = 0.01) -> SweepResult:
    """S_qq(omega) near the single anti-PT-symmetric peak at omega = 0, one
    curve per temperature (long format)."""
    omega_c = critical_drive(params)
    p = params.with_drive(omega_c + drive_offset_over_gamma_m * params.gamma_m)
    steady = steady_state(p)
    grid = _zero_centered_log_grid(params.omega_m, span=2e-4)
    blocks, temps = [], []
    for T in temperatures:
        blocks.append(position_psd(p, steady, grid, T))
        temps.append(np.full(grid.size, T))
    cols = {
        "omega_over_omega_m": np.tile(grid / params.omega_m, len(temperatures)),
        "s_qq_seconds": np.concatenate(blocks),
        "temperature_k": np.concatenate(temps),
    }
    return SweepResult(columns=cols)


def psd_peak_vs_temperature(params: SystemParams, drive_offsets=(0.01,),
                            T_min: float = 0.01, T_max: float = 300.0, n_T: int = 101) -> SweepResult:
    """S_qq(0) versus bath temperature at one or more drive offsets."""
    omega_c = critical_drive(params)
    temps = np.linspace(T_min, T_max, n_T)
    rows_T, rows_S, rows_off = [], [], []
    for off in drive_offsets:
        p = params.with_drive(omega_c + off * params.gamma_m)
        steady = steady_state(p)
        rows_T.append(temps)
        rows_S.append(np.array([position_psd(p, steady, 0.0, T) for T in temps]))
        rows_off.append(np.full(n_T, off))
    cols = {
        "temperature_k": np.concatenate(rows_T),
        "s_qq_zero_seconds": np.concatenate(rows_S),
        "omega_drive_offset_over_gamma_m": np.concatenate(rows_off),
    }
    return SweepResult(columns=cols)


def sensitivity_vs_drive(params: SystemParams, n_points: int = 801, T_high: float = 300.0) -> SweepResult:
    """High-temperature sensitivity versus drive: the regime-stitched xi
    (xi_S in the symmetric window, xi_B at omega_eff in the broken ones,
    divergent at the critical drive) next to the undriven baseline xi_0.

    Exact rows at Omega = 0, both exceptional points, and Omega_c are
    included so the headline enhancement values appear verbatim.
    """
    omega_c = critical_drive(params)
    ep1, ep2 = exceptional_points(params)
    drives = omega_c + np.linspace(-2.0, 2.0, n_points) * params.gamma_m
    drives = np.unique(np.concatenate([drives, [0.0, ep1, omega_c, ep2]]))
    xi0 = sensitivity_undriven(params, limit=LimitForm.HIGH_T)
    xi_vals = np.empty(drives.size)
    regimes = np.empty(drives.size, dtype=object)
    for i, Om in enumerate(drives):
        p = params.with_drive(Om)
        regime = classify_regime(p)
        regimes[i] = regime.value
        if regime is Regime.ANTI_PT_SYMMETRIC:
            xi_vals[i] = slope_at_zero(p)
        else:
            xi_vals[i] = sensitivity_broken(p, steady_state(p), T_high)
    cols = {
        "omega_drive_offset_over_gamma_m": (drives - omega_c) / params.gamma_m,
        "xi_s_per_k": xi_vals,
        "xi0_s_per_k": np.full(drives.size, xi0),
        "regime": regimes,
    }
    return SweepResult(columns=cols)


def sensitivity_vs_temperature(params: SystemParams, n_T: int = 121,
                               offset_symmetric: float = 0.01,
                               offset_broken: float = 1.0) -> SweepResult:
    """xi_S, xi_B, and xi_0 versus temperature, showing the low-temperature
    collapse of the broken-regime and undriven sensitivities against the
    flat symmetric-regime one."""
    omega_c = critical_drive(params)
    p_s = params.with_drive(omega_c + offset_symmetric * params.gamma_m)
    p_b = params.with_drive(omega_c + offset_broken * params.gamma_m)
    steady_b = steady_state(p_b)
    xi_s = slope_at_zero(p_s)
    temps = np.geomspace(1e-9, 300.0, n_T)
    xi_b = np.array([sensitivity_broken(p_b, steady_b, T) for T in temps])
    xi_0 = np.array([sensitivity_undriven(params, T, LimitForm.FULL) for T in temps])
    cols = {
        "temperature_k": temps,
        "xi_s_s_per_k": np.full(n_T, xi_s),
        "xi_b_s_per_k": xi_b,
        "xi_0_s_per_k": xi_0,
        "regime_s": np.full(n_T, classify_regime(p_s).value, dtype=object),
        "regime_b": np.full(n_T, classify_regime(p_b).value, dtype=object),
    }
    return SweepResult(columns=cols)


#: figure id -> (builder without grid args, one-line description)
FIGURES = {
    "1a": (bifurcation_sweep, "bifurcation: Q_s^2 vs drive offset, [-2, 2] gamma_m"),
    "1b": (eigenfrequency_sweep, "eigenfrequencies omega_pm vs drive offset, [-2, 2] gamma_m"),
    "2a": (susceptibility_map_sweep, "log10|chi|^2 map over (drive offset [-1, 1] gamma_m, omega [-1.5, 1.5] omega_m)"),
    "2b": (susceptibility_near_critical, "log10|chi|^2 at Omega_c (divergent) and Omega_c + 0.01 gamma_m"),
    "2c": (susceptibility_undriven, "log10|chi|^2 of the undriven resonator"),
    "3a": (psd_vs_frequency, "S_qq(omega) near omega = 0 at 100/200/300 K, drive offset 0.01 gamma_m"),
    "3b": (lambda p: psd_peak_vs_temperature(p, drive_offsets=(0.01,)),
           "S_qq(0) vs temperature at drive offset 0.01 gamma_m"),
    "3c": (lambda p: psd_peak_vs_temperature(p, drive_offsets=(0.01, 0.015, 0.02)),
           "S_qq(0) vs temperature at drive offsets 0.01/0.015/0.02 gamma_m"),
    "4a": (sensitivity_vs_drive, "high-T sensitivity vs drive offset with undriven baseline"),
    "4b": (sensitivity_vs_temperature, "xi_S/xi_B/xi_0 vs temperature (low-T collapse)"),
}

FIGURE_IDS = tuple(FIGURES)


def build_figure(figure_id: str, params: SystemParams, jobs: int = 1) -> SweepResult:
    """Build the dataset for one figure id; ValueError on unknown ids."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure id: {figure_id!r} (choose from {', '.join(FIGURE_IDS)})")
    builder, description = FIGURES[figure_id]
    if figure_id == "2a":
        result = builder(params, jobs=jobs)
    else:
        result = builder(params)
    manifest = build_manifest(
        f"reproduce-figure {figure_id}",
        params,
        extra={"figure_id": figure_id, "description": description, "jobs": jobs},
    )
    return SweepResult(columns=result.columns, schema_version=result.schema_version, manifest=manifest)
