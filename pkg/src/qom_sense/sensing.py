"""Temperature-sensing sensitivity: slope of the position PSD in T.

    xi(omega) = d S_qq(omega) / dT

evaluated at omega = 0 in the anti-PT-symmetric regime and at the
effective resonance omega_eff = |Re(omega_+)| in the broken regimes.
Closed forms (all in s/K, numerically identical to a per-Hz-per-K figure
when rates are in rad/s):

    xi_S = 2 k_B omega_m gamma_m / (hbar |omega_+ omega_-|^2)
    xi_B = |chi(omega_eff)|^2 * (hbar omega_eff^2 gamma_m / 2 omega_m k_B T^2)
           / sinh^2(hbar omega_eff / 2 k_B T)
    xi_0 = (hbar omega_m / 2 gamma_m k_B T^2) / sinh^2(hbar omega_m / 2 k_B T)
           -> 2 k_B / (hbar omega_m gamma_m)              (high T)
           -> (2 hbar omega_m / gamma_m k_B T^2) e^(-hbar omega_m / k_B T)  (low T)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, DomainError, RegimeError, SystemParams
from .noise import position_psd
from .spectral import ChiMode, Regime, classify_regime, eigenfrequencies, shifted_frequency_sq, susceptibility
from .steady import SteadyState, critical_drive, steady_state

# sinh(x)^2 overflows for x beyond ~355; switch to the asymptotic tail.
_SINH_OVERFLOW = 350.0


class LimitForm(enum.Enum):
    FULL = "full"
    HIGH_T = "high_t"
    LOW_T = "low_t"


class OmegaPolicy(enum.Enum):
    AT_ZERO = "at_zero"
    AT_OMEGA_EFF = "at_omega_eff"


@dataclass(frozen=True)
class SensitivityReport:
    xi_numeric: float
    xi_closed_form: float
    regime: Regime
    omega_eval: float
    limit_label: LimitForm


def _inv_sinh_sq(x: float) -> float:
    """1 / sinh(x)^2 without overflow for large positive x."""
    if x > _SINH_OVERFLOW:
        e = math.exp(-x)
        return 4.0 * e * e  # relative error ~2 e^(-2x), far below eps here
    return 1.0 / math.sinh(x) ** 2


def sensitivity_numeric(params: SystemParams, steady: SteadyState, omega: float, T: float,
                        chi_mode: ChiMode = ChiMode.EXACT) -> float:
    """Numerical d S_qq(omega) / dT: adaptive central difference with one
    Richardson extrapolation step (step h = max(1e-6 T, 1e-9 K))."""
    if T <= 0.0:
        raise DomainError("numeric sensitivity requires T > 0; use a closed form at T = 0")
    h = max(1e-6 * T, 1e-9)

    def central(step: float) -> float:
        hi = position_psd(params, steady, omega, T + step, chi_mode)
        lo = position_psd(params, steady, omega, max(T - step, 0.0), chi_mode)
        return (hi - lo) / (step + min(step, T))

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def slope_at_zero(params: SystemParams) -> float:
    """d S_qq(0)/dT = 2 k_B omega_m gamma_m / (hbar omega_0^4); exact in any
    regime because S_m,th(0) is exactly linear in T and chi(0) = omega_m /
    omega_0^2 with omega_0^2 the drive-shifted squared frequency."""
    w0_sq = shifted_frequency_sq(params)
    hbar, k_B = CONSTANTS.hbar, CONSTANTS.k_B
    if w0_sq == 0.0:
        return math.inf
    return 2.0 * k_B * params.omega_m * params.gamma_m / (hbar * w0_sq**2)


def sensitivity_symmetric(params: SystemParams, steady: SteadyState | None = None) -> float:
    """xi_S, the temperature-independent sensitivity at omega = 0 in the
    anti-PT-symmetric window; diverges as the drive approaches Omega_c."""
    if classify_regime(params) is not Regime.ANTI_PT_SYMMETRIC:
        raise RegimeError("xi_S is defined in the anti-PT-symmetric regime only")
    return slope_at_zero(params)


def sensitivity_broken(params: SystemParams, steady: SteadyState, T: float,
                       chi_mode: ChiMode = ChiMode.EXACT) -> float:
    """xi_B, the sensitivity at omega_eff = |Re(omega_+)| in the broken regimes."""
    if classify_regime(params) is Regime.ANTI_PT_SYMMETRIC:
        raise RegimeError("xi_B is defined in the anti-PT-broken regimes only")
    if T <= 0.0:
        raise DomainError("xi_B requires T > 0")
    hbar, k_B = CONSTANTS.hbar, CONSTANTS.k_B
    w_plus, _ = eigenfrequencies(params)
    omega_eff = abs(w_plus.real)
    chi = susceptibility(params, steady, omega_eff, chi_mode)
    x = hbar * omega_eff / (2.0 * k_B * T)
    return (
        abs(chi) ** 2
        * (hbar * omega_eff**2 * params.gamma_m / (2.0 * params.omega_m * k_B * T**2))
        * _inv_sinh_sq(x)
    )


def sensitivity_undriven(params: SystemParams, T: float | None = None,
                         limit: LimitForm = LimitForm.FULL) -> float:
    """xi_0, the sensitivity of the undriven resonator (drive off)."""
    hbar, k_B = CONSTANTS.hbar, CONSTANTS.k_B
    wm, gm = params.omega_m, params.gamma_m
    if limit is LimitForm.HIGH_T:
        return 2.0 * k_B / (hbar * wm * gm)
    if T is None or T <= 0.0:
        raise DomainError(f"xi_0 in the {limit.value} form requires T > 0")
    if limit is LimitForm.FULL:
        x = hbar * wm / (2.0 * k_B * T)
        return hbar * wm / (2.0 * gm * k_B * T**2) * _inv_sinh_sq(x)
    if limit is LimitForm.LOW_T:
        return 2.0 * hbar * wm / (gm * k_B * T**2) * math.exp(-hbar * wm / (k_B * T))
    raise ValueError(f"unknown limit form: {limit!r}")


def sensitivity_report(params: SystemParams, T: float,
                       chi_mode: ChiMode = ChiMode.EXACT) -> SensitivityReport:
    """Regime-appropriate closed form plus the numeric cross-check."""
    regime = classify_regime(params)
    steady = steady_state(params)
    if regime is Regime.ANTI_PT_SYMMETRIC:
        omega_eval = 0.0
        closed = sensitivity_symmetric(params, steady)
    elif params.Omega == 0.0:
        omega_eval = abs(eigenfrequencies(params)[0].real)
        closed = sensitivity_undriven(params, T, LimitForm.FULL)
    else:
        omega_eval = abs(eigenfrequencies(params)[0].real)
        closed = sensitivity_broken(params, steady, T, chi_mode)
    numeric = sensitivity_numeric(params, steady, omega_eval, T, chi_mode)
    return SensitivityReport(
        xi_numeric=numeric,
        xi_closed_form=closed,
        regime=regime,
        omega_eval=omega_eval,
        limit_label=LimitForm.FULL,
    )


def sensitivity_sweep(params_base: SystemParams, drive_grid, T_grid,
                      omega_policy: OmegaPolicy = OmegaPolicy.AT_OMEGA_EFF):
    """Tabulate xi over a (drive, temperature) grid.

    Each row carries the regime, the evaluation frequency, the
    regime-appropriate closed form, and the numeric cross-check; per-point
    domain errors are flagged in the status column instead of aborting the
    sweep.
    """
    from .runio import SweepResult, build_manifest

    drives = np.asarray(drive_grid, dtype=float)
    temps = np.asarray(T_grid, dtype=float)
    if drives.size == 0 or temps.size == 0:
        raise ValueError("drive_grid and T_grid must be nonempty")
    omega_c = critical_drive(params_base)
    n = drives.size * temps.size
    cols = {
        "omega_drive_rad_s": np.empty(n),
        "omega_drive_offset_over_gamma_m": np.empty(n),
        "temperature_k": np.empty(n),
        "omega_eval_rad_s": np.empty(n),
        "regime": np.empty(n, dtype=object),
        "xi_closed_s_per_k": np.empty(n),
        "xi_numeric_s_per_k": np.empty(n),
        "status": np.empty(n, dtype=object),
    }
    i = 0
    for Om in drives:
        p = params_base.with_drive(Om)
        regime = classify_regime(p)
        steady = steady_state(p)
        for T in temps:
            cols["omega_drive_rad_s"][i] = Om
            cols["omega_drive_offset_over_gamma_m"][i] = (Om - omega_c) / params_base.gamma_m
            cols["temperature_k"][i] = T
            cols["regime"][i] = regime.value
            try:
                if omega_policy is OmegaPolicy.AT_ZERO or regime is Regime.ANTI_PT_SYMMETRIC:
                    omega_eval = 0.0
                    closed = slope_at_zero(p)
                elif Om == 0.0:
                    omega_eval = abs(eigenfrequencies(p)[0].real)
                    closed = sensitivity_undriven(p, T, LimitForm.FULL)
                else:
                    omega_eval = abs(eigenfrequencies(p)[0].real)
                    closed = sensitivity_broken(p, steady, T)
                numeric = sensitivity_numeric(p, steady, omega_eval, T)
                cols["omega_eval_rad_s"][i] = omega_eval
                cols["xi_closed_s_per_k"][i] = closed
                cols["xi_numeric_s_per_k"][i] = numeric
                cols["status"][i] = "ok"
            except (DomainError, RegimeError) as exc:
                cols["omega_eval_rad_s"][i] = math.nan
                cols["xi_closed_s_per_k"][i] = math.nan
                cols["xi_numeric_s_per_k"][i] = math.nan
                cols["status"][i] = f"error: {exc}"
            i += 1
    manifest = build_manifest(
        "sensitivity-sweep",
        params_base,
        extra={"omega_policy": omega_policy.value, "n_drives": int(drives.size), "n_temperatures": int(temps.size)},
    )
    return SweepResult(columns=cols, manifest=manifest)
