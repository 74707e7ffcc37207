"""Mean-field steady state, critical drive, and effective mechanical potential.

The mean-field fixed point of the driven system is

    alpha = -2i*Omega / (gamma_c + 4i*g*Q_s^2),      P_s = 0,
    Q_s^2 = 0                                        for Omega <= Omega_c,
    Q_s^2 = sqrt(-[4 g Omega^2/omega_m + (gamma_c/2)^2] / (4 g^2))
                                                     for Omega >  Omega_c,

with the critical drive Omega_c = sqrt(-gamma_c^2 * omega_m / (16 g)),
defined for negative quadratic coupling g < 0.  Above threshold the
intracavity intensity is pinned at |alpha|^2 = omega_m / (4|g|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, SystemParams


@dataclass(frozen=True)
class SteadyState:
    """Mean-field working point.

    alpha is the complex optical amplitude, Q_s2 the steady squared
    displacement, Q_s the chosen displacement branch (P_s = 0 always).
    """

    alpha: complex
    Q_s2: float
    Q_s: float
    P_s: float
    above_threshold: bool

    @property
    def photon_number(self) -> float:
        return abs(self.alpha) ** 2


def critical_drive(params: SystemParams) -> float:
    """Drive strength at which the symmetric state loses stability.

    Omega_c = sqrt(-gamma_c^2 * omega_m / (16 g)); requires g < 0.
    """
    if params.g >= 0.0:
        raise DomainError("CP requires negative g")
    return math.sqrt(-params.gamma_c**2 * params.omega_m / (16.0 * params.g))


def steady_state(params: SystemParams, branch: int = +1) -> SteadyState:
    """Solve the mean-field fixed point at the configured drive.

    Parameters
    ----------
    params : SystemParams
    branch : int
        +1 (default) or -1; selects Q_s = +/- sqrt(Q_s2) above threshold.
        All quadratic observables (|chi|^2, noise spectra) are branch
        independent.
    """
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    g, wm, gc, Om = params.g, params.omega_m, params.gamma_c, params.Omega
    if g < 0.0:
        omega_c = critical_drive(params)
        above = Om > omega_c
    else:
        above = False
    if above:
        q_s2 = math.sqrt(-(4.0 * g * Om**2 / wm + (gc / 2.0) ** 2) / (4.0 * g**2))
    else:
        q_s2 = 0.0
    alpha = -2.0j * Om / (gc + 4.0j * g * q_s2)
    q_s = branch * math.sqrt(q_s2)
    return SteadyState(alpha=alpha, Q_s2=q_s2, Q_s=q_s, P_s=0.0, above_threshold=above)


def fixed_point_residuals(params: SystemParams, steady: SteadyState) -> tuple[float, float, complex]:
    """Time derivatives of the mean-field equations at the candidate fixed point.

    Returns (dQ/dt, dP/dt, dA/dt); all must vanish for a true steady state.
    """
    g, wm, gm, gc, Om = params.g, params.omega_m, params.gamma_m, params.gamma_c, params.Omega
    alpha, q, p = steady.alpha, steady.Q_s, steady.P_s
    r_q = wm * p
    r_p = -wm * q - 4.0 * g * abs(alpha) ** 2 * q - gm * p
    r_a = -(gc / 2.0) * alpha - 2.0j * g * alpha * q**2 - 1.0j * Om
    return (r_q, r_p, r_a)


def effective_potential(params: SystemParams, Q) -> np.ndarray | float:
    """Adiabatic mechanical potential V(Q) in rad/s (energy per hbar).

    With the cavity slaved to the instantaneous position,
    |A(Q)|^2 = Omega^2 / ((gamma_c/2)^2 + (2 g Q^2)^2), the conservative
    part of the mechanical force integrates to

        V(Q) = omega_m Q^2 / 2 + (2 Omega^2 / gamma_c) * arctan(4 g Q^2 / gamma_c).

    Stationary points coincide with {0, +/-sqrt(Q_s2)}; V is even in Q.
    """
    g, wm, gc, Om = params.g, params.omega_m, params.gamma_c, params.Omega
    Q = np.asarray(Q, dtype=float)
    V = 0.5 * wm * Q**2 + (2.0 * Om**2 / gc) * np.arctan(4.0 * g * Q**2 / gc)
    return V if V.ndim else float(V)


def effective_force(params: SystemParams, Q) -> np.ndarray | float:
    """Mean-field mechanical force -dV/dQ with the cavity eliminated."""
    g, wm, gc, Om = params.g, params.omega_m, params.gamma_c, params.Omega
    Q = np.asarray(Q, dtype=float)
    n_photon = Om**2 / ((gc / 2.0) ** 2 + (2.0 * g * Q**2) ** 2)
    F = -wm * Q - 4.0 * g * n_photon * Q
    return F if F.ndim else float(F)


def drive_sweep(params: SystemParams, drive_grid) -> dict:
    """Evaluate the bifurcation diagram Q_s^2(Omega) over a drive grid.

    Returns plain arrays keyed like the exported CSV columns.
    """
    omega_c = critical_drive(params)
    drives = np.asarray(drive_grid, dtype=float)
    q_s2 = np.empty_like(drives)
    above = np.empty(drives.shape, dtype=bool)
    for i, Om in enumerate(drives):
        st = steady_state(params.with_drive(Om))
        q_s2[i] = st.Q_s2
        above[i] = st.above_threshold
    return {
        "omega_drive_rad_s": drives,
        "omega_minus_omega_c_over_gamma_m": (drives - omega_c) / params.gamma_m,
        "q_s2": q_s2,
        "above_threshold": above.astype(int),
    }
