"""Linearized fluctuation spectrum: susceptibility, eigenfrequencies, regimes.

The position fluctuation responds to force-like noise with susceptibility

    chi(omega) = omega_m / (omega_m^2 - omega^2 - i gamma_m omega
                            + 4 omega_m g |alpha|^2 zeta(omega)),

where the cavity backaction factor

    zeta(omega) = 1 - (4 g Q_s^2)^2 / ((gamma_c/2 - i omega)^2 + (2 g Q_s^2)^2)

reduces for |omega| << gamma_c/2 to its static value zeta_0.  With
zeta -> zeta_0 the susceptibility factors as
chi = -omega_m / ((omega - omega_+)(omega - omega_-)) with

    omega_± = -i gamma_m/2 ± sqrt(omega_m (omega_m + 4 g |alpha|^2 zeta_0)
                                  - (gamma_m/2)^2).

The radicand changes sign at the two exceptional points

    Omega_EP1^2 = Omega_c^2 [1 - (gamma_m / 2 omega_m)^2],
    Omega_EP2^2 = Omega_c^2 [1 - (gamma_m / 4 omega_m)^2]^(-1),

which bracket the critical drive and bound the anti-PT-symmetric window
(omega_± purely imaginary) between the two anti-PT-broken regions
(opposite real parts, common imaginary part -gamma_m/2).

Numerical note: near Omega_c the shifted stiffness
omega_m (omega_m + 4 g |alpha|^2 zeta_0) is a difference of terms of order
omega_m^2 that nearly cancel.  All internal evaluations use factored forms
(in terms of Omega - Omega_c or Omega -+ Omega_EP) that keep the critical
point and the exceptional points exact in floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DegeneracyError, DomainError, SystemParams
from .steady import SteadyState, critical_drive


class Regime(enum.Enum):
    ANTI_PT_BROKEN_LOWER = "anti_pt_broken_lower"
    ANTI_PT_SYMMETRIC = "anti_pt_symmetric"
    ANTI_PT_BROKEN_UPPER = "anti_pt_broken_upper"


class ChiMode(enum.Enum):
    EXACT = "exact"
    FACTORED = "factored"


@dataclass(frozen=True)
class SpectralStructure:
    """Complex eigenfrequencies and regime boundaries at one drive strength."""

    omega_plus: complex
    omega_minus: complex
    omega_c_drive: float
    omega_ep1: float
    omega_ep2: float
    regime: Regime


def exceptional_points(params: SystemParams) -> tuple[float, float]:
    """Drive strengths at which the two eigenfrequencies coalesce.

    Requires g < 0 and gamma_m < 2 omega_m; returns (Omega_EP1, Omega_EP2)
    with Omega_EP1 < Omega_c < Omega_EP2.
    """
    if params.g >= 0.0:
        raise DomainError("exceptional points require negative g")
    if params.gamma_m >= 2.0 * params.omega_m:
        raise DomainError("exceptional points require gamma_m < 2*omega_m")
    omega_c = critical_drive(params)
    q1 = (params.gamma_m / (2.0 * params.omega_m)) ** 2
    q2 = (params.gamma_m / (4.0 * params.omega_m)) ** 2
    return omega_c * math.sqrt(1.0 - q1), omega_c / math.sqrt(1.0 - q2)


def classify_regime(params: SystemParams) -> Regime:
    """Anti-PT regime of the configured drive; boundaries count as symmetric."""
    ep1, ep2 = exceptional_points(params)
    if params.Omega < ep1:
        return Regime.ANTI_PT_BROKEN_LOWER
    if params.Omega <= ep2:
        return Regime.ANTI_PT_SYMMETRIC
    return Regime.ANTI_PT_BROKEN_UPPER


def shifted_frequency_sq(params: SystemParams) -> float:
    """Squared drive-shifted mechanical frequency
    omega_m * (omega_m + 4 g |alpha|^2 zeta_0), evaluated cancellation-free.

    Below threshold this equals omega_m^2 (1 - Omega^2/Omega_c^2), above
    threshold 4 omega_m^2 (1 - Omega_c^2/Omega^2); it vanishes exactly at
    the critical drive.
    """
    wm, g, Om = params.omega_m, params.g, params.Omega
    if g >= 0.0:
        n_photon = 4.0 * Om**2 / params.gamma_c**2
        return wm * (wm + 4.0 * g * n_photon)
    omega_c = critical_drive(params)
    if Om <= omega_c:
        u = (Om - omega_c) / omega_c
        return -(wm**2) * u * (2.0 + u)
    v = (Om - omega_c) / Om
    return 4.0 * wm**2 * v * (2.0 - v)


def _radicand(params: SystemParams) -> float:
    """omega_m (omega_m + 4 g |alpha|^2 zeta_0) - (gamma_m/2)^2.

    Piecewise factored so the roots land exactly on the computed
    exceptional points while the value at Omega = Omega_c is exactly
    -(gamma_m/2)^2; the branches are stitched halfway between each EP
    and the critical drive.
    """
    wm, gm, g, Om = params.omega_m, params.gamma_m, params.g, params.Omega
    half_sq = (0.5 * gm) ** 2
    if g >= 0.0:
        return shifted_frequency_sq(params) - half_sq
    omega_c = critical_drive(params)
    q1 = (gm / (2.0 * wm)) ** 2
    q2 = (gm / (4.0 * wm)) ** 2
    if Om <= omega_c:
        if q1 < 1.0:
            ep1 = omega_c * math.sqrt(1.0 - q1)
            if Om <= 0.5 * (ep1 + omega_c):
                return (wm / omega_c) ** 2 * (ep1 - Om) * (ep1 + Om)
        return shifted_frequency_sq(params) - half_sq
    ep2 = omega_c / math.sqrt(1.0 - q2)
    if Om >= 0.5 * (omega_c + ep2):
        return 4.0 * (wm / Om) ** 2 * (1.0 - q2) * (Om - ep2) * (Om + ep2)
    return shifted_frequency_sq(params) - half_sq


def eigenfrequencies(params: SystemParams, steady: SteadyState | None = None) -> tuple[complex, complex]:
    """Complex eigenfrequencies omega_± of the factored susceptibility.

    Branch convention: omega_+ carries the + sign of the principal root;
    for a negative radicand the root is +i sqrt(|radicand|), so in the
    anti-PT-symmetric window both eigenfrequencies are purely imaginary
    with |Im(omega_+)| <= |Im(omega_-)| and Im(omega_+) = 0 exactly at
    the critical drive.
    """
    R = _radicand(params)
    half_gm = 0.5 * params.gamma_m
    if R >= 0.0:
        s = math.sqrt(R)
        return complex(s, -half_gm), complex(-s, -half_gm)
    s = math.sqrt(-R)
    return complex(0.0, s - half_gm), complex(0.0, -(s + half_gm))


def spectral_structure(params: SystemParams) -> SpectralStructure:
    """Bundle eigenfrequencies, critical drive, EPs, and regime label."""
    ep1, ep2 = exceptional_points(params)
    w_plus, w_minus = eigenfrequencies(params)
    return SpectralStructure(
        omega_plus=w_plus,
        omega_minus=w_minus,
        omega_c_drive=critical_drive(params),
        omega_ep1=ep1,
        omega_ep2=ep2,
        regime=classify_regime(params),
    )


def backaction_factor(params: SystemParams, steady: SteadyState, omega):
    """Frequency-dependent cavity backaction factor zeta(omega).

    zeta(omega) = 1 - (4 g Q_s^2)^2 / ((gamma_c/2 - i omega)^2 + (2 g Q_s^2)^2);
    identically 1 below threshold (Q_s = 0) and equal to the static value
    at omega = 0.
    """
    g, gc = params.g, params.gamma_c
    q2 = steady.Q_s2
    omega = np.asarray(omega, dtype=float)
    D = (gc / 2.0 - 1.0j * omega) ** 2 + (2.0 * g * q2) ** 2
    if np.any(np.abs(D) < 1e-12 * (gc / 2.0) ** 2):
        raise DegeneracyError("backaction denominator numerically degenerate")
    zeta = 1.0 - (4.0 * g * q2) ** 2 / D
    return zeta if zeta.ndim else complex(zeta)


def backaction_factor_static(params: SystemParams, steady: SteadyState) -> float:
    """Static backaction factor zeta_0 = zeta(0)."""
    g, gc = params.g, params.gamma_c
    q2 = steady.Q_s2
    return 1.0 - (4.0 * g * q2) ** 2 / ((gc / 2.0) ** 2 + (2.0 * g * q2) ** 2)


def optical_noise_transfer(params: SystemParams, steady: SteadyState, omega):
    """Transfer amplitude from optical vacuum noise into the position drive.

    eta(omega) = -4 g Q_s alpha* sqrt(gamma_c)
                 / (gamma_c/2 + i (2 g Q_s^2 - omega));
    linear in the branch choice Q_s and zero below threshold.
    """
    g, gc = params.g, params.gamma_c
    omega = np.asarray(omega, dtype=float)
    eta = (
        -4.0
        * g
        * steady.Q_s
        * np.conj(steady.alpha)
        * math.sqrt(gc)
        / (gc / 2.0 + 1.0j * (2.0 * g * steady.Q_s2 - omega))
    )
    return eta if eta.ndim else complex(eta)


def susceptibility(params: SystemParams, steady: SteadyState, omega, mode: ChiMode = ChiMode.EXACT):
    """Mechanical susceptibility chi(omega); complex, vectorized over omega.

    EXACT uses the full zeta(omega); FACTORED uses the two-pole form built
    on zeta_0 (valid for |omega| << gamma_c/2).  Both modes agree exactly
    at omega = 0, where zeta(0) = zeta_0.  A vanishing denominator (the
    critical point at omega = 0) yields an infinite-magnitude value rather
    than an exception so sweeps can render the divergence.
    """
    wm, gm, g, gc = params.omega_m, params.gamma_m, params.g, params.gamma_c
    omega = np.asarray(omega, dtype=float)
    if mode is ChiMode.FACTORED:
        w_plus, w_minus = eigenfrequencies(params)
        denom = (omega - w_plus) * (omega - w_minus)
        with np.errstate(divide="ignore", invalid="ignore"):
            chi = -wm / denom
    elif mode is ChiMode.EXACT:
        w0_sq = shifted_frequency_sq(params)
        denom = w0_sq - omega**2 - 1.0j * gm * omega
        q2 = steady.Q_s2
        if q2 != 0.0:
            # 4 wm g |alpha|^2 (zeta(omega) - zeta_0), with the difference
            # of the two backaction factors taken analytically so no
            # omega_m^2-scale cancellation occurs near the critical point.
            D0 = (gc / 2.0) ** 2 + (2.0 * g * q2) ** 2
            D = (gc / 2.0 - 1.0j * omega) ** 2 + (2.0 * g * q2) ** 2
            zeta_diff = (4.0 * g * q2) ** 2 * (-(omega**2) - 1.0j * gc * omega) / (D0 * D)
            denom = denom + 4.0 * wm * g * abs(steady.alpha) ** 2 * zeta_diff
        with np.errstate(divide="ignore", invalid="ignore"):
            chi = wm / denom
    else:
        raise ValueError(f"unknown susceptibility mode: {mode!r}")
    return chi if chi.ndim else complex(chi)


def default_omega_grid(omega_m: float, n_points: int = 4001, span: float = 1.5) -> np.ndarray:
    """Default frequency grid: linear backbone plus log-dense clusters
    around 0 and +/-omega_m, over [-span, span]*omega_m.

    The cluster spacing reaches down to 1e-8*omega_m so the very narrow
    near-critical peak at omega = 0 is resolved; 0 and +/-omega_m are grid
    points.
    """
    n_cluster = max((n_points - 3) // 8, 8)
    n_lin = n_points - 6 * n_cluster - 3
    if n_lin < 2:
        raise ValueError("n_points too small for the clustered grid layout")
    centers = np.array([-omega_m, 0.0, omega_m])
    lin = np.linspace(-span * omega_m, span * omega_m, n_lin)
    offsets = np.geomspace(1e-8 * omega_m, 0.45 * omega_m, n_cluster)
    parts = [lin, centers]
    for c in centers:
        parts.append(c + offsets)
        parts.append(c - offsets)
    grid = np.unique(np.concatenate(parts))
    return grid[(grid >= -span * omega_m) & (grid <= span * omega_m)]
