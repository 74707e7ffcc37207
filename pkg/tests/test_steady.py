import math

import numpy as np
import pytest
from scipy import optimize

from qom_sense import (
    DomainError,
    critical_drive,
    effective_potential,
    fixed_point_residuals,
    params_from_experiment,
    steady_state,
)
from qom_sense.steady import drive_sweep, effective_force

TWO_PI = 2.0 * math.pi
# direct evaluation of sqrt(gamma_c_hz^2 * f_m / (16 |g_hz|)) * 2pi-consistent form:
# Omega_c/2pi = 5e9 * sqrt(8.7e6 / (16*245)) = 2.35552e11 Hz
CRITICAL_DRIVE_HZ = 5e9 * math.sqrt(8.7e6 / (16.0 * 245.0))


def test_critical_drive_reference_value(paper_params):
    assert critical_drive(paper_params) / TWO_PI == pytest.approx(CRITICAL_DRIVE_HZ, rel=1e-12)
    assert CRITICAL_DRIVE_HZ == pytest.approx(2.356e11, rel=1e-3)


def test_critical_drive_scalings(paper_params):
    wc = critical_drive(paper_params)
    doubled_gc = params_from_experiment(-245.0, 8.7e6, 1e4, 1e10)
    assert critical_drive(doubled_gc) == pytest.approx(2.0 * wc, rel=1e-14)
    quadrupled_g = params_from_experiment(-980.0, 8.7e6, 1e4, 5e9)
    assert critical_drive(quadrupled_g) == pytest.approx(wc / 2.0, rel=1e-14)


def test_critical_drive_requires_negative_g():
    p = params_from_experiment(g_hz=245.0, f_m=8.7e6, Q_m=1e4, gamma_c_hz=5e9)
    with pytest.raises(DomainError, match="negative g"):
        critical_drive(p)
    p0 = params_from_experiment(g_hz=0.0, f_m=8.7e6, Q_m=1e4, gamma_c_hz=5e9)
    with pytest.raises(DomainError):
        critical_drive(p0)


def test_undriven_steady_state(paper_params):
    st = steady_state(paper_params)
    assert st.alpha == 0.0
    assert st.Q_s2 == 0.0
    assert st.P_s == 0.0
    assert not st.above_threshold


def test_at_threshold_displacement_vanishes(paper_params):
    wc = critical_drive(paper_params)
    st = steady_state(paper_params.with_drive(wc))
    assert st.Q_s2 == 0.0
    assert not st.above_threshold


def test_empty_cavity_limit_g_zero():
    p = params_from_experiment(g_hz=0.0, f_m=8.7e6, Q_m=1e4, gamma_c_hz=5e9, Omega_hz=1e10)
    st = steady_state(p)
    assert st.Q_s2 == 0.0
    assert st.alpha == pytest.approx(-2.0j * p.Omega / p.gamma_c, rel=1e-15)


def test_above_threshold_vs_root_finding_oracle(paper_params):
    """Independent root solve of the unsimplified fixed-point system.

    The cavity equation is solved exactly for alpha(Q^2) and the remaining
    mechanical balance omega_m + 4 g |alpha(Q^2)|^2 = 0 is bracketed and
    root-found; the result is then checked against the full coupled system.
    """
    p = paper_params.with_drive(1.1 * critical_drive(paper_params))

    def intensity(u):  # |alpha|^2 from the raw cavity fixed point at Q^2 = u
        return 4.0 * p.Omega**2 / (p.gamma_c**2 + 16.0 * p.g**2 * u**2)

    def mechanical_balance(u):
        return p.omega_m + 4.0 * p.g * intensity(u)

    assert mechanical_balance(0.0) < 0.0  # symmetric point unstable above threshold
    u_hi = 1.0
    while mechanical_balance(u_hi) < 0.0:
        u_hi *= 4.0
    q_oracle_sq = optimize.brentq(mechanical_balance, 0.0, u_hi, xtol=1e-12, rtol=1e-14)

    def full_system(x):
        ar, ai, q = x
        alpha = ar + 1.0j * ai
        da = -(p.gamma_c / 2.0) * alpha - 2.0j * p.g * alpha * q * q - 1.0j * p.Omega
        dp = -p.omega_m * q - 4.0 * p.g * abs(alpha) ** 2 * q
        return [da.real / p.gamma_c, da.imag / p.gamma_c, dp / p.omega_m]

    q_guess = math.sqrt(q_oracle_sq)
    a_guess = -2.0j * p.Omega / (p.gamma_c + 4.0j * p.g * q_oracle_sq)
    sol = optimize.root(full_system, [a_guess.real, a_guess.imag, q_guess], tol=1e-13)
    assert sol.success
    assert sol.x[2] ** 2 == pytest.approx(q_oracle_sq, rel=1e-8)

    st = steady_state(p)
    assert st.Q_s2 == pytest.approx(q_oracle_sq, rel=1e-8)


def test_intensity_pinned_above_threshold(paper_params):
    wc = critical_drive(paper_params)
    for factor in np.linspace(1.01, 3.0, 25):
        st = steady_state(paper_params.with_drive(factor * wc))
        assert abs(st.alpha) ** 2 * 4.0 * abs(paper_params.g) / paper_params.omega_m == pytest.approx(1.0, abs=1e-12)


def test_fixed_point_residuals_both_branches(paper_params):
    wc = critical_drive(paper_params)
    scale = 1e-10 * max(paper_params.gamma_c, paper_params.omega_m)
    for offset in np.linspace(-2.0, 2.0, 60):
        p = paper_params.with_drive(wc + offset * paper_params.gamma_m)
        for branch in (+1, -1):
            st = steady_state(p, branch=branch)
            r_q, r_p, r_a = fixed_point_residuals(p, st)
            assert abs(r_q) == 0.0
            assert abs(r_p) < scale * max(abs(st.Q_s), 1.0)
            assert abs(r_a) < scale * max(abs(st.alpha), 1.0)


def test_branch_selection(paper_params):
    p = paper_params.with_drive(1.5 * critical_drive(paper_params))
    plus = steady_state(p, branch=+1)
    minus = steady_state(p, branch=-1)
    assert plus.Q_s > 0.0 and minus.Q_s < 0.0
    assert plus.Q_s == -minus.Q_s
    assert plus.Q_s2 == minus.Q_s2
    assert plus.alpha == minus.alpha
    with pytest.raises(ValueError):
        steady_state(p, branch=0)


def test_pitchfork_continuity_and_slope_jump(paper_params):
    """Q_s^2 is continuous at threshold with zero slope from below;
    from above it grows like sqrt(Omega - Omega_c) (quartic-degenerate
    pitchfork), i.e. with a diverging one-sided derivative."""
    wc = critical_drive(paper_params)
    gm = paper_params.gamma_m
    deltas = np.array([1e-6, 1e-8, 1e-10, 1e-14])
    qs2 = np.array([steady_state(paper_params.with_drive(wc * (1.0 + d))).Q_s2 for d in deltas])
    assert np.all(np.diff(qs2) < 0.0)  # shrinks toward 0: continuity
    assert qs2[-1] < 1e-3 * qs2[0]
    # square-root onset: Q_s2 / sqrt(delta) is asymptotically constant
    scaled = qs2 / np.sqrt(deltas)
    assert scaled[1] == pytest.approx(scaled[2], rel=1e-6)
    # slope: exactly zero from below, positive (and steep) from above
    h = 1e-3 * gm
    assert steady_state(paper_params.with_drive(wc - h)).Q_s2 == 0.0
    above = steady_state(paper_params.with_drive(wc + h)).Q_s2
    assert above > 0.0
    assert above / h > 1.0  # far steeper than the zero slope from below
    # growth continues monotonically above threshold
    sweep = drive_sweep(paper_params, wc + np.linspace(0.0, 2.0, 40) * gm)
    assert np.all(np.diff(sweep["q_s2"]) >= 0.0)


def test_effective_potential_harmonic_limit(paper_params):
    q = np.linspace(-3.0, 3.0, 7)
    V = effective_potential(paper_params.with_drive(0.0), q)
    assert V == pytest.approx(0.5 * paper_params.omega_m * q**2, rel=1e-14)


def test_effective_potential_well_structure(paper_params):
    wc = critical_drive(paper_params)
    q = np.linspace(-0.5, 0.5, 101)
    below = effective_potential(paper_params.with_drive(0.8 * wc), q)
    assert np.argmin(below) == 50  # single minimum at Q = 0
    p_above = paper_params.with_drive(1.2 * wc)
    st = steady_state(p_above)
    V0 = effective_potential(p_above, 0.0)
    V_min = effective_potential(p_above, math.sqrt(st.Q_s2))
    assert V_min < V0  # double well
    q_wide = np.linspace(-2.0, 2.0, 9) * math.sqrt(st.Q_s2)
    V_wide = effective_potential(p_above, q_wide)
    assert V_wide == pytest.approx(V_wide[::-1], rel=1e-12)  # even in Q


def test_effective_potential_stationary_points(paper_params):
    p = paper_params.with_drive(1.2 * critical_drive(paper_params))
    st = steady_state(p)
    for q_star in (0.0, math.sqrt(st.Q_s2), -math.sqrt(st.Q_s2)):
        assert abs(effective_force(p, q_star)) < 1e-8 * p.omega_m * max(abs(q_star), 1.0)


def test_effective_potential_gradient_matches_force(paper_params):
    """Central difference of V against the adiabatically eliminated force."""
    p = paper_params.with_drive(1.2 * critical_drive(paper_params))
    st = steady_state(p)
    q = 1.3 * math.sqrt(st.Q_s2)
    h = 1e-6 * q
    dV = (effective_potential(p, q + h) - effective_potential(p, q - h)) / (2.0 * h)
    assert dV == pytest.approx(-effective_force(p, q), rel=1e-8)


def test_drive_sweep_columns(paper_params):
    wc = critical_drive(paper_params)
    cols = drive_sweep(paper_params, [0.5 * wc, 1.5 * wc])
    assert list(cols) == ["omega_drive_rad_s", "omega_minus_omega_c_over_gamma_m", "q_s2", "above_threshold"]
    assert cols["above_threshold"].tolist() == [0, 1]
