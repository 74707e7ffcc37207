import dataclasses
import json
import math

import pytest
from hypothesis import given, strategies as st

from qom_sense import (
    CONSTANTS,
    ParameterError,
    SidebandResolutionWarning,
    SystemParams,
    load_params_file,
    params_from_experiment,
)

TWO_PI = 2.0 * math.pi


def test_constants_are_codata_values():
    assert CONSTANTS.hbar == 1.054571817e-34
    assert CONSTANTS.k_B == 1.380649e-23


def test_constants_immutable():
    with pytest.raises(dataclasses.FrozenInstanceError):
        CONSTANTS.hbar = 1.0


def test_paper_parameter_conversion(paper_params):
    assert paper_params.omega_m == TWO_PI * 8.7e6
    assert paper_params.gamma_m == pytest.approx(TWO_PI * 870.0, rel=1e-14)
    assert paper_params.g == TWO_PI * -245.0
    assert paper_params.gamma_c == TWO_PI * 5e9
    assert paper_params.T == 300.0


def test_unit_quality_factor_gives_gamma_m_equal_omega_m():
    p = params_from_experiment(g_hz=-1.0, f_m=1e6, Q_m=1.0, gamma_c_hz=1e9)
    assert p.gamma_m == p.omega_m


def test_doubling_hz_inputs_doubles_all_rates():
    p1 = params_from_experiment(g_hz=-245.0, f_m=8.7e6, Q_m=1e4, gamma_c_hz=5e9, Omega_hz=1e10, T=300.0)
    p2 = params_from_experiment(g_hz=-490.0, f_m=17.4e6, Q_m=1e4, gamma_c_hz=1e10, Omega_hz=2e10, T=300.0)
    for name in ("g", "omega_m", "gamma_m", "gamma_c", "Omega"):
        assert getattr(p2, name) == pytest.approx(2.0 * getattr(p1, name), rel=1e-15)
    assert p2.T == p1.T


@given(
    g_hz=st.floats(-1e6, -1e-3),
    f_m=st.floats(1e3, 1e9),
    q_m=st.floats(1.0, 1e8),
    gamma_c_hz=st.floats(1e4, 1e12),
    omega_hz=st.floats(0.0, 1e13),
)
def test_roundtrip_to_experiment(g_hz, f_m, q_m, gamma_c_hz, omega_hz):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SidebandResolutionWarning)
        p = params_from_experiment(g_hz, f_m, q_m, gamma_c_hz, omega_hz, T=4.2)
    exp = p.to_experiment()
    for key, value in (("g_hz", g_hz), ("f_m_hz", f_m), ("q_m", q_m),
                       ("gamma_c_hz", gamma_c_hz), ("omega_hz", omega_hz)):
        assert exp[key] == pytest.approx(value, rel=1e-12)
    assert p.gamma_m * q_m == pytest.approx(p.omega_m, rel=1e-12)


@pytest.mark.parametrize("field,kwargs", [
    ("f_m", dict(g_hz=-1.0, f_m=0.0, Q_m=10.0, gamma_c_hz=1e9)),
    ("Q_m", dict(g_hz=-1.0, f_m=1e6, Q_m=-3.0, gamma_c_hz=1e9)),
    ("gamma_c_hz", dict(g_hz=-1.0, f_m=1e6, Q_m=10.0, gamma_c_hz=0.0)),
])
def test_validation_errors_name_the_field(field, kwargs):
    with pytest.raises(ParameterError, match=field):
        params_from_experiment(**kwargs)


def test_direct_params_validation():
    with pytest.raises(ParameterError, match="omega_m"):
        SystemParams(g=-1.0, omega_m=-1.0, gamma_m=1.0, gamma_c=1e3, Omega=0.0, T=1.0)
    with pytest.raises(ParameterError, match="Omega"):
        SystemParams(g=-1.0, omega_m=1e3, gamma_m=1.0, gamma_c=1e6, Omega=-1.0, T=1.0)
    with pytest.raises(ParameterError, match="T"):
        SystemParams(g=-1.0, omega_m=1e3, gamma_m=1.0, gamma_c=1e6, Omega=0.0, T=-0.1)


def test_sideband_warning_when_cavity_too_slow():
    with pytest.warns(SidebandResolutionWarning):
        params_from_experiment(g_hz=-1.0, f_m=1e6, Q_m=100.0, gamma_c_hz=2e6)


def test_no_warning_in_unresolved_regime(recwarn):
    params_from_experiment(g_hz=-1.0, f_m=1e6, Q_m=100.0, gamma_c_hz=1e8)
    assert not any(isinstance(w.message, SidebandResolutionWarning) for w in recwarn.list)


def _write_config(path, mapping, fmt):
    if fmt == "json":
        path.write_text(json.dumps(mapping))
    else:
        path.write_text("\n".join(f"{k} = {v}" for k, v in mapping.items()))


VALID = {"g_hz": -245.0, "f_m_hz": 8.7e6, "q_m": 1e4, "gamma_c_hz": 5e9,
         "omega_hz": 0.0, "temperature_k": 300.0}


@pytest.mark.parametrize("fmt", ["toml", "json"])
def test_load_params_file(tmp_path, fmt, paper_params):
    path = tmp_path / f"params.{fmt}"
    _write_config(path, VALID, fmt)
    p = load_params_file(path)
    assert p == paper_params


def test_load_rejects_unknown_keys(tmp_path):
    path = tmp_path / "params.json"
    _write_config(path, {**VALID, "detuning_hz": 1.0}, "json")
    with pytest.raises(ParameterError, match="detuning_hz"):
        load_params_file(path)


def test_load_rejects_missing_keys(tmp_path):
    path = tmp_path / "params.json"
    mapping = dict(VALID)
    del mapping["q_m"]
    _write_config(path, mapping, "json")
    with pytest.raises(ParameterError, match="q_m"):
        load_params_file(path)


def test_load_rejects_unsupported_suffix(tmp_path):
    path = tmp_path / "params.yaml"
    path.write_text("g_hz: -245")
    with pytest.raises(ParameterError, match="yaml"):
        load_params_file(path)


def test_with_drive_returns_new_immutable_copy(paper_params):
    p2 = paper_params.with_drive(1.0e12)
    assert p2.Omega == 1.0e12
    assert paper_params.Omega == 0.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        p2.Omega = 0.0
