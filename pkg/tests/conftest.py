import pytest

from qom_sense import params_from_experiment


@pytest.fixture(scope="session")
def paper_params():
    """Reference parameter set used throughout: the membrane-in-the-middle
    style experiment values all headline numbers are quoted for."""
    return params_from_experiment(g_hz=-245.0, f_m=8.7e6, Q_m=1e4,
                                  gamma_c_hz=5e9, Omega_hz=0.0, T=300.0)
