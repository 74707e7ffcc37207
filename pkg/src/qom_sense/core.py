"""Parameter representation, unit conventions, and validation.

All internal math is carried out in SI angular frequency (rad/s).
User-facing I/O is in Hz; the 2*pi conversion happens exactly once, at
the boundary (`params_from_experiment` / `to_experiment`).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

TWO_PI = 2.0 * math.pi

#: Config-file keys accepted by `load_params_file` (flat, user units).
PARAM_FILE_KEYS = ("g_hz", "f_m_hz", "q_m", "gamma_c_hz", "omega_hz", "temperature_k")


class ParameterError(ValueError):
    """Invalid physical parameter; the message names the offending field."""


class DomainError(ValueError):
    """Operation called outside its physical domain of validity."""


class RegimeError(DomainError):
    """Operation called in the wrong anti-PT regime."""


class DegeneracyError(ArithmeticError):
    """Numerically degenerate evaluation point (e.g. exactly at the critical point)."""


class SidebandResolutionWarning(UserWarning):
    """gamma_c < 10*omega_m: the static cavity-backaction approximation degrades."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used throughout; immutable."""

    hbar: float = 1.054571817e-34  # J*s
    k_B: float = 1.380649e-23  # J/K


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven quadratic optomechanical system.

    All rates are angular frequencies in rad/s.

    Attributes
    ----------
    g : float
        Quadratic optomechanical coupling (signed; the symmetry-breaking
        analysis requires g < 0).
    omega_m : float
        Mechanical resonance frequency (> 0).
    gamma_m : float
        Mechanical damping rate (> 0).
    gamma_c : float
        Optical (cavity) damping rate (> 0).
    Omega : float
        Drive coupling strength (>= 0).
    T : float
        Bath temperature in kelvin (>= 0).
    """

    g: float
    omega_m: float
    gamma_m: float
    gamma_c: float
    Omega: float
    T: float

    def __post_init__(self):
        for name in ("omega_m", "gamma_m", "gamma_c"):
            value = getattr(self, name)
            if not (value > 0.0) or not math.isfinite(value):
                raise ParameterError(f"{name} must be strictly positive, got {value!r}")
        if not (self.Omega >= 0.0) or not math.isfinite(self.Omega):
            raise ParameterError(f"Omega must be >= 0, got {self.Omega!r}")
        if not (self.T >= 0.0) or not math.isfinite(self.T):
            raise ParameterError(f"T must be >= 0, got {self.T!r}")
        if not math.isfinite(self.g):
            raise ParameterError(f"g must be finite, got {self.g!r}")
        if self.gamma_c < 10.0 * self.omega_m:
            warnings.warn(
                "gamma_c < 10*omega_m: outside the sideband-unresolved regime, "
                "the static backaction factor is a poor approximation",
                SidebandResolutionWarning,
                stacklevel=2,
            )

    def with_drive(self, Omega: float) -> "SystemParams":
        """Copy of the parameters with a different drive strength."""
        return replace(self, Omega=Omega)

    def with_temperature(self, T: float) -> "SystemParams":
        """Copy of the parameters with a different bath temperature."""
        return replace(self, T=T)

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.gamma_m

    def to_experiment(self) -> dict:
        """Back-convert to the user-facing Hz/K representation."""
        return {
            "g_hz": self.g / TWO_PI,
            "f_m_hz": self.omega_m / TWO_PI,
            "q_m": self.omega_m / self.gamma_m,
            "gamma_c_hz": self.gamma_c / TWO_PI,
            "omega_hz": self.Omega / TWO_PI,
            "temperature_k": self.T,
        }


def params_from_experiment(
    g_hz: float,
    f_m: float,
    Q_m: float,
    gamma_c_hz: float,
    Omega_hz: float = 0.0,
    T: float = 300.0,
) -> SystemParams:
    """Build `SystemParams` from laboratory-convention inputs.

    Every frequency-like input is in plain Hz and converted by 2*pi;
    the mechanical damping is derived as gamma_m = omega_m / Q_m.
    """
    if not (f_m > 0.0):
        raise ParameterError(f"f_m must be strictly positive, got {f_m!r}")
    if not (Q_m > 0.0):
        raise ParameterError(f"Q_m must be strictly positive, got {Q_m!r}")
    if not (gamma_c_hz > 0.0):
        raise ParameterError(f"gamma_c_hz must be strictly positive, got {gamma_c_hz!r}")
    omega_m = TWO_PI * f_m
    return SystemParams(
        g=TWO_PI * g_hz,
        omega_m=omega_m,
        gamma_m=omega_m / Q_m,
        gamma_c=TWO_PI * gamma_c_hz,
        Omega=TWO_PI * Omega_hz,
        T=T,
    )


def load_params_file(path) -> SystemParams:
    """Load parameters from a flat TOML or JSON file.

    Recognized keys: g_hz, f_m_hz, q_m, gamma_c_hz, omega_hz, temperature_k.
    Unknown keys are rejected.
    """
    raw = _read_flat_config(Path(path))
    return params_from_mapping(raw)


def params_from_mapping(raw: dict) -> SystemParams:
    unknown = sorted(set(raw) - set(PARAM_FILE_KEYS))
    if unknown:
        raise ParameterError(f"unknown parameter keys: {', '.join(unknown)}")
    missing = sorted(set(PARAM_FILE_KEYS) - set(raw))
    if missing:
        raise ParameterError(f"missing parameter keys: {', '.join(missing)}")
    values = {}
    for key in PARAM_FILE_KEYS:
        try:
            values[key] = float(raw[key])
        except (TypeError, ValueError):
            raise ParameterError(f"{key} must be a number, got {raw[key]!r}") from None
    return params_from_experiment(
        g_hz=values["g_hz"],
        f_m=values["f_m_hz"],
        Q_m=values["q_m"],
        gamma_c_hz=values["gamma_c_hz"],
        Omega_hz=values["omega_hz"],
        T=values["temperature_k"],
    )


def _read_flat_config(path: Path) -> dict:
    if not path.exists():
        raise ParameterError(f"parameter file not found: {path}")
    suffix = path.suffix.lower()
    if suffix == ".json":
        with open(path, "rb") as fh:
            raw = json.load(fh)
    elif suffix == ".toml":
        try:
            import tomllib as toml_reader  # py >= 3.11
        except ModuleNotFoundError:
            import tomli as toml_reader
        with open(path, "rb") as fh:
            raw = toml_reader.load(fh)
    else:
        raise ParameterError(f"unsupported parameter file type: {path.suffix!r} (use .toml or .json)")
    if not isinstance(raw, dict):
        raise ParameterError("parameter file must contain a flat key/value table")
    return raw
