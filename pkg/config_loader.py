"""Configuration loading for mass spectrum runs.

Keys use the usual quadrature parameter identifiers, so a listing
can be pasted into a YAML file as ``Name: value`` lines.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import yaml

from amplitudes import (
    ALPHA_W,
    ELECTRON_MASS,
    ELECTRON_MASS_PRECISE,
    FINE_STRUCTURE,
    MUON_MASS,
    TINY,
    ProcessKind,
    ProcessSpec,
)
from covariance import RngSeed
from errors import ConfigError
from spectrum import QuadratureConfig

THREADS_ENV = "MSPEC_THREADS"

ALIASES = {
    "N_m": "N_m_prime",
    "N_int": "N_integral",
    "Lambda_int": "Lambda_integral",
}

FLOAT_KEYS = frozenset(
    {
        "alpha",
        "m",
        "m_e",
        "m_mu",
        "alpha_W",
        "Start",
        "End",
        "Lambda_integral",
        "Tiny",
        "min_prominence",
    }
)
INT_KEYS = frozenset({"N_integral", "N_int_angle", "N_m_prime", "threads", "seed", "trials"})
OTHER_KEYS = frozenset({"process", "output_path", "reference_mass", "high_energy_limit"})
KNOWN_KEYS = FLOAT_KEYS | INT_KEYS | OTHER_KEYS | frozenset(ALIASES)

# Muon listing; tau and Z listings live in configs/.
DEFAULTS: dict[str, Any] = {
    "process": ProcessKind.QED_LEPTON.value,
    "alpha": FINE_STRUCTURE,
    "m": ELECTRON_MASS,
    "m_e": ELECTRON_MASS_PRECISE,
    "m_mu": MUON_MASS,
    "alpha_W": ALPHA_W,
    "Tiny": TINY,
    "Start": 0.0,
    "End": 300.0,
    "Lambda_integral": 200.0,
    "N_integral": 5,
    "N_int_angle": 5,
    "N_m_prime": 16,
    "output_path": "spectrum.csv",
    "reference_mass": None,
    "threads": 0,
    "seed": 42,
    "trials": 1000,
    "min_prominence": 0.0,
    "high_energy_limit": False,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration."""

    process: ProcessKind
    alpha: float
    m: float
    m_e: float
    m_mu: float
    alpha_w: float
    tiny: float
    quadrature: QuadratureConfig
    output_path: Path
    reference_mass: float | None = None
    threads: int = 0
    seed: int = 42
    trials: int = 1000
    min_prominence: float = 0.0
    high_energy_limit: bool = False

    def process_spec(self, process: ProcessKind | None = None) -> ProcessSpec:
        selected = process or self.process
        if selected is ProcessKind.QED_LEPTON:
            return ProcessSpec.qed_lepton(self.m, self.alpha, high_energy=self.high_energy_limit)
        return ProcessSpec.z_boson(self.m_e, self.m_mu, self.alpha_w, pole_guard=self.tiny)

    def worker_count(self) -> int:
        return self.threads or os.cpu_count() or 1


def _parse_number(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            # accepts the listings' "1.0/137.036"
            if text.count("/") == 1:
                numerator, denominator = text.split("/")
                return float(numerator) / float(denominator)
            return float(text)
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"'{key}' must be a number, got {value!r}")


def _parse_int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().isdigit():
        return int(value.strip())
    raise ConfigError(f"'{key}' must be an integer, got {value!r}")


def _canonical(raw: Mapping[str, Any]) -> dict[str, Any]:
    unknown = sorted(str(key) for key in raw if key not in KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

    merged: dict[str, Any] = {}
    for key, value in raw.items():
        name = ALIASES.get(key, key)
        if name in merged and merged[name] != value:
            raise ConfigError(f"'{key}' conflicts with another spelling of '{name}'")
        merged[name] = value
    return merged


def parse_config(raw: Mapping[str, Any], base_dir: Path) -> RunConfig:
    """Validate a raw key/value mapping; relative paths resolve against ``base_dir``."""
    values = {**DEFAULTS, **_canonical(raw)}

    numbers = {key: _parse_number(key, values[key]) for key in FLOAT_KEYS}
    integers = {key: _parse_int(key, values[key]) for key in INT_KEYS}

    try:
        process = ProcessKind(values["process"])
    except ValueError as exc:
        choices = ", ".join(kind.value for kind in ProcessKind)
        raise ConfigError(f"'process' must be one of {choices}, got {values['process']!r}") from exc

    for key in ("alpha", "m", "m_e", "m_mu", "alpha_W", "Tiny"):
        if numbers[key] <= 0.0:
            raise ConfigError(f"'{key}' must be positive, got {numbers[key]}")
    if numbers["min_prominence"] < 0.0:
        raise ConfigError(f"'min_prominence' must be >= 0, got {numbers['min_prominence']}")
    if integers["threads"] < 0:
        raise ConfigError(f"'threads' must be >= 0, got {integers['threads']}")
    if integers["trials"] < 1:
        raise ConfigError(f"'trials' must be >= 1, got {integers['trials']}")
    RngSeed(integers["seed"])

    reference_raw = values["reference_mass"]
    reference_mass = None if reference_raw is None else _parse_number("reference_mass", reference_raw)
    if reference_mass is not None and reference_mass <= 0.0:
        raise ConfigError(f"'reference_mass' must be positive, got {reference_mass}")

    high_energy = values["high_energy_limit"]
    if not isinstance(high_energy, bool):
        raise ConfigError(f"'high_energy_limit' must be true or false, got {high_energy!r}")
    if high_energy and process is not ProcessKind.QED_LEPTON:
        raise ConfigError("'high_energy_limit' applies only to the qed-lepton process")

    output_raw = values["output_path"]
    if not isinstance(output_raw, str) or not output_raw.strip():
        raise ConfigError("'output_path' must be a non-empty string")
    output_path = Path(output_raw)
    if not output_path.is_absolute():
        output_path = (base_dir / output_path).resolve()

    quadrature = QuadratureConfig(
        lambda_integral=numbers["Lambda_integral"],
        n_integral=integers["N_integral"],
        n_int_angle=integers["N_int_angle"],
        start=numbers["Start"],
        end=numbers["End"],
        n_m_prime=integers["N_m_prime"],
    )

    return RunConfig(
        process=process,
        alpha=numbers["alpha"],
        m=numbers["m"],
        m_e=numbers["m_e"],
        m_mu=numbers["m_mu"],
        alpha_w=numbers["alpha_W"],
        tiny=numbers["Tiny"],
        quadrature=quadrature,
        output_path=output_path,
        reference_mass=reference_mass,
        threads=integers["threads"],
        seed=integers["seed"],
        trials=integers["trials"],
        min_prominence=numbers["min_prominence"],
        high_energy_limit=high_energy,
    )


def read_raw_config(config_path: Path) -> dict[str, Any]:
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with config_path.open("r", encoding="utf-8") as file:
        raw = yaml.safe_load(file) or {}

    if not isinstance(raw, dict):
        raise ConfigError(f"{config_path} must contain a mapping of parameters")
    return raw


def load_config(config_path: Path) -> RunConfig:
    """Load and validate a run configuration from a YAML file."""
    return parse_config(read_raw_config(config_path), config_path.parent)


def apply_overrides(raw: Mapping[str, Any], assignments: Iterable[str]) -> dict[str, Any]:
    """Merge ``key=value`` overrides; values are read as YAML scalars."""
    merged = dict(raw)
    for assignment in assignments:
        key, separator, text = assignment.partition("=")
        key = key.strip()
        if not separator or not key:
            raise ConfigError(f"Override must look like key=value, got {assignment!r}")
        try:
            value = yaml.safe_load(text) if text.strip() else None
        except yaml.YAMLError as exc:
            raise ConfigError(f"Cannot parse override value for '{key}': {text!r}") from exc
        # an override replaces the key and any alias spelling of it
        canonical = ALIASES.get(key, key)
        for name in [name for name in merged if ALIASES.get(name, name) == canonical]:
            del merged[name]
        merged[key] = value
    return merged


def threads_from_env(default: int = 0) -> int:
    value = os.environ.get(THREADS_ENV)
    if value is None or not value.strip():
        return default
    return _parse_int(THREADS_ENV, value)
