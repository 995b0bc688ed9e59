"""Scenario configuration files.

A config is flat, sectioned ``key = value`` text.  ``#`` and ``;`` start
comments.  Quantities take an optional unit suffix and frequencies may be
written in the ``2pi*X Hz`` form used in figure captions::

    [scenario]
    name = nestar

    [pulses]
    omega_tw0 = 2pi*1.6e7 Hz
    sigma_tw = 100 ns

Hz, kHz, MHz, GHz, 1/s and rad/s are all angular rates (s^-1); ``2pi*``
is a literal factor.  A bare number is taken to be in SI base units (or in
whatever natural units the whole file uses).  Everything is normalized to
SI when parsed, and :meth:`ScenarioConfig.to_text` writes the normalized
values back without units.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path


from .errors import ConfigError

UNITS = {
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9,
               "angstrom": 1e-10, "aa": 1e-10},
    "rate": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "1/s": 1.0, "s^-1": 1.0,
             "rad/s": 1.0},
    "velocity": {"m/s": 1.0, "cm/s": 1e-2, "mm/s": 1e-3},
    "energy": {"ev": 1.0},
    "mass": {"kg": 1.0, "u": 1.66053906660e-27},
    "wavenumber": {"1/m": 1.0, "rad/m": 1.0, "1/um": 1e6, "1/nm": 1e9},
}

# section -> key -> kind; kind is a UNITS dimension or int/float/bool/list/str
SCHEMA = {
    "scenario": {"name": "str", "description": "str"},
    "pulses": {
        "omega_tw0": "rate", "omega_sw0": "rate", "R": "float",
        "sigma_tw": "time", "sigma_sw": "time", "sigma": "time",
        "t_tw": "time", "t_sw": "time", "delta_tw": "rate", "delta_sw": "rate",
        "wavelength": "length", "period": "length", "k_sw": "wavenumber",
    },
    "geometry": {"v_z": "velocity", "d": "length", "dv_x": "velocity"},
    "scheme": {"gamma": "rate", "gamma_a": "rate", "gamma_b": "rate", "loss_b": "rate"},
    "grid": {"node": "int", "periods": "float", "points_per_period": "int"},
    "sweep": {"omega_tw0_values": "list"},
    "analysis": {"A": "float", "rn_margin": "float", "dx_slap": "length"},
    "solver": {"rtol": "float"},
    "nestar": {
        "lambda_tw": "length", "lambda_sw": "length",
        "A_3P0": "rate", "A_3P1": "rate", "A_3P2": "rate", "A_1P1": "rate",
        "ground_decay": "rate", "tau_3P2": "time",
        "energy_3P0": "energy", "energy_3P1": "energy", "energy_3p": "energy",
        "energy_3P2": "energy", "depump": "bool", "use_nist_defaults": "bool",
    },
    "gpe": {
        "mass": "mass", "n_atoms": "float", "a_mean": "length", "a_ratios": "list",
        "omega_x": "rate", "omega_t": "rate", "gamma": "rate", "n_points": "int",
        "extent": "length", "dt": "time", "t_start": "time", "t_end": "time",
        "sample_every": "time", "window_factor": "float", "switch_off_fraction": "float",
    },
    "outputs": {"binary_snapshots": "bool", "snapshot_stride": "int"},
}

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QUANTITY = re.compile(
    rf"^\s*(?P<twopi>2\s*\*?\s*pi\s*\*?\s*)?(?P<num>{_NUMBER})\s*(?P<unit>[^\s].*?)?\s*$",
    re.IGNORECASE,
)


def parse_quantity(text: str, kind: str) -> float:
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse quantity {text!r}")
    value = float(m.group("num"))
    if m.group("twopi"):
        value *= 2 * math.pi
    unit = m.group("unit")
    if unit:
        table = UNITS.get(kind, {})
        key = unit.strip()
        factor = table.get(key, table.get(key.lower()))
        if factor is None:
            raise ValueError(f"unit {unit!r} is not valid for a {kind} quantity")
        value *= factor
    return value


def _convert(text: str, kind: str):
    if kind == "str":
        return text
    if kind == "int":
        return int(text)
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if kind == "float":
        return parse_quantity(text, kind)
    if kind == "list":
        return [parse_quantity(v, "rate") for v in text.split(",") if v.strip()]
    return parse_quantity(text, kind)


@dataclass
class ScenarioConfig:
    name: str
    sections: dict = field(default_factory=dict)
    source: str = ""

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        value = self.get(section, key)
        if value is None:
            raise ConfigError(f"{self.source}: missing required field [{section}] {key}")
        return value

    def has(self, section: str, key: str = None) -> bool:
        if key is None:
            return section in self.sections
        return key in self.sections.get(section, {})

    def to_text(self) -> str:
        """Normalized (unit-free SI) serialization; parses back to the same values."""
        lines = []
        for sec, items in self.sections.items():
            lines.append(f"[{sec}]")
            for key, value in items.items():
                if isinstance(value, bool):
                    text = "true" if value else "false"
                elif isinstance(value, list):
                    text = ", ".join(repr(float(v)) for v in value)
                elif isinstance(value, float):
                    text = repr(value)
                else:
                    text = str(value)
                lines.append(f"{key} = {text}")
            lines.append("")
        return "\n".join(lines)

    def snapshot(self) -> dict:
        return {sec: dict(items) for sec, items in self.sections.items()}


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = re.split(r"\s[#;]|^[#;]", raw, maxsplit=1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{where}: malformed section header {raw.strip()!r}")
            current = line[1:-1].strip()
            if current not in SCHEMA:
                raise ConfigError(f"{where}: unknown section [{current}]")
            if current in sections:
                raise ConfigError(f"{where}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if current is None:
            raise ConfigError(f"{where}: key outside any section")
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        kind = SCHEMA[current].get(key)
        if kind is None:
            raise ConfigError(f"{where}: unknown key {key!r} in [{current}]")
        if key in sections[current]:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        try:
            sections[current][key] = _convert(value, kind)
        except ValueError as exc:
            raise ConfigError(f"{where}: [{current}] {key}: {exc}") from None
    name = sections.get("scenario", {}).get("name")
    if not name:
        raise ConfigError(f"{source}: missing [scenario] name")
    return ScenarioConfig(name=name, sections=sections, source=source)


def load_config(path) -> ScenarioConfig:
    """Read and parse a config file; unreadable files raise OSError."""
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))
