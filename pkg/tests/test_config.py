import math

import pytest
from hypothesis import given, strategies as st

from slap.config import parse_config, parse_quantity
from slap.errors import ConfigError

BASE = """
[scenario]
name = nestar   # trailing comment

[pulses]
omega_tw0 = 2pi*1.6e7 Hz
sigma = 100 ns
wavelength = 616.4 nm
R = 400
"""


@pytest.mark.parametrize("text,kind,value", [
    ("2pi*1.6e7 Hz", "rate", 2 * math.pi * 1.6e7),
    ("2 pi * 5.41 MHz", "rate", 2 * math.pi * 5.41e6),
    ("1e8 rad/s", "rate", 1e8),
    ("3", "rate", 3.0),
    ("100 ns", "time", 1e-7),
    ("8 us", "time", 8e-6),
    ("616.4 nm", "length", 616.4e-9),
    ("55 angstrom", "length", 5.5e-9),
    ("5 cm/s", "velocity", 0.05),
    ("16.6 eV", "energy", 16.6),
])
def test_quantities(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value, rel=1e-12)


def test_wrong_unit_kind():
    with pytest.raises(ValueError):
        parse_quantity("5 ns", "length")


def test_parse_and_normalize():
    cfg = parse_config(BASE)
    assert cfg.name == "nestar"
    assert cfg.get("pulses", "omega_tw0") == pytest.approx(2 * math.pi * 1.6e7)
    assert cfg.get("pulses", "sigma") == pytest.approx(1e-7)
    assert cfg.has("pulses", "R") and not cfg.has("geometry")


def test_round_trip():
    cfg = parse_config(BASE)
    again = parse_config(cfg.to_text())
    assert again.sections == cfg.sections


@given(st.floats(1e-12, 1e12), st.lists(st.floats(0.01, 100), min_size=1, max_size=5))
def test_round_trip_property(v, values):
    text = f"[scenario]\nname = x\n[pulses]\nomega_tw0 = {v!r}\n[sweep]\nomega_tw0_values = " \
           + ", ".join(repr(u) for u in values)
    cfg = parse_config(text)
    assert parse_config(cfg.to_text()).sections == cfg.sections


@pytest.mark.parametrize("text,fragment", [
    (BASE + "bogus = 1\n", "unknown key 'bogus'"),
    (BASE + "[nonsense]\n", "unknown section"),
    (BASE + "R = 2\n", "duplicate key"),
    (BASE + "sigma_tw = 5 m\n", "sigma_tw"),
    ("[pulses]\nR = 1\n", "missing [scenario] name"),
    ("R = 1\n", "outside any section"),
    (BASE + "[grid]\npoints_per_period = many\n", "points_per_period"),
])
def test_errors(text, fragment):
    with pytest.raises(ConfigError, match=None) as info:
        parse_config(text, "t.cfg")
    assert fragment in str(info.value)
    assert "t.cfg" in str(info.value)


def test_line_numbers():
    with pytest.raises(ConfigError, match=r"t.cfg:10:"):
        parse_config(BASE + "bogus = 1\n", "t.cfg")
