import json

import numpy as np
import pytest

from slap.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_PHYSICS, main, read_snapshots, write_snapshots

SWEEP = """
[scenario]
name = fig2-sweep
[pulses]
omega_tw0 = 1.0
R = 100
sigma = 5
t_sw = 10
wavelength = 1
[scheme]
gamma = 1
[grid]
points_per_period = 61
[sweep]
omega_tw0_values = 0.5, 1.0
[solver]
rtol = 1e-6
"""

NESTAR = """
[scenario]
name = nestar
[geometry]
v_z = 500 m/s
d = 100 um
[grid]
points_per_period = 41
[solver]
rtol = 1e-6
"""

BEC = """
[scenario]
name = bec-patterning
[pulses]
omega_tw0 = 2pi*1e7 Hz
R = 100
sigma = 8 us
t_tw = 22 us
t_sw = 36 us
period = 15 um
[gpe]
n_points = 512
dt = 0.15 ns
t_start = 30 us
t_end = 30.3 us
sample_every = 0.1 us
[outputs]
binary_snapshots = {binary}
"""


def write(tmp_path, text, name="c.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("fig2-sweep", "cpt-vs-slap", "nestar", "bec-patterning"):
        assert name in out


def test_analyze_sweep(tmp_path, capsys):
    assert main(["analyze", "--json", write(tmp_path, SWEEP)]) == EXIT_OK
    s = json.loads(capsys.readouterr().out)
    assert s["superlocalized"] is True
    assert s["fwhm_cpt"] == pytest.approx(0.0318, abs=1e-4)
    assert s["threshold"] == pytest.approx(4.472, abs=1e-3)


def test_analyze_nestar_defaults(tmp_path, capsys):
    assert main(["analyze", "--json", write(tmp_path, NESTAR)]) == EXIT_OK
    s = json.loads(capsys.readouterr().out)
    assert s["T"] == pytest.approx(200e-9)
    assert s["T_omega_tw0"] == pytest.approx(20.1, abs=0.05)
    assert s["superlocalized"] is True
    assert s["fwhm_slap"] is None


def test_analyze_cpt_mode(tmp_path, capsys):
    text = SWEEP.replace("t_sw = 10", "") + "[geometry]\nv_z = 500\nd = 0\n"
    assert main(["analyze", write(tmp_path, text)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "cpt" in out and "SLAP prediction suppressed" in out


def test_run_sweep(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, SWEEP), "-o", str(out), "--threads", "2"]) == EXIT_OK
    for f in ("sweep.csv", "profile_slap.csv", "profile_cpt.csv", "summary.json", "config.cfg"):
        assert (out / f).exists()
    s = json.loads((out / "summary.json").read_text())
    assert s["config"]["pulses"]["R"] == 100
    assert s["solver"] == {"rtol": 1e-6, "threads": 2}
    assert len(s["results"]["sweep"]) == 2
    assert (out / "sweep.csv").read_text().count("\n") == 3


def test_run_is_deterministic(tmp_path):
    cfg = write(tmp_path, SWEEP)
    for d in ("a", "b"):
        assert main(["run", cfg, "-o", str(tmp_path / d)]) == EXIT_OK
    for f in ("sweep.csv", "profile_slap.csv", "profile_cpt.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_threads_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SLAP_THREADS", "3")
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, SWEEP), "-o", str(out)]) == EXIT_OK
    assert json.loads((out / "summary.json").read_text())["solver"]["threads"] == 3
    monkeypatch.setenv("SLAP_THREADS", "zero")
    assert main(["run", write(tmp_path, SWEEP), "-o", str(out)]) == EXIT_CONFIG


def test_run_nestar(tmp_path):
    out = tmp_path / "n"
    assert main(["run", write(tmp_path, NESTAR), "-o", str(out)]) == EXIT_OK
    r = json.loads((out / "summary.json").read_text())["results"]
    assert r["contrast_depumped"] > r["contrast"]
    for f in ("populations.csv", "energy.csv", "energy_depumped.csv"):
        assert (out / f).exists()


@pytest.mark.parametrize("binary", ["false", "true"])
def test_run_bec(tmp_path, binary):
    out = tmp_path / "b"
    assert main(["run", write(tmp_path, BEC.format(binary=binary)), "-o", str(out)]) == EXIT_OK
    header = (out / "observables.csv").read_text().splitlines()[0]
    assert header == "t,fwhm_a,norm_a,norm_b,norm_c,m2_a"
    r = json.loads((out / "summary.json").read_text())["results"]
    assert r["min_fwhm"] > 0
    if binary == "true":
        x, t, d = read_snapshots(out / "snapshots.bin")
        assert d.shape == (t.size, 3, x.size) and x.size == 512
    else:
        assert (out / "snapshots.csv").exists()


def test_snapshot_round_trip(tmp_path):
    x, t = np.linspace(0, 1, 5), np.array([0.0, 1.0])
    d = np.random.default_rng(0).random((2, 3, 5))
    write_snapshots(tmp_path / "s.bin", x, t, d)
    x2, t2, d2 = read_snapshots(tmp_path / "s.bin")
    assert np.array_equal(x, x2) and np.array_equal(t, t2) and np.array_equal(d, d2)
    raw = (tmp_path / "s.bin").read_bytes()
    assert raw[:8] == b"SLAPSNP1" and len(raw) == 20 + 8 * (5 + 2 + 30)


@pytest.mark.parametrize("text,code", [
    (SWEEP + "bogus = 1\n", EXIT_CONFIG),
    (SWEEP.replace("fig2-sweep", "nope"), EXIT_CONFIG),
    (SWEEP.replace("omega_tw0 = 1.0", ""), EXIT_CONFIG),
    (BEC.format(binary="false").replace("0.15 ns", "10 ns"), EXIT_PHYSICS),
    (SWEEP.replace("t_sw = 10", "t_sw = 0"),
     EXIT_PHYSICS),
])
def test_exit_codes(tmp_path, capsys, text, code):
    assert main(["run", write(tmp_path, text), "-o", str(tmp_path / "o")]) == code
    assert "slap:" in capsys.readouterr().err


def test_io_errors(tmp_path):
    assert main(["run", str(tmp_path / "missing.cfg")]) == EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", write(tmp_path, SWEEP), "-o", str(blocker)]) == EXIT_IO
