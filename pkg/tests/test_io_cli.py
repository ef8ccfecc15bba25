import json
import shutil
from pathlib import Path

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from combspec import (Envelope, MultiplexSolution, NoiseSpec, NotchResonator, PumpTone, ResonatorBank,
                      fcs_sweep, intermod_lattice, vna_sweep)
from combspec import io
from combspec.cli import main

from conftest import REF_ASSIGNMENTS, REF_PUMPS

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(*argv):
    return main([str(a) for a in argv])


def write_cfg(tmp_path, cfg, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(cfg))
    return p


def test_hz_parsing_is_exact():
    assert io.hz("404652465", "x") == 404652465.0
    assert io.hz("4.4696e9", "x") == 4469600000.0
    assert io.hz(455e6, "x") == 455e6
    for bad in ("abc", None, [1], "nan"):
        with pytest.raises(io.ConfigError):
            io.hz(bad, "x")


def test_trace_csv_roundtrip_complex(tmp_path):
    r = NotchResonator(4.4696e9, 126e3, 98e3, 0.28)
    tr = vna_sweep(ResonatorBank([r]), 4.469e9, 4.470e9, 101, NoiseSpec(0.01, 1))
    io.write_trace_csv(tmp_path / "t.csv", tr)
    back = io.read_trace_csv(tmp_path / "t.csv")
    assert back.mode == tr.mode
    np.testing.assert_array_equal(back.axis, tr.axis)
    np.testing.assert_array_equal(back.values, tr.values)
    np.testing.assert_array_equal(back.pump, tr.pump)


def test_trace_csv_roundtrip_magnitude(tmp_path):
    r = NotchResonator(4.4696e9, 126e3, 98e3, 0.28)
    tr = fcs_sweep(ResonatorBank([r]), 9, 496.4e6, 496.8e6, 51)
    io.write_trace_csv(tmp_path / "t.csv", tr)
    back = io.read_trace_csv(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.values, tr.values)
    np.testing.assert_array_equal(back.pump, tr.pump)
    assert back.meta["harmonic"] == 9
    header = (tmp_path / "t.csv").read_text().splitlines()
    assert "pump_hz,probe_hz,mag_db" in header


def test_comb_csv_roundtrip(tmp_path):
    sp = intermod_lattice(PumpTone(454e6), PumpTone(455e6), 12, (4.98e9, 5.02e9), Envelope(-140, -1))
    io.write_comb_csv(tmp_path / "c.csv", sp)
    lines = io.read_comb_csv(tmp_path / "c.csv")
    assert [(ln.n, ln.m, ln.frequency) for ln in lines] == [(ln.n, ln.m, ln.frequency) for ln in sp.lines]
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "n,m,frequency_hz,power_dbm"


def test_density_csv_roundtrip(tmp_path):
    w, d = np.linspace(-1, 1, 11), np.linspace(0, 1, 11) / 7
    io.write_density_csv(tmp_path / "d.csv", w, d)
    w2, d2 = io.read_density_csv(tmp_path / "d.csv")
    np.testing.assert_array_equal(w, w2)
    np.testing.assert_array_equal(d, d2)


@given(st.floats(1e8, 1e9), st.floats(1e8, 1e9),
       st.lists(st.tuples(st.integers(-100, 100), st.integers(-100, 100)), min_size=1, max_size=6))
@settings(max_examples=30, deadline=None)
def test_solution_json_roundtrip(tmp_path_factory, f1, f2, assign):
    sol = MultiplexSolution(f1, f2, tuple(assign), tuple(float(k) for k in range(len(assign))))
    p = tmp_path_factory.mktemp("j") / "s.json"
    io.write_solutions(p, [sol])
    assert io.read_solutions(p) == [sol]


def test_parse_errors_name_field():
    with pytest.raises(io.ConfigError, match="q_internal"):
        io.parse_bank({"bank": [{"f0_hz": 5e9, "q_internal": -1, "q_external": 1e4}]})
    with pytest.raises(io.ConfigError, match="tol_hz"):
        io.parse_problem({"problem": {"targets": [{"f_hz": 5e9, "tol_hz": 0}], "pump_band_hz": [1e8, 2e8]}})
    with pytest.raises(io.ConfigError, match="pump_band_hz"):
        io.parse_problem({"problem": {"targets": [{"f_hz": 5e9, "tol_hz": 1}]}})


def test_calibration_csv(tmp_path):
    from combspec import fit_calibration
    p = tmp_path / "cal.csv"
    rows = "\n".join(f"{x},{x - 2.91}" for x in range(-40, 1, 5))
    p.write_text("power_in_dbm,power_out_dbm\n" + rows + "\n")
    line = fit_calibration(io.read_calibration_csv(p), 4.4692e9)
    assert line.slope == pytest.approx(1) and line.intercept_db == pytest.approx(-2.91)


# CLI


def test_cli_plan_verify(tmp_path, capsys):
    code = run("plan", "--verify", "--config", CONFIGS / "three_target.yaml", "--out", tmp_path)
    assert code == 0
    rep = json.loads((tmp_path / "plan_verify.json").read_text())
    assert rep["passed"] and rep["residuals_hz"] == [-32869.0, 36273.0, -4632.0]
    assert "PASS" in capsys.readouterr().out


def test_cli_plan_solve_and_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("plan", "--config", CONFIGS / "three_target.yaml", "--out", a) == 0
    assert run("--config", CONFIGS / "three_target.yaml", "--out", b, "plan") == 0
    ja, jb = (a / "plan_solutions.json").read_bytes(), (b / "plan_solutions.json").read_bytes()
    assert ja == jb
    assert io.read_solutions(a / "plan_solutions.json")


def test_cli_plan_infeasible(tmp_path):
    cfg = {"problem": {"targets": [{"f_hz": 4.4e9, "tol_hz": 1}, {"f_hz": 7.1e9, "tol_hz": 1},
                                   {"f_hz": 5.3e9, "tol_hz": 1}],
                       "pump_band_hz": [1e8, 1.0001e8], "m_max": 3}}
    assert run("plan", "--config", write_cfg(tmp_path, cfg), "--out", tmp_path) == 2
    assert json.loads((tmp_path / "plan_solutions.json").read_text())["solutions"] == []


def test_cli_plan_verify_fail_exit(tmp_path):
    cfg = yaml.safe_load((CONFIGS / "three_target.yaml").read_text())
    for t in cfg["problem"]["targets"]:
        t["tol_hz"] = 10000
    assert run("plan", "--verify", "--config", write_cfg(tmp_path, cfg), "--out", tmp_path) == 2


@pytest.mark.parametrize("mutate", [
    lambda c: c["problem"].pop("pump_band_hz"),
    lambda c: c["problem"].update(m_max=0),
    lambda c: c["problem"]["targets"][0].update(f_hz="four GHz"),
    lambda c: c["solution"].update(assignments=[[1, 2]]),
])
def test_cli_config_errors(tmp_path, mutate, capsys):
    cfg = yaml.safe_load((CONFIGS / "three_target.yaml").read_text())
    mutate(cfg)
    assert run("plan", "--verify", "--config", write_cfg(tmp_path, cfg), "--out", tmp_path) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_missing_config_and_bad_args(tmp_path):
    assert run("plan", "--config", tmp_path / "nope.yaml") == 1
    assert run("frobnicate") == 1
    (tmp_path / "bad.yaml").write_text("problem: [unclosed")
    assert run("plan", "--config", tmp_path / "bad.yaml") == 1


def test_cli_dos(tmp_path):
    code = run("dos", "--config", CONFIGS / "three_target.yaml", "--m-max", 50, "--bruteforce", "--out", tmp_path)
    assert code == 0
    s = json.loads((tmp_path / "dos_summary.json").read_text())
    assert s["tv_distance"] < 0.02
    assert abs(s["integral"] - 1) < 1e-6
    w, d = io.read_density_csv(tmp_path / "dos_profile.csv")
    assert len(w) == 2001 and np.all(d >= 0)
    assert (tmp_path / "dos_histogram.csv").exists()


def test_cli_dos_flags_and_recommend(tmp_path):
    assert run("dos", "--f-p1", "1e8", "--f-p2", "1e8", "--m-max", 10, "--out", tmp_path) == 0
    assert json.loads((tmp_path / "dos_summary.json").read_text())["triangular"] is True
    assert run("dos", "--recommend", "4e9", "8e9", "--m-max", 100, "--out", tmp_path) == 0
    rec = json.loads((tmp_path / "recommendation.json").read_text())
    assert rec["strategy"] == "asymmetric pumps" and rec["guard_ok"]
    assert run("dos", "--recommend", "4e9", "8e9", "--frame-shift", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "recommendation.json").read_text())["strategy"] == "similar pumps"
    assert run("dos", "--recommend", "8e9", "4e9", "--out", tmp_path) == 1
    assert run("dos", "--f-p1", "1e8", "--out", tmp_path) == 1
    assert run("dos", "--f-p1", "1e8", "--f-p2", "2e8", "--gamma", "0", "--out", tmp_path) == 1


def test_cli_simulate_and_fit(tmp_path):
    cfg = CONFIGS / "resonator_a.yaml"
    assert run("simulate", "vna", "--config", cfg, "--out", tmp_path) == 0
    assert run("simulate", "fcs", "--config", cfg, "--out", tmp_path, "--seed", 3) == 0
    assert run("fit", tmp_path / "vna.csv", tmp_path / "fcs_n9.csv", "--out", tmp_path) == 0
    v = json.loads((tmp_path / "vna.fit.json").read_text())
    assert v["status"] == "ok" and v["mode"] == "complex"
    assert v["params"]["q_internal"] == pytest.approx(126e3, rel=1e-3)
    m = json.loads((tmp_path / "fcs_n9.fit.json").read_text())
    assert m["mode"] == "magnitude" and m["phi_sign_ambiguous"]


def test_cli_fit_no_resonance_continues(tmp_path):
    d = tmp_path / "traces"
    d.mkdir()
    io.write_trace_csv(d / "flat.csv", vna_sweep(ResonatorBank(), 4e9, 4.1e9, 101))
    r = NotchResonator(4.4696e9, 126e3, 98e3, 0.28)
    io.write_trace_csv(d / "dip.csv", vna_sweep(ResonatorBank([r]), 4.469e9, 4.4702e9, 201))
    assert run("fit", d, "--out", tmp_path) == 2
    assert json.loads((tmp_path / "flat.fit.json").read_text())["status"] == "no_resonance"
    assert json.loads((tmp_path / "dip.fit.json").read_text())["status"] == "ok"
    assert run("fit", tmp_path / "missing.csv", "--out", tmp_path) == 1


def test_cli_simulate_deterministic_with_seed(tmp_path):
    cfg = CONFIGS / "resonator_a.yaml"
    for sub in ("a", "b"):
        assert run("simulate", "vna", "--config", cfg, "--seed", 9, "--out", tmp_path / sub) == 0
    assert (tmp_path / "a" / "vna.csv").read_bytes() == (tmp_path / "b" / "vna.csv").read_bytes()


def test_cli_simulate_multiplex(tmp_path):
    assert run("simulate", "multiplex", "--config", CONFIGS / "three_target.yaml", "--out", tmp_path) == 0
    names = sorted(p.name for p in tmp_path.glob("multiplex_*.csv"))
    assert names == ["multiplex_0_n-5_m12.csv", "multiplex_1_n-3_m11.csv", "multiplex_2_n12_m1.csv"]


def test_cli_comb(tmp_path):
    cfg = CONFIGS / "beat_comb.yaml"
    assert run("comb", "intermod", "--config", cfg, "--out", tmp_path) == 0
    lines = io.read_comb_csv(tmp_path / "comb_intermod.csv")
    f = np.array([ln.frequency for ln in lines])
    assert np.all(np.diff(f) == 1e6)
    assert run("comb", "harmonics", "--config", cfg, "--m-max", 16, "--band", "4e9", "8e9", "--out", tmp_path) == 0
    assert run("comb", "label", "--config", cfg, "--out", tmp_path) == 0
    labels = json.loads((tmp_path / "labels.json").read_text())["labels"]
    assert [11, 0] in labels
    assert run("comb", "intermod", "--config", cfg, "--m-max", 0, "--out", tmp_path) == 1
