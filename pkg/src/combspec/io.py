"""Scenario configuration (YAML) and CSV / JSON readers and writers.

Frequencies in configs may be integers, floats or decimal strings, always in Hz.
CSV files may start with ``#`` comment lines; trace CSVs keep their metadata in
a ``# meta: {...}`` line so that a written trace reads back unchanged.
"""
from __future__ import annotations

import csv
import io
import json
import math
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from combspec.comb import CombLine, CombSpectrum, Envelope, PumpTone
from combspec.dos import DoSProfile, Histogram, Recommendation
from combspec.lattice import MultiplexProblem, MultiplexSolution
from combspec.resonator import NotchResonator, ResonatorBank
from combspec.sim import FCS_MAGNITUDE, VNA_COMPLEX, NoiseSpec, SweepTrace


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


def load_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{path}: config file not found")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def _get(cfg: dict, key: str, where: str, default: Any = ...):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where}: expected a mapping")
    if key not in cfg:
        if default is ...:
            raise ConfigError(f"{where}.{key}: missing required field" if where else f"{key}: missing required field")
        return default
    return cfg[key]


def hz(value, field: str) -> float:
    """Parse a frequency given as int, float or decimal string."""
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a frequency in Hz, got {value!r}")
    try:
        out = float(Decimal(str(value).strip()))
    except (InvalidOperation, ValueError):
        raise ConfigError(f"{field}: expected a frequency in Hz, got {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{field}: frequency must be finite")
    return out


def _num(value, field: str) -> float:
    return hz(value, field)


def _int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{field}: expected an integer, got {value!r}")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{field}: expected an integer, got {value!r}") from None


def _build(field: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{field}: {exc}") from None


def parse_bank(cfg: dict) -> ResonatorBank:
    items = cfg.get("bank", []) or []
    if not isinstance(items, list):
        raise ConfigError("bank: expected a list of resonators")
    res = []
    for i, item in enumerate(items):
        w = f"bank[{i}]"
        res.append(_build(w, NotchResonator,
                          hz(_get(item, "f0_hz", w), f"{w}.f0_hz"),
                          _num(_get(item, "q_internal", w), f"{w}.q_internal"),
                          _num(_get(item, "q_external", w), f"{w}.q_external"),
                          _num(_get(item, "phi_rad", w, 0.0), f"{w}.phi_rad")))
    return _build("bank", ResonatorBank, tuple(res))


def parse_problem(cfg: dict) -> MultiplexProblem:
    p = _get(cfg, "problem", "")
    targets = _get(p, "targets", "problem")
    if not isinstance(targets, list) or not targets:
        raise ConfigError("problem.targets: at least one target is required")
    tl = []
    for i, t in enumerate(targets):
        w = f"problem.targets[{i}]"
        tl.append((hz(_get(t, "f_hz", w), f"{w}.f_hz"), hz(_get(t, "tol_hz", w, 50e3), f"{w}.tol_hz")))
    band = _get(p, "pump_band_hz", "problem")
    if not isinstance(band, (list, tuple)) or len(band) != 2:
        raise ConfigError("problem.pump_band_hz: expected [lo, hi]")
    band = (hz(band[0], "problem.pump_band_hz[0]"), hz(band[1], "problem.pump_band_hz[1]"))
    return _build("problem", MultiplexProblem, tuple(tl), band,
                  _int(_get(p, "m_max", "problem", 15), "problem.m_max"),
                  _int(_get(p, "max_solutions", "problem", 10), "problem.max_solutions"))


def parse_solution(d: dict, where: str = "solution") -> MultiplexSolution:
    assignments = _get(d, "assignments", where)
    if not isinstance(assignments, list):
        raise ConfigError(f"{where}.assignments: expected a list of [n, m] pairs")
    pairs = []
    for i, a in enumerate(assignments):
        if not isinstance(a, (list, tuple)) or len(a) != 2:
            raise ConfigError(f"{where}.assignments[{i}]: expected [n, m]")
        pairs.append((_int(a[0], f"{where}.assignments[{i}][0]"), _int(a[1], f"{where}.assignments[{i}][1]")))
    residuals = tuple(float(r) for r in d.get("residuals_hz", ()) or ())
    return MultiplexSolution(hz(_get(d, "f_p1_hz", where), f"{where}.f_p1_hz"),
                             hz(_get(d, "f_p2_hz", where), f"{where}.f_p2_hz"),
                             tuple(pairs), residuals)


def parse_pump(cfg: dict, k: int) -> PumpTone:
    p = _get(cfg, "pumps", "")
    key = f"f_p{k}_hz"
    return _build(f"pumps.{key}", PumpTone, hz(_get(p, key, "pumps"), f"pumps.{key}"),
                  _num(p.get(f"amplitude{k}", 1.0), f"pumps.amplitude{k}"))


def parse_noise(cfg: dict, seed: Optional[int] = None) -> NoiseSpec:
    n = cfg.get("noise", {}) or {}
    s = _int(n.get("seed", 0), "noise.seed") if seed is None else seed
    return _build("noise", NoiseSpec, _num(n.get("sigma_linear", 0.0), "noise.sigma_linear"), s)


def parse_envelope(d: dict) -> Envelope:
    d = d or {}
    return Envelope(_num(d.get("level_dbm", -150.0), "envelope.level_dbm"),
                    _num(d.get("tilt_db_per_ghz", 0.0), "envelope.tilt_db_per_ghz"))


# ---------------------------------------------------------------- JSON records

def solution_record(sol: MultiplexSolution) -> dict:
    return {"f_p1_hz": sol.f_p1, "f_p2_hz": sol.f_p2,
            "assignments": [list(a) for a in sol.assignments],
            "residuals_hz": list(sol.residuals)}


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_solutions(path, solutions) -> None:
    write_json(path, {"solutions": [solution_record(s) for s in solutions]})


def read_solutions(path) -> list[MultiplexSolution]:
    return [parse_solution(d, f"solutions[{i}]") for i, d in enumerate(read_json(path)["solutions"])]


def recommendation_record(rec: Recommendation) -> dict:
    return {"strategy": rec.strategy, "f_p1_hz": rec.f_p1, "f_p2_hz": rec.f_p2,
            "frame_center_hz": rec.frame_center, "flat_edge_hz": rec.flat_edge,
            "mean_spacing_hz": rec.mean_spacing, "guard_ok": rec.guard_ok, "note": rec.note}


# ----------------------------------------------------------------------- CSV

def _rows(path):
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return comments, list(csv.DictReader(body))


def _write(path, header, rows, comments=()):
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def write_trace_csv(path, trace: SweepTrace) -> None:
    meta = json.dumps({"mode": trace.mode, **trace.meta}, sort_keys=True)
    if trace.mode == VNA_COMPLEX:
        rows = [(repr(float(p)), repr(float(f)), repr(float(v.real)), repr(float(v.imag)))
                for p, f, v in zip(trace.pump, trace.axis, trace.values)]
        _write(path, ["pump_hz", "probe_hz", "re", "im"], rows, [f"meta: {meta}"])
    else:
        rows = [(repr(float(p)), repr(float(f)), repr(float(v)))
                for p, f, v in zip(trace.pump, trace.axis, trace.values)]
        _write(path, ["pump_hz", "probe_hz", "mag_db"], rows, [f"meta: {meta}"])


def read_trace_csv(path) -> SweepTrace:
    comments, rows = _rows(path)
    meta = {}
    for c in comments:
        body = c.lstrip("#").strip()
        if body.startswith("meta:"):
            meta = json.loads(body[5:])
    if not rows:
        raise ValueError(f"{path}: empty trace")
    cols = rows[0].keys()
    pump = np.array([float(r["pump_hz"]) for r in rows])
    probe = np.array([float(r["probe_hz"]) for r in rows])
    meta.pop("mode", None)
    if "re" in cols and "im" in cols:
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return SweepTrace(probe, vals, VNA_COMPLEX, pump=pump, meta=meta)
    if "mag_db" in cols:
        vals = np.array([float(r["mag_db"]) for r in rows])
        return SweepTrace(probe, vals, FCS_MAGNITUDE, pump=pump, meta=meta)
    raise ValueError(f"{path}: unrecognised trace columns {list(cols)}")


def write_comb_csv(path, spectrum: CombSpectrum) -> None:
    rows = [(ln.n, ln.m, repr(float(ln.frequency)), repr(float(ln.power_dbm))) for ln in spectrum.lines]
    _write(path, ["n", "m", "frequency_hz", "power_dbm"], rows)


def read_comb_csv(path) -> list[CombLine]:
    _, rows = _rows(path)
    return [CombLine(int(r["n"]), int(r["m"]), float(r["frequency_hz"]), float(r["power_dbm"])) for r in rows]


def write_density_csv(path, omega, density) -> None:
    _write(path, ["omega_hz", "density_per_hz"],
           [(repr(float(w)), repr(float(d))) for w, d in zip(omega, density)])


def read_density_csv(path) -> tuple[np.ndarray, np.ndarray]:
    _, rows = _rows(path)
    return (np.array([float(r["omega_hz"]) for r in rows]),
            np.array([float(r["density_per_hz"]) for r in rows]))


def read_calibration_csv(path) -> list[tuple[float, float]]:
    _, rows = _rows(path)
    return [(float(r["power_in_dbm"]), float(r["power_out_dbm"])) for r in rows]
