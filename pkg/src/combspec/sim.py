"""Virtual measurements of a resonator bank.

Three modes: a VNA sweep of complex S21, a single-pump comb sweep in which
harmonic n of the pump crosses the resonances, and a two-pump multiplexed
sweep in which f_p1 is swept, f_p2 is held fixed, and every assigned lattice
line gives one magnitude trace.

Noise is additive complex Gaussian on linear S21. Draws come from a Philox
counter-based generator with one counter block per sweep point, so any chunk
of a trace can be regenerated independently and always gives the same values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from combspec.resonator import ResonatorBank, mag_db, s21_bank

DEFAULT_POINTS = 401
VNA_COMPLEX = "vna_complex"
FCS_MAGNITUDE = "fcs_magnitude"


@dataclass(frozen=True)
class NoiseSpec:
    sigma_linear: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma_linear >= 0:
            raise ValueError("sigma_linear must be >= 0")


@dataclass(frozen=True)
class SweepTrace:
    """Frequency-ordered sweep.

    ``axis`` is the probe frequency and ``pump`` the swept pump frequency (equal
    to the probe for VNA traces). ``values`` hold complex S21 for vna_complex
    traces and |S21| in dB for fcs_magnitude traces.
    """

    axis: np.ndarray
    values: np.ndarray
    mode: str
    pump: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        vals = np.asarray(self.values)
        pump = axis if self.pump is None else np.asarray(self.pump, dtype=float)
        if self.mode not in (VNA_COMPLEX, FCS_MAGNITUDE):
            raise ValueError(f"unknown trace mode {self.mode!r}")
        if axis.ndim != 1 or vals.shape != axis.shape or pump.shape != axis.shape:
            raise ValueError("axis, pump and values must be 1-D and of equal length")
        d = np.diff(axis)
        if len(axis) > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("trace axis must be strictly monotone")
        if self.mode == FCS_MAGNITUDE and np.iscomplexobj(vals):
            raise ValueError("fcs_magnitude traces carry no phase")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "pump", pump)

    def __len__(self):
        return len(self.axis)

    @property
    def magnitude(self) -> np.ndarray:
        """Linear |S21|."""
        if self.mode == VNA_COMPLEX:
            return np.abs(self.values)
        return 10 ** (self.values / 20)

    @property
    def magnitude_db(self) -> np.ndarray:
        if self.mode == VNA_COMPLEX:
            return mag_db(self.values)
        return self.values


def point_noise(seed: int, start: int, count: int, sigma: float) -> np.ndarray:
    """Complex Gaussian noise for sweep points ``start .. start + count - 1``.

    Point i uses Philox counter block i: two of its four uniforms feed a
    Box-Muller transform for the real and imaginary parts.
    """
    if count <= 0:
        return np.zeros(0, dtype=complex)
    bg = np.random.Philox(key=seed)
    bg.advance(start)
    u = np.random.Generator(bg).random(4 * count).reshape(count, 4)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2 * np.pi * u[:, 1]
    return sigma * r * (np.cos(theta) + 1j * np.sin(theta))


def baseline(f, tilt_db_per_ghz: float = 0.0, gain_db: float = 0.0):
    """Linear-in-frequency baseline in dB, referenced to 0 Hz."""
    return 10 ** ((gain_db + tilt_db_per_ghz * np.asarray(f) / 1e9) / 20)


def _measure(bank, f, noise: NoiseSpec, tilt_db_per_ghz, gain_db):
    s = s21_bank(bank, f) * baseline(f, tilt_db_per_ghz, gain_db)
    if noise.sigma_linear > 0:
        s = s + point_noise(noise.seed, 0, len(f), noise.sigma_linear)
    return s


def _grid(start, stop, points):
    if not (np.isfinite(start) and np.isfinite(stop) and 0 < start < stop):
        raise ValueError(f"sweep needs 0 < start < stop, got {start!r}, {stop!r}")
    if int(points) != points or points < 2:
        raise ValueError("sweep needs at least 2 points")
    return np.linspace(start, stop, int(points))


def vna_at(bank: ResonatorBank, f, noise: NoiseSpec = NoiseSpec(), tilt_db_per_ghz: float = 0.0,
           gain_db: float = 0.0) -> SweepTrace:
    """VNA trace on an arbitrary strictly monotone frequency list."""
    f = np.asarray(f, dtype=float)
    s = _measure(bank, f, noise, tilt_db_per_ghz, gain_db)
    return SweepTrace(f, s, VNA_COMPLEX, pump=f.copy(), meta={"label": "vna"})


def vna_sweep(bank: ResonatorBank, f_start: float, f_stop: float, points: int = DEFAULT_POINTS,
              noise: NoiseSpec = NoiseSpec(), tilt_db_per_ghz: float = 0.0,
              gain_db: float = 0.0) -> SweepTrace:
    return vna_at(bank, _grid(f_start, f_stop, points), noise, tilt_db_per_ghz, gain_db)


def fcs_sweep(bank: ResonatorBank, harmonic_n: int, fp_start: float, fp_stop: float,
              points: int = DEFAULT_POINTS, noise: NoiseSpec = NoiseSpec(),
              tilt_db_per_ghz: float = 0.0, gain_db: float = 0.0) -> SweepTrace:
    if int(harmonic_n) != harmonic_n or harmonic_n < 1:
        raise ValueError("harmonic_n must be an integer >= 1")
    fp = _grid(fp_start, fp_stop, points)
    f = harmonic_n * fp
    s = _measure(bank, f, noise, tilt_db_per_ghz, gain_db)
    return SweepTrace(f, mag_db(s), FCS_MAGNITUDE, pump=fp,
                      meta={"harmonic": int(harmonic_n), "n": int(harmonic_n), "m": 0})


def multiplex_sweep(bank: ResonatorBank, solution, fp1_span: float, points: int = DEFAULT_POINTS,
                    noise: NoiseSpec = NoiseSpec(), tilt_db_per_ghz: float = 0.0,
                    gain_db: float = 0.0) -> list[SweepTrace]:
    """One magnitude trace per assignment while f_p1 sweeps ``fp1_span`` around its solved value."""
    if not fp1_span > 0:
        raise ValueError("fp1_span must be > 0")
    if not solution.assignments or not (solution.f_p1 > 0 and solution.f_p2 > 0):
        raise ValueError("solution needs positive pumps and at least one assignment")
    fp1 = _grid(solution.f_p1 - fp1_span / 2, solution.f_p1 + fp1_span / 2, points)
    traces = []
    for k, (n, m) in enumerate(solution.assignments):
        if n == 0:
            raise ValueError(f"assignment {k} has n = 0; sweeping f_p1 would not move the line")
        f = n * fp1 + m * solution.f_p2
        if np.any(f <= 0):
            raise ValueError(f"assignment {k} = ({n}, {m}) reaches non-positive frequency")
        # a separate seed stream per trace keeps traces independent
        nz = NoiseSpec(noise.sigma_linear, noise.seed + k)
        s = _measure(bank, f, nz, tilt_db_per_ghz, gain_db)
        traces.append(SweepTrace(f, mag_db(s), FCS_MAGNITUDE, pump=fp1,
                                 meta={"n": int(n), "m": int(m), "f_p2": float(solution.f_p2),
                                       "target_index": k}))
    return traces
