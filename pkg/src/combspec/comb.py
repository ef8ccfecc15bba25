"""Single-pump harmonic combs and two-pump intermodulation lattices.

A line labelled ``(n, m)`` sits at ``n * f_p1 + m * f_p2``. Only positive
frequencies are emitted. Lines that fall inside one resolution bin are merged
into a single line that keeps every contributing label.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DEFAULT_ORDER = 100
DEFAULT_RESOLUTION_HZ = 1.0


@dataclass(frozen=True)
class PumpTone:
    frequency: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise ValueError(f"pump frequency must be > 0, got {self.frequency!r}")
        if not self.amplitude >= 0:
            raise ValueError(f"pump amplitude must be >= 0, got {self.amplitude!r}")


@dataclass(frozen=True)
class Envelope:
    """Synthetic line power: flat level plus a linear tilt in dB per GHz."""

    level_dbm: float = -150.0
    tilt_db_per_ghz: float = 0.0

    def power_dbm(self, f):
        return self.level_dbm + self.tilt_db_per_ghz * np.asarray(f) / 1e9


@dataclass(frozen=True)
class CombLine:
    n: int
    m: int
    frequency: float
    power_dbm: float
    labels: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", ((self.n, self.m),))


@dataclass(frozen=True)
class CombSpectrum:
    pumps: tuple[PumpTone, ...]
    order_bound: int
    lines: tuple[CombLine, ...] = field(default_factory=tuple)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([ln.frequency for ln in self.lines], dtype=float)

    def __len__(self):
        return len(self.lines)


def _check_order(M):
    if int(M) != M or M < 1:
        raise ValueError(f"order bound M must be an integer >= 1, got {M!r}")
    return int(M)


def _check_band(band):
    lo, hi = float(band[0]), float(band[1])
    if not lo <= hi:
        raise ValueError(f"band must be ordered (lo <= hi), got {band!r}")
    return lo, hi


def _amp_db(a: float) -> float:
    return 20 * math.log10(a) if a > 0 else -math.inf


def lattice_indices(M: int) -> np.ndarray:
    """All index pairs with |n|, |m| <= M except (0, 0), as an (K, 2) int array."""
    M = _check_order(M)
    r = np.arange(-M, M + 1)
    nn, mm = np.meshgrid(r, r, indexing="ij")
    idx = np.column_stack([nn.ravel(), mm.ravel()])
    return idx[np.any(idx != 0, axis=1)]


def line_frequency(f_p1: float, f_p2: float, n, m):
    return np.asarray(n) * f_p1 + np.asarray(m) * f_p2


def harmonics(pump: PumpTone, M: int, band, envelope: Envelope = Envelope()) -> CombSpectrum:
    M = _check_order(M)
    lo, hi = _check_band(band)
    lines = []
    if pump.amplitude > 0:
        for n in range(1, M + 1):
            f = n * pump.frequency
            if lo <= f <= hi:
                p = float(envelope.power_dbm(f)) + _amp_db(pump.amplitude)
                lines.append(CombLine(n, 0, f, p))
    return CombSpectrum((pump,), M, tuple(lines))


def _merge(idx, freqs, powers_db, resolution):
    order = np.lexsort((np.abs(idx).sum(1), freqs))
    idx, freqs, powers_db = idx[order], freqs[order], powers_db[order]
    lines = []
    i = 0
    while i < len(freqs):
        j = i + 1
        while j < len(freqs) and freqs[j] - freqs[i] < resolution:
            j += 1
        grp = range(i, j)
        # representative: lowest-order label in the group
        rep = min(grp, key=lambda k: (abs(idx[k, 0]) + abs(idx[k, 1]), idx[k, 1], idx[k, 0]))
        lin = sum(10 ** (powers_db[k] / 10) for k in grp)
        p = 10 * math.log10(lin) if lin > 0 else -math.inf
        labels = tuple(sorted((int(idx[k, 0]), int(idx[k, 1])) for k in grp))
        lines.append(CombLine(int(idx[rep, 0]), int(idx[rep, 1]), float(freqs[rep]), p, labels))
        i = j
    return lines


def intermod_lattice(p1: PumpTone, p2: PumpTone, M: int, band,
                     envelope: Envelope = Envelope(),
                     resolution: float = DEFAULT_RESOLUTION_HZ) -> CombSpectrum:
    """Bi-chromatic comb: all positive ``n f_p1 + m f_p2`` with |n|, |m| <= M inside ``band``.

    A line needs every pump it involves to have non-zero amplitude; a silent
    pump therefore only removes lines, it never adds any.
    """
    M = _check_order(M)
    lo, hi = _check_band(band)
    idx = lattice_indices(M)
    freqs = line_frequency(p1.frequency, p2.frequency, idx[:, 0], idx[:, 1])
    keep = (freqs > 0) & (freqs >= lo) & (freqs <= hi)
    keep &= (idx[:, 0] == 0) | (p1.amplitude > 0)
    keep &= (idx[:, 1] == 0) | (p2.amplitude > 0)
    idx, freqs = idx[keep], freqs[keep]
    a1, a2 = _amp_db(p1.amplitude) if p1.amplitude > 0 else 0.0, _amp_db(p2.amplitude) if p2.amplitude > 0 else 0.0
    powers = envelope.power_dbm(freqs) + np.where(idx[:, 0] != 0, a1, 0.0) + np.where(idx[:, 1] != 0, a2, 0.0)
    lines = _merge(idx, freqs, np.atleast_1d(powers), resolution)
    return CombSpectrum((p1, p2), M, tuple(lines))


def beat_spacing(p1: PumpTone | float, p2: PumpTone | float) -> float:
    f1 = getattr(p1, "frequency", p1)
    f2 = getattr(p2, "frequency", p2)
    return abs(f1 - f2)


def label_line(p1: PumpTone | float, p2: PumpTone | float, M: int, f_observed: float,
               tol: float) -> list[tuple[int, int]]:
    """Index pairs whose lattice frequency lies within ``tol`` of an observed line.

    Sorted by |residual|, then by |n| + |m|.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    f1 = getattr(p1, "frequency", p1)
    f2 = getattr(p2, "frequency", p2)
    M = _check_order(M)
    r = np.arange(-M, M + 1)
    nn, mm = np.meshgrid(r, r, indexing="ij")
    res = np.abs(nn * f1 + mm * f2 - f_observed)
    hit = res <= tol
    out = sorted(zip(res[hit], np.abs(nn[hit]) + np.abs(mm[hit]), nn[hit], mm[hit]))
    return [(int(n), int(m)) for _, _, n, m in out]
