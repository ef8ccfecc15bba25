"""Notch-type resonators on a shared feedline.

Transmission of a single hanger resonator with Fano asymmetry ``phi``::

    S21(f) = 1 - Qi exp(-i phi) / (Qe + Qi + 2i Qe Qi (f - f0) / f0)

A bank of resonators on one feedline is the product of the individual
transmissions (no inter-resonator coupling).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HBAR = 1.054571817e-34  # J s
PHOTON_FORMULA_ID = "notch_input_output:n=2*Ql^2*P/(Qe*hbar*w0^2)"


@dataclass(frozen=True)
class NotchResonator:
    f0: float
    q_internal: float
    q_external: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("f0", "q_internal", "q_external"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.phi) and abs(self.phi) <= math.pi):
            raise ValueError(f"phi must satisfy |phi| <= pi, got {self.phi!r}")

    @property
    def q_loaded(self) -> float:
        return loaded_q(self)

    @property
    def linewidth(self) -> float:
        """Full width at half depth of the power dip, in Hz."""
        return self.f0 / loaded_q(self)


@dataclass(frozen=True)
class ResonatorBank:
    resonators: tuple[NotchResonator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "resonators", tuple(self.resonators))
        f0s = [r.f0 for r in self.resonators]
        if len(set(f0s)) != len(f0s):
            raise ValueError("resonance frequencies in a bank must be distinct")

    def __len__(self):
        return len(self.resonators)

    def __iter__(self):
        return iter(self.resonators)


@dataclass(frozen=True)
class CalibrationLine:
    slope: float
    intercept_db: float
    frequency: float


@dataclass(frozen=True)
class PhotonEstimate:
    n_bar: float
    applied_power_w: float
    formula_id: str = PHOTON_FORMULA_ID


def _check_freq(f):
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)) or np.any(f <= 0):
        raise ValueError("probe frequency must be finite and > 0")
    return f


def s21_single(res: NotchResonator, f):
    """Complex transmission of one notch resonator; ``f`` may be a scalar or array."""
    f = _check_freq(f)
    qi, qe = res.q_internal, res.q_external
    x = (f - res.f0) / res.f0
    out = 1 - qi * np.exp(-1j * res.phi) / (qe + qi + 2j * qe * qi * x)
    return out[()] if out.ndim == 0 else out


def s21_bank(bank: ResonatorBank | Iterable[NotchResonator], f):
    f = _check_freq(f)
    out = np.ones_like(f, dtype=complex)
    for res in bank:
        out = out * s21_single(res, f)
    return out[()] if out.ndim == 0 else out


def loaded_q(res: NotchResonator) -> float:
    return 1.0 / (1.0 / res.q_internal + 1.0 / res.q_external)


def fit_calibration(points: Sequence[tuple[float, float]], f: float) -> CalibrationLine:
    """Ordinary least-squares line ``power_out = slope * power_in + intercept`` (dBm)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("calibration needs at least two points")
    x, y = pts[:, 0], pts[:, 1]
    if np.ptp(x) == 0:
        raise np.linalg.LinAlgError("singular calibration fit: all input powers identical")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return CalibrationLine(float(slope), float(intercept), float(f))


def photon_number(res: NotchResonator, applied_power_w: float) -> PhotonEstimate:
    """Average intracavity photon number for a notch resonator driven at f0.

    Uses n = 2 Ql^2 P / (Qe hbar w0^2). Absolute values depend on this
    convention; only the linear scaling with power is physical here.
    """
    if not applied_power_w >= 0:
        raise ValueError("applied power must be >= 0")
    w0 = 2 * math.pi * res.f0
    ql = loaded_q(res)
    n = 2 * ql**2 * applied_power_w / (res.q_external * HBAR * w0**2)
    return PhotonEstimate(n, applied_power_w)


def dbm_to_watt(p_dbm):
    return 1e-3 * 10 ** (np.asarray(p_dbm) / 10)


def mag_db(s):
    return 20 * np.log10(np.abs(s))
