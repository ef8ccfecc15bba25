"""Least-squares extraction of notch resonator parameters from sweep traces.

Complex fits use the real and imaginary parts of S21; magnitude fits use
|S21| only. Internally the model is parametrised as

    f0 = f0_guess * (1 + u / Ql_guess),  Qi = exp(a),  Qe = exp(b),  phi

which keeps both quality factors positive and puts the centre shift in units
of the guessed linewidth.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from combspec.resonator import NotchResonator
from combspec.sim import FCS_MAGNITUDE, VNA_COMPLEX, SweepTrace

MAX_ITER = 200
STEP_TOL = 1e-12
MIN_POINTS = 8
NOISE_FACTOR = 3.0
SMOOTH_POINTS = 5
PHI_STARTS = (0.0, 0.6, -0.6)


class NoResonanceError(ValueError):
    """The trace shows no dip above its noise floor."""


class UnderResolvedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FitResult:
    params: Optional[NotchResonator]
    uncertainties: dict
    residual_norm: float
    mode: str
    converged: bool
    phi_sign_ambiguous: bool = False
    baseline: Optional[tuple[float, float]] = None
    message: str = ""
    nfev: int = 0

    def to_record(self) -> dict:
        p = self.params
        return {
            "mode": self.mode,
            "converged": self.converged,
            "params": None if p is None else {
                "f0_hz": p.f0, "q_internal": p.q_internal,
                "q_external": p.q_external, "phi_rad": p.phi,
            },
            "uncertainties": dict(self.uncertainties),
            "residual_norm": self.residual_norm,
            "phi_sign_ambiguous": self.phi_sign_ambiguous,
            "baseline": None if self.baseline is None else list(self.baseline),
            "message": self.message,
            "nfev": self.nfev,
        }


def _sorted(trace: SweepTrace):
    order = np.argsort(trace.axis)
    f = trace.axis[order]
    if trace.mode == VNA_COMPLEX:
        return f, np.asarray(trace.values, dtype=complex)[order]
    return f, trace.magnitude[order]


def check_resonance(f, mag, factor: float = NOISE_FACTOR) -> float:
    """Raise NoResonanceError unless the detrended dB trace dips clearly below its noise floor.

    The dip is read from a short moving average, so a lone noise excursion does
    not count as a resonance. Returns the dip size in dB.
    """
    y = 20 * np.log10(np.maximum(mag, 1e-300))
    x = (f - f.mean()) / max(np.ptp(f), 1e-300)
    resid = y - np.polyval(np.polyfit(x, y, 1), x)
    d = np.diff(resid)
    floor = 1.4826 * np.median(np.abs(d - np.median(d))) / math.sqrt(2)
    floor = max(floor, 1e-6)
    w = SMOOTH_POINTS if len(resid) >= 4 * SMOOTH_POINTS else 1
    smooth = np.convolve(resid, np.ones(w) / w, mode="valid")
    dip = float(np.median(resid) - smooth.min())
    if dip < factor * floor:
        raise NoResonanceError(f"no resonance: dip {dip:.3g} dB below {factor:g}x noise floor {floor:.3g} dB")
    return dip


def initial_guess(trace: SweepTrace) -> NotchResonator:
    """Centre at the magnitude minimum, loaded Q from the half-depth width, phi = 0."""
    f, _ = _sorted(trace)
    mag = trace.magnitude[np.argsort(trace.axis)]
    i0 = int(np.argmin(mag))
    f0 = float(f[i0])
    smin = float(mag[i0])
    base = float(np.median(np.concatenate([mag[: max(1, len(mag) // 10)], mag[-max(1, len(mag) // 10):]])))
    rel = min(max(smin / base if base > 0 else smin, 0.01), 0.99)
    # half depth in power, where 1 - |S|^2 drops to half its peak for phi = 0
    level = base**2 * (1 + rel**2) / 2
    below = mag**2 < level
    lo = i0
    while lo > 0 and below[lo - 1]:
        lo -= 1
    hi = i0
    while hi < len(f) - 1 and below[hi + 1]:
        hi += 1
    step = float(np.median(np.diff(f)))

    def cross(i, j):
        # interpolate the level crossing between samples i (inside) and j (outside)
        a, b = mag[i] ** 2 - level, mag[j] ** 2 - level
        return f[i] + (f[j] - f[i]) * a / (a - b) if a != b else f[i]

    left = cross(lo, lo - 1) if lo > 0 else f[0]
    right = cross(hi, hi + 1) if hi < len(f) - 1 else f[-1]
    width = right - left
    if hi - lo + 1 < 3 or lo == 0 or hi == len(f) - 1:
        warnings.warn("dip narrower than 3 grid steps or not enclosed by the sweep; "
                      "initial guess is under-resolved", UnderResolvedWarning, stacklevel=2)
        width = max(width, 3 * step)
    ql = f0 / width
    k = 1 - rel  # Ql / Qe for phi = 0
    return NotchResonator(f0, ql / (1 - k), ql / k, 0.0)


class _Model:
    def __init__(self, f, guess: NotchResonator, with_baseline: bool):
        self.f = f
        self.f0g = guess.f0
        self.qlg = guess.q_loaded
        self.with_baseline = with_baseline

    def unpack(self, p):
        f0 = self.f0g * (1 + p[0] / self.qlg)
        return f0, math.exp(p[1]), math.exp(p[2]), p[3]

    def pack(self, res: NotchResonator, phi=None):
        p = [(res.f0 / self.f0g - 1) * self.qlg, math.log(res.q_internal),
             math.log(res.q_external), res.phi if phi is None else phi]
        if self.with_baseline:
            p += [1.0, 0.0]
        return np.array(p, dtype=float)

    def s21_and_jac(self, p):
        f0, qi, qe, phi = self.unpack(p)
        f = self.f
        x = (f - f0) / f0
        e = np.exp(-1j * phi)
        D = qe + qi + 2j * qe * qi * x
        s = 1 - qi * e / D
        D2 = D * D
        ds_df0 = qi * e * 2j * qe * qi * (-f / f0**2) / D2
        cols = [
            ds_df0 * self.f0g / self.qlg,
            -e * qe / D2 * qi,
            qi * e * (1 + 2j * qi * x) / D2 * qe,
            1j * qi * e / D,
        ]
        if self.with_baseline:
            a, b = p[4], p[5]
            u = (f - self.f0g) / self.f0g
            bl = a * (1 + b * u)
            cols = [c * bl for c in cols] + [s * (1 + b * u), s * a * u]
            s = s * bl
        return s, np.column_stack(cols)

    def phys_scale(self, p):
        f0, qi, qe, _ = self.unpack(p)
        return np.array([self.f0g / self.qlg, qi, qe, 1.0] + ([1.0, 1.0] if self.with_baseline else []))


def _wrap(phi):
    return (phi + math.pi) % (2 * math.pi) - math.pi


def _run(trace: SweepTrace, complex_mode: bool, with_baseline: bool) -> FitResult:
    mode = "complex" if complex_mode else "magnitude"
    expected = VNA_COMPLEX if complex_mode else FCS_MAGNITUDE
    if trace.mode != expected:
        raise ValueError(f"{mode} fit needs a {expected} trace, got {trace.mode}")
    if len(trace) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} points, got {len(trace)}")
    f, data = _sorted(trace)
    check_resonance(f, np.abs(data))
    guess = initial_guess(trace)
    model = _Model(f, guess, with_baseline)

    if complex_mode:
        def fun(p):
            s, _ = model.s21_and_jac(p)
            r = s - data
            return np.concatenate([r.real, r.imag])

        def jac(p):
            _, J = model.s21_and_jac(p)
            return np.vstack([J.real, J.imag])
    else:
        def fun(p):
            s, _ = model.s21_and_jac(p)
            return np.abs(s) - data

        def jac(p):
            s, J = model.s21_and_jac(p)
            return (np.conj(s)[:, None] * J).real / np.abs(s)[:, None]

    best = None
    for phi0 in PHI_STARTS:
        x0 = model.pack(guess, phi=phi0)
        with np.errstate(all="ignore"):
            sol = least_squares(fun, x0, jac=jac, method="lm", xtol=STEP_TOL, ftol=STEP_TOL,
                                gtol=STEP_TOL, max_nfev=MAX_ITER)
        if best is None or sol.cost < best.cost:
            best = sol
    p = best.x
    r = best.fun
    f0, qi, qe, phi = model.unpack(p)
    phi = _wrap(phi)
    if not complex_mode:
        phi = abs(phi)
    names = ["f0", "q_internal", "q_external", "phi"] + (["baseline_a", "baseline_b"] if with_baseline else [])
    dof = max(len(r) - len(p), 1)
    s2 = float(r @ r) / dof
    try:
        cov = np.linalg.pinv(best.jac.T @ best.jac) * s2
        se = np.sqrt(np.clip(np.diag(cov), 0, None)) * model.phys_scale(p)
    except np.linalg.LinAlgError:
        se = np.full(len(p), np.nan)
    norm = float(np.linalg.norm(r))
    finite = all(math.isfinite(v) for v in (f0, qi, qe, phi, norm))
    converged = bool(best.status > 0 and finite and f0 > 0)
    params = NotchResonator(f0, qi, qe, phi) if finite and f0 > 0 else None
    return FitResult(
        params=params,
        uncertainties=dict(zip(names, map(float, se))),
        residual_norm=norm,
        mode=mode,
        converged=converged,
        phi_sign_ambiguous=not complex_mode,
        baseline=(float(p[4]), float(p[5])) if with_baseline else None,
        message=best.message,
        nfev=int(best.nfev),
    )


def fit_complex(trace: SweepTrace, baseline: bool = False) -> FitResult:
    return _run(trace, True, baseline)


def fit_magnitude(trace: SweepTrace, baseline: bool = False) -> FitResult:
    """Fit |S21| only; phi comes back as |phi| with ``phi_sign_ambiguous`` set."""
    return _run(trace, False, baseline)
