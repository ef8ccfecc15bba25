"""Counting statistics of the two-pump lattice.

Covers mean level spacing, the density of states (DoS) of lattice lines under a
flat index distribution, a brute-force histogram of the same quantity,
uniform quantization error, scaling with the number of pumps, and pump choice
for covering a target band.

The analytic DoS keeps the sum over the smaller pump's index discrete and
spreads the larger pump's index uniformly over its range::

    rho(w) = 1 / ((2M + 1) * 2M f_L) * sum_{|n| <= M} [ |w - n f_S| < M f_L ]

It integrates to one, is exactly flat for |w| < M |f_p1 - f_p2| at height
1 / (2M f_L), and vanishes for |w| > M (f_p1 + f_p2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from combspec.lattice import GOLDEN, GUARD_EPSILON, GUARD_Q_MAX, commensurability_guard

DEFAULT_GAMMA_HZ = 10e3
DEFAULT_GRID_POINTS = 2001
GRID_SPAN = 1.1
BINS_PER_SUPPORT = 400


@dataclass(frozen=True)
class Spacing:
    exact: float
    asymptotic: float


@dataclass(frozen=True)
class ScalingInputs:
    bandwidth_w: float
    n_targets: int
    k_pumps: int = 2
    order_bound: int = 100

    def __post_init__(self):
        if not self.bandwidth_w > 0:
            raise ValueError("bandwidth W must be > 0")
        if self.n_targets < 1:
            raise ValueError("N must be >= 1")
        if self.k_pumps < 2:
            raise ValueError("K must be >= 2")
        if self.order_bound < 1:
            raise ValueError("M must be >= 1")


@dataclass(frozen=True)
class ScalingResult:
    """Order-of-magnitude estimates; none of these are equalities."""

    lattice_count: float
    spacing: float
    m_opt: float
    delta_opt: float
    mse_opt: float


@dataclass(frozen=True)
class DoSProfile:
    f_p1: float
    f_p2: float
    order_bound: int
    gamma: float
    flat_height: float
    flat_edge: float
    support_edge: float
    samples: np.ndarray = field(repr=False)  # (K, 2): omega_hz, density_per_hz

    @property
    def omega(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def density(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def is_triangular(self) -> bool:
        return self.flat_edge == 0

    def match_probability(self, omega):
        """Probability that a uniformly drawn index pair lands within gamma of omega."""
        return self.gamma * dos_density(self.f_p1, self.f_p2, self.order_bound, omega)

    def integral(self) -> float:
        return dos_integral(self.f_p1, self.f_p2, self.order_bound)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    mass: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def density(self) -> np.ndarray:
        return self.mass / np.diff(self.edges)


@dataclass(frozen=True)
class Recommendation:
    strategy: str
    f_p1: float
    f_p2: float
    frame_center: float
    flat_edge: float
    mean_spacing: float
    guard_ok: bool
    note: str = ""


def _check_M(M):
    if int(M) != M or M < 1:
        raise ValueError(f"M must be an integer >= 1, got {M!r}")
    return int(M)


def _small_large(f_p1, f_p2):
    return (f_p1, f_p2) if f_p1 <= f_p2 else (f_p2, f_p1)


def mean_spacing(f_p1: float, f_p2: float, M: int) -> Spacing:
    M = _check_M(M)
    s = f_p1 + f_p2
    return Spacing(2 * M / (2 * M + 2) ** 2 * s, s / (2 * M))


def enumerate_lattice(f_p1: float, f_p2: float, M: int) -> np.ndarray:
    """Frequencies of every index pair with |n|, |m| <= M, (0, 0) included."""
    r = np.arange(-M, M + 1)
    return (r[:, None] * f_p1 + r[None, :] * f_p2).ravel()


def dos_density(f_p1: float, f_p2: float, M: int, omega):
    fs, fl = _small_large(f_p1, f_p2)
    w = np.asarray(omega, dtype=float)
    half = M * fl
    # count n in [-M, M] with |w - n fs| < half
    lo = np.floor((w - half) / fs) + 1
    hi = np.ceil((w + half) / fs) - 1
    count = np.clip(np.minimum(hi, M) - np.maximum(lo, -M) + 1, 0, None)
    return count / ((2 * M + 1) * 2 * half)


def dos_cdf(f_p1: float, f_p2: float, M: int, x):
    fs, fl = _small_large(f_p1, f_p2)
    n = np.arange(-M, M + 1)
    half = M * fl
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.clip((x[:, None] - n[None, :] * fs + half) / (2 * half), 0, 1).mean(axis=1)


def dos_integral(f_p1: float, f_p2: float, M: int) -> float:
    """Integral of the density, exact on its piecewise-constant segments."""
    fs, fl = _small_large(f_p1, f_p2)
    n = np.arange(-M, M + 1)
    bps = np.unique(np.concatenate([n * fs - M * fl, n * fs + M * fl]))
    mids = 0.5 * (bps[1:] + bps[:-1])
    return float(np.sum(dos_density(f_p1, f_p2, M, mids) * np.diff(bps)))


def nominal_flat_height(f_p1: float, f_p2: float, M: int) -> float:
    """Closed-form plateau constant 2 / (M (3|f_p1 - f_p2| + f_p1 + f_p2))."""
    return 2.0 / (M * (3 * abs(f_p1 - f_p2) + f_p1 + f_p2))


def default_grid(f_p1: float, f_p2: float, M: int, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    edge = GRID_SPAN * M * (f_p1 + f_p2)
    return np.linspace(-edge, edge, points)


def dos_analytic(f_p1: float, f_p2: float, M: int, gamma: float = DEFAULT_GAMMA_HZ,
                 grid=None) -> DoSProfile:
    M = _check_M(M)
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma!r}")
    if not (f_p1 > 0 and f_p2 > 0):
        raise ValueError("pump frequencies must be > 0")
    if grid is None:
        grid = default_grid(f_p1, f_p2, M)
    grid = np.asarray(grid, dtype=float)
    fl = max(f_p1, f_p2)
    samples = np.column_stack([grid, dos_density(f_p1, f_p2, M, grid)])
    return DoSProfile(
        f_p1=f_p1, f_p2=f_p2, order_bound=M, gamma=gamma,
        flat_height=1.0 / (2 * M * fl),
        flat_edge=M * abs(f_p1 - f_p2),
        support_edge=M * (f_p1 + f_p2),
        samples=samples,
    )


def default_bin_width(f_p1: float, f_p2: float, M: int) -> float:
    # finer than the larger pump the histogram resolves single lines, not a density
    return max(2 * M * (f_p1 + f_p2) / BINS_PER_SUPPORT, max(f_p1, f_p2))


def dos_bruteforce(f_p1: float, f_p2: float, M: int, bin_width: Optional[float] = None) -> Histogram:
    """Histogram of all (2M+1)^2 lattice frequencies, each weighted 1/(2M+1)^2.

    Bins are centred on zero so the histogram is symmetric.
    """
    M = _check_M(M)
    if bin_width is None:
        bin_width = default_bin_width(f_p1, f_p2, M)
    if not bin_width > 0:
        raise ValueError("bin_width must be > 0")
    pts = enumerate_lattice(f_p1, f_p2, M)
    k = int(math.ceil(M * (f_p1 + f_p2) / bin_width + 0.5))
    edges = (np.arange(-k, k + 2) - 0.5) * bin_width
    idx = np.floor(pts / bin_width + 0.5).astype(np.int64) + k
    counts = np.bincount(idx, minlength=len(edges) - 1)
    return Histogram(edges, counts / pts.size)


def tv_distance(f_p1: float, f_p2: float, M: int, hist: Histogram) -> float:
    """Total-variation distance between a histogram and the analytic DoS on the same bins."""
    q = np.diff(dos_cdf(f_p1, f_p2, M, hist.edges))
    return 0.5 * float(np.abs(hist.mass - q).sum())


def quantization_mse(delta: float) -> float:
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return delta**2 / 12.0


def scaling_laws(inputs: ScalingInputs) -> ScalingResult:
    W, N, K, M = inputs.bandwidth_w, inputs.n_targets, inputs.k_pumps, inputs.order_bound
    if K < 2:
        raise ValueError("K must be >= 2")
    return ScalingResult(
        lattice_count=float(M) ** K,
        spacing=float(M) ** (1 - K),
        m_opt=float(N) ** (1.0 / (K - 1)),
        delta_opt=W / float(N) ** (K - 1),
        mse_opt=W**2 / (12.0 * float(N) ** (2 * (K - 1))),
    )


def _nudge_until_guarded(f_small, partner, q_max, eps):
    """Scale ``f_small`` up in tiny steps until (f_small, partner(f_small)) passes the guard."""
    x = f_small
    for _ in range(64):
        if commensurability_guard(x, partner(x), q_max, eps):
            return x
        x *= 1 + 1e-4 / GOLDEN
    return x


def recommend_pumps(band, M: int, frame_shift_available: bool,
                    q_max: int = GUARD_Q_MAX, epsilon: float = GUARD_EPSILON) -> Recommendation:
    """Pump pair for covering ``band`` with the lattice.

    With a frame shift available the band is moved to zero and two similar
    pumps are used, their difference set so the flat DoS region spans the
    shifted band. Without it the larger pump acts as a coarse comb whose
    harmonics reach the top of the band within M orders, and the smaller pump,
    an order of magnitude lower, fills the gaps between coarse harmonics.
    """
    w_min, w_max = float(band[0]), float(band[1])
    if not (0 <= w_min < w_max):
        raise ValueError(f"band must satisfy 0 <= W_min < W_max, got {band!r}")
    M = _check_M(M)
    margin = 1.05
    if frame_shift_available:
        center = 0.5 * (w_min + w_max)
        d = margin * 0.5 * (w_max - w_min) / M
        f1 = _nudge_until_guarded(d * (10 + 1 / GOLDEN), lambda x: x + d, q_max, epsilon)
        f2 = f1 + d
        strategy = "similar pumps"
        note = f"rotating frame at {center:.6g} Hz; flat region covers the shifted band"
    else:
        center = 0.0
        f2 = margin * w_max / M
        f1 = _nudge_until_guarded(f2 / (10 + 1 / GOLDEN), lambda x: f2, q_max, epsilon)
        strategy = "asymmetric pumps"
        note = ("larger pump sets the coarse comb reaching W_max within M harmonics; "
                "smaller pump fine-tunes between harmonics (interpretation)")
        if 2 * M * f1 < f2:
            note += "; warning: fine comb too short to bridge coarse harmonics at this M"
    return Recommendation(
        strategy=strategy, f_p1=f1, f_p2=f2, frame_center=center,
        flat_edge=M * abs(f1 - f2),
        mean_spacing=mean_spacing(f1, f2, M).exact,
        guard_ok=commensurability_guard(f1, f2, q_max, epsilon),
        note=note,
    )
