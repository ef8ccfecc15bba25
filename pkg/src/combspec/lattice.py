"""Pump-pair search for frequency multiplexing on a two-pump lattice.

Every target ``T_i`` must be matched by some ``n_i f_p1 + m_i f_p2`` within its
tolerance, with |n_i|, |m_i| <= M and both pumps inside a given band.
Residuals are reported as ``lattice point - target``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_TOLERANCE_HZ = 50e3
DEFAULT_ORDER = 15
GUARD_Q_MAX = 20
GUARD_EPSILON = 1e-6
GOLDEN = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class MultiplexProblem:
    targets: tuple[tuple[float, float], ...]
    pump_band: tuple[float, float]
    order_bound: int = DEFAULT_ORDER
    max_solutions: int = 10

    def __post_init__(self):
        targets = tuple((float(f), float(t)) for f, t in self.targets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "pump_band", (float(self.pump_band[0]), float(self.pump_band[1])))
        if not targets:
            raise ValueError("targets: at least one target is required")
        for i, (f, t) in enumerate(targets):
            if not (f > 0 and math.isfinite(f)):
                raise ValueError(f"targets[{i}].f_hz must be > 0")
            if not (t > 0 and math.isfinite(t)):
                raise ValueError(f"targets[{i}].tol_hz must be > 0")
        lo, hi = self.pump_band
        if not (0 < lo < hi):
            raise ValueError(f"pump_band_hz must satisfy 0 < lo < hi, got {self.pump_band}")
        if int(self.order_bound) != self.order_bound or self.order_bound < 1:
            raise ValueError("m_max must be an integer >= 1")
        if self.max_solutions < 1:
            raise ValueError("max_solutions must be >= 1")

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.targets])

    @property
    def tolerances(self) -> np.ndarray:
        return np.array([t for _, t in self.targets])


@dataclass(frozen=True)
class MultiplexSolution:
    f_p1: float
    f_p2: float
    assignments: tuple[tuple[int, int], ...]
    residuals: tuple[float, ...] = ()

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals) if self.residuals else 0.0

    @property
    def order_l1(self) -> int:
        return sum(abs(n) + abs(m) for n, m in self.assignments)

    def sort_key(self):
        return (self.max_abs_residual, self.order_l1, self.f_p1)


@dataclass(frozen=True)
class VerificationReport:
    residuals: tuple[float, ...]
    tolerances: tuple[float, ...]
    within: tuple[bool, ...]
    passed: bool
    pumps_in_band: bool = True
    indices_in_bound: bool = True

    @property
    def failing_targets(self) -> list[int]:
        return [i for i, ok in enumerate(self.within) if not ok]


def exact_residual(f_p1: float, f_p2: float, n: int, m: int, target: float) -> float:
    """``n f_p1 + m f_p2 - target`` evaluated in exact rational arithmetic."""
    return float(n * Fraction(f_p1) + m * Fraction(f_p2) - Fraction(target))


def nearest_lattice_point(f_p1: float, f_p2: float, target: float, M: int) -> tuple[int, int, float]:
    """Closest lattice point to ``target`` over |n|, |m| <= M.

    Ties go to smaller |n| + |m|, then smaller m, then smaller n.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    m = np.arange(-M, M + 1)
    nf = np.floor((target - m * f_p2) / f_p1).astype(np.int64)
    n = np.concatenate([np.clip(nf, -M, M), np.clip(nf + 1, -M, M)])
    m = np.concatenate([m, m])
    res = n * f_p1 + m * f_p2 - target
    best = np.lexsort((n, m, np.abs(n) + np.abs(m), np.abs(res)))[0]
    return int(n[best]), int(m[best]), float(res[best])


def verify_solution(problem: MultiplexProblem, solution: MultiplexSolution) -> VerificationReport:
    if len(solution.assignments) != len(problem.targets):
        raise ValueError(
            f"solution has {len(solution.assignments)} assignments for {len(problem.targets)} targets")
    res, tols, ok = [], [], []
    for (f, tol), (n, m) in zip(problem.targets, solution.assignments):
        r = exact_residual(solution.f_p1, solution.f_p2, n, m, f)
        res.append(r)
        tols.append(tol)
        ok.append(abs(r) <= tol)
    lo, hi = problem.pump_band
    M = problem.order_bound
    return VerificationReport(
        residuals=tuple(res),
        tolerances=tuple(tols),
        within=tuple(ok),
        passed=all(ok),
        pumps_in_band=lo <= solution.f_p1 <= hi and lo <= solution.f_p2 <= hi,
        indices_in_bound=all(abs(n) <= M and abs(m) <= M for n, m in solution.assignments),
    )


def commensurability_guard(f_p1: float, f_p2: float, q_max: int = GUARD_Q_MAX,
                           epsilon: float = GUARD_EPSILON) -> bool:
    """True if ``f_p1 / f_p2`` stays farther than ``epsilon`` (relative) from every p/q, q <= q_max."""
    return bool(_guard_vec(np.array([f_p1]), np.array([f_p2]), q_max, epsilon)[0])


def _guard_vec(f1, f2, q_max, eps):
    r = f1 / f2
    ok = np.ones(r.shape, dtype=bool)
    for q in range(1, q_max + 1):
        p = np.rint(r * q)
        ok &= np.abs(r - p / q) > eps * r
    return ok


def _coefficient_grid(M):
    r = np.arange(-M, M + 1)
    nn, mm = np.meshgrid(r, r, indexing="ij")
    nn, mm = nn.ravel(), mm.ravel()
    nz = (nn != 0) | (mm != 0)
    return nn[nz], mm[nz]


def _best_residual_vec(f1, f2, target, M):
    """Minimum |lattice - target| over the index box, vectorised over candidate pumps."""
    m = np.arange(-M, M + 1)[None, :]
    base = (target - m * f2[:, None]) / f1[:, None]
    nf = np.floor(base)
    best = np.full(f1.shape, np.inf)
    for n in (nf, nf + 1):
        n = np.clip(n, -M, M)
        r = np.abs(n * f1[:, None] + m * f2[:, None] - target).min(axis=1)
        best = np.minimum(best, r)
    return best


def _nearest_vec(f1, f2, target, M):
    """Per-candidate nearest lattice point (n, m, residual), float precision."""
    m = np.arange(-M, M + 1)[None, :]
    nf = np.floor((target - m * f2[:, None]) / f1[:, None])
    n = np.clip(np.concatenate([nf, nf + 1], axis=1), -M, M)
    mm = np.broadcast_to(np.concatenate([m, m], axis=1), n.shape)
    r = n * f1[:, None] + mm * f2[:, None] - target
    k = np.argmin(np.abs(r), axis=1)
    rows = np.arange(len(f1))
    return n[rows, k].astype(np.int64), mm[rows, k].astype(np.int64), r[rows, k]


def _finalize(problem, f1, f2):
    M = problem.order_bound
    assignments, residuals = [], []
    for f, _ in problem.targets:
        n, m, _ = nearest_lattice_point(f1, f2, f, M)
        assignments.append((n, m))
        residuals.append(exact_residual(f1, f2, n, m, f))
    sol = MultiplexSolution(float(f1), float(f2), tuple(assignments), tuple(residuals))
    rep = verify_solution(problem, sol)
    return sol if rep.passed and rep.pumps_in_band and rep.indices_in_bound else None


def _single_target(problem, q_max, eps):
    (T, _), = problem.targets
    lo, hi = problem.pump_band
    M = problem.order_bound
    # partner pump at a golden-ratio point of the band, nudged until the guard accepts it
    partners = [lo + (hi - lo) / GOLDEN ** k for k in range(1, 8)]
    pairs = []
    for k in range(1, M + 1):
        fk = T / k
        if not lo <= fk <= hi:
            continue
        for other in partners:
            if other != fk and commensurability_guard(fk, other, q_max, eps):
                pairs.append((fk, other))
                pairs.append((other, fk))
                break
    return pairs


def solve_multiplex(problem: MultiplexProblem, q_max: int = GUARD_Q_MAX,
                    epsilon: float = GUARD_EPSILON) -> list[MultiplexSolution]:
    """Enumerate pump pairs matching every target; ordered best first.

    The two targets farthest apart act as anchors. Each pair of anchor
    coefficient choices fixes the pumps through an exact 2x2 solve; each anchor
    is also shifted by -tol, 0 and +tol so that slack can move to the other
    targets. Candidates outside the pump band or failing the commensurability
    guard are discarded, the rest are checked against all targets. Pump pairs
    are reported with f_p1 < f_p2 since swapping them gives the same lattice.
    """
    M = problem.order_bound
    lo, hi = problem.pump_band
    T = problem.frequencies
    tol = problem.tolerances

    if len(T) == 1:
        cands = _single_target(problem, q_max, epsilon)
    else:
        a, b = int(np.argmin(T)), int(np.argmax(T))
        if T[a] == T[b]:
            a, b = 0, 1
        na, ma = _coefficient_grid(M)
        nb, mb = na, ma
        det = na[:, None] * mb[None, :] - ma[:, None] * nb[None, :]
        valid = det != 0
        detf = np.where(valid, det, 1).astype(float)
        others = [i for i in range(len(T)) if i not in (a, b)]
        found = []
        for oa in (-tol[a], 0.0, tol[a]):
            for ob in (-tol[b], 0.0, tol[b]):
                Ta, Tb = T[a] + oa, T[b] + ob
                f1 = (Ta * mb[None, :] - ma[:, None] * Tb) / detf
                f2 = (na[:, None] * Tb - nb[None, :] * Ta) / detf
                keep = valid & (f1 >= lo) & (f1 <= hi) & (f2 >= lo) & (f2 <= hi)
                f1, f2 = f1[keep], f2[keep]
                if f1.size:
                    g = _guard_vec(f1, f2, q_max, epsilon)
                    f1, f2 = f1[g], f2[g]
                for i in others:
                    if not f1.size:
                        break
                    ok = _best_residual_vec(f1, f2, T[i], M) <= tol[i]
                    f1, f2 = f1[ok], f2[ok]
                found.append(np.column_stack([f1, f2]))
        allc = np.concatenate(found) if found else np.empty((0, 2))
        allc = np.unique(allc, axis=0)
        cands = [tuple(c) for c in allc]

    # (f1, f2) and (f2, f1) span the same lattice; report only f_p1 < f_p2
    cands = [c for c in cands if c[0] < c[1]]
    if not cands:
        return []
    # rank with a vectorised float pass, then confirm in exact arithmetic in order
    c = np.asarray(cands, dtype=float)
    worst = np.zeros(len(c))
    l1 = np.zeros(len(c), dtype=np.int64)
    for f in T:
        n, m, r = _nearest_vec(c[:, 0], c[:, 1], f, M)
        worst = np.maximum(worst, np.abs(r))
        l1 += np.abs(n) + np.abs(m)
    order = np.lexsort((c[:, 0], l1, worst))
    best: dict[tuple, MultiplexSolution] = {}
    for k in order:
        sol = _finalize(problem, c[k, 0], c[k, 1])
        if sol is None:
            continue
        key = sol.assignments
        if key not in best or sol.sort_key() < best[key].sort_key():
            best[key] = sol
        if len(best) >= problem.max_solutions and worst[k] > max(b.max_abs_residual for b in best.values()):
            break
    ranked = sorted(best.values(), key=MultiplexSolution.sort_key)
    return ranked[: problem.max_solutions]
