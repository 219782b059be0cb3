"""Sampling, empirical measures and exact Sanov-type probabilities.

Constraint sets are tested on empirical measures at type resolution, i.e.
on the grid counts/N of the simplex. Closed sets keep their boundary types
and open sets drop them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import AlphabetTooLarge, EmptySample, FaithfulnessError, InvalidInput
from .ldp import CgfModel, RateFunction
from .measures import DEFAULT_CAP, ProbMeasure, _values, as_prob
from .mtypes import (
    TypeVector,
    compositions,
    enumerate_types,
    type_class_log_probability,
    type_class_probability,
)

__all__ = [
    "BOUNDARY_TOL", "ConstraintSet", "SanovReport", "TypeVector", "compositions",
    "empirical_counts", "empirical_measure", "enumerate_types", "sample_iid",
    "sanov_experiment", "sanov_log_probability", "sanov_probability", "sanov_rate",
    "type_class_log_probability", "type_class_probability",
]

BOUNDARY_TOL = 1e-12


def sample_iid(p, N: int, seed: int = 0) -> np.ndarray:
    """N iid outcome indices by inverting the CDF on a seeded PCG64 stream."""
    w = _values(as_prob(p))
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    u = np.random.default_rng(seed).random(N)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, w.size - 1)


def empirical_counts(sample: Sequence[int], L: int) -> np.ndarray:
    sample = np.asarray(sample, dtype=np.int64)
    if sample.size == 0:
        raise EmptySample("the sample is empty")
    return np.bincount(sample, minlength=L)


def empirical_measure(sample: Sequence[int], L: int | None = None) -> ProbMeasure:
    sample = np.asarray(sample, dtype=np.int64)
    if sample.size == 0:
        raise EmptySample("the sample is empty")
    L = int(sample.max()) + 1 if L is None else L
    counts = empirical_counts(sample, L)
    return ProbMeasure(counts / sample.size)


@dataclass(frozen=True)
class ConstraintSet:
    """A set Γ of probability measures: a d_V ball, a halfspace or a predicate.

    ``direction`` for halfspaces is one of ``"ge"``, ``"le"`` or ``"eq"``
    (∫X dQ compared with ``threshold``).
    """

    kind: str
    center: tuple[float, ...] | None = None
    radius: float | None = None
    x: tuple[float, ...] | None = None
    threshold: float | None = None
    direction: str = "ge"
    predicate: Callable[[np.ndarray], bool] | None = None
    closed: bool = True

    @classmethod
    def ball(cls, center, radius: float, closed: bool = True) -> "ConstraintSet":
        return cls("ball", center=tuple(_values(center)), radius=float(radius), closed=closed)

    @classmethod
    def halfspace(cls, x, threshold: float, direction: str = "ge",
                  closed: bool = True) -> "ConstraintSet":
        if direction not in ("ge", "le", "eq"):
            raise InvalidInput(f"unknown halfspace direction {direction!r}")
        return cls("halfspace", x=tuple(_values(x)), threshold=float(threshold),
                   direction=direction, closed=closed)

    @classmethod
    def from_predicate(cls, fn: Callable[[np.ndarray], bool]) -> "ConstraintSet":
        return cls("predicate", predicate=fn)

    def contains_many(self, q: np.ndarray) -> np.ndarray:
        """Membership for each row of ``q``."""
        q = np.atleast_2d(q)
        if self.kind == "ball":
            d = np.abs(q - np.asarray(self.center)).sum(axis=1)
            tol = BOUNDARY_TOL
            return d <= self.radius + tol if self.closed else d < self.radius - tol
        if self.kind == "halfspace":
            v = q @ np.asarray(self.x)
            t = self.threshold
            tol = BOUNDARY_TOL * max(1.0, float(np.abs(self.x).max()))
            if self.direction == "eq":
                return np.abs(v - t) <= tol
            if self.direction == "le":
                v, t = -v, -t
            return v >= t - tol if self.closed else v > t + tol
        if self.kind == "predicate":
            return np.array([bool(self.predicate(row)) for row in q])
        raise InvalidInput(f"unknown constraint kind {self.kind!r}")

    def __contains__(self, q) -> bool:
        return bool(self.contains_many(np.asarray(_values(q), dtype=float))[0])


def _faithful(p) -> np.ndarray:
    w = _values(as_prob(p))
    if np.any(w <= 0):
        raise FaithfulnessError("Sanov computations require a faithful measure")
    return w


def sanov_log_probability(p, gamma: ConstraintSet, N: int, cap: int = DEFAULT_CAP) -> float:
    w = _faithful(p)
    types = compositions(w.size, N, cap)
    inside = gamma.contains_many(types / N)
    if not np.any(inside):
        return -math.inf
    return float(logsumexp(type_class_log_probability(w, types[inside])))


def sanov_probability(p, gamma: ConstraintSet, N: int, cap: int = DEFAULT_CAP) -> tuple[float, float]:
    """(P_N{δ ∈ Γ}, (1/N) log of it), exact over type classes."""
    lp = sanov_log_probability(p, gamma, N, cap)
    return math.exp(lp), lp / N


def _halfspace_rate(w: np.ndarray, gamma: ConstraintSet) -> float:
    rf = RateFunction(CgfModel(w, np.asarray(gamma.x)))
    t = gamma.threshold
    if gamma.direction == "eq":
        return rf(t)
    if gamma.direction == "ge":
        return rf.interval_infimum(t, math.inf) if t <= rf.model.M else math.inf
    return rf.interval_infimum(-math.inf, t) if t >= rf.model.m else math.inf


def sanov_rate(p, gamma: ConstraintSet, resolution: float = 1e-3,
               max_grid: int = 2_000_000) -> float:
    """inf over Γ of S(Q|P).

    Halfspaces go through the contraction principle (the rate function of X).
    Other sets are minimized on a simplex grid of step ``resolution`` followed
    by a projected compass search that can slide along the boundary of Γ.
    """
    w = _faithful(p)
    if gamma.kind == "halfspace":
        return _halfspace_rate(w, gamma)
    if w in gamma:
        return 0.0
    L = w.size
    if L > 4:
        raise AlphabetTooLarge("generic constraint minimization supports L <= 4")
    n = max(1, int(round(1.0 / resolution)))
    while math.comb(n + L - 1, L - 1) > max_grid:
        n //= 2
    grid = compositions(L, n, cap=max_grid) / n
    inside = gamma.contains_many(grid)
    if not np.any(inside):
        return math.inf
    cand = grid[inside]
    k = int(np.argmin(_kl_rows(cand, w)))
    return _compass_search(w, gamma, cand[k].copy(), 1.0 / n)


def _search_directions(L: int, reach: int = 3) -> np.ndarray:
    """Tangent directions of the simplex with small integer entries, unit L1 norm.

    A rich direction set lets the compass search slide along oblique
    constraint boundaries, where moves along e_i - e_j alone would stall.
    """
    grid = np.array(list(itertools.product(range(-reach, reach + 1), repeat=L - 1)))
    vecs = np.column_stack([grid, -grid.sum(axis=1)])
    vecs = vecs[np.abs(vecs).sum(axis=1) > 0]
    vecs = vecs / np.abs(vecs).sum(axis=1, keepdims=True) * 2
    return np.unique(np.round(vecs, 15), axis=0)


def _kl_rows(q: np.ndarray, w: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(q > 0, q * np.log(q / w), 0.0).sum(axis=1)


def _compass_search(w: np.ndarray, gamma: ConstraintSet, q: np.ndarray, step: float) -> float:
    """Minimize S(.|w) over Γ from a feasible start, halving the step on failure.

    When no compass move improves, the boundary normal is estimated from
    which probes left Γ, and a step along the projected negative gradient
    is pulled back into Γ by bisection along that normal.
    """
    dirs = _search_directions(w.size)
    best = float(_kl_rows(q[None], w)[0])
    while step > 1e-13:
        trials = q + step * dirs
        ok = np.all(trials >= 0, axis=1)
        inside = np.zeros(len(dirs), dtype=bool)
        if np.any(ok):
            inside[ok] = gamma.contains_many(trials[ok])
        if np.any(inside):
            vals = _kl_rows(trials[inside], w)
            k = int(np.argmin(vals))
            if vals[k] < best - 1e-16:
                q, best = trials[inside][k], float(vals[k])
                continue
        slid = _slide(w, gamma, q, step, dirs, inside)
        if slid is not None and slid[1] < best - 1e-16:
            q, best = slid
            continue
        step /= 2
    return best


def _boundary_point(gamma, q, d, step) -> np.ndarray | None:
    """Bisect q + t d, t in [0, step], for the last point inside Γ."""
    lo, hi = 0.0, step
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        trial = q + mid * d
        if np.all(trial >= 0) and trial in gamma:
            lo = mid
        else:
            hi = mid
    return q + lo * d if lo > 0 else None


def _slide(w, gamma, q, step, dirs, inside):
    """One step along the negative gradient projected onto a fitted boundary plane."""
    if inside.all() or not inside.any() or np.any(q <= 0):
        return None
    L = w.size
    pts = [q]
    for d in dirs[~inside]:
        b = _boundary_point(gamma, q, d, step)
        if b is not None:
            pts.append(b)
    if len(pts) < L - 1:
        return None
    pts = np.array(pts)
    # Orthonormal basis of the sum-zero subspace, in which the boundary is a hyperplane.
    basis = np.linalg.qr(np.eye(L)[:, :L - 1] - 1.0 / L)[0]
    y = (pts - pts.mean(axis=0)) @ basis
    normal = basis @ np.linalg.svd(y)[2][-1]
    # Orient the normal into Γ.
    if normal @ (dirs[inside].mean(axis=0) - dirs[~inside].mean(axis=0)) < 0:
        normal = -normal
    grad = np.log(q / w)
    grad -= grad.mean()
    tangent = -(grad - (grad @ normal) * normal)
    tangent -= tangent.mean()
    tl = np.abs(tangent).sum()
    if tl <= 1e-12 * np.abs(grad).sum():
        return None
    base = q + step * tangent / tl
    reach = 2.0 * step
    if np.any(base + reach * normal < 0) or base + reach * normal not in gamma:
        return None
    lo, hi = 0.0, reach
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        trial = base + mid * normal
        if np.all(trial >= 0) and trial in gamma:
            hi = mid
        else:
            lo = mid
    trial = base + hi * normal
    if np.any(trial < 0):
        return None
    return trial, float(_kl_rows(trial[None], w)[0])


@dataclass
class SanovReport:
    rows: list[tuple[int, float, float]]
    limit: float
    within_envelope: bool

    def to_rows(self) -> list[dict]:
        return [{"N": n, "exponent": e, "gap": g, "limit": self.limit} for n, e, g in self.rows]


def sanov_experiment(p, gamma: ConstraintSet, N_grid: Sequence[int],
                     resolution: float = 1e-3, slack: float = 0.02,
                     cap: int = DEFAULT_CAP) -> SanovReport:
    """Exact finite-N exponents against -inf_Γ S(Q|P).

    The envelope is |gap| <= L log(N + 1) / N + slack at every N.
    """
    w = _faithful(p)
    limit = -sanov_rate(w, gamma, resolution)
    rows = []
    ok = True
    for N in N_grid:
        _, e = sanov_probability(w, gamma, int(N), cap)
        gap = e - limit
        rows.append((int(N), e, gap))
        ok &= abs(gap) <= w.size * math.log(N + 1) / N + slack
    return SanovReport(rows=rows, limit=limit, within_envelope=bool(ok))
