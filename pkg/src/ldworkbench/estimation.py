"""Cramér-Rao bounds, the maximum-likelihood estimator and efficiency experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import EmptySample, FaithfulnessError, InvalidInput
from .families import ParametricFamily
from .fisher import fisher_info
from .measures import DEFAULT_CAP, _values
from .mtypes import compositions, type_class_log_probability

GOLDEN = (math.sqrt(5) - 1) / 2
BOUNDARY_MARGIN = 0.05


def cross_entropy_surface(family: ParametricFamily, theta: float, theta_prime: float) -> float:
    """S(theta, theta') = -sum P_theta log P_theta'."""
    p = family.weights(theta)
    q = family.weights(theta_prime)
    on = p > 0
    if np.any(q[on] <= 0):
        return math.inf
    return float(-np.dot(p[on], np.log(q[on])))


def cramer_rao_gap(family: ParametricFamily, estimator, theta: float, N: int = 1,
                   cap: int = DEFAULT_CAP) -> float:
    """E((T - theta)^2) - [d/dtheta E(T)]^2 / (N I(theta)).

    For N = 1 ``estimator`` is a random variable on the outcome space. For
    N > 1 it is a callable on count vectors, i.e. an estimator that depends
    on the sample only through its type.
    """
    p = family.weights(theta)
    if np.any(p <= 0):
        raise FaithfulnessError("the Cramér-Rao bound needs a faithful P_theta")
    d1 = family.derivative(theta, 1)
    info = fisher_info(family, theta)
    if N == 1 and not callable(estimator):
        t = _values(estimator)
        counts = np.eye(p.size, dtype=np.int64)
    else:
        if not callable(estimator):
            raise InvalidInput("for N > 1 the estimator must be a function of the counts")
        counts = compositions(p.size, N, cap)
        t = np.array([float(estimator(c)) for c in counts])
    probs = np.exp(type_class_log_probability(p, counts))
    # d/dtheta of a type-class probability is that probability times sum n_k p'_k / p_k.
    score = counts @ (d1 / p)
    mse = float(probs @ (t - theta) ** 2)
    dmean = float(probs @ (t * score))
    if info == 0.0:
        return mse if dmean == 0.0 else -math.inf
    return mse - dmean**2 / (N * info)


@dataclass(frozen=True)
class MleResult:
    estimate: float
    boundary_hit: bool
    loglik_at_estimate: float
    grid_points: int

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "boundary_hit": self.boundary_hit,
                "loglik_at_estimate": self.loglik_at_estimate, "grid_points": self.grid_points}


class _Likelihood:
    """Entropy function theta -> -sum_k n_k log p_theta(k) for count vectors."""

    def __init__(self, family: ParametricFamily, grid_points: int):
        if grid_points < 2:
            raise InvalidInput("the MLE grid needs at least two points")
        self.family = family
        a, b = family.interval
        self.grid = np.linspace(a, b, grid_points)
        w = np.array([family.weights(t) for t in self.grid])
        with np.errstate(divide="ignore"):
            self.grid_logw = np.log(w)

    def value(self, counts: np.ndarray, theta: float) -> float:
        w = self.family.weights(theta)
        on = counts > 0
        if np.any(w[on] <= 0):
            return math.inf
        return float(-np.dot(counts[on], np.log(w[on])))

    def score(self, counts: np.ndarray, theta: float) -> float:
        w = self.family.weights(theta)
        d = self.family.derivative(theta, 1)
        on = counts > 0
        return float(-np.dot(counts[on], d[on] / w[on]))

    def grid_values(self, counts: np.ndarray) -> np.ndarray:
        on = counts > 0
        lw = self.grid_logw[:, on]
        with np.errstate(invalid="ignore"):
            vals = -(lw @ counts[on])
        return np.where(np.isnan(vals), math.inf, vals)

    def fit(self, counts: np.ndarray, tol: float) -> MleResult:
        a, b = self.family.interval
        vals = self.grid_values(counts)
        i = int(np.argmin(vals))  # first minimum: smallest theta among grid ties
        lo = self.grid[max(i - 1, 0)]
        hi = self.grid[min(i + 1, self.grid.size - 1)]
        x = self._refine(counts, lo, hi, tol)
        fx = self.value(counts, x)
        hit = False
        for edge, inward in ((a, 1.0), (b, -1.0)):
            if abs(x - edge) <= tol:
                fe = self.value(counts, edge)
                # Interior points win exact ties unless S does not decrease
                # into the interior, in which case no interior point attains
                # the minimum.
                if fe < fx or x == edge or (fe == fx and inward * self.score(counts, edge) >= 0):
                    x, fx, hit = edge, fe, True
        return MleResult(float(x), hit, -fx, self.grid.size)

    def _refine(self, counts: np.ndarray, lo: float, hi: float, tol: float) -> float:
        s_lo = self.score(counts, lo)
        s_hi = self.score(counts, hi)
        if s_lo <= 0 <= s_hi and s_lo < s_hi:
            # A sign change of the score brackets the stationary point.
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if self.score(counts, mid) < 0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        return self._golden(counts, lo, hi, tol)

    def _golden(self, counts: np.ndarray, lo: float, hi: float, tol: float) -> float:
        c = hi - GOLDEN * (hi - lo)
        d = lo + GOLDEN * (hi - lo)
        fc, fd = self.value(counts, c), self.value(counts, d)
        while hi - lo > tol:
            if fc <= fd:
                hi, d, fd = d, c, fc
                c = hi - GOLDEN * (hi - lo)
                fc = self.value(counts, c)
            else:
                lo, c, fc = c, d, fd
                d = lo + GOLDEN * (hi - lo)
                fd = self.value(counts, d)
        cands = [(self.value(counts, t), t) for t in (lo, 0.5 * (lo + hi), hi)]
        return min(cands)[1]


def _counts(sample, L: int) -> np.ndarray:
    s = np.asarray(sample, dtype=np.int64)
    if s.size == 0:
        raise EmptySample("the sample is empty")
    if s.min() < 0 or s.max() >= L:
        raise InvalidInput("sample outcomes must be indices into the family's space")
    return np.bincount(s, minlength=L).astype(float)


def mle(family: ParametricFamily, sample: Sequence[int], grid_points: int = 512,
        refine_tol: float | None = None) -> MleResult:
    """Minimize theta -> -sum log P_theta(omega_k) over the family's interval.

    A uniform grid locates the best cell; the neighbouring cells are then
    refined by bisection on the score when it changes sign there, and by
    golden-section search otherwise.
    """
    a, b = family.interval
    tol = 1e-10 * (b - a) if refine_tol is None else refine_tol
    counts = _counts(sample, family.space.size)
    return _Likelihood(family, grid_points).fit(counts, tol)


def bernoulli_risk_exact(a: float, b: float, theta: float, N: int) -> float:
    """E((theta_hat - theta)^2) for the clamped Bernoulli MLE, summed over k."""
    if not 0 < a < b < 1:
        raise InvalidInput("the interval must lie inside (0, 1)")
    if not 0 < theta < 1:
        raise InvalidInput("theta must lie in (0, 1)")
    k = np.arange(N + 1)
    logpmf = (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)
              + k * math.log(theta) + (N - k) * math.log1p(-theta))
    est = np.clip(k / N, a, b)
    return float(np.exp(logpmf) @ (est - theta) ** 2)


def bernoulli_deviation_probability(a: float, b: float, theta: float, N: int, eps: float) -> float:
    """Exact P{|theta_hat - theta| >= eps} for the clamped Bernoulli MLE."""
    k = np.arange(N + 1)
    logpmf = (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)
              + k * math.log(theta) + (N - k) * math.log1p(-theta))
    est = np.clip(k / N, a, b)
    return float(np.exp(logpmf)[np.abs(est - theta) >= eps].sum())


@dataclass(frozen=True)
class EfficiencyRow:
    theta: float
    N: int
    reps: int
    n_risk: float
    n_risk_se: float
    mean_abs_error: float
    inverse_fisher: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def efficiency_experiment(family: ParametricFamily, theta_grid: Sequence[float],
                          N_grid: Sequence[int], reps: int, seed: int = 0,
                          grid_points: int = 512) -> list[EfficiencyRow]:
    """Monte Carlo N E((theta_hat - theta)^2) with standard errors.

    Replica r at (theta index i, N) draws from the substream keyed by
    (seed, i, N, r), so results do not depend on evaluation order.
    """
    if reps < 2:
        raise InvalidInput("at least two replicas are needed for a standard error")
    a, b = family.interval
    margin = BOUNDARY_MARGIN * (b - a)
    for t in theta_grid:
        if not a + margin <= t <= b - margin:
            raise InvalidInput(f"theta={t} is too close to the boundary for an efficiency report")
    lik = _Likelihood(family, grid_points)
    tol = 1e-10 * (b - a)
    rows = []
    for i, theta in enumerate(theta_grid):
        p = family.weights(theta)
        inv_info = 1.0 / fisher_info(family, theta)
        for N in N_grid:
            N = int(N)
            errs = np.empty(reps)
            for r in range(reps):
                rng = np.random.default_rng([r, N, i, int(seed)])
                counts = rng.multinomial(N, p).astype(float)
                errs[r] = lik.fit(counts, tol).estimate - theta
            sq = N * errs**2
            rows.append(EfficiencyRow(
                theta=float(theta), N=N, reps=reps, n_risk=float(sq.mean()),
                n_risk_se=float(sq.std(ddof=1) / math.sqrt(reps)),
                mean_abs_error=float(np.abs(errs).mean()), inverse_fisher=inv_info))
    return rows



def uniform_lln_deviation(family: ParametricFamily, theta_grid: Sequence[float], N: int,
                          reps: int, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo mean and standard error of sup |S_{theta' N}/N - S(theta, theta')|.

    The supremum runs over pairs (theta, theta') from the grid, with the
    sample drawn from P_theta^N.
    """
    if reps < 2:
        raise InvalidInput("at least two replicas are needed for a standard error")
    thetas = [family.check_theta(t) for t in theta_grid]
    logw = np.log(np.array([family.weights(t) for t in thetas]))
    cross = np.array([[cross_entropy_surface(family, t, u) for u in thetas] for t in thetas])
    sups = np.empty(reps)
    for r in range(reps):
        worst = 0.0
        for i, t in enumerate(thetas):
            rng = np.random.default_rng([r, int(N), i, int(seed)])
            counts = rng.multinomial(int(N), family.weights(t))
            worst = max(worst, float(np.max(np.abs(-(logw @ counts) / N - cross[i]))))
        sups[r] = worst
    return float(sups.mean()), float(sups.std(ddof=1) / math.sqrt(reps))
