"""Cumulant generating functions, tilted measures and Legendre rate functions.

A :class:`CgfModel` pairs a probability measure with a random variable and
restricts both to the support of the measure. The rate function is the
Fenchel-Legendre transform of the CGF; inside ``(m, M)`` it is evaluated
through the unique root of ``C'(alpha) = theta``, found by bisection on an
exponentially expanded bracket. ``C'`` is strictly increasing, so bisection
cannot fail, while Newton steps stall on the plateaus near ``m`` and ``M``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DegenerateVariable,
    InvalidInput,
    NonConvergence,
    OrderTooLarge,
    ThetaOutOfOpenRange,
)
from .measures import DEFAULT_CAP, ProbMeasure, _values, as_prob
from .mtypes import compositions, type_class_log_probability

SNAP_REL = 1e-12
MAX_MOMENT_ORDER = 20


class CgfModel:
    """The pair (P, X) restricted to supp P."""

    def __init__(self, p, x):
        p = as_prob(p)
        xv = _values(x)
        if xv.shape != p.weights.shape:
            raise InvalidInput("the random variable and the measure have different sizes")
        self.p = p
        self.x = np.array(xv, dtype=float)
        self._on = p.weights > 0
        self.weights = p.weights[self._on]
        self.values = self.x[self._on]
        self.logp = np.log(self.weights)
        self.m = float(self.values.min())
        self.M = float(self.values.max())
        self.mean = float(np.dot(self.weights, self.values))
        self.degenerate = self.m == self.M
        self.p_min_set = float(self.weights[self.values == self.m].sum())
        self.p_max_set = float(self.weights[self.values == self.M].sum())

    @property
    def variance(self) -> float:
        return float(np.dot(self.weights, (self.values - self.mean) ** 2))

    def _log_tilt(self, alpha: float) -> np.ndarray:
        return alpha * self.values + self.logp

    def _tilt(self, alpha: float) -> np.ndarray:
        lw = self._log_tilt(alpha)
        w = np.exp(lw - lw.max())
        return w / w.sum()

    def cgf(self, alpha: float) -> float:
        """C(alpha) = log E(e^{alpha X}), max-shifted."""
        return float(logsumexp(self._log_tilt(alpha)))

    def cgf_d1(self, alpha: float) -> float:
        """C'(alpha): the mean of X under the tilted measure."""
        return float(np.dot(self._tilt(alpha), self.values))

    def cgf_d2(self, alpha: float) -> float:
        """C''(alpha): the variance of X under the tilted measure."""
        q = self._tilt(alpha)
        mu = np.dot(q, self.values)
        return float(np.dot(q, (self.values - mu) ** 2))

    def tilted_measure(self, alpha: float) -> ProbMeasure:
        w = np.zeros(self.p.weights.size)
        w[self._on] = self._tilt(alpha)
        return ProbMeasure.normalized(w, self.p.space)

    def solve_alpha(self, theta: float) -> float:
        """The unique alpha with C'(alpha) = theta, for theta in (m, M)."""
        if self.degenerate:
            raise DegenerateVariable("X is constant on the support of P")
        if not self.m < theta < self.M:
            raise ThetaOutOfOpenRange(f"theta={theta} is not inside ({self.m}, {self.M})")
        lo, hi = -1.0, 1.0
        while self.cgf_d1(lo) > theta:
            lo *= 2.0
            if lo < -1e300:
                raise NonConvergence("could not bracket alpha(theta) from below")
        while self.cgf_d1(hi) < theta:
            hi *= 2.0
            if hi > 1e300:
                raise NonConvergence("could not bracket alpha(theta) from above")
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            d = self.cgf_d1(mid)
            if d < theta:
                lo = mid
            elif d > theta:
                hi = mid
            else:
                return mid
        return lo if abs(self.cgf_d1(lo) - theta) <= abs(self.cgf_d1(hi) - theta) else hi

    def rate(self, theta: float) -> float:
        """I(theta) = sup_alpha (alpha theta - C(alpha)) as an extended real."""
        if self.degenerate:
            return 0.0 if theta == self.mean else math.inf
        snap = SNAP_REL * (self.M - self.m)
        if abs(theta - self.M) <= snap:
            return -math.log(self.p_max_set)
        if abs(theta - self.m) <= snap:
            return -math.log(self.p_min_set)
        if theta < self.m or theta > self.M:
            return math.inf
        if theta == self.mean:
            return 0.0
        alpha = self.solve_alpha(theta)
        return max(alpha * theta - self.cgf(alpha), 0.0)


@dataclass(frozen=True)
class RateFunction:
    model: CgfModel

    def __call__(self, theta: float) -> float:
        return self.model.rate(theta)

    def alpha(self, theta: float) -> float:
        return self.model.solve_alpha(theta)

    def interval_infimum(self, a: float, b: float) -> float:
        """inf of I over [a, b]; zero when the interval contains E(X)."""
        if a > b:
            raise InvalidInput("empty interval")
        mean = self.model.mean
        if a <= mean <= b:
            return 0.0
        return self(a) if a > mean else self(b)


def solve_alpha_of_theta(model: CgfModel, theta: float) -> float:
    return model.solve_alpha(theta)


def rate_function(rf: RateFunction | CgfModel, theta: float) -> float:
    model = rf.model if isinstance(rf, RateFunction) else rf
    return model.rate(theta)


def inverse_legendre_check(rf: RateFunction | CgfModel, alpha: float) -> float:
    """|sup_theta (theta alpha - I(theta)) - C(alpha)|, with the sup at theta = C'(alpha)."""
    model = rf.model if isinstance(rf, RateFunction) else rf
    if model.degenerate:
        raise DegenerateVariable("X is constant on the support of P")
    theta = model.cgf_d1(alpha)
    best = theta * alpha - model.rate(theta)
    return abs(best - model.cgf(alpha))


def moments_cumulants(direction: str, values) -> list[float]:
    """Convert raw moments to cumulants or back.

    ``direction`` is ``"to_moments"`` (input cumulants) or ``"to_cumulants"``
    (input moments). Uses M_n = sum_k binom(n-1, k) C_{k+1} M_{n-1-k}.
    """
    vals = [float(v) for v in values]
    K = len(vals)
    if K > MAX_MOMENT_ORDER:
        raise OrderTooLarge(f"order {K} exceeds {MAX_MOMENT_ORDER}")
    if direction == "to_moments":
        cum = vals
        mom = [1.0]
        for n in range(1, K + 1):
            mom.append(sum(math.comb(n - 1, k) * cum[k] * mom[n - 1 - k] for k in range(n)))
        return mom[1:]
    if direction == "to_cumulants":
        mom = [1.0] + vals
        cum: list[float] = []
        for n in range(1, K + 1):
            rest = sum(math.comb(n - 1, k) * cum[k] * mom[n - 1 - k] for k in range(n - 1))
            cum.append(mom[n] - rest)
        return cum
    raise InvalidInput(f"unknown direction {direction!r}")


def _window_log_probability(model: CgfModel, N: int, a: float, b: float, cap: int) -> float:
    types = compositions(model.values.size, N, cap)
    sums = types @ model.values
    tol = 64 * np.finfo(float).eps * N * max(1.0, float(np.abs(model.values).max()))
    keep = (sums >= N * a - tol) & (sums <= N * b + tol)
    if not np.any(keep):
        return -math.inf
    logs = type_class_log_probability(model.weights, types[keep])
    return float(logsumexp(logs))


def cramer_exact_log(model: CgfModel, N: int, a: float, b: float, cap: int = DEFAULT_CAP) -> float:
    """log P_N{S_N/N in [a, b]} summed exactly over type classes."""
    if N < 1:
        raise InvalidInput("N must be positive")
    return _window_log_probability(model, N, a, b, cap)


def cramer_exact(model: CgfModel, N: int, a: float, b: float, cap: int = DEFAULT_CAP) -> float:
    return math.exp(cramer_exact_log(model, N, a, b, cap))


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Independent substream for one replica, fixed by (seed, replica index)."""
    return np.random.default_rng([int(replica), int(seed)])


def cramer_mc(model: CgfModel, N: int, a: float, b: float, reps: int, seed: int = 0) -> float:
    """Empirical frequency of S_N/N in [a, b] over seeded replicas."""
    if reps < 1:
        raise InvalidInput("reps must be positive")
    hits = 0
    for r in range(reps):
        counts = replica_rng(seed, r).multinomial(N, model.weights)
        mean = float(counts @ model.values) / N
        hits += a <= mean <= b
    return hits / reps
