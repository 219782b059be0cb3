"""One-parameter families of probability measures on a finite space.

Families without analytic derivatives fall back to five-point finite
differences, central in the interior and one-sided near the endpoints.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInput, ThetaOutOfRange
from .measures import OutcomeSpace, StochasticMap, _values

Deriv = Callable[[float], np.ndarray]

# Central and forward five-point stencils (offsets in units of h).
_C1 = (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12)
_C2 = (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12)
_F1 = (np.arange(5), np.array([-25, 48, -36, 16, -3]) / 12)
_F2 = (np.arange(5), np.array([35, -104, 114, -56, 11]) / 12)


class ParametricFamily:
    """theta -> P_theta on ``interval``, with optional analytic derivatives.

    ``derivs`` holds up to three closures returning d^k p_theta / d theta^k.
    """

    def __init__(self, space: OutcomeSpace | int, interval: tuple[float, float],
                 weights: Callable[[float], np.ndarray],
                 derivs: Sequence[Deriv] = (), name: str = "family"):
        self.space = OutcomeSpace.range(space) if isinstance(space, int) else space
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise InvalidInput("the parameter interval must satisfy a < b")
        if len(derivs) > 3:
            raise InvalidInput("at most three analytic derivatives are supported")
        self.interval = (a, b)
        self._weights = weights
        self._derivs = tuple(derivs)
        self.name = name
        self.fd_step = max(1e-6, 1e-5 * (b - a))
        # Second differences divide by h^2, so they need a coarser step.
        self.fd_step2 = max(1e-4, 1e-3 * (b - a))

    @property
    def analytic(self) -> bool:
        return len(self._derivs) > 0

    def check_theta(self, theta: float) -> float:
        a, b = self.interval
        if not a <= theta <= b:
            raise ThetaOutOfRange(f"theta={theta} is outside [{a}, {b}]")
        return float(theta)

    def _raw(self, theta: float) -> np.ndarray:
        return np.asarray(self._weights(theta), dtype=float)

    def weights(self, theta: float) -> np.ndarray:
        return self._raw(self.check_theta(theta))

    def __call__(self, theta: float) -> np.ndarray:
        return self.weights(theta)

    def _fd(self, theta: float, order: int) -> np.ndarray:
        a, b = self.interval
        h = self.fd_step if order == 1 else self.fd_step2
        h = min(h, (b - a) / 4)
        if theta - 2 * h >= a and theta + 2 * h <= b:
            offs, coef = _C1 if order == 1 else _C2
            sign = 1.0
        elif theta + 4 * h <= b:
            offs, coef = _F1 if order == 1 else _F2
            sign = 1.0
        else:
            offs, coef = _F1 if order == 1 else _F2
            offs, sign = -offs, (-1.0) ** order
        vals = np.array([self._raw(theta + k * h) for k in offs])
        return sign * (coef @ vals) / h**order

    def derivative(self, theta: float, order: int = 1) -> np.ndarray:
        """d^order p_theta / d theta^order (order 1 to 3)."""
        theta = self.check_theta(theta)
        if order <= len(self._derivs):
            return np.asarray(self._derivs[order - 1](theta), dtype=float)
        if order in (1, 2):
            return self._fd(theta, order)
        raise InvalidInput("finite differences are provided for orders 1 and 2 only")

    def identifiable(self, points: int = 17, tol: float = 1e-12) -> bool:
        """Spot check that distinct grid parameters give distinct measures."""
        a, b = self.interval
        ws = np.array([self._raw(t) for t in np.linspace(a, b, points)])
        d = np.abs(ws[:, None, :] - ws[None, :, :]).sum(axis=2)
        off = ~np.eye(points, dtype=bool)
        return bool(np.all(d[off] > tol))

    def __repr__(self) -> str:
        return f"ParametricFamily({self.name}, interval={self.interval}, L={self.space.size})"


def bernoulli(a: float = 0.0, b: float = 1.0) -> ParametricFamily:
    """P_theta = (1 - theta, theta)."""
    if not 0.0 <= a < b <= 1.0:
        raise InvalidInput("the Bernoulli interval must lie in [0, 1]")
    one = np.array([-1.0, 1.0])
    zero = np.zeros(2)
    return ParametricFamily(
        2, (a, b), lambda t: np.array([1.0 - t, t]),
        (lambda t: one, lambda t: zero, lambda t: zero), name="bernoulli")


def exponential(x, interval: tuple[float, float], base=None) -> ParametricFamily:
    """P_theta proportional to e^{theta X} P, with P chaotic by default."""
    xv = np.array(_values(x), dtype=float)
    logp = (np.full(xv.size, -math.log(xv.size)) if base is None
            else np.log(np.asarray(_values(base), dtype=float)))

    def w(t):
        lw = t * xv + logp
        e = np.exp(lw - lw.max())
        return e / e.sum()

    def central(t):
        p = w(t)
        mu = p @ xv
        return p, xv - mu

    def d1(t):
        p, f = central(t)
        return p * f

    def d2(t):
        p, f = central(t)
        return p * (f**2 - p @ f**2)

    def d3(t):
        p, f = central(t)
        return p * (f**3 - 3 * (p @ f**2) * f - p @ f**3)

    return ParametricFamily(xv.size, interval, w, (d1, d2, d3), name="exponential")


def table(thetas: Sequence[float], measures: Sequence[Sequence[float]]) -> ParametricFamily:
    """Piecewise-linear interpolation between tabulated measures."""
    ts = np.asarray(thetas, dtype=float)
    ms = np.asarray(measures, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0):
        raise InvalidInput("table thetas must be strictly increasing, at least two")
    if ms.shape[0] != ts.size:
        raise InvalidInput("one measure per tabulated theta is required")
    if np.any(ms < 0) or np.any(np.abs(ms.sum(axis=1) - 1) > 1e-12):
        raise InvalidInput("tabulated rows must be probability vectors")

    def w(t):
        return np.array([np.interp(t, ts, ms[:, k]) for k in range(ms.shape[1])])

    return ParametricFamily(ms.shape[1], (ts[0], ts[-1]), w, name="table")


def segment(p, q) -> ParametricFamily:
    """theta p + (1 - theta) q on [0, 1]; runs from q to p."""
    wp = np.array(_values(p), dtype=float)
    wq = np.array(_values(q), dtype=float)
    if wp.shape != wq.shape:
        raise InvalidInput("segment endpoints live on different spaces")
    diff = wp - wq
    zero = np.zeros_like(diff)
    return ParametricFamily(wp.size, (0.0, 1.0), lambda t: t * wp + (1 - t) * wq,
                            (lambda t: diff, lambda t: zero, lambda t: zero), name="segment")


def pushforward(family: ParametricFamily, phi: StochasticMap) -> ParametricFamily:
    """theta -> Phi(P_theta); derivatives push forward linearly."""
    rows = phi.rows
    if rows.shape[0] != family.space.size:
        raise InvalidInput("the stochastic map does not start on the family's space")
    derivs = [(lambda t, k=k: family.derivative(t, k) @ rows)
              for k in range(1, len(family._derivs) + 1)]
    return ParametricFamily(phi.target, family.interval,
                            lambda t: family._raw(t) @ rows, derivs,
                            name=f"pushforward({family.name})")
