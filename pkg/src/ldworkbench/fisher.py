"""Fisher information, local divergence limits and the Fisher-Rao geometry.

The Fisher metric on the faithful simplex is g_p(u, v) = sum u_k v_k / p_k.
Under p -> sqrt(p) it becomes a quarter of the Euclidean metric on the unit
sphere, which is what the geodesic distance below measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import FaithfulnessError, InvalidInput, QuadratureNonConvergence
from .families import ParametricFamily
from .measures import StochasticMap, _values

MAX_PANELS = 2**20
START_PANELS = 256
QUAD_RTOL = 1e-8


def _faithful_at(family: ParametricFamily, theta: float) -> np.ndarray:
    p = family.weights(theta)
    if np.any(p <= 0):
        raise FaithfulnessError(f"P_theta is not faithful at theta={theta}")
    return p


def fisher_info(family: ParametricFamily, theta: float) -> float:
    """I(theta) = sum (dp/dtheta)^2 / p."""
    p = _faithful_at(family, theta)
    d = family.derivative(theta, 1)
    return float(np.sum(d * d / p))


class FisherDiagnostics(NamedTuple):
    info: float
    score_mean: float
    score_variance: float
    hessian_mean: float

    def max_discrepancy(self) -> float:
        return max(abs(self.info - self.score_variance), abs(self.info - self.hessian_mean))


def fisher_consistency(family: ParametricFamily, theta: float) -> FisherDiagnostics:
    """The three expressions of I(theta): sum p'^2/p, Var(S'), E(S'') with S = -log p."""
    p = _faithful_at(family, theta)
    d1 = family.derivative(theta, 1)
    d2 = family.derivative(theta, 2)
    score = -d1 / p
    mean = float(p @ score)
    var = float(p @ (score - mean) ** 2)
    hess = float(p @ (-d2 / p + score**2))
    return FisherDiagnostics(float(np.sum(d1 * d1 / p)), mean, var, hess)


def sphere_speed_sq(family: ParametricFamily, theta: float) -> float:
    """|d/dtheta sqrt(p_theta)|^2 in the Euclidean metric."""
    p = _faithful_at(family, theta)
    s_dot = family.derivative(theta, 1) / (2 * np.sqrt(p))
    return float(s_dot @ s_dot)


def _kl_close(p: np.ndarray, q: np.ndarray) -> float:
    """S(p|q) for nearby faithful p, q, written as sum q (r log r - r + 1) with r = p/q.

    Each term is non-negative and of order (p - q)^2, so no cancellation
    between terms of order |p - q| occurs.
    """
    d = (p - q) / q
    return float(np.sum(q * ((1 + d) * np.log1p(d) - d)))


def _js_close(p: np.ndarray, q: np.ndarray) -> float:
    m = 0.5 * (p + q)
    return 0.5 * (_kl_close(p, m) + _kl_close(q, m))


def _neville_at_zero(x: Sequence[float], y: Sequence[float]) -> float:
    """Value at 0 of the interpolating polynomial through (x_i, y_i)."""
    x = np.asarray(x, dtype=float)
    t = np.array(y, dtype=float)
    n = x.size
    for k in range(1, n):
        t[: n - k] = (x[k:] * t[: n - k] - x[: n - k] * t[1 : n - k + 1]) / (x[k:] - x[: n - k])
    return float(t[0])


def default_eps_grid(levels: int = 6) -> np.ndarray:
    return 1e-2 * 2.0 ** -np.arange(levels)


def local_kl_limit(family: ParametricFamily, theta: float, eps_grid=None,
                   kind: str = "L") -> float:
    """Extrapolate D(eps)/eps^2 to eps = 0.

    ``kind`` selects D: ``"L"`` is S(P_{theta+eps}|P_theta), ``"R"`` is
    S(P_theta|P_{theta+eps}) and ``"js"`` the Jensen-Shannon entropy. The
    first two tend to I(theta)/2 and the last to I(theta)/8. Steps are taken
    towards the interior, so theta may sit near an endpoint.
    """
    eps = default_eps_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    a, b = family.interval
    if not a < theta < b:
        raise InvalidInput("the local limit needs an interior theta")
    sign = 1.0 if theta + eps.max() <= b else -1.0
    p0 = _faithful_at(family, theta)
    ratios = []
    for e in eps:
        p1 = _faithful_at(family, theta + sign * e)
        if kind == "L":
            v = _kl_close(p1, p0)
        elif kind == "R":
            v = _kl_close(p0, p1)
        elif kind == "js":
            v = _js_close(p1, p0)
        else:
            raise InvalidInput(f"unknown divergence kind {kind!r}")
        ratios.append(v / e**2)
    # D(eps)/eps^2 is smooth in the signed step, so extrapolate in sign*eps.
    return _neville_at_zero(sign * eps, ratios)


def _simpson(f, a: float, b: float, panels: int) -> float:
    x = np.linspace(a, b, 2 * panels + 1)
    y = np.array([f(t) for t in x])
    h = (b - a) / (2 * panels)
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def adaptive_simpson(f, a: float, b: float, rtol: float = QUAD_RTOL,
                     start: int = START_PANELS, max_panels: int = MAX_PANELS) -> float:
    """Composite Simpson, doubling panels until successive values agree to ``rtol``."""
    panels = start
    prev = _simpson(f, a, b, panels)
    while panels < max_panels:
        panels *= 2
        cur = _simpson(f, a, b, panels)
        if abs(cur - prev) <= rtol * abs(cur) or (cur == 0.0 and prev == 0.0):
            return cur
        prev = cur
    raise QuadratureNonConvergence(f"Simpson rule did not settle within {max_panels} panels")


@dataclass(frozen=True)
class SimplexPath:
    """A family viewed as a path, optionally restricted to a sub-interval."""

    family: ParametricFamily
    start: float | None = None
    stop: float | None = None

    @property
    def bounds(self) -> tuple[float, float]:
        a, b = self.family.interval
        lo = a if self.start is None else self.family.check_theta(self.start)
        hi = b if self.stop is None else self.family.check_theta(self.stop)
        return lo, hi


def _as_path(path) -> SimplexPath:
    return path if isinstance(path, SimplexPath) else SimplexPath(path)


def path_energy(path) -> float:
    """Integral of I(theta) along the path."""
    path = _as_path(path)
    a, b = path.bounds
    if a == b:
        return 0.0
    return adaptive_simpson(lambda t: fisher_info(path.family, t), a, b)


def path_length(path) -> float:
    """Integral of sqrt(I(theta)) along the path."""
    path = _as_path(path)
    a, b = path.bounds
    if a == b:
        return 0.0
    return adaptive_simpson(lambda t: math.sqrt(fisher_info(path.family, t)), a, b)


def geodesic_distance(p, q) -> float:
    """arccos of the Bhattacharyya coefficient sum sqrt(p q)."""
    wp, wq = _values(p), _values(q)
    if wp.shape != wq.shape:
        raise InvalidInput("measures live on different spaces")
    bc = float(np.sum(np.sqrt(wp * wq)))
    return math.acos(min(1.0, max(-1.0, bc)))


def fisher_metric(p, u, v=None) -> float:
    wp = _values(p)
    u = np.asarray(u, dtype=float)
    v = u if v is None else np.asarray(v, dtype=float)
    return float(np.sum(u * v / wp))


def chentsov_monotonicity_check(p, tangent, phi: StochasticMap, tol: float = 1e-10) -> float:
    """g_{Phi p}(Phi z, Phi z) - g_p(z, z); non-positive for every stochastic map."""
    wp = _values(p)
    z = np.asarray(tangent, dtype=float)
    if z.shape != wp.shape:
        raise InvalidInput("tangent and measure sizes differ")
    if abs(z.sum()) > tol * max(1.0, np.abs(z).sum()):
        raise InvalidInput("a tangent vector must sum to zero")
    if np.any(wp <= 0):
        raise FaithfulnessError("p must be faithful")
    img = phi.apply(wp)
    if np.any(img <= 0):
        raise FaithfulnessError("the image of p must be faithful")
    return fisher_metric(img, phi.apply(z)) - fisher_metric(wp, z)


def energy_profile(family: ParametricFamily, thetas: Sequence[float]) -> list[tuple[float, float, float]]:
    """Rows (theta, I(theta), energy accumulated from the first theta)."""
    rows = []
    acc = 0.0
    prev = None
    for t in thetas:
        t = float(t)
        if prev is not None and t > prev:
            acc += path_energy(SimplexPath(family, prev, t))
        rows.append((t, fisher_info(family, t), acc))
        prev = t
    return rows
