"""Relative entropy and its relatives: Renyi, Jensen-Shannon, variational forms.

Extended reals travel as IEEE infinities. Any computation that would
produce ``inf - inf`` raises :class:`UndefinedArithmetic` instead of
returning NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.special import logsumexp

from .entropies import shannon_entropy
from .errors import AbsContViolation, AlphaOutOfRange, UndefinedArithmetic
from .measures import ProbMeasure, _values, as_prob, check_same_space, variational_distance


@dataclass(frozen=True)
class DivergenceReport:
    kl: float
    renyi: dict[float, float] = field(default_factory=dict)
    renyi_cgf: dict[float, float] = field(default_factory=dict)
    js_entropy: float = 0.0
    js_metric: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kl": self.kl,
            "renyi": {repr(float(a)): v for a, v in self.renyi.items()},
            "renyi_cgf": {repr(float(a)): v for a, v in self.renyi_cgf.items()},
            "js_entropy": self.js_entropy,
            "js_metric": self.js_metric,
        }


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    check_same_space(p, q)
    return _values(p), _values(q)


def kl_divergence(p, q) -> float:
    """S(P|Q); +inf unless P is absolutely continuous w.r.t. Q."""
    wp, wq = _pair(p, q)
    on = wp > 0
    if np.any(wq[on] == 0):
        return math.inf
    return float(np.dot(wp[on], np.log(wp[on] / wq[on])))


def kl_vs_chaotic(p) -> float:
    w = _values(p)
    return kl_divergence(w, np.full(w.size, 1.0 / w.size))


def pinsker_gap(p, q) -> float:
    """S(P|Q) - d_V(P, Q)^2 / 2, non-negative by the Pinsker-type bound."""
    kl = kl_divergence(p, q)
    if math.isinf(kl):
        return math.inf
    return kl - 0.5 * variational_distance(p, q) ** 2


def renyi_divergence_cgf(p, q, alpha: float) -> float:
    """log sum over supp P ∩ supp Q of p^alpha q^(1-alpha); -inf when P ⊥ Q."""
    wp, wq = _pair(p, q)
    on = (wp > 0) & (wq > 0)
    if not np.any(on):
        return -math.inf
    return float(logsumexp(alpha * np.log(wp[on]) + (1.0 - alpha) * np.log(wq[on])))


def renyi_divergence_cgf_derivatives(p, q, alpha: float) -> tuple[float, float]:
    """First and second alpha-derivatives of the unnormalized Renyi divergence.

    They are the mean and variance of log(p/q) under the measure proportional
    to p^alpha q^(1-alpha) on the common support.
    """
    wp, wq = _pair(p, q)
    on = (wp > 0) & (wq > 0)
    if not np.any(on):
        raise UndefinedArithmetic("derivatives undefined for mutually singular measures")
    lr = np.log(wp[on]) - np.log(wq[on])
    logw = alpha * lr + np.log(wq[on])
    r = np.exp(logw - logw.max())
    r /= r.sum()
    mean = float(np.dot(r, lr))
    return mean, float(np.dot(r, (lr - mean) ** 2))


def renyi_divergence(p, q, alpha: float) -> float:
    """Normalized Renyi relative entropy for alpha in (0, 1)."""
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    cgf = renyi_divergence_cgf(p, q, alpha)
    if cgf == -math.inf:
        return math.inf
    return cgf / (alpha - 1.0)


def js_pointwise_L(x: float, y: float) -> float:
    """x log(2x/(x+y)) + y log(2y/(x+y)) with 0 log 0 = 0."""
    if x < 0 or y < 0:
        raise ValueError("js_pointwise_L needs non-negative arguments")
    total = x + y
    out = 0.0
    if x > 0:
        out += x * math.log(2 * x / total)
    if y > 0:
        out += y * math.log(2 * y / total)
    return max(out, 0.0)


def js_entropy(p, q) -> float:
    """Jensen-Shannon entropy, half the sum of the pointwise L terms."""
    wp, wq = _pair(p, q)
    m = 0.5 * (wp + wq)
    total = 0.0
    for w in (wp, wq):
        on = w > 0
        total += np.dot(w[on], np.log(w[on] / m[on]))
    return float(max(0.5 * total, 0.0))


def js_metric(p, q) -> float:
    return math.sqrt(js_entropy(p, q))


def js_entropy_via_entropies(p, q) -> float:
    """S(M) - S(P)/2 - S(Q)/2; an independent route used for cross-checks."""
    wp, wq = _pair(p, q)
    return shannon_entropy(0.5 * (wp + wq)) - 0.5 * shannon_entropy(wp) - 0.5 * shannon_entropy(wq)


def kl_variational_value(p, q, x) -> float:
    """∫X dP - log ∫_{supp P} e^X dQ, a lower bound on S(P|Q)."""
    wp, wq = _pair(p, q)
    xv = _values(x)
    on = wp > 0
    mean = float(np.dot(wp[on], xv[on]))
    qon = on & (wq > 0)
    if not np.any(qon):
        return math.inf
    return mean - float(logsumexp(xv[qon], b=wq[qon]))


def kl_variational_sup(p, q) -> tuple[float, np.ndarray]:
    """Return (S(P|Q), maximizer log(p/q) on supp P extended by zero)."""
    wp, wq = _pair(p, q)
    kl = kl_divergence(wp, wq)
    if math.isinf(kl):
        raise AbsContViolation("the variational supremum is infinite when P is not << Q")
    on = wp > 0
    x = np.zeros_like(wp)
    x[on] = np.log(wp[on] / wq[on])
    return kl, x


def gibbs_maximizer(q, x) -> tuple[ProbMeasure, float]:
    """Gibbs measure e^X Q / ∫e^X dQ together with log ∫e^X dQ."""
    wq = _values(q)
    xv = _values(x)
    on = wq > 0
    logw = np.full(wq.size, -np.inf)
    logw[on] = xv[on] + np.log(wq[on])
    value = float(logsumexp(logw[on]))
    w = np.zeros_like(wq)
    w[on] = np.exp(logw[on] - value)
    return ProbMeasure.normalized(w, getattr(q, "space", None)), value


def divergence_report(p, q, alphas: Iterable[float] = ()) -> DivergenceReport:
    alphas = [float(a) for a in alphas]
    return DivergenceReport(
        kl=kl_divergence(p, q),
        renyi={a: renyi_divergence(p, q, a) for a in alphas if 0 < a < 1},
        renyi_cgf={a: renyi_divergence_cgf(p, q, a) for a in alphas},
        js_entropy=js_entropy(p, q),
        js_metric=js_metric(p, q),
    )


def log_sum_gap(a, b) -> float:
    """Σ a log(a/b) - (Σa) log(Σa/Σb); non-negative by the log-sum inequality."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    on = a > 0
    if np.any(b[on] == 0):
        return math.inf
    sa, sb = a.sum(), b.sum()
    if sa == 0:
        return 0.0
    return float(np.dot(a[on], np.log(a[on] / b[on])) - sa * math.log(sa / sb))


def mixture(weights, measures) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return np.tensordot(w, np.array([_values(as_prob(m)) for m in measures]), axes=1)
