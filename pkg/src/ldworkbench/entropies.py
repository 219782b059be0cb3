"""Shannon, Hartley and Renyi entropies (natural logarithm throughout)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.special import logsumexp

from .errors import FaithfulnessError
from .measures import RandomVar, _values, as_prob, marginals


@dataclass(frozen=True)
class EntropyReport:
    shannon: float
    hartley: float
    renyi: dict[float, float] = field(default_factory=dict)

    def to_dict(self, bits: bool = False) -> dict:
        scale = 1.0 / math.log(2) if bits else 1.0
        return {
            "shannon": self.shannon * scale,
            "hartley": self.hartley * scale,
            "renyi": {repr(float(a)): v * scale for a, v in self.renyi.items()},
            "unit": "bits" if bits else "nats",
        }


def shannon_entropy(p) -> float:
    w = _values(p)
    on = w[w > 0]
    return float(-np.dot(on, np.log(on)))


def entropy_function(p) -> RandomVar:
    """Pointwise -log p, with +inf off the support."""
    w = _values(p)
    with np.errstate(divide="ignore"):
        vals = -np.log(w)
    return RandomVar(vals, getattr(p, "space", None))


def hartley_entropy(p) -> float:
    return math.log(int(np.count_nonzero(_values(p) > 0)))


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy; alpha = 1 and alpha = 0 use the Shannon and Hartley values."""
    if alpha == 1:
        return shannon_entropy(p)
    if alpha == 0:
        return hartley_entropy(p)
    w = _values(p)
    on = w[w > 0]
    return float(logsumexp(alpha * np.log(on)) / (1.0 - alpha))


def renyi_cgf(p, alpha: float) -> float:
    """log sum p^(1 - alpha), the cumulant generating function of the entropy function."""
    w = _values(p)
    if np.any(w <= 0):
        raise FaithfulnessError("renyi_cgf requires a faithful measure")
    return float(logsumexp((1.0 - alpha) * np.log(w)))


def entropy_report(p, alphas: Iterable[float] = ()) -> EntropyReport:
    return EntropyReport(
        shannon=shannon_entropy(p),
        hartley=hartley_entropy(p),
        renyi={float(a): renyi_entropy(p, a) for a in alphas},
    )


def conditional_decomposition(p, shape: tuple[int, int] | None = None) -> tuple[float, float, float]:
    """Return ``(S(P), S(P_l), sum_w P_l(w) S(P_{r|l=w}))`` for a measure on a product space."""
    left, _ = marginals(p, shape)
    grid = _values(p).reshape(left.weights.size, -1)
    conditional = 0.0
    for pl, row in zip(left.weights, grid):
        if pl > 0:
            conditional += pl * shannon_entropy(row / pl)
    return shannon_entropy(p), shannon_entropy(left), conditional


def split_measure(p, blocks_probs: Iterable) -> np.ndarray:
    """Concatenate ``p_k * Q_k`` over disjoint blocks, as in the split-additivity axiom."""
    weights = _values(as_prob(p))
    parts = [pk * _values(q) for pk, q in zip(weights, blocks_probs)]
    return np.concatenate(parts)
