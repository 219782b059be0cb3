"""Entropy production under an involution and the fluctuation relation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import logsumexp

from .errors import FaithfulnessError, InvalidInput, SupportNotInvariant
from .measures import _values

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class Involution:
    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(k) for k in self.perm)
        object.__setattr__(self, "perm", perm)
        n = len(perm)
        if sorted(perm) != list(range(n)):
            raise InvalidInput("an involution must be a permutation of 0..L-1")
        if any(perm[perm[k]] != k for k in range(n)):
            raise InvalidInput("the permutation is not an involution")

    @classmethod
    def identity(cls, size: int) -> "Involution":
        return cls(tuple(range(size)))

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> "Involution":
        """A random involution: shuffle, then pair off a random number of outcomes."""
        order = rng.permutation(size)
        pairs = int(rng.integers(0, size // 2 + 1))
        perm = list(range(size))
        for i in range(pairs):
            a, b = order[2 * i], order[2 * i + 1]
            perm[a], perm[b] = b, a
        return cls(tuple(perm))


@dataclass(frozen=True)
class EpDistribution:
    """Atoms s -> Q(s) of the entropy-production variable log(P / P∘Θ) under P."""

    atoms: tuple[tuple[float, float], ...]

    def as_dict(self) -> dict[float, float]:
        return dict(self.atoms)

    def to_dict(self) -> list[dict]:
        return [{"s": s, "Q": m} for s, m in self.atoms]


def entropy_production(p, theta: Involution) -> np.ndarray:
    """Pointwise log p(w) - log p(Θw), restricted to supp P (nan off the support)."""
    w = _values(p)
    perm = np.asarray(theta.perm)
    if perm.size != w.size:
        raise InvalidInput("involution and measure sizes differ")
    on = w > 0
    if not np.array_equal(on, on[perm]):
        raise SupportNotInvariant("the involution does not preserve supp P")
    out = np.full(w.size, np.nan)
    out[on] = np.log(w[on]) - np.log(w[perm][on])
    return out


def ep_distribution(p, theta: Involution, tol: float = MERGE_TOL) -> EpDistribution:
    """Group outcomes by s with clustering on |s|, so atoms come in ±s pairs."""
    w = _values(p)
    s = entropy_production(p, theta)
    on = w > 0
    vals, mass = s[on], w[on]
    mags = np.sort(np.unique(np.abs(vals)))
    reps: list[float] = []
    for m in mags:
        if reps and m - reps[-1] <= tol:
            continue
        reps.append(float(m))
    reps_arr = np.array(reps)
    atoms: dict[float, float] = {}
    for v, pm in zip(vals, mass):
        k = int(np.argmin(np.abs(reps_arr - abs(v))))
        r = reps_arr[k]
        key = 0.0 if r <= tol else math.copysign(r, v)
        atoms[key] = atoms.get(key, 0.0) + float(pm)
    return EpDistribution(tuple(sorted(atoms.items())))


def fluctuation_check(dist: EpDistribution) -> float:
    """max over atoms of |Q(-s) - e^{-s} Q(s)|."""
    q = dist.as_dict()
    worst = 0.0
    for s, mass in q.items():
        worst = max(worst, abs(q.get(-s if s != 0 else 0.0, 0.0) - math.exp(-s) * mass))
    return worst


def renyi_symmetry_check(p, theta: Involution, alpha_grid: Iterable[float]) -> float:
    """max over the grid of |Ŝ_alpha(P|P_Θ) - Ŝ_{1-alpha}(P|P_Θ)|."""
    w = _values(p)
    if np.any(w <= 0):
        raise FaithfulnessError("the Renyi symmetry check needs a faithful measure")
    pt = w[np.asarray(theta.perm)]
    a = np.asarray(list(alpha_grid), dtype=float)[:, None]
    lp, lq = np.log(w), np.log(pt)
    forward = logsumexp(a * lp + (1 - a) * lq, axis=1)
    backward = logsumexp((1 - a) * lp + a * lq, axis=1)
    return float(np.max(np.abs(forward - backward), initial=0.0))
