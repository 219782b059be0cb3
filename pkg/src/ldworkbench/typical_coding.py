"""Typical sets, covering exponents and optimal source-coding lengths at finite N.

All counts are exact Python integers built from type-class multiplicities;
probabilities are handled in the log domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .entropies import shannon_entropy
from .errors import FaithfulnessError, InvalidInput
from .measures import DEFAULT_CAP, _values
from .mtypes import compositions, log_multinomial, log_sequence_prob, multinomial_int


@dataclass(frozen=True)
class CoveringReport:
    N: int
    gamma: float
    c_N: int
    normalized: float
    entropy_target: float

    @property
    def log_c_N(self) -> float:
        return math.log(self.c_N)

    def to_dict(self) -> dict:
        c = self.c_N if self.c_N < 2**63 else None
        return {"N": self.N, "gamma": self.gamma, "c_N": c, "log_c_N": self.log_c_N,
                "normalized": self.normalized, "entropy_target": self.entropy_target}


class TypicalSet(NamedTuple):
    probability: float
    log_cardinality: float
    cardinality: int


def _faithful(p) -> np.ndarray:
    w = _values(p)
    if np.any(w <= 0):
        raise FaithfulnessError("typical sets are defined for faithful measures")
    return w


def typical_set_bounds(p, N: int, eps: float, cap: int = DEFAULT_CAP) -> TypicalSet:
    """Exact mass and size of T_{N,eps} = {|-(1/N) log P_N - S(P)| < eps}."""
    w = _faithful(p)
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    types = compositions(w.size, N, cap)
    lseq = log_sequence_prob(w, types)
    typical = np.abs(-lseq / N - shannon_entropy(w)) < eps
    if not np.any(typical):
        return TypicalSet(0.0, -math.inf, 0)
    chosen = types[typical]
    prob = math.exp(float(logsumexp(log_multinomial(chosen) + lseq[typical])))
    card = sum(multinomial_int(row) for row in chosen)
    return TypicalSet(min(prob, 1.0), math.log(card), card)


def typical_sandwich(p, N: int, eps: float, cap: int = DEFAULT_CAP) -> tuple[float, float, float]:
    """(log lower bound, log |T|, log upper bound) of the cardinality sandwich."""
    t = typical_set_bounds(p, N, eps, cap)
    S = shannon_entropy(p)
    lower = math.log(t.probability) + N * (S - eps) if t.probability > 0 else -math.inf
    return lower, t.log_cardinality, N * (S + eps)


def covering_number(p, N: int, gamma: float, cap: int = DEFAULT_CAP) -> int:
    """Minimal number of sequences in Omega^N carrying P_N-mass at least gamma.

    Sequences are taken greedily in order of decreasing probability, type
    class by type class; within the last class only the needed count is used.
    """
    if not 0 < gamma <= 1:
        raise InvalidInput("gamma must lie in (0, 1]")
    w = _values(p)
    w = w[w > 0]
    types = compositions(w.size, N, cap)
    lseq = log_sequence_prob(w, types)
    order = np.argsort(-lseq, kind="stable")
    acc = 0.0
    count = 0
    for i in order:
        row = types[i]
        size = multinomial_int(row)
        seq_p = math.exp(lseq[i])
        class_mass = math.exp(float(log_multinomial(row) + lseq[i]))
        if acc + class_mass >= gamma:
            need = math.ceil((gamma - acc) / seq_p) if seq_p > 0 else size
            need = min(max(need, 1), size)
            # Guard against the ratio rounding one atom short.
            while need < size and acc + need * seq_p < gamma * (1 - 1e-15):
                need += 1
            return count + need
        acc += class_mass
        count += size
    return count


def covering_exponent(p, N: int, gamma: float, cap: int = DEFAULT_CAP) -> CoveringReport:
    c = covering_number(p, N, gamma, cap)
    return CoveringReport(N=N, gamma=gamma, c_N=c, normalized=math.log(c) / N,
                          entropy_target=shannon_entropy(p))


def source_coding_optimum(p, N: int, eps: float, cap: int = DEFAULT_CAP) -> int:
    """M_N = floor(log2 c_N(1 - eps))."""
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    c = covering_number(p, N, 1.0 - eps, cap)
    return c.bit_length() - 1
