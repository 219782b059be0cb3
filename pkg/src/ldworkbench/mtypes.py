"""Method-of-types engine: compositions of N and their exact log-probabilities.

Every probability of an event on Omega^N that only depends on the empirical
counts is a sum over type classes, which is how all the "exact" finite-N
quantities in this package are computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.special import gammaln

from .errors import EnumerationCapExceeded, InvalidInput
from .measures import DEFAULT_CAP, ProbMeasure, _values


@dataclass(frozen=True)
class TypeVector:
    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise InvalidInput("type counts must be non-negative")

    @property
    def N(self) -> int:
        return sum(self.counts)

    def empirical(self) -> ProbMeasure:
        return ProbMeasure(np.asarray(self.counts, dtype=float) / self.N)


def type_count(L: int, N: int) -> int:
    return math.comb(N + L - 1, L - 1)


def check_cap(L: int, N: int, cap: int = DEFAULT_CAP) -> None:
    n = type_count(L, N)
    if n > cap:
        raise EnumerationCapExceeded(
            f"{n} types for L={L}, N={N} exceed the enumeration cap {cap}")


@lru_cache(maxsize=64)
def _compositions(N: int, L: int) -> np.ndarray:
    if L == 1:
        return np.array([[N]], dtype=np.int64)
    blocks = []
    for first in range(N + 1):
        rest = _compositions(N - first, L - 1)
        block = np.empty((rest.shape[0], L), dtype=np.int64)
        block[:, 0] = first
        block[:, 1:] = rest
        blocks.append(block)
    out = np.concatenate(blocks)
    out.flags.writeable = False
    return out


def compositions(L: int, N: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """All compositions of N into L parts as rows, in lexicographic order."""
    if L < 1 or N < 0:
        raise InvalidInput("need L >= 1 and N >= 0")
    check_cap(L, N, cap)
    return _compositions(int(N), int(L))


def enumerate_types(L: int, N: int, cap: int = DEFAULT_CAP) -> Iterator[TypeVector]:
    for row in compositions(L, N, cap):
        yield TypeVector(tuple(int(c) for c in row))


def log_multinomial(counts) -> np.ndarray:
    """log N!/(n_1! ... n_L!) row-wise."""
    c = np.asarray(counts, dtype=float)
    return gammaln(c.sum(axis=-1) + 1) - gammaln(c + 1).sum(axis=-1)


def log_sequence_prob(p, counts) -> np.ndarray:
    """log of P_N(omega) for any omega with the given counts (0 log 0 = 0)."""
    w = _values(p)
    c = np.asarray(counts, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.log(w)
        terms = np.where(c > 0, c * logp, 0.0)
    return terms.sum(axis=-1)


def type_class_log_probability(p, counts) -> np.ndarray | float:
    """log P_N(type class) = log multinomial + sum n_k log p_k."""
    if isinstance(counts, TypeVector):
        counts = counts.counts
    out = log_multinomial(counts) + log_sequence_prob(p, counts)
    return float(out) if np.ndim(out) == 0 else out


def type_class_probability(p, counts) -> float:
    return math.exp(type_class_log_probability(p, counts))


def multinomial_int(counts) -> int:
    """Exact integer size of a type class."""
    out, total = 1, 0
    for c in counts:
        total += int(c)
        out *= math.comb(total, int(c))
    return out
