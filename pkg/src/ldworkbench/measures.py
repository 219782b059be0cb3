"""Measures, random variables and stochastic maps on finite outcome sets.

All objects are immutable: their weight arrays are read-only numpy arrays.
Support and absolute continuity are decided by exact comparison with zero,
never by a tolerance.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import (
    AbsContViolation,
    EnumerationCapExceeded,
    InvalidInput,
    NotAProductSpace,
    SpaceMismatch,
)

DEFAULT_CAP = 10**7
PROB_TOL = 1e-12


def _readonly(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


class OutcomeSpace:
    """A labeled finite set; index order is the canonical order.

    ``factors`` is set for two-fold product spaces, whose outcomes are
    ordered lexicographically (left factor major).
    """

    __slots__ = ("labels", "factors", "_index")

    def __init__(self, labels: Sequence[str], factors=None):
        labels = tuple(str(lab) for lab in labels)
        if not labels:
            raise InvalidInput("an outcome space needs at least one outcome")
        if len(set(labels)) != len(labels):
            raise InvalidInput("outcome labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(labels)})

    def __setattr__(self, name, value):
        raise AttributeError("OutcomeSpace is immutable")

    @classmethod
    def range(cls, size: int) -> "OutcomeSpace":
        return cls([str(k) for k in range(size)])

    @classmethod
    def product(cls, left: "OutcomeSpace", right: "OutcomeSpace") -> "OutcomeSpace":
        labels = [f"({a},{b})" for a in left.labels for b in right.labels]
        return cls(labels, factors=(left, right))

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise InvalidInput(f"unknown outcome label {label!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, OutcomeSpace):
            return NotImplemented
        return self.labels == other.labels and self.factors == other.factors

    def __hash__(self) -> int:
        return hash((self.labels, self.factors))

    def __repr__(self) -> str:
        return f"OutcomeSpace({list(self.labels)!r})"


class Measure:
    """Non-negative weights, one per outcome."""

    __slots__ = ("space", "weights")

    def __init__(self, weights, space: OutcomeSpace | None = None):
        w = np.array(weights, dtype=float)
        if w.ndim != 1:
            raise InvalidInput("weights must be a one-dimensional sequence")
        if space is None:
            space = OutcomeSpace.range(w.size)
        if w.size != space.size:
            raise SpaceMismatch(f"{w.size} weights for a space of size {space.size}")
        if not np.all(np.isfinite(w)):
            raise InvalidInput("weights must be finite")
        if np.any(w < 0):
            raise InvalidInput("weights must be non-negative")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", self._finalize(w))

    def _finalize(self, w: np.ndarray) -> np.ndarray:
        return _readonly(w)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def total(self) -> float:
        return float(self.weights.sum())

    def mass(self, outcomes) -> float:
        """Measure of a set of outcome indices."""
        idx = list(outcomes)
        return float(self.weights[idx].sum()) if idx else 0.0

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.weights.tolist()!r})"


class ProbMeasure(Measure):
    """A measure of total mass one, renormalized exactly at construction."""

    __slots__ = ()

    def _finalize(self, w: np.ndarray) -> np.ndarray:
        total = w.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidInput(f"probability weights sum to {total!r}, not 1")
        return _readonly(w / total)

    @classmethod
    def normalized(cls, weights, space: OutcomeSpace | None = None) -> "ProbMeasure":
        """Build a probability measure from arbitrary non-negative weights."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0:
            raise InvalidInput("cannot normalize a zero measure")
        return cls(w / total, space)

    @classmethod
    def chaotic(cls, size: int) -> "ProbMeasure":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def pure(cls, size: int, at: int) -> "ProbMeasure":
        w = np.zeros(size)
        w[at] = 1.0
        return cls(w)

    def is_faithful(self) -> bool:
        return bool(np.all(self.weights > 0))

    def expect(self, x) -> float:
        return float(np.dot(self.weights, _values(x)))


class RandomVar:
    """Real values, one per outcome."""

    __slots__ = ("space", "values")

    def __init__(self, values, space: OutcomeSpace | None = None):
        v = np.array(values, dtype=float)
        if v.ndim != 1:
            raise InvalidInput("random variable values must be one-dimensional")
        if space is None:
            space = OutcomeSpace.range(v.size)
        if v.size != space.size:
            raise SpaceMismatch(f"{v.size} values for a space of size {space.size}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", _readonly(v))

    def __setattr__(self, name, value):
        raise AttributeError("RandomVar is immutable")

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __repr__(self) -> str:
        return f"RandomVar({self.values.tolist()!r})"


class StochasticMap:
    """Row-stochastic matrix ``rows[i, j] = Phi(omega_i, omega_hat_j)``."""

    __slots__ = ("source", "target", "rows")

    def __init__(self, rows, source: OutcomeSpace | None = None,
                 target: OutcomeSpace | None = None):
        m = np.array(rows, dtype=float)
        if m.ndim != 2:
            raise InvalidInput("a stochastic map needs a two-dimensional matrix")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise InvalidInput("stochastic matrix entries must be finite and non-negative")
        if np.any(np.abs(m.sum(axis=1) - 1.0) > PROB_TOL):
            raise InvalidInput("each row of a stochastic matrix must sum to 1")
        source = source or OutcomeSpace.range(m.shape[0])
        target = target or OutcomeSpace.range(m.shape[1])
        if source.size != m.shape[0] or target.size != m.shape[1]:
            raise SpaceMismatch("matrix shape does not match the declared spaces")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "rows", _readonly(m))

    def __setattr__(self, name, value):
        raise AttributeError("StochasticMap is immutable")

    @classmethod
    def identity(cls, size: int) -> "StochasticMap":
        return cls(np.eye(size))

    @classmethod
    def congruent_embedding(cls, splits: Sequence[int]) -> "StochasticMap":
        """Split outcome k into ``splits[k]`` equally weighted copies."""
        splits = [int(s) for s in splits]
        if any(s < 1 for s in splits):
            raise InvalidInput("every outcome must be split into at least one part")
        rows = np.zeros((len(splits), sum(splits)))
        start = 0
        for k, s in enumerate(splits):
            rows[k, start:start + s] = 1.0 / s
            start += s
        return cls(rows)

    def apply(self, p) -> np.ndarray:
        """Push a weight (or tangent) vector through the map."""
        v = np.asarray(p, dtype=float)
        if v.shape[-1] != self.rows.shape[0]:
            raise SpaceMismatch("vector length does not match the map's source space")
        return v @ self.rows

    def __repr__(self) -> str:
        return f"StochasticMap({self.rows.tolist()!r})"


def _values(x) -> np.ndarray:
    if isinstance(x, Measure):
        return np.asarray(x.weights)
    if isinstance(x, RandomVar):
        return np.asarray(x.values)
    return np.asarray(x, dtype=float)


def as_prob(p) -> ProbMeasure:
    """Accept a ProbMeasure or a weight sequence."""
    if isinstance(p, ProbMeasure):
        return p
    if isinstance(p, Measure):
        return ProbMeasure(p.weights, p.space)
    return ProbMeasure(p)


def as_measure(m) -> Measure:
    return m if isinstance(m, Measure) else Measure(m)


def check_same_space(a, b) -> None:
    wa, wb = _values(a), _values(b)
    if wa.shape != wb.shape:
        raise SpaceMismatch(f"measures live on spaces of sizes {wa.size} and {wb.size}")
    sa = getattr(a, "space", None)
    sb = getattr(b, "space", None)
    if sa is not None and sb is not None and sa.labels != sb.labels:
        raise SpaceMismatch("measures live on differently labeled spaces")


def support(m) -> frozenset[int]:
    w = _values(m)
    return frozenset(int(k) for k in np.flatnonzero(w > 0))


def radon_nikodym(p, q) -> RandomVar:
    """Density of ``p`` with respect to ``q``; zero off the support of ``p``."""
    check_same_space(p, q)
    wp, wq = _values(p), _values(q)
    bad = (wp > 0) & (wq == 0)
    if np.any(bad):
        raise AbsContViolation(f"p charges outcomes {np.flatnonzero(bad).tolist()} where q vanishes")
    out = np.zeros_like(wp)
    on = wp > 0
    out[on] = wp[on] / wq[on]
    return RandomVar(out, getattr(p, "space", None))


def lebesgue_decompose(m, rho) -> tuple[Measure, Measure]:
    """Split ``m`` into a part absolutely continuous and a part singular w.r.t. ``rho``."""
    check_same_space(m, rho)
    w = _values(m)
    on = _values(rho) > 0
    space = getattr(m, "space", None)
    return Measure(np.where(on, w, 0.0), space), Measure(np.where(on, 0.0, w), space)


def variational_distance(p, q) -> float:
    check_same_space(p, q)
    return float(np.abs(_values(p) - _values(q)).sum())


def marginals(p: ProbMeasure, shape: tuple[int, int] | None = None) -> tuple[ProbMeasure, ProbMeasure]:
    """Left and right marginals of a measure on a two-fold product space.

    ``shape`` may be given when ``p`` is a bare weight vector.
    """
    space = getattr(p, "space", None)
    if space is not None and space.factors is not None:
        left, right = space.factors
        shape = (left.size, right.size)
    elif shape is None:
        raise NotAProductSpace("the measure is not declared on a product space")
    else:
        left = right = None
    w = _values(p)
    if w.size != shape[0] * shape[1]:
        raise NotAProductSpace(f"{w.size} weights cannot be arranged as {shape}")
    grid = w.reshape(shape)
    return ProbMeasure(grid.sum(axis=1), left), ProbMeasure(grid.sum(axis=0), right)


def product(p, q) -> ProbMeasure:
    p, q = as_prob(p), as_prob(q)
    space = OutcomeSpace.product(p.space, q.space)
    return ProbMeasure(np.outer(p.weights, q.weights).ravel(), space)


class ProductIndex:
    """Lexicographic enumeration of the N-fold product of a base space."""

    __slots__ = ("base", "N")

    def __init__(self, base: OutcomeSpace | int, N: int):
        if isinstance(base, int):
            base = OutcomeSpace.range(base)
        if N < 1:
            raise InvalidInput("N must be a positive integer")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "N", int(N))

    def __setattr__(self, name, value):
        raise AttributeError("ProductIndex is immutable")

    @property
    def count(self) -> int:
        return self.base.size ** self.N

    def sequence(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.count:
            raise IndexError(index)
        L = self.base.size
        digits = []
        for _ in range(self.N):
            index, d = divmod(index, L)
            digits.append(d)
        return tuple(reversed(digits))

    def index(self, sequence: Sequence[int]) -> int:
        if len(sequence) != self.N:
            raise InvalidInput(f"expected a sequence of length {self.N}")
        L = self.base.size
        idx = 0
        for d in sequence:
            if not 0 <= d < L:
                raise InvalidInput(f"outcome index {d} out of range")
            idx = idx * L + int(d)
        return idx

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.base.size), repeat=self.N)


class IidPower:
    """The product measure P_N, evaluated lazily by sequence index."""

    def __init__(self, p, N: int, cap: int = DEFAULT_CAP):
        self.p = as_prob(p)
        self.index = ProductIndex(self.p.space, N)
        self.cap = cap

    @property
    def N(self) -> int:
        return self.index.N

    def prob_of(self, sequence: Sequence[int]) -> float:
        return math.exp(self.log_prob_of(sequence))

    def log_prob_of(self, sequence: Sequence[int]) -> float:
        w = self.p.weights[list(sequence)]
        if np.any(w == 0):
            return -math.inf
        return float(np.log(w).sum())

    def prob(self, index: int) -> float:
        return self.prob_of(self.index.sequence(index))

    def materialize(self) -> ProbMeasure:
        if self.index.count > self.cap:
            raise EnumerationCapExceeded(
                f"L^N = {self.index.count} exceeds the enumeration cap {self.cap}")
        w = np.ones(1)
        for _ in range(self.N):
            w = np.outer(w, self.p.weights).ravel()
        return ProbMeasure.normalized(w)


def iid_power(p, N: int, materialize: bool = False, cap: int = DEFAULT_CAP):
    power = IidPower(p, N, cap)
    return power.materialize() if materialize else power


def push_forward(m, T: Callable[[int], object] | Sequence, target: OutcomeSpace | None = None) -> Measure:
    """Image measure under a map given as a callable or a per-outcome lookup.

    The images are outcome labels of ``target`` (or integer indices). When
    ``target`` is omitted it is built from the distinct images in order of
    first appearance.
    """
    w = _values(m)
    images = [T(k) for k in range(w.size)] if callable(T) else list(T)
    if len(images) != w.size:
        raise InvalidInput("the map must assign an image to every outcome")
    if target is None:
        target = OutcomeSpace(list(dict.fromkeys(str(i) for i in images)))
        images = [str(i) for i in images]
    out = np.zeros(target.size)
    for k, img in enumerate(images):
        j = int(img) if isinstance(img, (int, np.integer)) else target.index(img)
        out[j] += w[k]
    cls = ProbMeasure if isinstance(m, ProbMeasure) else Measure
    if cls is ProbMeasure:
        return ProbMeasure(out / out.sum(), target)
    return Measure(out, target)


def apply_stochastic(phi: StochasticMap, p) -> ProbMeasure:
    p = as_prob(p)
    if p.weights.size != phi.source.size:
        raise SpaceMismatch("the measure does not live on the map's source space")
    out = phi.apply(p.weights)
    return ProbMeasure(out / out.sum(), phi.target)
