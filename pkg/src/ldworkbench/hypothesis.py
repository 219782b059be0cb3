"""Bayesian and asymmetric hypothesis testing between two measures.

Exponents of the Hoeffding family are built from the cumulant generating
function of X = log(q/p) under p, whose value at alpha is the unnormalized
Renyi divergence Ŝ_alpha(Q|P). Its derivatives are tilted means and
variances, so all root-finding uses analytic slopes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .divergences import kl_divergence, renyi_divergence_cgf, renyi_divergence_cgf_derivatives
from .errors import AlphabetTooLarge, FaithfulnessError, InvalidInput, SOutOfRange
from .ldp import CgfModel
from .measures import DEFAULT_CAP, ProbMeasure, _values, check_same_space
from .mtypes import compositions, log_multinomial, log_sequence_prob, multinomial_int

BISECT_TOL = 1e-12


@dataclass
class TestingExponents:
    stein: list[tuple[int, float, float]] = field(default_factory=list)
    stein_limit: float | None = None
    chernoff: tuple[float, float] | None = None
    hoeffding: dict[float, tuple[float, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "stein": [{"N": n, "s_N": s, "exponent": e} for n, s, e in self.stein],
            "stein_limit": self.stein_limit,
            "chernoff": None if self.chernoff is None else
            {"alpha_min": self.chernoff[0], "value": self.chernoff[1]},
            "hoeffding": [{"s": s, "psi": v[0], "alpha_star": v[1]}
                          for s, v in sorted(self.hoeffding.items())],
        }


class TiltedPair:
    """A faithful pair (p, q) with the CGF model of log(q/p) under p."""

    def __init__(self, p, q):
        check_same_space(p, q)
        wp, wq = _values(p), _values(q)
        if np.any(wp <= 0) or np.any(wq <= 0):
            raise FaithfulnessError("Hoeffding exponents require faithful measures")
        self.p = np.array(wp)
        self.q = np.array(wq)
        self.cgf = CgfModel(self.p, np.log(self.q) - np.log(self.p))
        self.kl_pq = kl_divergence(self.p, self.q)
        self.kl_qp = kl_divergence(self.q, self.p)
        self.distinct = not np.array_equal(self.p, self.q)

    def R(self, alpha: float) -> ProbMeasure:
        """R_alpha proportional to q^alpha p^(1-alpha)."""
        return self.cgf.tilted_measure(alpha)


def optimal_test(p, q, prior: float) -> frozenset[int]:
    """Neyman-Pearson set {prior p <= (1 - prior) q}: outcomes where Q is chosen."""
    wp, wq = _values(p), _values(q)
    check_same_space(p, q)
    return frozenset(int(k) for k in np.flatnonzero(prior * wp <= (1 - prior) * wq))


def test_error(p, q, prior: float, test) -> float:
    """D_p(P, Q, T) = prior P(T) + (1 - prior) Q(T^c)."""
    wp, wq = _values(p), _values(q)
    mask = np.zeros(wp.size, dtype=bool)
    mask[list(test)] = True
    return float(prior * wp[mask].sum() + (1 - prior) * wq[~mask].sum())


def bayes_error(p, q, prior: float) -> float:
    check_same_space(p, q)
    if not 0 < prior < 1:
        raise InvalidInput("prior must lie in (0, 1)")
    return float(np.minimum((1 - prior) * _values(q), prior * _values(p)).sum())


def bayes_error_log_exact(p, q, prior: float, N: int, cap: int = DEFAULT_CAP) -> float:
    """log D_p(P_N, Q_N), summed exactly over type classes."""
    wp, wq = _values(p), _values(q)
    types = compositions(wp.size, N, cap)
    lm = log_multinomial(types)
    a = math.log(prior) + log_sequence_prob(wp, types)
    b = math.log(1 - prior) + log_sequence_prob(wq, types)
    return float(logsumexp(lm + np.minimum(a, b)))


def chernoff_exponent(p, q) -> tuple[float, float]:
    """(alpha_min, min over [0, 1] of Ŝ_alpha(P|Q)) via bisection on the slope."""
    check_same_space(p, q)
    wp, wq = _values(p), _values(q)
    if np.array_equal(wp, wq):
        return 0.5, 0.0
    slope = lambda a: renyi_divergence_cgf_derivatives(wp, wq, a)[0]
    if slope(0.0) >= 0:
        return 0.0, renyi_divergence_cgf(wp, wq, 0.0)
    if slope(1.0) <= 0:
        return 1.0, renyi_divergence_cgf(wp, wq, 1.0)
    lo, hi = 0.0, 1.0
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, renyi_divergence_cgf(wp, wq, a)


def stein_exponent(p, q, gamma: float, N: int, cap: int = DEFAULT_CAP) -> tuple[float, float]:
    """(s_N(gamma), (1/N) log s_N(gamma)) with s_N = min{Q_N(T): P_N(T) >= gamma}.

    Sequences enter T in decreasing order of the likelihood ratio P_N/Q_N,
    whole type classes at a time except the last.
    """
    log_s = stein_log_mass(p, q, gamma, N, cap)
    return math.exp(log_s), log_s / N


def stein_log_mass(p, q, gamma: float, N: int, cap: int = DEFAULT_CAP) -> float:
    check_same_space(p, q)
    if not 0 < gamma < 1:
        raise InvalidInput("gamma must lie in (0, 1)")
    wp, wq = _values(p), _values(q)
    on = wp > 0
    # outcomes outside supp P never help reach gamma
    wp, wq = wp[on], wq[on]
    types = compositions(wp.size, N, cap)
    lp = log_sequence_prob(wp, types)
    lq = log_sequence_prob(wq, types)
    lm = log_multinomial(types)
    with np.errstate(invalid="ignore"):
        ratio = lp - lq
    order = np.lexsort((lq, -ratio))
    acc = 0.0
    parts: list[float] = []
    for i in order:
        class_p = math.exp(lm[i] + lp[i])
        if acc + class_p >= gamma:
            remaining = gamma - acc
            log_need = math.log(remaining) - lp[i]
            if log_need < 50:
                need = min(max(math.ceil(math.exp(log_need) * (1 - 1e-15)), 1),
                           multinomial_int(types[i]))
                log_need = math.log(need)
            parts.append(log_need + lq[i])
            break
        acc += class_p
        parts.append(lm[i] + lq[i])
    return float(logsumexp(parts))


def _psi_closed(pair: TiltedPair, s: float):
    if s < 0:
        raise SOutOfRange("s must be non-negative")
    if s == 0:
        return -pair.kl_qp, 1.0
    if s >= pair.kl_pq:
        return 0.0, 0.0
    return None


def alpha_star(pair: TiltedPair, s: float) -> float:
    """Root in (0, 1) of G(alpha) = s + C(alpha) + (1 - alpha) C'(alpha)."""
    c = pair.cgf
    G = lambda a: s + c.cgf(a) + (1 - a) * c.cgf_d1(a)
    lo, hi = 0.0, 1.0
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if G(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hoeffding_psi(p, q, s: float) -> tuple[float, float]:
    """(psi(s), alpha_*(s)). At s = 0 the infimum sits at alpha -> 1; for s >= S(P|Q) at 0."""
    pair = p if isinstance(p, TiltedPair) else TiltedPair(p, q)
    if not pair.distinct:
        if s < 0:
            raise SOutOfRange("s must be non-negative")
        return 0.0, 0.0
    closed = _psi_closed(pair, s)
    if closed is not None:
        return closed
    a = alpha_star(pair, s)
    return -s - pair.cgf.cgf_d1(a), a


def hoeffding_phi(p, q, theta: float) -> float:
    """phi(theta) = sup over alpha in [0, 1] of (theta alpha - Ŝ_alpha(Q|P))."""
    pair = p if isinstance(p, TiltedPair) else TiltedPair(p, q)
    if theta <= -pair.kl_pq:
        return 0.0
    if theta >= pair.kl_qp:
        return float(theta)
    a = pair.cgf.solve_alpha(theta)
    return float(a * theta - pair.cgf.cgf(a))


def phi_hat(p, q, theta: float) -> float:
    return hoeffding_phi(p, q, theta) - theta


def phi_hat_inverse(p, q, s: float) -> float:
    """Inverse of the decreasing bijection phi_hat: (-inf, S(Q|P)] -> [0, inf)."""
    pair = p if isinstance(p, TiltedPair) else TiltedPair(p, q)
    if s < 0:
        raise SOutOfRange("s must be non-negative")
    if s == 0:
        return pair.kl_qp
    if s >= pair.kl_pq:
        return -float(s)
    lo, hi = -pair.kl_pq, pair.kl_qp
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if phi_hat(pair, None, mid) > s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hoeffding_constrained_oracle(p, q, s: float, resolution: float = 1e-3,
                                 max_grid: int = 2_000_000) -> float:
    """Brute-force inf{S(R|P) : S(R|Q) <= s} over a simplex grid, then refined.

    The grid step is ``resolution`` (coarsened if the grid would exceed
    ``max_grid`` points); the best grid point seeds a local constrained solve.
    """
    wp, wq = _values(p), _values(q)
    L = wp.size
    if L > 4:
        raise AlphabetTooLarge("grid search is limited to alphabets of size <= 4")
    if s < 0:
        raise SOutOfRange("s must be non-negative")
    n = max(1, int(round(1.0 / resolution)))
    while math.comb(n + L - 1, L - 1) > max_grid:
        n //= 2
    grid = compositions(L, n, cap=max_grid) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_q = np.where(grid > 0, grid * np.log(grid / wq), 0.0).sum(axis=1)
        rel_p = np.where(grid > 0, grid * np.log(grid / wp), 0.0).sum(axis=1)
    feasible = rel_q <= s
    if s >= kl_divergence(wp, wq):
        return 0.0
    if not np.any(feasible):
        start = wq.copy()
        best = kl_divergence(wq, wp)
    else:
        k = int(np.argmin(np.where(feasible, rel_p, np.inf)))
        start, best = grid[k], float(rel_p[k])
    # Refine with a local solve in log-coordinates on the constraint set.
    def unpack(z):
        r = np.exp(z - z.max())
        return r / r.sum()

    cons = [{"type": "ineq", "fun": lambda z: s - kl_divergence(unpack(z), wq)}]
    z0 = np.log(np.clip(start, 1e-12, None))
    res = minimize(lambda z: kl_divergence(unpack(z), wp), z0, constraints=cons,
                   method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    r = unpack(res.x)
    if kl_divergence(r, wq) <= s + 1e-10:
        best = min(best, kl_divergence(r, wp))
    return best


def threshold_test_exponents(p, q, theta: float, N: int,
                             cap: int = DEFAULT_CAP) -> tuple[float, float]:
    """Exact (1/N) log P_N(T_N) and (1/N) log Q_N(T_N^c) for T_N = {Q_N >= e^{N theta} P_N}."""
    wp, wq = _values(p), _values(q)
    if np.any(wp <= 0) or np.any(wq <= 0):
        raise FaithfulnessError("threshold tests are defined for faithful pairs")
    x = np.log(wq) - np.log(wp)
    types = compositions(wp.size, N, cap)
    sums = types @ x
    tol = 64 * np.finfo(float).eps * N * max(1.0, float(np.abs(x).max()))
    inside = sums >= N * theta - tol
    lm = log_multinomial(types)
    lp = lm + log_sequence_prob(wp, types)
    lq = lm + log_sequence_prob(wq, types)
    log_pt = float(logsumexp(lp[inside])) if np.any(inside) else -math.inf
    log_qc = float(logsumexp(lq[~inside])) if np.any(~inside) else -math.inf
    return log_pt / N, log_qc / N


def neyman_pearson_brute_force(p, q, prior: float) -> float:
    """min over all 2^L tests of D_p(P, Q, T), by enumeration."""
    L = _values(p).size
    best = math.inf
    for mask in itertools.product((False, True), repeat=L):
        best = min(best, test_error(p, q, prior, np.flatnonzero(mask)))
    return best
