import math

import numpy as np
import pytest
from hypothesis import given
from scipy.stats import binom

from ldworkbench import families
from ldworkbench.divergences import kl_divergence
from ldworkbench.entropies import shannon_entropy
from ldworkbench.errors import EmptySample, FaithfulnessError, InvalidInput
from ldworkbench.estimation import (bernoulli_deviation_probability, bernoulli_risk_exact,
                                    cramer_rao_gap, cross_entropy_surface, efficiency_experiment,
                                    mle, uniform_lln_deviation)
from ldworkbench.fisher import fisher_info

from conftest import random_simplex, seeds

MID = families.bernoulli(1 / 3, 2 / 3)
HALF = families.bernoulli(0.5, 2 / 3)


def _sample(k, N):
    return [1] * k + [0] * (N - k)


class TestCramerRao:
    def test_constant_estimator(self):
        fam = families.bernoulli()
        assert cramer_rao_gap(fam, [0.3, 0.3], 0.6) == pytest.approx(0.09, abs=1e-15)

    def test_indicator_is_efficient(self):
        fam = families.bernoulli()
        for t in (0.2, 0.5, 0.9):
            assert cramer_rao_gap(fam, [0.0, 1.0], t) == pytest.approx(0.0, abs=1e-15)

    def test_sample_mean_is_efficient_for_n(self):
        fam = families.bernoulli()
        N = 12
        assert cramer_rao_gap(fam, lambda c: c[1] / N, 0.3, N=N) == pytest.approx(0.0, abs=1e-14)

    def test_needs_faithful(self):
        with pytest.raises(FaithfulnessError):
            cramer_rao_gap(families.bernoulli(), [0.0, 1.0], 0.0)
        with pytest.raises(InvalidInput):
            cramer_rao_gap(families.bernoulli(), [0.0, 1.0], 0.5, N=3)

    @given(seeds)
    def test_gap_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        L = int(rng.integers(2, 6))
        fam = families.exponential(rng.normal(size=L), (-1.0, 1.0), random_simplex(rng, L))
        t = float(rng.uniform(-1, 1))
        assert cramer_rao_gap(fam, rng.normal(size=L), t) >= -1e-10
        est = rng.normal(size=L)
        assert cramer_rao_gap(fam, lambda c: float(c @ est) / 3, t, N=3) >= -1e-10


class TestMle:
    def test_bernoulli_inside(self):
        r = mle(families.bernoulli(0.1, 0.9), _sample(7, 20))
        assert r.estimate == pytest.approx(0.35, abs=1e-9)
        assert not r.boundary_hit
        assert r.grid_points == 512

    def test_bernoulli_clamped(self):
        r = mle(MID, _sample(1, 10))
        assert r.estimate == 1 / 3 and r.boundary_hit
        r = mle(MID, _sample(9, 10))
        assert r.estimate == 2 / 3 and r.boundary_hit

    def test_mean_on_boundary_counts_as_hit(self):
        r = mle(HALF, _sample(5, 10))
        assert r.estimate == 0.5 and r.boundary_hit

    def test_loglik(self):
        r = mle(families.bernoulli(0.1, 0.9), _sample(3, 4))
        assert r.loglik_at_estimate == pytest.approx(3 * math.log(0.75) + math.log(0.25), abs=1e-12)
        assert set(r.to_dict()) == {"estimate", "boundary_hit", "loglik_at_estimate", "grid_points"}

    def test_empty(self):
        with pytest.raises(EmptySample):
            mle(MID, [])
        with pytest.raises(InvalidInput):
            mle(MID, [0, 2])

    def test_exponential_matching_parameter(self):
        # For an exponential family the MLE matches the model mean of X to the sample mean.
        x = np.array([-1.0, 0.5, 2.0])
        fam = families.exponential(x, (-2.0, 2.0))
        sample = np.repeat(np.arange(3), [300, 300, 400])
        target = x[sample].mean()
        lo, hi = -2.0, 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if fam(mid) @ x < target else (lo, mid)
        r = mle(fam, sample.tolist())
        assert r.estimate == pytest.approx(0.5 * (lo + hi), abs=1e-9)

    @given(seeds)
    def test_interior_stationarity(self, seed):
        rng = np.random.default_rng(seed)
        L = int(rng.integers(2, 6))
        fam = families.exponential(rng.normal(size=L), (-3.0, 3.0))
        N = int(rng.integers(5, 200))
        sample = rng.integers(0, L, size=N)
        r = mle(fam, sample.tolist())
        if not r.boundary_hit:
            c = np.bincount(sample, minlength=L)
            score = float(c @ (fam.derivative(r.estimate) / fam(r.estimate)))
            assert abs(score) <= 1e-6 * N

    def test_table_family(self):
        fam = families.table([0.0, 1.0], [[0.8, 0.2], [0.2, 0.8]])
        r = mle(fam, _sample(5, 10))
        assert r.estimate == pytest.approx(0.5, abs=1e-8)

    def test_flat_likelihood_prefers_small_theta(self):
        fam = families.table([0.0, 1.0, 2.0], [[0.5, 0.5], [0.5, 0.5], [0.2, 0.8]])
        r = mle(fam, _sample(1, 2))
        assert r.estimate == pytest.approx(0.0, abs=1e-9)


class TestExactRisk:
    def test_single_draw(self):
        assert bernoulli_risk_exact(1 / 3, 2 / 3, 0.5, 1) == pytest.approx(1 / 36, abs=1e-15)

    def test_efficiency_and_superefficiency(self):
        assert 4096 * bernoulli_risk_exact(1 / 3, 2 / 3, 0.5, 4096) == pytest.approx(0.25, abs=0.02)
        full = bernoulli_risk_exact(1 / 3, 2 / 3, 0.5, 4096)
        half = bernoulli_risk_exact(0.5, 2 / 3, 0.5, 4096)
        assert half == pytest.approx(full / 2, rel=1e-3)
        assert 4096 * half == pytest.approx(0.125, abs=0.01)

    def test_against_scipy(self):
        N, t = 30, 0.4
        k = np.arange(N + 1)
        oracle = binom.pmf(k, N, t) @ (np.clip(k / N, 0.2, 0.7) - t) ** 2
        assert bernoulli_risk_exact(0.2, 0.7, t, N) == pytest.approx(oracle, rel=1e-12)

    def test_rejects(self):
        with pytest.raises(InvalidInput):
            bernoulli_risk_exact(0.0, 0.5, 0.3, 10)

    def test_consistency_exponential_decay(self):
        Ns = np.array([100, 200, 400, 800])
        probs = np.array([bernoulli_deviation_probability(1 / 3, 2 / 3, 0.5, int(n), 0.05)
                          for n in Ns])
        assert np.all(np.diff(probs) < 0)
        c = -np.polyfit(Ns, np.log(probs), 1)[0]
        assert c > 0
        assert np.all(probs <= np.exp(-c * Ns) * probs[0] * np.exp(c * Ns[0]) * 2)


class TestCrossEntropy:
    def test_diagonal_and_gap(self):
        fam = families.bernoulli()
        assert cross_entropy_surface(fam, 0.3, 0.3) == pytest.approx(shannon_entropy([0.7, 0.3]))
        gap = cross_entropy_surface(fam, 0.3, 0.6) - cross_entropy_surface(fam, 0.3, 0.3)
        assert gap == pytest.approx(kl_divergence([0.7, 0.3], [0.4, 0.6]), abs=1e-12)
        assert cross_entropy_surface(fam, 0.3, 0.0) == math.inf

    @given(seeds)
    def test_argmin_is_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        L = int(rng.integers(2, 6))
        fam = families.exponential(rng.normal(size=L), (-1.0, 1.0))
        grid = np.linspace(-1, 1, 41)
        i = int(rng.integers(0, 41))
        vals = [cross_entropy_surface(fam, grid[i], u) for u in grid]
        assert int(np.argmin(vals)) == i


class TestEfficiencyExperiment:
    def test_matches_exact_risk(self):
        rows = efficiency_experiment(MID, [0.4, 0.5], [50, 200], reps=400, seed=3)
        for r in rows:
            exact = r.N * bernoulli_risk_exact(1 / 3, 2 / 3, r.theta, r.N)
            assert abs(r.n_risk - exact) <= 3 * r.n_risk_se
            assert r.inverse_fisher == pytest.approx(r.theta * (1 - r.theta))

    def test_deterministic(self):
        a = efficiency_experiment(MID, [0.5], [20], reps=20, seed=11)
        b = efficiency_experiment(MID, [0.5], [20], reps=20, seed=11)
        assert a == b
        assert a != efficiency_experiment(MID, [0.5], [20], reps=20, seed=12)

    def test_consistency_trend(self):
        rows = efficiency_experiment(MID, [0.4, 0.5, 0.6], [32, 128, 512], reps=200, seed=0)
        sup = {}
        for r in rows:
            sup[r.N] = max(sup.get(r.N, 0.0), r.mean_abs_error)
        assert sup[32] > sup[128] > sup[512]

    def test_rejects_boundary_theta(self):
        with pytest.raises(InvalidInput):
            efficiency_experiment(MID, [1 / 3], [10], reps=10)
        with pytest.raises(InvalidInput):
            efficiency_experiment(MID, [0.5], [10], reps=1)

    def test_exponential_family(self):
        x = np.array([0.0, 1.0, 2.0])
        fam = families.exponential(x, (-1.0, 1.0))
        (row,) = efficiency_experiment(fam, [0.2], [2048], reps=2000, seed=0)
        assert row.n_risk == pytest.approx(1 / fisher_info(fam, 0.2), rel=0.10)

    def test_uniform_lln(self):
        fam = families.bernoulli(0.2, 0.8)
        grid = [0.25, 0.5, 0.75]
        res = [uniform_lln_deviation(fam, grid, N, reps=100, seed=0) for N in (2**7, 2**9, 2**11)]
        for (m1, s1), (m2, s2) in zip(res, res[1:]):
            assert m2 <= m1 + max(s1, s2)
