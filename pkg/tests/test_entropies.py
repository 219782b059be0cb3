import math

import numpy as np
import pytest
from hypothesis import given

from ldworkbench.entropies import (
    conditional_decomposition,
    entropy_function,
    entropy_report,
    hartley_entropy,
    renyi_cgf,
    renyi_entropy,
    shannon_entropy,
    split_measure,
)
from ldworkbench.errors import FaithfulnessError, NotAProductSpace
from ldworkbench.measures import ProbMeasure, marginals, product

from conftest import random_simplex, seeds

# -0.25 log 0.25 - 0.75 log 0.75, evaluated once in extended precision.
S_QUARTER = 0.5623351446188083


class TestShannon:
    @pytest.mark.parametrize("p, expected", [
        ((1.0, 0.0), 0.0),
        ((0.5, 0.5), math.log(2)),
        ((0.25, 0.75), S_QUARTER),
    ])
    def test_examples(self, p, expected):
        assert shannon_entropy(p) == pytest.approx(expected, abs=1e-15)

    def test_entropy_function(self):
        np.testing.assert_allclose(entropy_function([0.5, 0.5]).values, [math.log(2)] * 2)
        v = entropy_function([1.0, 0.0]).values
        assert v[0] == 0.0 and v[1] == math.inf
        e = math.exp(-1)
        np.testing.assert_allclose(entropy_function([e, 1 - e]).values, [1.0, -math.log(1 - e)])

    @given(seeds)
    def test_bounds_and_concavity(self, seed):
        rng = np.random.default_rng(seed)
        L = int(rng.integers(2, 7))
        ps = [random_simplex(rng, L, faithful=False) for _ in range(3)]
        lam = rng.dirichlet(np.ones(3))
        mix = sum(l * p for l, p in zip(lam, ps))
        avg = sum(l * shannon_entropy(p) for l, p in zip(lam, ps))
        assert 0.0 <= shannon_entropy(ps[0]) <= math.log(L) + 1e-12
        assert avg <= shannon_entropy(mix) + 1e-12
        assert shannon_entropy(mix) <= avg + shannon_entropy(lam) + 1e-12

    def test_almost_convexity_equality_on_disjoint_supports(self):
        lam = np.array([0.3, 0.7])
        p1 = np.array([0.2, 0.8, 0.0, 0.0])
        p2 = np.array([0.0, 0.0, 0.6, 0.4])
        mix = lam[0] * p1 + lam[1] * p2
        rhs = lam[0] * shannon_entropy(p1) + lam[1] * shannon_entropy(p2) + shannon_entropy(lam)
        assert shannon_entropy(mix) == pytest.approx(rhs, abs=1e-14)


class TestHartleyRenyi:
    @pytest.mark.parametrize("p, expected", [
        ((1.0, 0.0), 0.0),
        ((0.9, 0.1), math.log(2)),
        ((1 / 3, 1 / 3, 1 / 3, 0.0), math.log(3)),
    ])
    def test_hartley(self, p, expected):
        assert hartley_entropy(p) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 2.0, 7.0])
    def test_chaotic_renyi(self, alpha):
        assert renyi_entropy(ProbMeasure.chaotic(5), alpha) == pytest.approx(math.log(5), abs=1e-14)

    def test_renyi_examples(self):
        assert renyi_entropy([0.9, 0.1], 1e-9) == pytest.approx(math.log(2), abs=1e-8)
        assert renyi_entropy([0.9, 0.1], 0.0) == math.log(2)
        assert renyi_entropy([0.25, 0.75], 2.0) == pytest.approx(math.log(8 / 5), abs=1e-15)
        assert renyi_entropy([0.25, 0.75], 1.0) == shannon_entropy([0.25, 0.75])

    def test_renyi_cgf_examples(self):
        assert renyi_cgf([0.2, 0.3, 0.5], 0.0) == pytest.approx(0.0, abs=1e-15)
        assert renyi_cgf([0.2, 0.3, 0.5], 1.0) == pytest.approx(math.log(3), abs=1e-15)
        assert renyi_cgf([0.25, 0.75], 0.5) == pytest.approx(math.log(0.5 + math.sqrt(3) / 2), abs=1e-15)
        with pytest.raises(FaithfulnessError):
            renyi_cgf([1.0, 0.0], 0.5)

    @given(seeds)
    def test_renyi_cgf_normalization(self, seed):
        rng = np.random.default_rng(seed)
        p = random_simplex(rng, int(rng.integers(2, 7)))
        alpha = float(rng.uniform(0.05, 0.95))
        assert renyi_cgf(p, alpha) == pytest.approx(alpha * renyi_entropy(p, 1 - alpha), abs=1e-12)

    @given(seeds)
    def test_renyi_monotone_and_additive(self, seed):
        rng = np.random.default_rng(seed)
        p = random_simplex(rng, int(rng.integers(2, 6)), faithful=False)
        q = random_simplex(rng, int(rng.integers(2, 6)), faithful=False)
        grid = np.linspace(0.05, 0.95, 10)
        vals = [renyi_entropy(p, a) for a in grid]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        a = float(rng.choice(grid))
        assert renyi_entropy(product(p, q), a) == pytest.approx(
            renyi_entropy(p, a) + renyi_entropy(q, a), abs=1e-12)

    def test_renyi_not_subadditive(self):
        p, q, eps, alpha = 0.3, 0.6, 1e-3, 2.0
        P = ProbMeasure([p * q + eps, p * (1 - q) - eps, (1 - p) * q - eps, (1 - p) * (1 - q) + eps])
        left, right = marginals(P, shape=(2, 2))
        assert renyi_entropy(P, alpha) > renyi_entropy(left, alpha) + renyi_entropy(right, alpha)

    def test_report(self):
        r = entropy_report([0.5, 0.5], [0.5, 2.0]).to_dict(bits=True)
        assert r["shannon"] == pytest.approx(1.0)
        assert r["renyi"]["2.0"] == pytest.approx(1.0)
        assert r["unit"] == "bits"


class TestProducts:
    def test_examples(self):
        s, sl, cond = conditional_decomposition(product([0.3, 0.7], [0.6, 0.4]))
        assert s == pytest.approx(shannon_entropy([0.3, 0.7]) + shannon_entropy([0.6, 0.4]), abs=1e-14)
        s, sl, cond = conditional_decomposition(ProbMeasure([0.5, 0, 0, 0.5]), shape=(2, 2))
        assert (s, sl, cond) == pytest.approx((math.log(2), math.log(2), 0.0), abs=1e-15)
        s, sl, cond = conditional_decomposition(ProbMeasure([0.25] * 4), shape=(2, 2))
        assert (s, sl, cond) == pytest.approx((math.log(4), math.log(2), math.log(2)), abs=1e-15)

    def test_needs_product(self):
        with pytest.raises(NotAProductSpace):
            conditional_decomposition(ProbMeasure([0.25] * 4))

    @given(seeds)
    def test_chain_rule_and_subadditivity(self, seed):
        rng = np.random.default_rng(seed)
        n, m = (int(k) for k in rng.integers(2, 5, size=2))
        P = ProbMeasure(random_simplex(rng, n * m, faithful=False))
        s, sl, cond = conditional_decomposition(P, shape=(n, m))
        assert s == pytest.approx(sl + cond, abs=1e-10)
        left, right = marginals(P, shape=(n, m))
        assert s <= shannon_entropy(left) + shannon_entropy(right) + 1e-12
        assert hartley_entropy(P) <= hartley_entropy(left) + hartley_entropy(right) + 1e-12

    @given(seeds)
    def test_split_additivity(self, seed):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        p = random_simplex(rng, k, faithful=False)
        blocks = [random_simplex(rng, int(rng.integers(1, 4)), faithful=False) for _ in range(k)]
        joint = split_measure(p, blocks)
        rhs = shannon_entropy(p) + sum(pk * shannon_entropy(b) for pk, b in zip(p, blocks))
        assert shannon_entropy(joint) == pytest.approx(rhs, abs=1e-10)
