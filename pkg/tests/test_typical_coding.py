import math

import numpy as np
import pytest
from hypothesis import given

from ldworkbench.entropies import shannon_entropy
from ldworkbench.errors import EnumerationCapExceeded, FaithfulnessError
from ldworkbench.typical_coding import (
    covering_exponent,
    covering_number,
    source_coding_optimum,
    typical_sandwich,
    typical_set_bounds,
)

from conftest import seeds

# P{41 <= K <= 59} for K ~ Bin(200, 1/4), from scipy.stats.binom.
TYPICAL_MASS_200 = 0.8796779398068232
# Same window rule at N = 400.
TYPICAL_MASS_400 = 0.967531844652033


class TestTypicalSets:
    def test_chaotic_everything_typical(self):
        t = typical_set_bounds([0.25] * 4, 6, 1e-3)
        assert t.cardinality == 4**6
        assert t.probability == pytest.approx(1.0, abs=1e-12)

    def test_quarter_coin(self):
        assert typical_set_bounds([0.25, 0.75], 200, 0.05).probability == pytest.approx(
            TYPICAL_MASS_200, abs=1e-10)
        assert typical_set_bounds([0.25, 0.75], 400, 0.05).probability == pytest.approx(
            TYPICAL_MASS_400, abs=1e-10)

    def test_wide_eps_gives_whole_space(self):
        t = typical_set_bounds([0.25, 0.75], 12, 5.0)
        assert t.cardinality == 2**12

    def test_needs_faithful(self):
        with pytest.raises(FaithfulnessError):
            typical_set_bounds([1.0, 0.0], 5, 0.1)

    @given(seeds)
    def test_sandwich(self, seed):
        rng = np.random.default_rng(seed)
        L = int(rng.integers(2, 4))
        p = rng.dirichlet(np.ones(L)) + 0.01
        p /= p.sum()
        N = int(rng.integers(1, 40))
        eps = float(rng.uniform(0.01, 0.5))
        lo, mid, hi = typical_sandwich(p, N, eps)
        if mid > -math.inf:
            assert lo < mid < hi


class TestCovering:
    def test_pure(self):
        for g in (0.1, 0.5, 1.0):
            assert covering_number([1.0, 0.0], 20, g) == 1

    def test_chaotic(self):
        for N, g in ((10, 0.3), (7, 0.5), (5, 1.0)):
            assert covering_number([0.5, 0.5], N, g) == math.ceil(g * 2**N)
        assert covering_number([1 / 3] * 3, 5, 0.5) == math.ceil(0.5 * 3**5)

    def test_brute_force(self):
        p = np.array([0.2, 0.5, 0.3])
        N = 5
        probs = np.sort(np.array([np.prod(p[list(s)]) for s in np.ndindex(*(3,) * N)]))[::-1]
        cum = np.cumsum(probs)
        for g in (0.1, 0.5, 0.9):
            assert covering_number(p, N, g) == int(np.searchsorted(cum, g * (1 - 1e-15)) + 1)

    def test_exponent_approaches_entropy(self):
        r = covering_exponent([0.25, 0.75], 200, 0.5)
        assert abs(r.normalized - shannon_entropy([0.25, 0.75])) <= 0.08
        assert r.entropy_target == pytest.approx(0.5623351446188083)

    def test_monotone(self):
        p = [0.25, 0.75]
        cs = [covering_number(p, 40, g) for g in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert cs == sorted(cs)
        ns = [covering_number(p, n, 0.5) for n in (10, 20, 40, 80)]
        assert ns == sorted(ns)

    def test_source_coding(self):
        assert source_coding_optimum([1.0, 0.0], 30, 0.1) == 0
        assert source_coding_optimum([0.5, 0.5], 12, 1e-9) == 12
        m = source_coding_optimum([0.25, 0.75], 200, 0.1)
        assert abs(m / 200 - shannon_entropy([0.25, 0.75]) / math.log(2)) <= 0.1

    def test_cap(self):
        with pytest.raises(EnumerationCapExceeded):
            covering_number(np.full(10, 0.1), 60, 0.5)

    def test_report_big_counts(self):
        d = covering_exponent([0.25, 0.75], 200, 0.5).to_dict()
        assert d["c_N"] is None and d["log_c_N"] > 0
