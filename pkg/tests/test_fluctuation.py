import math

import numpy as np
import pytest
from hypothesis import given

from ldworkbench.errors import InvalidInput, SupportNotInvariant
from ldworkbench.fluctuation import (Involution, entropy_production, ep_distribution,
                                     fluctuation_check, renyi_symmetry_check)

from conftest import random_simplex, seeds


def test_involution_validation():
    Involution((1, 0, 2))
    with pytest.raises(InvalidInput):
        Involution((1, 2, 0))
    with pytest.raises(InvalidInput):
        Involution((0, 0))


def test_swap_example():
    p = [0.8, 0.2]
    s = entropy_production(p, Involution((1, 0)))
    assert s == pytest.approx([math.log(4), -math.log(4)], abs=1e-15)
    d = ep_distribution(p, Involution((1, 0))).as_dict()
    assert d[math.log(4)] == pytest.approx(0.8)
    assert d[-math.log(4)] == pytest.approx(0.2)
    assert fluctuation_check(ep_distribution(p, Involution((1, 0)))) <= 1e-15


def test_identity_gives_zero_atom():
    d = ep_distribution([0.2, 0.3, 0.5], Involution.identity(3))
    assert d.atoms == ((0.0, 1.0),)


def test_support_must_be_invariant():
    with pytest.raises(SupportNotInvariant):
        entropy_production([0.5, 0.5, 0.0], Involution((0, 2, 1)))
    # Off-support outcomes mapped among themselves are fine.
    s = entropy_production([0.5, 0.5, 0.0], Involution((1, 0, 2)))
    assert math.isnan(s[2])


def test_report_rows():
    rows = ep_distribution([0.6, 0.4], Involution((1, 0))).to_dict()
    assert [r["s"] for r in rows] == sorted(r["s"] for r in rows)
    assert sum(r["Q"] for r in rows) == pytest.approx(1.0)


@given(seeds)
def test_fluctuation_relation(seed):
    rng = np.random.default_rng(seed)
    L = int(rng.integers(2, 9))
    p = random_simplex(rng, L)
    theta = Involution.random(L, rng)
    dist = ep_distribution(p, theta)
    assert fluctuation_check(dist) <= 1e-12
    # E(e^{-S}) = 1 and E(S) = S(P|P∘Θ) >= 0.
    q = dist.as_dict()
    assert sum(m * math.exp(-s) for s, m in q.items()) == pytest.approx(1.0, abs=1e-12)
    assert sum(m * s for s, m in q.items()) >= -1e-14


@given(seeds)
def test_renyi_symmetry(seed):
    rng = np.random.default_rng(seed)
    L = int(rng.integers(2, 9))
    p = random_simplex(rng, L)
    assert renyi_symmetry_check(p, Involution.random(L, rng), np.linspace(-1, 2, 13)) <= 1e-10


def test_renyi_symmetry_check_matches_direct_values():
    from ldworkbench.divergences import renyi_divergence_cgf

    p = np.array([0.1, 0.2, 0.3, 0.4])
    theta = Involution((3, 2, 1, 0))
    pt = p[list(theta.perm)]
    direct = max(abs(renyi_divergence_cgf(p, pt, a) - renyi_divergence_cgf(p, pt, 1 - a))
                 for a in (0.0, 0.3, 1.7))
    assert renyi_symmetry_check(p, theta, [0.0, 0.3, 1.7]) == pytest.approx(direct, abs=1e-15)
    # A non-involutive reweighting breaks the symmetry.
    assert renyi_divergence_cgf(p, [0.4, 0.1, 0.2, 0.3], 0.3) != pytest.approx(
        renyi_divergence_cgf(p, [0.4, 0.1, 0.2, 0.3], 0.7))
