"""Randomized series stress: the statements hold for arbitrary valid chains."""

import random

import pytest

from dimfox.groupring import CoeffRing
from dimfox.groups import (
    build_group,
    generated_subgroup,
    join,
    lower_central_series,
    normal_closure,
    nseries_from_level2,
    power_subgroup,
    whole_group,
)
from dimfox.verify import verify_dim3, verify_four_term, verify_polynomial_sequence

SPECS = ["cyclic:8", "cyclic:12", "dihedral:4", "dihedral:6", "quaternion:8", "cyclic:2 x cyclic:4", "dihedral:3"]


def random_series(G, rng):
    """A valid series with a random normal level-2 term."""
    seeds = rng.sample(range(G.order), k=rng.randint(1, 3))
    M = join(G, [normal_closure(G, seeds), power_subgroup(G, whole_group(G), rng.choice([2, 3, 4]))])
    return nseries_from_level2(G, M)


@pytest.mark.parametrize("spec", SPECS)
def test_dim3_on_random_series(spec):
    G = build_group(spec)
    rng = random.Random(hash(spec) & 0xFFFF)
    for trial in range(4):
        N = random_series(G, rng)
        K = generated_subgroup(G, rng.sample(range(G.order), k=rng.randint(0, 2)))
        for m in (0, 2, 3):
            ring = CoeffRing.integers() if m == 0 else CoeffRing.mod(m)
            r = verify_dim3(G, K, N, ring, check_reduction=(trial == 0))
            assert r.equal and all(r.containments.values()), (spec, trial, m)
            if trial == 0:
                assert r.extra["reduction_agrees"]


@pytest.mark.parametrize("spec", ["dihedral:4", "quaternion:8", "cyclic:12"])
def test_four_term_on_random_series(spec):
    G = build_group(spec)
    rng = random.Random(len(spec))
    for _ in range(3):
        N = random_series(G, rng)
        K = normal_closure(G, rng.sample(range(G.order), k=1))
        r = verify_four_term(G, K, N)
        assert r.equal, spec
        r2 = verify_polynomial_sequence(G, K, N, CoeffRing.mod(rng.choice([2, 3, 4])))
        assert r2.equal, spec
