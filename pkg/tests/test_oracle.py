import random
from collections import Counter

import pytest

from gen import all_spaces, random_function, random_grid
from vhkvar import (
    Grid,
    GridFunction,
    MultisetSpace,
    RealSpace,
    SubRectangle,
    full_rectangle,
    prevariation,
    vitali_variation,
)
from vhkvar.errors import EnumerationCapError
from vhkvar.multiindex import enumerate_leq
from vhkvar.oracle import (
    brute_force_total_variation,
    brute_force_variation,
    enumerate_partitions,
    partition_count,
    verify_identity_suite,
)
from vhkvar.variation import nonzero_alphas, total_variation


def test_enumerate_partitions_examples():
    g3 = Grid(((0.0, 0.5, 1.0),))
    parts = list(enumerate_partitions(g3, full_rectangle(g3)))
    assert sorted(p.per_axis for p in parts) == [((0, 2),), ((0, 1, 2),)]

    g2 = Grid(((0.0, 1.0),))
    assert [p.per_axis for p in enumerate_partitions(g2, full_rectangle(g2))] \
        == [((0, 1),)]

    g33 = Grid(((0.0, 0.5, 1.0), (0.0, 0.5, 1.0)))
    assert len(list(enumerate_partitions(g33, full_rectangle(g33)))) == 4


def test_partition_enumeration_count_and_uniqueness():
    rng = random.Random(2)
    for _ in range(20):
        g = random_grid(rng, rng.choice((1, 2)), 2, 5)
        rect = full_rectangle(g)
        parts = list(enumerate_partitions(g, rect))
        assert len(parts) == partition_count(g, rect)
        assert len(set(p.per_axis for p in parts)) == len(parts)


def test_partition_cap_fails_loudly():
    g = Grid((tuple(float(i) for i in range(12)),))
    with pytest.raises(EnumerationCapError):
        list(enumerate_partitions(g, full_rectangle(g), cap=512))


def test_brute_force_variation_examples():
    g1 = Grid(((0.0, 0.5, 1.0),))
    ident = GridFunction.sample(g1, RealSpace(), lambda p: p[0])
    assert brute_force_variation(ident, (1,), (0,), full_rectangle(g1)) == 1.0

    g2 = Grid(((0.0, 0.5, 1.0), (0.0, 0.5, 1.0)))
    prod = GridFunction.sample(g2, RealSpace(), lambda p: p[0] * p[1])
    assert brute_force_variation(prod, (1, 1), (0, 0), full_rectangle(g2)) == 1.0

    const = GridFunction.sample(g2, RealSpace(), lambda p: 5.0)
    assert brute_force_variation(const, (1, 1), (0, 0), full_rectangle(g2)) == 0.0


@pytest.mark.parametrize("space", all_spaces(), ids=lambda s: s.tag)
def test_engine_matches_oracle_and_finest_maximizes(space):
    rng = random.Random(13)
    for _ in range(15):
        grid = random_grid(rng, rng.choice((1, 2)), 2, 4)
        f = random_function(rng, grid, space)
        rect = full_rectangle(grid)
        base = (0,) * grid.ndim
        for alpha in nonzero_alphas(grid.ndim):
            engine = vitali_variation(f, alpha, base, rect)
            best = brute_force_variation(f, alpha, base, rect)
            assert abs(engine - best) <= 1e-12
            # the finest partition attains the maximum
            tgrid = grid.restrict(alpha)
            for p in enumerate_partitions(tgrid, rect.restrict(alpha)):
                assert prevariation(f, alpha, base, p) <= engine + 1e-12


def test_brute_force_total_variation_agrees_with_engine():
    rng = random.Random(19)
    for _ in range(10):
        grid = random_grid(rng, 2, 2, 4)
        f = random_function(rng, grid, RealSpace())
        hi = tuple(m - 1 for m in grid.shape)
        assert abs(brute_force_total_variation(f, (0, 0), hi)
                   - total_variation(f).tv) <= 1e-12


def test_identity_suite_passes():
    report = verify_identity_suite(n_max=3, m_max=6, trials=60, seed=4)
    assert report.all_passed
    families = report.by_family()
    assert set(families) == {"binomial", "parity-count", "double-sum",
                             "interval-sum", "glued-sums"}
    for passed, total in families.values():
        assert passed == total > 0


def test_identity_suite_smallest_binomial_case():
    report = verify_identity_suite(n_max=1, m_max=1, trials=1, seed=0)
    entry = [c for c in report.checks if c.family == "binomial"][0]
    assert entry.instance == "m=1 k=0" and entry.ok


def test_double_sum_expansion_by_hand():
    # gamma = (1,1): both sides expand to two copies of the bottom tag
    # plus one copy of the top tag
    space = MultisetSpace()
    h = lambda t: ("t" + "".join(map(str, t)),)
    gamma = (1, 1)
    left = space.sum([h(t) for a in enumerate_leq(gamma, "even")
                      for t in enumerate_leq(a, "even")])
    right = space.sum([h(gamma)] + [h(t) for a in enumerate_leq(gamma, "odd")
                                    for t in enumerate_leq(a, "even")])
    assert Counter(left) == Counter({"t00": 2, "t11": 1})
    assert left == right


def test_identity_suite_caps():
    with pytest.raises(Exception):
        verify_identity_suite(n_max=7)
    with pytest.raises(Exception):
        verify_identity_suite(m_max=13)
