import math
import random

import pytest
from hypothesis import given, strategies as st

from gen import all_spaces, random_value
from vhkvar import (
    BoxSpace,
    MultisetSpace,
    RealSpace,
    VectorSpace,
    bw_extract,
    parse_space,
)
from vhkvar.errors import (
    BoundednessError,
    CompactnessError,
    EmptySumError,
    SpaceMismatchError,
    VhkError,
)
from vhkvar.oracle import hausdorff_sampling


def test_dist_examples():
    assert RealSpace().dist(3, 7) == 4
    # endpoint formula confirmed against the sampling oracle below
    assert BoxSpace(1).dist(((0, 1),), ((0, 2),)) == 1
    assert MultisetSpace().dist(("a", "a", "b"), ("a", "b", "c")) == 2


def test_add_examples():
    assert BoxSpace(1).add(((0, 1),), ((0, 3),)) == ((0, 4),)
    assert RealSpace().add(2, 5) == 7
    assert MultisetSpace().add(("a",), ("a", "b")) == ("a", "a", "b")


def test_sum_examples():
    assert RealSpace().sum([1.5, 2.5]) == 4.0
    assert MultisetSpace().sum([("a",), ("b",), ("a",)]) == ("a", "a", "b")
    assert BoxSpace(1).sum([((0, 1),), ((1, 2),)]) == ((1, 3),)
    with pytest.raises(EmptySumError, match="empty semigroup sum"):
        RealSpace().sum([])


def test_mismatched_values_rejected():
    with pytest.raises(SpaceMismatchError):
        RealSpace().dist(1.0, ("a",))
    with pytest.raises(SpaceMismatchError):
        VectorSpace(2).add((1.0, 2.0), (1.0, 2.0, 3.0))
    with pytest.raises(SpaceMismatchError):
        BoxSpace(1).validate(((2, 1),))
    with pytest.raises(SpaceMismatchError):
        MultisetSpace().validate((1, 2))


def test_parse_space_round_trip():
    for tag in ("real", "vector:3:l1", "vector:2:l2", "vector:4:linf",
                "box:2", "multiset"):
        assert parse_space(tag).tag == tag
    with pytest.raises(VhkError):
        parse_space("vector:0:l2")
    with pytest.raises(VhkError):
        parse_space("gadget")


@pytest.mark.parametrize("space", all_spaces(), ids=lambda s: s.tag)
def test_metric_axioms_and_translation_invariance(space):
    rng = random.Random(20 + hash(space.tag) % 97)
    exact = space.tag == "multiset"
    tol = 0.0 if exact else 1e-12
    for _ in range(300):
        u, v, w = (random_value(rng, space) for _ in range(3))
        duv = space.dist(u, v)
        assert duv >= 0
        assert space.dist(u, u) == 0
        assert abs(space.dist(u, v) - space.dist(v, u)) <= tol
        assert space.dist(u, w) <= duv + space.dist(v, w) + tol
        shifted = space.dist(space.add(u, w), space.add(v, w))
        assert abs(shifted - duv) <= tol


@pytest.mark.parametrize("space", all_spaces(), ids=lambda s: s.tag)
def test_sum_distance_subadditivity(space):
    # d(u+u', v+v') <= d(u,v) + d(u',v')
    rng = random.Random(77)
    tol = 0.0 if space.tag == "multiset" else 1e-12
    for _ in range(300):
        u, v, u2, v2 = (random_value(rng, space) for _ in range(4))
        lhs = space.dist(space.add(u, u2), space.add(v, v2))
        assert lhs <= space.dist(u, v) + space.dist(u2, v2) + tol


@pytest.mark.parametrize("space", all_spaces(), ids=lambda s: s.tag)
def test_add_commutative_associative(space):
    rng = random.Random(5)
    for _ in range(100):
        u, v, w = (random_value(rng, space) for _ in range(3))
        assert space.equal(space.add(u, v), space.add(v, u))
        assert space.equal(space.add(space.add(u, v), w),
                           space.add(u, space.add(v, w)))


def test_box_hausdorff_matches_sampling_oracle():
    rng = random.Random(9)
    samples = 2000
    for _ in range(30):
        k = rng.choice((1, 2))
        space = BoxSpace(k)

        def box():
            out = []
            for _ in range(k):
                lo = rng.uniform(-3, 1)
                out.append((lo, lo + rng.uniform(0, 2)))
            return tuple(out)

        u, v = box(), box()
        closed = space.dist(u, v)
        sampled = hausdorff_sampling(u, v, samples)
        assert abs(closed - sampled) <= 2 / samples


def test_bw_extract_alternating_reals():
    survivors, candidate = bw_extract(
        RealSpace(), lambda j: float((-1) ** j), range(1, 41), 0.1)
    # the tie toward the lower half keeps the odd indices
    assert survivors == [j for j in range(1, 41) if j % 2 == 1]
    assert candidate == -1.0
    assert all(b > a for a, b in zip(survivors, survivors[1:]))


def test_bw_extract_convergent_sequence():
    survivors, candidate = bw_extract(
        RealSpace(), lambda j: 1.0 / j, range(1, 301), 0.01)
    # the candidate is an attained tail value, so it sits within one box
    # diameter of the true limit 0
    assert abs(candidate - 0.0) <= 2 * 0.01
    assert survivors[-1] == 300
    assert all(abs(1.0 / j - candidate) <= 0.01 for j in survivors)


def test_bw_extract_box_corners():
    space = BoxSpace(1)
    survivors, candidate = bw_extract(
        space, lambda j: ((0.0, 1.0 + ((-1) ** j) / j),), range(1, 201), 0.05)
    assert space.dist(candidate, ((0.0, 1.0),)) <= 0.05
    assert all(space.dist(((0.0, 1.0 + ((-1) ** j) / j),), candidate) <= 0.05
               for j in survivors)


def test_bw_extract_vector_norm_slack():
    space = VectorSpace(3, "l1")
    survivors, candidate = bw_extract(
        space, lambda j: (1.0 / j, -1.0 / j, 1.0 / (j * j)), range(1, 501), 0.02)
    assert all(space.dist((1.0 / j, -1.0 / j, 1.0 / (j * j)), candidate) <= 0.02
               for j in survivors)


def test_bw_extract_errors():
    with pytest.raises(CompactnessError, match="no compactness support"):
        bw_extract(MultisetSpace(), lambda j: ("a",) * j, range(1, 10), 0.5)
    with pytest.raises(BoundednessError):
        bw_extract(RealSpace(), lambda j: float(2 ** j), range(1, 60), 0.5,
                   diameter_cap=1e6)
    with pytest.raises(VhkError):
        bw_extract(RealSpace(), lambda j: 1.0, [3, 2, 1], 0.5)


@given(st.lists(st.sampled_from("abcd"), max_size=6),
       st.lists(st.sampled_from("abcd"), max_size=6),
       st.lists(st.sampled_from("abcd"), max_size=6))
def test_multiset_translation_invariance_exact(u, v, w):
    space = MultisetSpace()
    u, v, w = tuple(u), tuple(v), tuple(w)
    assert space.dist(space.add(u, w), space.add(v, w)) == space.dist(u, v)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_real_translation_invariance(u, v, w):
    space = RealSpace()
    assert math.isclose(space.dist(u + w, v + w), space.dist(u, v),
                        rel_tol=0, abs_tol=1e-9)
