import json
import math
import random

import pytest

from gen import random_monotone, unit_grid
from vhkvar import (
    BoxSpace,
    FunctionSequence,
    Grid,
    GridFunction,
    MultisetSpace,
    RealSpace,
    VectorSpace,
    compile_expression,
    helly_select,
    lower_semicontinuity_check,
    sequence_from_document,
    total_variation,
    weak_helly_select,
)
from vhkvar.errors import (
    BoundednessError,
    CompactnessError,
    ConvergenceError,
    DegenerateDualsError,
    DocumentError,
    ExpressionError,
)

G33 = unit_grid(3, 3)


def product_fn(p):
    return p[0] * p[1]


def real_seq(grid, fn):
    return FunctionSequence(grid, RealSpace(),
                            lambda j: GridFunction.sample(grid, RealSpace(),
                                                          lambda p: fn(p, j)))


def test_helly_decaying_alternating_perturbation():
    # constant-in-x perturbation leaves every term's variation at exactly 1
    seq = real_seq(G33, lambda p, j: product_fn(p) + ((-1) ** j) / j)
    res = helly_select(seq, 1e-3, 1200)
    assert res.sup_tv == 1.0
    assert res.limit_tv == 1.0
    assert res.limit_tv <= res.sup_tv + 1e-9
    for idx in G33.indices():
        assert abs(res.limit.at(idx) - product_fn(G33.node(idx))) <= 1e-3
    assert all(b > a for a, b in zip(res.indices, res.indices[1:]))
    assert set(res.indices) <= set(range(1, 1201))


def test_helly_constant_sequence():
    f = GridFunction.sample(G33, RealSpace(), product_fn)
    seq = FunctionSequence(G33, RealSpace(), lambda j: f)
    res = helly_select(seq, 1e-6, 20)
    assert res.indices == tuple(range(1, 21))
    assert res.limit == f
    assert res.max_residual == 0.0
    assert res.limit_tv == res.sup_tv == 1.0


def test_helly_alternating_without_decay_selects_one_parity():
    seq = real_seq(G33, lambda p, j: float((-1) ** j))
    res = helly_select(seq, 0.1, 60)
    # lower-half tie-breaking keeps the odd-index class
    assert all(j % 2 == 1 for j in res.indices)
    assert all(res.limit.at(idx) == -1.0 for idx in G33.indices())
    assert res.max_residual == 0.0


def test_helly_certificate_covers_every_node():
    rng = random.Random(123)
    base = random_monotone(rng, G33)
    bump = random_monotone(rng, G33)
    eps = 1e-6

    def term(j):
        scale = (0.5 ** j) * ((-1) ** j)
        values = tuple(b + scale * h for b, h in zip(base.values, bump.values))
        return GridFunction(G33, RealSpace(), values)

    seq = FunctionSequence(G33, RealSpace(), term)
    res = helly_select(seq, eps, 48)
    for j in res.indices:
        for idx in G33.indices():
            assert abs(seq.term(j).at(idx) - res.limit.at(idx)) <= eps
    assert res.limit_tv <= res.sup_tv + 1e-9


def test_helly_diagnostics_reports_variation_function_gaps():
    seq = real_seq(G33, lambda p, j: product_fn(p) + (0.5 ** j))
    res = helly_select(seq, 1e-4, 24, diagnostics=True)
    gaps = res.diagnostics["variation_function_gaps"]
    assert len(gaps) == len(res.indices) - 1
    assert all(g >= 0 for g in gaps)


def test_helly_boundedness_surrogate():
    seq = real_seq(G33, lambda p, j: (2.0 ** j) * p[0])
    with pytest.raises(BoundednessError):
        helly_select(seq, 1e-3, 60)


def test_helly_multiset_unsupported():
    space = MultisetSpace()
    f = GridFunction(unit_grid(2), space, (("a",), ("a", "b")))
    seq = FunctionSequence(unit_grid(2), space, lambda j: f)
    with pytest.raises(CompactnessError):
        helly_select(seq, 0.5, 8)


def test_helly_box_valued_sequence():
    space = BoxSpace(1)
    grid = unit_grid(3)

    def term(j):
        def at(p):
            wobble = ((-1) ** j) * (0.5 ** j)
            return ((0.0, 1.0 + p[0] + wobble),)
        return GridFunction.sample(grid, space, at)

    seq = FunctionSequence(grid, space, term)
    res = helly_select(seq, 1e-6, 48)
    for idx in grid.indices():
        want = ((0.0, 1.0 + grid.node(idx)[0]),)
        assert space.dist(res.limit.at(idx), want) <= 1e-6
    assert res.limit_tv <= res.sup_tv + 1e-9


def vector_seq(grid, k, fn):
    space = VectorSpace(k, "l2")
    return FunctionSequence(
        grid, space,
        lambda j: GridFunction.sample(grid, space, lambda p: fn(p, j)))


def test_weak_select_componentwise_limits():
    seq = vector_seq(G33, 2, lambda p, j: (product_fn(p), product_fn(p) / j))
    res = weak_helly_select(seq, [[1.0, 0.0], [0.0, 1.0]], 1e-3, 1200)
    for idx in G33.indices():
        u = res.limit.at(idx)
        assert abs(u[0] - product_fn(G33.node(idx))) <= 1e-3
        assert abs(u[1] - 0.0) <= 1e-3
    assert res.limit_tv <= res.sup_tv + 1e-9


def test_weak_select_constant_sequence_returns_itself():
    space = VectorSpace(2, "l2")
    f = GridFunction.sample(G33, space, lambda p: (p[0], p[1]))
    seq = FunctionSequence(G33, space, lambda j: f)
    res = weak_helly_select(seq, [[1.0, 0.0], [0.0, 1.0]], 1e-6, 16)
    assert res.indices == tuple(range(1, 17))
    for idx in G33.indices():
        assert space.dist(res.limit.at(idx), f.at(idx)) <= 1e-12


def test_weak_select_one_dim_domain():
    grid = unit_grid(3)
    seq = vector_seq(grid, 2, lambda p, j: ((((-1) ** j) / j) * p[0], p[0]))
    res = weak_helly_select(seq, [[1.0, 0.0], [0.0, 1.0]], 1e-3, 1200)
    for idx in grid.indices():
        u = res.limit.at(idx)
        assert abs(u[0]) <= 1e-3
        assert abs(u[1] - grid.node(idx)[0]) <= 1e-3


def test_weak_agrees_with_strong_on_vector_instances():
    seq = vector_seq(G33, 2, lambda p, j: (product_fn(p) + (0.5 ** j),
                                           p[0] - (0.5 ** j)))
    eps = 1e-6
    strong = helly_select(seq, eps, 48)
    weak = weak_helly_select(seq, [[2.0, 1.0], [1.0, 1.0]], eps, 48)
    space = seq.space
    for idx in G33.indices():
        assert space.dist(strong.limit.at(idx), weak.limit.at(idx)) <= eps


def test_weak_select_requires_a_basis():
    seq = vector_seq(G33, 2, lambda p, j: (product_fn(p), p[0]))
    with pytest.raises(DegenerateDualsError):
        weak_helly_select(seq, [[1.0, 1.0], [2.0, 2.0]], 1e-3, 8)
    with pytest.raises(DegenerateDualsError):
        weak_helly_select(seq, [[1.0, 0.0]], 1e-3, 8)


def test_norm_bound_from_corner_and_variation():
    # every probed value is bounded by the corner norm bound plus the
    # variation bound
    seq = vector_seq(G33, 2, lambda p, j: (product_fn(p) + 1.0 / j, p[0]))
    probe = 30
    terms = [seq.term(j) for j in range(1, probe + 1)]
    space = seq.space
    origin = (0, 0)
    c_a = max(space.norm_of(f.at(origin)) for f in terms)
    big_c = max(total_variation(f).tv for f in terms)
    for f in terms:
        for idx in G33.indices():
            assert space.norm_of(f.at(idx)) <= c_a + big_c + 1e-9


def test_lower_semicontinuity_additive_decay():
    rng = random.Random(7)
    f = random_monotone(rng, G33)
    h = GridFunction.sample(G33, RealSpace(), lambda p: p[0])
    assert total_variation(h).tv == 1.0

    def term(j):
        return GridFunction(G33, RealSpace(),
                            tuple(a + b / j for a, b in zip(f.values, h.values)))

    seq = FunctionSequence(G33, RealSpace(), term)
    probe = 40
    report = lower_semicontinuity_check(seq, f, probe, conv_tol=0.1)
    assert report.passed
    # the variation excess of the best tail term is exactly 1/probe
    assert abs(report.gap - 1.0 / probe) <= 1e-12
    assert report.limit_tv == total_variation(f).tv


def test_lower_semicontinuity_constant_sequence_equality():
    f = GridFunction.sample(G33, RealSpace(), product_fn)
    seq = FunctionSequence(G33, RealSpace(), lambda j: f)
    report = lower_semicontinuity_check(seq, f, 12)
    assert report.passed and report.gap == 0.0 and report.residual_last == 0.0


def test_lower_semicontinuity_rejects_nonconvergent_sequence():
    f = GridFunction.sample(G33, RealSpace(), product_fn)

    def term(j):
        values = list(f.values)
        values[4] += ((-1) ** j) * 0.5  # alternate at the interior node
        return GridFunction(G33, RealSpace(), tuple(values))

    seq = FunctionSequence(G33, RealSpace(), term)
    with pytest.raises(ConvergenceError) as info:
        lower_semicontinuity_check(seq, f, 20, conv_tol=1e-3)
    assert info.value.worst_node == (1, 1)
    assert info.value.residual == pytest.approx(0.5)


def test_compile_expression():
    fn = compile_expression("x1*x2 + abs(j - 2)", ["x1", "x2", "j"])
    assert fn(x1=2.0, x2=3.0, j=1.0) == 7.0
    fn2 = compile_expression("min(x1, 0.5) + max(x1, 0.5)^2", ["x1"])
    assert fn2(x1=1.0) == 1.5
    with pytest.raises(ExpressionError):
        compile_expression("__import__('os')", ["x1"])
    with pytest.raises(ExpressionError):
        compile_expression("x1 if 1 else 2", ["x1"])
    with pytest.raises(ExpressionError):
        compile_expression("y + 1", ["x1"])
    with pytest.raises(ExpressionError):
        compile_expression("x1 +", ["x1"])


def test_sequence_from_document_real():
    doc = {"grid": {"dims": 2, "axes": [[0.0, 0.5, 1.0], [0.0, 0.5, 1.0]]},
           "space": "real", "kind": "expression",
           "expression": "x1*x2 + 1/j", "probe": 16}
    seq, probe = sequence_from_document(json.dumps(doc))
    assert probe == 16
    f3 = seq.term(3)
    assert f3.at((2, 2)) == pytest.approx(1.0 + 1.0 / 3.0)


def test_sequence_from_document_vector_and_box():
    doc = {"grid": {"dims": 1, "axes": [[0.0, 1.0]]},
           "space": "vector:2:l2", "kind": "expression",
           "expression": ["x1", "x1/j"], "probe": 4}
    seq, _ = sequence_from_document(json.dumps(doc))
    assert seq.term(2).at((1,)) == (1.0, 0.5)

    doc = {"grid": {"dims": 1, "axes": [[0.0, 1.0]]},
           "space": "box:1", "kind": "expression",
           "expression": [["0", "1 + x1/j"]], "probe": 4}
    seq, _ = sequence_from_document(json.dumps(doc))
    assert seq.term(2).at((1,)) == ((0.0, 1.5),)


def test_sequence_from_document_errors():
    base = {"grid": {"dims": 1, "axes": [[0.0, 1.0]]}, "space": "real",
            "kind": "expression", "expression": "x1", "probe": 4}
    for mutate, code in [
        (lambda d: d.pop("probe"), "bad-document"),
        (lambda d: d.update(kind="table"), "bad-document"),
        (lambda d: d.update(space="multiset"), "unsupported-sequence-space"),
        (lambda d: d.update(space="gadget"), "unknown-space"),
        (lambda d: d.update(expression="x9"), "bad-expression"),
        (lambda d: d.update(space="vector:2:l2"), "bad-document"),
    ]:
        doc = json.loads(json.dumps(base))
        mutate(doc)
        with pytest.raises(DocumentError) as info:
            sequence_from_document(json.dumps(doc))
        assert info.value.code == code
