"""Helly-type selection extraction on sequences of grid functions.

Infinite sequences are operationalized as deterministic generators plus a
finite probe window; a "selection" is a Cauchy-certified prefix of a
subsequence together with an attained limit function and explicit
certificates (epsilon, variation bounds).  Precompactness cannot be
checked for an abstract generator, so its surrogate is a boundedness cap
with a clear error; the cap is a surrogate, not an equivalent.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import (
    BoundednessError,
    CertificationError,
    ConvergenceError,
    DegenerateDualsError,
    DocumentError,
    ExpressionError,
    GridMismatchError,
    SpaceMismatchError,
    VhkError,
)
from .grid import Grid, GridFunction, grid_from_document
from .semigroup import (
    DEFAULT_DIAMETER_CAP,
    RealSpace,
    ValueSpace,
    VectorSpace,
    BoxSpace,
    bw_extract,
    parse_space,
)
from .variation import DEFAULT_TOLERANCE, total_variation, total_variation_function


@dataclass(frozen=True)
class FunctionSequence:
    """A deterministic, repeatable accessor j -> grid function."""

    grid: Grid
    space: ValueSpace
    generator: Callable[[int], GridFunction]

    def term(self, j: int) -> GridFunction:
        f = self.generator(j)
        if f.grid != self.grid:
            raise GridMismatchError(f"term {j} lives on a different grid")
        if f.space != self.space:
            raise SpaceMismatchError(f"term {j} has value space {f.space.tag}, "
                                     f"expected {self.space.tag}")
        return f


@dataclass(frozen=True)
class SelectionResult:
    """A certified extraction: chosen indices, attained limit, bounds."""

    indices: tuple[int, ...]
    limit: GridFunction
    sup_tv: float
    limit_tv: float
    max_residual: float
    diagnostics: Optional[dict] = None


def _probe_terms(seq: FunctionSequence, probe: int) -> dict[int, GridFunction]:
    if probe < 1:
        raise VhkError(f"probe must be at least 1, got {probe}")
    return {j: seq.term(j) for j in range(1, probe + 1)}


def _sup_tv(terms: dict[int, GridFunction], cap: float) -> float:
    sup = 0.0
    for j, f in terms.items():
        tv = total_variation(f).tv
        if not math.isfinite(tv) or tv > cap:
            raise BoundednessError(
                f"total-variation estimate diverged at index {j}: {tv}")
        sup = max(sup, tv)
    return sup


def _max_residual(space: ValueSpace, f: GridFunction, g: GridFunction) -> float:
    return max((space.dist(f.at(idx), g.at(idx)) for idx in f.grid.indices()),
               default=0.0)


def helly_select(seq: FunctionSequence, eps: float, probe: int,
                 diameter_cap: float = DEFAULT_DIAMETER_CAP,
                 tolerance: float = DEFAULT_TOLERANCE,
                 diagnostics: bool = False) -> SelectionResult:
    """Extract a pointwise-clustered subsequence from the probe window.

    Diagonalizes over grid nodes in row-major order: at each node the
    surviving indices are re-extracted with ``bw_extract`` and threaded to
    the next node.  Every survivor's value at every node ends within
    ``eps`` of the reported limit, which is the last surviving term
    itself (an attained function, so its total variation cannot exceed
    the probed supremum).
    """
    terms = _probe_terms(seq, probe)
    sup_tv = _sup_tv(terms, diameter_cap)
    survivors = sorted(terms)
    for idx in seq.grid.indices():
        survivors, _ = bw_extract(seq.space, lambda j: terms[j].at(idx),
                                  survivors, eps, diameter_cap)
    limit = terms[survivors[-1]]
    limit_tv = total_variation(limit).tv
    if limit_tv > sup_tv + tolerance:
        raise CertificationError(
            f"limit variation {limit_tv} exceeds the probed bound {sup_tv}")
    if len(survivors) >= 2:
        residual = _max_residual(seq.space, terms[survivors[-2]], terms[survivors[-1]])
    else:
        residual = 0.0
    diag = None
    if diagnostics:
        diag = _monotone_diagnostic(terms, survivors)
    return SelectionResult(tuple(survivors), limit, sup_tv, limit_tv, residual, diag)


def _monotone_diagnostic(terms, survivors) -> dict:
    """Pointwise gaps of consecutive total-variation functions along the
    survivors; reported, not asserted."""
    nus = [total_variation_function(terms[j]) for j in survivors]
    gaps = []
    for prev, cur in zip(nus, nus[1:]):
        gaps.append(max(abs(a - b) for a, b in zip(prev.values, cur.values)))
    return {"variation_function_gaps": tuple(gaps)}


def _invert(matrix: list[list[float]]) -> list[list[float]]:
    """Gauss-Jordan inverse with partial pivoting."""
    k = len(matrix)
    aug = [list(map(float, row)) + [1.0 if i == j else 0.0 for j in range(k)]
           for i, row in enumerate(matrix)]
    scale = max(abs(c) for row in matrix for c in row) or 1.0
    for col in range(k):
        pivot_row = max(range(col, k), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot_row][col]) <= 1e-12 * scale:
            raise DegenerateDualsError("dual functionals do not form a basis")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [c / pivot for c in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0.0:
                factor = aug[r][col]
                aug[r] = [c - factor * p for c, p in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


def weak_helly_select(seq: FunctionSequence, duals: Sequence[Sequence[float]],
                      eps: float, probe: int,
                      diameter_cap: float = DEFAULT_DIAMETER_CAP,
                      tolerance: float = DEFAULT_TOLERANCE) -> SelectionResult:
    """Componentwise extraction against a basis of dual functionals.

    Each dual functional turns the sequence into scalar grid functions;
    those are extracted one dual at a time, threading the surviving index
    set through the whole diagonal.  The limit is rebuilt from the dual
    coordinates and checked against the norm bound from the surviving
    terms (pointwise) and the probed variation bound.
    """
    space = seq.space
    if not isinstance(space, VectorSpace):
        raise SpaceMismatchError(
            f"weak selection requires vector values, got {space.tag}")
    k = space.k
    dual_rows = [space.validate(d) for d in duals]
    if len(dual_rows) != k:
        raise DegenerateDualsError(f"need {k} dual functionals, got {len(dual_rows)}")
    inverse = _invert([list(row) for row in dual_rows])
    inv_norm = max(math.fsum(abs(c) for c in row) for row in inverse)

    terms = _probe_terms(seq, probe)
    for idx in seq.grid.indices():
        for j, f in terms.items():
            if space.norm_of(f.at(idx)) > diameter_cap:
                raise BoundednessError(
                    f"norm of term {j} at node {idx} exceeds the cap {diameter_cap}")
    sup_tv = _sup_tv(terms, diameter_cap)

    scalar = RealSpace()
    survivors = sorted(terms)
    coords: list[dict] = []
    for dual in dual_rows:
        for idx in seq.grid.indices():
            survivors, _ = bw_extract(
                scalar, lambda j: space.pair(terms[j].at(idx), dual),
                survivors, eps, diameter_cap)
        last = terms[survivors[-1]]
        coords.append({idx: space.pair(last.at(idx), dual)
                       for idx in seq.grid.indices()})

    values = []
    for idx in seq.grid.indices():
        rhs = [coords[i][idx] for i in range(k)]
        values.append(tuple(math.fsum(inverse[r][c] * rhs[c] for c in range(k))
                            for r in range(k)))
    limit = GridFunction(seq.grid, space, tuple(values))

    limit_tv = total_variation(limit).tv
    if limit_tv > sup_tv + tolerance:
        raise CertificationError(
            f"limit variation {limit_tv} exceeds the probed bound {sup_tv}")

    # Norm lower-semicontinuity surrogate: every survivor's dual pairings
    # at a node agree with the limit's within eps, so the reconstructed
    # vector sits within slack of each surviving value.
    slack = space.coordinate_slack() * inv_norm * eps
    for idx in seq.grid.indices():
        liminf_est = min(space.norm_of(terms[j].at(idx)) for j in survivors)
        if space.norm_of(limit.at(idx)) > liminf_est + 3 * slack + tolerance:
            raise CertificationError(
                f"limit norm at node {idx} exceeds the surviving norms")

    if len(survivors) >= 2:
        residual = _max_residual(space, terms[survivors[-2]], terms[survivors[-1]])
    else:
        residual = 0.0
    return SelectionResult(tuple(survivors), limit, sup_tv, limit_tv, residual)


@dataclass(frozen=True)
class LowerSemicontinuityReport:
    limit_tv: float
    tail_min_tv: float
    gap: float
    passed: bool
    residual_last: float


def lower_semicontinuity_check(seq: FunctionSequence, f_limit: GridFunction,
                               probe: int,
                               conv_tol: float = 1e-6,
                               tolerance: float = DEFAULT_TOLERANCE) -> LowerSemicontinuityReport:
    """Check that the limit's variation does not exceed the tail variations.

    The pointwise-convergence precondition is verified over the last
    quarter of the probe window: every residual there must stay within
    ``conv_tol``, else the worst node is reported.  The comparison bound
    is the minimum variation over the last half of the window.
    """
    if f_limit.grid != seq.grid or f_limit.space != seq.space:
        raise GridMismatchError("limit does not match the sequence grid/space")
    terms = _probe_terms(seq, probe)
    space = seq.space
    nodes = list(seq.grid.indices())

    tail_start = max(1, probe - probe // 4)
    for j in range(tail_start, probe + 1):
        worst_node = None
        worst = 0.0
        for idx in nodes:
            r = space.dist(terms[j].at(idx), f_limit.at(idx))
            if r > worst:
                worst = r
                worst_node = idx
        if worst > conv_tol:
            raise ConvergenceError(
                f"no pointwise convergence at node {worst_node}: residual {worst} "
                f"at index {j} exceeds {conv_tol}",
                worst_node=worst_node, residual=worst)

    residual_last = max(space.dist(terms[probe].at(idx), f_limit.at(idx))
                        for idx in nodes)
    tvs = {j: total_variation(f).tv for j, f in terms.items()}
    half_start = max(1, probe - probe // 2 + 1)
    tail_min_tv = min(tvs[j] for j in range(half_start, probe + 1))
    limit_tv = total_variation(f_limit).tv
    gap = tail_min_tv - limit_tv
    return LowerSemicontinuityReport(
        limit_tv=limit_tv, tail_min_tv=tail_min_tv, gap=gap,
        passed=limit_tv <= tail_min_tv + tolerance,
        residual_last=residual_last)


# -- expression mini-language ------------------------------------------------
#
# Sequence specification document (UTF-8 JSON):
#   {"grid": {"dims": n, "axes": [[...], ...]}, "space": <tag>,
#    "kind": "expression", "expression": ..., "probe": N}
# The expression language is total and tiny: +, -, *, /, power, abs, min,
# max over the variables x1..xn and j, evaluated in double precision.
# Real documents carry one expression string; vector documents one string
# per component; box documents one [lo, hi] pair of strings per axis.

_ALLOWED_CALLS = {"abs", "min", "max"}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name,
                  ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow,
                  ast.USub, ast.UAdd)


def compile_expression(source: str, variables: Sequence[str]) -> Callable:
    """Compile one mini-language expression into an evaluator.

    The returned callable takes the variable values by keyword.
    """
    if not isinstance(source, str):
        raise ExpressionError(f"expression must be a string, got {source!r}")
    text = source.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {source!r}: {exc}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ExpressionError(
                f"construct {type(node).__name__} not allowed in {source!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_CALLS:
                raise ExpressionError(f"only abs/min/max calls allowed in {source!r}")
            if node.keywords:
                raise ExpressionError("keyword arguments not allowed")
        if isinstance(node, ast.Name) and node.id not in _ALLOWED_CALLS:
            if node.id not in variables:
                raise ExpressionError(f"unknown variable {node.id!r} in {source!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ExpressionError(f"non-numeric constant in {source!r}")
    code = compile(tree, "<expression>", "eval")
    allowed = {"abs": abs, "min": min, "max": max}

    def evaluate(**env):
        return float(eval(code, {"__builtins__": {}, **allowed}, env))

    return evaluate


def sequence_from_document(data) -> tuple[FunctionSequence, int]:
    """Build a function sequence and its probe count from a JSON document."""
    from .grid import _document_dict  # shared parsing helper

    doc = _document_dict(data)
    for key in ("grid", "space", "kind", "expression", "probe"):
        if key not in doc:
            raise DocumentError("bad-document", f"missing '{key}'")
    if doc["kind"] != "expression":
        raise DocumentError("bad-document", f"unknown sequence kind {doc['kind']!r}")
    if not isinstance(doc["grid"], dict):
        raise DocumentError("bad-document", "'grid' must be an object")
    grid = grid_from_document(doc["grid"])
    try:
        space = parse_space(doc["space"])
    except VhkError as exc:
        raise DocumentError("unknown-space", str(exc)) from None
    probe = doc["probe"]
    if not isinstance(probe, int) or probe < 1:
        raise DocumentError("bad-document", f"'probe' must be a positive integer")

    variables = [f"x{i + 1}" for i in range(grid.ndim)] + ["j"]
    expression = doc["expression"]

    if isinstance(space, RealSpace):
        fn = compile_expression(expression, variables)

        def make(j: int) -> GridFunction:
            return GridFunction.sample(
                grid, space,
                lambda pt: fn(**dict(zip(variables, (*pt, float(j))))))
    elif isinstance(space, VectorSpace):
        if not isinstance(expression, list) or len(expression) != space.k:
            raise DocumentError(
                "bad-document",
                f"vector sequences need {space.k} component expressions")
        fns = [compile_expression(e, variables) for e in expression]

        def make(j: int) -> GridFunction:
            def at(pt):
                env = dict(zip(variables, (*pt, float(j))))
                return tuple(fn(**env) for fn in fns)
            return GridFunction.sample(grid, space, at)
    elif isinstance(space, BoxSpace):
        if (not isinstance(expression, list) or len(expression) != space.k
                or not all(isinstance(p, list) and len(p) == 2 for p in expression)):
            raise DocumentError(
                "bad-document",
                f"box sequences need {space.k} [lo, hi] expression pairs")
        fns = [(compile_expression(p[0], variables), compile_expression(p[1], variables))
               for p in expression]

        def make(j: int) -> GridFunction:
            def at(pt):
                env = dict(zip(variables, (*pt, float(j))))
                return tuple((lo(**env), hi(**env)) for lo, hi in fns)
            return GridFunction.sample(grid, space, at)
    else:
        raise DocumentError("unsupported-sequence-space",
                            f"sequences over {space.tag} are not supported")

    return FunctionSequence(grid, space, make), probe
