"""Discrete domain model: rectangular grids, grid functions, net partitions.

Functions exist only at grid nodes; there is no interpolation.  Node
indexing is row-major with axis 0 slowest, which also fixes the value
order of the JSON document format.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .errors import (
    DegenerateRectangleError,
    DimensionCapError,
    DocumentError,
    GridMismatchError,
    VhkError,
)
from .multiindex import DIMENSION_CAP, MultiIndex, support, validate as validate_alpha
from .semigroup import ValueSpace, parse_space


@dataclass(frozen=True)
class Grid:
    """A finite rectangular grid: one strictly increasing axis per dimension."""

    axes: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        axes = tuple(tuple(float(c) for c in axis) for axis in self.axes)
        if len(axes) == 0:
            raise VhkError("grid needs at least one axis")
        if len(axes) > DIMENSION_CAP:
            raise DimensionCapError(
                f"dimension {len(axes)} exceeds cap {DIMENSION_CAP}")
        for axis in axes:
            if len(axis) < 2:
                raise VhkError("each axis needs at least two coordinates")
            if any(not (a < b) for a, b in zip(axis, axis[1:])):
                raise VhkError("axis not strictly increasing")
            if any(math.isnan(c) or math.isinf(c) for c in axis):
                raise VhkError("axis coordinates must be finite")
        object.__setattr__(self, "axes", axes)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(axis) for axis in self.axes)

    @property
    def corner_a(self) -> tuple[float, ...]:
        return tuple(axis[0] for axis in self.axes)

    @property
    def corner_b(self) -> tuple[float, ...]:
        return tuple(axis[-1] for axis in self.axes)

    @property
    def node_count(self) -> int:
        return math.prod(self.shape)

    def node(self, idx: Sequence[int]) -> tuple[float, ...]:
        self.check_index(idx)
        return tuple(axis[i] for axis, i in zip(self.axes, idx))

    def check_index(self, idx: Sequence[int]) -> tuple[int, ...]:
        idx = tuple(idx)
        if len(idx) != self.ndim:
            raise VhkError(f"index length {len(idx)} != dimension {self.ndim}")
        for i, m in zip(idx, self.shape):
            if not isinstance(i, int) or not 0 <= i < m:
                raise VhkError(f"node index {idx} out of range for shape {self.shape}")
        return idx

    def indices(self) -> Iterator[tuple[int, ...]]:
        """All node index vectors in row-major order (axis 0 slowest)."""
        return itertools.product(*(range(m) for m in self.shape))

    def restrict(self, alpha: MultiIndex) -> "Grid":
        """The grid of the axes on the support of ``alpha``."""
        alpha = validate_alpha(alpha)
        if len(alpha) != self.ndim:
            raise VhkError("multiindex length differs from grid dimension")
        pos = support(alpha)
        if not pos:
            raise VhkError("empty truncation")
        return Grid(tuple(self.axes[i] for i in pos))


@dataclass(frozen=True)
class SubRectangle:
    """A node-index-aligned sub-rectangle; degenerate faces are permitted."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(i) for i in self.lo)
        hi = tuple(int(i) for i in self.hi)
        if len(lo) != len(hi):
            raise VhkError("lo and hi lengths differ")
        if any(a > b for a, b in zip(lo, hi)):
            raise VhkError(f"sub-rectangle with lo {lo} above hi {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_degenerate(self) -> bool:
        return any(a == b for a, b in zip(self.lo, self.hi))

    def degenerate_axes(self) -> tuple[int, ...]:
        return tuple(i for i, (a, b) in enumerate(zip(self.lo, self.hi)) if a == b)

    def restrict(self, alpha: MultiIndex) -> "SubRectangle":
        pos = support(validate_alpha(alpha))
        return SubRectangle(tuple(self.lo[i] for i in pos),
                            tuple(self.hi[i] for i in pos))


def full_rectangle(grid: Grid) -> SubRectangle:
    return SubRectangle((0,) * grid.ndim, tuple(m - 1 for m in grid.shape))


@dataclass(frozen=True)
class GridFunction:
    """Samples of a map on a grid: one value of ``space`` per node, row-major."""

    grid: Grid
    space: ValueSpace
    values: tuple

    def __post_init__(self):
        values = tuple(self.space.validate(v) for v in self.values)
        if len(values) != self.grid.node_count:
            raise VhkError(
                f"value count {len(values)} != node count {self.grid.node_count}")
        object.__setattr__(self, "values", values)

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for m in reversed(self.grid.shape):
            strides.append(acc)
            acc *= m
        return tuple(reversed(strides))

    def at(self, idx: Sequence[int]):
        idx = self.grid.check_index(idx)
        return self.values[sum(i * s for i, s in zip(idx, self._strides))]

    @classmethod
    def sample(cls, grid: Grid, space: ValueSpace,
               fn: Callable[[tuple[float, ...]], object]) -> "GridFunction":
        """Evaluate ``fn`` at every node point, row-major."""
        return cls(grid, space, tuple(fn(grid.node(idx)) for idx in grid.indices()))


class TruncatedMap:
    """Index-remapping view of a grid function with some axes frozen.

    Coordinates on the support of ``alpha`` are free; the others stay at
    the base node.  No lower-dimensional copy of the values is made.
    """

    def __init__(self, source: GridFunction, alpha: MultiIndex, base: Sequence[int]):
        alpha = validate_alpha(alpha)
        if sum(alpha) == 0:
            raise VhkError("empty truncation")
        self.source = source
        self.alpha = alpha
        self.base = source.grid.check_index(base)
        self._support = support(alpha)
        self.grid = source.grid.restrict(alpha)

    def embed(self, tidx: Sequence[int]) -> tuple[int, ...]:
        """Map a truncated index vector back to a full-grid index vector."""
        idx = list(self.base)
        for pos, i in zip(self._support, tidx):
            idx[pos] = i
        return tuple(idx)

    def at(self, tidx: Sequence[int]):
        return self.source.at(self.embed(tidx))


@dataclass(frozen=True)
class NetPartition:
    """Per-axis index subsets of a rectangle, endpoints included.

    The cells of a net partition are non-degenerate, non-overlapping and
    tile the rectangle spanned by the per-axis endpoints.
    """

    grid: Grid
    per_axis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        per_axis = tuple(tuple(int(i) for i in axis) for axis in self.per_axis)
        if len(per_axis) != self.grid.ndim:
            raise VhkError("per-axis subset count differs from grid dimension")
        for axis, m in zip(per_axis, self.grid.shape):
            if len(axis) < 2:
                raise VhkError("each axis of a net partition needs two endpoints")
            if any(not (a < b) for a, b in zip(axis, axis[1:])):
                raise VhkError("partition indices must strictly increase")
            if axis[0] < 0 or axis[-1] >= m:
                raise VhkError(f"partition indices {axis} out of range for axis of length {m}")
        object.__setattr__(self, "per_axis", per_axis)

    @property
    def rect(self) -> SubRectangle:
        return SubRectangle(tuple(axis[0] for axis in self.per_axis),
                            tuple(axis[-1] for axis in self.per_axis))

    @property
    def cell_count(self) -> int:
        return math.prod(len(axis) - 1 for axis in self.per_axis)


def finest_partition(grid: Grid, rect: SubRectangle) -> NetPartition:
    """The partition using every grid index of ``rect`` in every axis."""
    if len(rect.lo) != grid.ndim:
        raise GridMismatchError("rectangle dimension differs from grid dimension")
    grid.check_index(rect.lo)
    grid.check_index(rect.hi)
    if rect.is_degenerate:
        raise DegenerateRectangleError(
            f"degenerate rectangle on axes {rect.degenerate_axes()}")
    return NetPartition(grid, tuple(tuple(range(lo, hi + 1))
                                    for lo, hi in zip(rect.lo, rect.hi)))


def refine(p: NetPartition, q: NetPartition) -> NetPartition:
    """Per-axis union; the result refines both inputs."""
    if p.grid != q.grid:
        raise GridMismatchError("partitions over different grids")
    if p.rect != q.rect:
        raise GridMismatchError("partitions of different rectangles")
    return NetPartition(p.grid, tuple(tuple(sorted(set(a) | set(b)))
                                      for a, b in zip(p.per_axis, q.per_axis)))


def cells(p: NetPartition) -> list[SubRectangle]:
    """All cells of ``p`` in row-major order over the per-axis intervals."""
    spans = [list(zip(axis, axis[1:])) for axis in p.per_axis]
    out = []
    for combo in itertools.product(*spans):
        out.append(SubRectangle(tuple(c[0] for c in combo),
                                tuple(c[1] for c in combo)))
    return out


# -- document I/O -----------------------------------------------------------
#
# Grid-function document (UTF-8 JSON):
#   {"dims": n, "axes": [[floats...], ...], "space": <tag>, "values": [...]}
# with values row-major (axis 0 slowest).

def _document_dict(data) -> dict:
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentError("bad-json", f"document is not UTF-8: {exc}") from None
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DocumentError("bad-json", f"document is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise DocumentError("bad-document", "document root must be a JSON object")
    return data


def grid_from_document(doc: dict) -> Grid:
    if "axes" not in doc:
        raise DocumentError("bad-document", "missing 'axes'")
    axes = doc["axes"]
    if not isinstance(axes, list) or not all(isinstance(a, list) for a in axes):
        raise DocumentError("bad-document", "'axes' must be a list of lists")
    if "dims" in doc and doc["dims"] != len(axes):
        raise DocumentError("bad-dims", f"dims {doc['dims']} != number of axes {len(axes)}")
    try:
        return Grid(tuple(tuple(axis) for axis in axes))
    except DimensionCapError:
        raise
    except VhkError as exc:
        raise DocumentError("axis-not-strictly-increasing"
                            if "increasing" in str(exc) else "bad-document",
                            str(exc)) from None


def load_grid_function(data) -> GridFunction:
    """Parse a grid-function document; errors carry distinct codes."""
    doc = _document_dict(data)
    for key in ("dims", "axes", "space", "values"):
        if key not in doc:
            raise DocumentError("bad-document", f"missing '{key}'")
    grid = grid_from_document(doc)
    try:
        space = parse_space(doc["space"])
    except VhkError as exc:
        raise DocumentError("unknown-space", str(exc)) from None
    values = doc["values"]
    if not isinstance(values, list):
        raise DocumentError("bad-document", "'values' must be a list")
    if len(values) != grid.node_count:
        raise DocumentError(
            "value-count-mismatch",
            f"value count mismatch: {len(values)} values for {grid.node_count} nodes")
    try:
        parsed = tuple(space.from_jsonable(v) for v in values)
    except VhkError as exc:
        raise DocumentError("bad-value", str(exc)) from None
    return GridFunction(grid, space, parsed)


def grid_function_document(f: GridFunction) -> dict:
    return {
        "dims": f.grid.ndim,
        "axes": [list(axis) for axis in f.grid.axes],
        "space": f.space.tag,
        "values": [f.space.to_jsonable(v) for v in f.values],
    }


def save_grid_function(f: GridFunction) -> str:
    """Serialize to the canonical document form (round-trips with load)."""
    return json.dumps(grid_function_document(f), sort_keys=True)
