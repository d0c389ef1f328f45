"""Metric-semigroup value spaces and Bolzano-Weierstrass extraction.

A value space bundles a commutative, associative addition with a
translation-invariant metric.  No zero element is assumed anywhere: empty
sums are an error, and callers drop empty terms instead of materializing
them.

Four concrete spaces are provided:

* ``real`` -- real numbers, absolute difference.
* ``vector:<k>:<l1|l2|linf>`` -- vectors in R^k under a chosen norm,
  with the dual pairing <u, u*> = sum(u_i * u*_i).
* ``box:<k>`` -- nonempty axis-aligned boxes in R^k under the Minkowski
  sum and the Hausdorff metric induced by the sup norm, which reduces to
  the largest per-axis endpoint difference.
* ``multiset`` -- finite multisets of string atoms under multiplicity
  addition, with the total multiplicity of the symmetric difference as
  distance.  This space is exact: formal sum identities are decidable in
  it because two sums agree for every map iff the evaluation-point
  multisets coincide.

All values are immutable and every operation is reentrant.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Callable, Iterable, Sequence

from .errors import (
    BoundednessError,
    CompactnessError,
    EmptySumError,
    SpaceMismatchError,
    VhkError,
)

#: Default cap for the boundedness surrogate used by ``bw_extract``.
DEFAULT_DIAMETER_CAP = 1e6

_NORMS = ("l1", "l2", "linf")


class ValueSpace:
    """Contract shared by the four concrete value spaces."""

    tag: str = ""
    supports_compactness: bool = False
    exact: bool = False

    def validate(self, value):
        """Return the canonical form of ``value`` or raise SpaceMismatchError."""
        raise NotImplementedError

    def add(self, u, v):
        raise NotImplementedError

    def dist(self, u, v) -> float:
        raise NotImplementedError

    def sum(self, values: Iterable):
        """Left fold of ``add`` over a nonempty sequence."""
        it = iter(values)
        try:
            acc = self.validate(next(it))
        except StopIteration:
            raise EmptySumError("empty semigroup sum") from None
        for v in it:
            acc = self.add(acc, v)
        return acc

    def equal(self, u, v) -> bool:
        return self.validate(u) == self.validate(v)

    # Sequential-compactness hooks: spaces that support extraction expose
    # their values as fixed-length coordinate vectors.

    def coordinates(self, value) -> tuple[float, ...]:
        raise CompactnessError(f"{self.tag}: no compactness support")

    def coordinate_slack(self) -> float:
        """Factor c with dist(u, v) <= c * max coordinate difference."""
        raise CompactnessError(f"{self.tag}: no compactness support")

    def to_jsonable(self, value):
        raise NotImplementedError

    def from_jsonable(self, obj):
        raise NotImplementedError

    def __repr__(self):
        return f"<ValueSpace {self.tag}>"

    def __eq__(self, other):
        return isinstance(other, ValueSpace) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)


def _as_float(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpaceMismatchError(f"expected a real number, got {x!r}")
    x = float(x)
    if math.isnan(x):
        raise SpaceMismatchError("NaN is not a valid value")
    return x


class RealSpace(ValueSpace):
    """Real numbers with addition and absolute difference."""

    tag = "real"
    supports_compactness = True

    def validate(self, value):
        return _as_float(value)

    def add(self, u, v):
        return self.validate(u) + self.validate(v)

    def dist(self, u, v):
        return abs(self.validate(u) - self.validate(v))

    def coordinates(self, value):
        return (self.validate(value),)

    def coordinate_slack(self):
        return 1.0

    def to_jsonable(self, value):
        return self.validate(value)

    def from_jsonable(self, obj):
        return self.validate(obj)


class VectorSpace(ValueSpace):
    """Vectors in R^k under componentwise addition and a chosen norm."""

    supports_compactness = True

    def __init__(self, k: int, norm: str = "l2"):
        if not isinstance(k, int) or k < 1:
            raise VhkError(f"vector dimension must be a positive integer, got {k!r}")
        if norm not in _NORMS:
            raise VhkError(f"unknown norm {norm!r}, expected one of {_NORMS}")
        self.k = k
        self.norm = norm
        self.tag = f"vector:{k}:{norm}"

    def validate(self, value):
        if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
            raise SpaceMismatchError(f"expected a length-{self.k} vector, got {value!r}")
        if len(value) != self.k:
            raise SpaceMismatchError(
                f"expected a length-{self.k} vector, got length {len(value)}")
        return tuple(_as_float(c) for c in value)

    def add(self, u, v):
        u, v = self.validate(u), self.validate(v)
        return tuple(a + b for a, b in zip(u, v))

    def dist(self, u, v):
        u, v = self.validate(u), self.validate(v)
        return self.norm_of(tuple(a - b for a, b in zip(u, v)))

    def norm_of(self, u) -> float:
        u = self.validate(u)
        if self.norm == "l1":
            return math.fsum(abs(c) for c in u)
        if self.norm == "l2":
            return math.sqrt(math.fsum(c * c for c in u))
        return max(abs(c) for c in u)

    def pair(self, u, dual) -> float:
        """Dual pairing <u, u*> = sum of u_i * u*_i."""
        u = self.validate(u)
        dual = self.validate(dual)
        return math.fsum(a * b for a, b in zip(u, dual))

    def coordinates(self, value):
        return self.validate(value)

    def coordinate_slack(self):
        if self.norm == "l1":
            return float(self.k)
        if self.norm == "l2":
            return math.sqrt(self.k)
        return 1.0

    def to_jsonable(self, value):
        return list(self.validate(value))

    def from_jsonable(self, obj):
        return self.validate(obj)


class BoxSpace(ValueSpace):
    """Nonempty axis-aligned boxes in R^k.

    Addition is the Minkowski sum (componentwise interval sums).  The
    Hausdorff metric induced by the sup norm has the closed form
    max over axes of max(|lo difference|, |hi difference|); the test
    suite validates this against a sampling oracle.
    """

    supports_compactness = True

    def __init__(self, k: int):
        if not isinstance(k, int) or k < 1:
            raise VhkError(f"box dimension must be a positive integer, got {k!r}")
        self.k = k
        self.tag = f"box:{k}"

    def validate(self, value):
        if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
            raise SpaceMismatchError(f"expected {self.k} interval(s), got {value!r}")
        if len(value) != self.k:
            raise SpaceMismatchError(
                f"expected {self.k} interval(s), got {len(value)}")
        out = []
        for pair in value:
            if isinstance(pair, (str, bytes)) or not isinstance(pair, Sequence) or len(pair) != 2:
                raise SpaceMismatchError(f"expected a [lo, hi] pair, got {pair!r}")
            lo, hi = _as_float(pair[0]), _as_float(pair[1])
            if lo > hi:
                raise SpaceMismatchError(f"inverted interval [{lo}, {hi}]")
            out.append((lo, hi))
        return tuple(out)

    def add(self, u, v):
        u, v = self.validate(u), self.validate(v)
        return tuple((a[0] + b[0], a[1] + b[1]) for a, b in zip(u, v))

    def dist(self, u, v):
        u, v = self.validate(u), self.validate(v)
        return max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(u, v))

    def coordinates(self, value):
        value = self.validate(value)
        return tuple(c for pair in value for c in pair)

    def coordinate_slack(self):
        return 1.0

    def to_jsonable(self, value):
        return [list(pair) for pair in self.validate(value)]

    def from_jsonable(self, obj):
        return self.validate(obj)


class MultisetSpace(ValueSpace):
    """Finite multisets of string atoms; the free test semigroup."""

    tag = "multiset"
    exact = True

    def validate(self, value):
        if isinstance(value, (str, bytes)) or not isinstance(value, Iterable):
            raise SpaceMismatchError(f"expected an iterable of atoms, got {value!r}")
        atoms = tuple(value)
        for a in atoms:
            if not isinstance(a, str):
                raise SpaceMismatchError(f"multiset atom {a!r} is not a string")
        return tuple(sorted(atoms))

    def add(self, u, v):
        u, v = self.validate(u), self.validate(v)
        return tuple(sorted(u + v))

    def dist(self, u, v):
        cu = Counter(self.validate(u))
        cv = Counter(self.validate(v))
        return float(sum(abs(cu[a] - cv[a]) for a in set(cu) | set(cv)))

    def to_jsonable(self, value):
        return list(self.validate(value))

    def from_jsonable(self, obj):
        return self.validate(obj)


def parse_space(tag: str) -> ValueSpace:
    """Build a value space from its document tag."""
    if not isinstance(tag, str):
        raise VhkError(f"space tag must be a string, got {tag!r}")
    if tag == "real":
        return RealSpace()
    if tag == "multiset":
        return MultisetSpace()
    parts = tag.split(":")
    if parts[0] == "vector" and len(parts) == 3:
        try:
            k = int(parts[1])
        except ValueError:
            raise VhkError(f"bad vector dimension in tag {tag!r}") from None
        return VectorSpace(k, parts[2])
    if parts[0] == "box" and len(parts) == 2:
        try:
            k = int(parts[1])
        except ValueError:
            raise VhkError(f"bad box dimension in tag {tag!r}") from None
        return BoxSpace(k)
    raise VhkError(f"unknown value space tag {tag!r}")


def bw_extract(space: ValueSpace,
               value_at: Callable[[int], object],
               indices: Sequence[int],
               eps: float,
               diameter_cap: float = DEFAULT_DIAMETER_CAP):
    """Extract a subsequence clustering within ``eps`` by repeated halving.

    ``value_at`` maps an index to a value of ``space``; ``indices`` is the
    finite probe window standing in for the infinite sequence.  Returns
    ``(survivors, candidate)`` where ``survivors`` is a strictly
    increasing subsequence of ``indices`` and ``candidate`` is an attained
    value with ``dist(value_at(j), candidate) <= eps`` for every survivor.

    The coordinate box of the probed values is halved along its widest
    axis until its diameter in the space metric drops below ``eps``; at
    each halving the half holding the most survivors is kept, with ties
    broken toward the lower half.
    """
    if eps <= 0:
        raise VhkError(f"eps must be positive, got {eps}")
    if not space.supports_compactness:
        raise CompactnessError(f"{space.tag}: no compactness support")
    idxs = list(indices)
    if not idxs:
        raise VhkError("empty probe window")
    if any(b <= a for a, b in zip(idxs, idxs[1:])):
        raise VhkError("probe indices must be strictly increasing")

    values = {}
    coords = {}
    for j in idxs:
        v = space.validate(value_at(j))
        values[j] = v
        coords[j] = space.coordinates(v)
    first = values[idxs[0]]
    for j in idxs:
        if space.dist(values[j], first) > diameter_cap:
            raise BoundednessError(
                f"sequence value at index {j} exceeds the diameter cap {diameter_cap}")

    ncoord = len(coords[idxs[0]])
    target = eps / space.coordinate_slack()
    survivors = idxs

    lo = [min(coords[j][c] for j in survivors) for c in range(ncoord)]
    hi = [max(coords[j][c] for j in survivors) for c in range(ncoord)]
    for _ in range(100_000):
        widths = [h - l for l, h in zip(lo, hi)]
        widest = max(widths)
        if widest <= target:
            break
        axis = widths.index(widest)
        mid = (lo[axis] + hi[axis]) / 2.0
        lowers = [j for j in survivors if coords[j][axis] <= mid]
        uppers = [j for j in survivors if coords[j][axis] >= mid]
        if len(lowers) >= len(uppers):
            survivors = lowers
        else:
            survivors = uppers
        lo = [min(coords[j][c] for j in survivors) for c in range(ncoord)]
        hi = [max(coords[j][c] for j in survivors) for c in range(ncoord)]
    else:
        raise VhkError("halving failed to converge")

    candidate = values[survivors[0]]
    return survivors, candidate
