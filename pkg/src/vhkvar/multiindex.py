"""Zero/one multiindex arithmetic, parity classification and enumeration.

A multiindex is a fixed-length tuple of components that are each 0 or 1.
Every summation range used by the variation engine (corner sums of mixed
differences, truncation supports, parity-split double sums) is a set of
such multiindices, so the enumeration order fixed here makes all
downstream sums deterministic: tuples are always produced in ascending
lexicographic order.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

from .errors import DimensionCapError, VhkError

MultiIndex = tuple[int, ...]

#: Enumerations are 2**n-sized; larger dimensions are a usage error.
DIMENSION_CAP = 16

_PARITIES = ("all", "even", "odd")


def validate(theta: Sequence[int]) -> MultiIndex:
    """Canonicalize ``theta`` to a tuple, checking 0/1 components."""
    t = tuple(theta)
    if len(t) == 0:
        raise VhkError("multiindex must have at least one component")
    if len(t) > DIMENSION_CAP:
        raise DimensionCapError(
            f"dimension {len(t)} exceeds cap {DIMENSION_CAP}")
    for c in t:
        if c not in (0, 1):
            raise VhkError(f"multiindex component {c!r} is not 0 or 1")
    return t


def zero(n: int) -> MultiIndex:
    return (0,) * n


def ones(n: int) -> MultiIndex:
    return (1,) * n


def order(theta: Sequence[int]) -> int:
    """Sum of the components."""
    return sum(theta)


def parity(theta: Sequence[int]) -> int:
    return order(theta) % 2


def is_even(theta: Sequence[int]) -> bool:
    return order(theta) % 2 == 0


def is_odd(theta: Sequence[int]) -> bool:
    return order(theta) % 2 == 1


def leq(theta: Sequence[int], alpha: Sequence[int]) -> bool:
    """Componentwise partial order."""
    return all(t <= a for t, a in zip(theta, alpha))


def complement(alpha: Sequence[int]) -> MultiIndex:
    """The multiindex with every component flipped."""
    return tuple(1 - a for a in alpha)


def join(alpha: Sequence[int], theta: Sequence[int]) -> MultiIndex:
    """Componentwise maximum."""
    if len(alpha) != len(theta):
        raise VhkError("join of multiindices of different lengths")
    return tuple(max(a, t) for a, t in zip(alpha, theta))


def meet(alpha: Sequence[int], theta: Sequence[int]) -> MultiIndex:
    """Componentwise minimum."""
    if len(alpha) != len(theta):
        raise VhkError("meet of multiindices of different lengths")
    return tuple(min(a, t) for a, t in zip(alpha, theta))


def disjoint_sum(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    """Componentwise sum of two multiindices with disjoint supports."""
    s = tuple(a + b for a, b in zip(alpha, beta))
    return validate(s)


def support(alpha: Sequence[int]) -> tuple[int, ...]:
    """Positions of the nonzero components, ascending."""
    return tuple(i for i, a in enumerate(alpha) if a == 1)


def enumerate_leq(alpha: Sequence[int], parity_filter: str = "all") -> list[MultiIndex]:
    """All multiindices below ``alpha``, optionally filtered by parity.

    Results are in ascending lexicographic order.  The cardinality is
    2**|alpha| for ``all`` and 2**(|alpha|-1) for either parity filter
    when |alpha| >= 1.
    """
    if parity_filter not in _PARITIES:
        raise VhkError(f"unknown parity filter {parity_filter!r}")
    alpha = validate(alpha)
    positions = support(alpha)
    out = []
    for bits in itertools.product((0, 1), repeat=len(positions)):
        if parity_filter == "even" and sum(bits) % 2 != 0:
            continue
        if parity_filter == "odd" and sum(bits) % 2 != 1:
            continue
        theta = [0] * len(alpha)
        for pos, bit in zip(positions, bits):
            theta[pos] = bit
        out.append(tuple(theta))
    return out


def enumerate_between(beta: Sequence[int], gamma: Sequence[int],
                      parity_filter: str = "all") -> list[MultiIndex]:
    """All multiindices in the closed interval [beta, gamma], lex order."""
    if parity_filter not in _PARITIES:
        raise VhkError(f"unknown parity filter {parity_filter!r}")
    beta = validate(beta)
    gamma = validate(gamma)
    if len(beta) != len(gamma) or not leq(beta, gamma):
        raise VhkError("empty interval")
    free = support(tuple(g - b for b, g in zip(beta, gamma)))
    out = []
    for bits in itertools.product((0, 1), repeat=len(free)):
        alpha = list(beta)
        for pos, bit in zip(free, bits):
            alpha[pos] = bit
        if parity_filter == "even" and sum(alpha) % 2 != 0:
            continue
        if parity_filter == "odd" and sum(alpha) % 2 != 1:
            continue
        out.append(tuple(alpha))
    return out


def truncate_point(x: Sequence, alpha: Sequence[int]) -> tuple:
    """Keep the coordinates of ``x`` on the support of ``alpha``.

    Works on points and on node index vectors alike; coordinate order is
    preserved.
    """
    alpha = validate(alpha)
    if order(alpha) == 0:
        raise VhkError("empty truncation")
    if len(x) != len(alpha):
        raise VhkError("point and multiindex lengths differ")
    return tuple(x[i] for i in support(alpha))


def count_between(beta: Sequence[int], gamma: Sequence[int], parity_filter: str) -> int:
    """Exact count of multiindices in [beta, gamma] with the given parity.

    Uses the closed form: with f free positions, each parity class of a
    non-singleton interval has 2**(f-1) elements.
    """
    if parity_filter not in ("even", "odd"):
        raise VhkError(f"parity filter must be 'even' or 'odd', got {parity_filter!r}")
    beta = validate(beta)
    gamma = validate(gamma)
    if len(beta) != len(gamma) or not leq(beta, gamma):
        raise VhkError("empty interval")
    free = order(gamma) - order(beta)
    if free == 0:
        want = 0 if parity_filter == "even" else 1
        return 1 if parity(beta) == want else 0
    return 2 ** (free - 1)


def binomial_parity_sums(m: int, k: int) -> tuple[int, int]:
    """The two parity-restricted binomial sums over C(m-k, .).

    First: sum of C(m-k, 2i-k) over integer i with k/2 <= i <= m/2.
    Second: sum of C(m-k, 2i-1-k) over integer i with
    (k+1)/2 <= i <= (m+1)/2.  Both equal 2**(m-k-1) for 0 <= k <= m-1.
    """
    if not (isinstance(m, int) and isinstance(k, int)):
        raise VhkError("m and k must be integers")
    if m < 1 or k < 0 or k > m - 1:
        raise VhkError(f"need 1 <= m and 0 <= k <= m-1, got m={m}, k={k}")
    first = 0
    for i in range(math.ceil(k / 2), math.floor(m / 2) + 1):
        j = 2 * i - k
        if 0 <= j <= m - k:
            first += math.comb(m - k, j)
    second = 0
    for i in range(math.ceil((k + 1) / 2), math.floor((m + 1) / 2) + 1):
        j = 2 * i - 1 - k
        if 0 <= j <= m - k:
            second += math.comb(m - k, j)
    return first, second


def flip(theta: Sequence[int], i: int) -> MultiIndex:
    """Flip component ``i``; maps one parity class below alpha onto the other."""
    theta = validate(theta)
    if not 0 <= i < len(theta):
        raise VhkError(f"component index {i} out of range")
    return theta[:i] + (1 - theta[i],) + theta[i + 1:]
