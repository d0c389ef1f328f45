"""Independent brute-force reference implementations, used only by tests.

Nothing here calls into the variation engine: mixed differences, cell
walks and suprema are recomputed from scratch so that agreement between
the two routes is evidence, not tautology.  The oracle is allowed to be
exponentially slow within its caps, and caps fail loudly instead of
silently truncating the search space.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import EnumerationCapError, VhkError
from .grid import Grid, GridFunction, NetPartition, SubRectangle
from .multiindex import (
    MultiIndex,
    binomial_parity_sums,
    complement,
    count_between,
    disjoint_sum,
    enumerate_between,
    enumerate_leq,
    is_even,
    is_odd,
    order,
    validate as validate_alpha,
)
from .semigroup import BoxSpace, MultisetSpace

#: Partitions of a rectangle are a product of per-axis interior subsets.
DEFAULT_PARTITION_CAP = 2 ** 20


def partition_count(grid: Grid, rect: SubRectangle) -> int:
    """Number of net partitions of ``rect``: endpoints forced, interior free."""
    grid.check_index(rect.lo)
    grid.check_index(rect.hi)
    if rect.is_degenerate:
        raise VhkError("degenerate rectangle has no net partitions")
    return math.prod(2 ** (hi - lo - 1) for lo, hi in zip(rect.lo, rect.hi))


def enumerate_partitions(grid: Grid, rect: SubRectangle,
                         cap: int = DEFAULT_PARTITION_CAP) -> Iterator[NetPartition]:
    """Every net partition of ``rect`` exactly once, in a deterministic order.

    Per axis, interior index subsets are enumerated as ascending bitmasks;
    axes combine row-major.
    """
    total = partition_count(grid, rect)
    if total > cap:
        raise EnumerationCapError(
            f"{total} net partitions exceed the cap {cap}")

    per_axis_choices = []
    for lo, hi in zip(rect.lo, rect.hi):
        interior = list(range(lo + 1, hi))
        choices = []
        for mask in range(2 ** len(interior)):
            picked = [interior[b] for b in range(len(interior)) if mask >> b & 1]
            choices.append(tuple([lo] + picked + [hi]))
        per_axis_choices.append(choices)
    for combo in itertools.product(*per_axis_choices):
        yield NetPartition(grid, tuple(combo))


def _corner_sums(f: GridFunction, alpha: MultiIndex, x, y, z) -> float:
    pos = [i for i, a in enumerate(alpha) if a == 1]
    evens, odds = [], []
    for bits in itertools.product((0, 1), repeat=len(pos)):
        idx = list(z)
        for p, bit in zip(pos, bits):
            idx[p] = y[p] if bit else x[p]
        (evens if sum(bits) % 2 == 0 else odds).append(f.at(tuple(idx)))
    return f.space.dist(f.space.sum(evens), f.space.sum(odds))


def _prevariation(f: GridFunction, alpha: MultiIndex, base,
                  partition: NetPartition) -> float:
    pos = [i for i, a in enumerate(alpha) if a == 1]
    spans = [list(zip(axis, axis[1:])) for axis in partition.per_axis]
    total = []
    for combo in itertools.product(*spans):
        x = list(base)
        y = list(base)
        for axis, (lo, hi) in zip(pos, combo):
            x[axis] = lo
            y[axis] = hi
        total.append(_corner_sums(f, alpha, tuple(x), tuple(y), tuple(base)))
    return math.fsum(total)


def brute_force_variation(f: GridFunction, alpha: MultiIndex, base: Sequence[int],
                          rect: SubRectangle,
                          cap: int = DEFAULT_PARTITION_CAP) -> float:
    """The literal supremum: maximum prevariation over every net partition."""
    alpha = validate_alpha(alpha)
    if order(alpha) == 0:
        raise VhkError("multiindex must be nonzero")
    base = f.grid.check_index(base)
    srect = rect.restrict(alpha)
    if srect.is_degenerate:
        return 0.0
    tgrid = f.grid.restrict(alpha)
    best = 0.0
    for partition in enumerate_partitions(tgrid, srect, cap):
        best = max(best, _prevariation(f, alpha, base, partition))
    return best


def brute_force_total_variation(f: GridFunction, lo: Sequence[int],
                                hi: Sequence[int],
                                cap: int = DEFAULT_PARTITION_CAP) -> float:
    """Exhaustive total variation over a sub-rectangle, based at its corner."""
    lo = f.grid.check_index(lo)
    hi = f.grid.check_index(hi)
    rect = SubRectangle(lo, hi)
    n = f.grid.ndim
    terms = []
    for alpha in itertools.product((0, 1), repeat=n):
        if not any(alpha):
            continue
        terms.append(brute_force_variation(f, alpha, lo, rect, cap))
    return math.fsum(terms)


def hausdorff_sampling(u, v, samples_per_axis: int) -> float:
    """Two-sided sup-inf Hausdorff distance between boxes by sampling.

    Exploits the product structure of the sup norm: the inner infimum for
    a sampled point decomposes per axis into a point-to-interval distance,
    and the outer supremum is a maximum over per-axis samples.
    """
    if samples_per_axis < 2:
        raise VhkError("need at least two samples per axis")
    space = BoxSpace(len(u))
    u = space.validate(u)
    v = space.validate(v)

    def point_to_interval(t, lo, hi):
        return max(lo - t, t - hi, 0.0)

    def excess(src, dst):
        worst = 0.0
        for (slo, shi), (dlo, dhi) in zip(src, dst):
            step = (shi - slo) / (samples_per_axis - 1)
            for s in range(samples_per_axis):
                t = slo + s * step
                worst = max(worst, point_to_interval(t, dlo, dhi))
        return worst

    return max(excess(u, v), excess(v, u))


# -- identity suite ----------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    family: str
    instance: str
    ok: bool
    detail: str = ""


@dataclass
class IdentityReport:
    n_max: int
    m_max: int
    trials: int
    seed: int
    checks: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def by_family(self) -> dict:
        out: dict = {}
        for c in self.checks:
            passed, total = out.get(c.family, (0, 0))
            out[c.family] = (passed + (1 if c.ok else 0), total + 1)
        return out


def _subset_size_parity_count(m: int, want_parity: int) -> int:
    """Count subsets of an m-element set whose size has the given parity."""
    count = 0
    for mask in range(2 ** m):
        if bin(mask).count("1") % 2 == want_parity:
            count += 1
    return count


def _atom(theta: MultiIndex) -> tuple[str, ...]:
    return ("t" + "".join(str(c) for c in theta),)


_MS = MultisetSpace()


def _ms_sum(parts: list):
    """Multiset sum with the omission convention for empty term lists."""
    if not parts:
        return ()
    return _MS.sum(parts)


def _check_double_sum_identities(n: int, report: IdentityReport):
    """Parity-split double sums over directions collapse to single sums."""
    for gamma in itertools.product((0, 1), repeat=n):
        # even/even: left double sum equals the odd-direction double sum
        # plus the top term exactly when the top is even.
        left = [_atom(theta)
                for a in enumerate_leq(gamma, "even")
                for theta in enumerate_leq(a, "even")]
        right = [_atom(theta)
                 for a in enumerate_leq(gamma, "odd")
                 for theta in enumerate_leq(a, "even")]
        if is_even(gamma):
            right.append(_atom(gamma))
        ok = _ms_sum(left) == _ms_sum(right)
        report.checks.append(IdentityCheck(
            "double-sum", f"n={n} gamma={gamma} even-branch", ok))

        left = [_atom(theta)
                for a in enumerate_leq(gamma, "odd")
                for theta in enumerate_leq(a, "odd")]
        right = [_atom(theta)
                 for a in enumerate_leq(gamma, "even")
                 for theta in enumerate_leq(a, "odd")]
        if is_odd(gamma):
            right.append(_atom(gamma))
        ok = _ms_sum(left) == _ms_sum(right)
        report.checks.append(IdentityCheck(
            "double-sum", f"n={n} gamma={gamma} odd-branch", ok))


def _check_interval_sum_identities(n: int, report: IdentityReport):
    """The four shifted double-sum identities split by the co-support parity."""
    one = (1,) * n
    for alpha in itertools.product((0, 1), repeat=n):
        co = complement(alpha)
        if is_even(co):
            pairs = [
                ("shift-even",
                 [_atom(disjoint_sum(co, t)) for t in enumerate_leq(alpha, "even")],
                 "odd", "even", "even"),
                ("shift-odd",
                 [_atom(disjoint_sum(co, t)) for t in enumerate_leq(alpha, "odd")],
                 "odd", "odd", "even"),
            ]
        else:
            pairs = [
                ("top-even",
                 [_atom(t) for t in enumerate_between(co, one, "even")],
                 "even", "even", "odd"),
                ("top-odd",
                 [_atom(t) for t in enumerate_between(co, one, "odd")],
                 "even", "odd", "odd"),
            ]
        for label, head, left_bp, theta_p, right_bp in pairs:
            left = list(head)
            for b in enumerate_leq(co, left_bp):
                for t in enumerate_leq(disjoint_sum(alpha, b), theta_p):
                    left.append(_atom(t))
            right = []
            for b in enumerate_leq(co, right_bp):
                for t in enumerate_leq(disjoint_sum(alpha, b), theta_p):
                    right.append(_atom(t))
            ok = _ms_sum(left) == _ms_sum(right)
            report.checks.append(IdentityCheck(
                "interval-sum", f"n={n} alpha={alpha} {label}", ok))


def _random_multiset(rng: random.Random, max_size: int = 4) -> tuple:
    atoms = "abcdef"
    return tuple(sorted(rng.choice(atoms) for _ in range(rng.randrange(max_size + 1))))


def _split(ms: tuple, parts: int, rng: random.Random) -> list:
    buckets: list[list[str]] = [[] for _ in range(parts)]
    for atom in ms:
        buckets[rng.randrange(parts)].append(atom)
    return [tuple(sorted(b)) for b in buckets]


def _check_glued_sums(trials: int, seed: int, report: IdentityReport):
    """Random tuples built from the three gluing patterns satisfy the
    cross-sum balance equation and the resulting distance bound."""
    rng = random.Random(seed)
    for t in range(trials):
        m = rng.randrange(2, 7)
        u_terms = [None] * (m + 1)  # 1-based
        v_terms = [None] * (m + 1)
        if m % 2 == 1:
            u = _random_multiset(rng)
            v = _random_multiset(rng)
            for i in range(2, m + 1, 2):
                u_terms[i] = _random_multiset(rng)
                v_terms[i] = _random_multiset(rng)
            lu = _MS.sum([u] + [u_terms[i] for i in range(2, m + 1, 2)])
            lv = _MS.sum([v] + [v_terms[i] for i in range(2, m + 1, 2)])
            odd_slots = list(range(1, m + 1, 2))
            for slot, part in zip(odd_slots, _split(lu, len(odd_slots), rng)):
                u_terms[slot] = part
            for slot, part in zip(odd_slots, _split(lv, len(odd_slots), rng)):
                v_terms[slot] = part
            pattern = "odd-m"
        elif rng.random() < 0.5:
            v = _random_multiset(rng)
            for i in range(1, m + 1, 2):
                u_terms[i] = _random_multiset(rng)
            lu = _MS.sum([v] + [u_terms[i] for i in range(1, m + 1, 2)])
            parts = _split(lu, m // 2 + 1, rng)
            u = parts[0]
            for slot, part in zip(range(2, m + 1, 2), parts[1:]):
                u_terms[slot] = part
            r = _random_multiset(rng)
            for slot, part in zip(range(2, m + 1, 2), _split(r, m // 2, rng)):
                v_terms[slot] = part
            for slot, part in zip(range(1, m + 1, 2), _split(r, m // 2, rng)):
                v_terms[slot] = part
            pattern = "even-m-anchored"
        else:
            u = _random_multiset(rng)
            v = _random_multiset(rng)
            for i in range(1, m + 1, 2):
                u_terms[i] = _random_multiset(rng)
                v_terms[i] = _random_multiset(rng)
            s = _MS.sum([v] + [u_terms[i] for i in range(1, m + 1, 2)])
            for slot, part in zip(range(2, m + 1, 2), _split(s, m // 2, rng)):
                u_terms[slot] = part
            s = _MS.sum([u] + [v_terms[i] for i in range(1, m + 1, 2)])
            for slot, part in zip(range(2, m + 1, 2), _split(s, m // 2, rng)):
                v_terms[slot] = part
            pattern = "even-m-crossed"

        balance_left = _MS.sum([u_terms[i] for i in range(2, m + 1, 2)] + [u]
                               + [v_terms[i] for i in range(1, m + 1, 2)])
        balance_right = _MS.sum([v_terms[i] for i in range(2, m + 1, 2)] + [v]
                                + [u_terms[i] for i in range(1, m + 1, 2)])
        balanced = balance_left == balance_right
        bound = _MS.dist(u, v) <= math.fsum(
            _MS.dist(u_terms[i], v_terms[i]) for i in range(1, m + 1))
        report.checks.append(IdentityCheck(
            "glued-sums", f"trial={t} m={m} {pattern}", balanced and bound,
            "" if balanced and bound else f"balanced={balanced} bound={bound}"))


def verify_identity_suite(n_max: int = 3, m_max: int = 6,
                          trials: int = 200, seed: int = 0) -> IdentityReport:
    """Run the combinatorial identity families and report per-instance results.

    Families: parity-restricted binomial sums, even/odd interval counts,
    the double-sum collapse identities and the shifted interval-sum
    identities (both exact in the multiset semigroup), plus randomized
    glued-sum distance bounds.
    """
    if not 1 <= n_max <= 6:
        raise VhkError(f"n_max must be within 1..6, got {n_max}")
    if not 1 <= m_max <= 12:
        raise VhkError(f"m_max must be within 1..12, got {m_max}")
    report = IdentityReport(n_max=n_max, m_max=m_max, trials=trials, seed=seed)

    for m in range(1, m_max + 1):
        for k in range(0, m):
            first, second = binomial_parity_sums(m, k)
            expected = 2 ** (m - k - 1)
            enum_first = _subset_size_parity_count(m - k, k % 2)
            enum_second = _subset_size_parity_count(m - k, (k + 1) % 2)
            ok = first == second == expected == enum_first == enum_second
            report.checks.append(IdentityCheck(
                "binomial", f"m={m} k={k}", ok,
                "" if ok else f"{first},{second},{enum_first},{enum_second} != {expected}"))

    for n in range(1, n_max + 1):
        for combo in itertools.product(((0, 0), (0, 1), (1, 1)), repeat=n):
            beta = tuple(c[0] for c in combo)
            gamma = tuple(c[1] for c in combo)
            if beta == gamma:
                continue
            even = count_between(beta, gamma, "even")
            odd = count_between(beta, gamma, "odd")
            enum_even = len(enumerate_between(beta, gamma, "even"))
            enum_odd = len(enumerate_between(beta, gamma, "odd"))
            ok = even == odd == enum_even == enum_odd
            report.checks.append(IdentityCheck(
                "parity-count", f"n={n} beta={beta} gamma={gamma}", ok))

    for n in range(1, min(n_max, 5) + 1):
        _check_double_sum_identities(n, report)
        _check_interval_sum_identities(n, report)

    _check_glued_sums(trials, seed, report)
    return report
