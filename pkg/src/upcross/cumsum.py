"""The slope-adjusted cumulative sum and the inequalities it satisfies.

For a path ``h(0..n)`` and a gap ``(alpha, beta)`` the cumulative sum is the
maximum, over families ``0 <= l_1 < r_1 < l_2 < ... < r_s <= n``, of

    sum_i [h(r_i) - beta * r_i] - [h(l_i) - alpha * l_i]

with the empty family contributing 0.  Among optimal families we always
report the one with the most intervals, then the lexicographically smallest
endpoint list, so that the interval count ``s`` is well defined.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import IndexOutOfRange, TooLarge
from .sequences import (
    _check_horizon,
    count_upcrossings,
    integer_path,
    partial_sums,
)

BRUTEFORCE_LIMIT = 14


@dataclass(frozen=True)
class IntervalFamily:
    intervals: tuple = ()

    def __post_init__(self):
        intervals = tuple((int(l), int(r)) for l, r in self.intervals)
        flat = [x for pair in intervals for x in pair]
        if flat and flat[0] < 0:
            raise ValueError("interval endpoints must be nonnegative")
        if any(a >= b for a, b in zip(flat, flat[1:])):
            raise ValueError(f"endpoints must strictly interleave: {intervals}")
        object.__setattr__(self, "intervals", intervals)

    def __len__(self):
        return len(self.intervals)

    def endpoints(self):
        return tuple(x for pair in self.intervals for x in pair)


@dataclass(frozen=True)
class CumSumResult:
    value: Fraction
    family: IntervalFamily
    family_size: int


def family_value(heights, gap, family):
    """Slope-adjusted sum of one family, from the Fraction path directly."""
    total = Fraction(0)
    for l, r in family.intervals:
        total += (heights[r] - gap.beta * r) - (heights[l] - gap.alpha * l)
    return total


def cumulative_sum(seq, gap, n):
    """Exact cumulative sum over positions ``0..n`` by a two-state DP.

    Works backwards: ``closed[k]`` is the best (value, count) using endpoints in
    ``k..n`` with no interval open; ``opened[k]`` is the best when an interval
    is open and still needs its right endpoint at some ``r >= k``.  Pairs are
    compared lexicographically, which is compatible with adding them, so the
    DP maximizes the value first and the interval count second.
    """
    if n < 0 or n > len(seq):
        raise IndexOutOfRange(f"horizon {n} outside 0..{len(seq)}")
    heights, lo, hi, scale = integer_path(seq.terms[:n], gap)
    right = [heights[k] - hi * k for k in range(n + 1)]
    left = [lo * k - heights[k] for k in range(n + 1)]

    closed = [None] * (n + 2)
    opened = [None] * (n + 2)
    closed[n + 1] = (0, 0)
    for k in range(n, -1, -1):
        after = closed[k + 1]
        candidate = (right[k] + after[0], after[1] + 1)
        opened[k] = candidate if opened[k + 1] is None else max(opened[k + 1], candidate)
        best = after
        if opened[k + 1] is not None:
            best = max(best, (left[k] + opened[k + 1][0], opened[k + 1][1]))
        closed[k] = best

    # Forward walk; taking k as the next endpoint whenever it stays optimal
    # yields the lexicographically smallest endpoint list.
    intervals = []
    k, start = 0, None
    while k <= n:
        if start is None:
            nxt = opened[k + 1]
            if nxt is not None and (left[k] + nxt[0], nxt[1]) == closed[k]:
                start = k
        else:
            after = closed[k + 1]
            if (right[k] + after[0], after[1] + 1) == opened[k]:
                intervals.append((start, k))
                start = None
        k += 1
    value, size = closed[0]
    return CumSumResult(Fraction(value, scale), IntervalFamily(tuple(intervals)), size)


def all_families(n):
    """Every interval family on ``0..n``, most intervals first, then lexicographic."""
    for size in range(n // 2 + (n % 2), -1, -1):
        for pts in combinations(range(n + 1), 2 * size):
            yield IntervalFamily(tuple(zip(pts[::2], pts[1::2])))


def cumulative_sum_bruteforce(seq, gap, n):
    """Enumerate every family on ``0..n``; oracle for :func:`cumulative_sum`."""
    if n > BRUTEFORCE_LIMIT:
        raise TooLarge(f"exhaustive enumeration limited to n <= {BRUTEFORCE_LIMIT}, got {n}")
    if n < 0 or n > len(seq):
        raise IndexOutOfRange(f"horizon {n} outside 0..{len(seq)}")
    heights = partial_sums(seq)
    best = None
    for family in all_families(n):
        value = family_value(heights, gap, family)
        if best is None or value > best[0]:
            best = (value, family)
    return CumSumResult(best[0], best[1], len(best[1]))


def default_step_constant(bound, gap):
    """Boundary loss allowance ``A + |alpha| + 2|beta| + (beta - alpha)``."""
    return bound + abs(gap.alpha) + 2 * abs(gap.beta) + gap.width


@dataclass(frozen=True)
class PotentialStep:
    delta: Fraction
    s: int
    lower_bound: Fraction
    holds: bool


def potential_step(seq, gap, n, step_constant=None):
    """Change of the cumulative sum when the origin moves one step right.

    Compares ``a_1..a_n`` with ``a_2..a_{n+1}`` and checks that the increase is
    at least ``s * (beta - alpha) - C0``.
    """
    if n < 1 or n + 1 > len(seq):
        raise IndexOutOfRange(f"potential step needs n + 1 <= L, got n={n}, L={len(seq)}")
    c0 = default_step_constant(seq.bound, gap) if step_constant is None else Fraction(step_constant)
    before = cumulative_sum(seq, gap, n)
    after = cumulative_sum(seq.shifted(2), gap, n)
    delta = after.value - before.value
    lower = before.family_size * gap.width - c0
    return PotentialStep(delta, before.family_size, lower, delta >= lower)


@dataclass(frozen=True)
class ThreePoints:
    c_n: int
    s: int
    holds: bool


def upcrossings_vs_family_size(seq, gap, n, factor=3, offset=2):
    """Check ``C_n <= factor * s + offset`` for the canonical optimal family."""
    c_n = count_upcrossings(seq, gap, n).count
    s = cumulative_sum(seq, gap, n).family_size
    return ThreePoints(c_n, s, c_n <= factor * s + offset)


@dataclass(frozen=True)
class UpperBound:
    value: Fraction
    bound: Fraction
    holds: bool


def cumsum_upper_bound(seq, gap, n):
    _check_horizon(seq, n)
    value = cumulative_sum(seq, gap, n).value
    bound = (seq.bound + gap.magnitude) * n
    return UpperBound(value, bound, value <= bound)


def elevation_gain(seq, n):
    """Total rise of the path over its first ``n`` segments."""
    return sum((t for t in seq.terms[:n] if t > 0), Fraction(0))

