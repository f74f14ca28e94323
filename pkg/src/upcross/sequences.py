"""Bounded rational sequences, running averages and upcrossing counts.

Everything here is exact.  Comparisons against the gap are done on integers
after scaling by a common denominator, which keeps the hot loops cheap while
preserving the strict inequalities.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm

import numpy as np

from .errors import (
    BadGap,
    BoundViolation,
    EmptySequence,
    IndexOutOfRange,
    ParseError,
    TooLarge,
)
from .rational import as_rational, parse_rational


@dataclass(frozen=True)
class BoundedSequence:
    """Finite prefix ``a_1..a_L`` together with a certified bound ``|a_i| <= A``."""

    terms: tuple
    bound: Fraction

    def __post_init__(self):
        terms = tuple(as_rational(t) for t in self.terms)
        bound = as_rational(self.bound)
        if bound < 0:
            raise BoundViolation(f"bound must be nonnegative, got {bound}")
        for i, t in enumerate(terms, 1):
            if abs(t) > bound:
                raise BoundViolation(f"|a_{i}| = {abs(t)} exceeds bound {bound}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bound", bound)

    @classmethod
    def with_tight_bound(cls, terms):
        terms = tuple(as_rational(t) for t in terms)
        return cls(terms, max((abs(t) for t in terms), default=Fraction(0)))

    def __len__(self):
        return len(self.terms)

    def shifted(self, i):
        """The tail ``a_i, a_{i+1}, ...`` (1-based), keeping the same bound."""
        if i < 1 or i > len(self.terms) + 1:
            raise IndexOutOfRange(f"shift {i} outside 1..{len(self.terms) + 1}")
        return BoundedSequence(self.terms[i - 1:], self.bound)

    def window(self, start, length):
        """``length`` terms starting at 1-based position ``start``."""
        if start < 1 or start - 1 + length > len(self.terms):
            raise IndexOutOfRange(
                f"window [{start}, {start + length - 1}] outside 1..{len(self.terms)}"
            )
        return BoundedSequence(self.terms[start - 1:start - 1 + length], self.bound)

    def scaled(self, factor):
        factor = as_rational(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return BoundedSequence(tuple(t * factor for t in self.terms), self.bound * factor)

    def translated(self, c):
        c = as_rational(c)
        return BoundedSequence(tuple(t + c for t in self.terms), self.bound + abs(c))


@dataclass(frozen=True)
class Gap:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        alpha, beta = as_rational(self.alpha), as_rational(self.beta)
        if not alpha < beta:
            raise BadGap(f"need alpha < beta, got ({alpha}, {beta})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def width(self):
        return self.beta - self.alpha

    @property
    def magnitude(self):
        """``|alpha| + |beta|``, the gap's contribution to every bound."""
        return abs(self.alpha) + abs(self.beta)

    def scaled(self, factor):
        factor = as_rational(factor)
        return Gap(self.alpha * factor, self.beta * factor)

    def translated(self, c):
        c = as_rational(c)
        return Gap(self.alpha + c, self.beta + c)


@dataclass(frozen=True)
class UpcrossingResult:
    count: int
    witnesses: tuple  # ((l_1, r_1), (l_2, r_2), ...), 1-based into the averages


def partial_sums(seq):
    """Heights ``h(0..L)`` of the polygonal path, ``h(0) = 0``."""
    out = [Fraction(0)]
    for t in seq.terms:
        out.append(out[-1] + t)
    return out


def running_averages(seq):
    if len(seq) == 0:
        raise EmptySequence("sequence is empty")
    h = partial_sums(seq)
    return [h[k] / k for k in range(1, len(h))]


def _check_horizon(seq, n):
    if n < 1:
        raise IndexOutOfRange(f"horizon must be positive, got {n}")
    if n > len(seq):
        raise IndexOutOfRange(f"horizon {n} exceeds sequence length {len(seq)}")


def integer_path(terms, gap):
    """Scale terms and gap to integers by their common denominator.

    Returns ``(heights, lo, hi, scale)`` where ``heights[k] = scale * h(k)``,
    ``lo = scale * alpha`` and ``hi = scale * beta``.  Then the k-th average is
    below alpha iff ``heights[k] < lo * k``, and likewise for beta.
    """
    scale = lcm(gap.alpha.denominator, gap.beta.denominator, *(t.denominator for t in terms))
    heights = [0]
    for t in terms:
        heights.append(heights[-1] + t.numerator * (scale // t.denominator))
    lo = gap.alpha.numerator * (scale // gap.alpha.denominator)
    hi = gap.beta.numerator * (scale // gap.beta.denominator)
    return heights, lo, hi, scale


def crossing_labels(seq, gap, n):
    """Per-average label: -1 below alpha, +1 above beta, 0 inside the closed gap."""
    _check_horizon(seq, n)
    heights, lo, hi, _ = integer_path(seq.terms[:n], gap)
    labels = []
    for k in range(1, n + 1):
        if heights[k] < lo * k:
            labels.append(-1)
        elif heights[k] > hi * k:
            labels.append(1)
        else:
            labels.append(0)
    return labels


def _greedy(labels, first, second):
    pairs = []
    start = None
    for k, lab in enumerate(labels, 1):
        if start is None:
            if lab == first:
                start = k
        elif lab == second:
            pairs.append((start, k))
            start = None
    return UpcrossingResult(len(pairs), tuple(pairs))


def count_upcrossings(seq, gap, n):
    """Maximal number of interleaved (below alpha, above beta) pairs among the
    first ``n`` averages, with the earliest witnesses."""
    return _greedy(crossing_labels(seq, gap, n), -1, 1)


def count_downcrossings(seq, gap, n):
    """As :func:`count_upcrossings` with the roles swapped: above beta first."""
    return _greedy(crossing_labels(seq, gap, n), 1, -1)


@lru_cache(maxsize=None)
def _max_pairs_exhaustive(labels):
    # Every increasing index tuple of even length is tried; labels repeat a lot
    # across sequences, hence the cache.
    n = len(labels)
    for size in range(n // 2, 0, -1):
        for idx in combinations(range(n), 2 * size):
            if all(labels[idx[2 * i]] == -1 and labels[idx[2 * i + 1]] == 1 for i in range(size)):
                return size
    return 0


def count_upcrossings_bruteforce(seq, gap, n):
    """Exhaustive search over all index subsequences; oracle for the greedy scan."""
    if n > 16:
        raise TooLarge(f"exhaustive upcrossing search limited to n <= 16, got {n}")
    _check_horizon(seq, n)
    # Labels come straight from the Fraction averages, not the scaled path.
    labels = tuple(
        -1 if avg < gap.alpha else 1 if avg > gap.beta else 0
        for avg in running_averages(seq)[:n]
    )
    return _max_pairs_exhaustive(labels)


def scan_columns(columns, rows, first=-1, horizons=False):
    """Vectorized greedy scan.

    ``columns`` yields ``(below, above)`` boolean arrays of length ``rows``, one
    pair per average.  Returns per-row upcrossing counts (downcrossings with
    ``first=+1``); with ``horizons=True``, a matrix of running counts, one
    column per average.
    """
    counts = np.zeros(rows, dtype=np.int64)
    history = []
    armed = np.zeros(rows, dtype=bool)
    for below, above in columns:
        opening, closing = (below, above) if first == -1 else (above, below)
        closed = armed & closing
        counts += closed
        armed = (armed & ~closed) | (~armed & opening)
        if horizons:
            history.append(counts.copy())
    if horizons:
        return np.stack(history, axis=1) if history else np.zeros((rows, 0), dtype=np.int64)
    return counts


def batch_upcrossings(values, gap, scale=1, horizons=False):
    """Upcrossing counts for many sequences at once.

    ``values`` is an integer matrix (one sequence per row, terms are
    ``values / scale``).  With ``horizons=True`` the result has one column per
    prefix length, giving ``C_1 .. C_n`` for every row.
    """
    vals = np.asarray(values)
    if vals.ndim != 2:
        raise ValueError("values must be a 2-D array")
    rows, n = vals.shape
    a_num, a_den = gap.alpha.numerator, gap.alpha.denominator
    b_num, b_den = gap.beta.numerator, gap.beta.denominator
    biggest = int(np.abs(vals).max(initial=0)) if vals.size else 0
    worst = max(biggest * n * max(a_den, b_den), max(abs(a_num), abs(b_num)) * scale * n)
    heights = np.cumsum(vals.astype(object if worst >= 2**62 else np.int64), axis=1)

    # average_k < alpha  <=>  heights_k * a_den < a_num * scale * k
    def columns():
        for k in range(1, n + 1):
            col = heights[:, k - 1]
            yield (np.asarray(col * a_den < a_num * scale * k, dtype=bool),
                   np.asarray(col * b_den > b_num * scale * k, dtype=bool))

    return scan_columns(columns(), rows, horizons=horizons)


def read_sequence(text):
    """Parse the sequence file format: one rational per line, ``#`` comments."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        terms.append(parse_rational(line, lineno))
    return terms


def load_sequence(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}") from exc
    return read_sequence(text)
