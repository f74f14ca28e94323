"""Oscillations of the frequency of ones in binary strings.

The oscillation number of a string counts how many times the frequency of
ones in its prefixes drops strictly below ``lo`` and later rises strictly
above ``hi``.  Frequencies are running averages of the bits, so this is the
upcrossing count of the bit sequence for the gap ``(lo, hi)``.

Strings are stored run-length encoded: the strings that force many
oscillations in a single factor grow geometrically and cannot be spelled out.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import floor

import numpy as np

from .errors import BadThresholds, ParseError, TooLarge, WindowTooLong
from .rational import as_rational
from .sequences import scan_columns

MATERIALIZE_LIMIT = 10**8


@dataclass(frozen=True)
class BinaryString:
    runs: tuple  # ((bit, length), ...), adjacent runs carry different bits

    def __post_init__(self):
        merged = []
        for bit, length in self.runs:
            if bit not in (0, 1):
                raise ValueError(f"bits must be 0 or 1, got {bit!r}")
            if length < 0:
                raise ValueError("run lengths must be nonnegative")
            if length == 0:
                continue
            if merged and merged[-1][0] == bit:
                merged[-1] = (bit, merged[-1][1] + length)
            else:
                merged.append((bit, int(length)))
        object.__setattr__(self, "runs", tuple(merged))

    @classmethod
    def from_bits(cls, bits):
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        return cls(tuple((int(b), 1) for b in bits))

    def __len__(self):
        return sum(length for _, length in self.runs)

    def ones(self):
        return sum(length for bit, length in self.runs if bit)

    def __add__(self, other):
        return BinaryString(self.runs + as_binary(other).runs)

    def __mul__(self, times):
        return BinaryString(self.runs * times)

    def to_array(self):
        if len(self) > MATERIALIZE_LIMIT:
            raise TooLarge(f"string of length {len(self)} is too long to materialize")
        return np.repeat(
            np.array([b for b, _ in self.runs], dtype=np.uint8),
            np.array([length for _, length in self.runs], dtype=np.int64),
        )

    def __str__(self):
        return "".join(str(b) * length for b, length in self.runs)


def as_binary(x):
    return x if isinstance(x, BinaryString) else BinaryString.from_bits(x)


def _check_thresholds(lo, hi):
    lo, hi = as_rational(lo), as_rational(hi)
    if not (0 <= lo < hi <= 1):
        raise BadThresholds(f"need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}")
    return lo, hi


def _first_true(pred, start, stop, grows):
    """First j in [start, stop] with pred(j), for pred monotone in j.

    ``grows`` means pred is false-then-true; otherwise it is true-then-false
    and only ``start`` can be the answer.
    """
    if not grows:
        return start if pred(start) else None
    if not pred(stop):
        return None
    while start < stop:
        mid = (start + stop) // 2
        if pred(mid):
            stop = mid
        else:
            start = mid + 1
    return start


def oscillation_number(x, lo, hi):
    """Completed (below ``lo``, then above ``hi``) swings of the ones-frequency."""
    lo, hi = _check_thresholds(lo, hi)
    x = as_binary(x)
    if len(x) == 0:
        raise ValueError("oscillation number needs a nonempty string")
    ones, total = 0, 0
    armed = False
    count = 0
    for bit, length in x.runs:
        # Inside one run the frequency is monotone: falling on zeros, rising on ones.
        j = 1
        while j <= length:
            if armed:
                def pred(i):
                    return (ones + bit * i) * hi.denominator > hi.numerator * (total + i)
            else:
                def pred(i):
                    return (ones + bit * i) * lo.denominator < lo.numerator * (total + i)
            grows = (bit == 1) == armed
            hit = _first_true(pred, j, length, grows)
            if hit is None:
                break
            if armed:
                count += 1
            armed = not armed
            j = hit + 1
        ones += bit * length
        total += length
    return count


def adversarial_string(k, lo, hi):
    """A string whose own oscillation number is exactly ``k``.

    Alternates a run of zeros just long enough to push the frequency below
    ``lo`` with a run of ones just long enough to push it above ``hi``.  The
    length grows geometrically in ``k``.
    """
    lo, hi = _check_thresholds(lo, hi)
    if k < 1:
        raise ValueError("k must be at least 1")
    if lo == 0 or hi == 1:
        raise BadThresholds("frequencies cannot go strictly below 0 or above 1")
    runs = []
    ones, total = 0, 0
    for _ in range(k):
        # smallest z with ones / (total + z) < lo
        zeros = max(1, floor(ones / lo - total) + 1)
        runs.append((0, zeros))
        total += zeros
        # smallest x with (ones + x) / (total + x) > hi
        grow = max(1, floor((hi * total - ones) / (1 - hi)) + 1)
        runs.append((1, grow))
        ones += grow
        total += grow
    return BinaryString(tuple(runs))


@dataclass(frozen=True)
class OscillationReport:
    n: int
    factor_count: int
    oscillations: tuple
    average: Fraction
    threshold_lo: Fraction
    threshold_hi: Fraction


def _factor_counts(prefix, starts, n, lo, hi):
    base = prefix[starts]

    def columns():
        for k in range(1, n + 1):
            ones = prefix[starts + k] - base
            yield (ones * lo.denominator < lo.numerator * k,
                   ones * hi.denominator > hi.numerator * k)

    return scan_columns(columns(), len(starts))


def factor_oscillations(x, n, lo, hi, workers=1, chunk=1 << 14):
    """Oscillation number of every length-``n`` factor, as an int array."""
    lo, hi = _check_thresholds(lo, hi)
    x = as_binary(x)
    if n < 1:
        raise ValueError("factor length must be positive")
    if n > len(x):
        raise WindowTooLong(f"factor length {n} exceeds string length {len(x)}")
    bits = x.to_array()
    prefix = np.concatenate(([0], np.cumsum(bits, dtype=np.int64)))
    starts = np.arange(len(x) - n + 1, dtype=np.int64)
    pieces = [starts[i:i + chunk] for i in range(0, len(starts), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda s: _factor_counts(prefix, s, n, lo, hi), pieces))
    return np.concatenate(parts)


def factor_average_oscillation(x, n, lo, hi, workers=1):
    """Average oscillation number over all ``|x| - n + 1`` overlapping factors."""
    lo, hi = _check_thresholds(lo, hi)
    counts = factor_oscillations(x, n, lo, hi, workers=workers)
    return OscillationReport(
        n=n,
        factor_count=len(counts),
        oscillations=tuple(int(c) for c in counts),
        average=Fraction(int(counts.sum()), len(counts)),
        threshold_lo=lo,
        threshold_hi=hi,
    )


def read_binary_string(text):
    """ASCII ``0``/``1``; whitespace anywhere is ignored."""
    bits = []
    for lineno, line in enumerate(text.splitlines(), 1):
        for ch in line:
            if ch in "01":
                bits.append(int(ch))
            elif not ch.isspace():
                raise ParseError(f"unexpected character {ch!r} in binary string", lineno)
    return BinaryString.from_bits(bits)
