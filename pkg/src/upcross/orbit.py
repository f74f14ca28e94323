"""Finite-window observables along shift orbits and expected upcrossing counts.

An observable of window ``k`` looks at the first ``k`` bits of a sequence, so
the first ``n`` orbit values of ``omega`` are determined by its prefix of
length ``n + k - 1``.  Expectations under a measure are therefore finite sums
over cylinders of exactly that length.
"""
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, sqrt

import numpy as np

from .errors import ParseError, PrefixTooShort, TooLarge
from .measures import all_strings
from .oscillation import as_binary
from .rational import as_rational, format_rational
from .sequences import BoundedSequence, batch_upcrossings, running_averages

ENUMERATION_LIMIT = 20
MC_CHUNK = 8192


@dataclass(frozen=True)
class Observable:
    window: int
    table: dict = field(hash=False)

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("observable window must be positive")
        table = {str(w): as_rational(v) for w, v in self.table.items()}
        expected = set(all_strings(self.window))
        if set(table) != expected:
            missing = sorted(expected - set(table))[:3]
            extra = sorted(set(table) - expected)[:3]
            raise ValueError(f"table must cover {{0,1}}^{self.window}; missing {missing}, unexpected {extra}")
        object.__setattr__(self, "table", table)

    @property
    def bound(self):
        """``F = max |f|``."""
        return max(abs(v) for v in self.table.values())

    def __call__(self, word):
        return self.table[word[: self.window]]

    def integer_table(self):
        """``(values, scale)`` with ``values[int(w, 2)] = scale * f(w)``."""
        scale = lcm(*(v.denominator for v in self.table.values()))
        values = np.zeros(2**self.window, dtype=np.int64)
        for w, v in self.table.items():
            values[int(w, 2)] = v.numerator * (scale // v.denominator)
        return values, scale

    def to_spec(self):
        return {
            "window": self.window,
            "table": {w: format_rational(self.table[w]) for w in sorted(self.table)},
        }

    @classmethod
    def constant(cls, value, window=1):
        return cls(window, {w: value for w in all_strings(window)})

    @classmethod
    def first_bit(cls):
        return cls(1, {"0": 0, "1": 1})

    @classmethod
    def indicator(cls, word):
        """Characteristic function of the cylinder ``[word]``."""
        return cls(len(word), {w: int(w == word) for w in all_strings(len(word))})


def observable_from_spec(spec):
    try:
        return Observable(int(spec["window"]), dict(spec["table"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad observable spec: {exc}") from exc


def load_observable(path):
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    return observable_from_spec(spec)


@dataclass(frozen=True)
class OrbitAverages:
    values: tuple  # Birkhoff averages after 1..horizon steps
    horizon: int
    orbit: tuple  # f(omega), f(T omega), ...


def orbit_values(prefix, f, n):
    prefix = str(as_binary(prefix))
    if len(prefix) < n + f.window - 1:
        raise PrefixTooShort(
            f"{n} orbit values of a window-{f.window} observable need "
            f"{n + f.window - 1} bits, got {len(prefix)}"
        )
    return [f(prefix[i:i + f.window]) for i in range(n)]


def birkhoff_averages(prefix, f, n):
    orbit = orbit_values(prefix, f, n)
    averages = running_averages(BoundedSequence(orbit, f.bound))
    return OrbitAverages(tuple(averages), n, tuple(orbit))


def orbit_matrix(bits, f, n, offset=0):
    """Scaled orbit values ``f(T^(offset + i) w)``, i < n, for every row of ``bits``."""
    table, scale = f.integer_table()
    k = f.window
    index = np.zeros((bits.shape[0], n), dtype=np.int64)
    for j in range(k):
        index = (index << 1) | bits[:, offset + j:offset + j + n]
    return table[index], scale


ENUMERATION_CHUNK = 1 << 15


def _bits_block(length, start, stop):
    """Rows ``start..stop-1`` of the lexicographic table of all strings."""
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(length - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int64)


def _expected_at_offset(measure, f, gap, n, offset):
    length = n + offset + f.window - 1
    if length > ENUMERATION_LIMIT:
        raise TooLarge(f"exact enumeration needs 2^{length} cylinders; limit is 2^{ENUMERATION_LIMIT}")
    nums, den = measure.cylinder_weights(length)
    total = 0
    for start in range(0, 2**length, ENUMERATION_CHUNK):
        stop = min(start + ENUMERATION_CHUNK, 2**length)
        values, scale = orbit_matrix(_bits_block(length, start, stop), f, n, offset)
        counts = batch_upcrossings(values, gap, scale)
        for i in np.flatnonzero(counts):
            total += nums[start + i] * int(counts[i])
    return Fraction(total, den)


def exact_expected_upcrossings(measure, f, gap, n):
    """``E[C_n]`` as an exact sum over all cylinders of length ``n + k - 1``."""
    return _expected_at_offset(measure, f, gap, n, 0)


@dataclass(frozen=True)
class ShiftCheck:
    e0: Fraction
    ej: Fraction
    equal: bool


def shift_invariance_of_expectation(measure, f, gap, n, j):
    """Compare ``E[C_n(x)]`` with ``E[C_n(T^j x)]``; equal for stationary measures."""
    e0 = _expected_at_offset(measure, f, gap, n, 0)
    ej = _expected_at_offset(measure, f, gap, n, j)
    return ShiftCheck(e0, ej, e0 == ej)


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int


def sample_counts(measure, f, gap, n, trials, seed, workers=1):
    """Per-sample running counts ``C_1..C_n`` (trials x n).

    Samples are drawn in fixed-size chunks, each from its own child of
    ``SeedSequence(seed)``, so the result does not depend on ``workers``.
    """
    length = n + f.window - 1
    sizes = [min(MC_CHUNK, trials - start) for start in range(0, trials, MC_CHUNK)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(job):
        size, child = job
        bits = measure.sample(np.random.default_rng(child), length, size).astype(np.int64)
        values, scale = orbit_matrix(bits, f, n)
        return batch_upcrossings(values, gap, scale, horizons=True)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, zip(sizes, children)))
    return np.concatenate(parts) if parts else np.zeros((0, n), dtype=np.int64)


def summarize_counts(counts):
    """Mean and standard error, computed from exact integer moments."""
    trials = len(counts)
    total = int(np.sum(counts, dtype=object))
    squares = int(np.sum(np.asarray(counts, dtype=object) ** 2))
    mean = Fraction(total, trials)
    if trials < 2:
        return MonteCarloEstimate(float(mean), 0.0, trials)
    var = (squares - total * mean) / (trials - 1)
    return MonteCarloEstimate(float(mean), sqrt(var / trials), trials)


def monte_carlo_expected_upcrossings(measure, f, gap, n, trials, seed, workers=1):
    if trials < 1:
        raise ValueError("trials must be at least 1")
    counts = sample_counts(measure, f, gap, n, trials, seed, workers)
    return summarize_counts(counts[:, n - 1])
