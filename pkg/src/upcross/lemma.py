"""Average upcrossing counts over sliding windows and their uniform bound.

For ``N >= n`` the mean of ``C_n(a^(1)), ..., C_n(a^(N))`` is bounded by
``c * (A + |alpha| + |beta|) / (beta - alpha)`` for an absolute constant ``c``.
The constant is a parameter here; :func:`estimate_constant` probes how large
it has to be in practice.
"""
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import PreconditionViolated, WindowTooShort
from .rational import as_rational
from .sequences import BoundedSequence, Gap, batch_upcrossings, count_upcrossings

DEFAULT_C = Fraction(12)

DEFAULT_GAPS = (
    Gap(Fraction(-1, 2), Fraction(1, 2)),
    Gap(0, 1),
    Gap(-1, Fraction(1, 3)),
    Gap(Fraction(1, 4), Fraction(3, 4)),
    Gap(-2, -1),
)


def lemma_bound(bound, gap, constant_c=DEFAULT_C):
    return as_rational(constant_c) * (as_rational(bound) + gap.magnitude) / gap.width


@dataclass(frozen=True)
class WindowReport:
    counts: tuple
    average: Fraction
    bound: Fraction
    constant_c: Fraction
    holds: bool
    applies: bool  # False when N < n: the bound is not claimed there


def window_average(seq, gap, n, N, constant_c=DEFAULT_C, strict=False):
    """Mean upcrossing count of the ``N`` length-``n`` windows starting at 1..N."""
    if n < 1 or N < 1:
        raise ValueError(f"n and N must be positive, got n={n}, N={N}")
    if len(seq) < N + n - 1:
        raise WindowTooShort(f"need at least N + n - 1 = {N + n - 1} terms, got {len(seq)}")
    if strict and N < n:
        raise PreconditionViolated(f"the bound needs N >= n, got N={N} < n={n}")
    constant_c = as_rational(constant_c)
    counts = tuple(count_upcrossings(seq.window(i, n), gap, n).count for i in range(1, N + 1))
    average = Fraction(sum(counts), N)
    bound = lemma_bound(seq.bound, gap, constant_c)
    return WindowReport(counts, average, bound, constant_c, average <= bound, N >= n)


def window_counts_batch(values, n, N, gap, scale=1):
    """``counts[row, i] = C_n`` of the window starting at column ``i`` (0-based)."""
    values = np.asarray(values)
    return np.stack(
        [batch_upcrossings(values[:, i:i + n], gap, scale) for i in range(N)], axis=1
    )


# --- sequence generators for the constant probe ------------------------------

def _constant(rng, length, bound, gap):
    return [bound] * length


def _uniform(rng, length, bound, gap):
    den = rng.choice((1, 2, 3, 4))
    top = int(bound * den)
    return [Fraction(rng.randint(-top, top), den) for _ in range(length)]


def _square(rng, length, bound, gap):
    period = rng.randint(1, max(1, length // 2))
    sign = rng.choice((1, -1))
    return [sign * bound * (1 if (i // period) % 2 == 0 else -1) for i in range(length)]


def _geometric(rng, length, bound, gap):
    # Blocks of +-A whose lengths grow geometrically, so the running average
    # from the window origin keeps swinging across the gap.
    ratio = rng.uniform(1.2, 3.0)
    block = rng.uniform(1, 3)
    sign = rng.choice((1, -1))
    out = []
    while len(out) < length:
        out.extend([sign * bound] * max(1, int(block)))
        sign = -sign
        block *= ratio
    return out[:length]


GENERATORS = {
    "constant": _constant,
    "uniform": _uniform,
    "square": _square,
    "geometric": _geometric,
}


@dataclass(frozen=True)
class ConstantEstimate:
    worst_ratio: Fraction
    witness: BoundedSequence


def estimate_constant(generator, gap, n, N, trials, seed=0, bound=1):
    """Largest ``average * (beta - alpha) / (A + |alpha| + |beta|)`` seen over
    ``trials`` generated sequences.  ``generator`` is a name from
    :data:`GENERATORS` or a callable ``(rng, length, bound, gap) -> terms``."""
    if N < n:
        raise PreconditionViolated(f"the bound needs N >= n, got N={N} < n={n}")
    gen = GENERATORS[generator] if isinstance(generator, str) else generator
    bound = as_rational(bound)
    rng = random.Random(seed)
    worst, witness = None, None
    for _ in range(trials):
        seq = BoundedSequence(gen(rng, N + n - 1, bound, gap), bound)
        report = window_average(seq, gap, n, N, constant_c=1)
        ratio = report.average * gap.width / (bound + gap.magnitude)
        if worst is None or ratio > worst:
            worst, witness = ratio, seq
    return ConstantEstimate(worst if worst is not None else Fraction(0), witness)


# --- campaigns -----------------------------------------------------------------

@dataclass(frozen=True)
class CampaignRow:
    seed: str
    n: int
    N: int
    gap: Gap
    A: Fraction
    average: Fraction
    bound: Fraction
    holds: bool
    witness: tuple  # terms achieving ``average``


def grid_windows(max_length):
    """All ``(n, N)`` with ``n <= N <= 2n`` whose windows fit in ``max_length`` terms."""
    return [
        (n, N)
        for n in range(1, max_length + 1)
        for N in range(n, 2 * n + 1)
        if N + n - 1 <= max_length
    ]


def _exhaustive_cell(args):
    n, N, gap, values, bound, constant_c = args
    grid = np.array(list(product(values, repeat=N + n - 1)), dtype=np.int64)
    totals = window_counts_batch(grid, n, N, gap).sum(axis=1)
    worst = int(np.argmax(totals))
    average = Fraction(int(totals[worst]), N)
    limit = lemma_bound(bound, gap, constant_c)
    witness = tuple(Fraction(int(v)) for v in grid[worst])
    return CampaignRow("exhaustive", n, N, gap, bound, average, limit, average <= limit, witness)


def exhaustive_campaign(values=range(-2, 3), max_length=8, gaps=DEFAULT_GAPS,
                        constant_c=DEFAULT_C, windows=None, workers=1):
    """Worst window average over every integer sequence with entries in
    ``values``, one row per ``(n, N, gap)``.  ``A`` is ``max |values|``."""
    values = tuple(int(v) for v in values)
    bound = Fraction(max(abs(v) for v in values))
    cells = [
        (n, N, gap, values, bound, as_rational(constant_c))
        for n, N in (windows or grid_windows(max_length))
        for gap in gaps
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_exhaustive_cell, cells)


def random_instance(instance_seed, n=None, N=None, max_n=8, magnitude=4):
    """Reproducible random ``(seq, gap, n, N)`` with entries in
    ``[-magnitude, magnitude]`` and ``n <= N <= 2n`` unless fixed by the caller."""
    rng = random.Random(instance_seed)
    if n is None:
        n = rng.randint(1, max_n)
    if N is None:
        N = rng.randint(n, 2 * n)
    den = rng.choice((1, 2, 3, 4))
    terms = [Fraction(rng.randint(-magnitude * den, magnitude * den), den)
             for _ in range(N + n - 1)]
    gden = rng.choice((1, 2, 3, 4))
    alpha = Fraction(rng.randint(-magnitude * gden, magnitude * gden), gden)
    beta = alpha + Fraction(rng.randint(1, 2 * gden), gden)
    return BoundedSequence.with_tight_bound(terms), Gap(alpha, beta), n, N


def instance_seeds(seed, trials):
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)]


def _random_cell(args):
    instance_seed, n, N, constant_c = args
    seq, gap, n, N = random_instance(instance_seed, n, N)
    report = window_average(seq, gap, n, N, constant_c)
    return CampaignRow(str(instance_seed), n, N, gap, seq.bound, report.average,
                       report.bound, report.holds, seq.terms)


def random_campaign(seed, trials, constant_c=DEFAULT_C, n=None, N=None, workers=1):
    cells = [(s, n, N, as_rational(constant_c)) for s in instance_seeds(seed, trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_random_cell, cells)
