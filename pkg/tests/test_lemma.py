from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import running_counts
from upcross.errors import PreconditionViolated, WindowTooShort
from upcross.lemma import (
    DEFAULT_C,
    estimate_constant,
    exhaustive_campaign,
    grid_windows,
    instance_seeds,
    lemma_bound,
    random_campaign,
    random_instance,
    window_average,
    window_counts_batch,
)
from upcross.sequences import BoundedSequence, Gap


def seq(*terms):
    return BoundedSequence.with_tight_bound(terms)


def test_constant_sequence_never_crosses():
    report = window_average(seq(*[1] * 9), Gap(0, 2), 4, 6)
    assert report.counts == (0,) * 6
    assert report.average == 0 and report.holds and report.applies


def test_alternating_sequence_by_hand():
    # windows starting on -2 see averages -2, 2 (one crossing); those starting
    # on 6 see 6, 2 (none)
    report = window_average(seq(-2, 6, -2, 6, -2, 6, -2, 6), Gap(0, 1), 2, 4, constant_c=12)
    assert report.counts == (1, 0, 1, 0)
    assert report.average == F(1, 2)
    assert report.bound == 12 * (6 + 0 + 1) / 1 == 84
    assert report.holds


def test_counts_agree_with_definition():
    s = seq(-2, 6, -10, 18, -1, 3, 0, -4, 2)
    report = window_average(s, Gap(F(-1, 2), F(1, 2)), 4, 6)
    expected = tuple(running_counts(s.terms[i:i + 4], F(-1, 2), F(1, 2))[-1] for i in range(6))
    assert report.counts == expected


def test_window_must_fit():
    with pytest.raises(WindowTooShort):
        window_average(seq(1, 2, 3), Gap(0, 1), 2, 3)


def test_short_window_count_is_flagged_not_claimed():
    report = window_average(seq(1, 2, 3, 4), Gap(0, 1), 3, 2)
    assert not report.applies
    with pytest.raises(PreconditionViolated):
        window_average(seq(1, 2, 3, 4), Gap(0, 1), 3, 2, strict=True)


def test_zero_constant_is_beaten_by_any_crossing():
    report = window_average(seq(-2, 6), Gap(0, 1), 2, 1, constant_c=0)
    assert report.bound == 0 and not report.holds


def test_lemma_bound_formula():
    assert lemma_bound(1, Gap(F(2, 5), F(3, 5))) == 120
    assert lemma_bound(2, Gap(-1, F(1, 3)), constant_c=3) == 3 * (2 + 1 + F(1, 3)) / F(4, 3)
    assert DEFAULT_C == 12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=9, max_size=9), min_size=1, max_size=6),
       st.integers(1, 4))
def test_batch_counts_match_window_average(rows, n):
    gap = Gap(F(-1, 3), F(2, 3))
    N = 10 - n
    counts = window_counts_batch(np.array(rows), n, N, gap)
    for row, batch in zip(rows, counts):
        assert tuple(batch) == window_average(seq(*row), gap, n, N).counts


def test_estimate_constant_on_constant_sequences():
    est = estimate_constant("constant", Gap(0, F(1, 2)), 4, 8, trials=5)
    assert est.worst_ratio == 0


def test_estimate_constant_square_wave_is_positive():
    est = estimate_constant("square", Gap(F(-1, 2), F(1, 2)), 8, 8, trials=40, seed=3)
    assert 0 < est.worst_ratio < DEFAULT_C
    assert len(est.witness) == 15


def test_estimate_constant_accepts_a_callable():
    def spikes(rng, length, bound, gap):
        return [-bound if i % 2 == 0 else bound for i in range(length)]

    est = estimate_constant(spikes, Gap(F(-1, 2), F(1, 2)), 4, 4, trials=1, bound=2)
    assert est.witness.terms == (-2, 2, -2, 2, -2, 2, -2)
    expected = window_average(est.witness, Gap(F(-1, 2), F(1, 2)), 4, 4, constant_c=1)
    assert est.worst_ratio == expected.average * 1 / (2 + 1)


def test_estimate_constant_needs_long_enough_count():
    with pytest.raises(PreconditionViolated):
        estimate_constant("uniform", Gap(0, 1), 4, 3, trials=1)


def test_grid_windows():
    assert grid_windows(3) == [(1, 1), (1, 2), (2, 2)]
    assert all(n <= N <= 2 * n and N + n - 1 <= 8 for n, N in grid_windows(8))


def test_random_instances_are_reproducible_and_in_range():
    seeds = instance_seeds(11, 50)
    assert seeds == instance_seeds(11, 50)
    for s in seeds:
        first, second = random_instance(s), random_instance(s)
        assert first == second
        terms, gap, n, N = first
        assert n <= N <= 2 * n and len(terms) == N + n - 1
        assert all(abs(t) <= 4 for t in terms.terms)


def test_exhaustive_campaign_small():
    rows = list(exhaustive_campaign(values=range(-1, 2), max_length=4, gaps=[Gap(0, 1)]))
    assert [(r.n, r.N) for r in rows] == grid_windows(4)
    assert all(r.holds and r.A == 1 for r in rows)
    # no average can exceed 1 when every entry is at most 1
    assert all(r.average == 0 for r in rows)


def test_campaigns_ignore_worker_count():
    gaps = [Gap(F(-1, 2), F(1, 2))]
    one = list(exhaustive_campaign(max_length=5, gaps=gaps, workers=1))
    many = list(exhaustive_campaign(max_length=5, gaps=gaps, workers=4))
    assert one == many
    assert list(random_campaign(3, 200, workers=1)) == list(random_campaign(3, 200, workers=4))


def test_zero_constant_campaign_reports_violations():
    rows = list(exhaustive_campaign(max_length=3, gaps=[Gap(F(1, 4), F(3, 4))], constant_c=0))
    assert any(not r.holds for r in rows)
