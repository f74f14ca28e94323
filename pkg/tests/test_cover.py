from fractions import Fraction as F

import pytest

from oracles import running_counts
from upcross.cover import (
    CylinderCover,
    cover_bound,
    cover_measure,
    covered_by,
    enumerate_bad_cylinders,
    format_cover,
    is_prefix_free,
    parse_cover,
    verify_uniform_bound,
)
from upcross.errors import ParseError, TooDeep
from upcross.measures import all_strings, bernoulli, markov
from upcross.orbit import Observable
from upcross.sequences import Gap

GAP = Gap(F(2, 5), F(3, 5))
FIRST = Observable.first_bit()


def crossings(word, f, gap):
    orbit = [f(word[i:i + f.window]) for i in range(len(word) - f.window + 1)]
    return running_counts(orbit, gap.alpha, gap.beta)[-1] if orbit else 0


def single(strings):
    return CylinderCover(tuple(strings), 1, GAP, FIRST, 4)


def test_small_cover_example():
    cover = enumerate_bad_cylinders(FIRST, GAP, 1, 4)
    assert "011" in cover.strings
    assert "01" not in cover.strings


def test_constant_observable_has_empty_cover():
    for m in (1, 3):
        assert enumerate_bad_cylinders(Observable.constant(0), Gap(-1, 1), m, 10).strings == ()


@pytest.mark.parametrize("f, gap, m, depth", [
    (FIRST, GAP, 1, 10),
    (FIRST, GAP, 2, 12),
    (Observable.indicator("10"), Gap(F(1, 5), F(2, 5)), 1, 10),
    (Observable(2, {"00": -1, "01": 1, "10": 0, "11": 2}), Gap(0, F(1, 2)), 2, 11),
])
def test_cover_is_exactly_the_minimal_witnesses(f, gap, m, depth):
    cover = enumerate_bad_cylinders(f, gap, m, depth)
    assert is_prefix_free(cover.strings)
    assert list(cover.strings) == sorted(cover.strings)
    for word in cover.strings:
        assert crossings(word, f, gap) >= m
        assert crossings(word[:-1], f, gap) < m
    # completeness: every full-depth string with m crossings lies in the cover
    bad = [w for w in all_strings(depth) if crossings(w, f, gap) >= m]
    assert covered_by(bad, cover.strings)
    assert len(bad) == sum(2 ** (depth - len(w)) for w in cover.strings)


def test_worker_count_does_not_matter():
    one = enumerate_bad_cylinders(FIRST, GAP, 2, 14, workers=1)
    many = enumerate_bad_cylinders(FIRST, GAP, 2, 14, workers=8)
    assert format_cover(one) == format_cover(many)


def test_shallow_depth_below_split():
    assert enumerate_bad_cylinders(FIRST, GAP, 1, 2).strings == ()
    assert enumerate_bad_cylinders(FIRST, GAP, 1, 3).strings == ("011",)


def test_depth_limit():
    with pytest.raises(TooDeep):
        enumerate_bad_cylinders(FIRST, GAP, 1, 25)
    with pytest.raises(ValueError):
        enumerate_bad_cylinders(FIRST, GAP, 0, 4)


class TestMeasure:
    def test_empty(self):
        assert cover_measure(single([]), bernoulli(F(1, 2))) == 0

    def test_one_cylinder(self):
        assert cover_measure(single(["011"]), bernoulli(F(1, 2))) == F(1, 8)
        assert cover_measure(single(["011"]), bernoulli(F(3, 10))) == F(63, 1000)

    def test_horizon_truncation(self):
        cover = single(["011", "00111"])
        assert cover_measure(cover, bernoulli(F(1, 2)), horizon=3) == F(1, 8)
        assert cover_measure(cover, bernoulli(F(1, 2)), horizon=5) == F(1, 8) + F(1, 32)

    def test_bound(self):
        assert cover_bound(FIRST, GAP, 4) == 30

    def test_uniform_bound_for_constant_observable(self):
        report = verify_uniform_bound(Observable.constant(1), GAP, 1, 8,
                                      [bernoulli(F(1, 2)), markov(F(1, 5), F(1, 2))])
        assert report.per_measure == (0, 0) and report.holds

    def test_measures_shrink_as_m_grows(self):
        mus = [bernoulli(F(1, 2)), bernoulli(F(3, 10)), markov(F(1, 5), F(1, 2))]
        reports = [verify_uniform_bound(FIRST, GAP, m, 14, mus) for m in (1, 2, 4)]
        assert all(r.holds for r in reports)
        for a, b in zip(reports, reports[1:]):
            assert all(x >= y for x, y in zip(a.per_measure, b.per_measure))


class TestFile:
    def test_round_trip(self):
        cover = enumerate_bad_cylinders(Observable.indicator("01"), Gap(F(1, 5), F(2, 5)), 1, 9)
        text = format_cover(cover)
        assert text.startswith("# m=1 alpha=1/5 beta=2/5 window=2 depth=9\n")
        assert parse_cover(text) == cover

    def test_rejects_non_binary_lines(self):
        text = format_cover(single(["011"])) + "012\n"
        with pytest.raises(ParseError, match="line 4"):
            parse_cover(text)

    def test_requires_header(self):
        with pytest.raises(ParseError):
            parse_cover("011\n")


def test_prefix_helpers():
    assert is_prefix_free(["011", "010", "1"])
    assert not is_prefix_free(["01", "011"])
    assert covered_by(["0110", "011"], ["011"])
    assert not covered_by(["01"], ["011"])
