import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from upcross.errors import BadParameter, BadWeights, NoUniqueStationary, ParseError, TooDeep
from upcross.measures import (
    FunctionMeasure,
    all_strings,
    bernoulli,
    check_axioms,
    load_measure,
    markov,
    measure_from_spec,
    mixture,
)

unit = st.fractions(min_value=0, max_value=1, max_denominator=12)


def test_all_strings_are_lexicographic():
    assert list(all_strings(2)) == ["00", "01", "10", "11"]
    assert list(all_strings(0)) == [""]


class TestBernoulli:
    def test_fair_coin(self):
        mu = bernoulli(F(1, 2))
        assert all(mu.prob(w) == F(1, 2**len(w)) for n in range(6) for w in all_strings(n))

    def test_product_formula(self):
        assert bernoulli(F(3, 10)).prob("01") == F(21, 100)

    def test_point_masses(self):
        assert bernoulli(0).prob("0000") == 1
        assert bernoulli(0).prob("0010") == 0
        assert bernoulli(1).prob("111") == 1

    @pytest.mark.parametrize("q", [F(-1, 2), F(3, 2)])
    def test_range(self, q):
        with pytest.raises(BadParameter):
            bernoulli(q)


class TestMarkov:
    def test_stationary_vector(self):
        mu = markov(F(1, 5), F(1, 2))
        assert mu.initial == (F(5, 7), F(2, 7))
        assert mu.prob("1") == F(2, 7)

    @given(unit)
    def test_equal_rows_reduce_to_bernoulli(self, q):
        mu, nu = markov(q, q), bernoulli(q)
        for n in range(9):
            for w in all_strings(n):
                assert mu.prob(w) == nu.prob(w)

    def test_symmetric_chain(self):
        mu = markov(F(1, 2), F(1, 2))
        assert mu.prob("0") == mu.prob("1") == F(1, 2)

    def test_absorbing_states_need_an_initial_vector(self):
        with pytest.raises(NoUniqueStationary):
            markov(0, 1)
        mu = markov(0, 1, initial=(F(1, 3), F(2, 3)))
        assert mu.prob("111") == F(2, 3)
        assert check_axioms(mu, 6).stationary_ok

    def test_bad_initial(self):
        with pytest.raises(BadParameter):
            markov(F(1, 2), F(1, 2), initial=(F(1, 2), F(1, 3)))


class TestMixture:
    def test_single_component(self):
        mu = bernoulli(F(3, 10))
        mix = mixture([1], [mu])
        assert all(mix.prob(w) == mu.prob(w) for n in range(6) for w in all_strings(n))

    def test_point_masses(self):
        mix = mixture([F(1, 2), F(1, 2)], [bernoulli(0), bernoulli(1)])
        assert mix.prob("00") == F(1, 2)
        assert mix.prob("01") == 0

    @pytest.mark.parametrize("weights, n", [([F(1, 2), F(1, 3)], 2), ([F(3, 2), F(-1, 2)], 2), ([1], 2), ([], 0)])
    def test_bad_weights(self, weights, n):
        with pytest.raises(BadWeights):
            mixture(weights, [bernoulli(F(1, 2))] * n)


class TestCylinderWeights:
    @given(unit, unit, st.integers(0, 7))
    def test_weights_match_prob(self, a, b, length):
        for mu in (bernoulli(a), mixture([F(1, 3), F(2, 3)], [bernoulli(a), bernoulli(b)])):
            nums, den = mu.cylinder_weights(length)
            assert [F(v, den) for v in nums] == [mu.prob(w) for w in all_strings(length)]
            assert sum(nums) == den

    @given(st.fractions(min_value=F(1, 12), max_value=1, max_denominator=12), unit, st.integers(0, 7))
    def test_markov_weights(self, p01, p11, length):
        mu = markov(p01, p11)
        nums, den = mu.cylinder_weights(length)
        assert [F(v, den) for v in nums] == [mu.prob(w) for w in all_strings(length)]


class TestAxioms:
    @pytest.mark.parametrize("mu", [bernoulli(F(3, 10)), markov(F(1, 5), F(1, 2)),
                                    mixture([F(1, 4), F(3, 4)], [bernoulli(F(1, 3)), markov(F(1, 2), F(1, 5))])])
    def test_built_ins_pass(self, mu):
        report = check_axioms(mu, 8)
        assert report.kolmogorov_ok and report.stationary_ok and report.worst_violation == 0

    def test_constant_one_breaks_consistency(self):
        report = check_axioms(FunctionMeasure(lambda w: 1, "one"), 3)
        assert not report.kolmogorov_ok
        assert report.worst_violation == 1

    def test_off_stationary_chain_fails_shift_invariance(self):
        report = check_axioms(markov(F(1, 5), F(1, 2), initial=(1, 0)), 6)
        assert report.kolmogorov_ok and not report.stationary_ok

    def test_depth_limit(self):
        with pytest.raises(TooDeep):
            check_axioms(bernoulli(F(1, 2)), 17)


class TestSampling:
    @pytest.mark.parametrize("mu", [bernoulli(F(3, 10)), markov(F(1, 5), F(1, 2)),
                                    mixture([F(1, 2), F(1, 2)], [bernoulli(F(1, 10)), bernoulli(F(4, 5))])])
    @pytest.mark.statistical
    def test_cylinder_frequencies(self, mu):
        # 10^5 samples; every cylinder of length <= 4 within 4 binomial sd
        trials = 100_000
        samples = mu.sample(np.random.default_rng(17), 4, trials)
        for length in range(1, 5):
            codes = samples[:, :length] @ (1 << np.arange(length - 1, -1, -1))
            observed = np.bincount(codes, minlength=2**length)
            for i, w in enumerate(all_strings(length)):
                p = float(mu.prob(w))
                sd = (trials * p * (1 - p)) ** 0.5
                assert abs(observed[i] - trials * p) <= 4 * sd

    def test_seeded(self):
        mu = markov(F(1, 5), F(1, 2))
        a = mu.sample(np.random.default_rng(3), 20, 10)
        b = mu.sample(np.random.default_rng(3), 20, 10)
        assert (a == b).all()


class TestSpecs:
    @pytest.mark.parametrize("mu", [bernoulli(F(3, 10)), markov(F(1, 5), F(1, 2)),
                                    markov(F(1, 5), F(1, 2), initial=(1, 0)),
                                    mixture([F(1, 2), F(1, 2)], [bernoulli(0), markov(F(1, 3), F(2, 3))])])
    def test_round_trip(self, mu, tmp_path):
        path = tmp_path / "mu.json"
        path.write_text(json.dumps(mu.to_spec()))
        again = load_measure(path)
        assert all(again.prob(w) == mu.prob(w) for n in range(5) for w in all_strings(n))

    def test_unknown_kind(self):
        with pytest.raises(ParseError):
            measure_from_spec({"kind": "poisson"})

    def test_missing_field(self):
        with pytest.raises(ParseError):
            measure_from_spec({"kind": "bernoulli"})

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n"kind": \n')
        with pytest.raises(ParseError, match="line"):
            load_measure(path)
