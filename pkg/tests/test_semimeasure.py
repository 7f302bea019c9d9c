import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brudno.errors import InvalidInputError, PositivityError
from brudno.semimeasure import (
    KTEstimator, LengthWeighted, LengthWeighting, MarkovKTEstimator, PointMass, SemiMeasure,
    WeightedFamily, complexity_surrogate, default_family, dominance_check, kt_probability,
    length_mass, markov_kt_probability,
)
from brudno.symbolic import Bernoulli, MarkovSource, all_words


def midpoint_tail_sum(cutoff=100_000):
    n = np.arange(2, cutoff, dtype=float)
    head = np.sum(1.0 / (n * np.log2(n) ** 2))
    # integral of ln(2)^2 / (x ln(x)^2) from cutoff - 1/2 to infinity
    return head + math.log(2) ** 2 / math.log(cutoff - 0.5)


class TestKT:
    def test_small_words(self):
        assert kt_probability("") == 1.0
        assert kt_probability("0") == pytest.approx(0.5)
        assert kt_probability("00") == pytest.approx(3 / 8)
        assert kt_probability("01") == pytest.approx(1 / 8)
        assert kt_probability("010") == pytest.approx(1 / 2 * 1 / 4 * 1 / 2)

    @pytest.mark.parametrize("n", [0, 1, 5, 12])
    def test_sums_to_one(self, n):
        assert length_mass(KTEstimator(), n) == pytest.approx(1.0, abs=1e-12)
        assert length_mass(KTEstimator(3), min(n, 7)) == pytest.approx(1.0, abs=1e-12)

    def test_block_matches_sequential(self):
        kt = KTEstimator()
        blocks = kt.block_log2_probabilities(7)
        for i, w in enumerate(all_words(7)):
            assert blocks[i] == pytest.approx(kt.log2_probability(w.astype(np.int64)), abs=1e-10)

    @given(st.lists(st.integers(0, 1), max_size=40))
    def test_exchangeable(self, bits):
        kt = KTEstimator()
        assert kt.log2_probability(bits) == pytest.approx(kt.log2_probability(sorted(bits)), abs=1e-9)


class TestMarkovKT:
    def test_small_words(self):
        assert markov_kt_probability("0") == pytest.approx(0.5)
        assert markov_kt_probability("001") == pytest.approx(1 / 2 * 1 / 2 * 1 / 4)
        assert markov_kt_probability("0101") == pytest.approx(1 / 2 * 1 / 2 * 1 / 2 * 3 / 4)

    @pytest.mark.parametrize("n", [1, 2, 9])
    def test_sums_to_one(self, n):
        assert length_mass(MarkovKTEstimator(), n) == pytest.approx(1.0, abs=1e-12)

    def test_block_matches_sequential(self):
        m = MarkovKTEstimator()
        blocks = m.block_log2_probabilities(6)
        for i, w in enumerate(all_words(6)):
            assert blocks[i] == pytest.approx(m.log2_probability(w.astype(np.int64)), abs=1e-10)

    def test_order_guard(self):
        with pytest.raises(InvalidInputError):
            MarkovKTEstimator(2, order=2)

    def test_tracks_markov_chain(self):
        src = MarkovSource([[0.9, 0.1], [0.2, 0.8]])
        x = src.sample(20_000, seed=4)
        lp = MarkovKTEstimator().prefix_log2_probabilities(x)
        assert -lp[-1] / len(x) == pytest.approx(src.entropy_rate(), abs=0.02)


class TestLengthWeighting:
    def test_normalizer_value(self):
        w = LengthWeighting()
        assert w.normalizer - 1.0 == pytest.approx(1.013632287, abs=5e-9)

    def test_normalizer_independent_oracle(self):
        w = LengthWeighting()
        assert w.normalizer - 1.0 == pytest.approx(midpoint_tail_sum(), abs=1e-10)

    def test_inverse_square(self):
        w = LengthWeighting("inverse-square")
        assert w.normalizer == pytest.approx(math.pi ** 2 / 6)
        assert w.delta(0) == 0.0
        assert w.delta(3) == pytest.approx(1 / 9)

    def test_delta_values(self):
        w = LengthWeighting()
        assert w.delta(0) == w.delta(1) == 0.5
        assert w.delta(4) == pytest.approx(1 / 16)
        assert 2 ** w.log2_weight(4) == pytest.approx((1 / 16) / w.normalizer)

    def test_weights_sum_below_one(self):
        w = LengthWeighting()
        total = float(np.sum(2.0 ** w.log2_weight(np.arange(0, 200_000))))
        assert total < 1.0
        # the tail beyond N carries about ln(2)^2 / ln(N) / normalizer
        assert total == pytest.approx(1.0 - math.log(2) ** 2 / math.log(200_000) / w.normalizer, abs=1e-4)

    def test_unknown(self):
        with pytest.raises(InvalidInputError):
            LengthWeighting("harmonic")


class TestFamily:
    def test_default_members(self):
        fam = default_family()
        assert len(fam) == 21
        assert fam.total_weight == pytest.approx(0.5)
        weights = [w for _, w in fam]
        assert weights[0] / weights[1] == pytest.approx(2.0)
        assert fam.find(lambda m: isinstance(m, KTEstimator))[0] == 20
        assert fam.find(lambda m: m == Bernoulli.binary(0.3))[0] == 5

    def test_rejects_bad_weights(self):
        with pytest.raises(InvalidInputError):
            WeightedFamily([(KTEstimator(), 0.7), (MarkovKTEstimator(), 0.5)])
        with pytest.raises(InvalidInputError):
            WeightedFamily([(KTEstimator(), 0.0)])
        with pytest.raises(InvalidInputError):
            WeightedFamily([(KTEstimator(2), 0.1), (KTEstimator(3), 0.1)])
        with pytest.raises(InvalidInputError):
            WeightedFamily([])

    def test_extended(self):
        fam = default_family().extended([(PointMass("0101"), 0.25)])
        assert len(fam) == 22
        assert fam.total_weight == pytest.approx(0.75)


class TestMixture:
    def test_mixture_is_weighted_sum(self):
        fam = WeightedFamily([(KTEstimator(), 0.25), (Bernoulli.binary(0.3), 0.5)])
        mu = SemiMeasure(fam)
        w = "0110"
        assert mu(w) == pytest.approx(0.25 * kt_probability(w) + 0.5 * 0.7 ** 2 * 0.3 ** 2)

    def test_prefix_and_block_agree(self):
        mu = SemiMeasure(default_family())
        x = Bernoulli.binary(0.3).sample(10, seed=2)
        lp = mu.prefix_log2_probabilities(x)
        blocks = mu.block_log2_probabilities(10)
        idx = int("".join(map(str, x)), 2)
        assert lp[-1] == pytest.approx(blocks[idx])

    def test_total_mass_below_weight(self):
        mu = SemiMeasure(default_family())
        mass = sum(length_mass(mu, n) for n in range(13))
        assert mass <= 0.5

    def test_complexity_surrogate(self):
        mu = SemiMeasure(WeightedFamily([(PointMass("01"), 0.5)]))
        assert complexity_surrogate(mu, "01") == pytest.approx(1.0)
        with pytest.raises(PositivityError):
            complexity_surrogate(mu, "11")

    def test_dominance(self):
        fam = default_family()
        mu = SemiMeasure(fam)
        for m, w in list(fam)[::5]:
            rep = dominance_check(mu, m, w, 8)
            assert rep.passed
            assert rep.worst_ratio >= w * (1 - 1e-9)

    def test_dominance_failure_has_witness(self):
        mu = SemiMeasure(WeightedFamily([(Bernoulli.binary(0.5), 0.1)]))
        rep = dominance_check(mu, PointMass("11"), 0.5, 3)
        assert not rep.passed
        assert str(rep.witness) == "11"

    def test_length_weighted_mass(self):
        lw = LengthWeighted(KTEstimator())
        assert length_mass(lw, 5) == pytest.approx(2 ** lw.weighting.log2_weight(5))
