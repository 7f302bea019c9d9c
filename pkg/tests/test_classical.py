import math
from fractions import Fraction

import numpy as np
import pytest

from brudno.classical import (
    block_entropy, counting_bound_check, gacs_block_complexity, gacs_rate, matching_member,
    mixture_bound_check, per_sequence_rate, reference_entropy_rate, typical_sets,
)
from brudno.errors import InvalidInputError, InvalidSequenceError, PositivityError
from brudno.semimeasure import KTEstimator, PointMass, SemiMeasure, WeightedFamily, default_family
from brudno.symbolic import (
    Bernoulli, DoublingMap, MarkovSource, OrbitSource, RotationMap, binary_entropy,
    block_distribution,
)

H_03 = binary_entropy(0.3)


@pytest.fixture(scope="module")
def mu():
    return SemiMeasure(default_family())


def test_block_entropy_closed_forms():
    assert block_entropy(Bernoulli.binary(0.3), 10) == pytest.approx(10 * H_03)
    m = MarkovSource([[0.9, 0.1], [0.2, 0.8]])
    assert block_entropy(m, 1) == pytest.approx(binary_entropy(1 / 3))
    assert block_entropy(m, 0) == 0.0
    assert reference_entropy_rate(m) == pytest.approx(0.55331, abs=5e-6)


class TestBlockComplexity:
    def test_exact_at_or_above_entropy(self, mu):
        src = Bernoulli.binary(0.3)
        for n in (1, 5, 12):
            g = gacs_block_complexity(src, mu, n)
            assert g.exact and g.stderr == 0.0
            assert g.value >= n * H_03

    def test_exact_equals_cross_entropy(self):
        fam = WeightedFamily([(KTEstimator(), 1.0)])
        g = gacs_block_complexity(Bernoulli.binary(0.5), SemiMeasure(fam), 2)
        # KT on length 2: 3/8, 1/8, 1/8, 3/8
        expected = -(0.5 * math.log2(3 / 8) + 0.5 * math.log2(1 / 8))
        assert g.value == pytest.approx(expected)

    def test_sampled(self, mu):
        g = gacs_block_complexity(Bernoulli.binary(0.3), mu, 64, samples=50, seed=3, exact_cap=2 ** 10)
        assert not g.exact
        assert g.samples == 50
        # overhead at n = 64 is about 7 bits of member weight plus 12 bits of length weight
        rep = mixture_bound_check(Bernoulli.binary(0.3), mu, 12)
        overhead = rep.log2_inv_weight + math.log2(64 * 36) + rep.log2_normalizer
        assert H_03 - 0.1 < g.rate < H_03 + overhead / 64 + 0.1
        again = gacs_block_complexity(Bernoulli.binary(0.3), mu, 64, samples=50, seed=3, exact_cap=2 ** 10)
        assert again.value == g.value

    def test_positivity(self):
        mu = SemiMeasure(WeightedFamily([(PointMass("00"), 0.5)]))
        with pytest.raises(PositivityError):
            gacs_block_complexity(Bernoulli.binary(0.3), mu, 2)

    def test_bad_n(self, mu):
        with pytest.raises(InvalidInputError):
            gacs_block_complexity(Bernoulli.binary(0.3), mu, 0)


class TestRates:
    def test_bernoulli_rate(self, mu):
        rep = gacs_rate(Bernoulli.binary(0.3), mu, [4, 8, 12, 256, 1024], samples=40, seed=1)
        assert [r.exact for r in rep.rows] == [True, True, True, False, False]
        assert rep.entropy_rate == pytest.approx(H_03)
        assert abs(rep.gap) < 0.03
        assert rep.monotone
        assert rep.rows[-1].H_n == pytest.approx(1024 * H_03)

    def test_requires_ergodic(self, mu):
        rot = OrbitSource(RotationMap(Fraction(1, 3)), x0=0, ergodic=False)
        with pytest.raises(InvalidInputError):
            gacs_rate(rot, mu, [4])
        with pytest.raises(InvalidInputError):
            gacs_rate(Bernoulli.binary(0.3), mu, [])

    def test_per_sequence(self, mu):
        x = Bernoulli.binary(0.3).sample(2048, seed=11)
        rows = per_sequence_rate(mu, x, [2048, 16, 256])
        assert [n for n, _ in rows] == [16, 256, 2048]
        assert rows[-1][1] == pytest.approx(H_03, abs=0.05)

    def test_per_sequence_grid(self, mu):
        with pytest.raises(InvalidSequenceError):
            per_sequence_rate(mu, "0101", [8])
        with pytest.raises(InvalidSequenceError):
            per_sequence_rate(mu, "0101", [0, 2])

    def test_constant_sequence_rate_vanishes(self, mu):
        rows = per_sequence_rate(mu, np.zeros(4096, dtype=np.int64), [4096])
        assert rows[0][1] < 0.02


class TestMixtureBound:
    @pytest.mark.parametrize("n", [1, 2, 6, 12])
    def test_bernoulli(self, mu, n):
        rep = mixture_bound_check(Bernoulli.binary(0.3), mu, n)
        assert rep.exact_member
        assert rep.passed and rep.slack >= 0
        decomposed = rep.H_n + rep.log2_inv_weight + rep.log2_inv_delta + rep.log2_normalizer
        assert rep.bound == pytest.approx(decomposed, abs=1e-9)

    def test_doubling_uses_fair_member(self, mu):
        src = OrbitSource(DoublingMap(), orbit_length=2 ** 14)
        found = matching_member(mu.family, src)
        assert found is not None
        assert found == matching_member(mu.family, Bernoulli.binary(0.5))
        rep = mixture_bound_check(src, mu, 8)
        assert rep.passed and not rep.exact_member

    def test_no_member(self):
        mu = SemiMeasure(WeightedFamily([(KTEstimator(), 0.5)]))
        with pytest.raises(InvalidInputError):
            mixture_bound_check(Bernoulli.binary(0.3), mu, 4)
        assert mixture_bound_check(Bernoulli.binary(0.3), mu, 4, member=0).passed


class TestTypicalSets:
    def test_partition_structure(self, mu):
        src = Bernoulli.binary(0.3)
        for n in (4, 8, 12):
            for eps in (0.05, 0.1):
                ts = typical_sets(block_distribution(src, n), H_03, eps, mu)
                A, Ah, At, B = (ts.masks[k] for k in ("A", "A_hat", "A_tilde", "B"))
                assert not (Ah & ~A).any()
                assert not (At & A).any()
                assert np.array_equal(Ah | At, ~B)
                assert ts.a_hat_bound_holds
                assert ts.counts["A"] <= ts.a_cardinality_bounds[1]
                assert sum(ts.masses[k] for k in ("A_hat", "A_tilde", "B")) == pytest.approx(1.0)

    def test_fair_coin_hand_case(self):
        fair = Bernoulli.binary(0.5)
        mu = SemiMeasure(WeightedFamily([(fair, 1.0)]))
        ts = typical_sets(block_distribution(fair, 6), 1.0, 0.1, mu)
        assert ts.counts["A"] == 64
        assert ts.counts["B"] == 64
        assert ts.alpha_n == -math.inf
        assert ts.typical_set("A_hat").members == frozenset()

    def test_heavy_words_counted(self):
        mu = SemiMeasure(WeightedFamily([(PointMass("0000"), 0.5), (PointMass("1111"), 0.5)]))
        ts = typical_sets(block_distribution(Bernoulli.binary(0.5), 4), 1.0, 0.1, mu,
                          threshold_exponent=0.5)
        assert ts.heavy_count == 2
        assert ts.alpha_n == pytest.approx(1.0 - 2.0)
        assert {str(w) for w in ts.typical_set("A_hat").members} == {"0000", "1111"}

    def test_bad_inputs(self, mu):
        d = block_distribution(Bernoulli.binary(0.3), 3)
        with pytest.raises(InvalidInputError):
            typical_sets(d, H_03, 0.0, mu)
        with pytest.raises(InvalidInputError):
            typical_sets(d, H_03, 0.1, mu).typical_set("C")


class TestCountingBound:
    def test_default_family(self, mu):
        for n in (1, 6, 12):
            for c in range(1, 13):
                rep = counting_bound_check(mu, c, n)
                assert rep.passed
                assert rep.tightness <= 1

    def test_tight_case(self):
        fair = Bernoulli.binary(0.5)
        rep = counting_bound_check(SemiMeasure(WeightedFamily([(fair, 1.0)])), 5, 5)
        assert rep.count == 32 and rep.tightness == 1.0
        assert counting_bound_check(SemiMeasure(WeightedFamily([(fair, 1.0)])), 4, 5).count == 0
