from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brudno.errors import InvalidInputError, ResourceLimitError
from brudno.symbolic import (
    Bernoulli, DoublingMap, IntervalPartition, MarkovSource, OrbitSource, RotationMap, all_words,
    binary_entropy, block_distribution, encode_orbit, is_primitive, ks_entropy_rate, random_point,
    sample_path, shannon_entropy, stationary_distribution,
)

H_03 = 0.8812908992306927
MARKOV = [[0.9, 0.1], [0.2, 0.8]]


def test_all_words_lex_order():
    w = all_words(3)
    assert w.shape == (8, 3)
    assert w[0].tolist() == [0, 0, 0]
    assert w[5].tolist() == [1, 0, 1]
    assert all_words(2, 3)[7].tolist() == [2, 1]


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError):
        block_distribution(Bernoulli.binary(0.3), 21)
    with pytest.raises(ResourceLimitError):
        block_distribution(Bernoulli.binary(0.3), 8, cap=100)


class TestBernoulli:
    def test_entropy_closed_form(self):
        assert Bernoulli.binary(0.3).entropy_rate() == pytest.approx(H_03, abs=1e-12)
        assert binary_entropy(0.5) == 1.0

    def test_block_probabilities(self):
        d = block_distribution(Bernoulli.binary(0.3), 3)
        assert d["101"] == pytest.approx(0.3 * 0.7 * 0.3)
        assert d.probabilities.sum() == pytest.approx(1.0)
        assert not d.empirical

    def test_block_entropy_additive(self):
        src = Bernoulli.binary(0.3)
        for n in (1, 4, 9):
            assert shannon_entropy(block_distribution(src, n)) == pytest.approx(n * H_03, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            Bernoulli([0.5, 0.6])
        with pytest.raises(InvalidInputError):
            Bernoulli([1.0])

    def test_sample_frequency(self):
        x = Bernoulli.binary(0.3).sample(200_000, seed=1)
        assert x.mean() == pytest.approx(0.3, abs=0.005)

    def test_sample_reproducible(self):
        src = Bernoulli.binary(0.3)
        assert np.array_equal(src.sample(100, seed=5), src.sample(100, seed=5))
        assert sample_path(src, 10, seed=5).symbols == tuple(src.sample(10, seed=5))


class TestMarkov:
    def test_stationary(self):
        assert stationary_distribution(np.array(MARKOV)) == pytest.approx([2 / 3, 1 / 3])

    def test_entropy_rate(self):
        src = MarkovSource(MARKOV)
        expected = 2 / 3 * binary_entropy(0.1) + 1 / 3 * binary_entropy(0.2)
        assert src.entropy_rate() == pytest.approx(expected, abs=1e-12)
        assert src.entropy_rate() == pytest.approx(0.55331, abs=5e-6)

    def test_block_entropy(self):
        src = MarkovSource(MARKOV)
        h_pi = binary_entropy(1 / 3)
        for n in (1, 2, 7):
            got = shannon_entropy(block_distribution(src, n))
            assert got == pytest.approx(h_pi + (n - 1) * src.entropy_rate(), rel=1e-12)

    def test_consistent_marginals(self):
        d = block_distribution(MarkovSource(MARKOV), 6)
        d5 = block_distribution(MarkovSource(MARKOV), 5)
        assert np.allclose(d.drop_last().probabilities, d5.probabilities, atol=1e-15)
        assert np.allclose(d.drop_first().probabilities, d5.probabilities, atol=1e-15)

    def test_primitive(self):
        assert is_primitive(np.array(MARKOV))
        assert not is_primitive(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert not MarkovSource([[0.0, 1.0], [1.0, 0.0]]).ergodic

    def test_prefix_matches_block(self):
        src = MarkovSource(MARKOV)
        x = src.sample(6, seed=3)
        lp = src.prefix_log2_probabilities(x)
        d = block_distribution(src, 6)
        assert 2 ** lp[-1] == pytest.approx(d[tuple(x)])

    def test_bad_transition(self):
        with pytest.raises(InvalidInputError):
            MarkovSource([[0.5, 0.4], [0.2, 0.8]])
        with pytest.raises(InvalidInputError):
            MarkovSource(MARKOV, initial=[0.5, 0.5])


class TestOrbits:
    def test_doubling_of_one_third(self):
        w = encode_orbit(DoublingMap(), IntervalPartition(), Fraction(1, 3), 6)
        assert str(w) == "010101"

    def test_doubling_reads_binary_digits(self):
        x = random_point(40, seed=9)
        w = encode_orbit(DoublingMap(), IntervalPartition(), x, 40)
        assert int(str(w), 2) == x * 2 ** 40

    def test_rotation_zero_entropy(self):
        src = OrbitSource(RotationMap(Fraction(3, 7)), x0=Fraction(0), orbit_length=4096, ergodic=True)
        assert src.entropy_rate() == 0.0
        rep = ks_entropy_rate(src, 8)
        # a rational rotation has period 7: at most 7 distinct words per length
        assert rep.block_entropies[8] <= np.log2(7) + 1e-12

    def test_doubling_empirical_blocks(self):
        src = OrbitSource(DoublingMap(), orbit_length=2 ** 14)
        d = block_distribution(src, 3)
        assert d.empirical
        assert np.abs(d.probabilities - 1 / 8).max() < 0.02
        assert src.entropy_rate() == 1.0

    def test_partition_checks(self):
        with pytest.raises(InvalidInputError):
            IntervalPartition((0, Fraction(1, 2)))
        with pytest.raises(InvalidInputError):
            IntervalPartition((0, Fraction(1, 2), Fraction(1, 3), 1))
        with pytest.raises(InvalidInputError):
            encode_orbit(DoublingMap(), IntervalPartition(), Fraction(3, 2), 3)

    @given(st.integers(1, 2 ** 20 - 1))
    def test_dyadic_point_dies_out(self, m):
        w = encode_orbit(DoublingMap(), IntervalPartition(), Fraction(m, 2 ** 20), 30)
        assert set(w.symbols[20:]) == {0}


def test_ks_rate_report():
    rep = ks_entropy_rate(Bernoulli.binary(0.3), 5)
    assert rep.closed_form == pytest.approx(H_03)
    assert rep.rate_estimate == pytest.approx(H_03)
    assert len(rep.per_n) == 5
