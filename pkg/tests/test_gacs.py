import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brudno.errors import InvalidFamilyError, InvalidInputError, InvalidSequenceError
from brudno.gacs import (
    QuasiIncreasingSequence, SemiDensityMatrix, compress, embed, eta_sequence, gacs_complexities,
    gacs_lower, gacs_upper, limit_of_quasi_increasing, member_bound, quasi_greater,
    spectral_transport_unitary, tracial_state, transported_trace_compare, universal_mixture,
)
from brudno.spinchain import IIDProduct, local_density

DIAG = [[0.9, 0], [0, 0.1]]
MU_DIAG = np.diag([1 / 2, 1 / 4, 1 / 8, 1 / 16])


def random_density(d, rng, rank=None):
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = a @ a.conj().T
    return m / np.trace(m).real


class TestSemiDensity:
    def test_from_rationals(self):
        t = SemiDensityMatrix.from_rationals([["3/10", ("1/10", "1/10")], [("1/10", "-1/10"), "1/5"]])
        assert t.elementary
        assert t.trace == pytest.approx(0.5)
        assert t.n == 1

    def test_rejects(self):
        with pytest.raises(InvalidInputError):
            SemiDensityMatrix(np.eye(2))
        with pytest.raises(InvalidInputError):
            SemiDensityMatrix(np.diag([0.5, -0.1]))
        with pytest.raises(InvalidInputError):
            SemiDensityMatrix(np.array([[0.2, 0.1], [0.0, 0.2]]))
        with pytest.raises(InvalidInputError):
            SemiDensityMatrix(np.eye(3) / 4)


class TestQuasiOrder:
    def test_worked_example(self):
        t1 = np.diag([0.3, 0.0])
        t2 = np.zeros((4, 4))
        t2[0, 0], t2[3, 3] = 0.4, 0.1
        assert quasi_greater(t1, t2)
        assert compress(t2, 1).real.tolist() == [[0.4, 0.0], [0.0, 0.0]]

    def test_swapped_equal_size_false(self):
        a, b = np.diag([0.3, 0.0]), np.diag([0.4, 0.0])
        assert quasi_greater(a, b) and not quasi_greater(b, a)

    def test_reflexive(self):
        t = random_density(4, np.random.default_rng(0)) / 2
        assert quasi_greater(t, t)

    def test_size_order(self):
        with pytest.raises(InvalidInputError):
            quasi_greater(np.eye(4) / 4, np.eye(2) / 2)

    def test_embed_compress_inverse(self):
        t = random_density(4, np.random.default_rng(1))
        big = embed(t, 4)
        assert big.shape == (16, 16)
        assert np.allclose(compress(big, 2), t)
        assert np.trace(big).real == pytest.approx(1.0)

    @given(st.integers(0, 10_000))
    def test_transitive_on_chains(self, seed):
        rng = np.random.default_rng(seed)
        t1 = random_density(2, rng) * 0.2
        t2 = embed(t1, 2) + random_density(4, rng) * 0.2
        t3 = embed(t2, 3) + random_density(8, rng) * 0.2
        assert quasi_greater(t1, t2) and quasi_greater(t2, t3)
        assert quasi_greater(t1, t3)


class TestLimits:
    def test_constant(self):
        t = np.diag([0.25, 0.25])
        lim = limit_of_quasi_increasing([t, t, t])
        assert lim.gaps == [0.0, 0.0]
        assert np.allclose(lim.limit.matrix, t)

    def test_geometric(self):
        rho = np.array([[0.6, 0.2], [0.2, 0.4]])
        seq = [(1 - 2.0 ** -m) * rho for m in range(1, 8)]
        lim = limit_of_quasi_increasing(seq)
        assert lim.gaps == pytest.approx([2.0 ** -m for m in range(2, 8)])
        assert lim.traces[-1] == pytest.approx(1 - 2 ** -7)
        assert lim.trace_monotone

    def test_violation(self):
        with pytest.raises(InvalidSequenceError):
            QuasiIncreasingSequence([np.diag([0.4, 0.0]), np.diag([0.3, 0.1])])
        with pytest.raises(InvalidSequenceError):
            QuasiIncreasingSequence([np.eye(4) / 8, np.eye(2) / 4])
        with pytest.raises(InvalidSequenceError):
            QuasiIncreasingSequence([])

    def test_eta_sequence(self):
        seq = eta_sequence(IIDProduct(DIAG), 8)
        lim = limit_of_quasi_increasing(seq)
        assert lim.trace_monotone
        assert lim.traces[-1] < 1
        assert all(b <= a for a, b in zip(lim.gaps[1:], lim.gaps[2:]))


class TestUniversal:
    def test_single_member(self):
        mu = universal_mixture([(IIDProduct(DIAG), 1.0)], 3)
        assert np.allclose(mu.matrix, IIDProduct(DIAG).marginal(3))

    def test_two_members_n1(self):
        mu = universal_mixture([(IIDProduct(DIAG), 0.5), (tracial_state(), 0.5)], 1)
        assert np.allclose(mu.matrix, np.diag([0.7, 0.3]))
        assert mu.dominance is not None and min(mu.dominance) >= -1e-12

    def test_dominance_skipped_above_10(self):
        mu = universal_mixture([(IIDProduct(DIAG), 0.5), (tracial_state(), 0.25)], 11)
        assert mu.dominance is None

    def test_rank_deficient(self):
        pure = IIDProduct([[1, 0], [0, 0]])
        with pytest.raises(InvalidFamilyError):
            universal_mixture([(pure, 0.5)], 2)

    def test_family_checks(self):
        with pytest.raises(InvalidFamilyError):
            universal_mixture([], 2)
        with pytest.raises(InvalidFamilyError):
            universal_mixture([(tracial_state(), 0.7), (IIDProduct(DIAG), 0.6)], 2)

    def test_member_bound(self):
        fam = [(IIDProduct(DIAG), 0.5), (tracial_state(), 0.25),
               (IIDProduct([[0.6, 0.3j], [-0.3j, 0.4]]), 0.125)]
        for n in (1, 4, 7):
            mu = universal_mixture(fam, n)
            for k in range(3):
                upper, bound = member_bound(mu, k)
                assert upper <= bound + 1e-9


class TestComplexities:
    def test_worked_example(self):
        rho = np.eye(4) / 4
        assert gacs_upper(rho, MU_DIAG) == pytest.approx(2.5, abs=1e-12)
        assert gacs_lower(rho, MU_DIAG) == pytest.approx(-math.log2(15 / 64), abs=1e-12)
        assert gacs_lower(rho, MU_DIAG) == pytest.approx(2.0931094, abs=1e-7)

    def test_eigenstate(self):
        rho = np.diag([1.0, 0, 0, 0])
        c = gacs_complexities(rho, MU_DIAG)
        assert c.upper == pytest.approx(1.0) and c.lower == pytest.approx(1.0)

    def test_scaling_adds_one_bit(self):
        rho = random_density(4, np.random.default_rng(2))
        a, b = gacs_complexities(rho, MU_DIAG), gacs_complexities(rho, MU_DIAG / 2)
        assert b.upper - a.upper == pytest.approx(1.0)
        assert b.lower - a.lower == pytest.approx(1.0)

    def test_singular(self):
        with pytest.raises(InvalidFamilyError):
            gacs_upper(np.eye(2) / 2, np.diag([1.0, 0.0]))
        with pytest.raises(InvalidFamilyError):
            gacs_lower(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))

    @pytest.mark.parametrize("d", [2, 5, 16])
    def test_ordered_random(self, d):
        rng = np.random.default_rng(d)
        for _ in range(20):
            rho = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
            mu = random_density(d, rng) * rng.uniform(0.1, 1.0)
            assert gacs_complexities(rho, mu).ordered

    def test_local_density_inputs(self):
        st = IIDProduct(DIAG)
        mu = universal_mixture([(st, 0.5), (tracial_state(), 0.25)], 4)
        rho = local_density(st, 4)
        assert gacs_upper(rho, mu) >= gacs_lower(rho, mu)


class TestTransport:
    def test_diagonal_permutation(self):
        rho = np.diag([0.1, 0.6, 0.3])
        mu = np.diag([0.5, 0.2, 0.1])
        u = spectral_transport_unitary(rho, mu)
        assert np.allclose(u @ np.array([1, 0, 0]), [0, 1, 0])
        assert set(np.abs(u).ravel().tolist()) <= {0.0, 1.0}

    def test_random_unitary(self):
        rng = np.random.default_rng(5)
        rho, mu = random_density(6, rng), random_density(6, rng) / 2
        u = spectral_transport_unitary(rho, mu)
        assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-10

    def test_rank_deficient(self):
        with pytest.raises(InvalidInputError):
            spectral_transport_unitary(np.diag([1.0, 0.0]), np.eye(2) / 2)

    def test_identity_zero_gap(self):
        st = IIDProduct(DIAG)
        fam = [(st, 0.5), (tracial_state(), 0.25)]
        rep = transported_trace_compare(lambda n: st.marginal(n),
                                        lambda n: universal_mixture(fam, n), None, [2, 3, 4])
        assert rep.gaps == [0.0, 0.0, 0.0]

    def test_transport_gap_trend(self):
        st = IIDProduct([[0.7, 0.2], [0.2, 0.3]])
        fam = [(st, 0.5), (tracial_state(), 0.25)]
        mus = {n: universal_mixture(fam, n) for n in range(4, 9)}
        us = {n: spectral_transport_unitary(local_density(st, n), mus[n]) for n in mus}
        rep = transported_trace_compare(lambda n: st.marginal(n), mus, us, list(mus))
        assert all(np.isfinite(rep.gaps))
        assert rep.gaps[-1] <= rep.gaps[0] + 1e-12
