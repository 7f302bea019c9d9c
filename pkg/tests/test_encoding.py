import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brudno.encoding import (
    AlgebraicNumberSpec, ExponentVector, SymbolString, decode_algebraic, decode_elementary_vector,
    encode_algebraic, encode_elementary_vector, evaluate_elementary_vector, index_to_string,
    int_to_nat, is_int_code, nat_to_int, nth_primes, pair, string_to_index, unpair,
)
from brudno.errors import InvalidInputError


class TestTau:
    def test_first_ranks(self):
        words = ["", "0", "1", "00", "01", "10", "11", "000"]
        assert [string_to_index(w) for w in words] == list(range(8))

    def test_exhaustive_to_length_10(self):
        expected = 0
        for length in range(11):
            for bits in itertools.product((0, 1), repeat=length):
                assert string_to_index(bits) == expected
                assert index_to_string(expected).symbols == bits
                expected += 1

    def test_rejects_non_binary(self):
        with pytest.raises(InvalidInputError):
            string_to_index(SymbolString((0, 2), 3))
        with pytest.raises(InvalidInputError):
            index_to_string(-1)

    @given(st.integers(min_value=0, max_value=2 ** 80))
    def test_roundtrip_large(self, k):
        assert string_to_index(index_to_string(k)) == k


class TestPairing:
    def test_small_values(self):
        assert pair(0, 0) == 0
        assert pair(1, 0) == 1
        assert pair(0, 1) == 2
        assert pair(3, 2) == 8 * 5 - 1

    def test_exhaustive_inverse(self):
        seen = set()
        for z in range(1 << 12):
            p, q = unpair(z)
            assert pair(p, q) == z
            seen.add((p, q))
        assert len(seen) == 1 << 12

    @given(st.integers(0, 200), st.integers(0, 10 ** 30))
    def test_unpair_pair(self, p, q):
        assert unpair(pair(p, q)) == (p, q)

    def test_negative(self):
        with pytest.raises(InvalidInputError):
            pair(-1, 0)
        with pytest.raises(InvalidInputError):
            unpair(-3)


class TestIntCode:
    def test_worked_values(self):
        assert int_to_nat(2) == 22
        assert int_to_nat(-1) == 21
        assert int_to_nat(1) == 10
        assert int_to_nat(0) == 0

    @given(st.integers(-3000, 3000))
    def test_roundtrip(self, z):
        assert nat_to_int(int_to_nat(z)) == z

    def test_not_onto(self):
        # 1 = <1, 0>: sign 1 with inner code 0 is not an integer code
        assert not is_int_code(1)
        with pytest.raises(InvalidInputError):
            nat_to_int(1)
        codes = {int_to_nat(z) for z in range(-50, 51)}
        assert len(codes) == 101


class TestExponentVector:
    def test_trailing_zeros_trimmed(self):
        assert ExponentVector((1, 2, 0, 0)) == ExponentVector((1, 2))

    def test_materialize(self):
        assert ExponentVector((3, 1, 2)).materialize() == 8 * 3 * 25
        assert ExponentVector(()).materialize() == 1
        nested = ExponentVector((ExponentVector((2,)),))
        assert nested.materialize() == 16

    def test_symbolic_only(self):
        big = ExponentVector((10 ** 6,))
        assert big.is_symbolic_only()
        assert big.materialize() is None
        assert not ExponentVector((5,)).is_symbolic_only()

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            ExponentVector((1, -2))

    def test_primes(self):
        assert nth_primes(6) == [2, 3, 5, 7, 11, 13]


class TestAlgebraic:
    def test_sqrt2_roots_sorted(self):
        a = AlgebraicNumberSpec((1, 0, -2), 1)
        assert a.degree == 2
        assert a.value() == pytest.approx(np.sqrt(2))
        assert AlgebraicNumberSpec((1, 0, -2), 0).value() == pytest.approx(-np.sqrt(2))

    def test_code_layout(self):
        ev = encode_algebraic(AlgebraicNumberSpec((1, 0, -2), 1))
        assert ev.exponents == (2, int_to_nat(1), 0, int_to_nat(-2), 1)
        assert decode_algebraic(ev) == AlgebraicNumberSpec((1, 0, -2), 1)

    def test_bell_amplitudes(self):
        # +-1/sqrt(2) are the roots of 2 z^2 - 1, so the codes reuse f(2) = 22 and f(-1) = 21
        plus = AlgebraicNumberSpec((2, 0, -1), 1)
        minus = AlgebraicNumberSpec((2, 0, -1), 0)
        assert plus.value() == pytest.approx(2 ** -0.5)
        assert encode_algebraic(plus).exponents == (2, 22, 0, 21, 1)
        bell = encode_elementary_vector({"00": plus, "11": plus})
        assert bell.exponents[0] == string_to_index("11")
        assert decode_elementary_vector(bell)[index_to_string(3)] == plus
        assert encode_algebraic(minus).exponents == (2, 22, 0, 21)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            AlgebraicNumberSpec((0, 0))
        with pytest.raises(InvalidInputError):
            AlgebraicNumberSpec((1, 1), 1)

    def test_value_degree_limit(self):
        with pytest.raises(InvalidInputError):
            AlgebraicNumberSpec((1, 0, 0, 0, 0, -1)).value()


class TestElementaryVector:
    def test_roundtrip(self):
        coeffs = {"0": AlgebraicNumberSpec((2, -1)), "11": AlgebraicNumberSpec((1, 0, -2), 1)}
        ev = encode_elementary_vector(coeffs)
        assert ev.exponents[0] == string_to_index("11")
        back = decode_elementary_vector(ev)
        assert {str(k): v for k, v in back.items()} == coeffs

    def test_empty(self):
        assert decode_elementary_vector(encode_elementary_vector({})) == {}

    def test_duplicate_word(self):
        with pytest.raises(InvalidInputError):
            encode_elementary_vector({"1": AlgebraicNumberSpec((1, -1)),
                                      (1,): AlgebraicNumberSpec((1, 1))})

    def test_evaluate(self):
        vals = evaluate_elementary_vector({"01": AlgebraicNumberSpec((2, -1))})
        assert vals == {"01": pytest.approx(0.5)}

    @given(st.dictionaries(
        st.integers(0, 30),
        st.tuples(st.lists(st.integers(-5, 5), min_size=2, max_size=4), st.integers(0, 3)),
        max_size=4))
    def test_random_roundtrip(self, raw):
        coeffs = {}
        for idx, (cs, r) in raw.items():
            if cs[0] == 0:
                cs[0] = 1
            coeffs[index_to_string(idx)] = AlgebraicNumberSpec(tuple(cs), r % (len(cs) - 1))
        assert decode_elementary_vector(encode_elementary_vector(coeffs)) == coeffs
