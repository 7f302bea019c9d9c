"""Exact bijective encodings between words, integers and elementary vectors.

Words over a finite alphabet are :class:`SymbolString` objects.  Binary words
are numbered in length-lexicographic order, natural numbers are paired with
``<p, q> = 2**p * (2*q + 1) - 1``, and algebraic numbers and elementary
vectors receive prime-power Goedel numbers.  Those Goedel numbers grow
doubly exponentially, so they are kept as :class:`ExponentVector` objects and
only turned into Python integers on request.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import InvalidInputError

#: exponents above this are never materialized by default
DEFAULT_MATERIALIZE_BOUND = 4096


@dataclass(frozen=True)
class SymbolString:
    """A finite word over the alphabet ``{0, ..., alphabet_size - 1}``."""

    symbols: tuple = ()
    alphabet_size: int = 2

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise InvalidInputError(f"alphabet_size must be >= 2, got {self.alphabet_size}")
        symbols = tuple(int(s) for s in self.symbols)
        for s in symbols:
            if not 0 <= s < self.alphabet_size:
                raise InvalidInputError(
                    f"symbol {s} outside alphabet of size {self.alphabet_size}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def from_str(cls, text: str, alphabet_size: int = 2) -> "SymbolString":
        return cls(tuple(int(c) for c in text), alphabet_size)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return SymbolString(self.symbols[item], self.alphabet_size)
        return self.symbols[item]

    def __add__(self, other: "SymbolString") -> "SymbolString":
        if other.alphabet_size != self.alphabet_size:
            raise InvalidInputError("cannot concatenate words over different alphabets")
        return SymbolString(self.symbols + other.symbols, self.alphabet_size)

    def __str__(self):
        if self.alphabet_size <= 10:
            return "".join(str(s) for s in self.symbols)
        return ",".join(str(s) for s in self.symbols)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int64)

    def lex_index(self) -> int:
        """Position of the word among all words of its length, first symbol most significant."""
        idx = 0
        for s in self.symbols:
            idx = idx * self.alphabet_size + s
        return idx


WordLike = Union[SymbolString, str, Sequence[int]]


def as_word(word: WordLike, alphabet_size: int = 2) -> SymbolString:
    if isinstance(word, SymbolString):
        return word
    if isinstance(word, str):
        return SymbolString.from_str(word, alphabet_size)
    return SymbolString(tuple(word), alphabet_size)


# -- binary words <-> naturals ------------------------------------------------

def string_to_index(word: WordLike) -> int:
    """Length-lexicographic rank of a binary word: ``2**len + value - 1``.

    >>> [string_to_index(w) for w in ["", "0", "1", "00", "10"]]
    [0, 1, 2, 3, 5]
    """
    word = as_word(word)
    if word.alphabet_size != 2:
        raise InvalidInputError("string_to_index is defined for binary words only")
    return (1 << len(word)) + word.lex_index() - 1


def index_to_string(index: int) -> SymbolString:
    """Inverse of :func:`string_to_index`."""
    if index < 0:
        raise InvalidInputError(f"index must be a natural number, got {index}")
    length = (index + 1).bit_length() - 1
    value = index + 1 - (1 << length)
    bits = tuple((value >> (length - 1 - j)) & 1 for j in range(length))
    return SymbolString(bits, 2)


# -- pairing and integer coding ----------------------------------------------

def pair(p: int, q: int) -> int:
    """Bijection N x N -> N, ``<p, q> = 2**p (2q + 1) - 1``."""
    if p < 0 or q < 0:
        raise InvalidInputError("pair() takes natural numbers")
    return (1 << p) * (2 * q + 1) - 1


def unpair(z: int) -> tuple:
    if z < 0:
        raise InvalidInputError("unpair() takes a natural number")
    m = z + 1
    p = (m & -m).bit_length() - 1
    return p, ((m >> p) - 1) // 2


def int_to_nat(z: int) -> int:
    """Sign-tagged integer code: ``z > 0 -> <0, <z, 1>>``, ``z < 0 -> <1, <-z, 1>>``, ``0 -> 0``.

    This is the rational-number code ``p/q -> <sign, <p, q>>`` restricted to
    denominator 1, with zero mapped to ``<0, <0, 0>> = 0``.  It is injective
    but not onto: :func:`nat_to_int` rejects naturals that are not codes.
    """
    z = int(z)
    if z == 0:
        return 0
    if z > 0:
        return pair(0, pair(z, 1))
    return pair(1, pair(-z, 1))


def nat_to_int(m: int) -> int:
    if m == 0:
        return 0
    sign, inner = unpair(m)
    magnitude, denominator = unpair(inner)
    if sign > 1 or denominator != 1 or magnitude == 0:
        raise InvalidInputError(f"{m} is not the code of an integer")
    return magnitude if sign == 0 else -magnitude


def is_int_code(m: int) -> bool:
    try:
        nat_to_int(m)
    except InvalidInputError:
        return False
    return True


# -- exponent vectors -----------------------------------------------------------

def nth_primes(count: int) -> list:
    from sympy import prime

    return [int(prime(i)) for i in range(1, count + 1)]


@dataclass(frozen=True)
class ExponentVector:
    """The integer ``prod_j p_j ** e_j`` over the primes 2, 3, 5, ..., kept symbolic.

    Entries are non-negative ints or nested :class:`ExponentVector` objects
    (standing for the integer they encode).  Trailing zeros are trimmed, so
    equal integers have equal vectors.
    """

    exponents: tuple = ()

    def __post_init__(self):
        exps = list(self.exponents)
        for e in exps:
            if isinstance(e, ExponentVector):
                continue
            if int(e) != e or e < 0:
                raise InvalidInputError(f"exponent {e!r} is not a natural number")
        exps = [e if isinstance(e, ExponentVector) else int(e) for e in exps]
        while exps and not isinstance(exps[-1], ExponentVector) and exps[-1] == 0:
            exps.pop()
        object.__setattr__(self, "exponents", tuple(exps))

    def __len__(self):
        return len(self.exponents)

    def padded(self, length: int) -> tuple:
        if len(self.exponents) > length:
            raise InvalidInputError(
                f"exponent vector has {len(self.exponents)} entries, expected at most {length}")
        return self.exponents + (0,) * (length - len(self.exponents))

    def materialize(self, bound: int = DEFAULT_MATERIALIZE_BOUND):
        """The encoded integer, or ``None`` when some exponent reaches ``bound``.

        ``None`` is the symbolic-only flag: the number exists but is too large
        to be worth building.
        """
        values = []
        for e in self.exponents:
            if isinstance(e, ExponentVector):
                e = e.materialize(bound)
                if e is None:
                    return None
            if e >= bound:
                return None
            values.append(e)
        result = 1
        for p, e in zip(nth_primes(len(values)), values):
            result *= p ** e
        return result

    def is_symbolic_only(self, bound: int = DEFAULT_MATERIALIZE_BOUND) -> bool:
        return self.materialize(bound) is None


# -- algebraic numbers ----------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicNumberSpec:
    """Root number ``root_index`` of ``x_0 z**n + x_1 z**(n-1) + ... + x_n``.

    Roots are ordered lexicographically by (real part, imaginary part).
    """

    coefficients: tuple
    root_index: int = 0

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or all(c == 0 for c in coeffs):
            raise InvalidInputError("the zero polynomial defines no algebraic number")
        if self.root_index < 0 or self.root_index >= self._degree(coeffs):
            raise InvalidInputError(
                f"root_index {self.root_index} out of range for degree {self._degree(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)

    @staticmethod
    def _degree(coeffs) -> int:
        lead = next(i for i, c in enumerate(coeffs) if c != 0)
        return len(coeffs) - 1 - lead

    @property
    def degree(self) -> int:
        return self._degree(self.coefficients)

    def roots(self) -> np.ndarray:
        roots = np.roots(np.asarray(self.coefficients, dtype=float))
        keys = (np.round(roots.imag, 9), np.round(roots.real, 9))
        return roots[np.lexsort(keys)]

    def value(self) -> complex:
        if self.degree > 4:
            raise InvalidInputError("numerical evaluation is limited to degree <= 4")
        return complex(self.roots()[self.root_index])


def encode_algebraic(a: AlgebraicNumberSpec) -> ExponentVector:
    """Exponents ``(n, f(x_0), ..., f(x_n), i)`` on the primes 2, 3, 5, ..."""
    n = len(a.coefficients) - 1
    return ExponentVector((n, *(int_to_nat(x) for x in a.coefficients), a.root_index))


def decode_algebraic(ev: ExponentVector) -> AlgebraicNumberSpec:
    if not ev.exponents:
        raise InvalidInputError("empty exponent vector encodes no algebraic number")
    n = ev.exponents[0]
    if isinstance(n, ExponentVector) or any(isinstance(e, ExponentVector) for e in ev.exponents):
        raise InvalidInputError("algebraic-number codes have plain integer exponents")
    exps = ev.padded(n + 3)
    coeffs = tuple(nat_to_int(e) for e in exps[1:n + 2])
    return AlgebraicNumberSpec(coeffs, exps[n + 2])


# -- elementary vectors -----------------------------------------------------------

def encode_elementary_vector(coeffs: Mapping[WordLike, AlgebraicNumberSpec]) -> ExponentVector:
    """Goedel number of ``sum_s a_s |s>`` with algebraic amplitudes.

    Basis words are ranked by :func:`string_to_index`; with ``N`` the largest
    rank present, the vector is ``(N, w(a_0), ..., w(a_N))`` where ``w`` is
    :func:`encode_algebraic` and absent amplitudes contribute exponent 0.
    """
    ranked = {}
    for word, a in coeffs.items():
        idx = string_to_index(as_word(word))
        if idx in ranked:
            raise InvalidInputError(f"basis word {word!r} given twice")
        if not isinstance(a, AlgebraicNumberSpec):
            raise InvalidInputError(f"coefficient for {word!r} is not an AlgebraicNumberSpec")
        ranked[idx] = a
    if not ranked:
        return ExponentVector((0,))
    top = max(ranked)
    inner = [encode_algebraic(ranked[j]) if j in ranked else 0 for j in range(top + 1)]
    return ExponentVector((top, *inner))


def decode_elementary_vector(ev: ExponentVector) -> dict:
    if not ev.exponents:
        return {}
    top = ev.exponents[0]
    if isinstance(top, ExponentVector):
        raise InvalidInputError("leading exponent must be a plain integer")
    exps = ev.padded(top + 2)
    out = {}
    for j, e in enumerate(exps[1:]):
        if isinstance(e, ExponentVector):
            out[index_to_string(j)] = decode_algebraic(e)
        elif e != 0:
            raise InvalidInputError(f"amplitude exponent {e} is not an algebraic-number code")
    return out


def evaluate_elementary_vector(coeffs: Mapping[WordLike, AlgebraicNumberSpec]) -> dict:
    """Numerical amplitudes ``{word: complex}`` (degree <= 4 amplitudes only)."""
    return {str(as_word(w)): a.value() for w, a in coeffs.items()}
