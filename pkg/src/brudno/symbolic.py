"""Symbolic models of dynamical systems over a finite alphabet.

Three kinds of source are provided: i.i.d. :class:`Bernoulli` sources,
stationary :class:`MarkovSource` chains, and :class:`OrbitSource`, which
codes orbits of the doubling map or a circle rotation through an interval
partition.  Exact sources give cylinder probabilities in closed form; orbit
sources give empirical block frequencies along one long trajectory.

Every function here works in bits.  Words of length ``n`` are indexed in
lexicographic order with the first symbol most significant, which is the
layout of :class:`BlockDistribution` arrays.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .encoding import SymbolString, WordLike, as_word
from .errors import InvalidInputError, ResourceLimitError

DEFAULT_ENUMERATION_CAP = 2 ** 20
STOCHASTIC_TOL = 1e-12


def check_enumerable(k: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP):
    if n < 0:
        raise InvalidInputError(f"block length must be >= 0, got {n}")
    if k ** n > cap:
        raise ResourceLimitError(
            f"{k}**{n} words exceed the enumeration cap {cap}", cap_name="enumeration_cap", cap=cap)


def all_words(n: int, k: int = 2) -> np.ndarray:
    """All ``k**n`` words of length ``n`` as rows of an int array, in lexicographic order."""
    idx = np.arange(k ** n, dtype=np.int64)
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    dtype = np.int16 if k * k < 2 ** 15 else np.int64
    return ((idx[:, None] // powers[None, :]) % k).astype(dtype)


def _log2(x):
    with np.errstate(divide="ignore"):
        return np.log2(x)


def _word_array(word, k):
    if isinstance(word, np.ndarray):
        return word.astype(np.int64, copy=False)
    return as_word(word, k).to_array()


def binary_entropy(p: float) -> float:
    return float(-sum(q * math.log2(q) for q in (p, 1.0 - p) if q > 0))


class _ExactSource:
    """Shared word-probability interface of the exact (closed-form) sources."""

    exact = True

    def log2_probability(self, word: WordLike) -> float:
        w = _word_array(word, self.alphabet_size)
        return float(self.prefix_log2_probabilities(w)[-1])

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    def block_probabilities(self, n: int) -> np.ndarray:
        return 2.0 ** self.block_log2_probabilities(n)

    def sample_path(self, n: int, seed=None) -> SymbolString:
        return SymbolString(tuple(self.sample(n, seed)), self.alphabet_size)


class Bernoulli(_ExactSource):
    """I.i.d. source with the given per-symbol probabilities."""

    def __init__(self, probabilities: Sequence[float]):
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise InvalidInputError("Bernoulli needs a probability vector with >= 2 entries")
        if (p < 0).any() or abs(p.sum() - 1.0) > STOCHASTIC_TOL:
            raise InvalidInputError(f"not a probability vector: {p.tolist()}")
        self.probabilities = p
        self.alphabet_size = p.size
        self._logp = _log2(p)

    @classmethod
    def binary(cls, p_one: float) -> "Bernoulli":
        """Binary source emitting '1' with probability ``p_one``."""
        return cls([1.0 - p_one, p_one])

    @property
    def ergodic(self) -> bool:
        return bool((self.probabilities > 0).all())

    def entropy_rate(self) -> float:
        p = self.probabilities[self.probabilities > 0]
        return float(-(p * np.log2(p)).sum())

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        lp = np.zeros(1)
        for _ in range(n):
            lp = (lp[:, None] + self._logp[None, :]).ravel()
        return lp

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        out = np.zeros(len(symbols) + 1)
        np.cumsum(self._logp[symbols], out=out[1:])
        return out

    def sample(self, n: int, seed=None) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return rng.choice(self.alphabet_size, size=n, p=self.probabilities)

    def __repr__(self):
        return f"Bernoulli({self.probabilities.tolist()})"

    def __eq__(self, other):
        return isinstance(other, Bernoulli) and np.array_equal(self.probabilities, other.probabilities)

    __hash__ = None


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Left Perron vector of a row-stochastic matrix."""
    k = transition.shape[0]
    a = np.vstack([transition.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def is_primitive(transition: np.ndarray) -> bool:
    """Irreducible and aperiodic, via Wielandt's bound on the power needed."""
    k = transition.shape[0]
    pattern = (transition > 0).astype(np.int64)
    power = np.eye(k, dtype=np.int64)
    for _ in range((k - 1) ** 2 + 1):
        power = np.minimum(power @ pattern, 1)
    return bool(power.all())


class MarkovSource(_ExactSource):
    """Stationary first-order Markov chain on ``{0, ..., k-1}``."""

    def __init__(self, transition, initial=None):
        P = np.asarray(transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
            raise InvalidInputError("transition matrix must be square with size >= 2")
        if (P < 0).any() or np.abs(P.sum(axis=1) - 1.0).max() > STOCHASTIC_TOL:
            raise InvalidInputError("transition matrix rows must be probability vectors")
        pi = stationary_distribution(P)
        if initial is not None:
            initial = np.asarray(initial, dtype=float)
            if initial.shape != pi.shape or np.abs(initial @ P - initial).max() > STOCHASTIC_TOL \
                    or abs(initial.sum() - 1.0) > STOCHASTIC_TOL:
                raise InvalidInputError("initial distribution must be stationary for the chain")
            pi = initial
        self.transition = P
        self.initial = pi
        self.alphabet_size = P.shape[0]
        self._logP = _log2(P)
        self._logpi = _log2(pi)

    @property
    def ergodic(self) -> bool:
        return is_primitive(self.transition)

    def entropy_rate(self) -> float:
        P = self.transition
        with np.errstate(divide="ignore", invalid="ignore"):
            row = -np.where(P > 0, P * np.log2(P), 0.0).sum(axis=1)
        return float(self.initial @ row)

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        k = self.alphabet_size
        if n == 0:
            return np.zeros(1)
        lp = self._logpi.copy()
        for _ in range(n - 1):
            last = np.arange(lp.size) % k
            lp = (lp[:, None] + self._logP[last, :]).ravel()
        return lp

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        out = np.zeros(len(symbols) + 1)
        if len(symbols) == 0:
            return out
        steps = np.empty(len(symbols))
        steps[0] = self._logpi[symbols[0]]
        steps[1:] = self._logP[symbols[:-1], symbols[1:]]
        np.cumsum(steps, out=out[1:])
        return out

    def sample(self, n: int, seed=None) -> np.ndarray:
        rng = np.random.default_rng(seed)
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        cum = np.cumsum(self.transition, axis=1)
        u = rng.random(n)
        out = np.empty(n, dtype=np.int64)
        out[0] = min(np.searchsorted(np.cumsum(self.initial), u[0], side="right"), self.alphabet_size - 1)
        for t in range(1, n):
            row = cum[out[t - 1]]
            out[t] = min(np.searchsorted(row, u[t], side="right"), self.alphabet_size - 1)
        return out

    def __repr__(self):
        return f"MarkovSource({self.transition.tolist()})"

    def __eq__(self, other):
        return isinstance(other, MarkovSource) and np.array_equal(self.transition, other.transition)

    __hash__ = None


# -- interval maps and orbit coding ------------------------------------------------

@dataclass(frozen=True)
class DoublingMap:
    name = "doubling"

    def step(self, m: int, denominator: int, numerator_shift: int) -> int:
        return (2 * m) % denominator


@dataclass(frozen=True)
class RotationMap:
    alpha: Fraction = Fraction(0)
    name = "rotation"

    def step(self, m: int, denominator: int, numerator_shift: int) -> int:
        return (m + numerator_shift) % denominator


@dataclass(frozen=True)
class IntervalPartition:
    """Half-open cells ``[c_j, c_{j+1})`` covering ``[0, 1)``."""

    cuts: tuple = (Fraction(0), Fraction(1, 2), Fraction(1))

    def __post_init__(self):
        cuts = tuple(Fraction(c) for c in self.cuts)
        if len(cuts) < 3 or cuts[0] != 0 or cuts[-1] != 1:
            raise InvalidInputError("partition cuts must start at 0, end at 1 and give >= 2 cells")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise InvalidInputError("partition cuts must be strictly increasing")
        object.__setattr__(self, "cuts", cuts)

    @property
    def size(self) -> int:
        return len(self.cuts) - 1

    def cell(self, x) -> int:
        x = Fraction(x)
        if not 0 <= x < 1:
            raise InvalidInputError(f"point {x} outside [0, 1)")
        return bisect.bisect_right(self.cuts, x) - 1


def _as_fraction(x) -> Fraction:
    # floats convert exactly to their dyadic value
    return x if isinstance(x, Fraction) else Fraction(x)


def encode_orbit(tmap, partition: IntervalPartition, x0, n: int) -> SymbolString:
    """Labels of the partition cells visited by ``T^j x0`` for ``j < n``.

    Arithmetic is exact: the point and the rotation angle are put over one
    common denominator and the orbit is iterated on integer numerators.
    """
    x0 = _as_fraction(x0)
    if not 0 <= x0 < 1:
        raise InvalidInputError(f"x0 = {x0} outside [0, 1)")
    alpha = _as_fraction(getattr(tmap, "alpha", 0)) % 1
    denominator = math.lcm(x0.denominator, alpha.denominator)
    m = x0.numerator * (denominator // x0.denominator)
    shift = alpha.numerator * (denominator // alpha.denominator)
    thresholds = [-(-c.numerator * denominator // c.denominator) for c in partition.cuts]
    out = []
    for _ in range(n):
        out.append(bisect.bisect_right(thresholds, m) - 1)
        m = tmap.step(m, denominator, shift)
    return SymbolString(tuple(out), partition.size)


def random_point(bits: int, seed=None) -> Fraction:
    """Uniform dyadic point with ``bits`` binary digits."""
    rng = np.random.default_rng(seed)
    words = rng.integers(0, 2 ** 32, size=(bits + 31) // 32, dtype=np.uint64)
    value = 0
    for w in words.tolist():
        value = (value << 32) | w
    value >>= 32 * len(words) - bits
    return Fraction(value, 2 ** bits)


class OrbitSource:
    """Symbolic coding of an interval map; block statistics are empirical.

    ``x0=None`` draws a fresh random dyadic point per seed, which is how
    Lebesgue-typical orbits of the doubling map are produced exactly.
    """

    exact = False

    def __init__(self, tmap, partition: Optional[IntervalPartition] = None, x0=None,
                 orbit_length: int = 2 ** 16, ergodic: Optional[bool] = None, seed: int = 0):
        self.tmap = tmap
        self.partition = partition or IntervalPartition()
        self.x0 = None if x0 is None else _as_fraction(x0)
        self.orbit_length = int(orbit_length)
        self.alphabet_size = self.partition.size
        self._ergodic = isinstance(tmap, DoublingMap) if ergodic is None else bool(ergodic)
        self.seed = seed

    @property
    def ergodic(self) -> bool:
        return self._ergodic

    def entropy_rate(self):
        """Closed-form rate where one is known, else ``None``."""
        if isinstance(self.tmap, RotationMap):
            return 0.0
        if isinstance(self.tmap, DoublingMap) and self.partition.cuts == (0, Fraction(1, 2), 1):
            return 1.0
        return None

    def _start(self, n: int, seed):
        if self.x0 is not None:
            return self.x0
        return random_point(n + 64, seed)

    def sample(self, n: int, seed=None) -> np.ndarray:
        return encode_orbit(self.tmap, self.partition, self._start(n, seed), n).to_array()

    def sample_path(self, n: int, seed=None) -> SymbolString:
        return encode_orbit(self.tmap, self.partition, self._start(n, seed), n)

    def __repr__(self):
        return f"OrbitSource({self.tmap!r}, cuts={[str(c) for c in self.partition.cuts]})"


def sample_path(source, n: int, seed=None) -> SymbolString:
    """Reproducible length-``n`` trajectory of ``source``."""
    return source.sample_path(n, seed)


# -- block distributions and entropies -------------------------------------------

@dataclass(frozen=True)
class BlockDistribution:
    """Probabilities of all length-``n`` words, lexicographically indexed."""

    n: int
    alphabet_size: int
    probabilities: np.ndarray
    empirical: bool = False

    def __post_init__(self):
        p = self.probabilities
        if p.shape != (self.alphabet_size ** self.n,):
            raise InvalidInputError("probability array has the wrong length")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
            raise InvalidInputError("block probabilities must be non-negative and sum to 1")

    def __getitem__(self, word: WordLike) -> float:
        w = as_word(word, self.alphabet_size)
        if len(w) != self.n:
            raise InvalidInputError(f"word length {len(w)} != block length {self.n}")
        return float(self.probabilities[w.lex_index()])

    def items(self):
        for idx, row in enumerate(all_words(self.n, self.alphabet_size)):
            yield SymbolString(tuple(row), self.alphabet_size), float(self.probabilities[idx])

    def drop_last(self) -> "BlockDistribution":
        """Marginal on the first ``n - 1`` symbols."""
        p = self.probabilities.reshape(-1, self.alphabet_size).sum(axis=1)
        return BlockDistribution(self.n - 1, self.alphabet_size, p, self.empirical)

    def drop_first(self) -> "BlockDistribution":
        """Marginal on the last ``n - 1`` symbols."""
        p = self.probabilities.reshape(self.alphabet_size, -1).sum(axis=0)
        return BlockDistribution(self.n - 1, self.alphabet_size, p, self.empirical)

    @property
    def log2_probabilities(self) -> np.ndarray:
        return _log2(self.probabilities)


def block_distribution(source, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> BlockDistribution:
    """Cylinder probabilities of all length-``n`` words.

    Exact for Bernoulli and Markov sources; for orbit sources the sliding-window
    frequencies of one orbit of length ``source.orbit_length`` (flagged empirical).
    """
    if n < 1:
        raise InvalidInputError(f"block length must be >= 1, got {n}")
    k = source.alphabet_size
    check_enumerable(k, n, cap)
    if getattr(source, "exact", False):
        return BlockDistribution(n, k, source.block_probabilities(n))
    symbols = source.sample(source.orbit_length + n - 1, source.seed)
    windows = np.lib.stride_tricks.sliding_window_view(symbols, n)
    idx = windows @ (k ** np.arange(n - 1, -1, -1, dtype=np.int64))
    counts = np.bincount(idx, minlength=k ** n).astype(float)
    return BlockDistribution(n, k, counts / counts.sum(), empirical=True)


def shannon_entropy(d: BlockDistribution) -> float:
    """``-sum p log2 p`` in bits, with ``0 log 0 = 0``."""
    p = d.probabilities[d.probabilities > 0]
    return float(max(-(p * np.log2(p)).sum(), 0.0))


@dataclass
class EntropyReport:
    per_n: list
    rate_estimate: float
    closed_form: Optional[float] = None

    @property
    def block_entropies(self) -> dict:
        return {n: h for n, h, _ in self.per_n}


def ks_entropy_rate(source, n_max: int, cap: int = DEFAULT_ENUMERATION_CAP) -> EntropyReport:
    """``H_n / n`` for ``n = 1..n_max`` and their infimum.

    The closed-form rate is attached for sources that have one.
    """
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    per_n = []
    for n in range(1, n_max + 1):
        h = shannon_entropy(block_distribution(source, n, cap))
        per_n.append((n, h, h / n))
    closed = source.entropy_rate() if hasattr(source, "entropy_rate") else None
    return EntropyReport(per_n, min(r for _, _, r in per_n), closed)
