"""Computable semi-measures on finite words and the -log2 mu complexity surrogate.

A *word model* is any object with ``alphabet_size`` and three log2
evaluators: ``log2_probability(word)``, ``block_log2_probabilities(n)`` (all
words of length ``n`` in lexicographic order) and
``prefix_log2_probabilities(symbols)`` (every prefix of one sequence, lengths
``0..len``).  The sources of :mod:`brudno.symbolic` are word models, and so are
the estimators defined here.

The universal semi-measure itself is not computable.  Its stand-in is a
finite :class:`SemiMeasure` mixture over a declared :class:`WeightedFamily`,
which dominates each member up to its weight by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .encoding import SymbolString, WordLike, as_word
from .errors import InvalidInputError, PositivityError
from .symbolic import DEFAULT_ENUMERATION_CAP, Bernoulli, all_words, check_enumerable

LN2 = math.log(2.0)
WEIGHT_TOL = 1e-12


def _words(word, k):
    if isinstance(word, np.ndarray):
        return word.astype(np.int64, copy=False)
    return as_word(word, k).to_array()


def _one_hot_counts_before(codes: np.ndarray, size: int) -> np.ndarray:
    """``out[t, j]`` = number of ``t' < t`` with ``codes[t'] == j``."""
    onehot = np.zeros((len(codes) + 1, size), dtype=np.int64)
    onehot[np.arange(1, len(codes) + 1), codes] = 1
    return np.cumsum(onehot, axis=0)[:-1]


class KTEstimator:
    """Krichevsky-Trofimov mixture: sequential add-1/2 estimator.

    The probability of symbol ``a`` after ``t`` symbols is
    ``(c_a + 1/2) / (t + k/2)``; the product over a word is exchangeable and
    sums to one over each length.
    """

    exact = True

    def __init__(self, alphabet_size: int = 2):
        self.alphabet_size = alphabet_size

    def log2_probability(self, word: WordLike) -> float:
        return float(self.prefix_log2_probabilities(_words(word, self.alphabet_size))[-1])

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    def _log2_from_counts(self, counts: np.ndarray) -> np.ndarray:
        k = self.alphabet_size
        total = counts.sum(axis=-1)
        ln = (gammaln(counts + 0.5).sum(axis=-1) - k * gammaln(0.5)
              + gammaln(k / 2.0) - gammaln(total + k / 2.0))
        return ln / LN2

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        W = all_words(n, self.alphabet_size)
        counts = np.stack([(W == a).sum(axis=1) for a in range(self.alphabet_size)], axis=-1)
        return self._log2_from_counts(counts)

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        k = self.alphabet_size
        n = len(symbols)
        out = np.zeros(n + 1)
        if n == 0:
            return out
        before = _one_hot_counts_before(symbols, k)[np.arange(n), symbols]
        steps = np.log2((before + 0.5) / (np.arange(n) + k / 2.0))
        np.cumsum(steps, out=out[1:])
        return out

    def __repr__(self):
        return f"KTEstimator(k={self.alphabet_size})"


class MarkovKTEstimator:
    """Order-1 context KT: uniform first symbol, then one KT estimator per preceding symbol."""

    exact = True

    def __init__(self, alphabet_size: int = 2, order: int = 1):
        if order != 1:
            raise InvalidInputError(f"only order-1 Markov-KT is supported, got order {order}")
        self.alphabet_size = alphabet_size
        self.order = order

    def log2_probability(self, word: WordLike) -> float:
        return float(self.prefix_log2_probabilities(_words(word, self.alphabet_size))[-1])

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        k = self.alphabet_size
        if n == 0:
            return np.zeros(1)
        W = all_words(n, k)
        codes = W[:, :-1] * k + W[:, 1:]
        counts = np.stack([(codes == j).sum(axis=1) for j in range(k * k)], axis=-1)
        counts = counts.reshape(-1, k, k)
        total = counts.sum(axis=-1)
        ln = (gammaln(counts + 0.5).sum(axis=-1) - k * gammaln(0.5)
              + gammaln(k / 2.0) - gammaln(total + k / 2.0)).sum(axis=-1)
        return ln / LN2 - math.log2(k)

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        k = self.alphabet_size
        n = len(symbols)
        out = np.zeros(n + 1)
        if n == 0:
            return out
        steps = np.empty(n)
        steps[0] = -math.log2(k)
        if n > 1:
            ctx = symbols[:-1]
            codes = ctx * k + symbols[1:]
            m = n - 1
            pair_before = _one_hot_counts_before(codes, k * k)[np.arange(m), codes]
            ctx_before = _one_hot_counts_before(ctx, k)[np.arange(m), ctx]
            steps[1:] = np.log2((pair_before + 0.5) / (ctx_before + k / 2.0))
        np.cumsum(steps, out=out[1:])
        return out

    def __repr__(self):
        return f"MarkovKTEstimator(k={self.alphabet_size}, order={self.order})"


class PointMass:
    """Unit mass on a single word (a semi-measure: other lengths carry no mass)."""

    exact = True

    def __init__(self, word: WordLike, alphabet_size: int = 2):
        self.word = as_word(word, alphabet_size)
        self.alphabet_size = self.word.alphabet_size

    def log2_probability(self, word: WordLike) -> float:
        return 0.0 if as_word(word, self.alphabet_size) == self.word else -np.inf

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        out = np.full(self.alphabet_size ** n, -np.inf)
        if n == len(self.word):
            out[self.word.lex_index()] = 0.0
        return out

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        out = np.full(len(symbols) + 1, -np.inf)
        m = len(self.word)
        if m <= len(symbols) and tuple(symbols[:m].tolist()) == self.word.symbols:
            out[m] = 0.0
        return out

    def __repr__(self):
        return f"PointMass({str(self.word)!r})"


# -- length weighting -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_squared_tail_sum(cutoff: int = 10 ** 6) -> float:
    """``sum_{n >= 2} 1 / (n log2(n)**2)`` via a direct sum plus Euler-Maclaurin tail."""
    n = np.arange(2, cutoff, dtype=float)
    head = float(np.sum(1.0 / (n * np.log2(n) ** 2)))
    N = float(cutoff)
    lnN = math.log(N)
    f = LN2 ** 2 / (N * lnN ** 2)
    fprime = -LN2 ** 2 * (lnN + 2.0) / (N ** 2 * lnN ** 3)
    return head + LN2 ** 2 / lnN + f / 2.0 - fprime / 12.0


@dataclass(frozen=True)
class LengthWeighting:
    """Summable weights over word lengths.

    ``"log-squared"``: ``delta(n) = 1 / (n log2(n)**2)`` for ``n >= 2``, with the
    reserved raw weight ``reserved`` for lengths 0 and 1.
    ``"inverse-square"``: ``delta(n) = n**-2`` for ``n >= 1``; the empty word gets 0.
    ``weight(n) = delta(n) / normalizer`` sums to one over all lengths.
    """

    kind: str = "log-squared"
    reserved: float = 0.5

    def __post_init__(self):
        if self.kind not in ("log-squared", "inverse-square"):
            raise InvalidInputError(f"unknown length weighting {self.kind!r}")
        if self.reserved < 0:
            raise InvalidInputError("reserved weight must be >= 0")

    def delta(self, n):
        n = np.asarray(n, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "log-squared":
                out = np.where(n >= 2, 1.0 / (n * np.log2(np.maximum(n, 2.0)) ** 2), self.reserved)
            else:
                out = np.where(n >= 1, 1.0 / np.maximum(n, 1.0) ** 2, 0.0)
        return out if out.ndim else float(out)

    @property
    def normalizer(self) -> float:
        if self.kind == "log-squared":
            return 2 * self.reserved + _log_squared_tail_sum()
        return math.pi ** 2 / 6.0

    def log2_weight(self, n):
        d = self.delta(n)
        with np.errstate(divide="ignore"):
            return np.log2(d) - math.log2(self.normalizer)


class LengthWeighted:
    """``f(s) = weight(|s|) * model(s)``: a per-length measure spread into a semi-measure on all words."""

    exact = True

    def __init__(self, model, weighting: Optional[LengthWeighting] = None):
        self.model = model
        self.weighting = weighting or LengthWeighting()
        self.alphabet_size = model.alphabet_size

    def log2_probability(self, word: WordLike) -> float:
        w = as_word(word, self.alphabet_size) if not isinstance(word, np.ndarray) else word
        return float(self.model.log2_probability(w) + self.weighting.log2_weight(len(w)))

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        return self.model.block_log2_probabilities(n) + self.weighting.log2_weight(n)

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        lengths = np.arange(len(symbols) + 1)
        return self.model.prefix_log2_probabilities(symbols) + self.weighting.log2_weight(lengths)

    def __repr__(self):
        return f"LengthWeighted({self.model!r}, {self.weighting.kind})"


def length_weighted(model, weighting: Optional[LengthWeighting] = None) -> LengthWeighted:
    return LengthWeighted(model, weighting)


# -- families and mixtures ------------------------------------------------------------

class WeightedFamily:
    """Word models with positive weights summing to at most one."""

    def __init__(self, members):
        members = [(m, float(w)) for m, w in members]
        if not members:
            raise InvalidInputError("a family needs at least one member")
        for m, w in members:
            if not w > 0:
                raise InvalidInputError(f"member {m!r} has non-positive weight {w}")
        total = sum(w for _, w in members)
        if total > 1.0 + WEIGHT_TOL:
            raise InvalidInputError(f"family weights sum to {total} > 1")
        sizes = {m.alphabet_size for m, _ in members}
        if len(sizes) != 1:
            raise InvalidInputError(f"family members disagree on alphabet size: {sorted(sizes)}")
        self.members = members
        self.alphabet_size = sizes.pop()

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.members)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def extended(self, extra) -> "WeightedFamily":
        return WeightedFamily(self.members + list(extra))

    def find(self, predicate):
        """Index and weight of the first member whose model satisfies ``predicate``."""
        for i, (m, w) in enumerate(self.members):
            base = m.model if isinstance(m, LengthWeighted) else m
            if predicate(base):
                return i, w
        return None


def default_family(weighting: Optional[LengthWeighting] = None, total: float = 0.5) -> WeightedFamily:
    """Bernoulli(p) for p = 0.05, ..., 0.95, then order-1 Markov-KT, then KT.

    Member ``i`` gets weight proportional to ``2**-i``, normalized to ``total``;
    every member is length-weighted so the mixture is a semi-measure on all words.
    """
    weighting = weighting or LengthWeighting()
    models = [Bernoulli.binary(round(0.05 * j, 2)) for j in range(1, 20)]
    models += [MarkovKTEstimator(2), KTEstimator(2)]
    raw = [2.0 ** -i for i in range(len(models))]
    scale = total / sum(raw)
    return WeightedFamily([(LengthWeighted(m, weighting), r * scale) for m, r in zip(models, raw)])


class SemiMeasure:
    """Finite mixture ``mu(s) = sum_k w_k nu_k(s)`` evaluated in log2 space."""

    def __init__(self, family):
        if not isinstance(family, WeightedFamily):
            family = WeightedFamily(family)
        self.family = family
        self.alphabet_size = family.alphabet_size
        self._logw = np.log2([w for _, w in family.members])

    def _combine(self, parts):
        stacked = np.stack(parts) + self._logw.reshape((-1,) + (1,) * (np.ndim(parts[0])))
        return np.logaddexp2.reduce(stacked, axis=0)

    def log2_probability(self, word: WordLike) -> float:
        w = _words(word, self.alphabet_size)
        return float(self._combine([np.asarray(m.log2_probability(w)) for m, _ in self.family]))

    def probability(self, word: WordLike) -> float:
        return float(2.0 ** self.log2_probability(word))

    __call__ = probability

    def block_log2_probabilities(self, n: int) -> np.ndarray:
        return self._combine([m.block_log2_probabilities(n) for m, _ in self.family])

    def prefix_log2_probabilities(self, symbols: np.ndarray) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        return self._combine([m.prefix_log2_probabilities(symbols) for m, _ in self.family])

    def __repr__(self):
        return f"SemiMeasure({len(self.family)} members, total weight {self.family.total_weight:.6g})"


def mixture(family) -> SemiMeasure:
    return SemiMeasure(family)


def kt_probability(word: WordLike) -> float:
    """KT probability of a binary word."""
    return KTEstimator(2).probability(as_word(word))


def markov_kt_probability(word: WordLike, order: int = 1) -> float:
    return MarkovKTEstimator(2, order).probability(as_word(word))


def complexity_surrogate(mu, word: WordLike) -> float:
    """``-log2 mu(s)`` in bits, the computable stand-in for prefix complexity."""
    lp = mu.log2_probability(word)
    if not np.isfinite(lp):
        raise PositivityError(f"mu({word!s}) = 0; the family does not cover this word")
    return -float(lp)


def length_mass(model, n: int) -> float:
    """Total mass a model puts on words of length ``n``."""
    return float(np.exp2(model.block_log2_probabilities(n)).sum())


@dataclass
class DominanceReport:
    passed: bool
    weight: float
    worst_ratio: float
    witness: Optional[SymbolString]
    words_checked: int


def dominance_check(mu, nu, weight: float, n_max: int,
                    cap: int = DEFAULT_ENUMERATION_CAP) -> DominanceReport:
    """Exhaustively test ``weight * nu(s) <= mu(s)`` for all words with ``|s| <= n_max``.

    ``worst_ratio`` is the smallest ``mu(s) / nu(s)`` over words with
    ``nu(s) > 0``; the witness is the word attaining it when the test fails.
    """
    k = mu.alphabet_size
    check_enumerable(k, n_max, cap)
    logw = math.log2(weight)
    worst, worst_word, checked = np.inf, None, 0
    violated = False
    for n in range(n_max + 1):
        lmu = mu.block_log2_probabilities(n)
        lnu = nu.block_log2_probabilities(n)
        support = np.isfinite(lnu)
        checked += lmu.size
        if not support.any():
            continue
        diff = np.where(support, lmu - lnu, np.inf)
        i = int(np.argmin(diff))
        if diff[i] < worst:
            worst = float(diff[i])
            worst_word = SymbolString(tuple(all_words(n, k)[i]), k)
        if (logw + lnu[support] > lmu[support] + 1e-9).any():
            violated = True
    ratio = float(2.0 ** worst) if np.isfinite(worst) else np.inf
    return DominanceReport(not violated, weight, ratio, worst_word if violated else None, checked)
