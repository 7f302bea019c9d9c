"""Gacs complexity of classical symbolic sources.

For a stationary source ``pi`` and a universal-style semi-measure ``mu`` the
block complexity is ``G_n = -sum_s pi(s) log2 mu(s)`` over words of length
``n``.  Its rate ``G_n / n`` should approach the entropy rate of the source.
This module computes ``G_n`` exactly on enumerable block spaces and by
Monte-Carlo sampling beyond them, and checks the finite-``n`` inequalities
behind that convergence: the mixture bound on ``G_n``, typical-set masses
and the counting bound for heavy words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encoding import SymbolString, as_word
from .errors import InvalidInputError, InvalidSequenceError, PositivityError
from .semimeasure import LengthWeighted, SemiMeasure
from .symbolic import (
    DEFAULT_ENUMERATION_CAP, Bernoulli, DoublingMap, IntervalPartition, MarkovSource,
    OrbitSource, all_words, block_distribution, check_enumerable, ks_entropy_rate,
    shannon_entropy,
)

#: block spaces up to this size get exact expectations in gacs_block_complexity
DEFAULT_EXACT_CAP = 2 ** 16
#: absolute slack, in bits, for inequalities evaluated in floating point
BOUND_TOL = 1e-9


def _seeds(seed, count: int) -> list:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def block_entropy(source, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Optional[float]:
    """``H_n`` in bits: closed form for Bernoulli and Markov sources, else by enumeration."""
    if isinstance(source, Bernoulli):
        return n * source.entropy_rate()
    if isinstance(source, MarkovSource):
        if n == 0:
            return 0.0
        p = source.initial[source.initial > 0]
        return float(-(p * np.log2(p)).sum()) + (n - 1) * source.entropy_rate()
    if source.alphabet_size ** n > cap:
        return None
    return shannon_entropy(block_distribution(source, n, cap))


def reference_entropy_rate(source, n_max: int = 12) -> float:
    h = source.entropy_rate() if hasattr(source, "entropy_rate") else None
    if h is not None:
        return float(h)
    return ks_entropy_rate(source, n_max).rate_estimate


# -- block complexity ------------------------------------------------------------------

@dataclass
class ComplexityEstimate:
    """``G_n`` in bits.  ``exact`` estimates have ``stderr == 0``."""

    n: int
    value: float
    stderr: float = 0.0
    exact: bool = True
    samples: int = 0

    @property
    def rate(self) -> float:
        return self.value / self.n if self.n else float("nan")


def _exact_complexity(source, mu, n: int, cap: int) -> ComplexityEstimate:
    dist = block_distribution(source, n, cap)
    lm = mu.block_log2_probabilities(n)
    support = dist.probabilities > 0
    if not np.isfinite(lm[support]).all():
        i = int(np.flatnonzero(support & ~np.isfinite(lm))[0])
        word = SymbolString(tuple(all_words(n, dist.alphabet_size)[i]), dist.alphabet_size)
        raise PositivityError(f"mu({word}) = 0 on a word of positive source probability")
    value = float(-(dist.probabilities[support] * lm[support]).sum())
    return ComplexityEstimate(n, value, 0.0, exact=not dist.empirical)


def sampled_log2_prefixes(source, mu, n_max: int, samples: int, seed=0) -> np.ndarray:
    """``log2 mu`` of every prefix of ``samples`` independent source paths.

    Row ``j`` belongs to the path drawn with the ``j``-th derived seed; column
    ``n`` holds ``log2 mu(s_1 ... s_n)``.
    """
    out = np.empty((samples, n_max + 1))
    for j, s in enumerate(_seeds(seed, samples)):
        path = source.sample(n_max, s)
        lp = mu.prefix_log2_probabilities(path)
        if not np.isfinite(lp).all():
            raise PositivityError("mu vanishes on a sampled prefix")
        out[j] = lp
    return out


def _mc_estimate(n: int, log2_prefixes: np.ndarray) -> ComplexityEstimate:
    g = -log2_prefixes[:, n]
    m = g.size
    stderr = float(g.std(ddof=1) / math.sqrt(m)) if m > 1 else float("inf")
    return ComplexityEstimate(n, float(g.mean()), stderr, exact=False, samples=m)


def gacs_block_complexity(source, mu, n: int, *, samples: int = 100, seed=0,
                          exact_cap: int = DEFAULT_EXACT_CAP) -> ComplexityEstimate:
    """``G_n = -sum_s pi(s) log2 mu(s)``.

    Exact when ``k**n <= exact_cap`` (empirical frequencies for orbit sources),
    otherwise the mean of ``-log2 mu`` over ``samples`` sampled words with its
    standard error.  Raises :class:`PositivityError` if ``mu`` vanishes where
    the source does not.
    """
    if n < 1:
        raise InvalidInputError(f"block length must be >= 1, got {n}")
    if source.alphabet_size ** n <= exact_cap:
        return _exact_complexity(source, mu, n, exact_cap)
    return _mc_estimate(n, sampled_log2_prefixes(source, mu, n, samples, seed))


@dataclass
class GacsRow:
    n: int
    G_n: float
    rate: float
    stderr: float
    exact: bool
    H_n: Optional[float] = None


@dataclass
class GacsClassicalReport:
    rows: list
    rate_estimate: float
    entropy_rate: float
    monotone: bool

    @property
    def gap(self) -> float:
        return self.rate_estimate - self.entropy_rate

    @property
    def per_n(self) -> list:
        return [(r.n, r.G_n, r.rate) for r in self.rows]


def gacs_rate(source, mu, n_grid: Sequence[int], *, samples: int = 100, seed=0,
              exact_cap: int = DEFAULT_EXACT_CAP) -> GacsClassicalReport:
    """``G_n / n`` along ``n_grid``; the rate estimate is the value at the largest ``n``.

    Sampled grid points share one set of paths (prefixes of a stationary path
    are stationary paths).  ``monotone`` reports whether the rates decrease
    along the grid up to three standard errors.
    """
    if not getattr(source, "ergodic", False):
        raise InvalidInputError("gacs_rate needs a source declared ergodic")
    grid = sorted(set(int(n) for n in n_grid))
    if not grid or grid[0] < 1:
        raise InvalidInputError("n_grid must hold block lengths >= 1")
    k = source.alphabet_size
    sampled = [n for n in grid if k ** n > exact_cap]
    prefixes = sampled_log2_prefixes(source, mu, max(sampled), samples, seed) if sampled else None
    rows = []
    for n in grid:
        est = _mc_estimate(n, prefixes) if n in sampled else _exact_complexity(source, mu, n, exact_cap)
        rows.append(GacsRow(n, est.value, est.rate, est.stderr / n, est.exact,
                            block_entropy(source, n, exact_cap)))
    monotone = all(b.rate <= a.rate + 3 * (a.stderr + b.stderr) + BOUND_TOL
                   for a, b in zip(rows, rows[1:]))
    return GacsClassicalReport(rows, rows[-1].rate, reference_entropy_rate(source), monotone)


def per_sequence_rate(mu, s_full, n_grid: Sequence[int]) -> list:
    """``(n, -log2 mu(s_1 ... s_n) / n)`` along one trajectory."""
    symbols = s_full if isinstance(s_full, np.ndarray) else as_word(s_full, mu.alphabet_size).to_array()
    grid = sorted(set(int(n) for n in n_grid))
    if grid and (grid[0] < 1 or grid[-1] > len(symbols)):
        raise InvalidSequenceError(
            f"grid {grid[0]}..{grid[-1]} does not fit a sequence of length {len(symbols)}")
    lp = mu.prefix_log2_probabilities(symbols[:grid[-1]] if grid else symbols[:0])
    return [(n, float(-lp[n] / n)) for n in grid]


# -- mixture bound -----------------------------------------------------------------------

def _binary_partition(partition: IntervalPartition) -> bool:
    return partition.cuts == IntervalPartition().cuts


def matching_member(family, source):
    """Index and weight of the family member that models ``source``, or ``None``.

    The doubling map coded by the binary partition matches the fair coin.
    """
    if isinstance(source, OrbitSource):
        if isinstance(source.tmap, DoublingMap) and _binary_partition(source.partition):
            source = Bernoulli([0.5, 0.5])
        else:
            return None
    return family.find(lambda m: m == source)


@dataclass
class MixtureBoundReport:
    """``G_n <= CE_n + log2(1/w)`` where ``CE_n`` is the source's cross entropy with its member.

    When the member is the source itself ``CE_n = H_n - log2 weight(n)`` and the
    bound reads ``H_n + log2(1/w) + log2(1/delta(n)) + log2(normalizer)``.
    """

    n: int
    G_n: float
    H_n: float
    cross_entropy: float
    log2_inv_weight: float
    log2_inv_delta: float
    log2_normalizer: float
    member: int
    exact_member: bool

    @property
    def bound(self) -> float:
        return self.cross_entropy + self.log2_inv_weight

    @property
    def slack(self) -> float:
        return self.bound - self.G_n

    @property
    def passed(self) -> bool:
        return self.G_n <= self.bound + BOUND_TOL


def mixture_bound_check(source, mu: SemiMeasure, n: int, member: Optional[int] = None,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> MixtureBoundReport:
    """Exhaustive check of the mixture bound on ``G_n`` at block length ``n``."""
    if member is None:
        found = matching_member(mu.family, source)
        if found is None:
            raise InvalidInputError(f"no family member models {source!r}")
        member = found[0]
    model, weight = mu.family.members[member]
    check_enumerable(source.alphabet_size, n, cap)
    dist = block_distribution(source, n, cap)
    p = dist.probabilities
    support = p > 0
    lmember = model.block_log2_probabilities(n)
    lmu = mu.block_log2_probabilities(n)
    if not np.isfinite(lmu[support]).all():
        raise PositivityError("mu vanishes on a word of positive source probability")
    G = float(-(p[support] * lmu[support]).sum())
    with np.errstate(invalid="ignore"):
        ce = float(-(p[support] * lmember[support]).sum())
    if isinstance(model, LengthWeighted):
        wt = model.weighting
        log2_inv_delta = -float(np.log2(wt.delta(n)))
        log2_norm = math.log2(wt.normalizer)
        base = model.model
    else:
        log2_inv_delta = log2_norm = 0.0
        base = model
    exact_member = getattr(source, "exact", False) and base == source
    return MixtureBoundReport(n, G, shannon_entropy(dist), ce, -math.log2(weight),
                              log2_inv_delta, log2_norm, member, exact_member)


# -- typical sets ----------------------------------------------------------------------------

TYPICAL_KINDS = ("A", "A_hat", "A_tilde", "B")


@dataclass
class TypicalSet:
    n: int
    eps: float
    kind: str
    members: frozenset


@dataclass
class TypicalSets:
    """Entropy-typical words ``A`` and their split by the ``mu`` threshold ``2**(-n t)``.

    ``A_hat``: heavy words in ``A``; ``A_tilde``: heavy words outside ``A``;
    ``B``: light words.  ``alpha_n = log2 #heavy - n t`` is the measured
    excess over the counting bound; it is ``-inf`` when no word is heavy.
    """

    n: int
    eps: float
    h: float
    threshold_exponent: float
    alphabet_size: int
    masks: dict
    masses: dict = field(default_factory=dict)

    @property
    def counts(self) -> dict:
        return {k: int(m.sum()) for k, m in self.masks.items()}

    @property
    def heavy_count(self) -> int:
        return int((self.masks["A_hat"] | self.masks["A_tilde"]).sum())

    @property
    def alpha_n(self) -> float:
        c = self.heavy_count
        return math.log2(c) - self.n * self.threshold_exponent if c else -math.inf

    @property
    def a_hat_bound(self) -> float:
        """``2**(-n eps + alpha_n + 1)``."""
        return 2.0 ** (-self.n * self.eps + self.alpha_n + 1)

    @property
    def a_hat_bound_holds(self) -> bool:
        return self.masses["A_hat"] <= self.a_hat_bound * (1 + 1e-12)

    @property
    def a_cardinality_bounds(self) -> tuple:
        n, h, e = self.n, self.h, self.eps
        return (1 - e) * 2.0 ** (n * (h - e)), 2.0 ** (n * (h + e))

    def typical_set(self, kind: str) -> TypicalSet:
        if kind not in self.masks:
            raise InvalidInputError(f"unknown typical-set kind {kind!r}")
        rows = all_words(self.n, self.alphabet_size)[self.masks[kind]]
        members = frozenset(SymbolString(tuple(r), self.alphabet_size) for r in rows)
        return TypicalSet(self.n, self.eps, kind, members)


def typical_sets(dist, h: float, eps: float, mu, threshold_exponent: Optional[float] = None,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> TypicalSets:
    """Exact membership of every length-``n`` word; the threshold exponent defaults to ``h - 2 eps``."""
    n, k = dist.n, dist.alphabet_size
    check_enumerable(k, n, cap)
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    t = h - 2 * eps if threshold_exponent is None else float(threshold_exponent)
    with np.errstate(divide="ignore"):
        info = -np.log2(dist.probabilities) / n
    in_a = (info >= h - eps) & (info <= h + eps)
    heavy = mu.block_log2_probabilities(n) >= -n * t
    masks = {"A": in_a, "A_hat": in_a & heavy, "A_tilde": ~in_a & heavy, "B": ~heavy}
    masses = {kname: float(dist.probabilities[m].sum()) for kname, m in masks.items()}
    return TypicalSets(n, eps, h, t, k, masks, masses)


# -- counting bound ----------------------------------------------------------------------------

@dataclass
class CountingBoundReport:
    n: int
    c: float
    count: int
    mass: float

    @property
    def bound(self) -> float:
        return 2.0 ** self.c

    @property
    def passed(self) -> bool:
        return self.count <= self.bound and self.mass <= 1 + BOUND_TOL

    @property
    def tightness(self) -> float:
        return self.count / self.bound


def counting_bound_check(mu, c: float, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> CountingBoundReport:
    """Count words of length ``n`` with ``mu(s) >= 2**-c``; total mass at most one caps it by ``2**c``."""
    check_enumerable(mu.alphabet_size, n, cap)
    lm = mu.block_log2_probabilities(n)
    count = int((lm >= -c).sum())
    mass = float(np.exp2(lm).sum())
    return CountingBoundReport(n, float(c), count, mass)
