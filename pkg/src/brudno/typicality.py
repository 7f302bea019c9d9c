"""Typical subspaces of chain states and their Gacs complexities.

For ``rho^(n)`` with sorted eigenvalues ``r_i`` and the surrogate ``mu^(n)``
with sorted eigenvalues ``mu_i``, the index sets are

* ``A``: ``2**(-n(s+eps)) <= r_i <= 2**(-n(s-eps))``
* ``B``: ``mu_i < 2**(-n(s-2 eps))``

and ``p = sum_{i in A and B} |r_i><r_i|``.  Four claims are checked at finite
``n``: ``p`` carries most of the state (item 1), its rank is about
``2**(n s)`` (item 2), every minimal projection under ``p`` has probability
near ``2**(-n s)`` (item 3), and its complexity rate
``-(1/n) log2 Tr(mu p)`` lies near ``s`` (item 4).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import (
    DegenerateTypicalityError, DegenerateTypicalityWarning, InvalidInputError, InvalidStateError,
)
from .gacs import UniversalSemiDensity, universal_mixture
from .linalg import Spectrum, expectation
from .spinchain import (
    DEFAULT_SITE_CAP, IIDProduct, LocalDensityMatrix, local_density,
)

#: relative slack for comparing sampled probabilities with exact eigenvalue bounds
REL_TOL = 1e-9


@dataclass
class TypicalIndexSets:
    n: int
    eps: float
    s: float
    A: np.ndarray
    B: np.ndarray

    @property
    def intersection(self) -> np.ndarray:
        return np.flatnonzero(self.A & self.B)

    @property
    def b_complement_size(self) -> int:
        return int((~self.B).sum())

    @property
    def vacuous(self) -> bool:
        """No index lies outside ``B``, so ``alpha_n`` is ``-inf``."""
        return self.b_complement_size == 0

    @property
    def alpha_n(self) -> float:
        c = self.b_complement_size
        return math.log2(c) - self.n * (self.s - 2 * self.eps) if c else -math.inf

    @property
    def alpha_over_n(self) -> float:
        return self.alpha_n / self.n


def typical_index_sets(r: np.ndarray, mu: np.ndarray, s: float, eps: float) -> TypicalIndexSets:
    """Membership of each sorted index in ``A`` (from ``r``) and ``B`` (from ``mu``)."""
    r, mu = np.asarray(r, dtype=float), np.asarray(mu, dtype=float)
    if r.shape != mu.shape:
        raise InvalidInputError("spectra of rho and mu must have the same length")
    if eps <= 0 or s < 0:
        raise InvalidInputError("need eps > 0 and s >= 0")
    n = round(math.log2(r.size))
    lo, hi = 2.0 ** (-n * (s + eps)), 2.0 ** (-n * (s - eps))
    a = (r >= lo) & (r <= hi)
    b = mu < 2.0 ** (-n * (s - 2 * eps))
    return TypicalIndexSets(n, eps, s, a, b)


@dataclass
class TypicalProjector:
    """``p = sum_{i in idx} |r_i><r_i|`` over the canonical eigenvectors of ``rho``."""

    n: int
    eps: float
    indices: np.ndarray
    spectrum: Spectrum

    @property
    def dim(self) -> int:
        return int(self.indices.size)

    def basis(self) -> np.ndarray:
        return self.spectrum.columns(self.indices)

    def matrix(self) -> np.ndarray:
        v = self.basis()
        return v @ v.conj().T


def typical_projector(rho: LocalDensityMatrix, sets: TypicalIndexSets) -> TypicalProjector:
    idx = sets.intersection
    if idx.size == 0:
        warnings.warn(f"empty typical subspace at n={sets.n}, eps={sets.eps}",
                      DegenerateTypicalityWarning, stacklevel=2)
    return TypicalProjector(sets.n, sets.eps, idx, rho.spectrum)


@dataclass
class MinimalProjection:
    """``|psi> = sum_j c_j |r_{indices_j}>`` with ``sum |c_j|**2 = 1``."""

    coefficients: np.ndarray
    indices: np.ndarray
    spectrum: Spectrum

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def vector(self) -> np.ndarray:
        return self.spectrum.expand(self.coefficients, self.indices)


def sample_minimal_projection(p: TypicalProjector, seed=None) -> MinimalProjection:
    """Haar-random unit vector in the range of ``p``."""
    if p.dim == 0:
        raise DegenerateTypicalityError(f"typical subspace at n={p.n}, eps={p.eps} is empty")
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(p.dim) + 1j * rng.standard_normal(p.dim)
    return MinimalProjection(c / np.linalg.norm(c), p.indices, p.spectrum)


def extreme_minimal_projections(p: TypicalProjector) -> list:
    """Eigenvectors at the largest and smallest typical eigenvalue."""
    if p.dim == 0:
        return []
    picks = sorted({0, p.dim - 1})
    return [MinimalProjection(np.ones(1, dtype=complex), p.indices[[j]], p.spectrum) for j in picks]


# -- items 1 to 4 ----------------------------------------------------------------------------

@dataclass
class Item1:
    value: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.value >= self.bound


@dataclass
class Item2:
    dim: int
    lower_statement: float
    lower_proof: float
    upper: float

    @property
    def passed(self) -> bool:
        return self.lower_statement < self.dim < self.upper

    @property
    def passed_proof_form(self) -> bool:
        return self.lower_proof < self.dim < self.upper


@dataclass
class Item3:
    values: np.ndarray
    lower: float
    upper: float

    @property
    def passed(self) -> bool:
        v = self.values
        return bool(v.size) and bool(((v >= self.lower * (1 - REL_TOL)) & (v <= self.upper * (1 + REL_TOL))).all())


@dataclass
class BrudnoQuantumReport:
    n: int
    eps: float
    s: float
    sets: TypicalIndexSets
    item1: Item1
    item2: Item2
    item3: Item3
    mu_overlaps: np.ndarray
    state_weight: float

    @property
    def alpha_n(self) -> float:
        return self.sets.alpha_n

    @property
    def item4_values(self) -> np.ndarray:
        """``-(1/n) log2 <psi|mu|psi>`` per minimal projection."""
        return -np.log2(self.mu_overlaps) / self.n


def _family_weight(family, state) -> float:
    for member, w in family:
        if member is state:
            return float(w)
    raise InvalidInputError("the family must contain the state under test")


def verify_items_1_2_3(state, family, n: int, eps: float, samples: int = 200, seed=0,
                       s: Optional[float] = None, cap: int = DEFAULT_SITE_CAP,
                       mu: Optional[UniversalSemiDensity] = None) -> BrudnoQuantumReport:
    """Items 1 to 3 at ``(n, eps)``, with ``<psi|mu|psi>`` recorded for item 4.

    Minimal projections are ``samples`` Haar vectors plus the two extreme
    eigenvectors of the typical subspace.  ``s`` defaults to the closed-form
    entropy rate of ``state``.
    """
    if not state.faithful:
        raise InvalidStateError("the theorem needs a faithful state")
    weight = _family_weight(family, state)
    if s is None:
        s = state.entropy_rate()
    rho = local_density(state, n, cap)
    mu = mu if mu is not None else universal_mixture(family, n, cap)
    sets = typical_index_sets(rho.eigenvalues, mu.eigenvalues, s, eps)
    p = typical_projector(rho, sets)
    r = rho.eigenvalues
    slack = 2.0 ** (-n * eps + sets.alpha_n)
    item1 = Item1(float(r[p.indices].sum()), 1 - eps - slack)
    item2 = Item2(p.dim, (1 - eps - slack) * 2.0 ** (n * (s - eps)),
                  (1 - eps) * 2.0 ** (n * (s - eps)), 2.0 ** (n * (s + eps)))
    if p.dim:
        seeds = np.random.SeedSequence(seed).generate_state(samples)
        projections = [sample_minimal_projection(p, int(k)) for k in seeds]
        projections += extreme_minimal_projections(p)
        psi = np.stack([m.vector() for m in projections], axis=1)
        omega = expectation(rho.matrix, psi)
        overlaps = expectation(mu.matrix, psi)
    else:
        omega = overlaps = np.zeros(0)
    item3 = Item3(omega, 2.0 ** (-n * (s + eps)), 2.0 ** (-n * (s - eps)))
    return BrudnoQuantumReport(n, eps, s, sets, item1, item2, item3, overlaps, weight)


@dataclass
class Item4Row:
    n: int
    values: np.ndarray
    lower: float
    upper: float
    slack: float

    @property
    def passed(self) -> bool:
        v = self.values
        return bool(v.size) and bool(((v >= self.lower) & (v <= self.upper)).all())


@dataclass
class Item4Curve:
    eps: float
    s: float
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def slacks(self) -> list:
        return [r.slack for r in self.rows]

    @property
    def slack_decreasing(self) -> bool:
        sl = self.slacks
        return all(b <= a for a, b in zip(sl, sl[1:]))


def item4_slack(alpha_n: float, weight: float, n: int) -> float:
    """``(max(alpha_n, 0) + log2(1/w)) / n``; a vacuous or negative ``alpha_n`` adds nothing."""
    return (max(alpha_n, 0.0) + math.log2(1.0 / weight)) / n


def verify_item_4(reports: Sequence[BrudnoQuantumReport]) -> Item4Curve:
    """Band ``[s - 2 eps - slack_n, s + eps + slack_n]`` for every minimal projection, per ``n``."""
    if not reports:
        raise InvalidInputError("no reports given")
    eps, s = reports[0].eps, reports[0].s
    if any(r.eps != eps or r.s != s for r in reports):
        raise InvalidInputError("item 4 curves need a common eps and s")
    rows = []
    for rep in sorted(reports, key=lambda r: r.n):
        slack = item4_slack(rep.alpha_n, rep.state_weight, rep.n)
        rows.append(Item4Row(rep.n, rep.item4_values, s - 2 * eps - slack, s + eps + slack, slack))
    return Item4Curve(eps, s, rows)


# -- large n through spectral classes --------------------------------------------------------

@dataclass
class ClassItems:
    """Items 1 and 2 for diagonal product states, computed class by class."""

    n: int
    eps: float
    s: float
    item1: Item1
    item2: Item2
    alpha_n: float


def _diagonal_binary_levels(state) -> np.ndarray:
    if not isinstance(state, IIDProduct) or state.local_dim != 2 or state.site_spectrum.vectors is not None:
        raise InvalidInputError("class-wise verification needs diagonal single-qubit product states")
    return np.diag(state.single_site).real.copy()


def class_items_1_2(state, family, n: int, eps: float, s: Optional[float] = None) -> ClassItems:
    """Items 1 and 2 without dense matrices, valid far beyond the dense cap.

    Every family member must be a diagonal qubit product, so all matrices
    are diagonal and an eigenvalue depends only on the number of ones in
    its basis word.
    """
    levels = _diagonal_binary_levels(state)
    if s is None:
        s = state.entropy_rate()
    logw = []
    member_levels = []
    for m, w in family:
        member_levels.append(np.log2(_diagonal_binary_levels(m)))
        logw.append(math.log2(w))
    k = np.arange(n + 1)
    mult = np.round(np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))
    with np.errstate(divide="ignore"):
        lr = (n - k) * np.log2(levels[0]) + k * np.log2(levels[1])
    lmu = np.logaddexp2.reduce([lw + (n - k) * ll[0] + k * ll[1]
                                for lw, ll in zip(logw, member_levels)], axis=0)
    # positions in the sorted rho spectrum occupied by each class
    r_order = np.argsort(-lr, kind="stable")
    start = np.empty(n + 1)
    start[r_order] = np.concatenate([[0], np.cumsum(mult[r_order])[:-1]])
    in_a = (lr >= -n * (s + eps)) & (lr <= -n * (s - eps))
    b_comp = float(mult[lmu >= -n * (s - 2 * eps)].sum())
    # A and B^c are each contiguous in sorted position; B^c is a prefix
    covered = np.clip(start + mult - np.maximum(start, b_comp), 0, mult)
    covered = np.where(in_a, covered, 0.0)
    mass = float((covered * np.exp2(lr)).sum())
    dim = float(covered.sum())
    alpha = math.log2(b_comp) - n * (s - 2 * eps) if b_comp else -math.inf
    slack = 2.0 ** (-n * eps + alpha)
    item1 = Item1(mass, 1 - eps - slack)
    item2 = Item2(int(round(dim)), (1 - eps - slack) * 2.0 ** (n * (s - eps)),
                  (1 - eps) * 2.0 ** (n * (s - eps)), 2.0 ** (n * (s + eps)))
    return ClassItems(n, eps, s, item1, item2, alpha)


def first_passing_n(state, family, eps: float, n_max: int = 1000) -> Optional[int]:
    """Smallest ``n`` from which items 1 and 2 hold at every later ``n <= n_max``."""
    last_fail = None
    for n in range(1, n_max + 1):
        rep = class_items_1_2(state, family, n, eps)
        if not (rep.item1.passed and rep.item2.passed):
            last_fail = n
    if last_fail == n_max:
        return None
    return 1 if last_fail is None else last_fail + 1
