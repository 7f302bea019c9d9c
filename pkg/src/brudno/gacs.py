"""Semi-density matrices, the quasi-order, and quantum Gacs complexities.

The universal semi-density matrix is uncomputable, so :func:`universal_mixture`
builds a surrogate ``mu^(n) = sum_k w_k rho_k^(n)`` from a declared family of
chain states.  A tracial member keeps it full rank.  The surrogate dominates
every member up to its weight, and that domination is all the complexity
bounds downstream rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidFamilyError, InvalidInputError, InvalidSequenceError
from .linalg import (
    HERMITIAN_TOL, PSD_TOL, Spectrum, as_square, canonical_eigh, expectation,
    hermitian_defect, min_eigenvalue, trace_norm,
)
from .spinchain import DEFAULT_SITE_CAP, IIDProduct, LocalDensityMatrix, local_density

DOMINANCE_CHECK_MAX_N = 10


def _matrix(x) -> np.ndarray:
    if isinstance(x, (LocalDensityMatrix, SemiDensityMatrix)):
        return x.matrix
    if isinstance(x, UniversalSemiDensity):
        return x.matrix
    return as_square(x)


def _spectrum(x) -> Spectrum:
    if isinstance(x, (LocalDensityMatrix, SemiDensityMatrix, UniversalSemiDensity)):
        return x.spectrum
    return canonical_eigh(as_square(x))


def _sites(dim: int, d: int = 2) -> int:
    n = round(math.log(dim, d)) if dim > 1 else 0
    if d ** n != dim:
        raise InvalidInputError(f"dimension {dim} is not a power of {d}")
    return n


class SemiDensityMatrix:
    """Positive matrix with trace in ``[0, 1]``.

    ``elementary`` is set when the entries were given as exact rationals
    (ints, :class:`~fractions.Fraction`, or strings like ``"3/10"``).
    """

    def __init__(self, matrix, n: Optional[int] = None, elementary: bool = False, local_dim: int = 2):
        m = as_square(matrix)
        if hermitian_defect(m) > HERMITIAN_TOL:
            raise InvalidInputError("semi-density matrix must be Hermitian")
        tr = float(np.trace(m).real)
        if tr < -PSD_TOL or tr > 1 + PSD_TOL:
            raise InvalidInputError(f"trace {tr:.12g} outside [0, 1]")
        self.matrix = m
        self.local_dim = local_dim
        self.n = _sites(m.shape[0], local_dim) if n is None else n
        self.elementary = elementary
        self._spectrum = None
        if self.spectrum.values[-1] < -PSD_TOL:
            raise InvalidInputError(f"semi-density matrix has eigenvalue {self.spectrum.values[-1]:.3g}")

    @classmethod
    def from_rationals(cls, entries, local_dim: int = 2) -> "SemiDensityMatrix":
        def conv(x):
            if isinstance(x, tuple):
                re, im = x
                return float(Fraction(re)) + 1j * float(Fraction(im))
            return float(Fraction(x))

        m = np.array([[conv(x) for x in row] for row in entries], dtype=complex)
        return cls(m, elementary=True, local_dim=local_dim)

    @property
    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            self._spectrum = canonical_eigh(self.matrix)
        return self._spectrum

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __repr__(self):
        return f"SemiDensityMatrix(n={self.n}, trace={self.trace:.6g})"


def as_semi_density(x) -> SemiDensityMatrix:
    if isinstance(x, SemiDensityMatrix):
        return x
    if isinstance(x, LocalDensityMatrix):
        return SemiDensityMatrix(x.matrix, x.n, local_dim=x.local_dim)
    return SemiDensityMatrix(x)


# -- quasi-order ----------------------------------------------------------------------------

def _embedded_indices(n_small: int, n_large: int, d: int = 2) -> np.ndarray:
    """Basis indices of ``H_{n_small} (x) |0...0>`` inside ``H_{n_large}``."""
    return np.arange(d ** n_small) * d ** (n_large - n_small)


def compress(t, n_small: int, d: int = 2) -> np.ndarray:
    """``P T P`` restricted to the first ``n_small`` sites with the rest in ``|0>``."""
    m = _matrix(t)
    idx = _embedded_indices(n_small, _sites(m.shape[0], d), d)
    return m[np.ix_(idx, idx)]


def embed(t, n_large: int, d: int = 2) -> np.ndarray:
    """``T (x) |0...0><0...0|`` on ``n_large`` sites."""
    m = _matrix(t)
    idx = _embedded_indices(_sites(m.shape[0], d), n_large, d)
    out = np.zeros((d ** n_large, d ** n_large), dtype=complex)
    out[np.ix_(idx, idx)] = m
    return out


def quasi_greater(t1, t2, tol: float = PSD_TOL, local_dim: int = 2) -> bool:
    """True when ``t2`` is quasi-greater than ``t1``: ``P t2 P - t1 >= 0`` on ``t1``'s sites."""
    m1, m2 = _matrix(t1), _matrix(t2)
    n1, n2 = _sites(m1.shape[0], local_dim), _sites(m2.shape[0], local_dim)
    if n1 > n2:
        raise InvalidInputError(f"quasi-order compares {n1} sites against {n2}; need n1 <= n2")
    diff = compress(m2, n1, local_dim) - m1
    return min_eigenvalue(diff) >= -tol


class QuasiIncreasingSequence:
    """Semi-density matrices on non-decreasing site counts, each quasi-greater than the last."""

    def __init__(self, members: Sequence, tol: float = PSD_TOL):
        members = [as_semi_density(m) for m in members]
        if not members:
            raise InvalidSequenceError("a quasi-increasing sequence needs at least one member")
        for j, (a, b) in enumerate(zip(members, members[1:])):
            if a.n > b.n:
                raise InvalidSequenceError(f"site counts decrease at position {j + 1}")
            if b.trace < a.trace - tol:
                raise InvalidSequenceError(f"trace decreases at position {j + 1}")
            if not quasi_greater(a, b, tol, a.local_dim):
                raise InvalidSequenceError(f"member {j + 1} is not quasi-greater than member {j}")
        self.members = members
        self.tol = tol

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]


@dataclass
class QuasiLimit:
    """Last member of the sequence and the trace-norm gaps ``||T_j - T_{j-1}||_1`` (``j >= 1``)."""

    limit: SemiDensityMatrix
    gaps: list
    traces: list

    @property
    def trace_monotone(self) -> bool:
        return all(b >= a - PSD_TOL for a, b in zip(self.traces, self.traces[1:]))


def limit_of_quasi_increasing(seq) -> QuasiLimit:
    """Cauchy diagnostics for a quasi-increasing sequence; smaller members are embedded before comparing."""
    if not isinstance(seq, QuasiIncreasingSequence):
        seq = QuasiIncreasingSequence(seq)
    traces = [m.trace for m in seq.members]
    if any(t > 1 + PSD_TOL for t in traces):
        raise InvalidSequenceError("a member has trace above 1")
    gaps = []
    for a, b in zip(seq.members, seq.members[1:]):
        gaps.append(trace_norm(b.matrix - embed(a, b.n, a.local_dim)))
    return QuasiLimit(seq.members[-1], gaps, traces)


# -- universal surrogate -------------------------------------------------------------------

def tracial_state(local_dim: int = 2) -> IIDProduct:
    """The chain state with ``rho^(n) = I / d**n``."""
    return IIDProduct(np.eye(local_dim) / local_dim)


@dataclass
class UniversalSemiDensity:
    """``mu^(n) = sum_k w_k rho_k^(n)`` realized at one ``n`` and spectrally decomposed."""

    n: int
    members: list
    matrix: np.ndarray
    spectrum: Spectrum
    dominance: Optional[list] = None

    @property
    def weights(self) -> list:
        return [w for _, w in self.members]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.values

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def member_marginal(self, k: int) -> np.ndarray:
        return self.members[k][0].marginal(self.n)


def _validate_family(family):
    members = [(s, float(w)) for s, w in family]
    if not members:
        raise InvalidFamilyError("the family is empty")
    if any(not w > 0 for _, w in members):
        raise InvalidFamilyError("family weights must be positive")
    total = sum(w for _, w in members)
    if total > 1 + 1e-12:
        raise InvalidFamilyError(f"family weights sum to {total:.12g} > 1")
    return members


def universal_mixture(family, n: int, cap: int = DEFAULT_SITE_CAP,
                      verify_dominance: Optional[bool] = None) -> UniversalSemiDensity:
    """Realize the surrogate at ``n`` sites.

    ``family`` is a list of ``(chain state, weight)``.  Raises
    :class:`InvalidFamilyError` unless the result is full rank.  Dominance
    ``w_k rho_k <= mu`` is verified by eigenvalues for ``n <= 10`` unless
    ``verify_dominance`` says otherwise.
    """
    members = _validate_family(family)
    mats = [(local_density(s, n, cap).matrix, w) for s, w in members]
    mu = sum(w * m for m, w in mats)
    spec = canonical_eigh(mu)
    if not spec.values[-1] > 0:
        raise InvalidFamilyError(
            f"mu^({n}) is rank deficient (smallest eigenvalue {spec.values[-1]:.3g}); add a full-rank member")
    if verify_dominance is None:
        verify_dominance = n <= DOMINANCE_CHECK_MAX_N
    dominance = None
    if verify_dominance:
        dominance = [min_eigenvalue(mu - w * m) for m, w in mats]
        worst = min(dominance)
        if worst < -PSD_TOL:
            raise InvalidFamilyError(f"dominance fails at n={n}: min eigenvalue {worst:.3g}")
    return UniversalSemiDensity(n, members, mu, spec, dominance)


# -- complexities -------------------------------------------------------------------------

@dataclass
class GacsComplexities:
    upper: float
    lower: float

    @property
    def ordered(self) -> bool:
        return self.upper >= self.lower - 1e-12


def _positive_spectrum(mu) -> Spectrum:
    spec = _spectrum(mu)
    if not spec.values[-1] > 0:
        raise InvalidFamilyError("mu is singular; Gacs complexities need a full-rank semi-density")
    return spec


def gacs_upper(rho, mu) -> float:
    """``-Tr(rho log2 mu)`` evaluated in mu's eigenbasis."""
    spec = _positive_spectrum(mu)
    m = _matrix(rho)
    if spec.vectors is None:
        weights = np.diag(m).real[spec.basis_index]
    else:
        weights = expectation(m, spec.vectors)
    return float(-(weights * np.log2(spec.values)).sum())


def gacs_lower(rho, mu) -> float:
    """``-log2 Tr(rho mu)``."""
    a, b = _matrix(rho), _matrix(mu)
    overlap = float(np.einsum("ij,ji->", a, b).real)
    if overlap <= 0:
        raise InvalidFamilyError("Tr(rho mu) = 0: mu is not full rank on the support of rho")
    return -math.log2(overlap)


def gacs_complexities(rho, mu) -> GacsComplexities:
    return GacsComplexities(gacs_upper(rho, mu), gacs_lower(rho, mu))


def member_bound(mu: UniversalSemiDensity, k: int) -> tuple:
    """``(H_upper(rho_k), S(rho_k) + log2(1/w_k))`` for member ``k``."""
    from .spinchain import von_neumann_entropy

    state, w = mu.members[k]
    rho = local_density(state, mu.n)
    return gacs_upper(rho, mu), von_neumann_entropy(rho) - math.log2(w)


# -- spectral transport --------------------------------------------------------------------

def spectral_transport_unitary(rho, mu, tol: float = 1e-10) -> np.ndarray:
    """``U = sum_i |r_i><mu_i|``, pairing the sorted eigenvectors of ``rho`` and ``mu``."""
    sr, sm = _spectrum(rho), _spectrum(mu)
    if sr.dim != sm.dim:
        raise InvalidInputError("rho and mu act on different spaces")
    if not (sr.values[-1] > 0 and sm.values[-1] > 0):
        raise InvalidInputError("spectral transport needs full-rank rho and mu")
    u = sr.dense_vectors() @ sm.dense_vectors().conj().T
    defect = float(np.abs(u.conj().T @ u - np.eye(sr.dim)).max())
    if defect > tol:
        raise InvalidInputError(f"transport is not unitary (defect {defect:.3g})")
    return u


@dataclass
class TransportRow:
    n: int
    direct: float
    transported: float

    @property
    def gap(self) -> float:
        return self.transported - self.direct


@dataclass
class TransportReport:
    rows: list

    @property
    def gaps(self) -> list:
        return [abs(r.gap) for r in self.rows]

    @property
    def non_increasing(self) -> bool:
        g = self.gaps
        return all(b <= a + 1e-12 for a, b in zip(g, g[1:]))


def _at(x, n):
    if callable(x):
        return x(n)
    if isinstance(x, Mapping):
        return x[n]
    return x


def transported_trace_compare(sigma, mu, unitary, n_grid: Sequence[int]) -> TransportReport:
    """``(1/n) log2 Tr(sigma mu)`` against ``(1/n) log2 Tr(sigma U mu U^dagger)`` per ``n``.

    Each argument is a callable of ``n``, a mapping keyed by ``n``, or a fixed
    value; ``unitary=None`` means the identity.
    """
    rows = []
    for n in sorted(n_grid):
        s, m = _matrix(_at(sigma, n)), _matrix(_at(mu, n))
        u = _at(unitary, n)
        moved = m if u is None else u @ m @ u.conj().T
        direct = math.log2(float(np.einsum("ij,ji->", s, m).real)) / n
        transported = math.log2(float(np.einsum("ij,ji->", s, moved).real)) / n
        rows.append(TransportRow(n, direct, transported))
    return TransportReport(rows)


def eta_sequence(state, m_max: int, weighting=None) -> QuasiIncreasingSequence:
    """``eta_m = sum_{n <= m} weight(n) rho^(n) (x) |0><0|^(m-n)`` for ``m = 1..m_max``.

    Compressing ``eta_{m+1}`` back to ``m`` sites returns ``eta_m`` plus a
    positive term, so the sequence is quasi-increasing with traces below one.
    """
    from .semimeasure import LengthWeighting

    weighting = weighting or LengthWeighting()
    d = state.local_dim
    members = []
    current = None
    for m in range(1, m_max + 1):
        term = float(2.0 ** weighting.log2_weight(m)) * state.marginal(m)
        current = term if current is None else embed(current, m, d) + term
        members.append(SemiDensityMatrix(current, m, local_dim=d))
    return QuasiIncreasingSequence(members)
