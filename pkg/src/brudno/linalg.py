"""Dense Hermitian helpers with a canonical eigenvector order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TIE_TOL = 1e-12


def is_diagonal(m: np.ndarray) -> bool:
    """True when every off-diagonal entry is exactly zero (no copy of ``m`` is made)."""
    n = m.shape[0]
    if n <= 1:
        return True
    if not m.flags.c_contiguous:
        m = np.ascontiguousarray(m)
    # the flat array minus its first entry folds into rows of n+1 whose last slot is diagonal
    return not m.ravel()[1:].reshape(n - 1, n + 1)[:, :n].any()


def hermitian_defect(m: np.ndarray) -> float:
    """Largest entry of ``|M - M^dagger|``."""
    if is_diagonal(m):
        return float(np.abs(np.diag(m).imag).max(initial=0.0))
    return float(np.abs(m - m.conj().T).max())


def as_square(m, name="matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


@dataclass
class Spectrum:
    """Eigenvalues in descending order with their eigenvectors.

    When the source matrix is diagonal ``vectors`` is ``None`` and eigenvector
    ``i`` is the standard basis vector ``e_{basis_index[i]}``.
    """

    values: np.ndarray
    vectors: Optional[np.ndarray] = None
    basis_index: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.values.size

    def columns(self, idx=None) -> np.ndarray:
        """Eigenvectors ``idx`` (all by default) as columns of a dense array."""
        idx = np.arange(self.dim) if idx is None else np.asarray(idx, dtype=np.int64)
        if self.vectors is not None:
            return self.vectors[:, idx]
        out = np.zeros((self.dim, idx.size), dtype=complex)
        out[self.basis_index[idx], np.arange(idx.size)] = 1.0
        return out

    def expand(self, coefficients: np.ndarray, idx) -> np.ndarray:
        """``sum_j c_j v_{idx_j}`` as a dense vector."""
        idx = np.asarray(idx, dtype=np.int64)
        if self.vectors is not None:
            return self.vectors[:, idx] @ coefficients
        out = np.zeros(self.dim, dtype=complex)
        out[self.basis_index[idx]] = coefficients
        return out

    def dense_vectors(self) -> np.ndarray:
        return self.columns()


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    mags = np.abs(vectors)
    first = np.argmax(mags > 1e-10 * mags.max(axis=0, keepdims=True), axis=0)
    lead = vectors[first, np.arange(vectors.shape[1])]
    return vectors * (lead.conj() / np.abs(lead))[None, :]


def _tie_groups(sorted_values: np.ndarray, tol: float):
    start = 0
    for i in range(1, sorted_values.size + 1):
        if i == sorted_values.size or sorted_values[i - 1] - sorted_values[i] > tol:
            yield start, i
            start = i


def canonical_order(values: np.ndarray, vectors: Optional[np.ndarray] = None,
                    basis_index: Optional[np.ndarray] = None, tol: float = TIE_TOL) -> Spectrum:
    """Sort descending; break ties by eigenvector coefficients, lexicographically larger first.

    Vectors get their first non-negligible coefficient made real positive
    before comparison.  Standard basis vector ``e_j`` precedes ``e_k`` for ``j < k``.
    """
    values = np.asarray(values, dtype=float)
    if vectors is None:
        if basis_index is None:
            basis_index = np.arange(values.size)
        basis_index = np.asarray(basis_index)
        order = np.argsort(-values, kind="stable")
        # products of equal factors in different orders can differ in the last ulp
        group = np.concatenate([[0], np.cumsum(-np.diff(values[order]) > tol)])
        order = order[np.lexsort((basis_index[order], group))]
        return Spectrum(values[order], None, basis_index[order])
    order = np.argsort(-values, kind="stable")
    vectors = _fix_phases(vectors)
    sv = values[order]
    for a, b in _tie_groups(sv, tol):
        if b - a < 2:
            continue
        block = vectors[:, order[a:b]]
        keys = np.empty((2 * block.shape[0], b - a))
        keys[0::2] = np.round(block.real, 10)
        keys[1::2] = np.round(block.imag, 10)
        # lexsort's primary key is the last row; negate for descending
        sub = np.lexsort(-keys[::-1])
        order[a:b] = order[a:b][sub]
    return Spectrum(values[order], vectors[:, order], None)


def _real_if_possible(m: np.ndarray) -> np.ndarray:
    # real symmetric solvers are several times faster than complex Hermitian ones
    if np.iscomplexobj(m) and not m.imag.any():
        return m.real
    return m


def canonical_eigh(m: np.ndarray, tol: float = TIE_TOL) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix in canonical order."""
    m = as_square(m)
    if is_diagonal(m):
        return canonical_order(np.diag(m).real.copy(), tol=tol)
    vals, vecs = np.linalg.eigh(_real_if_possible(m))
    return canonical_order(vals, vecs, tol=tol)


def eigenvalues_desc(m: np.ndarray) -> np.ndarray:
    m = as_square(m)
    if is_diagonal(m):
        return np.sort(np.diag(m).real)[::-1]
    return np.linalg.eigvalsh(_real_if_possible(m))[::-1]


def min_eigenvalue(m: np.ndarray) -> float:
    m = as_square(m)
    if is_diagonal(m):
        return float(np.diag(m).real.min())
    return float(np.linalg.eigvalsh(_real_if_possible(m))[0])


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(eigenvalues_desc(m)).sum())


def expectation(m: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """``<psi|M|psi>`` for a vector, or per column of a matrix of vectors."""
    if is_diagonal(m):
        d = np.diag(m).real
        return (np.abs(psi) ** 2 * (d if psi.ndim == 1 else d[:, None])).sum(axis=0)
    return np.einsum("i...,i...->...", psi.conj(), m @ psi).real


def operator_log2(spectrum: Spectrum) -> np.ndarray:
    """``log2`` of a positive definite matrix from its spectrum."""
    v = spectrum.dense_vectors()
    return (v * np.log2(spectrum.values)[None, :]) @ v.conj().T
