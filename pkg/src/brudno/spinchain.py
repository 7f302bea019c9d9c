"""Local marginals of translation-invariant states on a chain of qudits.

A chain state is described by its restrictions ``rho^(n)`` to the first ``n``
sites.  Two families are provided: :class:`IIDProduct`, an ergodic product of
one single-site density matrix, and :class:`MixtureOfProducts`, a convex
combination of products that is shift invariant but not ergodic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidStateError, NearSingularStateWarning, ResourceLimitError
from .linalg import (
    HERMITIAN_TOL, PSD_TOL, Spectrum, as_square, canonical_eigh, canonical_order,
    hermitian_defect, is_diagonal,
)

DEFAULT_SITE_CAP = 12
NEAR_SINGULAR = 1e-6


def _parse_entry(x) -> complex:
    if isinstance(x, str):
        x = x.strip().replace(" ", "")
        if "j" in x:
            return complex(x)
        return float(Fraction(x))
    if isinstance(x, Fraction):
        return float(x)
    return complex(x)


def single_site_matrix(entries) -> np.ndarray:
    """Density matrix from nested entries; strings such as ``"9/10"`` are read as exact rationals."""
    if isinstance(entries, np.ndarray):
        return as_square(entries, "single-site matrix")
    rows = [[_parse_entry(x) for x in row] for row in entries]
    return as_square(np.array(rows, dtype=complex), "single-site matrix")


def _check_density(m: np.ndarray, what: str):
    if hermitian_defect(m) > HERMITIAN_TOL:
        raise InvalidStateError(f"{what} is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > HERMITIAN_TOL:
        raise InvalidStateError(f"{what} has trace {tr.real:.12g}, expected 1")


class LocalDensityMatrix:
    """``rho^(n)`` on ``n`` sites of local dimension ``d``.

    The spectrum is computed lazily in canonical order and cached; the object
    is otherwise immutable.
    """

    def __init__(self, n: int, matrix: np.ndarray, faithful: bool = False,
                 spectrum: Optional[Spectrum] = None, local_dim: int = 2):
        matrix = as_square(matrix)
        if matrix.shape[0] != local_dim ** n:
            raise InvalidInputError(f"matrix of size {matrix.shape[0]} does not match {n} sites")
        _check_density(matrix, f"rho^({n})")
        matrix.setflags(write=False)
        self.n = n
        self.local_dim = local_dim
        self.matrix = matrix
        self.faithful = faithful
        self._spectrum = spectrum

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            spec = canonical_eigh(self.matrix)
            if spec.values[-1] < -PSD_TOL:
                raise InvalidStateError(
                    f"rho^({self.n}) has eigenvalue {spec.values[-1]:.3g} below -{PSD_TOL}")
            self._spectrum = spec
        return self._spectrum

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.values

    @property
    def is_diagonal(self) -> bool:
        return is_diagonal(self.matrix)

    def __repr__(self):
        return f"LocalDensityMatrix(n={self.n}, dim={self.dim})"


def _kron_power(m: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=m.dtype)
    for _ in range(n):
        out = np.kron(out, m)
    return out


def _check_cap(n: int, cap: int):
    if n < 1:
        raise InvalidInputError(f"site count must be >= 1, got {n}")
    if n > cap:
        raise ResourceLimitError(f"{n} sites exceed the cap of {cap}", cap_name="site_cap", cap=cap)


class IIDProduct:
    """The product state ``rho (x) rho (x) ...``; ergodic for the shift."""

    ergodic = True

    def __init__(self, single_site, warn_below: float = NEAR_SINGULAR, near_singular: str = "warn"):
        rho = single_site_matrix(single_site)
        _check_density(rho, "single-site matrix")
        self.single_site = rho
        self.local_dim = rho.shape[0]
        self.site_spectrum = canonical_eigh(rho)
        if self.site_spectrum.values[-1] < -PSD_TOL:
            raise InvalidStateError("single-site matrix is not positive semidefinite")
        smallest = self.site_spectrum.values[-1]
        if near_singular not in ("warn", "reject"):
            raise InvalidInputError(f"near_singular must be 'warn' or 'reject', got {near_singular!r}")
        if 0 < smallest < warn_below and near_singular == "reject":
            raise InvalidStateError(f"single-site eigenvalue {smallest:.3g} is below {warn_below:g}")
        if 0 < smallest < warn_below:
            warnings.warn(f"single-site eigenvalue {smallest:.3g} is below {warn_below:g}",
                          NearSingularStateWarning, stacklevel=2)

    @property
    def faithful(self) -> bool:
        return bool(self.site_spectrum.values[-1] > 0)

    def entropy_rate(self) -> float:
        return _entropy_from_values(self.site_spectrum.values)

    def product_spectrum(self, n: int) -> Spectrum:
        """Spectrum of ``rho^(n)`` built from the single-site one, canonically ordered."""
        vals = _kron_power(self.site_spectrum.values, n).ravel()
        if self.site_spectrum.vectors is None:
            d = self.local_dim
            base = self.site_spectrum.basis_index
            idx = np.zeros(1, dtype=np.int64)
            for _ in range(n):
                idx = (idx[:, None] * d + base[None, :]).ravel()
            return canonical_order(vals, basis_index=idx)
        vecs = _kron_power(self.site_spectrum.vectors, n)
        return canonical_order(vals, vecs)

    def marginal(self, n: int) -> np.ndarray:
        return _kron_power(self.single_site, n)

    def __repr__(self):
        return f"IIDProduct({np.round(self.single_site, 6).tolist()})"


class MixtureOfProducts:
    """``sum_k w_k rho_k^(x)n``: shift invariant, not ergodic unless all components agree."""

    def __init__(self, components: Sequence, weights: Sequence[float]):
        if len(components) != len(weights) or not components:
            raise InvalidInputError("components and weights must be non-empty and equally long")
        w = np.asarray(weights, dtype=float)
        if (w <= 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInputError("mixture weights must be positive and sum to 1")
        self.components = [c if isinstance(c, IIDProduct) else IIDProduct(c) for c in components]
        dims = {c.local_dim for c in self.components}
        if len(dims) != 1:
            raise InvalidInputError("components must share the local dimension")
        self.local_dim = dims.pop()
        self.weights = w

    @property
    def ergodic(self) -> bool:
        first = self.components[0].single_site
        return all(np.allclose(c.single_site, first, atol=1e-14) for c in self.components[1:])

    @property
    def faithful(self) -> bool:
        return any(c.faithful for c in self.components)

    def marginal(self, n: int) -> np.ndarray:
        return sum(w * c.marginal(n) for c, w in zip(self.components, self.weights))

    def __repr__(self):
        return f"MixtureOfProducts({len(self.components)} components)"


ChainState = (IIDProduct, MixtureOfProducts)


def local_density(state, n: int, cap: int = DEFAULT_SITE_CAP, product_spectrum: bool = False) -> LocalDensityMatrix:
    """``rho^(n)`` as a dense matrix on sites ``0..n-1``.

    With ``product_spectrum`` an :class:`IIDProduct` gets its spectrum from the
    single-site decomposition instead of a dense eigensolve.
    """
    _check_cap(n, cap)
    spec = None
    if product_spectrum and isinstance(state, IIDProduct):
        spec = state.product_spectrum(n)
    return LocalDensityMatrix(n, state.marginal(n), state.faithful, spec, state.local_dim)


def partial_trace(rho, end: str = "last") -> LocalDensityMatrix:
    """Trace out the first or last site."""
    if end not in ("first", "last"):
        raise InvalidInputError(f"end must be 'first' or 'last', got {end!r}")
    m = rho.matrix if isinstance(rho, LocalDensityMatrix) else as_square(rho)
    d = rho.local_dim if isinstance(rho, LocalDensityMatrix) else 2
    n = round(math.log(m.shape[0], d))
    if n < 1 or d ** n != m.shape[0]:
        raise InvalidInputError("matrix size is not a power of the local dimension")
    rest = d ** (n - 1)
    if end == "last":
        out = np.einsum("iaja->ij", m.reshape(rest, d, rest, d))
    else:
        out = np.einsum("aiaj->ij", m.reshape(d, rest, d, rest))
    faithful = rho.faithful if isinstance(rho, LocalDensityMatrix) else False
    return LocalDensityMatrix(n - 1, out, faithful, None, d)


def _entropy_from_values(values: np.ndarray) -> float:
    if values.min(initial=0.0) < -PSD_TOL:
        raise InvalidStateError(f"negative eigenvalue {values.min():.3g}")
    p = values[values > 0]
    return float(max(-(p * np.log2(p)).sum(), 0.0))


def von_neumann_entropy(rho) -> float:
    """``-Tr rho log2 rho`` from the eigenvalues, with ``0 log 0 = 0``."""
    if isinstance(rho, LocalDensityMatrix):
        return _entropy_from_values(rho.eigenvalues)
    return _entropy_from_values(canonical_eigh(as_square(rho)).values)


@dataclass
class EntropyRateReport:
    per_n: list
    rate: float
    additive: Optional[bool] = None

    @property
    def entropies(self) -> dict:
        return {n: s for n, s, _ in self.per_n}


def entropy_rate(state, n_max: int, cap: int = DEFAULT_SITE_CAP) -> EntropyRateReport:
    """``S(rho^(n)) / n`` for ``n = 1..n_max``; the rate is the last value.

    For products ``additive`` records whether ``S(rho^(n)) = n S(rho^(1))`` to 1e-9.
    """
    _check_cap(n_max, cap)
    per_n = []
    for n in range(1, n_max + 1):
        if isinstance(state, IIDProduct):
            s = _entropy_from_values(state.product_spectrum(n).values)
        else:
            s = von_neumann_entropy(local_density(state, n, cap))
        per_n.append((n, s, s / n))
    additive = None
    if isinstance(state, IIDProduct):
        s1 = per_n[0][1]
        additive = all(abs(s - n * s1) <= 1e-9 for n, s, _ in per_n)
    return EntropyRateReport(per_n, per_n[-1][2], additive)


# -- spectral classes of product states --------------------------------------------

@dataclass
class SpectralClass:
    """Eigenvalues of a product spectrum sharing one type (count of each single-site level)."""

    counts: tuple
    log2_value: float
    multiplicity: int


def product_spectrum_classes(single_values: Sequence[float], n: int) -> list:
    """Classes of ``rho^(x)n`` eigenvalues, largest value first.

    Feasible far beyond dense sizes: the class count grows polynomially in ``n``.
    """
    vals = np.asarray(single_values, dtype=float)
    if (vals <= 0).any():
        raise InvalidStateError("spectral classes need a faithful single-site spectrum")
    logs = np.log2(vals)
    d = vals.size
    out = []
    for combo in combinations_with_replacement(range(d), n):
        counts = tuple(combo.count(j) for j in range(d))
        mult = math.factorial(n)
        for c in counts:
            mult //= math.factorial(c)
        out.append(SpectralClass(counts, float(np.dot(counts, logs)), mult))
    out.sort(key=lambda c: -c.log2_value)
    return out
