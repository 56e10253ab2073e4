"""Dense complex matrix kernels: adjoint, operator norm, Hermitian calculus, pseudoinverse."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FunctionDomainError, NotHermitianError

EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Tolerances:
    """Numerical gates used throughout the package.

    ``check`` bounds identity residuals, ``psd`` is the allowed slack on
    negative eigenvalues, and ``rank`` is the relative singular/eigenvalue
    cutoff factor (``None`` means ``dim * machine epsilon``).
    """

    check: float = 1e-10
    psd: float = 1e-10
    rank: float | None = None

    def __post_init__(self):
        if self.check <= 0.0 or self.psd <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.rank is not None and self.rank <= 0.0:
            raise ValueError("rank cutoff factor must be positive")

    def rank_factor(self, dim: int) -> float:
        return self.rank if self.rank is not None else dim * EPS


DEFAULT_TOL = Tolerances()


def as_matrix(data) -> np.ndarray:
    """Coerce input to a square complex matrix with finite entries."""
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value (the C*-norm)."""
    return float(np.linalg.norm(m, 2))


def hermitian_gap(m: np.ndarray) -> float:
    """How far the matrix is from being Hermitian, ||M - M*||."""
    return operator_norm(m - adjoint(m))


def require_hermitian(m: np.ndarray, tol: Tolerances | None = None) -> np.ndarray:
    """Return the symmetrized matrix, rejecting visibly non-Hermitian input."""
    tol = tol or DEFAULT_TOL
    gap = hermitian_gap(m)
    if gap > tol.check * (1.0 + operator_norm(m)):
        raise NotHermitianError(f"asymmetry {gap:.3e} exceeds tolerance")
    return (m + adjoint(m)) / 2.0


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition U diag(w) U* with real ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eigen(m: np.ndarray, tol: Tolerances | None = None) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix (symmetrized before factoring)."""
    w, v = np.linalg.eigh(require_hermitian(m, tol))
    return HermitianEigen(w, v)


def matrix_function(
    m: np.ndarray,
    f: Callable[[float], float],
    tol: Tolerances | None = None,
) -> np.ndarray:
    """Apply a real scalar map to a Hermitian matrix through its spectrum.

    Eigenvalues in [-tol.psd, 0) are clamped to zero first, so maps such as
    sqrt stay defined on positive semidefinite input jittered by round-off.
    """
    tol = tol or DEFAULT_TOL
    eig = hermitian_eigen(m, tol)
    lam = eig.eigenvalues.copy()
    lam[(lam >= -tol.psd) & (lam < 0.0)] = 0.0
    with np.errstate(all="ignore"):
        vals = np.array([float(f(x)) for x in lam])
    if not np.isfinite(vals).all():
        bad = lam[~np.isfinite(vals)][0]
        raise FunctionDomainError(f"map undefined at eigenvalue {bad:.6e}")
    v = eig.eigenvectors
    return (v * vals) @ adjoint(v)


def psd_power(m: np.ndarray, power: float, tol: Tolerances | None = None) -> np.ndarray:
    """Fractional power of a PSD matrix with the relative rank cutoff applied.

    Eigenvalues at or below ``rank_factor * max|eig|`` are treated as exact
    zeros; fractional powers amplify round-off jitter near zero violently, so
    the cutoff is not optional here.
    """
    tol = tol or DEFAULT_TOL
    cutoff = tol.rank_factor(m.shape[0]) * operator_norm(m)
    return matrix_function(m, lambda x: 0.0 if x <= cutoff else x**power, tol)


def abs_value(m: np.ndarray) -> np.ndarray:
    """Operator absolute value (M*M)^(1/2).

    Computed from the SVD of M itself rather than an eigendecomposition of
    M*M, which would square the condition number.
    """
    _, s, vh = np.linalg.svd(m)
    return (vh.conj().T * s) @ vh


def moore_penrose(m: np.ndarray, tol: Tolerances | None = None) -> np.ndarray:
    """Pseudoinverse via SVD with a relative singular-value cutoff."""
    tol = tol or DEFAULT_TOL
    u, s, vh = np.linalg.svd(m)
    inv = np.zeros_like(s)
    if s[0] > 0.0:
        keep = s > tol.rank_factor(m.shape[0]) * s[0]
        inv[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv) @ u.conj().T


def psd_order(a: np.ndarray, b: np.ndarray, tol: Tolerances | None = None) -> bool:
    """Loewner order test A <= B with slack on the smallest eigenvalue of B - A."""
    tol = tol or DEFAULT_TOL
    require_hermitian(a, tol)
    require_hermitian(b, tol)
    d = require_hermitian(b - a, tol)
    w = np.linalg.eigvalsh(d)
    scale = float(np.abs(w).max()) if w.size else 0.0
    return bool(w.min() >= -tol.psd * (1.0 + scale))
