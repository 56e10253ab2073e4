"""Validated idempotent/projection wrappers, Koliha projections, and block forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRankError, SingularPencilError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    as_matrix,
    hermitian_eigen,
    identity,
    operator_norm,
)


@dataclass(frozen=True)
class Idempotent:
    """A matrix Q with Q^2 = Q, certified by its defect ||Q^2 - Q||."""

    matrix: np.ndarray
    defect: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Projection:
    """A self-adjoint idempotent, certified by max(||P^2 - P||, ||P - P*||)."""

    matrix: np.ndarray
    defect: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def as_idempotent(m, tol: Tolerances | None = None) -> Idempotent:
    """Validate Q^2 = Q up to tol.check * (1 + ||Q||^2)."""
    tol = tol or DEFAULT_TOL
    q = as_matrix(m)
    defect = operator_norm(q @ q - q)
    bound = tol.check * (1.0 + operator_norm(q) ** 2)
    if defect > bound:
        raise ValidationError(f"idempotency defect {defect:.3e} exceeds {bound:.3e}")
    return Idempotent(matrix=q, defect=defect)


def as_projection(m, tol: Tolerances | None = None) -> Projection:
    """Validate P^2 = P = P* up to tol.check."""
    tol = tol or DEFAULT_TOL
    p = as_matrix(m)
    defect = max(operator_norm(p @ p - p), operator_norm(p - adjoint(p)))
    if defect > tol.check:
        raise ValidationError(f"projection defect {defect:.3e} exceeds {tol.check:.3e}")
    return Projection(matrix=p, defect=defect)


def _solve_right(numerator: np.ndarray, s: np.ndarray) -> np.ndarray:
    # X = numerator @ inv(s) for Hermitian s, via one solve
    return adjoint(np.linalg.solve(s, adjoint(numerator)))


def _pencil(q: Idempotent, tol: Tolerances) -> np.ndarray:
    s = q.matrix + adjoint(q.matrix) - identity(q.dim)
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] <= tol.rank_factor(q.dim) * sv[0]:
        raise SingularPencilError("Q + Q* - I is numerically singular")
    return s


def range_projection(q: Idempotent, tol: Tolerances | None = None) -> Projection:
    """Orthogonal projection onto the range of Q, as Q (Q + Q* - I)^(-1)."""
    tol = tol or DEFAULT_TOL
    return as_projection(_solve_right(q.matrix, _pencil(q, tol)), tol)


def null_projection(q: Idempotent, tol: Tolerances | None = None) -> Projection:
    """Orthogonal projection onto the null space of Q, as (Q - I)(Q + Q* - I)^(-1)."""
    tol = tol or DEFAULT_TOL
    num = q.matrix - identity(q.dim)
    return as_projection(_solve_right(num, _pencil(q, tol)), tol)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR factorization of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    qmat, r = np.linalg.qr(z)
    d = np.diag(r)
    return qmat * (d / np.abs(d))


def random_idempotent(
    dim: int,
    rank: int,
    offdiag_norm: float,
    seed: int,
    tol: Tolerances | None = None,
) -> Idempotent:
    """Seeded random idempotent with prescribed rank and ||A|| = offdiag_norm.

    Built as the block matrix [[I, A], [0, 0]] and scrambled by a random
    unitary, so the result is an exact idempotent up to round-off and
    ||Q|| = sqrt(1 + offdiag_norm^2).
    """
    tol = tol or DEFAULT_TOL
    if not 0 <= rank <= dim:
        raise BadRankError(f"rank {rank} outside [0, {dim}]")
    if offdiag_norm < 0.0:
        raise ValueError("offdiag_norm must be nonnegative")
    rng = np.random.default_rng(seed)
    base = np.zeros((dim, dim), dtype=np.complex128)
    base[:rank, :rank] = np.eye(rank)
    cols = dim - rank
    if rank > 0 and cols > 0 and offdiag_norm > 0.0:
        a = rng.standard_normal((rank, cols)) + 1j * rng.standard_normal((rank, cols))
        base[:rank, rank:] = a * (offdiag_norm / operator_norm(a))
    u = random_unitary(dim, rng)
    return as_idempotent(u @ base @ adjoint(u), tol)


def random_projection(dim: int, rank: int, seed: int, tol: Tolerances | None = None) -> Projection:
    """Seeded random orthogonal projection of the given rank."""
    tol = tol or DEFAULT_TOL
    if not 0 <= rank <= dim:
        raise BadRankError(f"rank {rank} outside [0, {dim}]")
    u = random_unitary(dim, np.random.default_rng(seed))[:, :rank]
    return as_projection(u @ adjoint(u), tol)


@dataclass(frozen=True)
class BlockForm:
    """2x2 operator blocks of T in an orthonormal eigenbasis of a projection.

    ``u`` holds the basis columns (range of P first), ``rank`` the split
    index, and ``blocks`` the quadrants of u* T u.
    """

    u: np.ndarray
    rank: int
    blocks: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    def reassemble(self) -> np.ndarray:
        b11, b12, b21, b22 = self.blocks
        top = np.hstack([b11, b12])
        bottom = np.hstack([b21, b22])
        return self.u @ np.vstack([top, bottom]) @ adjoint(self.u)


def block_form(t_mat: np.ndarray, p: Projection, tol: Tolerances | None = None) -> BlockForm:
    """Block decomposition of T induced by a projection (eigenvalue-1 columns first)."""
    tol = tol or DEFAULT_TOL
    t_mat = as_matrix(t_mat)
    eig = hermitian_eigen(p.matrix, tol)
    ones = eig.eigenvalues > 0.5
    u = np.hstack([eig.eigenvectors[:, ones], eig.eigenvectors[:, ~ones]])
    r = int(np.count_nonzero(ones))
    x = adjoint(u) @ t_mat @ u
    form = BlockForm(u=u, rank=r, blocks=(x[:r, :r], x[:r, r:], x[r:, :r], x[r:, r:]))
    roundtrip = operator_norm(form.reassemble() - t_mat)
    if roundtrip > tol.check * (1.0 + operator_norm(t_mat)):
        raise ValidationError(f"block round-trip residual {roundtrip:.3e}")
    return form
