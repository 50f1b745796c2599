"""Dense complex linear algebra with explicit rank tolerances.

All rank decisions are relative to the largest singular value, with an
absolute floor so near-zero matrices do not acquire spurious rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-8
ABSOLUTE_FLOOR = 1e-14


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray
    tol_used: float
    corank: int

    @property
    def cols(self) -> int:
        return self.rank + self.corank


def _check_finite(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size else M.reshape(0, 0)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains NaN or Inf entries")
    return M


def _rank_from_spectrum(
    s: np.ndarray, tol: float, floor: float, scale: float
) -> int:
    if s.size == 0 or s[0] < floor:
        return 0
    return int(np.sum(s > tol * max(s[0], scale)))


def numerical_rank(
    M: np.ndarray,
    tol: float = DEFAULT_RANK_TOL,
    floor: float = ABSOLUTE_FLOOR,
    scale: float = 0.0,
) -> RankReport:
    """Rank = number of singular values above tol * sigma_1.

    A matrix whose largest singular value is below ``floor`` has rank 0.
    ``scale`` supplies an external reference magnitude (e.g. the coefficient
    size of the polynomial matrix being evaluated): singular values are then
    compared against tol * max(sigma_1, scale), so a matrix that is uniformly
    tiny relative to its natural scale is rank-deficient rather than
    spuriously full-rank.
    """
    M = _check_finite(M)
    if M.size == 0:
        s = np.zeros(0)
        return RankReport(0, s, tol, M.shape[1] if M.ndim == 2 else 0)
    s = np.linalg.svd(M, compute_uv=False)
    rank = _rank_from_spectrum(s, tol, floor, scale)
    return RankReport(rank, s, tol, M.shape[1] - rank)


def kernel_basis(
    M: np.ndarray,
    tol: float = DEFAULT_RANK_TOL,
    floor: float = ABSOLUTE_FLOOR,
    scale: float = 0.0,
) -> np.ndarray:
    """Orthonormal basis of the numerical null space, as columns.

    Deterministic: right singular vectors for the trailing singular values.
    ``scale`` has the same meaning as in :func:`numerical_rank`.
    """
    M = _check_finite(M)
    if M.size == 0:
        n = M.shape[1] if M.ndim == 2 else 0
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    rank = _rank_from_spectrum(s, tol, floor, scale)
    return vh[rank:].conj().T


def least_squares(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of A x = b and its residual norm."""
    A = _check_finite(A)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side contains NaN or Inf entries")
    x, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ x - b))
    return x, residual


def prune_rows(M: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Replace M by a rank(M)-row matrix with the same numerical kernel.

    Uses the SVD: rows sigma_i * v_i^H for the singular values above
    tolerance span the row space, so the kernel is preserved.
    """
    M = _check_finite(M)
    if M.size == 0:
        return M.reshape(0, M.shape[1] if M.ndim == 2 else 0)
    u, s, vh = np.linalg.svd(M)
    if s.size == 0 or s[0] < ABSOLUTE_FLOOR:
        return np.zeros((0, M.shape[1]), dtype=complex)
    rank = int(np.sum(s > tol * s[0]))
    return (s[:rank, None] * vh[:rank]).astype(complex)


def subspace_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Gap between column spans: the 2-norm of the projector difference.

    Equals the sine of the largest principal angle, computed without the
    arccos rounding floor, so identical spans measure as ~1e-16.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.size == 0 and B.size == 0:
        return 0.0
    if A.size == 0 or B.size == 0:
        return 1.0
    qa, _ = np.linalg.qr(A)
    qb, _ = np.linalg.qr(B)
    Pa = qa @ qa.conj().T
    Pb = qb @ qb.conj().T
    return float(np.linalg.norm(Pa - Pb, 2))


def subspace_angles_max(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle (radians) between the column spans of A and B."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.size == 0 and B.size == 0:
        return 0.0
    qa, _ = np.linalg.qr(A)
    qb, _ = np.linalg.qr(B)
    s = np.linalg.svd(qa.conj().T @ qb, compute_uv=False)
    s = np.clip(s, 0.0, 1.0)
    if s.size < min(qa.shape[1], qb.shape[1]) or qa.shape[1] != qb.shape[1]:
        return float(np.pi / 2)
    return float(np.arccos(s.min()))
