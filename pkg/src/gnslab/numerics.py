"""Dense complex linear-algebra kernel used by every other module.

All routines are pure functions of their inputs and call only deterministic
LAPACK drivers (no randomized pivoting), so repeated runs on the same machine
produce bit-identical results.  Rank decisions are made *relative* to the
largest singular/eigenvalue of the matrix at hand: the natural scale of a
Gram matrix is set by the state that produced it, and absolute cutoffs
misclassify.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, Singular


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used throughout the package.

    ``abs`` bounds residuals of quantities with a natural O(1) scale
    (unitarity defects, normalization).  ``rel`` is the relative rank
    cutoff: singular values at or below ``rel * sigma_max`` count as zero.
    """

    abs: float = 1e-10
    rel: float = 1e-10

    def __post_init__(self) -> None:
        for field in ("abs", "rel"):
            value = getattr(self, field)
            if not (value > 0.0 and np.isfinite(value)):
                raise ValueError(f"Tolerance.{field} must be positive and finite, got {value!r}")


DEFAULT_TOL = Tolerance()

# entries per temporary array chunk in batched products (bounds peak memory)
CHUNK_ENTRIES = 2**23


def chunks(total: int, chunk: int):
    """Yield (lo, hi) index windows of at most `chunk` covering range(total)."""
    step = max(1, chunk)
    for start in range(0, total, step):
        yield start, min(total, start + step)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex 2-d array (copy only if needed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def max_abs(a) -> float:
    """Largest entry magnitude; 0.0 for empty arrays."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_defect(m) -> float:
    m = np.asarray(m)
    return max_abs(m - m.conj().T)


def hermitian_eig(m, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues in
    descending order and orthonormal eigenvector columns, so that
    ``m == V @ diag(w) @ V.conj().T`` up to roundoff.

    Raises ``NotHermitian`` if the Hermitian defect exceeds ``tol.abs``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is not square: shape {m.shape}")
    defect = hermitian_defect(m)
    if defect > tol.abs:
        raise NotHermitian(f"Hermitian defect {defect:.3e} exceeds tolerance {tol.abs:.3e}")
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return w[::-1].copy(), v[:, ::-1].copy()


def null_space(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the null space at the relative cutoff.

    Columns ``v`` satisfy ``|m @ v| <= tol.rel * sigma_max``; the column
    count is the nullity at that threshold.  A zero matrix yields the full
    space, a full-rank one an empty ``(n, 0)`` array.
    """
    m = as_matrix(m)
    if m.size == 0:
        return np.eye(m.shape[1], dtype=np.complex128)
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol.rel * smax)) if smax > 0.0 else 0
    return vh[rank:].conj().T.copy()


def polar_unitary(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unitary factor U of the polar decomposition m = U P, P positive.

    Raises ``Singular`` when the smallest singular value is at or below
    ``tol.rel * sigma_max`` (the polar factor is then not determined by m).
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise Singular(f"polar factor needs a square matrix, got shape {m.shape}")
    u, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax <= 0.0 or s[-1] <= tol.rel * smax:
        raise Singular(f"smallest singular value {s[-1] if s.size else 0.0:.3e} below cutoff")
    return u @ vh


def kron(a, b) -> np.ndarray:
    """Kronecker product, (a kron b)(x kron y) = (a x) kron (b y)."""
    return np.kron(as_matrix(a), as_matrix(b))


def unit_vector(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Coerce to a complex 1-d array and check it has norm one within tol."""
    v = np.asarray(x, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains NaN or Inf entries")
    defect = abs(float(np.linalg.norm(v)) - 1.0)
    if defect > tol.abs:
        from .errors import NotUnit

        raise NotUnit(f"vector norm deviates from 1 by {defect:.3e}")
    return v


def random_unit_vectors(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, dim) array of Haar-random unit vectors."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
