"""Dense symmetric linear-algebra kernels.

``sym_eig`` is a cyclic Jacobi eigensolver; it is unconditionally convergent
for symmetric input and deterministic, which matters for reproducible
certificate checks.  ``chol_psd`` is a dense Cholesky factorization that
reports indefiniteness instead of raising.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DimensionMismatch


def sym_eig(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues ascending, V)`` with ``A = V diag(w) V^T`` and the
    columns of ``V`` orthonormal.  The rotation updates zero each pivot
    exactly and keep the working matrix symmetric by construction.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got {A.shape}")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    B = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(B)))
    others = np.arange(n)
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # summed directly over the off-diagonal entries; the textbook
        # ||B||^2 - ||diag||^2 form cancels catastrophically near convergence
        off = float(np.linalg.norm(B[offmask]))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                app, aqq = B[p, p], B[q, q]
                theta = 0.5 * (aqq - app) / apq
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(1.0 + theta * theta)
                )
                cth = 1.0 / math.sqrt(1.0 + t * t)
                sth = t * cth
                mask = (others != p) & (others != q)
                bip = B[mask, p].copy()
                biq = B[mask, q].copy()
                B[mask, p] = cth * bip - sth * biq
                B[mask, q] = sth * bip + cth * biq
                B[p, mask] = B[mask, p]
                B[q, mask] = B[mask, q]
                B[p, p] = app - t * apq
                B[q, q] = aqq + t * apq
                B[p, q] = 0.0
                B[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = cth * vp - sth * vq
                V[:, q] = sth * vp + cth * vq
    w = np.diag(B).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


class NotPsd:
    """Signal value returned by :func:`chol_psd` on indefinite input."""

    __slots__ = ("pivot", "value")

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value

    def __repr__(self):
        return f"NotPsd(pivot={self.pivot}, value={self.value:.3e})"


def chol_psd(A: np.ndarray, shift: float = 0.0):
    """Lower-triangular Cholesky factor of ``A + shift*I``.

    Returns the factor L with ``L L^T = A + shift I`` or a :class:`NotPsd`
    record identifying the failing pivot.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected square matrix, got {A.shape}")
    n = A.shape[0]
    L = np.zeros((n, n))
    B = 0.5 * (A + A.T) + shift * np.eye(n)
    for j in range(n):
        d = B[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0:
            return NotPsd(j, float(d))
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (B[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L
