"""Dense real symmetric matrices with tolerance-aware definiteness queries.

Matrices are stored as the packed upper triangle, so symmetry is exact by
construction.  The scaled vectorization ``svec`` maps a symmetric matrix to a
vector whose Euclidean inner product equals the Frobenius inner product of the
matrices (off-diagonal entries are scaled by sqrt(2)).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, NonFiniteEntry

SQRT2 = math.sqrt(2.0)


def triu_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major upper-triangle index pair used for all packed storage."""
    return np.triu_indices(n)


def tri_len(n: int) -> int:
    return n * (n + 1) // 2


def svec(X: np.ndarray) -> np.ndarray:
    """Scaled vectorization of a symmetric matrix (isometric for <.,.>_F)."""
    n = X.shape[0]
    i, j = np.triu_indices(n)
    v = X[i, j].astype(float).copy()
    v[i != j] *= SQRT2
    return v


def smat(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`svec`."""
    t = len(v)
    n = int((math.isqrt(8 * t + 1) - 1) // 2)
    if tri_len(n) != t:
        raise DimensionMismatch(f"vector of length {t} is not a packed triangle")
    i, j = np.triu_indices(n)
    X = np.zeros((n, n))
    w = np.where(i == j, 1.0, 1.0 / SQRT2)
    X[i, j] = v * w
    X[j, i] = X[i, j]
    return X


def sym_kron(W: np.ndarray) -> np.ndarray:
    """Matrix of the map svec(S) -> svec(W S W^T) on packed storage."""
    n = W.shape[0]
    i, j = np.triu_indices(n)
    t = len(i)
    K = np.empty((t, t))
    for col in range(t):
        E = np.zeros((n, n))
        a, b = i[col], j[col]
        if a == b:
            E[a, a] = 1.0
        else:
            E[a, b] = E[b, a] = 1.0 / SQRT2
        K[:, col] = svec(W @ E @ W.T)
    return K


class SymMatrix:
    """Immutable dense symmetric matrix backed by packed upper-triangle storage.

    Definiteness queries use a scale-aware tolerance: semidefiniteness is
    tested as ``lambda_min >= -tol * (1 + ||M||_F)``.
    """

    __slots__ = ("n", "_tri", "_full")

    def __init__(self, tri: np.ndarray, n: int):
        tri = np.asarray(tri, dtype=float)
        if tri.shape != (tri_len(n),):
            raise DimensionMismatch(
                f"packed triangle for n={n} must have length {tri_len(n)}"
            )
        if not np.all(np.isfinite(tri)):
            raise NonFiniteEntry("symmetric matrix has non-finite entries")
        self.n = n
        self._tri = tri
        self._tri.setflags(write=False)
        self._full = None

    @classmethod
    def from_full(cls, X, symmetrize: bool = True) -> "SymMatrix":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {X.shape}")
        if symmetrize:
            X = 0.5 * (X + X.T)
        elif not np.array_equal(X, X.T):
            raise DimensionMismatch("matrix is not symmetric")
        i, j = np.triu_indices(X.shape[0])
        return cls(X[i, j], X.shape[0])

    @classmethod
    def zeros(cls, n: int) -> "SymMatrix":
        return cls(np.zeros(tri_len(n)), n)

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls.from_full(np.eye(n))

    @property
    def mat(self) -> np.ndarray:
        """Dense (read-only) matrix view."""
        if self._full is None:
            i, j = np.triu_indices(self.n)
            X = np.zeros((self.n, self.n))
            X[i, j] = self._tri
            X[j, i] = self._tri
            X.setflags(write=False)
            self._full = X
        return self._full

    @property
    def tri(self) -> np.ndarray:
        return self._tri

    def norm_fro(self) -> float:
        return float(np.linalg.norm(self.mat))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def lambda_min(self) -> float:
        return float(self.eigenvalues()[0])

    def lambda_max(self) -> float:
        return float(self.eigenvalues()[-1])

    def is_psd(self, tol: float = 1e-8) -> bool:
        return self.lambda_min() >= -tol * (1.0 + self.norm_fro())

    def is_nsd(self, tol: float = 1e-8) -> bool:
        return self.lambda_max() <= tol * (1.0 + self.norm_fro())

    def is_nd(self, tol: float = 1e-8) -> bool:
        """Strict negative definiteness: lambda_max <= -tol."""
        return self.lambda_max() <= -tol

    def block(self, rows: slice, cols: slice) -> np.ndarray:
        return self.mat[rows, cols]

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if self.n != other.n:
            raise DimensionMismatch("size mismatch in SymMatrix addition")
        return SymMatrix(self._tri + other._tri, self.n)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        if self.n != other.n:
            raise DimensionMismatch("size mismatch in SymMatrix subtraction")
        return SymMatrix(self._tri - other._tri, self.n)

    def __mul__(self, s: float) -> "SymMatrix":
        return SymMatrix(self._tri * float(s), self.n)

    __rmul__ = __mul__

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(-self._tri, self.n)

    def congruence(self, T: np.ndarray) -> "SymMatrix":
        """Return T^T M T as a SymMatrix (symmetrized against rounding)."""
        G = T.T @ self.mat @ T
        return SymMatrix.from_full(G)

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n})"

    def allclose(self, other: "SymMatrix", atol: float = 0.0, rtol: float = 1e-12) -> bool:
        return bool(np.allclose(self._tri, other._tri, atol=atol, rtol=rtol))
