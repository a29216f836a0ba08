import numpy as np
import pytest

from sectorbound.errors import DimensionMismatch
from sectorbound.symmetric import SymMatrix, smat, svec, sym_kron, tri_len


def test_svec_roundtrip_and_isometry():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 5, 8):
        R = rng.normal(size=(n, n))
        X = 0.5 * (R + R.T)
        v = svec(X)
        assert v.shape == (tri_len(n),)
        assert np.allclose(smat(v), X)
        R2 = rng.normal(size=(n, n))
        Y = 0.5 * (R2 + R2.T)
        assert np.isclose(svec(X) @ svec(Y), np.trace(X @ Y))


def test_sym_kron_matches_congruence():
    rng = np.random.default_rng(1)
    W = rng.normal(size=(4, 4))
    W = 0.5 * (W + W.T)
    K = sym_kron(W)
    S = rng.normal(size=(4, 4))
    S = 0.5 * (S + S.T)
    assert np.allclose(K @ svec(S), svec(W @ S @ W.T))


def test_symmatrix_storage_is_exactly_symmetric():
    X = np.array([[1.0, 2.0], [2.0 + 1e-13, 3.0]])
    M = SymMatrix.from_full(X)
    assert np.array_equal(M.mat, M.mat.T)


def test_symmatrix_definiteness_queries():
    assert SymMatrix.identity(3).is_psd()
    assert not SymMatrix.from_full(np.diag([1.0, -1.0])).is_psd()
    assert SymMatrix.from_full(-np.eye(2)).is_nd(1e-8)
    assert not SymMatrix.from_full(np.zeros((2, 2))).is_nd(1e-8)
    assert SymMatrix.zeros(2).is_psd()


def test_symmatrix_algebra_and_errors():
    A = SymMatrix.identity(2)
    B = SymMatrix.from_full(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose((A + B).mat, np.array([[1, 1], [1, 1]]))
    assert np.allclose((2.0 * A).mat, 2 * np.eye(2))
    with pytest.raises(DimensionMismatch):
        _ = A + SymMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        SymMatrix.from_full(np.zeros((2, 3)))


def test_congruence_symmetrizes():
    M = SymMatrix.from_full(np.array([[0.0, 1.0], [1.0, -2.0]]))
    T = np.array([[1.0, -1.0], [1.0, -1.0]])
    G = M.congruence(T)
    assert np.array_equal(G.mat, G.mat.T)
