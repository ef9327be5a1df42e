from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from mopkit.eigen import balance, eigenvalues, hessenberg, hessenberg_qr_eigenvalues, symmetrize_conjugates
from mopkit.errors import ConvergenceError


def _match(a, b):
    a = np.sort_complex(np.asarray(a, dtype=complex))
    b = np.sort_complex(np.asarray(b, dtype=complex))
    D = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(D)
    return D[i, j].max()


def test_small_examples():
    assert eigenvalues(np.zeros((0, 0))).size == 0
    assert np.allclose(eigenvalues(np.array([[3.0]])), [3.0])
    lam = eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert np.allclose(np.sort_complex(lam), [-1j, 1j])
    assert np.allclose(np.sort(eigenvalues(np.diag([3.0, -1.0, 2.0])).real), [-1, 2, 3])


def test_balance_and_hessenberg_are_similarities():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((7, 7)) * np.logspace(-3, 3, 7)
    Bl = balance(A)
    assert np.isclose(np.trace(Bl), np.trace(A))
    H = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0)
    assert _match(np.linalg.eigvals(H), np.linalg.eigvals(A)) < 1e-10


def test_conjugate_pairs_are_exact():
    rng = np.random.default_rng(1)
    lam = eigenvalues(rng.standard_normal((9, 9)))
    cplx = lam[lam.imag > 0]
    for z in cplx:
        assert np.any(lam == np.conj(z))


def test_symmetrize_conjugates_snaps_real():
    lam = symmetrize_conjugates(np.array([1 + 1e-12j, 2 + 1j, 2 - 1j + 1e-9]))
    assert lam[0] == 1.0
    assert lam[1] == np.conj(lam[2])


def test_iteration_cap_raises_with_partial():
    H = hessenberg(np.random.default_rng(2).standard_normal((6, 6)))
    with pytest.raises(ConvergenceError) as info:
        hessenberg_qr_eigenvalues(H, max_iter_per_eig=0)
    assert isinstance(info.value.partial, np.ndarray)


def test_block_jacobi_like_matrix():
    # nonsymmetric tridiagonal with real spectrum (similar to a symmetric one)
    n = 12
    b = np.linspace(-1, 1, n)
    up = np.full(n - 1, 2.0)
    lo = np.full(n - 1, 0.5)
    T = np.diag(b) + np.diag(up, 1) + np.diag(lo, -1)
    S = np.diag(b) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    assert _match(eigenvalues(T), np.linalg.eigvalsh(S)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 15), seed=st.integers(0, 2**32 - 1))
def test_matches_lapack(n, seed):
    A = np.random.default_rng(seed).uniform(-1, 1, (n, n))
    ref = np.linalg.eigvals(A)
    assert _match(eigenvalues(A), ref) <= 1e-8 * max(1.0, np.abs(ref).max())
