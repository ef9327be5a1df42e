from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mopkit.errors import DegreeError
from mopkit.polyalg import (
    HPolynomial,
    MatrixPolynomial,
    ScalarPolynomial,
    adjugate,
    adjugate_poly,
    adjugate_poly_derivatives,
    det_derivatives,
    det_poly,
    fold,
    h_expand,
    matpoly_eval,
    r_operator,
    unfold,
)

X2 = HPolynomial(ScalarPolynomial([0, 0, 1]))
X1 = HPolynomial(ScalarPolynomial([0, 1]))


def test_scalar_polynomial_basics():
    p = ScalarPolynomial([1.0, 2.0, 0.0, 0.0])
    assert p.degree == 1
    assert p(0.0) == 1.0
    assert ScalarPolynomial.zero().degree == -1
    assert (p - p).degree == -1
    q, r = ScalarPolynomial([1, 0, 0, 1]).divmod(ScalarPolynomial([1, 1]))
    assert np.allclose((q * ScalarPolynomial([1, 1]) + r).coeffs, [1, 0, 0, 1])


def test_pruning_drops_cancelled_leading_terms():
    p = ScalarPolynomial([1.0, 1.0, 1e-17])
    assert p.degree == 1


def test_hpolynomial_requires_exact_degree():
    with pytest.raises(ValueError):
        HPolynomial(ScalarPolynomial([1.0]))


def test_h_expand_direct_split():
    a = h_expand(ScalarPolynomial([1, 1, 0, 0, 1]), X2)
    assert a[2, 0] == 1 and a[0, 1] == 1 and a[0, 0] == 1
    assert a[1, 0] == 0 and a[1, 1] == 0 and a[2, 1] == 0


def test_h_expand_zero():
    a = h_expand(ScalarPolynomial.zero(), X2)
    assert a.a.size == 0
    assert a.reconstruct().degree == -1


def test_h_expand_nonmonomial_h():
    # symbolic division oracle: x^5 + 2x^3 = -x + x (x^2+1)^2
    h = HPolynomial(ScalarPolynomial([1, 0, 1]))
    a = h_expand(ScalarPolynomial([0, 0, 0, 2, 0, 1]), h)
    assert np.allclose(a.a, [[0, -1], [0, 0], [0, 1]])
    assert np.allclose(a.reconstruct().coeffs, [0, 0, 0, 2, 0, 1])


@settings(max_examples=60, deadline=None)
@given(
    N=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
)
def test_h_expand_round_trip(N, seed):
    rng = np.random.default_rng(seed)
    h = HPolynomial(ScalarPolynomial(np.concatenate([rng.uniform(-1, 1, N), [rng.uniform(0.5, 2)]])))
    p = ScalarPolynomial(rng.uniform(-1, 1, rng.integers(1, 4 * N + 2)))
    a = h_expand(p, h)
    assert a.a.shape[0] == p.degree // N + 1
    back = a.reconstruct().padded(p.degree + 1)
    assert np.abs(back - p.coeffs).max() <= 1e-12 * np.abs(p.coeffs).max()


def test_r_operator_examples():
    x3 = ScalarPolynomial([0, 0, 0, 1])
    assert np.allclose(r_operator(x3, X2, 1).coeffs, [0, 1])
    assert r_operator(x3, X2, 0).degree == -1
    assert np.allclose(r_operator(ScalarPolynomial([1, 1, 0, 0, 1]), X2, 0).coeffs, [1, 0, 1])


def test_r_operator_rejects_bad_j():
    with pytest.raises(ValueError):
        r_operator(ScalarPolynomial([1]), X2, 2)
    with pytest.raises(ValueError):
        r_operator(ScalarPolynomial([1]), X2, -1)


def test_fold_examples():
    V0 = fold([ScalarPolynomial([1]), ScalarPolynomial([0, 1])], X2)
    assert V0.degree == 0 and np.allclose(V0.coeffs[0], np.eye(2))
    # monic Legendre p_2, p_3 (Gram-Schmidt oracle)
    V1 = fold([ScalarPolynomial([-1 / 3, 0, 1]), ScalarPolynomial([0, -3 / 5, 0, 1])], X2)
    assert np.allclose(V1.coeffs, [np.diag([-1 / 3, -3 / 5]), np.eye(2)])
    V2 = fold([ScalarPolynomial([-1 / 3, 0, 1])], X1)
    assert np.allclose(V2.coeffs.ravel(), [-1 / 3, 0, 1])


def test_fold_leading_coefficient_lower_triangular():
    h = HPolynomial(ScalarPolynomial([0.3, -0.2, 1.0]))
    V = fold([ScalarPolynomial([1, 2, 3, 4, 5]), ScalarPolynomial([1, 1, 1, 1, 1, 2])], h)
    assert V.degree == 2
    assert V.leading[0, 1] == 0.0
    assert np.all(np.diag(V.leading) != 0)


def test_fold_degree_mismatch():
    with pytest.raises(DegreeError):
        fold([ScalarPolynomial([1, 0, 1]), ScalarPolynomial([0, 1, 0, 0, 1])], X2)
    with pytest.raises(DegreeError):
        fold([ScalarPolynomial([1, 1])], X2)


def test_unfold_examples():
    P0 = unfold(MatrixPolynomial.identity(2), X2)
    assert np.allclose(P0[0].coeffs, [1]) and np.allclose(P0[1].coeffs, [0, 1])
    V1 = MatrixPolynomial(np.array([np.diag([-1 / 3, -3 / 5]), np.eye(2)]))
    B = unfold(V1, X2)
    assert np.allclose(B[0].coeffs, [-1 / 3, 0, 1])
    assert np.allclose(B[1].coeffs, [0, -3 / 5, 0, 1])
    Z = unfold(MatrixPolynomial.zeros(2), X2)
    assert all(p.degree == -1 for p in Z.entries)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 3), m=st.integers(0, 3), seed=st.integers(0, 2**32 - 1))
def test_fold_unfold_round_trip(N, m, seed):
    rng = np.random.default_rng(seed)
    h = HPolynomial(ScalarPolynomial(np.concatenate([rng.uniform(-1, 1, N), [1.0]])))
    ps = []
    for k in range(N):
        c = rng.uniform(-1, 1, m * N + k + 1)
        c[-1] = rng.choice([-1, 1]) * rng.uniform(0.5, 1.5)
        ps.append(ScalarPolynomial(c))
    back = unfold(fold(ps, h), h)
    for p, q in zip(ps, back.entries):
        assert np.abs(q.padded(p.degree + 1) - p.coeffs).max() <= 1e-12 * np.abs(p.coeffs).max()


def test_matpoly_eval_examples():
    assert np.allclose(matpoly_eval(MatrixPolynomial.identity(2), 5), np.eye(2))
    assert np.isclose(matpoly_eval(MatrixPolynomial(np.array([-1 / 3, 0, 1]).reshape(3, 1, 1)), 1.0)[0, 0], 2 / 3)
    V = MatrixPolynomial(np.array([[[0, 1], [0, 0]], [[1, 0], [0, 1]]], dtype=float))
    assert np.allclose(V(2.0), [[2, 1], [0, 2]])
    assert np.allclose(V(1j), [[1j, 1], [0, 1j]])


def test_adjugate_examples():
    a, b, c, d = 1.5, -2.0, 0.25, 3.0
    assert np.allclose(adjugate(np.array([[a, b], [c, d]])), [[d, -b], [-c, a]])
    for n in range(1, 6):
        assert np.allclose(adjugate(np.eye(n)), np.eye(n))
    R = np.ones((2, 2))
    assert np.allclose(adjugate(R), [[1, -1], [-1, 1]])
    assert np.allclose(R @ adjugate(R), 0)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1), rank_drop=st.booleans())
def test_adjugate_identity(n, seed, rank_drop):
    rng = np.random.default_rng(seed)
    M = rng.uniform(-1, 1, (n, n))
    if rank_drop and n > 1:
        M[-1] = M[0]
    adj = adjugate(M)
    err = np.linalg.norm(M @ adj - np.linalg.det(M) * np.eye(n))
    assert err <= 1e-10 * (1 + np.linalg.norm(M) ** n)


def test_adjugate_complex_input():
    M = np.array([[1 + 1j, 2], [3j, 4 - 1j]])
    assert np.allclose(M @ adjugate(M), np.linalg.det(M) * np.eye(2))


def test_det_derivatives_examples():
    V = MatrixPolynomial(np.array([-1 / 3, 0, 1]).reshape(3, 1, 1))
    a = 1 / np.sqrt(3)
    d = det_derivatives(V, a, 1)
    assert abs(d[0]) < 1e-15 and np.isclose(d[1], 2 / np.sqrt(3))
    assert det_derivatives(MatrixPolynomial.identity(3), 0.7, 2) == [1.0, 0.0, 0.0]
    zI = MatrixPolynomial(np.array([np.zeros((2, 2)), np.eye(2)]))
    assert np.allclose(det_derivatives(zI, 0.0, 2), [0, 0, 2])


def test_det_poly_bareiss_matches_leibniz():
    rng = np.random.default_rng(3)
    V = MatrixPolynomial(rng.uniform(-1, 1, (3, 5, 5)))
    d = det_poly(V)
    for t in rng.uniform(-2, 2, 5):
        assert np.isclose(d(t), np.linalg.det(V(t)), rtol=1e-9, atol=1e-12)


def test_adjugate_poly_derivative_examples():
    V = MatrixPolynomial(np.array([-1 / 3, 0, 1]).reshape(3, 1, 1))
    assert np.allclose(adjugate_poly_derivatives(V, 0.3, 0)[0], [[1]])
    zI = MatrixPolynomial(np.array([np.zeros((2, 2)), np.eye(2)]))
    d = adjugate_poly_derivatives(zI, 0.0, 1)
    assert np.allclose(d[0], 0) and np.allclose(d[1], np.eye(2))
    C = np.array([[2.0, 1.0], [0.5, 3.0]])
    d = adjugate_poly_derivatives(MatrixPolynomial.constant(C), 0.0, 2)
    assert np.allclose(d[0], adjugate(C)) and np.allclose(d[1], 0) and np.allclose(d[2], 0)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 4), deg=st.integers(1, 3), seed=st.integers(0, 2**32 - 1))
def test_jacobi_formula(N, deg, seed):
    rng = np.random.default_rng(seed)
    V = MatrixPolynomial(rng.uniform(-1, 1, (deg + 1, N, N)))
    adj = adjugate_poly(V)
    dV = V.deriv()
    for t in rng.uniform(-1.5, 1.5, 20):
        lhs = det_derivatives(V, t, 1)[1]
        rhs = np.trace(adj(t) @ dV(t))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_matrix_polynomial_arithmetic():
    A = MatrixPolynomial(np.array([np.eye(2), [[0, 1], [0, 0]]]))
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    left = M @ A
    right = A @ M
    assert np.allclose(left.coeffs[1], M @ A.coeffs[1])
    assert np.allclose(right.coeffs[1], A.coeffs[1] @ M)
    sq = A @ A
    assert np.allclose(sq(0.7), A(0.7) @ A(0.7))
    assert (A - A).degree == -1
    assert np.allclose(A.shift(2)(2.0), 4 * A(2.0))
