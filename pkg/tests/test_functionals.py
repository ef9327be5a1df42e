from __future__ import annotations

import warnings

import numpy as np
import pytest

from mopkit.errors import EvaluationError, TruncationError
from mopkit.fixtures import lebesgue_functional, lebesgue_moments
from mopkit.functionals import (
    MarkovSeries,
    VectorFunctional,
    block_moment,
    functional_from_block_moments,
    hankel,
    ingest_measure,
    markov_eval_quadrature,
    markov_eval_series,
    markov_series,
    max_block_index,
    quasi_definite_check,
)
from mopkit.polyalg import HPolynomial, ScalarPolynomial, VectorPolynomial

X1 = HPolynomial(ScalarPolynomial([0, 1]))
X2 = HPolynomial(ScalarPolynomial([0, 0, 1]))


def test_ingest_lebesgue():
    U = ingest_measure([lambda x: 1.0], -1, 1, 4)
    assert np.allclose(U.moments[0], [2, 0, 2 / 3, 0, 2 / 5], rtol=1e-12, atol=1e-14)


def test_ingest_two_weights():
    U = ingest_measure([lambda x: 1.0, lambda x: x], -1, 1, 5)
    assert np.allclose(U.moments[0], [2, 0, 2 / 3, 0, 2 / 5, 0], atol=1e-13)
    assert np.allclose(U.moments[1], [0, 2 / 3, 0, 2 / 5, 0, 2 / 7], atol=1e-13)


def test_ingest_zero_weight_and_errors():
    U = ingest_measure([lambda x: 0.0], 0, 1, 3)
    assert np.all(U.moments == 0)
    with pytest.raises(ValueError):
        ingest_measure([lambda x: 1.0], 0, 1, -1)


def test_functional_rejects_non_finite():
    with pytest.raises(ValueError):
        VectorFunctional([[1.0, np.nan]])


def test_apply_to_vector_polynomial():
    U, _ = lebesgue_functional(2, K_max=8)
    P = VectorPolynomial((ScalarPolynomial([1]), ScalarPolynomial([0, 1])))
    assert np.allclose(U(P), [[2, 0], [0, 2 / 3]])
    with pytest.raises(TruncationError):
        U.apply(ScalarPolynomial.monomial(20), 0)


def test_block_moment_examples():
    U, _ = lebesgue_functional(2, K_max=8)
    assert np.allclose(block_moment(U, X2, 0), [[2, 0], [0, 2 / 3]])
    U1, _ = lebesgue_functional(1, K_max=8)
    for j in range(9):
        assert np.isclose(block_moment(U1, X1, j)[0, 0], U1.moments[0, j])
    Z = VectorFunctional(np.zeros((2, 9)))
    assert np.all(block_moment(Z, X2, 3) == 0)


def test_block_moment_truncation_and_mismatch():
    U, _ = lebesgue_functional(2, K_max=5)
    assert max_block_index(U, X2) == 2
    block_moment(U, X2, 2)
    with pytest.raises(TruncationError):
        block_moment(U, X2, 3)
    with pytest.raises(ValueError):
        block_moment(U, X1, 0)


def test_shift_identity():
    # (h^k U)(P_j) computed by applying U to h^k * x^r h^j directly
    rng = np.random.default_rng(0)
    h = HPolynomial(ScalarPolynomial([0.3, -0.7, 1.0]))
    U = VectorFunctional(rng.standard_normal((2, 20)))
    for j in range(5):
        for k in range(5 - j):
            direct = np.array(
                [
                    [U.apply(ScalarPolynomial.monomial(r) * h.power(j) * h.power(k), c) for c in range(2)]
                    for r in range(2)
                ]
            )
            assert np.abs(direct - block_moment(U, h, j + k)).max() <= 1e-12 * max(1, np.abs(direct).max())


def test_functional_from_block_moments_round_trip():
    rng = np.random.default_rng(1)
    h = HPolynomial(ScalarPolynomial([0.2, 0.1, -0.4, 1.0]))
    blocks = [rng.standard_normal((3, 3)) for _ in range(6)]
    U = functional_from_block_moments(blocks, h)
    for j, Bj in enumerate(blocks):
        assert np.allclose(block_moment(U, h, j), Bj, atol=1e-10)


def test_hankel_examples():
    U, _ = lebesgue_functional(1, K_max=8)
    assert np.allclose(hankel(U, X1, 0).matrix, [[2]])
    assert np.allclose(hankel(U, X1, 1).matrix, [[2, 0], [0, 2 / 3]])
    U2, _ = lebesgue_functional(2, K_max=12)
    D = hankel(U2, X2, 1)
    assert D.matrix.shape == (4, 4)
    assert np.allclose(D.block(0, 1), D.block(1, 0))
    assert np.allclose(D.block(1, 1), block_moment(U2, X2, 2))


def test_hankel_antidiagonal_constancy():
    rng = np.random.default_rng(2)
    h = HPolynomial(ScalarPolynomial([0.1, 0.5, -0.3, 1.0]))
    U = VectorFunctional(rng.standard_normal((3, 30)))
    D = hankel(U, h, 3)
    for i in range(4):
        for j in range(4):
            for i2 in range(4):
                j2 = i + j - i2
                if 0 <= j2 < 4:
                    assert np.array_equal(D.block(i, j), D.block(i2, j2))


def test_quasi_definite_examples():
    U, _ = lebesgue_functional(1, K_max=12)
    assert quasi_definite_check(U, X1, 4).ok
    rep = quasi_definite_check(VectorFunctional(np.zeros((1, 10))), X1, 2)
    assert not rep.ok and rep.failed_order == 1
    odd = VectorFunctional([lebesgue_moments(10, 1)])
    rep = quasi_definite_check(odd, X1, 2)
    assert not rep.ok and rep.failed_order == 1
    assert len(rep.conds) == 3


def test_markov_series_ln3():
    U, _ = lebesgue_functional(1, K_max=60)
    ms = markov_series(U, X1, 40, radius_hint=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        F = markov_eval_series(ms, 2.0)
    assert abs(F[0, 0] - np.log(3)) < 1e-12


def test_markov_series_large_z_and_zero_functional():
    U, _ = lebesgue_functional(1, K_max=20)
    F = markov_eval_series(markov_series(U, X1), 1e6)
    assert np.abs(F).max() <= 3e-6 * 2
    Z = VectorFunctional(np.zeros((1, 10)))
    assert np.all(markov_eval_series(markov_series(Z, X1), 3.0) == 0)


def test_markov_series_errors_and_warnings():
    U, _ = lebesgue_functional(1, K_max=20)
    ms = markov_series(U, X1, radius_hint=1.0)
    with pytest.raises(EvaluationError):
        markov_eval_series(ms, 0)
    with pytest.warns(RuntimeWarning, match="radius_hint"):
        markov_eval_series(ms, 0.5)
    with pytest.warns(RuntimeWarning, match="truncated"):
        markov_eval_series(MarkovSeries(ms.coefficients[:5]), 2.0)


def test_markov_quadrature_matches_closed_form_and_series():
    F = markov_eval_quadrature([lambda x: 1.0], -1, 1, X1, 2.0)
    assert abs(F[0, 0] - np.log(3)) < 1e-12
    U, _ = lebesgue_functional(1, K_max=70)
    S = markov_eval_series(markov_series(U, X1, 60), 2.0)
    assert np.abs(S - F).max() <= 1e-10


def test_markov_quadrature_n2_matches_series():
    F = markov_eval_quadrature([lambda x: 1.0, lambda x: x], -1, 1, X2, 4.0)
    U, _ = lebesgue_functional(2, K_max=100)
    S = markov_eval_series(markov_series(U, X2), 4.0)
    assert np.all(np.isfinite(F))
    assert np.abs(S - F).max() <= 1e-8


def test_markov_quadrature_rejects_support_image():
    with pytest.raises(EvaluationError):
        markov_eval_quadrature([lambda x: 1.0], -1, 1, X2, 0.5)
    with pytest.raises(EvaluationError):
        markov_eval_quadrature([lambda x: 1.0], -1, 1, X1, 1.0 + 1e-10)
    # off the real segment is fine
    markov_eval_quadrature([lambda x: 1.0], -1, 1, X2, 0.5 + 0.5j)
