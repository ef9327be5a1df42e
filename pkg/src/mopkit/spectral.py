"""Zeros, first-kind polynomials, quadrature and approximation diagnostics.

Conventions follow the rest of the package: ``U_l`` are the block moments,
``V_m`` the left family, ``G_m`` the right family and ``F(z) = sum_n U_n z^{-n-1}``.
Nodes may be complex; every evaluation here is done in complex arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .eigen import eigenvalues
from .errors import DegreeError, EvaluationError, QuadratureError, TruncationError
from .functionals import VectorFunctional, block_moments, max_block_index
from .orthogonal import LeftFamily, RightFamily
from .polyalg import (
    MatrixPolynomial,
    adjugate,
    adjugate_poly_derivatives,
    as_h,
    det_poly,
    matpoly_eval,
)
from .recurrence import RecurrenceCoeffs, extract_coeffs

CLUSTER_RTOL = 1e-7


# ----------------------------------------------------------------------------
# Block Jacobi matrix and zeros
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockJacobi:
    m: int
    N: int
    matrix: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        N = self.N
        return self.matrix[i * N : (i + 1) * N, j * N : (j + 1) * N]


def block_jacobi(rc: RecurrenceCoeffs, m: int) -> BlockJacobi:
    """Leading ``mN x mN`` block: ``B_i`` on the diagonal, ``A_i`` above, ``C_i`` below."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > rc.M:
        raise ValueError(f"coefficients only reach A_{rc.M - 1}, B_{rc.M - 1}")
    N = rc.N
    J = np.zeros((m * N, m * N))
    for i in range(m):
        s = slice(i * N, (i + 1) * N)
        J[s, s] = rc.B[i]
        if i + 1 < m:
            t = slice((i + 1) * N, (i + 2) * N)
            J[s, t] = rc.A[i]
            J[t, s] = rc.C[i + 1]
    return BlockJacobi(m, N, J)


@dataclass(frozen=True, eq=False)
class ZeroSet:
    nodes: np.ndarray
    mult: np.ndarray

    @property
    def s(self) -> int:
        return len(self.nodes)

    @property
    def total(self) -> int:
        return int(self.mult.sum())

    def expanded(self) -> np.ndarray:
        return np.repeat(self.nodes, self.mult)


def cluster_zeros(values, rtol: float = CLUSTER_RTOL) -> ZeroSet:
    """Merge values within ``rtol * (1 + |lambda|)`` (single linkage); node is the cluster mean."""
    vals = np.asarray(values, dtype=complex).ravel()
    n = vals.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= rtol * (1 + max(abs(vals[i]), abs(vals[j]))):
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(vals[i])
    nodes = np.array([np.mean(g) for g in groups.values()], dtype=complex)
    mult = np.array([len(g) for g in groups.values()], dtype=int)
    order = np.lexsort((nodes.imag, nodes.real))
    return ZeroSet(nodes[order], mult[order])


def zeros_via_jacobi(rc: RecurrenceCoeffs, m: int, rtol: float = CLUSTER_RTOL) -> ZeroSet:
    """Eigenvalues of ``J_{mN}`` clustered into nodes with multiplicities."""
    return cluster_zeros(eigenvalues(block_jacobi(rc, m).matrix), rtol)


def zeros_via_det(V: MatrixPolynomial, rtol: float = CLUSTER_RTOL) -> ZeroSet:
    """Roots of the symbolic ``det V`` (companion matrix eigenvalues)."""
    d = det_poly(V)
    expected = V.degree * V.N
    if d.degree != expected:
        raise DegreeError(f"det V has degree {d.degree}, expected {expected}")
    if d.degree == 0:
        return ZeroSet(np.zeros(0, dtype=complex), np.zeros(0, dtype=int))
    return cluster_zeros(npoly.polyroots(d.coeffs), rtol)


def match_zero_sets(a: ZeroSet, b: ZeroSet) -> float:
    """Largest node distance under the optimal matching of the expanded multisets."""
    x, y = a.expanded(), b.expanded()
    if x.size != y.size:
        return float("inf")
    if x.size == 0:
        return 0.0
    D = np.abs(x[:, None] - y[None, :])
    i, j = linear_sum_assignment(D)
    return float(D[i, j].max())


# ----------------------------------------------------------------------------
# Associated polynomials of the first kind
# ----------------------------------------------------------------------------


def _moments_for(U: VectorFunctional, h, count: int) -> list:
    if count - 1 > max_block_index(U, h):
        raise TruncationError(f"need block moments up to U_{count - 1}")
    return block_moments(U, h, count)


def assoc_first_left(V_next: MatrixPolynomial, U: VectorFunctional, h) -> MatrixPolynomial:
    """``sum_i sum_{l<i} V_i z^{i-1-l} U_l`` (degree ``deg V_next - 1``)."""
    d = V_next.degree
    N = V_next.N
    if d < 1:
        return MatrixPolynomial.zeros(N)
    Us = _moments_for(U, h, d)
    out = np.zeros((d, N, N))
    for i in range(1, d + 1):
        for l in range(i):
            out[i - 1 - l] += V_next.coeffs[i] @ Us[l]
    return MatrixPolynomial(out)


def assoc_first_right(G_next: MatrixPolynomial, U: VectorFunctional, h) -> MatrixPolynomial:
    """``sum_i sum_{l<i} z^{i-1-l} U_l beta_i`` (degree ``deg G_next - 1``)."""
    d = G_next.degree
    N = G_next.N
    if d < 1:
        return MatrixPolynomial.zeros(N)
    Us = _moments_for(U, h, d)
    out = np.zeros((d, N, N))
    for i in range(1, d + 1):
        for l in range(i):
            out[i - 1 - l] += Us[l] @ G_next.coeffs[i]
    return MatrixPolynomial(out)


@dataclass(frozen=True, eq=False)
class FirstKindFamily:
    """``Bq[m] = B^(1)_m`` from ``V_{m+1}``, ``Gq[m] = G^(1)_m`` from ``G_{m+1}``."""

    Bq: list
    Gq: list


def first_kind(left: LeftFamily, right: RightFamily | None, U: VectorFunctional, h) -> FirstKindFamily:
    Bq = [assoc_first_left(left.V[m + 1], U, h) for m in range(left.M)]
    Gq = [assoc_first_right(right.G[m + 1], U, h) for m in range(right.M)] if right is not None else []
    return FirstKindFamily(Bq, Gq)


# ----------------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    zeros: ZeroSet
    weights: list

    @property
    def m(self) -> int:
        return self.zeros.total // self.weights[0].shape[0] if self.weights else 0


def _det_derivative(V: MatrixPolynomial, x, l: int) -> complex:
    """``(det V)^{(l)}(x)``; ``l = 1`` uses ``tr(Adj V(x) V'(x))``."""
    if l == 1:
        return complex(np.trace(adjugate(matpoly_eval(V, x)) @ matpoly_eval(V.deriv(), x)))
    return complex(det_poly(V).deriv(l)(x))


def _residue_factors(V: MatrixPolynomial, zeros: ZeroSet, rtol: float = 1e-10) -> list:
    """``l_k / (det V)^{(l_k)}(x_k) * (Adj V)^{(l_k - 1)}(x_k)`` per node."""
    out = []
    scale = np.abs(det_poly(V).coeffs).max()
    for x, l in zip(zeros.nodes, zeros.mult):
        dd = _det_derivative(V, x, int(l))
        if abs(dd) <= rtol * scale * (1 + abs(x)) ** (V.degree * V.N):
            raise QuadratureError(f"(det V)^({l}) vanishes at node {x:.6g}; multiplicity {l} is inconsistent")
        adj = adjugate_poly_derivatives(V, x, int(l) - 1)[-1] if l > 1 else adjugate(matpoly_eval(V, x))
        out.append(l / dd * adj)
    return out


def quadrature_rule(left: LeftFamily, U: VectorFunctional, h, m: int, zeros: ZeroSet | None = None) -> QuadratureRule:
    """Nodes ``x_{m,k}`` (zeros of ``V_m``) and weights

        Gamma_{m,k} = l_k / (det V_m)^{(l_k)}(x_k) (Adj V_m)^{(l_k-1)}(x_k) B^(1)_{m-1}(x_k).

    Zeros default to the eigenvalues of ``J_{mN}``.
    """
    if m < 1:
        raise ValueError("a quadrature rule needs m >= 1")
    if m > left.M:
        raise ValueError(f"family only reaches V_{left.M}")
    V = left.V[m]
    if zeros is None:
        rc = extract_coeffs(left.truncate(m), U, h)
        zeros = zeros_via_jacobi(rc, m)
    Bq = assoc_first_left(V, U, h)
    factors = _residue_factors(V, zeros)
    weights = [f @ matpoly_eval(Bq, x) for f, x in zip(factors, zeros.nodes)]
    return QuadratureRule(zeros, weights)


def quadrature_apply(rule: QuadratureRule, P: MatrixPolynomial) -> np.ndarray:
    """``sum_k P(x_k) Gamma_k``."""
    N = P.N
    out = np.zeros((N, N), dtype=complex)
    for x, G in zip(rule.zeros.nodes, rule.weights):
        out += matpoly_eval(P, complex(x)) @ G
    return out


def moment_functional(P: MatrixPolynomial, U: VectorFunctional, h) -> np.ndarray:
    """``sum_i P_i U_i``, the value the rule approximates."""
    if P.degree < 0:
        return np.zeros((P.N, P.N))
    Us = _moments_for(U, h, P.degree + 1)
    return sum(P.coeffs[i] @ Us[i] for i in range(P.degree + 1))


def partial_fractions(P: MatrixPolynomial, V: MatrixPolynomial, zeros: ZeroSet) -> list:
    """``C_k = l_k / (det V)^{(l_k)}(x_k) P(x_k) (Adj V)^{(l_k-1)}(x_k)``.

    For ``deg P < deg V`` and semisimple zeros, ``P(t) V(t)^{-1} = sum_k C_k / (t - x_k)``.
    """
    factors = _residue_factors(V, zeros)
    return [matpoly_eval(P, complex(x)) @ f for f, x in zip(factors, zeros.nodes)]


def partial_fraction_eval(C: list, zeros: ZeroSet, t) -> np.ndarray:
    return sum(Ck / (t - x) for Ck, x in zip(C, zeros.nodes))


# ----------------------------------------------------------------------------
# Christoffel-Darboux
# ----------------------------------------------------------------------------


@dataclass
class CDResiduals:
    cdm1: float
    conscdm1: float
    cdm11: float
    cdm12: float

    def max(self) -> float:
        return max(self.cdm1, self.conscdm1, self.cdm11, self.cdm12)


def _rel(diff, *terms) -> float:
    scale = max(max(np.abs(t).max() for t in terms), np.finfo(float).tiny)
    return float(np.abs(diff).max() / scale)


def cd_residual(left: LeftFamily, right: RightFamily, rc: RecurrenceCoeffs, m: int, x, z) -> CDResiduals:
    """Relative residuals of the Christoffel-Darboux identity and its confluent forms.

    ``cdm1``: ``(x-z) sum_{k<=m} G_k(z) V_k(x) = G_m(z) A_m V_{m+1}(x) - G_{m+1}(z) C_{m+1} V_m(x)``.
    The confluent forms are taken at ``z = x`` with derivatives of ``V`` (``cdm11``)
    and of ``G`` (``cdm12``).
    """
    if m + 1 > min(left.M, right.M) or m >= rc.M or m + 1 >= len(rc.C):
        raise ValueError(f"families and coefficients must reach index {m + 1}")
    x, z = complex(x), complex(z)
    A, C = rc.A[m], rc.C[m + 1]
    V, G = left.V, right.G

    def ev(P, t):
        return matpoly_eval(P, t)

    S = sum(ev(G[k], z) @ ev(V[k], x) for k in range(m + 1))
    t1 = ev(G[m], z) @ A @ ev(V[m + 1], x)
    t2 = ev(G[m + 1], z) @ C @ ev(V[m], x)
    cdm1 = _rel((x - z) * S - (t1 - t2), (x - z) * S, t1, t2)

    Sx = sum(ev(G[k], x) @ ev(V[k], x) for k in range(m + 1))
    c1 = ev(G[m], x) @ A @ ev(V[m + 1], x)
    c2 = ev(G[m + 1], x) @ C @ ev(V[m], x)
    cons = _rel(c1 - c2, c1, c2)

    d1 = ev(G[m], x) @ A @ ev(V[m + 1].deriv(), x)
    d2 = ev(G[m + 1], x) @ C @ ev(V[m].deriv(), x)
    cdm11 = _rel(Sx - (d1 - d2), Sx, d1, d2)

    e1 = ev(G[m + 1].deriv(), x) @ C @ ev(V[m], x)
    e2 = ev(G[m].deriv(), x) @ A @ ev(V[m + 1], x)
    cdm12 = _rel(Sx - (e1 - e2), Sx, e1, e2)
    return CDResiduals(cdm1, cons, cdm11, cdm12)


# ----------------------------------------------------------------------------
# Hermite-Pade and Markov approximants
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HermitePadeResult:
    """``negative[k-1]`` is the coefficient of ``z^{-k}``; ``polynomial_part`` is the worst
    coefficient of the non-negative powers left after subtracting the first-kind polynomial."""

    negative: list
    polynomial_part: float


def hermite_pade_residual(
    family,
    fk: FirstKindFamily,
    U: VectorFunctional,
    h,
    m: int,
    K: int,
) -> HermitePadeResult:
    """Laurent coefficients of ``V_{m+1} F - B^(1)_m`` (left family) or ``F G_{m+1} - G^(1)_m`` (right)."""
    if K < m + 2:
        raise ValueError(f"K must be at least m + 2 = {m + 2}")
    left = isinstance(family, LeftFamily)
    P = family.V[m + 1] if left else family.G[m + 1]
    Q = fk.Bq[m] if left else fk.Gq[m]
    d = P.degree
    Us = _moments_for(U, h, d + K)

    def prod(i, n):
        return P.coeffs[i] @ Us[n] if left else Us[n] @ P.coeffs[i]

    neg = []
    for k in range(1, K + 1):
        neg.append(sum(prod(i, i + k - 1) for i in range(d + 1)))
    worst = 0.0
    for t in range(d):
        # z^t picks n = i - 1 - t
        coef = sum(prod(i, i - 1 - t) for i in range(t + 1, d + 1))
        qt = Q.coeffs[t] if t <= Q.degree else 0.0
        worst = max(worst, float(np.abs(coef - qt).max()))
    return HermitePadeResult(neg, worst)


def _check_off_zeros(P: MatrixPolynomial, z, min_dist: float) -> None:
    if P.degree < 1:
        return
    zs = zeros_via_det(P)
    dist = np.abs(zs.nodes - z).min()
    if dist <= min_dist:
        raise EvaluationError(f"z = {z} is within {dist:.2e} of a zero")


def markov_approximant(left: LeftFamily, fk: FirstKindFamily, m: int, z, min_dist: float = 1e-10) -> np.ndarray:
    """``V_m(z)^{-1} B^(1)_{m-1}(z)``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    z = complex(z)
    V = left.V[m]
    _check_off_zeros(V, z, min_dist)
    return np.linalg.solve(matpoly_eval(V, z), matpoly_eval(fk.Bq[m - 1], z))


def markov_approximant_right(right: RightFamily, fk: FirstKindFamily, m: int, z, min_dist: float = 1e-10) -> np.ndarray:
    """``G^(1)_{m-1}(z) G_m(z)^{-1}``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    z = complex(z)
    G = right.G[m]
    _check_off_zeros(G, z, min_dist)
    Gz = matpoly_eval(G, z)
    return np.linalg.solve(Gz.T, matpoly_eval(fk.Gq[m - 1], z).T).T
