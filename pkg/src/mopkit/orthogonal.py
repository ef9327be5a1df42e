"""Left and right bi-orthogonal families from a quasi-definite vector functional.

A single pivot-free Doolittle factorization ``D_M = L R`` of the block Hankel
matrix drives everything.  Block row ``m`` of ``L^{-1}`` holds the
coefficients ``alpha_j^m`` of ``B_m = sum_j alpha_j^m P_j``, and block column
``m`` of ``R^{-1}`` holds the coefficients ``beta_j^m`` of ``G_m``.  The
diagonal blocks ``L_mm``, ``R_mm`` are the Doolittle factors of the ``m``-th
block Schur complement, which gives the normalization

    alpha_m^m = L_mm^{-1},  Delta_m = R_mm,  Theta_m = L_mm,  beta_m^m = R_mm^{-1},

so ``(G_n^T(h) U)(B_m) = I delta_{nm}`` holds without any rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SingularMinor
from .functionals import VectorFunctional, block_moments, hankel
from .polyalg import MatrixPolynomial, VectorPolynomial, as_h, unfold

PIVOT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LeftFamily:
    """``V_0..V_M`` with ``B_m(x) = V_m(h(x)) P_0(x)`` and ``(h^m U)(B_m) = Delta_m``."""

    V: list
    Delta: list

    @property
    def M(self) -> int:
        return len(self.V) - 1

    @property
    def N(self) -> int:
        return self.V[0].N

    def alpha(self, m: int, j: int) -> np.ndarray:
        V = self.V[m]
        return V.coeffs[j] if j <= V.degree else np.zeros((self.N, self.N))

    def vector(self, m: int, h) -> VectorPolynomial:
        return unfold(self.V[m], h)

    def truncate(self, M: int) -> "LeftFamily":
        return LeftFamily(self.V[: M + 1], self.Delta[: M + 1])


@dataclass(frozen=True, eq=False)
class RightFamily:
    """``G_0..G_M`` with ``(G_m^T(h) U)(P_m) = Theta_m``."""

    G: list
    Theta: list

    @property
    def M(self) -> int:
        return len(self.G) - 1

    @property
    def N(self) -> int:
        return self.G[0].N

    def beta(self, m: int, j: int) -> np.ndarray:
        G = self.G[m]
        return G.coeffs[j] if j <= G.degree else np.zeros((self.N, self.N))

    def truncate(self, M: int) -> "RightFamily":
        return RightFamily(self.G[: M + 1], self.Theta[: M + 1])


def doolittle(D: np.ndarray, N: int, tol: float = PIVOT_TOL):
    """``D = L R`` with ``L`` unit lower triangular, no pivoting.

    A pivot below ``tol * ||S_m||`` (``S_m`` the current block Schur
    complement) raises :class:`SingularMinor` naming the scalar order.
    """
    A = np.array(D, dtype=float)
    n = A.shape[0]
    L = np.eye(n)
    scale = 0.0
    for k in range(n):
        if k % N == 0:
            scale = np.abs(A[k : k + N, k : k + N]).max()
        piv = A[k, k]
        if scale == 0.0 or abs(piv) < tol * scale:
            raise SingularMinor(k + 1, float(piv))
        L[k + 1 :, k] = A[k + 1 :, k] / piv
        A[k + 1 :, k:] -= np.outer(L[k + 1 :, k], A[k, k:])
        A[k + 1 :, k] = 0.0
    return L, np.triu(A)


@dataclass(frozen=True, eq=False)
class _Factorization:
    N: int
    M: int
    L: np.ndarray
    R: np.ndarray
    Linv: np.ndarray
    Rinv: np.ndarray


def _factor(U: VectorFunctional, h, M: int, tol: float = PIVOT_TOL) -> _Factorization:
    h = as_h(h)
    N = h.N
    D = hankel(U, h, M).matrix
    L, R = doolittle(D, N, tol)
    eye = np.eye(D.shape[0])
    Linv = solve_triangular(L, eye, lower=True, unit_diagonal=True)
    Rinv = solve_triangular(R, eye, lower=False)
    return _Factorization(N, M, L, R, Linv, Rinv)


def _left_from(f: _Factorization) -> LeftFamily:
    N = f.N
    V, Delta = [], []
    for m in range(f.M + 1):
        rows = slice(m * N, (m + 1) * N)
        coeffs = np.stack([f.Linv[rows, j * N : (j + 1) * N] for j in range(m + 1)])
        V.append(MatrixPolynomial(coeffs))
        Delta.append(f.R[rows, rows].copy())
    return LeftFamily(V, Delta)


def _right_from(f: _Factorization) -> RightFamily:
    N = f.N
    G, Theta = [], []
    for m in range(f.M + 1):
        cols = slice(m * N, (m + 1) * N)
        coeffs = np.stack([f.Rinv[j * N : (j + 1) * N, cols] for j in range(m + 1)])
        G.append(MatrixPolynomial(coeffs))
        Theta.append(f.L[cols, cols].copy())
    return RightFamily(G, Theta)


def build_left(U: VectorFunctional, h, M: int, tol: float = PIVOT_TOL) -> LeftFamily:
    """Left-orthogonal ``V_0..V_M`` and ``Delta_0..Delta_M``."""
    return _left_from(_factor(U, h, M, tol))


def build_right(U: VectorFunctional, h, M: int, tol: float = PIVOT_TOL) -> RightFamily:
    """Right-orthogonal ``G_0..G_M`` and ``Theta_0..Theta_M``."""
    return _right_from(_factor(U, h, M, tol))


def build_families(U: VectorFunctional, h, M: int, tol: float = PIVOT_TOL):
    """Both families from one factorization."""
    f = _factor(U, h, M, tol)
    return _left_from(f), _right_from(f)


# ----------------------------------------------------------------------------
# Moment pairings
# ----------------------------------------------------------------------------


def left_moment(left: LeftFamily, Us: list, m: int, k: int) -> np.ndarray:
    """``(h^k U)(B_m) = sum_j alpha_j^m U_{j+k}``."""
    V = left.V[m]
    return sum(V.coeffs[j] @ Us[j + k] for j in range(V.degree + 1))


def right_moment(right: RightFamily, Us: list, n: int, j: int) -> np.ndarray:
    """``(G_n^T(h) U)(P_j) = sum_i U_{i+j} beta_i^n``."""
    G = right.G[n]
    return sum(Us[i + j] @ G.coeffs[i] for i in range(G.degree + 1))


def pairing(left: LeftFamily, right: RightFamily, Us: list, n: int, m: int, shift: int = 0) -> np.ndarray:
    """``(G_n^T(h) U)(h^shift B_m) = sum_{i,j} alpha_j^m U_{i+j+shift} beta_i^n``."""
    V, G = left.V[m], right.G[n]
    out = np.zeros((left.N, left.N))
    for j in range(V.degree + 1):
        for i in range(G.degree + 1):
            out += V.coeffs[j] @ Us[i + j + shift] @ G.coeffs[i]
    return out


def verify_biorthogonality(left: LeftFamily, right: RightFamily, U: VectorFunctional, h) -> float:
    """``max_{n,m} max|(G_n^T(h) U)(B_m) - I delta_{nm}|`` from moments alone."""
    M = min(left.M, right.M)
    Us = block_moments(U, h, 2 * M + 1)
    eye = np.eye(left.N)
    worst = 0.0
    for n in range(M + 1):
        for m in range(M + 1):
            dev = pairing(left, right, Us, n, m) - (eye if n == m else 0.0)
            worst = max(worst, float(np.abs(dev).max()))
    return worst


def left_orthogonality_residual(left: LeftFamily, U: VectorFunctional, h) -> float:
    """Worst ``(h^k U)(B_m)`` deviation from ``Delta_m delta_{km}``, relative to ``||Delta_m||``."""
    Us = block_moments(U, h, 2 * left.M + 1)
    worst = 0.0
    for m in range(left.M + 1):
        scale = np.abs(left.Delta[m]).max()
        for k in range(m + 1):
            target = left.Delta[m] if k == m else 0.0
            worst = max(worst, float(np.abs(left_moment(left, Us, m, k) - target).max() / scale))
    return worst


def right_orthogonality_residual(right: RightFamily, U: VectorFunctional, h) -> float:
    """Worst ``(G_m^T(h) U)(P_j)`` deviation from ``Theta_m delta_{jm}``, relative to ``||Theta_m||``."""
    Us = block_moments(U, h, 2 * right.M + 1)
    worst = 0.0
    for m in range(right.M + 1):
        scale = np.abs(right.Theta[m]).max()
        for j in range(m + 1):
            target = right.Theta[m] if j == m else 0.0
            worst = max(worst, float(np.abs(right_moment(right, Us, m, j) - target).max() / scale))
    return worst
