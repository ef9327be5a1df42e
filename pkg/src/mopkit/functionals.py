"""Vectors of linear functionals given by their scalar moment sequences.

A vector functional ``U = [u^1 ... u^N]^T`` is stored as the ``N x (K_max+1)``
array ``moments[c, k] = u^c(x^k)``.  Applied to a vector polynomial
``P = [p_1 ... p_N]^T`` it gives the matrix with entry ``(r, c) = u^c(p_r)``.
Measures only enter through :func:`ingest_measure`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import EvaluationError, TruncationError
from .polyalg import HPolynomial, ScalarPolynomial, VectorPolynomial, as_h, h_expand


@dataclass(frozen=True, eq=False)
class VectorFunctional:
    moments: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        mu = np.atleast_2d(np.asarray(self.moments, dtype=float))
        if not np.all(np.isfinite(mu)):
            raise ValueError("moments must be finite")
        object.__setattr__(self, "moments", mu)

    @property
    def N(self) -> int:
        return self.moments.shape[0]

    @property
    def K_max(self) -> int:
        return self.moments.shape[1] - 1

    def apply(self, p: ScalarPolynomial, c: int) -> float:
        """``u^c(p)`` for a scalar polynomial ``p``."""
        if p.degree > self.K_max:
            raise TruncationError(f"degree {p.degree} exceeds stored moments (K_max={self.K_max})")
        if p.degree < 0:
            return 0.0
        return float(p.coeffs @ self.moments[c, : p.degree + 1])

    def __call__(self, P: VectorPolynomial) -> np.ndarray:
        return np.array([[self.apply(p, c) for c in range(self.N)] for p in P.entries])


def ingest_measure(weights: Sequence[Callable], a: float, b: float, K_max: int) -> VectorFunctional:
    """Moments ``int_a^b x^k w_c(x) dx`` of ``N`` weight functions."""
    if K_max < 0:
        raise ValueError("K_max must be non-negative")
    mu = np.zeros((len(weights), K_max + 1))
    for c, w in enumerate(weights):
        for k in range(K_max + 1):
            val, _ = integrate.quad(lambda x: x**k * w(x), a, b, epsabs=1e-15, epsrel=1e-13, limit=200)
            if not np.isfinite(val):
                raise ValueError(f"moment {k} of weight {c} is not finite")
            mu[c, k] = val
    return VectorFunctional(mu)


def functional_from_block_moments(blocks: Sequence[np.ndarray], h) -> VectorFunctional:
    """Recover scalar moments from block moments ``U_0, ..., U_J``.

    ``{x^r h^j}`` is a basis of the polynomials, so ``u^c(x^k)`` follows from
    the ``h``-expansion of ``x^k``.
    """
    h = as_h(h)
    N = h.N
    K = len(blocks) * N - 1
    mu = np.zeros((N, K + 1))
    for k in range(K + 1):
        a = h_expand(ScalarPolynomial.monomial(k), h).a
        for i in range(a.shape[0]):
            mu[:, k] += a[i] @ np.asarray(blocks[i])
    return VectorFunctional(mu)


def block_moment(U: VectorFunctional, h, j: int) -> np.ndarray:
    """``U_j`` with entry ``(r, c) = u^c(x^r h(x)^j)``."""
    h = as_h(h)
    key = (h.coeffs.tobytes(), j)
    if key in U._cache:
        return U._cache[key]
    N = h.N
    if U.N != N:
        raise ValueError(f"functional has {U.N} components but deg h = {N}")
    hj = h.power(j).coeffs
    top = N - 1 + hj.shape[0] - 1
    if top > U.K_max:
        raise TruncationError(f"U_{j} needs moments up to x^{top}, only K_max={U.K_max} stored")
    out = np.zeros((N, N))
    for r in range(N):
        out[r] = U.moments[:, r : r + hj.shape[0]] @ hj
    U._cache[key] = out
    return out


def block_moments(U: VectorFunctional, h, count: int) -> list:
    """``[U_0, ..., U_{count-1}]``."""
    return [block_moment(U, h, j) for j in range(count)]


def max_block_index(U: VectorFunctional, h) -> int:
    """Largest ``j`` for which ``U_j`` is computable from the stored moments."""
    h = as_h(h)
    return (U.K_max - (h.N - 1)) // h.N


@dataclass(frozen=True, eq=False)
class BlockHankel:
    m: int
    N: int
    matrix: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        N = self.N
        return self.matrix[i * N : (i + 1) * N, j * N : (j + 1) * N]


def hankel(U: VectorFunctional, h, m: int) -> BlockHankel:
    """``D_m`` with block ``(i, j) = U_{i+j}``."""
    h = as_h(h)
    Us = block_moments(U, h, 2 * m + 1)
    D = np.block([[Us[i + j] for j in range(m + 1)] for i in range(m + 1)])
    return BlockHankel(m, h.N, D)


@dataclass
class QuasiDefiniteReport:
    ok: bool
    conds: list
    failed_order: int | None
    cond_tol: float


def quasi_definite_check(U: VectorFunctional, h, m_max: int, cond_tol: float = 1e12) -> QuasiDefiniteReport:
    """Condition numbers of every scalar leading principal submatrix of ``D_{m_max}``."""
    D = hankel(U, h, m_max).matrix
    conds = []
    failed = None
    for k in range(1, D.shape[0] + 1):
        sub = D[:k, :k]
        with np.errstate(all="ignore"):
            c = np.linalg.cond(sub) if np.any(sub) else np.inf
        if not np.isfinite(c):
            c = np.inf
        conds.append(float(c))
        if failed is None and not c < cond_tol:
            failed = k
    return QuasiDefiniteReport(failed is None, conds, failed, cond_tol)


# ----------------------------------------------------------------------------
# Generalized Markov function F(z) = U_x(P_0(x) / (z - h(x)))
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MarkovSeries:
    coefficients: list
    radius_hint: float = 0.0

    @property
    def K(self) -> int:
        return len(self.coefficients) - 1


def markov_series(U: VectorFunctional, h, K: int | None = None, radius_hint: float = 0.0) -> MarkovSeries:
    """Collect ``U_0, ..., U_K``; ``K`` defaults to every block moment available."""
    if K is None:
        K = max_block_index(U, h)
    return MarkovSeries(block_moments(U, h, K + 1), radius_hint)


def markov_eval_series(ms: MarkovSeries, z) -> np.ndarray:
    """Partial sum ``sum_{n<=K} U_n z^{-(n+1)}``."""
    if z == 0:
        raise EvaluationError("F(z) series is undefined at z = 0")
    if abs(z) <= ms.radius_hint:
        warnings.warn(f"|z| = {abs(z):.3g} is inside radius_hint {ms.radius_hint:.3g}; the series may diverge", RuntimeWarning)
    w = 1.0 / complex(z)
    acc = np.zeros_like(np.asarray(ms.coefficients[0]), dtype=complex)
    term = acc
    for n, Un in enumerate(ms.coefficients):
        term = Un * w ** (n + 1)
        acc = acc + term
    tail = np.abs(term).max()
    if tail > 1e-12 * max(np.abs(acc).max(), np.finfo(float).tiny):
        warnings.warn(f"series truncated at K={ms.K} with last term {tail:.2e} relative to the sum", RuntimeWarning)
    return acc


def h_image(h, a: float, b: float) -> tuple:
    """``h([a, b])`` for real ``h``: endpoints plus interior critical values."""
    h = as_h(h)
    pts = [a, b]
    crit = np.roots(h.base.deriv().coeffs[::-1]) if h.N > 1 else []
    pts += [c.real for c in crit if abs(c.imag) < 1e-12 and a < c.real < b]
    vals = h(np.array(pts))
    return float(vals.min()), float(vals.max())


def markov_eval_quadrature(weights: Sequence[Callable], a: float, b: float, h, z) -> np.ndarray:
    """Direct integration of ``int x^r w_c(x) / (z - h(x)) dx``."""
    h = as_h(h)
    z = complex(z)
    lo, hi = h_image(h, a, b)
    dist = abs(z.imag) if lo <= z.real <= hi else min(abs(z - lo), abs(z - hi))
    if dist < 1e-8:
        raise EvaluationError(f"z = {z} lies on or too close to h([{a}, {b}]) = [{lo}, {hi}]")
    N = h.N
    out = np.zeros((N, N), dtype=complex)
    for r in range(N):
        for c, w in enumerate(weights):
            def f(x):
                return x**r * w(x) / (z - h(x))

            re, _ = integrate.quad(lambda x: f(x).real, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)
            im, _ = integrate.quad(lambda x: f(x).imag, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)
            out[r, c] = re + 1j * im
    return out
