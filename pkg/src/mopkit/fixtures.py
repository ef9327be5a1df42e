"""Reference functionals and randomized corpora used by tests and ``verify``."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .functionals import VectorFunctional, functional_from_block_moments, quasi_definite_check
from .polyalg import HPolynomial, ScalarPolynomial
from .recurrence import ScalarRecurrence

DEFAULT_SEED = 20240611


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    """``MOPKIT_SEED`` if set, else ``default``."""
    raw = os.environ.get("MOPKIT_SEED")
    return int(raw) if raw not in (None, "") else default


def legendre_gamma(n: int) -> float:
    """``n^2 / (4n^2 - 1)``: monic Legendre ``x p_n = p_{n+1} + gamma_n p_{n-1}``."""
    return n * n / (4.0 * n * n - 1.0)


def lebesgue_moments(K_max: int, shift: int = 0) -> np.ndarray:
    """``int_{-1}^{1} x^{k+shift} dx`` for ``k = 0..K_max``."""
    k = np.arange(K_max + 1) + shift
    return np.where(k % 2 == 0, 2.0 / (k + 1), 0.0)


def lebesgue_functional(N: int = 1, K_max: int | None = None, M: int = 8):
    """Legendre-type functional ``u^c = x^c dx`` on ``[-1, 1]`` with ``h = x^N``.

    Returns ``(U, h)``.  ``N = 1`` is Lebesgue measure with ``h = x``; ``N = 2``
    pairs ``dx`` with ``x dx`` and ``h = x^2``.
    """
    if K_max is None:
        K_max = 2 * (M + 2) * N + N
    U = VectorFunctional(np.array([lebesgue_moments(K_max, c) for c in range(N)]))
    return U, HPolynomial(ScalarPolynomial.monomial(N))


def monic_legendre(n_max: int) -> list:
    """``p_0..p_{n_max}`` from the classical three-term recurrence."""
    p = [ScalarPolynomial([1.0]), ScalarPolynomial([0.0, 1.0])]
    x = ScalarPolynomial([0.0, 1.0])
    while len(p) <= n_max:
        n = len(p) - 1
        p.append(x * p[n] - p[n - 1] * legendre_gamma(n))
    return p[: n_max + 1]


def legendre_scalar_recurrence(N: int, n_max: int) -> ScalarRecurrence:
    """Monic Legendre written as a ``(2N+1)``-term recurrence in ``h = x^N`` (``N`` in {1, 2}).

    Rows ``n = 0..n_max`` are stored.
    """
    g = legendre_gamma
    c = {}
    for n in range(n_max + 1):
        u = n + N - 1
        if N == 1:
            c[(u, n + 1)] = 1.0
            if n >= 1:
                c[(u, n - 1)] = g(n)
        elif N == 2:
            c[(u, n + 2)] = 1.0
            c[(u, n)] = g(n + 1) + g(n)
            if n >= 2:
                c[(u, n - 2)] = g(n) * g(n - 1)
        else:
            raise ValueError("only N = 1 and N = 2 are tabulated")
    return ScalarRecurrence(HPolynomial(ScalarPolynomial.monomial(N)), c)


def legendre_gauss(m: int) -> tuple:
    """Reference Gauss-Legendre nodes and weights (numpy's tabulation)."""
    return np.polynomial.legendre.leggauss(m)


# ----------------------------------------------------------------------------
# Random quasi-definite corpus
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CorpusInstance:
    index: int
    N: int
    h: HPolynomial
    U: VectorFunctional
    conds: list


def _random_h(rng: np.random.Generator, N: int) -> HPolynomial:
    """``x^N`` plus lower coefficients uniform in ``[-0.5, 0.5]``."""
    return HPolynomial(ScalarPolynomial(np.concatenate([rng.uniform(-0.5, 0.5, N), [1.0]])))


def random_jacobi(rng: np.random.Generator, N: int, K: int, spread: float = 0.5) -> np.ndarray:
    """Random ``K``-block Jacobi matrix with triangular off-diagonal blocks.

    ``B_i`` is uniform in ``[-1, 1]``; ``A_i`` (lower) and ``C_i`` (upper) have
    diagonals of random sign and modulus in ``[0.5, 1.5]`` and off-diagonal
    entries uniform in ``[-spread, spread]``.
    """

    def tri(lower: bool) -> np.ndarray:
        X = rng.uniform(-spread, spread, (N, N))
        X = np.tril(X) if lower else np.triu(X)
        np.fill_diagonal(X, rng.uniform(0.5, 1.5, N) * rng.choice([-1.0, 1.0], N))
        return X

    J = np.zeros((K * N, K * N))
    for i in range(K):
        s = slice(i * N, (i + 1) * N)
        J[s, s] = rng.uniform(-1.0, 1.0, (N, N))
        if i + 1 < K:
            t = slice((i + 1) * N, (i + 2) * N)
            J[s, t] = tri(True)
            J[t, s] = tri(False)
    return J


def functional_from_jacobi(J: np.ndarray, U0: np.ndarray, h, count: int) -> VectorFunctional:
    """Functional with block moments ``U_n = [J^n]_{00} U_0``, ``n < count``.

    Its left family started from ``V_0 = I`` obeys the recurrence stored in ``J``.
    """
    N = U0.shape[0]
    blocks = []
    P = np.eye(J.shape[0])
    for _ in range(count):
        blocks.append(P[:N, :N] @ U0)
        P = P @ J
    return functional_from_block_moments(blocks, h)


def random_instance(rng: np.random.Generator, N: int, M: int, cond_tol: float, spread: float = 0.5):
    """One candidate built from a random block Jacobi matrix and a normal ``U_0``."""
    h = _random_h(rng, N)
    J = random_jacobi(rng, N, M + 3, spread)
    U0 = rng.standard_normal((N, N))
    U = functional_from_jacobi(J, U0, h, 2 * M + 4)
    return U, h, quasi_definite_check(U, h, M, cond_tol)


def random_moment_instance(rng: np.random.Generator, N: int, M: int, cond_tol: float):
    """One candidate with iid standard normal scalar moments (a harsher corpus)."""
    h = _random_h(rng, N)
    K_max = 2 * M * N + 3 * N
    U = VectorFunctional(rng.standard_normal((N, K_max + 1)))
    return U, h, quasi_definite_check(U, h, M, cond_tol)


def random_corpus(
    count: int = 25,
    M: int = 6,
    seed: int | None = None,
    cond_tol: float = 1e6,
    Ns=(1, 2, 3),
    kind: str = "jacobi",
) -> list:
    """``count`` quasi-definite instances cycling ``N`` over ``Ns``.

    ``kind="jacobi"`` samples recurrence entries, ``kind="moments"`` samples
    scalar moments directly.  Candidates whose leading principal minors of
    ``D_M`` have condition numbers at or above ``cond_tol`` are rejected.
    Moments reach two block indices past ``D_M``.
    """
    make = {"jacobi": random_instance, "moments": random_moment_instance}[kind]
    rng = np.random.default_rng(seed_from_env() if seed is None else seed)
    out = []
    tries = 0
    while len(out) < count:
        N = Ns[len(out) % len(Ns)]
        tries += 1
        if tries > 1000 * count:
            raise RuntimeError("rejection sampling failed to fill the corpus")
        U, h, rep = make(rng, N, M, cond_tol)
        if rep.ok:
            out.append(CorpusInstance(len(out), N, h, U, rep.conds))
    return out


# ----------------------------------------------------------------------------
# Multiple-zero fixture
# ----------------------------------------------------------------------------


def _chebyshev_moments(count: int) -> np.ndarray:
    """``int x^k / sqrt(1-x^2) dx`` over ``[-1, 1]``."""
    mu = np.zeros(count)
    val = np.pi
    for k in range(count):
        if k % 2 == 0:
            mu[k] = val
            val *= (k + 1) / (k + 2)
    return mu


@dataclass(frozen=True, eq=False)
class DoubleZeroFixture:
    U: VectorFunctional
    h: HPolynomial
    m: int
    node: float


def double_zero_fixture(m: int = 3, count: int | None = None) -> DoubleZeroFixture:
    """``N = 2``, ``h = x^2`` with ``U_n = P diag(mu^a_n, mu^b_n) Q``.

    ``mu^a`` are Legendre and ``mu^b`` Chebyshev moments (in the variable of
    ``V``).  ``det V_m`` then factors as the product of the two scalar
    orthogonal polynomials of degree ``m``; for odd ``m`` both vanish at 0,
    giving a semisimple double zero with ``V_m(0) = 0``.
    """
    if m % 2 == 0:
        raise ValueError("m must be odd for the double zero at the origin")
    count = 2 * m + 8 if count is None else count
    a = lebesgue_moments(count - 1)
    b = _chebyshev_moments(count)
    P = np.array([[1.0, 0.3], [-0.4, 1.2]])
    Q = np.array([[0.9, -0.2], [0.5, 1.1]])
    blocks = [P @ np.diag([a[n], b[n]]) @ Q for n in range(count)]
    h = HPolynomial(ScalarPolynomial([0.0, 0.0, 1.0]))
    return DoubleZeroFixture(functional_from_block_moments(blocks, h), h, m, 0.0)
