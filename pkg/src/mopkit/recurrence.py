"""Block three-term recurrences and the equivalent (2N+1)-term scalar recurrence.

The left recurrence reads

    z V_m(z) = A_m V_{m+1}(z) + B_m V_m(z) + C_m V_{m-1}(z),   V_{-1} = 0,

and, with the same coefficients, the right family satisfies

    z G_n(z) = G_{n-1}(z) A_{n-1} + G_n(z) B_n + G_{n+1}(z) C_{n+1}.

``C`` is stored with a zero block at index 0 so that ``C[m]`` is ``C_m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeError, MissingCoefficient, SingularCoefficient
from .functionals import VectorFunctional, block_moments
from .orthogonal import LeftFamily, RightFamily, left_moment, pairing
from .polyalg import MatrixPolynomial, ScalarPolynomial, VectorPolynomial, as_h

SINGULAR_RCOND = 1e-14


@dataclass(frozen=True, eq=False)
class RecurrenceCoeffs:
    """``A_0..A_{M-1}``, ``B_0..B_{M-1}`` and ``C_0 = 0, C_1..C_K`` (``K`` is ``M-1`` or ``M``)."""

    A: list
    B: list
    C: list

    def __post_init__(self):
        if len(self.A) != len(self.B):
            raise ValueError("A and B must have the same length")
        if len(self.C) < len(self.A):
            raise ValueError("C must hold at least C_0..C_{M-1}")

    @property
    def M(self) -> int:
        return len(self.A)

    @property
    def N(self) -> int:
        return np.asarray(self.A[0] if self.A else self.C[0]).shape[0]

    def truncate(self, M: int) -> "RecurrenceCoeffs":
        return RecurrenceCoeffs(self.A[:M], self.B[:M], self.C[: M + 1])


def _inv(X: np.ndarray, what: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= SINGULAR_RCOND * max(s[0], np.finfo(float).tiny):
        raise SingularCoefficient(f"{what} is singular (smallest singular value {s[-1]:.3e})")
    return np.linalg.inv(X)


def _constant(X, N: int) -> MatrixPolynomial:
    if X is None:
        return MatrixPolynomial.identity(N)
    if isinstance(X, MatrixPolynomial):
        if X.degree > 0:
            raise DegreeError("initial value must be a constant matrix polynomial")
        return X
    return MatrixPolynomial.constant(X)


def extract_coeffs(left: LeftFamily, U: VectorFunctional, h) -> RecurrenceCoeffs:
    """Recurrence coefficients of ``V_0..V_M`` from moments and ``Delta``.

    Returns ``A_m, B_m`` for ``m < M`` and ``C_m = Delta_m Delta_{m-1}^{-1}`` for ``1 <= m <= M``.
    """
    M = left.M
    N = left.N
    if M < 1:
        raise ValueError("need at least V_0 and V_1")
    Us = block_moments(U, h, 2 * M + 1)
    Dinv = [_inv(D, f"Delta_{m}") for m, D in enumerate(left.Delta)]
    zero = np.zeros((N, N))
    C = [zero] + [left.Delta[m] @ Dinv[m - 1] for m in range(1, M + 1)]
    A, B = [], []
    for m in range(M):
        mom_m1 = left_moment(left, Us, m, m + 1)
        prev_m = left_moment(left, Us, m - 1, m) if m > 0 else zero
        prev_m1 = left_moment(left, Us, m - 1, m + 1) if m > 0 else zero
        Bm = (mom_m1 - C[m] @ prev_m) @ Dinv[m]
        Am = (left_moment(left, Us, m, m + 2) - C[m] @ prev_m1 - Bm @ mom_m1) @ Dinv[m + 1]
        A.append(Am)
        B.append(Bm)
    return RecurrenceCoeffs(A, B, C)


def _coef_scale(polys) -> float:
    return max((np.abs(p.coeffs).max() for p in polys if p.degree >= 0), default=1.0)


def recurrence_residual(left: LeftFamily, rc: RecurrenceCoeffs) -> float:
    """Worst coefficient of ``z V_m - A_m V_{m+1} - B_m V_m - C_m V_{m-1}``, relative to ``max|V|``."""
    worst = 0.0
    zero = MatrixPolynomial.zeros(left.N)
    for m in range(min(rc.M, left.M)):
        prev = left.V[m - 1] if m > 0 else zero
        r = left.V[m].shift(1) - rc.A[m] @ left.V[m + 1] - rc.B[m] @ left.V[m] - rc.C[m] @ prev
        if r.degree >= 0:
            scale = _coef_scale([left.V[m], left.V[m + 1]])
            worst = max(worst, float(np.abs(r.coeffs).max() / scale))
    return worst


@dataclass
class TriangularityReport:
    ok: bool
    A_upper: float
    C_lower: float
    tol: float


def triangularity_report(rc: RecurrenceCoeffs, tol: float = 1e-9) -> TriangularityReport:
    """Relative size of the entries of ``A_m`` above and ``C_m`` below the diagonal."""
    a = max((np.abs(np.triu(X, 1)).max() / np.abs(X).max() for X in rc.A if np.any(X)), default=0.0)
    c = max((np.abs(np.tril(X, -1)).max() / np.abs(X).max() for X in rc.C[1:] if np.any(X)), default=0.0)
    return TriangularityReport(bool(a <= tol and c <= tol), float(a), float(c), tol)


def delta_product_residual(left: LeftFamily, rc: RecurrenceCoeffs) -> float:
    """Worst relative deviation of ``Delta_m`` from ``C_m ... C_1 Delta_0``."""
    worst = 0.0
    prod = left.Delta[0]
    for m in range(1, min(left.M, len(rc.C) - 1) + 1):
        prod = rc.C[m] @ prod
        D = left.Delta[m]
        worst = max(worst, float(np.abs(prod - D).max() / np.abs(D).max()))
    return worst


# ----------------------------------------------------------------------------
# Favard direction
# ----------------------------------------------------------------------------


def rebuild_left(rc: RecurrenceCoeffs, M: int | None = None, V0=None) -> list:
    """``V_0..V_M`` from ``V_{m+1} = A_m^{-1}((zI - B_m) V_m - C_m V_{m-1})``.

    ``V0`` defaults to the identity.
    """
    N = rc.N
    M = rc.M if M is None else M
    if M > rc.M:
        raise ValueError(f"coefficients only reach A_{rc.M - 1}; cannot build V_{M}")
    V = [_constant(V0, N)]
    prev = MatrixPolynomial.zeros(N)
    for m in range(M):
        Ainv = _inv(rc.A[m], f"A_{m}")
        nxt = Ainv @ (V[m].shift(1) - rc.B[m] @ V[m] - rc.C[m] @ prev)
        prev = V[m]
        V.append(nxt)
    return V


def rebuild_right(rc: RecurrenceCoeffs, M: int | None = None, G0=None, U0=None) -> list:
    """``G_0..G_M`` from ``G_{n+1} = (z G_n - G_{n-1} A_{n-1} - G_n B_n) C_{n+1}^{-1}``.

    ``G0`` wins over ``U0``; with neither, ``G_0 = U_0^{-1}`` is unavailable and
    the identity is used.
    """
    N = rc.N
    M = len(rc.C) - 1 if M is None else M
    if M > len(rc.C) - 1 or M > rc.M:
        raise ValueError(f"coefficients do not reach G_{M}")
    if G0 is None and U0 is not None:
        G0 = np.linalg.inv(U0)
    G = [_constant(G0, N)]
    prev = MatrixPolynomial.zeros(N)
    for n in range(M):
        Cinv = _inv(rc.C[n + 1], f"C_{n + 1}")
        acc = G[n].shift(1) - G[n] @ rc.B[n]
        if n > 0:
            acc = acc - prev @ rc.A[n - 1]
        prev = G[n]
        G.append(acc @ Cinv)
    return G


def dual_recurrence_residual(left: LeftFamily, right: RightFamily, rc: RecurrenceCoeffs, U: VectorFunctional, h) -> float:
    """Apply ``h L_n = L_{n-1} A_{n-1} + L_n B_n + L_{n+1} C_{n+1}`` (``L_n = G_n^T(h) U``) to ``B_k``.

    Checked for ``k <= M-1`` and ``n <= M-1``; deviation is absolute.
    """
    M = min(left.M, right.M, rc.M, len(rc.C) - 1)
    Us = block_moments(U, h, 2 * M + 1)
    worst = 0.0
    for k in range(M):
        for n in range(M):
            lhs = pairing(left, right, Us, n, k, shift=1)
            rhs = pairing(left, right, Us, n, k) @ rc.B[n] + pairing(left, right, Us, n + 1, k) @ rc.C[n + 1]
            if n > 0:
                rhs = rhs + pairing(left, right, Us, n - 1, k) @ rc.A[n - 1]
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# ----------------------------------------------------------------------------
# (2N+1)-term scalar recurrence
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScalarRecurrence:
    """``h p_n = sum_{j=n-N}^{n+N} c[(n+N-1, j)] p_j`` with given ``p_0..p_{N-1}``.

    Absent keys count as zero.  ``c[(n+N-1, n+N)]`` must be present and nonzero.
    """

    h: object
    c: dict
    initial: list = field(default_factory=list)

    def __post_init__(self):
        h = as_h(self.h)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", {(int(u), int(l)): float(v) for (u, l), v in self.c.items()})
        init = [p if isinstance(p, ScalarPolynomial) else ScalarPolynomial(p) for p in self.initial]
        if not init:
            init = [ScalarPolynomial.monomial(k) for k in range(h.N)]
        if len(init) != h.N:
            raise DegreeError(f"need {h.N} initial polynomials, got {len(init)}")
        for k, p in enumerate(init):
            if p.degree != k:
                raise DegreeError(f"initial p_{k} has degree {p.degree}")
        object.__setattr__(self, "initial", init)
        for (u, l) in self.c:
            n = u - h.N + 1
            if n < 0 or not n - h.N <= l <= n + h.N:
                raise ValueError(f"coefficient c^{u}_{l} lies outside the window of the recurrence")

    @property
    def N(self) -> int:
        return self.h.N

    def coef(self, n: int, j: int) -> float:
        return self.c.get((n + self.N - 1, j), 0.0)

    def rows(self) -> set:
        """Indices ``n`` with at least one stored coefficient."""
        return {u - self.N + 1 for (u, _) in self.c}


def scalar_to_block(sr: ScalarRecurrence, M: int | None = None) -> RecurrenceCoeffs:
    """Block coefficients ``A_m, B_m`` (``m < M``) and ``C_m`` of the stacked recurrence.

    Row ``r`` of block ``m`` is the scalar equation for ``n = mN + r``.
    ``C_M`` is included when every row of block ``M`` is stored.
    """
    N = sr.N
    rows = sr.rows()
    if not rows:
        raise MissingCoefficient("scalar recurrence has no coefficients")
    if M is None:
        M = 0
        while all(m * N + r in rows for m in (M,) for r in range(N)):
            M += 1
    if M < 1:
        raise MissingCoefficient("recurrence rows for block 0 are incomplete")

    def blocks(m):
        A = np.zeros((N, N))
        B = np.zeros((N, N))
        C = np.zeros((N, N))
        for r in range(N):
            n = m * N + r
            for s in range(N):
                if s <= r:
                    A[r, s] = sr.coef(n, (m + 1) * N + s)
                B[r, s] = sr.coef(n, m * N + s)
                if s >= r and m > 0:
                    C[r, s] = sr.coef(n, (m - 1) * N + s)
            if (n + N - 1, n + N) not in sr.c or A[r, r] == 0.0:
                raise MissingCoefficient(f"c^{n + N - 1}_{n + N} is required and must be nonzero")
        return A, B, C

    A, B, C = [], [], []
    for m in range(M):
        a, b, c = blocks(m)
        A.append(a)
        B.append(b)
        C.append(c)
    if all(M * N + r in rows for r in range(N)):
        try:
            C.append(blocks(M)[2])
        except MissingCoefficient:
            pass
    return RecurrenceCoeffs(A, B, C)


def _vec_coeffs(B: VectorPolynomial, length: int) -> np.ndarray:
    return np.array([p.padded(length) for p in B.entries])


def block_to_scalar(rc: RecurrenceCoeffs, h, B0: VectorPolynomial | None = None, M: int | None = None, tol: float = 1e-12) -> list:
    """``p_0..p_{(M+1)N-1}`` by running the vector recurrence forward from ``B_0``.

    ``B_0`` defaults to ``P_0 = [1, x, ..., x^{N-1}]``.
    """
    h = as_h(h)
    N = h.N
    M = rc.M if M is None else M
    if M > rc.M:
        raise ValueError(f"coefficients only reach A_{rc.M - 1}")
    if B0 is None:
        B0 = VectorPolynomial(tuple(ScalarPolynomial.monomial(k) for k in range(N)))
    L = (M + 1) * N + 1
    hc = h.coeffs
    cur = _vec_coeffs(B0, L)
    prev = np.zeros_like(cur)
    out = [ScalarPolynomial(row) for row in cur]
    for m in range(M):
        hB = np.zeros_like(cur)
        for t, ht in enumerate(hc):
            hB[:, t:] += ht * cur[:, : L - t]
        rhs = hB - rc.B[m] @ cur - rc.C[m] @ prev
        nxt = np.linalg.solve(rc.A[m], rhs)
        for k in range(N):
            n = (m + 1) * N + k
            lead = abs(nxt[k, n])
            if lead <= tol * max(np.abs(nxt[k]).max(), np.finfo(float).tiny):
                raise DegreeError(f"p_{n} lost its leading coefficient")
        prev, cur = cur, nxt
        out.extend(ScalarPolynomial(row) for row in cur)
    return out


def scalar_residual(sr: ScalarRecurrence, p: list) -> float:
    """Worst relative coefficient of ``h p_n - sum_j c^{n+N-1}_j p_j`` over usable ``n``."""
    N = sr.N
    hb = sr.h.base
    worst = 0.0
    for n in range(len(p) - N):
        hp = hb * p[n]
        r = hp
        for j in range(max(n - N, 0), n + N + 1):
            cj = sr.coef(n, j)
            if cj != 0.0:
                r = r - p[j] * cj
        if r.degree >= 0:
            scale = max(np.abs(hp.coeffs).max(), np.finfo(float).tiny)
            worst = max(worst, float(np.abs(r.coeffs).max() / scale))
    return worst
