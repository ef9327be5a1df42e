"""Scalar, vector and matrix polynomial arithmetic.

Coefficients are always stored in ascending powers.  The zero polynomial has
an empty coefficient array and degree -1.  Trailing coefficients whose
magnitude is below ``PRUNE * max|coeff|`` are dropped on construction so that
cancellation in floating point does not inflate the degree.

The module also holds the ``h``-basis machinery: splitting a scalar polynomial
along ``{x^j h(x)^i}``, folding ``N`` consecutive scalar polynomials into one
``N x N`` matrix polynomial and unfolding it back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegreeError

PRUNE = 1e-13


def _trim(c: np.ndarray) -> np.ndarray:
    """Drop negligible trailing entries along axis 0."""
    if c.shape[0] == 0:
        return c
    mags = np.abs(c).reshape(c.shape[0], -1).max(axis=1)
    top = mags.max()
    if top == 0.0:
        return c[:0]
    keep = np.nonzero(mags > PRUNE * top)[0][-1]
    return c[: keep + 1]


@dataclass(frozen=True, eq=False)
class ScalarPolynomial:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1:
            raise ValueError("scalar polynomial coefficients must be one-dimensional")
        object.__setattr__(self, "coeffs", _trim(c))

    @classmethod
    def zero(cls) -> "ScalarPolynomial":
        return cls(np.zeros(0))

    @classmethod
    def monomial(cls, k: int, scale: float = 1.0) -> "ScalarPolynomial":
        c = np.zeros(k + 1)
        c[k] = scale
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1]) if self.degree >= 0 else 0.0

    def __call__(self, x):
        if self.degree < 0:
            return 0.0 * np.asarray(x)
        return npoly.polyval(x, self.coeffs)

    def __add__(self, other):
        other = _as_scalar_poly(other)
        n = max(self.degree, other.degree) + 1
        return ScalarPolynomial(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return ScalarPolynomial(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_scalar_poly(other))

    def __rsub__(self, other):
        return _as_scalar_poly(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return ScalarPolynomial(self.coeffs * other)
        other = _as_scalar_poly(other)
        if self.degree < 0 or other.degree < 0:
            return ScalarPolynomial.zero()
        return ScalarPolynomial(npoly.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ScalarPolynomial([1.0])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "ScalarPolynomial"):
        if other.degree < 0:
            raise ZeroDivisionError("division by the zero polynomial")
        if self.degree < 0:
            return ScalarPolynomial.zero(), ScalarPolynomial.zero()
        q, r = npoly.polydiv(self.coeffs, other.coeffs)
        # polydiv pads the remainder; keep only degree < deg(other)
        return ScalarPolynomial(q), ScalarPolynomial(r[: other.degree])

    def deriv(self, k: int = 1) -> "ScalarPolynomial":
        if self.degree < k:
            return ScalarPolynomial.zero()
        return ScalarPolynomial(npoly.polyder(self.coeffs, k))

    def compose(self, q: "ScalarPolynomial") -> "ScalarPolynomial":
        """Return ``self(q(x))`` by Horner's scheme."""
        out = ScalarPolynomial.zero()
        for c in self.coeffs[::-1]:
            out = out * q + ScalarPolynomial([c])
        return out

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        out[: self.degree + 1] = self.coeffs
        return out

    def __repr__(self):
        return f"ScalarPolynomial({self.coeffs.tolist()})"


def _as_scalar_poly(p) -> ScalarPolynomial:
    if isinstance(p, ScalarPolynomial):
        return p
    if np.isscalar(p):
        return ScalarPolynomial([p])
    return ScalarPolynomial(p)


@dataclass(frozen=True, eq=False)
class HPolynomial:
    """The fixed polynomial ``h`` of degree ``N`` that defines the basis."""

    base: ScalarPolynomial

    def __post_init__(self):
        base = _as_scalar_poly(self.base)
        if base.degree < 1:
            raise DegreeError("h must have degree N >= 1")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_powers", [ScalarPolynomial([1.0])])

    @property
    def N(self) -> int:
        return self.base.degree

    @property
    def coeffs(self) -> np.ndarray:
        return self.base.coeffs

    def power(self, j: int) -> ScalarPolynomial:
        """``h(x)^j`` (cached)."""
        powers = self._powers
        while len(powers) <= j:
            powers.append(powers[-1] * self.base)
        return powers[j]

    def __call__(self, x):
        return self.base(x)


def as_h(h) -> HPolynomial:
    return h if isinstance(h, HPolynomial) else HPolynomial(_as_scalar_poly(h))


@dataclass(frozen=True, eq=False)
class VectorPolynomial:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(_as_scalar_poly(e) for e in self.entries))

    @property
    def N(self) -> int:
        return len(self.entries)

    def __call__(self, x):
        return np.array([e(x) for e in self.entries])

    def __getitem__(self, k):
        return self.entries[k]

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``sum_i coeffs[i] z^i`` with square ``N x N`` real coefficients."""

    coeffs: np.ndarray
    # lets ``ndarray @ MatrixPolynomial`` reach __rmatmul__
    __array_ufunc__ = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"matrix polynomial coefficients must have shape (d+1, N, N), got {c.shape}")
        object.__setattr__(self, "coeffs", _trim(c))

    @classmethod
    def constant(cls, M) -> "MatrixPolynomial":
        return cls(np.asarray(M, dtype=float)[None])

    @classmethod
    def identity(cls, N: int) -> "MatrixPolynomial":
        return cls(np.eye(N)[None])

    @classmethod
    def zeros(cls, N: int) -> "MatrixPolynomial":
        return cls(np.zeros((0, N, N)))

    @classmethod
    def from_entries(cls, entries) -> "MatrixPolynomial":
        """Build from an ``N x N`` nested list of scalar polynomials."""
        N = len(entries)
        polys = [[_as_scalar_poly(e) for e in row] for row in entries]
        d = max(p.degree for row in polys for p in row)
        c = np.zeros((max(d, -1) + 1, N, N))
        for i, row in enumerate(polys):
            for j, p in enumerate(row):
                c[: p.degree + 1, i, j] = p.coeffs
        return cls(c)

    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def leading(self) -> np.ndarray:
        if self.degree < 0:
            return np.zeros((self.N, self.N))
        return self.coeffs[-1]

    def __call__(self, z):
        return matpoly_eval(self, z)

    def entry(self, i: int, j: int) -> ScalarPolynomial:
        return ScalarPolynomial(self.coeffs[:, i, j])

    def T(self) -> "MatrixPolynomial":
        return MatrixPolynomial(np.transpose(self.coeffs, (0, 2, 1)))

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros((length, self.N, self.N))
        out[: self.degree + 1] = self.coeffs
        return out

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        n = max(self.degree, other.degree) + 1
        return MatrixPolynomial(self.padded(n) + other.padded(n)) if n > 0 else MatrixPolynomial.zeros(self.N)

    def __neg__(self):
        return MatrixPolynomial(-self.coeffs) if self.degree >= 0 else self

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s: float):
        return MatrixPolynomial(self.coeffs * s) if self.degree >= 0 else self

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, MatrixPolynomial):
            if self.degree < 0 or other.degree < 0:
                return MatrixPolynomial.zeros(self.N)
            out = np.zeros((self.degree + other.degree + 1, self.N, self.N))
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a @ b
            return MatrixPolynomial(out)
        M = np.asarray(other, dtype=float)
        if self.degree < 0:
            return self
        return MatrixPolynomial(self.coeffs @ M)

    def __rmatmul__(self, M):
        M = np.asarray(M, dtype=float)
        if self.degree < 0:
            return self
        return MatrixPolynomial(np.einsum("ij,djk->dik", M, self.coeffs))

    def shift(self, k: int = 1) -> "MatrixPolynomial":
        """Multiply by ``z^k``."""
        if self.degree < 0:
            return self
        return MatrixPolynomial(np.concatenate([np.zeros((k, self.N, self.N)), self.coeffs]))

    def deriv(self, k: int = 1) -> "MatrixPolynomial":
        if self.degree < k:
            return MatrixPolynomial.zeros(self.N)
        return MatrixPolynomial(npoly.polyder(self.coeffs, k, axis=0))

    def __repr__(self):
        return f"MatrixPolynomial(degree={self.degree}, N={self.N})"


# ----------------------------------------------------------------------------
# h-basis split
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HBasisExpansion:
    """``p(x) = sum_{i,j} a[i, j] x^j h(x)^i``."""

    a: np.ndarray
    h: HPolynomial

    def __getitem__(self, ij):
        i, j = ij
        if i >= self.a.shape[0]:
            return 0.0
        return float(self.a[i, j])

    def reconstruct(self) -> ScalarPolynomial:
        out = ScalarPolynomial.zero()
        for i in range(self.a.shape[0]):
            rem = ScalarPolynomial(self.a[i])
            out = out + rem * self.h.power(i)
        return out


def h_expand(p: ScalarPolynomial, h) -> HBasisExpansion:
    """Split ``p`` along ``{x^j h^i}`` by repeated Euclidean division by ``h``."""
    h = as_h(h)
    p = _as_scalar_poly(p)
    N = h.N
    rows = []
    q = p
    while q.degree >= 0:
        q, r = q.divmod(h.base)
        rows.append(r.padded(N))
    a = np.array(rows) if rows else np.zeros((0, N))
    return HBasisExpansion(a, h)


def r_operator(p: ScalarPolynomial, h, j: int) -> ScalarPolynomial:
    """Collect the ``x^j h^i`` terms of ``p`` and map ``x^j h^i -> z^i``."""
    h = as_h(h)
    if not 0 <= j < h.N:
        raise ValueError(f"j must lie in [0, {h.N - 1}], got {j}")
    a = h_expand(p, h).a
    return ScalarPolynomial(a[:, j])


def fold(p_block: Sequence[ScalarPolynomial], h) -> MatrixPolynomial:
    """Pack ``p_{mN}, ..., p_{(m+1)N-1}`` into the matrix polynomial ``V_m``.

    Row ``k``, column ``j`` of the result is ``r_operator(p_{mN+k}, h, j)``.
    """
    h = as_h(h)
    N = h.N
    polys = [_as_scalar_poly(p) for p in p_block]
    if len(polys) != N:
        raise DegreeError(f"expected {N} polynomials, got {len(polys)}")
    m, rem = divmod(polys[0].degree, N)
    if rem != 0 or polys[0].degree < 0:
        raise DegreeError(f"first polynomial must have degree mN, got {polys[0].degree}")
    for k, p in enumerate(polys):
        if p.degree != m * N + k:
            raise DegreeError(f"polynomial {k} has degree {p.degree}, expected {m * N + k}")
    c = np.zeros((m + 1, N, N))
    for k, p in enumerate(polys):
        a = h_expand(p, h).a
        c[: a.shape[0], k, :] = a
    return MatrixPolynomial(c)


def unfold(V: MatrixPolynomial, h) -> VectorPolynomial:
    """``B(x) = V(h(x)) P_0(x)`` with ``P_0 = [1, x, ..., x^{N-1}]^T``."""
    h = as_h(h)
    N = V.N
    out = []
    for k in range(N):
        acc = ScalarPolynomial.zero()
        for j in range(N):
            acc = acc + V.entry(k, j).compose(h.base) * ScalarPolynomial.monomial(j)
        out.append(acc)
    return VectorPolynomial(tuple(out))


# ----------------------------------------------------------------------------
# Evaluation, determinants, adjugates
# ----------------------------------------------------------------------------


def matpoly_eval(V: MatrixPolynomial, z) -> np.ndarray:
    """Horner evaluation of ``sum_i V_i z^i``."""
    N = V.N
    dtype = complex if np.iscomplexobj(z) else float
    out = np.zeros((N, N), dtype=dtype)
    for c in V.coeffs[::-1]:
        out = out * z + c
    return out


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def adjugate(M) -> np.ndarray:
    """Classical adjugate; exact for singular input.

    Cofactor expansion up to ``3 x 3``, Faddeev-LeVerrier above that.
    """
    M = np.asarray(M)
    n = M.shape[0]
    dtype = np.result_type(M.dtype, float)
    if n == 1:
        return np.ones((1, 1), dtype=dtype)
    if n <= 3:
        out = np.empty((n, n), dtype=dtype)
        for i in range(n):
            for j in range(n):
                minor = np.delete(np.delete(M, j, axis=0), i, axis=1)
                if n == 2:
                    d = minor[0, 0]
                else:
                    d = minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0]
                out[i, j] = (-1) ** (i + j) * d
        return out
    # Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
    Mk = np.zeros((n, n), dtype=dtype)
    c = 1.0
    eye = np.eye(n, dtype=dtype)
    for k in range(1, n + 1):
        Mk = M @ Mk + c * eye
        c = -np.trace(M @ Mk) / k
    return (-1) ** (n + 1) * Mk


def _poly_det(entries) -> ScalarPolynomial:
    n = len(entries)
    if n == 0:
        return ScalarPolynomial([1.0])
    if n <= 4:
        total = ScalarPolynomial.zero()
        for perm in itertools.permutations(range(n)):
            term = ScalarPolynomial([float(_perm_sign(perm))])
            for i, j in enumerate(perm):
                term = term * entries[i][j]
                if term.degree < 0:
                    break
            total = total + term
        return total
    return _bareiss(entries)


def _bareiss(entries) -> ScalarPolynomial:
    """Fraction-free elimination over the polynomial ring."""
    A = [list(row) for row in entries]
    n = len(A)
    sign = 1.0
    prev = ScalarPolynomial([1.0])
    for k in range(n - 1):
        if A[k][k].degree < 0:
            swap = next((i for i in range(k + 1, n) if A[i][k].degree >= 0), None)
            if swap is None:
                return ScalarPolynomial.zero()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j], _ = num.divmod(prev)
        prev = A[k][k]
    return A[n - 1][n - 1] * sign


def det_poly(V: MatrixPolynomial) -> ScalarPolynomial:
    """Symbolic ``det V(t)`` as a scalar polynomial."""
    N = V.N
    return _poly_det([[V.entry(i, j) for j in range(N)] for i in range(N)])


def adjugate_poly(V: MatrixPolynomial) -> MatrixPolynomial:
    """Symbolic adjugate of a polynomial matrix (``Adj`` of ``1 x 1`` is ``1``)."""
    N = V.N
    if N == 1:
        return MatrixPolynomial.identity(1)
    ent = [[V.entry(i, j) for j in range(N)] for i in range(N)]
    out = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(N):
            minor = [[ent[r][c] for c in range(N) if c != i] for r in range(N) if r != j]
            out[i][j] = _poly_det(minor) * float((-1) ** (i + j))
    return MatrixPolynomial.from_entries(out)


def det_derivatives(V: MatrixPolynomial, a, up_to: int) -> list:
    """``[(det V)^{(l)}(a) for l = 0..up_to]``."""
    d = det_poly(V)
    return [d.deriv(l)(a) for l in range(up_to + 1)]


def adjugate_poly_derivatives(V: MatrixPolynomial, a, up_to: int) -> list:
    """``[(Adj V)^{(l)}(a) for l = 0..up_to]`` from the symbolic adjugate."""
    adj = adjugate_poly(V)
    return [adj.deriv(l)(a) for l in range(up_to + 1)]
