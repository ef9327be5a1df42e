"""Eigenvalues of a small dense real matrix.

Balancing, Householder reduction to upper Hessenberg form, then complex
single-shift QR sweeps with Wilkinson shifts and deflation.  Only eigenvalues
are produced, so each sweep touches the active diagonal window alone.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError

EPS = np.finfo(float).eps


def balance(A: np.ndarray, radix: float = 2.0) -> np.ndarray:
    """Diagonal similarity by powers of ``radix`` equalizing row and column norms."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            c = np.abs(A[:, i]).sum() - abs(A[i, i])
            r = np.abs(A[i, :]).sum() - abs(A[i, i])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            while c < r / radix:
                c *= radix
                r /= radix
                f *= radix
            while c >= r * radix:
                c /= radix
                r *= radix
                f /= radix
            if (c + r) < 0.95 * s:
                converged = False
                A[:, i] *= f
                A[i, :] /= f
    return A


def hessenberg(A: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix similar to ``A`` (Householder reflections)."""
    H = np.array(A, dtype=float)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v)
        H[k + 2 :, k] = 0.0
    return H


def _wilkinson(a, b, c, d):
    """Eigenvalue of ``[[a, b], [c, d]]`` closer to ``d``."""
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr / 4 - det + 0j)
    l1 = tr / 2 + disc
    l2 = tr / 2 - disc
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _qr_sweep(A: np.ndarray, mu: complex) -> None:
    """One shifted QR step ``A - mu I = QR -> RQ + mu I`` on Hessenberg ``A`` in place."""
    k = A.shape[0]
    idx = np.arange(k)
    A[idx, idx] -= mu
    rots = []
    for j in range(k - 1):
        a, b = A[j, j], A[j + 1, j]
        r = np.hypot(abs(a), abs(b))
        if r == 0.0:
            c, s = 1.0 + 0j, 0j
        else:
            c, s = a / r, b / r
        rots.append((c, s))
        x = A[j, j:].copy()
        y = A[j + 1, j:].copy()
        A[j, j:] = np.conj(c) * x + np.conj(s) * y
        A[j + 1, j:] = -s * x + c * y
    for j, (c, s) in enumerate(rots):
        top = min(j + 2, k - 1) + 1
        x = A[:top, j].copy()
        y = A[:top, j + 1].copy()
        A[:top, j] = c * x + s * y
        A[:top, j + 1] = -np.conj(s) * x + np.conj(c) * y
    A[idx, idx] += mu


def hessenberg_qr_eigenvalues(H: np.ndarray, max_iter_per_eig: int = 60) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.

    Raises :class:`ConvergenceError` carrying the eigenvalues already deflated
    when an eigenvalue needs more than ``max_iter_per_eig`` sweeps.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    eig = []
    hi = n - 1
    its = 0
    norm = max(np.abs(A).max(), np.finfo(float).tiny)
    while hi >= 0:
        if hi == 0:
            eig.append(A[0, 0])
            break
        l = 0
        for k in range(hi, 0, -1):
            s = abs(A[k - 1, k - 1]) + abs(A[k, k])
            if s == 0.0:
                s = norm
            if abs(A[k, k - 1]) <= EPS * s:
                A[k, k - 1] = 0.0
                l = k
                break
        if l == hi:
            eig.append(A[hi, hi])
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_iter_per_eig:
            raise ConvergenceError(f"QR iteration stalled with {hi + 1} eigenvalues left", np.array(eig))
        if its % 11 == 0:
            # exceptional shift to break cycles
            mu = A[hi, hi] + 1.5 * abs(A[hi, hi - 1]) * np.exp(1j * its)
        else:
            mu = _wilkinson(A[hi - 1, hi - 1], A[hi - 1, hi], A[hi, hi - 1], A[hi, hi])
        W = A[l : hi + 1, l : hi + 1]
        _qr_sweep(W, mu)
        A[l : hi + 1, l : hi + 1] = W
    return np.array(eig[::-1])


def symmetrize_conjugates(lam: np.ndarray, rtol: float = 1e-6) -> np.ndarray:
    """Pair eigenvalues of a real matrix into exact conjugate pairs.

    Each value with positive imaginary part is averaged with the closest
    unpaired conjugate partner within ``rtol * (1 + |lambda|)``; unpaired
    values with negligible imaginary part become real.
    """
    lam = np.asarray(lam, dtype=complex).copy()
    n = lam.size
    used = np.zeros(n, dtype=bool)
    order = np.argsort(-lam.imag)
    for i in order:
        if used[i] or lam[i].imag <= 0:
            continue
        cand = [j for j in range(n) if not used[j] and j != i and lam[j].imag < 0]
        if not cand:
            continue
        d = [abs(lam[j] - np.conj(lam[i])) for j in cand]
        j = cand[int(np.argmin(d))]
        if min(d) > rtol * (1 + abs(lam[i])):
            continue
        avg = (lam[i] + np.conj(lam[j])) / 2
        lam[i], lam[j] = avg, np.conj(avg)
        used[i] = used[j] = True
    for i in range(n):
        if not used[i] and abs(lam[i].imag) <= rtol * (1 + abs(lam[i])):
            lam[i] = lam[i].real
    return lam


def eigenvalues(A: np.ndarray) -> np.ndarray:
    """All eigenvalues of a real square matrix."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    lam = hessenberg_qr_eigenvalues(hessenberg(balance(A)))
    return symmetrize_conjugates(lam)
