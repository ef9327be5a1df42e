"""JSON and CSV formats read and written by the command-line front end.

Floats go through ``json`` (shortest repr, which round-trips exactly) so the
same inputs always give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .functionals import VectorFunctional
from .orthogonal import LeftFamily, RightFamily
from .polyalg import HPolynomial, MatrixPolynomial, ScalarPolynomial
from .recurrence import RecurrenceCoeffs, ScalarRecurrence
from .spectral import QuadratureRule


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path} must hold a JSON object")
    return data


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def _mat(X) -> list:
    return np.asarray(X, dtype=float).tolist()


def _cmat(X) -> dict:
    X = np.asarray(X, dtype=complex)
    return {"re": X.real.tolist(), "im": X.imag.tolist()}


def _field(data: dict, key: str, where: str):
    if key not in data:
        raise InputError(f"{where}: missing field '{key}'")
    return data[key]


# ----------------------------------------------------------------------------
# Moment files
# ----------------------------------------------------------------------------


def functional_to_dict(U: VectorFunctional, h: HPolynomial, radius_hint: float | None = None) -> dict:
    out = {"N": h.N, "h": h.coeffs.tolist(), "K_max": U.K_max, "moments": U.moments.tolist()}
    if radius_hint is not None:
        out["radius_hint"] = radius_hint
    return out


def functional_from_dict(data: dict, where: str = "moment file"):
    """``(U, h, radius_hint)`` from ``{"N", "h", "K_max", "moments"[, "radius_hint"]}``."""
    N = _field(data, "N", where)
    hc = _field(data, "h", where)
    K_max = _field(data, "K_max", where)
    mu = _field(data, "moments", where)
    if not isinstance(N, int) or N < 1:
        raise InputError(f"{where}: N must be a positive integer")
    if not isinstance(hc, list) or len(hc) != N + 1:
        raise InputError(f"{where}: h needs N + 1 = {N + 1} coefficients")
    if not isinstance(mu, list) or len(mu) != N or any(not isinstance(r, list) or len(r) != K_max + 1 for r in mu):
        raise InputError(f"{where}: moments must be {N} lists of length K_max + 1 = {K_max + 1}")
    try:
        h = HPolynomial(ScalarPolynomial(hc))
        U = VectorFunctional(np.array(mu, dtype=float))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    if h.N != N:
        raise InputError(f"{where}: leading coefficient of h vanishes")
    radius = float(data.get("radius_hint", 0.0))
    return U, h, radius


def load_functional(path):
    return functional_from_dict(read_json(path), str(path))


# ----------------------------------------------------------------------------
# Families and recurrences
# ----------------------------------------------------------------------------


def _polys(seq) -> list:
    return [[_mat(c) for c in P.coeffs] for P in seq]


def family_to_dict(left: LeftFamily, right: RightFamily, U: VectorFunctional, h: HPolynomial, deviation: float) -> dict:
    return {
        "N": h.N,
        "M": left.M,
        "normalization": "doolittle",
        "V": _polys(left.V),
        "G": _polys(right.G),
        "Delta": [_mat(D) for D in left.Delta],
        "Theta": [_mat(T) for T in right.Theta],
        "biorthogonality": deviation,
        "functional": functional_to_dict(U, h),
    }


def _matpolys(raw, N: int, where: str) -> list:
    try:
        out = [MatrixPolynomial(np.array(P, dtype=float).reshape(-1, N, N)) for P in raw]
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    return out


def family_from_dict(data: dict, where: str = "family file"):
    """``(left, right, U, h)``; the functional must be embedded."""
    U, h, _ = functional_from_dict(_field(data, "functional", where), where)
    N = h.N
    V = _matpolys(_field(data, "V", where), N, where)
    G = _matpolys(_field(data, "G", where), N, where)
    try:
        Delta = [np.array(D, dtype=float).reshape(N, N) for D in _field(data, "Delta", where)]
        Theta = [np.array(T, dtype=float).reshape(N, N) for T in _field(data, "Theta", where)]
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    if not (len(V) == len(G) == len(Delta) == len(Theta)) or not V:
        raise InputError(f"{where}: V, G, Delta and Theta must have the same nonzero length")
    return LeftFamily(V, Delta), RightFamily(G, Theta), U, h


def recurrence_to_dict(rc: RecurrenceCoeffs, h: HPolynomial) -> dict:
    return {
        "N": h.N,
        "h": h.coeffs.tolist(),
        "A": [_mat(X) for X in rc.A],
        "B": [_mat(X) for X in rc.B],
        "C": [_mat(X) for X in rc.C],
    }


def recurrence_from_dict(data: dict, where: str = "recurrence file"):
    N = _field(data, "N", where)
    h = HPolynomial(ScalarPolynomial(_field(data, "h", where)))
    try:
        A, B, C = ([np.array(X, dtype=float).reshape(N, N) for X in _field(data, k, where)] for k in "ABC")
        rc = RecurrenceCoeffs(A, B, C)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    if not rc.A:
        raise InputError(f"{where}: no recurrence coefficients")
    return rc, h


def scalar_recurrence_from_dict(data: dict, where: str = "scalar recurrence file") -> ScalarRecurrence:
    N = _field(data, "N", where)
    hc = _field(data, "h", where)
    entries = _field(data, "c", where)
    if not entries:
        raise InputError(f"{where}: coefficient list 'c' is empty")
    try:
        c = {(int(e["upper"]), int(e["lower"])): float(e["value"]) for e in entries}
        sr = ScalarRecurrence(HPolynomial(ScalarPolynomial(hc)), c, data.get("initial", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    if sr.N != N:
        raise InputError(f"{where}: deg h = {sr.N} but N = {N}")
    return sr


def scalar_recurrence_to_dict(sr: ScalarRecurrence) -> dict:
    return {
        "N": sr.N,
        "h": sr.h.coeffs.tolist(),
        "c": [{"upper": u, "lower": l, "value": v} for (u, l), v in sorted(sr.c.items())],
        "initial": [p.coeffs.tolist() for p in sr.initial],
    }


def rule_to_dict(rule: QuadratureRule) -> dict:
    return {
        "nodes": [
            {"re": float(x.real), "im": float(x.imag), "mult": int(l)}
            for x, l in zip(rule.zeros.nodes, rule.zeros.mult)
        ],
        "weights": [_cmat(W) for W in rule.weights],
    }


def csv_table(header: list, rows: list) -> str:
    """CSV text; floats are written with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()
