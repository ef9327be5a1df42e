"""Command-line front end.

Exit codes: 0 success, 1 an invariant check failed, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import fixtures
from . import io as mio
from .errors import EvaluationError, MopkitError, InputError
from .functionals import block_moments, markov_eval_series, markov_series, max_block_index
from .orthogonal import (
    LeftFamily,
    RightFamily,
    build_families,
    left_orthogonality_residual,
    right_orthogonality_residual,
    verify_biorthogonality,
)
from .polyalg import MatrixPolynomial, VectorPolynomial
from .recurrence import (
    block_to_scalar,
    delta_product_residual,
    dual_recurrence_residual,
    extract_coeffs,
    rebuild_left,
    rebuild_right,
    recurrence_residual,
    scalar_residual,
    scalar_to_block,
    triangularity_report,
)
from .spectral import (
    cd_residual,
    first_kind,
    markov_approximant,
    match_zero_sets,
    moment_functional,
    quadrature_apply,
    quadrature_rule,
    zeros_via_det,
    zeros_via_jacobi,
)

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    input: str | None
    output: str | None
    M: int | None
    m: int
    z: list
    tol: float
    normalization: str = "doolittle"

    def __post_init__(self):
        if self.tol <= 0:
            raise InputError("--tol must be positive")
        if self.M is not None and self.M < 0:
            raise InputError("--M must be non-negative")

    @property
    def depth(self) -> int:
        return 4 if self.M is None else self.M


@dataclass
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tol": self.tol, "pass": self.passed}


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"cannot parse z value '{text}' (expected 're' or 're,im')")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need_input(cfg: RunConfig) -> str:
    if not cfg.input:
        raise InputError(f"--input is required for {cfg.command}")
    return cfg.input


# ----------------------------------------------------------------------------
# Invariant checks shared by verify and the single-purpose commands
# ----------------------------------------------------------------------------


def family_checks(left: LeftFamily, right: RightFamily, U, h, tol: float, prefix: str = "") -> list:
    checks = [
        Check(prefix + "biorthogonality", verify_biorthogonality(left, right, U, h), tol),
        Check(prefix + "left_orthogonality", left_orthogonality_residual(left, U, h), tol),
        Check(prefix + "right_orthogonality", right_orthogonality_residual(right, U, h), tol),
    ]
    lower = max(np.abs(np.tril(D, -1)).max() / np.abs(D).max() for D in left.Delta)
    upper = max(np.abs(np.triu(T, 1)).max() / np.abs(T).max() for T in right.Theta)
    checks.append(Check(prefix + "delta_upper_triangular", float(lower), 1e-12))
    checks.append(Check(prefix + "theta_lower_triangular", float(upper), 1e-12))
    if left.M >= 1:
        rc = extract_coeffs(left, U, h)
        checks.append(Check(prefix + "recurrence_residual", recurrence_residual(left, rc), tol))
        checks.append(Check(prefix + "delta_product", delta_product_residual(left, rc), tol))
        V = rebuild_left(rc, left.M, left.V[0])
        G = rebuild_right(rc, right.M, right.G[0])
        checks.append(Check(prefix + "favard_left", _coef_err(V, left.V), tol))
        checks.append(Check(prefix + "favard_right", _coef_err(G, right.G), tol))
        checks.append(Check(prefix + "dual_recurrence", dual_recurrence_residual(left, right, rc, U, h), tol))
    return checks


def _coef_err(got, want) -> float:
    worst = 0.0
    for a, b in zip(got, want):
        n = max(a.degree, b.degree) + 1
        worst = max(worst, float(np.abs(a.padded(n) - b.padded(n)).max() / np.abs(b.coeffs).max()))
    return worst


def exactness_table(rule, U, h, m: int) -> list:
    """Monomial probes ``z^d I`` for ``d = 0..2m``; error relative to ``max(|U_d|, max_k |x_k^d Gamma_k|)``."""
    N = U.N
    Us = block_moments(U, h, 2 * m + 1)
    rows = []
    for d in range(2 * m + 1):
        c = np.zeros((d + 1, N, N))
        c[d] = np.eye(N)
        P = MatrixPolynomial(c)
        err = np.abs(quadrature_apply(rule, P) - moment_functional(P, U, h)).max()
        scale = max(np.abs(Us[d]).max(), max(abs(x) ** d * np.abs(W).max() for x, W in zip(rule.zeros.nodes, rule.weights)))
        rows.append({"degree": d, "error": float(err / scale), "exact_expected": d <= 2 * m - 1})
    return rows


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def cmd_orthogonalize(cfg: RunConfig) -> int:
    U, h, _ = mio.load_functional(_need_input(cfg))
    left, right = build_families(U, h, cfg.depth)
    dev = verify_biorthogonality(left, right, U, h)
    _emit(cfg, mio.dumps(mio.family_to_dict(left, right, U, h, dev)))
    if dev > cfg.tol:
        print(f"biorthogonality deviation {dev:.3e} exceeds {cfg.tol:.1e}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_recurrence(cfg: RunConfig) -> int:
    U, h, _ = mio.load_functional(_need_input(cfg))
    if cfg.depth < 1:
        raise InputError("--M must be at least 1 to extract recurrence coefficients")
    left, _right = build_families(U, h, cfg.depth)
    rc = extract_coeffs(left, U, h)
    res = recurrence_residual(left, rc)
    tri = triangularity_report(rc)
    out = mio.recurrence_to_dict(rc, h)
    out["residual"] = res
    out["triangularity"] = {"ok": tri.ok, "A_upper": tri.A_upper, "C_lower": tri.C_lower, "tol": tri.tol}
    _emit(cfg, mio.dumps(out))
    return EXIT_OK if res <= cfg.tol else EXIT_INVARIANT


def cmd_convert(cfg: RunConfig) -> int:
    path = _need_input(cfg)
    data = mio.read_json(path)
    if "c" in data:
        sr = mio.scalar_recurrence_from_dict(data, path)
        rc = scalar_to_block(sr, cfg.M)
        p = block_to_scalar(rc, sr.h, VectorPolynomial(tuple(sr.initial)), rc.M)
        res = scalar_residual(sr, p)
        out = mio.recurrence_to_dict(rc, sr.h)
        out["p"] = [q.coeffs.tolist() for q in p]
        out["residual"] = res
        _emit(cfg, mio.dumps(out))
        return EXIT_OK if res <= cfg.tol else EXIT_INVARIANT
    if "A" in data:
        rc, h = mio.recurrence_from_dict(data, path)
        p = block_to_scalar(rc, h, None, rc.M)
        _emit(cfg, mio.dumps({"N": h.N, "h": h.coeffs.tolist(), "p": [q.coeffs.tolist() for q in p]}))
        return EXIT_OK
    raise InputError(f"{path}: expected a scalar recurrence ('c') or block recurrence ('A', 'B', 'C')")


def cmd_quadrature(cfg: RunConfig) -> int:
    U, h, _ = mio.load_functional(_need_input(cfg))
    if cfg.m < 1:
        raise InputError("--m must be at least 1: there is no rule of size 0")
    left, _right = build_families(U, h, cfg.m)
    rule = quadrature_rule(left, U, h, cfg.m)
    table = exactness_table(rule, U, h, cfg.m)
    out = mio.rule_to_dict(rule)
    out["m"] = cfg.m
    out["exactness"] = table
    _emit(cfg, mio.dumps(out))
    bad = [r for r in table if r["exact_expected"] and r["error"] > cfg.tol]
    return EXIT_INVARIANT if bad else EXIT_OK


def cmd_markov(cfg: RunConfig) -> int:
    U, h, radius = mio.load_functional(_need_input(cfg))
    if not cfg.z:
        raise InputError("markov needs at least one --z value")
    if cfg.depth < 1:
        raise InputError("--M must be at least 1")
    left, right = build_families(U, h, cfg.depth)
    fk = first_kind(left, right, U, h)
    ms = markov_series(U, h, max_block_index(U, h), radius)
    rows = []
    for z in cfg.z:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                F = markov_eval_series(ms, z)
                series_ok = not caught and abs(z) > radius
            except EvaluationError:
                F, series_ok = None, False
        for m in range(1, cfg.depth + 1):
            try:
                approx = markov_approximant(left, fk, m, z)
            except EvaluationError:
                approx = None
            valid = series_ok and approx is not None
            # an unreliable series still yields a number; the valid column flags it
            err = float(np.abs(approx - F).max()) if F is not None and approx is not None else float("nan")
            rows.append([m, float(z.real), float(z.imag), err, int(valid)])
    _emit(cfg, mio.csv_table(["m", "z_re", "z_im", "error", "valid"], rows))
    return EXIT_OK


def builtin_suite(tol: float) -> list:
    """Invariant checks over the reference fixtures and a small seeded corpus."""
    checks = []
    for N in (1, 2):
        U, h = fixtures.lebesgue_functional(N, M=8)
        left, right = build_families(U, h, 6)
        checks += family_checks(left, right, U, h, tol, f"legendre_N{N}.")
    U, h = fixtures.lebesgue_functional(1, M=8)
    left, right = build_families(U, h, 8)
    for m in (2, 3):
        rule = quadrature_rule(left, U, h, m)
        x, w = fixtures.legendre_gauss(m)
        err = max(np.abs(np.sort(rule.zeros.nodes.real) - x).max(), max(abs(W[0, 0] - wk) for W, wk in zip(rule.weights, w)))
        checks.append(Check(f"gauss_legendre_m{m}", float(err), 1e-10))
    fk = first_kind(left, right, U, h)
    errs = [abs(markov_approximant(left, fk, m, 2.0)[0, 0] - np.log(3.0)) for m in range(1, 9)]
    checks.append(Check("markov_decreasing", float(max(np.diff(errs).max(), 0.0)), 0.0))
    sr = fixtures.legendre_scalar_recurrence(2, 13)
    rc = scalar_to_block(sr, 6)
    p = block_to_scalar(rc, sr.h, None, 5)
    checks.append(Check("scalar_bridge_residual", scalar_residual(sr, p), 1e-10))
    fx = fixtures.double_zero_fixture()
    left_dz, _ = build_families(fx.U, fx.h, fx.m)
    rule = quadrature_rule(left_dz, fx.U, fx.h, fx.m)
    table = exactness_table(rule, fx.U, fx.h, fx.m)
    checks.append(Check("double_zero_exactness", max(r["error"] for r in table if r["exact_expected"]), 1e-6))
    rng = np.random.default_rng(fixtures.seed_from_env())
    for inst in fixtures.random_corpus(6, 6, seed=fixtures.seed_from_env()):
        pre = f"corpus{inst.index}_N{inst.N}."
        left, right = build_families(inst.U, inst.h, 6)
        checks += family_checks(left, right, inst.U, inst.h, tol, pre)
        rc = extract_coeffs(left, inst.U, inst.h)
        zm = max(match_zero_sets(zeros_via_jacobi(rc, m), zeros_via_det(left.V[m])) for m in range(1, 7))
        checks.append(Check(pre + "zeros_jacobi_vs_det", zm, 1e-6))
        x, z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        checks.append(Check(pre + "christoffel_darboux", cd_residual(left, right, rc, 4, x, z).max(), tol))
    return checks


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.input:
        left, right, U, h = mio.family_from_dict(mio.read_json(cfg.input), cfg.input)
        checks = family_checks(left, right, U, h, cfg.tol)
    else:
        checks = builtin_suite(cfg.tol)
    ok = all(c.passed for c in checks)
    _emit(cfg, mio.dumps({"ok": ok, "checks": [c.as_dict() for c in checks]}))
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name}: {c.value:.3e} > {c.tol:.1e}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVARIANT


COMMANDS = {
    "orthogonalize": cmd_orthogonalize,
    "recurrence": cmd_recurrence,
    "convert": cmd_convert,
    "quadrature": cmd_quadrature,
    "markov": cmd_markov,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mopkit", description="Bi-orthogonal matrix polynomials from vector moment data.")
    p.add_argument("--command", required=True, choices=sorted(COMMANDS))
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--M", type=int, default=None, help="construction depth, families V_0..V_M (default 4)")
    p.add_argument("--m", type=int, default=2, help="rule size for quadrature")
    p.add_argument("--z", action="append", default=[], help="evaluation point 're' or 're,im'; repeatable")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--normalization", choices=["doolittle"], default="doolittle")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            args.command, args.input, args.output, args.M, args.m,
            [parse_complex(z) for z in args.z], args.tol, args.normalization,
        )
        return COMMANDS[cfg.command](cfg)
    except MopkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
