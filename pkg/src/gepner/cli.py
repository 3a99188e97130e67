"""Command-line driver: ``gepner <subcommand> ...``.

Every subcommand emits a certificate bundle (JSON by default) and exits
with status 0 exactly when all certificates pass. Parameter errors exit
with status 2. Options can also come from a TOML file (``--config``)
whose keys match the long flag names; flags given on the command line
win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

import tomli

from . import __version__
from .exactalg.poly import MultiPoly
from .exactalg.rational import to_text
from .frobform import CONVENTIONS, UNIT_NORMALIZED, Check, verify_frobenius_axioms, verify_presaito
from .milnor import FamilyMilnorAlgebra, MilnorAlgebra, NonIsolatedSingularity, residue_functional
from .serialize import (
    frobenius_from_json,
    frobenius_to_json,
    poly_to_json,
    presaito_from_json,
    presaito_to_json,
    series_tree_text,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CONVENTION_LEDGER = {
    "residue_normalization": "lambda(hess f) = mu",
    "monomial_order": "grevlex, variables in declared order",
    "euler_field": "E = sum (1 - wt phi_a) t_a d/dt_a; charge D measured and reported",
    "free_parameters": "set to zero (minimal branch)",
}


class UsageError(ValueError):
    pass


def _check_kn(k, n):
    if k is None or n is None:
        raise UsageError("--k and --n are required")
    if n < 1 or k <= n:
        raise UsageError(f"need k > n >= 1, got k={k}, n={n}")


def _passed(c) -> bool:
    return bool(c.passed)


def _json_default(obj):
    # mpq and other exact scalars that can appear in certificate info
    return to_text(obj)


def _bundle(command: str, inputs: dict, certificates: dict, data: dict, convention: str, started: float) -> dict:
    ledger = dict(CONVENTION_LEDGER, sign=convention)
    return {
        "tool": "gepner",
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "conventions": ledger,
        "certificates": {k: v.to_dict() for k, v in certificates.items()},
        "data": data,
        "passed": all(_passed(v) for v in certificates.values()),
        "timing": {"seconds": round(time.perf_counter() - started, 3)},
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_poly(args) -> dict:
    from .symmetry import SymmetricChangeOfVariables, fermat_polynomial, gepner_polynomial

    _check_kn(args.k, args.n)
    start = time.perf_counter()
    G = gepner_polynomial(args.k, args.n)
    certs = {}
    if args.check:
        ok = SymmetricChangeOfVariables(args.n).pull_back(G) == fermat_polynomial(args.k, args.n)
        certs["gepner identity"] = Check("gepner identity", ok)
    data = {"gepner": poly_to_json(G)}
    return _bundle("poly", {"k": args.k, "n": args.n}, certs, data, args.convention, start)


def _read_poly(text: str, names):
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    try:
        return MultiPoly.parse(text, names)
    except Exception as exc:  # sympy raises a variety of parse errors
        raise UsageError(f"cannot parse polynomial {text!r}: {exc}") from None


def cmd_milnor(args) -> dict:
    start = time.perf_counter()
    if not args.poly:
        raise UsageError("--poly is required")
    names = args.vars.split(",") if args.vars else None
    f = _read_poly(args.poly, names)
    try:
        A = MilnorAlgebra(f)
    except NonIsolatedSingularity as exc:
        raise UsageError(str(exc)) from None
    lam = residue_functional(A)
    data = {
        "polynomial": poly_to_json(f),
        "dimension": A.dimension,
        "basis": A.basis_text(),
        "gram": [[to_text(x) for x in row] for row in lam.gram.rows],
        "multiplication": [[[to_text(x) for x in v] for v in row] for row in A.multiplication_tensor],
    }
    certs = {}
    hess_ok = lam.of_poly(_hessian(f)) == A.dimension
    certs["residue normalization"] = Check("residue normalization", hess_ok)
    if args.family:
        fam = FamilyMilnorAlgebra(f, A.basis_polys(), args.order)
        params = fam.params
        data["family"] = {
            "order": args.order,
            "deformations": A.basis_text(),
            "params": list(params),
            "gram": series_tree_text(fam.gram, params),
        }
        certs["family origin"] = Check(
            "family origin", fam.at_origin().basis == A.basis and _gram_origin_matches(fam, lam)
        )
    return _bundle("milnor", {"poly": f.to_text(), "family": args.family, "order": args.order}, certs, data, args.convention, start)


def _hessian(f):
    from .milnor import hessian

    return hessian(f)


def _gram_origin_matches(fam, lam) -> bool:
    G = fam.gram
    return all(G[a][b].constant_term() == lam.gram[a, b] for a in range(fam.dimension) for b in range(fam.dimension))


def cmd_amodel(args) -> dict:
    from .saito import a_model, candidate_primitive_form_solver

    if args.k is None or args.k < 2:
        raise UsageError("--k must be at least 2")
    start = time.perf_counter()
    M = a_model(args.k, args.order)
    solver = candidate_primitive_form_solver(M.unfolding, args.order)
    certs = dict(M.certificates)
    certs["solver"] = solver.certificates[0]
    params = M.unfolding.params
    data = {
        "frobenius": series_tree_text(M.frobenius.g, params),
        "structure_constants": series_tree_text(M.frobenius.C, params),
        "flat_coordinates": series_tree_text(M.flat_coordinates, params),
        "potential": M.potential.to_text(M.flat_frobenius.names),
        "free_parameters": solver.free_parameter_count,
        "charge": certs["frobenius"].info.get("charge"),
    }
    return _bundle("amodel", {"k": args.k, "order": args.order}, certs, data, args.convention, start)


def cmd_solve(args) -> dict:
    from .milnor import MilnorAlgebra as MA
    from .quotient import build_exact_sequence, choose_splitting
    from .saito import candidate_primitive_form_solver, matched_unfoldings

    _check_kn(args.k, args.n)
    start = time.perf_counter()
    seq = build_exact_sequence(args.k, args.n)
    iota = choose_splitting(seq, *_splitting(args))
    _, UG = matched_unfoldings(args.k, args.n, iota, args.order)
    res = candidate_primitive_form_solver(UG, args.order)
    cand = res.candidates[0]
    basis = MA(UG.f).basis_text()
    data = {
        "form": cand.as_text(UG.params, basis),
        "free_parameters_per_order": cand.free_parameters,
        "free_parameters": cand.solution_dimension,
        "log": res.log,
        "deformations": [p.to_text() for p in UG.deformations],
    }
    certs = {"frobenius": res.certificates[0]}
    return _bundle("solve", _kn_inputs(args), certs, data, args.convention, start)


def _splitting(args):
    if args.splitting in ("monomial", "weight-graded"):
        return (args.splitting, None)
    path = Path(args.splitting)
    if not path.exists():
        raise UsageError(f"unknown splitting {args.splitting!r} (expected monomial, weight-graded or a JSON file)")
    return ("custom", json.loads(path.read_text()))


def _kn_inputs(args) -> dict:
    return {"k": args.k, "n": args.n, "order": args.order, "splitting": args.splitting}


def _pipeline(args):
    from .quotient import SplittingError, run_pipeline

    _check_kn(args.k, args.n)
    strategy, matrix = _splitting(args)
    try:
        return run_pipeline(args.k, args.n, args.order, strategy, matrix, args.convention)
    except SplittingError as exc:
        raise UsageError(str(exc)) from None


def cmd_zeta(args) -> dict:
    from .saito import assemble_zeta, verify_lemma_j

    start = time.perf_counter()
    p = _pipeline(args)
    z = assemble_zeta(p)
    lj = verify_lemma_j(args.k, args.n, args.order, p.splitting.strategy) if p.splitting.strategy != "custom" else None
    certs = dict(z.certificates)
    if lj is not None:
        certs["lemma j"] = lj.certificate
    data = {
        "zeta": z.zeta.to_text(),
        "kappa_metric": None if z.kappa is None else to_text(z.kappa),
        "kappa_lemma_j": None if lj is None or lj.kappa is None else to_text(lj.kappa),
        "structure_constants": series_tree_text(z.frobenius.C, z.frobenius.names),
        "metric": series_tree_text(z.frobenius.g, z.frobenius.names),
    }
    return _bundle("zeta", _kn_inputs(args), certs, data, args.convention, start)


def cmd_pipeline(args) -> dict:
    from .saito import assemble_zeta

    start = time.perf_counter()
    p = _pipeline(args)
    certs = dict(p.certificates())
    z = assemble_zeta(p)
    certs.update({(k if k.startswith("zeta") else f"zeta {k}"): v for k, v in z.certificates.items()})
    FN = p.N.frobenius
    data = {
        "dims": list(p.sequence.dims),
        "splitting": p.splitting.to_dict(),
        "metric": series_tree_text(FN.g, FN.names),
        "euler": series_tree_text(FN.euler, FN.names),
        "zeta": z.zeta.to_text(),
    }
    if args.emit_all:
        data["frobenius"] = frobenius_to_json(FN)
        data["presaito_N"] = presaito_to_json(p.N.presaito)
        data["structure_constants"] = series_tree_text(FN.C, FN.names)
    return _bundle("pipeline", _kn_inputs(args), certs, data, args.convention, start)


def cmd_verify(args) -> dict:
    start = time.perf_counter()
    certs = {}
    if not args.frobenius and not args.presaito:
        raise UsageError("give --frobenius and/or --presaito")
    if args.frobenius:
        F = frobenius_from_json(json.loads(Path(args.frobenius).read_text()))
        certs["frobenius"] = verify_frobenius_axioms(F, args.order)
    if args.presaito:
        P = presaito_from_json(json.loads(Path(args.presaito).read_text()))
        certs["presaito"] = verify_presaito(P, args.order)
    inputs = {"frobenius": args.frobenius, "presaito": args.presaito, "order": args.order}
    return _bundle("verify", inputs, certs, {}, args.convention, start)


GRID_FIELDS = ["k", "n", "mu_G", "binomial", "kernel", "invariants", "exact_sequence", "jacobi_minors", "vandermonde_surjective"]


def grid_row(kn) -> dict:
    from .quotient import build_exact_sequence, jacobi_minor_identity, vandermonde_surjectivity

    k, n = kn
    seq = build_exact_sequence(k, n)
    return {
        "k": k,
        "n": n,
        "mu_G": seq.gepner.dimension,
        "binomial": comb(k - 1, n),
        "kernel": seq.dims[0],
        "invariants": seq.dims[1],
        "exact_sequence": "pass" if seq.passed else "fail",
        "jacobi_minors": "pass" if jacobi_minor_identity(k, n).passed else "fail",
        "vandermonde_surjective": "pass" if vandermonde_surjectivity(k, n).passed else "fail",
    }


def grid_rows(max_k: int, min_n: int = 1, jobs: int = 1) -> list:
    """One summary row per (k, n) with min_n <= n < k <= max_k, in grid order."""
    pairs = [(k, n) for k in range(2, max_k + 1) for n in range(min_n, k)]
    if jobs <= 1:
        return [grid_row(kn) for kn in pairs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(grid_row, pairs))


def cmd_grid(args) -> dict:
    start = time.perf_counter()
    if args.max_k < 2:
        raise UsageError("--max-k must be at least 2")
    rows = grid_rows(args.max_k, jobs=args.jobs)
    ok = all(
        r["exact_sequence"] == r["jacobi_minors"] == r["vandermonde_surjective"] == "pass" and r["mu_G"] == r["binomial"]
        for r in rows
    )
    certs = {"grid": Check("grid", ok)}
    return _bundle("grid", {"max_k": args.max_k}, certs, {"rows": rows}, args.convention, start)


COMMANDS = {
    "poly": cmd_poly,
    "milnor": cmd_milnor,
    "amodel": cmd_amodel,
    "solve": cmd_solve,
    "zeta": cmd_zeta,
    "pipeline": cmd_pipeline,
    "verify": cmd_verify,
    "grid": cmd_grid,
}


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gepner", description="Exact Saito structures for Gepner singularities.")
    parser.add_argument("--version", action="version", version=f"gepner {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kn=False, order=None, splitting=False):
        p.add_argument("--config", help="TOML file with option defaults")
        p.add_argument("--format", choices=["json", "text", "csv"], default=None)
        p.add_argument("--output", help="write to this path instead of stdout")
        p.add_argument("--convention", choices=CONVENTIONS, default=None)
        if kn:
            p.add_argument("--k", type=int)
            p.add_argument("--n", type=int)
        if order is not None:
            p.add_argument("--order", type=int, default=None)
        if splitting:
            p.add_argument("--splitting", default=None, help="monomial, weight-graded or a JSON matrix file")

    p = sub.add_parser("poly", help="print G_{k,n}")
    common(p, kn=True)
    p.add_argument("--check", action="store_true", help="verify G(sigma(x)) = sum x_i^k")
    p = sub.add_parser("milnor", help="Milnor algebra and residue pairing")
    common(p, order=1)
    p.add_argument("--poly", help="polynomial text or @file")
    p.add_argument("--vars", help="comma-separated variable order")
    p.add_argument("--family", action="store_true", help="also compute the versal family to --order")
    p = sub.add_parser("amodel", help="A_{k-1} Saito data with primitive form dz")
    common(p, order=4)
    p.add_argument("--k", type=int)
    p = sub.add_parser("solve", help="primitive form search on the Gepner unfolding")
    common(p, kn=True, order=2, splitting=True)
    p = sub.add_parser("zeta", help="assemble zeta and compare with the quotient structure")
    common(p, kn=True, order=2, splitting=True)
    p = sub.add_parser("pipeline", help="run the full quotient pipeline")
    common(p, kn=True, order=2, splitting=True)
    p.add_argument("--emit-all", action="store_true")
    p = sub.add_parser("verify", help="verify Frobenius or pre-Saito data from JSON")
    common(p, order=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--frobenius")
    p.add_argument("--presaito")
    p = sub.add_parser("grid", help="exact-sequence grid summary")
    common(p)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the grid")
    return parser


DEFAULTS = {
    "format": "json",
    "convention": UNIT_NORMALIZED,
    "order": 2,
    "splitting": "monomial",
    "max_k": 6,
}


def _apply_config(args):
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            cfg = tomli.load(fh)
        for key, value in cfg.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, attr) in (None, False):
                setattr(args, attr, value)
    if args.format is None and args.command == "grid":
        args.format = "csv"
    for attr, value in DEFAULTS.items():
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)
    if hasattr(args, "order") and args.order is not None and args.order < 0:
        raise UsageError("--order must be nonnegative")


def render(bundle: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(bundle, indent=2, default=_json_default) + "\n"
    if fmt == "csv":
        rows = bundle.get("data", {}).get("rows")
        if rows is None:
            rows = [
                {"certificate": name, "status": "pass" if c["passed" if "passed" in c else "status"] in (True, "pass") else "fail"}
                for name, c in bundle["certificates"].items()
            ]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()) if rows else GRID_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    lines = [f"gepner {bundle['command']}: {'PASS' if bundle['passed'] else 'FAIL'}"]
    data = bundle.get("data", {})
    for key in ("gepner", "polynomial"):
        if key in data:
            lines.append(f"  {key}: {data[key]['text']}")
    for key in ("dimension", "zeta", "free_parameters", "kappa_metric"):
        if key in data:
            lines.append(f"  {key}: {data[key]}")
    for name, c in bundle["certificates"].items():
        status = c.get("passed", c.get("status") == "pass")
        lines.append(f"  {name}: {'pass' if status in (True, 'pass') else 'fail'}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        bundle = COMMANDS[args.command](args)
    except (UsageError, OSError, tomli.TOMLDecodeError, json.JSONDecodeError) as exc:
        print(f"gepner: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(bundle, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if bundle["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
