"""Command line: ``wavebif solve | branch | verify``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 the solver failed (the message names the error class).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from .bifurcation import BranchPoint, evaluate_point, solve_point, trace_branch
from .errors import ParameterError, WavebifError
from .params import ModelParams, parse_mass
from .spectral import kernel_field
from .verification import run_all

SCHEMA_VERSION = "1.0"

CSV_COLUMNS = ("rho", "alpha", "omega", "v_norm", "alpha_ratio",
               "resid_be1", "resid_be2", "resid_range", "resid_pde", "status")

_NUMBER = {"type": ["number", "null"]}

RESULT_SCHEMA = {
    "type": "object",
    "required": ["rho", "alpha", "omega", "omega_sq_shift", "v_norm", "alpha_ratio",
                 "residuals", "iterations", "status"],
    "properties": {
        "rho": {"type": "number"},
        "alpha": _NUMBER,
        "omega": _NUMBER,
        "omega_sq_shift": _NUMBER,
        "v_norm": _NUMBER,
        "alpha_ratio": _NUMBER,
        "residuals": {
            "type": "object",
            "required": ["be1", "be2", "range", "pde"],
            "properties": {k: _NUMBER for k in ("be1", "be2", "range", "pde")},
        },
        "iterations": {
            "type": "object",
            "required": ["outer", "range"],
            "properties": {"outer": {"type": "integer"}, "range": {"type": "integer"}},
        },
        "contraction_factor": _NUMBER,
        "in_ball": {"type": ["boolean", "null"]},
        "g_roots": {"type": "array", "items": {"type": "number"}},
        "status": {"type": "string"},
    },
}

SPECTRUM_SCHEMA = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [{"type": "integer"}, {"type": "integer", "minimum": 1},
                        {"type": "number"}, {"type": "number"}],
        "minItems": 4,
        "maxItems": 4,
    },
}

PARAMS_SCHEMA = {
    "type": "object",
    "required": ["p", "m", "m_token", "k0", "s", "nt", "nx", "W0", "W1",
                 "tol_range", "tol_bif", "max_iter", "rho_max"],
}

#: JSON document written by ``solve``.
SOLVE_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "params", "result", "spectrum"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "params": PARAMS_SCHEMA,
        "result": RESULT_SCHEMA,
        "spectrum": SPECTRUM_SCHEMA,
    },
}

#: JSON document written by ``branch --format json``.
BRANCH_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "params", "points"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "params": PARAMS_SCHEMA,
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["result", "spectrum"],
                "properties": {"result": RESULT_SCHEMA, "spectrum": SPECTRUM_SCHEMA},
            },
        },
    },
}


class UsageError(Exception):
    """Invalid flag combination (exit code 2)."""


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def params_to_dict(params):
    return dict(p=params.p, m=params.m, m_token=params.m_token, k0=params.k0, s=params.s,
                nt=params.trunc_t, nx=params.trunc_x, W0=params.W0, W1=params.W1,
                tol_range=params.tol_range, tol_bif=params.tol_bif,
                max_iter=params.max_iter, rho_max=params.rho_max)


def point_to_dict(pt, params):
    return dict(
        rho=pt.rho, alpha=_num(pt.alpha), omega=_num(pt.omega),
        omega_sq_shift=_num(pt.omega_sq_shift), v_norm=_num(pt.v_norm),
        alpha_ratio=_num(pt.alpha_ratio(params.p)) if pt.converged else None,
        residuals=dict(be1=_num(pt.resid_be1), be2=_num(pt.resid_be2),
                       range=_num(pt.resid_range), pde=_num(pt.resid_pde)),
        iterations=dict(outer=int(pt.iterations_outer), range=int(pt.range_iterations)),
        contraction_factor=_num(pt.contraction_factor),
        in_ball=bool(pt.in_ball) if pt.converged else None,
        g_roots=[float(r) for r in pt.g_roots],
        status=pt.status,
    )


def spectrum_rows(pt, params):
    """Nonzero coefficients of ``u = rho cos t sin x + v`` as ``[n, k, re, im]``, sorted by (k, n)."""
    if pt.v is None:
        return []
    u = kernel_field(pt.rho, params.trunc_t, params.trunc_x) + pt.v
    rows = [[n, k, c.real, c.imag] for (n, k), c in u.items() if c != 0]
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows


def point_document(pt, params):
    return dict(result=point_to_dict(pt, params), spectrum=spectrum_rows(pt, params))


def solve_document(pt, params):
    return dict(schema_version=SCHEMA_VERSION, params=params_to_dict(params),
                **point_document(pt, params))


def csv_row(pt, params):
    d = point_to_dict(pt, params)
    r = d["residuals"]
    vals = [d["rho"], d["alpha"], d["omega"], d["v_norm"], d["alpha_ratio"],
            r["be1"], r["be2"], r["range"], r["pde"]]
    return [("" if v is None else repr(float(v))) for v in vals] + [d["status"]]


def branch_csv(points, params):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        w.writerow(csv_row(pt, params))
    return buf.getvalue()


def _check_resume_params(doc, params):
    stored = doc.get("params")
    if stored != params_to_dict(params):
        raise UsageError("resume file was written with different parameters")


def resume_point(result, params):
    """Rebuild a branch point from a stored ``result`` dict."""
    if result["status"] != "converged":
        nan = float("nan")
        return BranchPoint(result["rho"], nan, nan, nan, nan, nan, nan, nan, 0, status=result["status"])
    return evaluate_point(result["rho"], result["alpha"], result["omega_sq_shift"], params,
                          iterations_outer=result["iterations"]["outer"],
                          g_roots=result.get("g_roots", ()))


def build_params(args):
    try:
        m, token = parse_mass(args.m)
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    kwargs = dict(p=args.p, m=m, m_token=token, k0=args.k0,
                  trunc_t=args.nt, trunc_x=args.nx, tol_range=args.tol_range,
                  tol_bif=args.tol_bif, max_iter=args.max_iter)
    if args.s is not None:
        kwargs["s"] = args.s
    return ModelParams(**kwargs)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(doc):
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read resume file {path}: {exc}") from exc


def cmd_solve(args):
    params = build_params(args)
    if args.rho is None:
        raise UsageError("--rho is required")
    if not (args.rho > 0 and math.isfinite(args.rho)):
        raise UsageError(f"rho must be positive, got {args.rho}")
    if args.resume:
        doc = _load_json(args.resume)
        _check_resume_params(doc, params)
        if doc["result"]["rho"] != args.rho:
            raise UsageError("resume file was written for a different rho")
        pt = resume_point(doc["result"], params)
    else:
        pt = solve_point(args.rho, params)
    _emit(_dump_json(solve_document(pt, params)), args.out)
    return 0


def rho_grid(rho_min, rho_max, points):
    if points == 1:
        if rho_min != rho_max:
            raise UsageError("a single-point sweep needs --rho-min equal to --rho-max")
        return [rho_max]
    if points < 1:
        raise UsageError("--points must be >= 1")
    if not (0 < rho_min < rho_max):
        raise UsageError("need 0 < --rho-min < --rho-max")
    # descending: continuation starts at the largest amplitude
    return list(np.logspace(math.log10(rho_max), math.log10(rho_min), points))


def cmd_branch(args):
    params = build_params(args)
    if args.rho_min is None or args.rho_max is None:
        raise UsageError("--rho-min and --rho-max are required")
    grid = rho_grid(args.rho_min, args.rho_max, args.points)
    if args.resume:
        doc = _load_json(args.resume)
        _check_resume_params(doc, params)
        stored = [p["result"] for p in doc["points"]]
        if [r["rho"] for r in stored] != [float(r) for r in grid]:
            raise UsageError("resume file was written for a different rho grid")
        points = [resume_point(r, params) for r in stored]
    else:
        points = trace_branch([float(r) for r in grid], params)
    if args.format == "json":
        doc = dict(schema_version=SCHEMA_VERSION, params=params_to_dict(params),
                   points=[point_document(pt, params) for pt in points])
        _emit(_dump_json(doc), args.out)
    else:
        _emit(branch_csv(points, params), args.out)
    for pt in points:
        if not pt.converged:
            print(f"rho={pt.rho:g}: {pt.status}", file=sys.stderr)
    return 0 if any(pt.converged for pt in points) else 3


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _num(x)
    return x


def cmd_verify(args):
    params = build_params(args)
    results = run_all(params, quick=args.quick)
    failed = [r.name for r in results if r.status == "fail"]
    report = dict(schema_version=SCHEMA_VERSION, params=params_to_dict(params),
                  checks=[dict(name=r.name, status=r.status, seconds=r.seconds,
                               detail=_jsonable(r.detail)) for r in results],
                  failed=failed)
    if args.format == "json":
        _emit(_dump_json(report), args.out)
    else:
        for r in results:
            print(r.line())
        print("all checks passed" if not failed else "FAILED: " + ", ".join(failed))
        if args.out:
            _emit(_dump_json(report), args.out)
    return 1 if failed else 0


def make_parser():
    parser = argparse.ArgumentParser(
        prog="wavebif",
        description="Periodic solutions of a damped nonlinear wave equation near the first resonance.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=1, help="nonlinearity degree is 2p+1 (default 1)")
    common.add_argument("--m", default="sqrt2",
                        help="mass: a decimal or one of sqrt2, e-2, pi-3 (default sqrt2)")
    common.add_argument("--k0", type=int, default=2, help="target smoothness C^k0 (default 2)")
    common.add_argument("--s", type=float, default=None, help="Sobolev index (default k0+10)")
    common.add_argument("--nt", type=int, default=64, help="time truncation (default 64)")
    common.add_argument("--nx", type=int, default=64, help="space truncation (default 64)")
    common.add_argument("--tol-range", type=float, default=1e-10)
    common.add_argument("--tol-bif", type=float, default=1e-8)
    common.add_argument("--max-iter", type=int, default=200)
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p_solve = sub.add_parser("solve", parents=[common], help="solve one amplitude, write JSON")
    p_solve.add_argument("--rho", type=float, default=None)
    p_solve.add_argument("--format", choices=["json"], default="json")
    p_solve.add_argument("--resume", default=None, help="JSON from an earlier solve to re-evaluate")
    p_solve.set_defaults(func=cmd_solve)

    p_branch = sub.add_parser("branch", parents=[common], help="log-spaced amplitude sweep")
    p_branch.add_argument("--rho-min", type=float, default=None)
    p_branch.add_argument("--rho-max", type=float, default=None)
    p_branch.add_argument("--points", type=int, default=5)
    p_branch.add_argument("--format", choices=["csv", "json"], default="csv")
    p_branch.add_argument("--resume", default=None, help="JSON from an earlier branch to re-evaluate")
    p_branch.set_defaults(func=cmd_branch)

    p_verify = sub.add_parser("verify", parents=[common], help="run the verification checks")
    p_verify.add_argument("--quick", action="store_true", help="cheap checks only")
    p_verify.add_argument("--format", choices=["text", "json"], default="text")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except WavebifError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
