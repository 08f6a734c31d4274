"""Command-line front end: ``nabla-dfc {special,dfc,rl,solve,verify}``.

Exit status: 0 success, 1 computation error, 2 usage error, 3 verification
failure. ``NABLA_DFC_TOL`` overrides every pass/fail tolerance used by
``verify`` (residual 1e-8, representation 1e-6, identity checks as listed
in verify.IDENTITY_TOLERANCES).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import dfc, special
from .errors import DFCError
from .rl import ExpPowerTerm, rl_apply, rl_exp_power_closed_form, rl_integral_quadrature
from .schrodinger import (
    BRANCHES,
    EquationParams,
    PhysicalParams,
    construct_all,
    construct_solution,
    derive_branches,
    map_physical,
    solution_from_document,
    solution_to_document,
)
from .seqio import SequenceFormatError, read_sequence
from .verify import DEFAULT_GRID, IDENTITY_TOLERANCES, identity_suite, ode_residual, representation_equivalence
from .worked_examples import EQUIVALENCE_GRID, EQUIVALENCE_TOL, RESIDUAL_TOL, run_example

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3
TOL_ENV = "NABLA_DFC_TOL"


class UsageError(Exception):
    pass


def _tolerance_override() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        tol = float(raw)
    except ValueError as exc:
        raise UsageError(f"{TOL_ENV} must be a number, got {raw!r}") from exc
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def _parse_grid(spec: str | None) -> tuple[float, ...]:
    if spec is None:
        return DEFAULT_GRID
    try:
        start, stop, n = spec.split(":")
        grid = np.linspace(float(start), float(stop), int(n))
    except ValueError as exc:
        raise UsageError(f"--grid expects start:stop:n, got {spec!r}") from exc
    if len(grid) < 1 or grid[0] <= 0:
        raise UsageError("--grid must be strictly positive")
    return tuple(float(r) for r in grid)


# --------------------------------------------------------------------------
# subcommands


def _cmd_special(args) -> tuple[dict, int]:
    fn = args.function
    vals = args.args
    expected = {"gamma": 1, "lgamma": 1, "binom": 2, "1f1": 3}[fn]
    if len(vals) != expected:
        raise UsageError(f"special {fn} takes {expected} argument(s), got {len(vals)}")
    try:
        nums = [float(v) for v in vals]
    except ValueError as exc:
        raise UsageError(f"non-numeric argument in {vals}") from exc
    if fn == "gamma":
        value = special.gamma(nums[0])
    elif fn == "lgamma":
        value = special.log_gamma(nums[0])
    elif fn == "binom":
        if nums[1] != int(nums[1]) or nums[1] < 0:
            raise UsageError("binom n must be a nonnegative integer")
        value = special.binomial_general(nums[0], int(nums[1]))
    else:
        value = special.kummer_1f1(*nums)
    return {"function": fn, "args": nums, "value": value}, EXIT_OK


def _grid_input(args, which: str) -> dfc.GridFunction:
    path = getattr(args, "input" if which == "U" else "input_y")
    const = getattr(args, "const" if which == "U" else "const_y")
    if path is not None:
        try:
            U = read_sequence(path)
        except (OSError, SequenceFormatError) as exc:
            raise UsageError(str(exc)) from exc
        return U
    if const is None:
        flag = "--input/--const" if which == "U" else "--input-y/--const-y"
        raise UsageError(f"dfc {args.operation} needs {flag}")
    if args.t < args.base:
        raise UsageError("--t must not precede --base")
    return dfc.GridFunction.constant(const, args.base, args.t)


def _cmd_dfc(args) -> tuple[dict, int]:
    U = _grid_input(args, "U")
    nu = args.nu
    if args.operation == "sum":
        fn = lambda t: dfc.fractional_sum(U, nu, t)  # noqa: E731
        first = U.base
    elif args.operation == "diff":
        fn = lambda t: dfc.fractional_difference(U, nu, t)  # noqa: E731
        first = U.base + math.ceil(nu)
    else:
        Y = _grid_input(args, "Y")
        if args.input is None:
            U = dfc.GridFunction.constant(args.const, 0, args.t)
        fn = lambda t: dfc.leibniz_difference(U, Y, nu, t)  # noqa: E731
        first = max(1, math.ceil(nu))
    value = fn(args.t)
    rows = [{"t": t, "value": fn(t)} for t in range(first, args.t + 1)]
    return {
        "operation": args.operation,
        "nu": nu,
        "base": U.base,
        "t": args.t,
        "value": value,
        "rows": rows,
    }, EXIT_OK


def _cmd_rl(args) -> tuple[dict, int]:
    if args.operation == "integrate":
        if args.mu is None:
            raise UsageError("rl integrate needs --mu")
        closed = rl_exp_power_closed_form(args.c, args.p, args.mu)
        doc = {"c": args.c, "p": args.p, "mu": args.mu, "closed_form": closed.to_dict()}
        if args.r is not None:
            doc["r"] = args.r
            doc["value"] = closed.evaluate(args.r)
            if args.quadrature:
                q = rl_integral_quadrature(ExpPowerTerm(1.0, args.c, args.p), args.mu, args.r)
                doc["quadrature"] = q
                doc["abs_difference"] = abs(q - doc["value"])
        return doc, EXIT_OK
    if args.order is None:
        raise UsageError("rl apply needs --order")
    result = rl_apply(ExpPowerTerm(1.0, args.c, args.p), args.order)
    doc = {"c": args.c, "p": args.p, "order": args.order, "result": result.to_dict()}
    if args.r is not None:
        doc["r"] = args.r
        doc["value"] = result.evaluate(args.r)
    return doc, EXIT_OK


def _equation_from_args(args) -> EquationParams:
    if args.physical:
        missing = [f for f in ("m", "hbar", "epsilon", "a", "b", "c", "ell") if getattr(args, f) is None]
        if missing:
            raise UsageError("--physical needs " + ", ".join("--" + m for m in missing))
        return map_physical(
            PhysicalParams(args.m, args.hbar, args.epsilon, args.a, args.b, args.c, args.ell, args.rho)
        )
    missing = [f for f in ("alpha_sq", "beta", "gamma", "delta") if getattr(args, f) is None]
    if missing:
        raise UsageError("solve needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return EquationParams(args.alpha_sq, args.beta, args.gamma, args.delta, args.rho)


def _with_values(doc: dict, sr, grid) -> dict:
    if grid is not None:
        doc["values"] = [{"r": r, "value": sr(r)} for r in grid]
    return doc


def _cmd_solve(args) -> tuple[dict, int]:
    ep = _equation_from_args(args)
    bd = derive_branches(ep, args.rate_override)
    grid = _parse_grid(args.grid) if args.grid else None
    if args.branch is not None:
        sr = construct_solution(bd, args.branch)
        doc = _with_values(solution_to_document(sr), sr, grid)
        if grid is not None:
            doc["rows"] = doc["values"]
        return doc, EXIT_OK
    solutions, unavailable = [], {}
    for b, item in construct_all(bd).items():
        if isinstance(item, Exception):
            unavailable[b] = str(item)
        else:
            solutions.append(_with_values(solution_to_document(item), item, grid))
    return {
        "equation": bd.equation.to_dict(),
        "derivation": bd.to_dict(),
        "solutions": solutions,
        "unavailable": unavailable,
    }, EXIT_OK


def _suite_doc(seed: int, trials: int, tol: float | None) -> dict:
    tolerances = {k: tol for k in IDENTITY_TOLERANCES} if tol is not None else None
    return identity_suite(seed, trials, tolerances=tolerances).to_dict()


def _cmd_verify(args) -> tuple[dict, int]:
    tol = _tolerance_override()
    grid = _parse_grid(args.grid)
    residual_tol = tol if tol is not None else RESIDUAL_TOL
    equiv_tol = tol if tol is not None else EQUIVALENCE_TOL
    doc: dict = {}
    ok = True
    if args.example is not None:
        report = run_example(args.example, grid, residual_tol, equiv_tol)
        doc = report.to_dict()
        ok = report.passed
    elif args.solution is not None:
        try:
            sr = solution_from_document(json.loads(Path(args.solution).read_text()))
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read solution document: {exc}") from exc
        res = ode_residual(sr.equation, sr, grid)
        checks = [{
            "name": "residual",
            "max_error": res.relative_max,
            "tolerance": residual_tol,
            "pass": res.relative_max <= residual_tol,
        }]
        order = sr.fractional_form.order
        if order < 0 or order == math.floor(order):
            eq = representation_equivalence(sr, EQUIVALENCE_GRID if order < 0 else grid, equiv_tol)
            checks.append({
                "name": "representation",
                "max_error": eq.max_deviation,
                "tolerance": equiv_tol,
                "pass": eq.agree,
            })
        ok = all(c["pass"] for c in checks)
        doc = {"solution": args.solution, "branch": sr.branch, "checks": checks, "pass": ok}
    run_suite = (args.example is None and args.solution is None) or args.trials is not None
    if run_suite:
        suite = _suite_doc(args.seed, args.trials or 200, tol)
        doc["identity_suite"] = suite
        ok = ok and suite["pass"]
    doc["pass"] = ok
    return doc, EXIT_OK if ok else EXIT_VERIFY


# --------------------------------------------------------------------------
# argument parsing and rendering


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the result document here instead of stdout")

    parser = argparse.ArgumentParser(prog="nabla-dfc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("special", parents=[common], help="gamma, log-gamma, binomial, 1F1")
    sp.add_argument("function", choices=("gamma", "lgamma", "binom", "1f1"))
    sp.add_argument("args", nargs="*")
    sp.set_defaults(handler=_cmd_special)

    dp = sub.add_parser("dfc", parents=[common], help="nabla fractional sum/difference/Leibniz")
    dp.add_argument("operation", choices=("sum", "diff", "leibniz"))
    dp.add_argument("--nu", type=float, required=True)
    dp.add_argument("--base", type=int, default=0)
    dp.add_argument("--t", type=int, required=True)
    src = dp.add_mutually_exclusive_group()
    src.add_argument("--input", help="sequence file (.csv with t,value or .json)")
    src.add_argument("--const", type=float)
    src_y = dp.add_mutually_exclusive_group()
    src_y.add_argument("--input-y", help="second factor for leibniz")
    src_y.add_argument("--const-y", type=float)
    dp.set_defaults(handler=_cmd_dfc)

    rp = sub.add_parser("rl", parents=[common], help="Riemann-Liouville operators on e^{cr} r^p")
    rp.add_argument("operation", choices=("integrate", "apply"))
    rp.add_argument("--c", type=float, required=True)
    rp.add_argument("--p", type=float, required=True)
    rp.add_argument("--mu", type=float)
    rp.add_argument("--order", type=float)
    rp.add_argument("--r", type=float)
    rp.add_argument("--quadrature", action="store_true")
    rp.set_defaults(handler=_cmd_rl)

    sv = sub.add_parser("solve", parents=[common], help="particular solutions of the radial equation")
    sv.add_argument("--rho", type=int, choices=(0, -1, -2), required=True)
    sv.add_argument("--alpha-sq", type=float)
    sv.add_argument("--beta", type=float)
    sv.add_argument("--gamma", type=float)
    sv.add_argument("--delta", type=float)
    sv.add_argument("--branch", choices=BRANCHES)
    sv.add_argument(
        "--paper-eta", "--rate-override", dest="rate_override", type=float,
        help="take this exponential rate as given and rebuild the r^2 coefficient to match",
    )
    sv.add_argument("--grid", help="also evaluate on start:stop:n")
    sv.add_argument("--physical", action="store_true")
    for name in ("m", "hbar", "epsilon", "a", "b", "c"):
        sv.add_argument("--" + name, type=float)
    sv.add_argument("--ell", type=int)
    sv.set_defaults(handler=_cmd_solve)

    vp = sub.add_parser("verify", parents=[common], help="run verification checks")
    target = vp.add_mutually_exclusive_group()
    target.add_argument("--example", type=int, choices=(1, 2, 3))
    target.add_argument("--solution", help="solution document written by solve")
    vp.add_argument("--grid")
    vp.add_argument("--seed", type=int, default=42)
    vp.add_argument("--trials", type=int)
    vp.set_defaults(handler=_cmd_verify)
    return parser


def _flatten(doc, prefix=""):
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], doc


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "text":
        if "value" in doc:
            return f"{doc['value']!r}\n"
        return "".join(f"{k}: {v}\n" for k, v in _flatten(doc))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = doc.get("rows")
    if rows:
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(doc):
            w.writerow([k, v])
    return buf.getvalue()


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        doc, status = args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DFCError, OverflowError, ZeroDivisionError) as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = render(doc, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
