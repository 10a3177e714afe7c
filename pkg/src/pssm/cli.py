"""Command-line front end.

Exit codes: 0 when the requested result is complete (fully solved, all
residuals zero), 2 when it is partial or a check fails, 1 on errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .errors import ModelError, PSSMError
from .expand import expand_pde
from .model import (builtin, builtin_names, format_problem, parse_problem, parse_seeds,
                    parse_support)
from .model.problem import ProblemSpec, Unknown
from .solve import SolvePolicy, load_candidate, solve_system, specialize, verify_assignment
from .verify import EvalGrid, OracleSpec, compare, eval_series, residual

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


class UsageError(PSSMError):
    pass


# ---------------------------------------------------------------- config helpers

def load_problem(args) -> ProblemSpec:
    if args.file:
        path = Path(args.file)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        try:
            p = parse_problem(text)
        except ModelError as exc:
            raise type(exc)(f"{path}: {exc}") from None
    elif args.problem:
        p = builtin(args.problem)
    else:
        raise UsageError("give --problem NAME or --file PATH")
    if args.order is not None:
        p = p.with_order(args.order)
    if args.seeds:
        p = p.with_seeds(parse_seeds(args.seeds))
    if args.match:
        p = p.with_match(parse_support(args.match, len(p.vars)))
    check_sets(args, p)
    return p


def check_sets(args, p: ProblemSpec):
    """Reject --set names that are not seeds or parameters of the problem."""
    allowed = set(p.params) | set(p.seed_symbols())
    if args.command == "verify":
        allowed |= {name for name, _, _ in p.coefficient_symbols()}
    for name in parse_sets(args.set):
        if name not in allowed:
            raise UsageError(f"--set {name}: not a seed or parameter of {p.name}")


def parse_sets(items) -> dict:
    out = {}
    for item in items or []:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"--set expects name=value, got {part!r}")
            k, v = (s.strip() for s in part.split("=", 1))
            if not k or not v:
                raise UsageError(f"--set expects name=value, got {part!r}")
            out[k] = v
    return out


def parse_policy(text: str | None) -> SolvePolicy:
    if not text:
        return SolvePolicy()
    opts = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError(f"--policy expects key=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        if k == "quadratic":
            if v not in ("on", "off"):
                raise UsageError("quadratic must be on or off")
            opts["allow_quadratic"] = v == "on"
        elif k == "branches":
            try:
                opts["max_branches"] = int(v)
            except ValueError:
                raise UsageError("branches must be an integer") from None
        elif k == "roots":
            opts["root_selection"] = v
        elif k == "generic":
            opts["generic_seeds"] = v == "on"
        else:
            raise UsageError(f"unknown policy key {k!r}")
    try:
        return SolvePolicy(**opts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def numeric(text: str):
    """Exact Fraction when the text is a rational literal, else float."""
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{text!r} is not a number") from None


def parse_var(text: str) -> tuple:
    """``x=a:b:step`` (inclusive) or ``x=value``."""
    if "=" not in text:
        raise UsageError(f"--var expects name=a:b:step, got {text!r}")
    name, spec = (s.strip() for s in text.split("=", 1))
    parts = spec.split(":")
    if len(parts) == 1:
        return name, [numeric(parts[0])]
    if len(parts) != 3:
        raise UsageError("--var range must be a:b:step")
    a, b, step = (numeric(s) for s in parts)
    if step <= 0:
        raise UsageError("--var step must be positive")
    count = int((b - a) / step + (Fraction(1, 10**9) if isinstance(step, float) else 0)) + 1
    if count < 1:
        raise UsageError("--var range is empty")
    return name, [a + i * step for i in range(count)]


def emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------- subcommands

def run_solve(args, p: ProblemSpec):
    r = solve_system(expand_pde(p), parse_policy(args.policy))
    sets = parse_sets(args.set)
    if sets:
        r = specialize(r, sets)
    return r


def cmd_solve(args) -> int:
    p = load_problem(args)
    r = run_solve(args, p)
    fmt = args.format or "json"
    if fmt == "json":
        emit(args, r.to_json())
    elif fmt == "csv":
        rows = ["symbol,value"] + [f'{k},"{v}"' for k, v in r.table().items()]
        emit(args, "\n".join(rows))
    else:
        emit(args, r.to_text())
    return EXIT_OK if r.complete else EXIT_PARTIAL


def cmd_verify(args) -> int:
    p = load_problem(args)
    system = expand_pde(p)
    try:
        text = Path(args.candidate).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.candidate}: {exc.strerror}") from None
    candidate = load_candidate(text)
    if args.fill_from_solver:
        r = solve_system(system, parse_policy(args.policy))
        for u in system.unknowns:
            if u not in candidate and u in r.assignments:
                candidate[u] = r.assignments[u].to_text()
    candidate.update(parse_sets(args.set))
    report = verify_assignment(system, candidate)
    fmt = args.format or "json"
    emit(args, dump_json(report.to_json_obj()) if fmt == "json" else report.to_text())
    if not report.all_zero:
        for c in report.failing():
            warn(f"nonzero residual at equation {c.equation}, monomial {list(c.monomial)}")
    return EXIT_OK if report.all_zero else EXIT_PARTIAL


def cmd_residual(args) -> int:
    p = load_problem(args)
    r = run_solve(args, p)
    report = residual(p, r)
    fmt = args.format or "json"
    emit(args, dump_json(report.to_json_obj()) if fmt == "json" else report.to_text())
    return EXIT_OK if report.all_zero and r.complete else EXIT_PARTIAL


def cmd_export(args) -> int:
    p = load_problem(args)
    s = expand_pde(p)
    fmt = args.format or "json"
    if fmt == "json":
        obj = {
            "schema": 1,
            "problem": p.name,
            "unknowns": s.unknowns,
            "seeds": s.seeds,
            "params": s.params,
            "equations": [{"equation": e.equation, "monomial": list(e.monomial), "poly": e.poly.to_text()}
                          for e in s.equations],
            "trivial": [{"equation": i, "monomial": list(m)} for i, m in s.trivial],
            "classification": s.classify().status,
        }
        emit(args, dump_json(obj))
    elif fmt == "csv":
        rows = ["equation,monomial,poly"]
        rows += [f'{e.equation},"{list(e.monomial)}","{e.poly.to_text()}"' for e in s.equations]
        emit(args, "\n".join(rows))
    else:
        lines = [format_problem(p).rstrip(), ""]
        lines += [f"{e.label()}: {e.poly.to_text()} = 0" for e in s.equations]
        lines.append(s.classify().to_text())
        emit(args, "\n".join(lines))
    return EXIT_OK


def _oracle(kind: str, p: ProblemSpec, unknown: Unknown, bindings: dict) -> OracleSpec:
    def need(name):
        if name not in bindings:
            raise UsageError(f"--oracle {kind} needs --set {name}=...")
        return bindings[name]

    if kind == "tan":
        return OracleSpec("burgers_tan", {"a1": need(unknown.symbol((1,))), "nu": need("nu")})
    if kind == "sech":
        return OracleSpec("kdv_sech", {"c": need("c"), "k": bindings.get("k", 1)})
    raise UsageError(f"unknown oracle {kind!r}; use tan or sech")


def cmd_eval(args) -> int:
    p = load_problem(args)
    r = solve_system(expand_pde(p), parse_policy(args.policy))
    bindings = {k: numeric(v) for k, v in parse_sets(args.set).items()}
    points = dict(parse_var(v) for v in args.var or [])
    name = args.unknown or p.unknowns[0].name
    try:
        unknown = p.unknown(name)
    except KeyError:
        raise UsageError(f"no unknown function {name!r}") from None
    shape = p.ansatz_series()[name]
    grid = EvalGrid(bindings, points, args.precision)
    fmt = args.format or "csv"
    if args.oracle:
        if len(p.vars) != 1:
            raise UsageError("--oracle needs a one-variable problem")
        report = compare(r, _oracle(args.oracle, p, unknown, bindings), shape, grid, args.workers)
        if fmt == "json":
            emit(args, dump_json({
                "schema": 1,
                "rows": [{"point": [float(v) for v in pt], "series": float(s), "oracle": o, "abserr": e}
                         for pt, s, o, e in report.rows],
                "max_abs_error": report.max_abs_error,
                "first_omitted_order": report.first_omitted_order,
            }))
        else:
            emit(args, report.to_csv(p.vars))
        return EXIT_OK
    rows = eval_series(r, shape, grid, args.workers)
    if fmt == "json":
        emit(args, dump_json({"schema": 1, "rows": [
            {"point": [float(v) for v in pt], "series": float(s)} for pt, s in rows]}))
    else:
        lines = [",".join(list(p.vars) + ["series"])]
        lines += [",".join([repr(float(v)) for v in pt] + [repr(float(s))]) for pt, s in rows]
        emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_list(args) -> int:
    names = builtin_names()
    if (args.format or "text") == "json":
        emit(args, dump_json(names))
    else:
        emit(args, "\n".join(names))
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def _color() -> bool:
    return os.environ.get("PSSM_COLOR", "0") == "1"


def warn(message: str):
    prefix = "\x1b[33mwarning:\x1b[0m" if _color() else "warning:"
    print(f"{prefix} {message}", file=sys.stderr)


def error(message: str):
    prefix = "\x1b[31merror:\x1b[0m" if _color() else "error:"
    print(f"{prefix} {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pssm", description="Truncated power-series solutions of nonlinear PDEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv", "text")):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--problem", help="built-in problem name (see 'pssm list')")
        src.add_argument("--file", help="path to a .pde problem file")
        sp.add_argument("--order", type=int, help="override the ansatz degree")
        sp.add_argument("--seeds", metavar="'U[0] U[1]'", help="override the free coefficients")
        sp.add_argument("--match", metavar="SUPPORT", help="override the matched monomials, e.g. 'total_degree 5'")
        sp.add_argument("--set", action="append", metavar="K=V,...", help="bind seeds or parameters")
        sp.add_argument("--format", choices=formats)
        sp.add_argument("--out", help="write output to this file")
        sp.add_argument("--policy", help="quadratic=on|off,branches=N")

    sp = sub.add_parser("solve", help="expand and solve, print the coefficient table")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="check a candidate coefficient table")
    common(sp, ("json", "text"))
    sp.add_argument("--candidate", required=True, help="JSON file with symbol -> value")
    sp.add_argument("--fill-from-solver", action="store_true",
                    help="take unknowns missing from the candidate from the solver")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("eval", help="evaluate the solved series on a grid")
    common(sp)
    sp.add_argument("--var", action="append", metavar="X=A:B:STEP", help="grid for one variable")
    sp.add_argument("--unknown", help="which unknown function to evaluate")
    sp.add_argument("--oracle", choices=("tan", "sech"))
    sp.add_argument("--precision", choices=("exact", "float64"), default="exact")
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("residual", help="recompute matched coefficients with the solution")
    common(sp, ("json", "text"))
    sp.set_defaults(func=cmd_residual)

    sp = sub.add_parser("export-system", help="print the matched polynomial system")
    common(sp)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("list", help="list built-in problems")
    sp.add_argument("--format", choices=("json", "text"))
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PSSMError as exc:
        error(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        error(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
