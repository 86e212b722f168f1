"""Command-line frontend: solve, check, gen, oracle, bench.

Exit codes (stable): 0 solved/feasible or success, 1 no solution within
budget, 2 infeasible detected, 3 input error, 4 internal error.  Diagnostics
go to stderr as a single line; stdout carries the machine-readable output
when --json or CSV is requested.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

from . import ingest, model, oracle
from .circuit import build_circuit
from .dynamics import PARAM_NAMES, DynParams, TraceWriter
from .solver import (
    INFEASIBLE_NOT_PROVEN,
    TRIVIALLY_INFEASIBLE,
    SolverConfig,
    solve_optimize,
)

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    pass


def _fail(msg: str) -> "InputError":
    return InputError(msg)


def load_problem(path: str, fmt: str | None = None) -> model.IlpProblem:
    p = Path(path)
    if fmt is None:
        fmt = "mps" if p.suffix.lower() == ".mps" else "json"
    try:
        text = p.read_text()
    except OSError as e:
        raise _fail(f"{path}: {e.strerror or e}") from None
    try:
        problem = ingest.parse_mps(text) if fmt == "mps" else ingest.parse_json(text)
    except ingest.ParseError as e:
        raise _fail(f"{path}:{e.line}: {e.reason}") from None
    except (ingest.UnsupportedError, ingest.SchemaError) as e:
        raise _fail(f"{path}: {e}") from None
    defects = model.validate(problem)
    if defects:
        raise _fail(f"{path}: " + "; ".join(str(d) for d in defects))
    return problem


def _parse_params(pairs: list[str]) -> DynParams:
    kw = {}
    for pair in pairs:
        if "=" not in pair:
            raise _fail(f"--param expects name=value, got {pair!r}")
        name, _, value = pair.partition("=")
        if name not in PARAM_NAMES:
            raise _fail(f"unknown parameter {name!r} (choose from {', '.join(PARAM_NAMES)})")
        try:
            kw[name] = int(value) if name == "check_every" else float(value)
        except ValueError:
            raise _fail(f"bad value for {name!r}: {value!r}") from None
    try:
        return DynParams(**kw)
    except ValueError as e:
        raise _fail(str(e)) from None


def cmd_solve(args) -> int:
    problem = load_problem(args.file, args.format)
    try:
        cp = model.canonicalize(problem)
    except model.ModelError as e:
        raise _fail(f"{args.file}: {e}") from None
    params = _parse_params(args.param)
    config = SolverConfig(
        params=params,
        restarts=args.restarts,
        seed=args.seed,
        max_steps_per_run=args.max_steps,
        total_max_steps=args.total_max_steps,
        wall_time_total=args.time_limit,
        granularity=args.granularity,
        warm_start=args.warm_start,
        threads=args.threads if args.threads else (os.cpu_count() or 1),
    )

    if args.trace:
        # Tracing covers a single deterministic trajectory (the base seed,
        # unbounded pass); the full solve then proceeds normally.
        from .dynamics import Budget, integrate

        with open(args.trace, "w") as trace_fh:
            trace = TraceWriter(trace_fh, cp.n, full=args.trace_full)
            circuit = build_circuit(cp)
            if circuit.trivially_infeasible is None:
                integrate(circuit, cp, params, args.seed, Budget(args.max_steps), trace=trace)

    report = solve_optimize(cp, config)

    if args.json:
        sys.stdout.write(report.to_json())
    else:
        print(f"instance: {problem.name or args.file}  n={cp.n} rows={len(cp.rows)}")
        print(f"params: dt={params.dt:g} alpha={params.alpha:g} beta={params.beta:g} "
              f"gamma={params.gamma:g} delta={params.delta:g} epsilon={params.epsilon:g} "
              f"zeta={params.zeta:g} dv_max={params.dv_max:g} xl_max={params.xl_max:g} "
              f"check_every={params.check_every}")
        for inc in report.history:
            bound = "none" if math.isinf(inc.bound) else f"<={inc.bound:g}"
            print(f"incumbent {inc.objective:<12g} bound {bound:<10} "
                  f"seed {inc.seed} steps {inc.steps} t={inc.found_at:.3f}s")
        print(f"verdict: {report.verdict}  steps={report.budget.steps} wall={report.budget.wall_s:.3f}s")
        if report.best:
            print(f"best objective: {report.best.objective:g}")
            items = " ".join(f"{k}={v}" for k, v in sorted(report.best.assignment.items()))
            print(f"assignment: {items}")

    if report.verdict == TRIVIALLY_INFEASIBLE:
        return EXIT_INFEASIBLE
    if report.verdict == INFEASIBLE_NOT_PROVEN:
        return EXIT_NO_SOLUTION
    return EXIT_OK


def cmd_check(args) -> int:
    problem = load_problem(args.file, args.format)
    try:
        values, _ = ingest.parse_solution(Path(args.solution).read_text())
    except OSError as e:
        raise _fail(f"{args.solution}: {e.strerror or e}") from None
    except (ingest.ParseError, ingest.SchemaError) as e:
        raise _fail(f"{args.solution}: {e}") from None
    missing = [v.name for v in problem.variables if v.name not in values]
    if missing:
        raise _fail(f"{args.solution}: assignment missing variable(s) {', '.join(missing)}")
    unknown = [k for k in values if all(v.name != k for v in problem.variables)]
    if unknown:
        raise _fail(f"{args.solution}: unknown variable(s) {', '.join(unknown)}")
    feasible, objective, violated = model.evaluate_original(problem, values)
    if feasible:
        print(f"feasible, objective {objective:g}")
        return EXIT_OK
    print(f"infeasible, violated: {', '.join(violated)}")
    return EXIT_INFEASIBLE


def cmd_gen(args) -> int:
    try:
        spec = ingest.GenSpec(
            kind=args.kind,
            n=args.n,
            m=args.m,
            density=args.density,
            coeff_lo=args.coeff_lo,
            coeff_hi=args.coeff_hi,
            seed=args.seed,
        )
    except ValueError as e:
        raise _fail(str(e)) from None
    problem, witness = ingest.generate_validated(spec)
    out = Path(args.out) if args.out else Path(f"{problem.name}.json")
    out.write_text(ingest.write_json(problem))
    print(f"wrote {out}")
    if witness is not None:
        _, objective, _ = model.evaluate_original(problem, witness)
        wpath = out.with_suffix(".witness.json")
        wpath.write_text(ingest.write_solution(witness, objective))
        print(f"wrote {wpath}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    problem = load_problem(args.file, args.format)
    try:
        cp = model.canonicalize(problem)
    except model.ModelError as e:
        raise _fail(f"{args.file}: {e}") from None
    try:
        if args.method == "enum":
            result = oracle.enumerate_optimum(cp)
        else:
            result = oracle.branch_and_bound(cp)
    except oracle.TooLargeError as e:
        raise _fail(str(e)) from None
    if result.status == oracle.INFEASIBLE:
        print("infeasible")
        return EXIT_INFEASIBLE
    value = model.original_objective_value(cp, result.value)
    decoded = model.decode(cp.var_map, result.witness)
    print(f"optimum {value:g}")
    print("assignment: " + " ".join(f"{k}={v}" for k, v in sorted(decoded.items())))
    return EXIT_OK


BENCH_HEADER = "instance,n,m,nnz,status,best,oracle_opt,wall_s,steps"


def cmd_bench(args) -> int:
    d = Path(args.dir)
    if not d.is_dir():
        raise _fail(f"{args.dir}: not a directory")
    files = sorted(p for p in d.iterdir() if p.suffix.lower() in (".json", ".mps"))
    print(BENCH_HEADER)
    for path in files:
        problem = load_problem(str(path))
        cp = model.canonicalize(problem)
        nnz = sum(len(r.coeffs) for r in cp.rows)
        config = SolverConfig(
            params=_parse_params(args.param),
            restarts=args.restarts,
            seed=args.seed,
            max_steps_per_run=args.max_steps,
            total_max_steps=args.total_max_steps,
            wall_time_total=args.time_limit,
            threads=args.threads if args.threads else (os.cpu_count() or 1),
        )
        t0 = time.monotonic()
        report = solve_optimize(cp, config)
        wall = time.monotonic() - t0
        best = f"{report.best.objective:g}" if report.best else ""
        oracle_opt = ""
        if args.with_oracle:
            try:
                result = oracle.branch_and_bound(cp)
                if result.status == oracle.OPTIMAL:
                    oracle_opt = f"{model.original_objective_value(cp, result.value):g}"
                else:
                    oracle_opt = "infeasible"
            except oracle.TooLargeError:
                oracle_opt = ""
        print(
            f"{path.name},{cp.n},{len(cp.rows)},{nnz},{report.verdict},"
            f"{best},{oracle_opt},{wall:.3f},{report.budget.steps}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soac",
        description="0-1 ILP solver emulating self-organizing algebraic circuits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("mps", "json"), default=None,
                       help="input format (default: by extension)")

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("file")
    add_common(p)
    p.add_argument("--time-limit", type=float, default=None, metavar="S")
    p.add_argument("--max-steps", type=int, default=100_000, metavar="N",
                   help="steps per trajectory")
    p.add_argument("--total-max-steps", type=int, default=None, metavar="N")
    p.add_argument("--restarts", type=int, default=4, metavar="R")
    p.add_argument("--seed", type=int, default=0, metavar="K")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--granularity", type=float, default=None, metavar="G")
    p.add_argument("--warm-start", action="store_true")
    p.add_argument("--threads", type=int, default=0,
                   help="trajectory parallelism cap (0 = machine)")
    p.add_argument("--trace", default=None, metavar="FILE",
                   help="write a CSV trace of the base-seed trajectory to FILE")
    p.add_argument("--trace-full", action="store_true",
                   help="include all voltages in the trace rows")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a solution file against an instance")
    p.add_argument("file")
    p.add_argument("solution")
    add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a test instance")
    p.add_argument("kind", choices=(ingest.PLANTED, ingest.SET_COVER, ingest.KNAPSACK))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--coeff-lo", type=int, default=1)
    p.add_argument("--coeff-hi", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="exact optimum by enumeration or branch-and-bound")
    p.add_argument("file")
    add_common(p)
    p.add_argument("--method", choices=("enum", "bnb"), default="bnb")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="solve every instance in a directory; CSV to stdout")
    p.add_argument("dir")
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--time-limit", type=float, default=None, metavar="S")
    p.add_argument("--max-steps", type=int, default=20_000, metavar="N")
    p.add_argument("--total-max-steps", type=int, default=None, metavar="N")
    p.add_argument("--restarts", type=int, default=4, metavar="R")
    p.add_argument("--seed", type=int, default=0, metavar="K")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--threads", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        return EXIT_OK
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
