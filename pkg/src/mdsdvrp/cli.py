"""Command-line interface: solve, verify, gen, bench."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .instance import (
    SCALE,
    GenerationError,
    InstanceFormatError,
    MalformedSolutionError,
    MetricInstance,
    Solution,
    check_solution,
    generate_instance,
    parse_instance,
    validate_instance,
    write_instance,
)
from .oracle import OracleRefusal, ratio_of, solve_exact
from .solvers import BIFACTOR, SOLVER_NAMES, SolverDiagnostic, SolverResult, run_solver

EXIT_OK, EXIT_IO, EXIT_DIAGNOSTIC, EXIT_VIOLATION = 0, 1, 2, 3


def fmt_rational(x) -> Optional[str]:
    """Exact decimal when the expansion terminates, otherwise ``p/q``."""
    if x is None:
        return None
    if isinstance(x, float):
        return "inf" if x == float("inf") else repr(x)
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled.numerator), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")


def positive_rational(text: str) -> Fraction:
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


@dataclass(frozen=True)
class RunConfig:
    command: str
    paths: tuple[str, ...]
    solver: str = "alg3"
    eps: Fraction = Fraction(1)
    mdtsp: str = "forest2"
    max_iters: Optional[int] = None
    fmt: str = "json"
    seed: int = 0
    timing: bool = False


def load_instance(path: str) -> MetricInstance:
    text = Path(path).read_text()
    inst = parse_instance(text)
    bad = validate_instance(inst)
    if bad:
        raise InstanceFormatError(0, "invalid instance: " + "; ".join(map(str, bad[:5])))
    return inst


def solve_report(inst: MetricInstance, res: SolverResult, wall: Optional[float] = None) -> dict:
    audit = check_solution(inst, res.solution, res.gamma)
    certs = res.certificates
    report = {
        "solver": res.solver,
        "scale": SCALE,
        "cost": res.cost,
        "feasible": audit.feasible,
        "claimed_ratio": fmt_rational(res.claimed_ratio),
        "gamma": fmt_rational(res.gamma),
        "iterations_run": res.iterations_run,
        "iterations_enumerated": res.iterations_enumerated,
        "guarantee_void": res.guarantee_void,
        "vehicles_used": audit.vehicles_used,
        "max_load_ratio": fmt_rational(audit.max_load_ratio),
        "transform_certificates": {
            "calls": len(certs),
            "bound_ok": all(c.bound_ok for c in certs),
            "vehicles_ok": all(c.vehicles_ok for c in certs),
        },
        "notes": list(res.notes),
        "solution": res.solution.to_json(inst),
    }
    if wall is not None:
        report["wall_time_s"] = round(wall, 6)
    return report


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    elif fmt == "csv":
        cols = ["solver", "cost", "feasible", "claimed_ratio", "gamma", "iterations_run", "vehicles_used"]
        if "wall_time_s" in report:
            cols.append("wall_time_s")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        w.writerow([report[c] for c in cols])
    else:
        out.write(f"solver      {report['solver']}\n")
        out.write(f"cost        {Fraction(report['cost'], SCALE)} ({report['cost']} / {SCALE})\n")
        out.write(f"feasible    {report['feasible']}  gamma {report['gamma']}\n")
        out.write(f"ratio claim {report['claimed_ratio']}\n")
        out.write(f"iterations  {report['iterations_run']} of {report['iterations_enumerated']}\n")
        for t in report["solution"]["tours"]:
            out.write(f"  vehicle {t['vehicle']} depot {t['depot']}: {'-'.join(map(str, t['seq']))} {t['lambda']}\n")


def cmd_solve(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    try:
        inst = load_instance(cfg.paths[0])
    except (OSError, InstanceFormatError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    start = time.perf_counter()
    try:
        res = run_solver(cfg.solver, inst, cfg.eps, cfg.mdtsp, cfg.max_iters)
    except SolverDiagnostic as exc:
        err.write(f"diagnostic: {exc}\n")
        return EXIT_DIAGNOSTIC
    wall = time.perf_counter() - start if cfg.timing else None
    report = solve_report(inst, res, wall)
    _emit(report, cfg.fmt, out)
    return EXIT_OK if report["feasible"] else EXIT_DIAGNOSTIC


def cmd_verify(inst_path: str, sol_path: str, gamma: Optional[Fraction], out=sys.stdout, err=sys.stderr) -> int:
    try:
        inst = load_instance(inst_path)
        data = json.loads(Path(sol_path).read_text())
        body = data.get("solution", data) if isinstance(data, dict) else data
        if gamma is None:
            gamma = Fraction(data.get("gamma") or 1) if isinstance(data, dict) else Fraction(1)
        sol = Solution.from_json(body)
        report = check_solution(inst, sol, gamma)
    except (OSError, ValueError, InstanceFormatError, MalformedSolutionError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    for v in report.violations:
        out.write(f"violation {v}\n")
    out.write(f"{'ok' if report.feasible else 'infeasible'} cost={report.total_cost} gamma={fmt_rational(gamma)}\n")
    return EXIT_OK if report.feasible else EXIT_VIOLATION


BENCH_COLUMNS = ["instance", "solver", "status", "cost", "opt", "ratio", "within_claim", "iterations"]


def cmd_bench(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    root = Path(cfg.paths[0])
    if not root.is_dir():
        err.write(f"error: {root} is not a directory\n")
        return EXIT_IO
    solvers = cfg.solver.split(",") if cfg.solver != "all" else list(SOLVER_NAMES)
    cols = BENCH_COLUMNS + (["wall_time_s"] if cfg.timing else [])
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for path in sorted(root.glob("*.txt")):
        try:
            inst = load_instance(str(path))
        except (OSError, InstanceFormatError) as exc:
            w.writerow([path.name, "*", f"error: {exc}"] + [""] * (len(cols) - 3))
            continue
        try:
            opt: Optional[int] = solve_exact(inst).opt_cost
        except OracleRefusal:
            opt = None
        for name in solvers:
            row = {"instance": path.name, "solver": name}
            start = time.perf_counter()
            try:
                res = run_solver(name, inst, cfg.eps, cfg.mdtsp, cfg.max_iters)
            except SolverDiagnostic as exc:
                row["status"] = f"diagnostic: {exc}"
                w.writerow([row.get(c, "") for c in cols])
                continue
            except Exception as exc:  # isolate failures per row
                row["status"] = f"error: {type(exc).__name__}: {exc}"
                w.writerow([row.get(c, "") for c in cols])
                continue
            audit = check_solution(inst, res.solution, res.gamma)
            row["status"] = "ok" if audit.feasible else "infeasible"
            row["cost"] = res.cost
            row["iterations"] = res.iterations_run
            if opt is not None:
                ratio = ratio_of(res.cost, opt)
                row["opt"] = opt
                row["ratio"] = fmt_rational(ratio)
                row["within_claim"] = audit.feasible and (res.claimed_ratio is None or ratio <= res.claimed_ratio)
            if cfg.timing:
                row["wall_time_s"] = round(time.perf_counter() - start, 6)
            w.writerow([row.get(c, "") for c in cols])
    return EXIT_OK


def cmd_gen(args, out=sys.stdout, err=sys.stderr) -> int:
    try:
        inst = generate_instance(args.seed, args.n, args.k, args.Q, tuple(args.demand_range), args.fleet)
    except GenerationError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    text = write_instance(inst)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdsdvrp", description="Multi-depot split delivery VRP approximation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(sp, multi: bool = False) -> None:
        if multi:
            sp.add_argument("--solver", default="all", help="comma-separated solver names or 'all'")
        else:
            sp.add_argument("--solver", choices=SOLVER_NAMES, default="alg3")
        sp.add_argument("--eps", type=positive_rational, default=Fraction(1), help="bi-factor slack (rational)")
        sp.add_argument("--mdtsp", choices=("forest2", "exact"), default="forest2")
        sp.add_argument("--max-iters", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timing", action="store_true", help="include wall-clock time (non-deterministic)")

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    solver_flags(s)
    s.add_argument("--format", choices=("json", "csv", "human"), default="json")

    b = sub.add_parser("bench", help="run solvers over a directory of *.txt instances (CSV)")
    b.add_argument("directory")
    solver_flags(b, multi=True)
    b.add_argument("--format", choices=("csv",), default="csv")

    v = sub.add_parser("verify", help="check a solution (or solve report) against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--gamma", type=positive_rational, default=None)

    g = sub.add_parser("gen", help="generate a random Euclidean instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--Q", type=int, required=True)
    g.add_argument("--demand-range", type=int, nargs=2, default=(1, 0), metavar=("LO", "HI"))
    g.add_argument("--fleet", default="min", help="min | tight | slack:S | spare:E")
    g.add_argument("-o", "--output")
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        return cmd_gen(args, out, err)
    if args.command == "verify":
        return cmd_verify(args.instance, args.solution, args.gamma, out, err)
    if args.command == "bench":
        names = SOLVER_NAMES if args.solver == "all" else tuple(args.solver.split(","))
        unknown = [n for n in names if n not in SOLVER_NAMES]
        if unknown:
            err.write(f"error: unknown solver(s) {unknown}\n")
            return EXIT_IO
    cfg = RunConfig(
        command=args.command,
        paths=(args.instance,) if args.command == "solve" else (args.directory,),
        solver=args.solver,
        eps=args.eps,
        mdtsp=args.mdtsp,
        max_iters=args.max_iters,
        fmt=args.format,
        seed=args.seed,
        timing=args.timing,
    )
    if args.command == "solve":
        return cmd_solve(cfg, out, err)
    return cmd_bench(cfg, out, err)


def run_to_string(argv: Sequence[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
