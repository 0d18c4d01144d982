"""Command-line front end: build, solve, validate, enumerate.

Every command is deterministic given its flags and seed; output files
carry no timestamps except the solve report's elapsed field.  Exit
codes: 0 success or feasible, 1 infeasible verdict, 2 input error,
3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import GridFormatError, VariableGuardError
from .grid import Grid, parse_grid
from .objective import PenaltyParams, build_objective, default_penalty_params
from .poly import bits_from_string, bits_to_string, hubo_dumps
from .quadratize import aux_sidecar, export_qubo, quadratize
from .solve import AnnealSchedule, SolveResult, anneal_hubo, anneal_qubo, brute_force_min
from .validate import MODE_PAPER, MODE_PHYSICAL, check_feasibility, enumerate_feasible


def _add_grid_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", required=True, help="grid description file (JSON)")


def _add_penalty_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--c-penalty",
        type=float,
        default=None,
        help="penalty constant (default: 1e6 x worst-case loss bound)",
    )
    p.add_argument(
        "--L",
        type=int,
        default=4,
        dest="exponent_l",
        help="even exponent of the smooth limit penalties (default 4)",
    )


def _add_schedule_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="annealing seed (default 0)")
    p.add_argument("--sweeps", type=int, default=2000, help="sweeps per restart (default 2000)")
    p.add_argument("--restarts", type=int, default=100, help="independent restarts (default 100)")
    p.add_argument("--t0", type=float, default=10.0, help="initial temperature (default 10)")
    p.add_argument("--t1", type=float, default=0.01, help="final temperature (default 0.01)")
    p.add_argument("--workers", type=int, default=1, help="parallel restart workers (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridswitch",
        description="Model grid switch reconfiguration as a penalized binary objective, "
        "reduce it to quadratic form, solve it classically, and validate results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="write the objective as a HUBO document")
    _add_grid_arg(p_build)
    _add_penalty_args(p_build)
    p_build.add_argument("--quadratize", action="store_true", help="also write .qubo + aux sidecar")
    p_build.add_argument("--m", type=float, default=None, help="product-enforcement gadget weight")
    p_build.add_argument("--out", default=".", help="output directory (default .)")

    p_solve = sub.add_parser("solve", help="minimize the objective")
    _add_grid_arg(p_solve)
    _add_penalty_args(p_solve)
    p_solve.add_argument(
        "--method", required=True, choices=["brute", "sa-hubo", "sa-qubo"], help="solver"
    )
    _add_schedule_args(p_solve)
    p_solve.add_argument("--m", type=float, default=None, help="gadget weight for sa-qubo")
    p_solve.add_argument("--out", default=".", help="output directory (default .)")

    p_val = sub.add_parser("validate", help="check one switch assignment")
    _add_grid_arg(p_val)
    _add_penalty_args(p_val)
    p_val.add_argument("--bits", required=True, help="assignment as a 0/1 string in variable order")
    p_val.add_argument("--mode", choices=[MODE_PHYSICAL, MODE_PAPER], default=None)

    p_enum = sub.add_parser("enumerate", help="list every feasible assignment with its loss")
    _add_grid_arg(p_enum)
    _add_penalty_args(p_enum)
    p_enum.add_argument("--mode", choices=[MODE_PHYSICAL, MODE_PAPER], default=MODE_PHYSICAL)
    p_enum.add_argument("--out", default=None, help="output file (default: stdout)")
    p_enum.add_argument("--with-total", action="store_true", help="add an objective-value column")
    p_enum.add_argument("--workers", type=int, default=1, help="enumeration workers (default 1)")

    return parser


def _load_grid(path: str) -> Grid:
    return parse_grid(Path(path).read_text())


def _params_from(args, grid: Grid) -> PenaltyParams:
    if args.c_penalty is None:
        return default_penalty_params(grid, exponent_l=args.exponent_l)
    return PenaltyParams(c_penalty=args.c_penalty, exponent_l=args.exponent_l)


def _print_legend(grid: Grid) -> None:
    for v, (i, j) in enumerate(grid.variable_order()):
        print(f"q{v} = switch between blocks {i} and {j}")


_COMPONENT_FIELDS = (
    "power",
    "radial",
    "maxconn",
    "blackout",
    "current",
    "max_v",
    "min_v",
)


def _cmd_build(args) -> int:
    grid = _load_grid(args.grid)
    params = _params_from(args, grid)
    bundle = build_objective(grid, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def annotation(component: str) -> dict:
        return {
            "component": component,
            "c_penalty": params.c_penalty,
            "L": params.exponent_l,
        }

    hubo_path = out / "objective.hubo.json"
    hubo_path.write_text(hubo_dumps(bundle.total, annotation("total")))
    written = [hubo_path]
    for name in _COMPONENT_FIELDS:
        path = out / f"objective.{name}.hubo.json"
        path.write_text(hubo_dumps(getattr(bundle, name), annotation(name)))
        written.append(path)
    if args.quadratize:
        model = quadratize(bundle.total, weight=args.m, n_vars=grid.n_vars)
        qubo_path = out / "objective.qubo"
        qubo_path.write_text(export_qubo(model))
        aux_path = out / "objective.aux.json"
        aux_path.write_text(aux_sidecar(model))
        written += [qubo_path, aux_path]
    _print_legend(grid)
    print(f"c_penalty {params.c_penalty!r} L {params.exponent_l}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _schedule_from(args) -> AnnealSchedule:
    return AnnealSchedule(
        initial_temperature=args.t0,
        final_temperature=args.t1,
        sweeps=args.sweeps,
        restarts=args.restarts,
        seed=args.seed,
    )


def _result_doc(result: SolveResult, args) -> dict:
    return {
        "method": result.method,
        "seed": args.seed,
        "schedule": {
            "initial_temperature": args.t0,
            "final_temperature": args.t1,
            "sweeps": args.sweeps,
            "restarts": args.restarts,
        },
        "best_assignment": bits_to_string(result.best_assignment),
        "best_value": result.best_value,
        "per_restart_values": list(result.per_restart_values),
        "evaluations": result.evaluations,
        "aux_consistent": result.aux_consistent,
        "elapsed": result.elapsed,
    }


def _cmd_solve(args) -> int:
    grid = _load_grid(args.grid)
    params = _params_from(args, grid)
    bundle = build_objective(grid, params)
    if args.method == "brute":
        result = brute_force_min(bundle.total, n_vars=grid.n_vars)
    elif args.method == "sa-hubo":
        result = anneal_hubo(
            bundle.total, schedule=_schedule_from(args), n_vars=grid.n_vars, workers=args.workers
        )
    else:
        model = quadratize(bundle.total, weight=args.m, n_vars=grid.n_vars)
        result = anneal_qubo(model, schedule=_schedule_from(args), workers=args.workers)
    verdicts = {
        mode: check_feasibility(grid, result.best_assignment, mode, params)
        for mode in (MODE_PHYSICAL, MODE_PAPER)
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "solve-report.json"
    report_path.write_text(json.dumps(_result_doc(result, args), indent=2) + "\n")
    word = {True: "feasible", False: "infeasible"}
    print(
        f"best {bits_to_string(result.best_assignment)} value {result.best_value!r} "
        f"physical {word[verdicts[MODE_PHYSICAL].feasible]} "
        f"paper {word[verdicts[MODE_PAPER].feasible]}"
    )
    print(f"wrote {report_path}")
    return 0


def _cmd_validate(args) -> int:
    grid = _load_grid(args.grid)
    params = _params_from(args, grid)
    bits = bits_from_string(args.bits)
    if len(bits) != grid.n_vars:
        print(
            f"error: bit string has {len(bits)} bits but the grid has "
            f"{grid.n_vars} switch variables",
            file=sys.stderr,
        )
        return 2
    modes = [args.mode] if args.mode else [MODE_PHYSICAL, MODE_PAPER]
    reports = [check_feasibility(grid, bits, mode, params) for mode in modes]
    doc = {r.mode: r.to_dict() for r in reports}
    print(json.dumps(doc, indent=2))
    return 0 if all(r.feasible for r in reports) else 1


def _cmd_enumerate(args) -> int:
    grid = _load_grid(args.grid)
    params = _params_from(args, grid)
    rows = enumerate_feasible(grid, mode=args.mode, params=params, workers=args.workers)
    lines = [
        f"c scanned {1 << grid.n_vars} feasible {len(rows)} mode {args.mode}",
        "c columns: bits loss_watts" + (" objective_total" if args.with_total else ""),
    ]
    total_poly = build_objective(grid, params).total if args.with_total else None
    for bits, loss in rows:
        line = f"{bits_to_string(bits)} {loss!r}"
        if total_poly is not None:
            line += f" {total_poly.eval(bits)!r}"
        lines.append(line)
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    if not rows:
        print("warning: no feasible assignments", file=sys.stderr)
    return 0


_COMMANDS = {
    "build": _cmd_build,
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "enumerate": _cmd_enumerate,
}


def entry(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except VariableGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GridFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(entry())
