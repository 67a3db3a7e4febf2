"""Command-line interface: ``pidkit {pid,sweep,game,examples,convert}``.

Exit codes: 0 success, 1 validation error, 2 solver non-convergence,
3 I/O error. Set ``PIDKIT_LOG`` (e.g. ``INFO`` or ``DEBUG``) for diagnostics.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dist import DistributionError, JointDistribution
from .gaussian import ATOM_LABELS, GaussianError, MCOptions, feasible_b_range, gaussian_sweep
from .game import StakeGameSpec, run_stake_game
from .io import distribution_from_json, distribution_to_json, format_distribution, load_distribution, parse_distribution
from .measures import MeasureChoice, pid
from .optim import SolverError, SolverOptions, SolverReport
from .systems import PREDPRED_RANGE, example_names, get_example, predpred

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("pidkit")

# short CSV column suffixes for the two-predictor atoms
ATOM_COLUMNS = {"{1}{2}": "red", "{1}": "unq1", "{2}": "unq2", "{12}": "syn"}


def _full(x: float) -> str:
    return format(float(x), ".17g")


def _fixed(x: float, width: int = 0) -> str:
    """Four-decimal display that never shows a negative zero."""
    s = f"{float(x):.4f}"
    if s == "-0.0000":
        s = "0.0000"
    return f"{s:>{width}}"


def _configure_logging() -> None:
    level = os.environ.get("PIDKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _solver_options(args) -> SolverOptions:
    return SolverOptions(tolerance=args.tol, max_iterations=args.max_iter)


def _load_system(args) -> tuple[str, JointDistribution]:
    if args.example:
        return args.example, get_example(args.example)
    return str(args.input), load_distribution(args.input)


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _report_dict(report) -> dict:
    if not isinstance(report, SolverReport):
        return {}
    return {"solver": report.solver, "iterations": report.iterations, "residual": report.residual,
            "objective": report.objective, "converged": report.converged, "gap": report.gap}


def _pointwise_rows(table) -> tuple[list[str], list[list]]:
    header = table.columns()
    rows = []
    for r in table.rows():
        rows.append(["".join(str(v) for v in r["outcome"]), r["p"], *r["source_deltas"],
                     r["joint_delta"], r["coinfo"], r["common"]])
    return header, rows


def render_pid(name: str, result, fmt: str, pointwise: bool) -> str:
    lat = result.lattice
    if fmt == "json":
        doc = {"system": name, "measure": result.measure,
               "nodes": [{"node": a.label, "I_cap": result.redundancy[a], "I_partial": result.atoms[a]}
                         for a in lat.nodes],
               "solver": {a.label: _report_dict(r) for a, r in result.reports.items()}}
        if pointwise:
            doc["pointwise"] = {a.label: t.rows() for a, t in result.tables.items()}
        return json.dumps(doc, indent=2, default=lambda o: list(o) if isinstance(o, tuple) else float(o)) + "\n"
    if fmt == "csv":
        text = _rows_to_csv(["node", "I_cap", "I_partial"],
                            [[a.label, _full(result.redundancy[a]), _full(result.atoms[a])] for a in lat.nodes])
        if pointwise:
            for a, t in result.tables.items():
                header, rows = _pointwise_rows(t)
                text += f"\n# pointwise {a.label}\n"
                text += _rows_to_csv(header, [[r[0]] + [_full(v) for v in r[1:]] for r in rows])
        return text
    width = max(len(a.label) for a in lat.nodes) + 2
    lines = [f"# {name}  measure={result.measure}", f"{'node':<{width}}{'I_cap':>10}{'I_partial':>11}"]
    for a in lat.nodes:
        lines.append(f"{a.label:<{width}}{_fixed(result.redundancy[a], 10)}{_fixed(result.atoms[a], 11)}")
    lines.append(f"{'total':<{width}}{'':>10}{_fixed(result.total, 11)}")
    for a, r in result.reports.items():
        if isinstance(r, SolverReport):
            gap = "" if r.gap is None else f" gap={r.gap:.2e}"
            lines.append(f"# {a.label}: {r.solver} iterations={r.iterations} residual={r.residual:.2e}"
                         f"{gap} converged={r.converged}")
    if pointwise:
        for a, t in result.tables.items():
            header, rows = _pointwise_rows(t)
            lines.append("")
            lines.append(f"pointwise terms for {a.label}")
            lines.append("  ".join(f"{h:>9}" for h in header))
            for r in rows:
                lines.append("  ".join([f"{r[0]:>9}"] + [_fixed(v, 9) for v in r[1:]]))
    return "\n".join(lines) + "\n"


def cmd_pid(args) -> int:
    name, d = _load_system(args)
    measure = MeasureChoice.parse(args.measure, args.variant)
    try:
        result = pid(d, measure, _solver_options(args))
    except SolverError as exc:
        log.error("%s", exc)
        partial = getattr(exc, "result", None)
        if partial is not None:
            _emit(render_pid(name, partial, args.format, args.pointwise), args.output)
        return EXIT_SOLVER
    _emit(render_pid(name, result, args.format, args.pointwise), args.output)
    return EXIT_OK


def _grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("--step must be positive")
    if stop < start:
        raise ValueError("--stop must not be below --start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def cmd_sweep(args) -> int:
    if args.kind == "predpred":
        lo, hi = PREDPRED_RANGE
        start = lo if args.start is None else args.start
        stop = hi if args.stop is None else args.stop
        if start < lo - 1e-12 or stop > hi + 1e-12:
            raise ValueError(f"predpred grid must lie within [{lo}, {hi}]")
        measures = args.measures or ["iccs", "broja"]
        header = ["c"] + [f"{m}_{ATOM_COLUMNS[lbl]}" for m in measures for lbl in ATOM_LABELS]
        rows = []
        for c in _grid(start, stop, args.step):
            d = predpred(c)
            row = [_full(c)]
            for m in measures:
                res = pid(d, MeasureChoice.parse(m, args.variant), _solver_options(args))
                row += [_full(res[lbl]) for lbl in ATOM_LABELS]
            rows.append(row)
    else:
        mc = MCOptions(sample_count=args.samples, seed=args.seed)
        lo, hi = feasible_b_range(args.a, args.c)
        if args.b_grid:
            grid = [float(v) for v in args.b_grid.split(",")]
        else:
            margin = args.edge
            grid = list(np.linspace(lo + margin, hi - margin, args.points))
        header = ["b", "joint_mi"] + [f"mmi_{ATOM_COLUMNS[l]}" for l in ATOM_LABELS] \
            + [f"iccs_{ATOM_COLUMNS[l]}" for l in ATOM_LABELS] + [f"iccs_{ATOM_COLUMNS[l]}_se" for l in ATOM_LABELS]
        rows = []
        for r in gaussian_sweep(args.a, args.c, grid, mc):
            rows.append([_full(r.b), _full(r.joint_mi)] + [_full(r.immi[l]) for l in ATOM_LABELS]
                        + [_full(r.iccs[l]) for l in ATOM_LABELS] + [_full(r.iccs_se.get(l, np.nan)) for l in ATOM_LABELS])
        skipped = len(grid) - len(rows)
        if skipped:
            log.warning("skipped %d infeasible grid point(s)", skipped)
    if args.format == "json":
        text = json.dumps([dict(zip(header, map(float, r))) for r in rows], indent=2) + "\n"
    elif args.format == "table":
        text = "  ".join(f"{h:>10}" for h in header) + "\n"
        text += "".join("  ".join(_fixed(v, 10) for v in r) + "\n" for r in rows)
    else:
        text = _rows_to_csv(header, rows)
    _emit(text, args.output)
    return EXIT_OK


def cmd_game(args) -> int:
    name, d = _load_system(args)
    setters = (1, 2) if args.setter == "both" else (int(args.setter),)
    results = [run_stake_game(StakeGameSpec(d, setter=s)) for s in setters]
    if args.format == "json":
        text = json.dumps({"system": name, "games": [
            {"setter": r.setter, "strategies": {str(k): list(v) for k, v in r.strategies.items()},
             "rewards": {str(k): v for k, v in r.rewards.items()}, "gap": r.gap} for r in results]}, indent=2) + "\n"
    elif args.format == "csv":
        text = _rows_to_csv(["setter", "reward_1", "reward_2", "gap"],
                            [[r.setter, _full(r.rewards[1]), _full(r.rewards[2]), _full(r.gap)] for r in results])
    else:
        lines = [f"# {name}  stake c(x) = 1 + x"]
        for r in results:
            lines.append(f"setter {r.setter}: reward_1={_fixed(r.rewards[1])} reward_2={_fixed(r.rewards[2])} "
                         f"gap={_fixed(r.gap)}  strategies={r.strategies}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_examples(args) -> int:
    lines = []
    for name in example_names():
        if name == "predpred(c)":
            lines.append(f"{name:<16} predictor-correlation family, {PREDPRED_RANGE[0]} <= c <= {PREDPRED_RANGE[1]}")
            continue
        d = get_example(name)
        lines.append(f"{name:<16} predictors={d.n_predictors} cards={list(d.cardinalities)}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_convert(args) -> int:
    src = Path(args.input)
    text = src.read_text(encoding="utf-8")
    if src.suffix.lower() == ".json":
        out = format_distribution(distribution_from_json(text))
    else:
        out = distribution_to_json(parse_distribution(text))
    _emit(out, args.output)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, formats=("table", "csv", "json")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", type=Path, help="write to this file instead of stdout")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-10, help="solver tolerance (default 1e-10)")
    p.add_argument("--max-iter", type=int, default=100_000, help="solver iteration cap")


def _add_system(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--example", help="registered system name, e.g. and, wb-a, predpred(-0.2)")
    g.add_argument("--input", type=Path, help="distribution file (text or .json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pidkit", description="Partial information decomposition toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pid", help="decompose one system")
    _add_system(p)
    p.add_argument("--measure", choices=["iccs", "imin", "broja", "mmi"], default="iccs")
    p.add_argument("--variant", choices=["game", "decision"], default="game",
                   help="iccs evaluation distribution (default game)")
    p.add_argument("--pointwise", action="store_true", help="also print the pointwise term tables")
    _add_solver(p)
    _add_common(p)
    p.set_defaults(func=cmd_pid)

    p = sub.add_parser("sweep", help="parameter sweeps (csv by default)")
    p.add_argument("kind", choices=["predpred", "gaussian"])
    p.add_argument("--measures", nargs="+", choices=["iccs", "imin", "broja", "mmi"],
                   help="predpred: measures to run (default iccs broja)")
    p.add_argument("--variant", choices=["game", "decision"], default="game")
    p.add_argument("--start", type=float, help="predpred: first c (default -0.8)")
    p.add_argument("--stop", type=float, help="predpred: last c (default 0.1)")
    p.add_argument("--step", type=float, default=0.1, help="predpred: grid step")
    p.add_argument("--a", type=float, default=0.5, help="gaussian: Corr(X1,S)")
    p.add_argument("--c", type=float, default=0.5, help="gaussian: Corr(X2,S)")
    p.add_argument("--b-grid", help="gaussian: comma-separated b values")
    p.add_argument("--points", type=int, default=9, help="gaussian: grid size across the feasible b range")
    p.add_argument("--edge", type=float, default=0.01, help="gaussian: distance kept from the feasibility edge")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1_000_000)
    _add_solver(p)
    _add_common(p, formats=("csv", "json", "table"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("game", help="stake game expected rewards")
    _add_system(p)
    p.add_argument("--setter", choices=["1", "2", "both"], default="both")
    _add_common(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("examples", help="list registered systems")
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("convert", help="convert between the text and JSON formats")
    p.add_argument("input", help="text file (to JSON) or .json file (to text)")
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (DistributionError, GaussianError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        log.error("%s", msg)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
