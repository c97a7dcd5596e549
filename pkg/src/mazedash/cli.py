"""Command line entry point: ``mazedash {solve,verify,generate,bench}``.

Exit codes: 0 solved/valid, 1 unsolvable/invalid, 2 usage error,
3 limit or timeout, 4 I/O or external solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys

from . import bench as _bench
from .generator import GenConfig, GenerationExhausted, generate_puzzle
from .grid import PuzzleFormatError, expand_to_cells, parse_puzzle, verify_solution
from .results import LIMIT_EXCEEDED, SOLVED, UNSOLVABLE
from .sat import ExternalSolverError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT, EXIT_IO = 0, 1, 2, 3, 4

_STATUS_WORDS = {SOLVED: "Solved", UNSOLVABLE: "Unsolvable", LIMIT_EXCEEDED: "LimitExceeded"}
_STATUS_EXIT = {SOLVED: EXIT_OK, UNSOLVABLE: EXIT_FAIL, LIMIT_EXCEEDED: EXIT_LIMIT}


def _seed(text: str) -> int:
    if text == "random":
        value = secrets.randbits(64)
        print(f"seed: {value}", file=sys.stderr)
        return value
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mazedash", description="Maze Dash solver workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a puzzle file")
    s.add_argument("--solver", choices=["backtrack", "mcts", "sat", "sat-external"], default="backtrack")
    s.add_argument("--input", required=True)
    s.add_argument("--iterations", type=_positive, default=10_000_000)
    s.add_argument("--c", type=float, default=math.sqrt(2.0))
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--timeout-ms", type=_positive)
    s.add_argument("--sat-cmd", help="external solver command containing {file}")
    s.add_argument("--json", action="store_true")
    s.add_argument("--cells", action="store_true", help="also print the per-cell path")

    v = sub.add_parser("verify", help="check a move string against a puzzle")
    v.add_argument("--input", required=True)
    v.add_argument("--moves", required=True)
    v.add_argument("--json", action="store_true")

    g = sub.add_parser("generate", help="generate solvable instances")
    g.add_argument("--rows", type=_positive, required=True)
    g.add_argument("--cols", type=_positive, required=True)
    g.add_argument("--obstacles", type=int, required=True)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--count", type=_positive, default=1)
    g.add_argument("--out", help="directory to write instance files into")

    b = sub.add_parser("bench", help="run a benchmark matrix")
    b.add_argument("--sizes", required=True, help="e.g. 5x5:4,6x6:10")
    b.add_argument("--solvers", default="backtrack,mcts,sat-internal")
    b.add_argument("--repeats", type=_positive, default=50)
    b.add_argument("--timeout-ms", type=_positive, default=120_000)
    b.add_argument("--csv")
    b.add_argument("--jobs", type=_positive, default=1)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--iterations", type=_positive, default=10_000_000)
    b.add_argument("--c", type=float, default=math.sqrt(2.0))
    b.add_argument("--sat-cmd")
    b.add_argument("--out", help="write the markdown table here instead of stdout")
    b.add_argument("--json", action="store_true", help="print records as JSON instead of the table")
    return ap


def _read_puzzle(path):
    with open(path, encoding="utf-8") as fh:
        return parse_puzzle(fh.read())


def _cells_text(cells):
    return " ".join(f"({r},{c})" for r, c in cells)


def cmd_solve(args, ap) -> int:
    if args.solver == "sat-external" and not args.sat_cmd:
        ap.error("--solver sat-external requires --sat-cmd")
    if args.sat_cmd and "{file}" not in args.sat_cmd:
        ap.error("--sat-cmd must contain a {file} placeholder")
    puzzle = _read_puzzle(args.input)
    try:
        res = _bench.run_solver(args.solver, puzzle, args.timeout_ms, args.seed,
                                args.iterations, args.c, args.sat_cmd)
    except ExternalSolverError as exc:
        print(f"external solver failure: {exc}", file=sys.stderr)
        return EXIT_IO

    cells = expand_to_cells(puzzle, res.moves) if res.solved and args.cells else None
    if args.json:
        obj = res.to_json_obj()
        obj["result"]["solver"] = args.solver
        if cells is not None:
            obj["result"]["cells"] = [list(c) for c in cells]
        print(json.dumps(obj, sort_keys=True))
    elif res.solved:
        print(res.move_string)
        if cells is not None:
            print(_cells_text(cells))
    else:
        print(_STATUS_WORDS[res.status])
    return _STATUS_EXIT[res.status]


def cmd_verify(args, ap) -> int:
    puzzle = _read_puzzle(args.input)
    vr = verify_solution(puzzle, args.moves)
    if args.json:
        print(json.dumps({"result": vr.to_dict()}, sort_keys=True))
    else:
        print(vr)
    return EXIT_OK if vr.valid else EXIT_FAIL


def cmd_generate(args, ap) -> int:
    if not 0 <= args.obstacles < args.rows * args.cols:
        ap.error("--obstacles must be in [0, rows*cols)")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    texts = []
    for i in range(args.count):
        seed = args.seed + i
        try:
            inst = generate_puzzle(GenConfig(args.rows, args.cols, args.obstacles, seed=seed))
        except GenerationExhausted as exc:
            print(f"seed {seed}: {exc}", file=sys.stderr)
            return EXIT_LIMIT
        text = inst.to_text()
        if args.out:
            name = f"maze_{args.rows}x{args.cols}_k{args.obstacles}_s{seed}.txt"
            path = os.path.join(args.out, name)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            print(path)
        else:
            texts.append(text)
    if texts:
        sys.stdout.write("\n".join(texts))
    return EXIT_OK


def cmd_bench(args, ap) -> int:
    try:
        sizes = _bench.parse_sizes(args.sizes)
        solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
        solvers = ["sat-internal" if s == "sat" else s for s in solvers]
        cfg = _bench.BenchConfig(
            sizes=sizes, solvers=solvers, repeats=args.repeats, timeout_ms=args.timeout_ms,
            base_seed=args.seed, mcts_iterations=args.iterations, mcts_c=args.c,
            sat_cmd=args.sat_cmd, jobs=args.jobs,
        )
    except ValueError as exc:
        ap.error(str(exc))
    records = _bench.run_bench(cfg)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(_bench.emit_csv(records))
    if args.json:
        out = [{"result": r.counters(), "timing": {"runtime_ms": r.runtime_ms}} for r in records]
        text = json.dumps(out, sort_keys=True) + "\n"
    else:
        text = _bench.emit_table(records, cfg.solvers)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "generate": cmd_generate, "bench": cmd_bench}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, ap)
    except (OSError, PuzzleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
