"""Solver x instance x repeat benchmark matrix with CSV and markdown output."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from typing import Sequence

from .backtrack import solve_backtrack
from .generator import GenConfig, GenerationExhausted, generate_puzzle
from .grid import Puzzle, parse_puzzle
from .mcts import MctsConfig, solve_mcts
from .meter import MemoryMeter
from .results import SOLVED, SearchLimits, SolveResult
from .sat import ExternalSolverError, solve_sat

SOLVERS = ("backtrack", "mcts", "sat-internal", "sat-external")

# grid sizes and obstacle counts evaluated in the original study
PAPER_SIZES = ((5, 5, 4), (6, 6, 10), (10, 10, 32), (15, 15, 66), (20, 20, 133), (30, 30, 378), (50, 50, 776))


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple
    solvers: tuple = ("backtrack", "mcts", "sat-internal")
    repeats: int = 50
    timeout_ms: int = 120_000
    base_seed: int = 0
    mcts_iterations: int = 10_000_000
    mcts_c: float = math.sqrt(2.0)
    sat_cmd: str | None = None
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(tuple(s) for s in self.sizes))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.sizes or not self.solvers:
            raise ValueError("sizes and solvers must be nonempty")
        for s in self.solvers:
            if s not in SOLVERS:
                raise ValueError(f"unknown solver {s!r}")
        if "sat-external" in self.solvers and not self.sat_cmd:
            raise ValueError("sat-external needs sat_cmd")


@dataclass
class BenchRecord:
    rows: int
    cols: int
    obstacles: int
    solver: str
    trial: int
    seed: int
    status: str
    runtime_ms: float
    peak_tracked_bytes: int
    nodes_expanded: int
    rollout_steps: int

    @property
    def free_count(self) -> int:
        return self.rows * self.cols - self.obstacles

    def counters(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        del d["runtime_ms"]
        return d


CSV_HEADER = [f.name for f in fields(BenchRecord)]
_INT_FIELDS = {"rows", "cols", "obstacles", "trial", "seed", "peak_tracked_bytes", "nodes_expanded", "rollout_steps"}


def run_solver(name: str, puzzle: Puzzle, timeout_ms: int | None, seed: int = 0,
               iterations: int = 10_000_000, c: float = math.sqrt(2.0),
               sat_cmd: str | None = None, meter: MemoryMeter | None = None) -> SolveResult:
    meter = meter if meter is not None else MemoryMeter()
    if name == "backtrack":
        return solve_backtrack(puzzle, SearchLimits(timeout_ms=timeout_ms), meter)
    if name == "mcts":
        cfg = MctsConfig(exploration_c=c, max_iterations=iterations, timeout_ms=timeout_ms, seed=seed)
        return solve_mcts(puzzle, cfg, meter)
    if name in ("sat", "sat-internal"):
        return solve_sat(puzzle, timeout_ms=timeout_ms, meter=meter)
    if name == "sat-external":
        return solve_sat(puzzle, timeout_ms=timeout_ms, command=sat_cmd, meter=meter)
    raise ValueError(f"unknown solver {name!r}")


_warm = False


def warmup() -> None:
    """Compile every kernel once so the first timed trial excludes JIT time."""
    global _warm
    if _warm:
        return
    for text in ("S..\n...\n...\n", ".S.\n"):
        p = parse_puzzle(text)
        solve_backtrack(p)
        solve_mcts(p, MctsConfig(max_iterations=50))
        solve_sat(p)
    generate_puzzle(GenConfig(3, 3, 1, seed=0))
    _warm = True


def _run_trial(cfg: BenchConfig, size_idx: int, trial: int) -> list[BenchRecord]:
    rows, cols, target = cfg.sizes[size_idx]
    seed = cfg.base_seed + trial
    try:
        inst = generate_puzzle(GenConfig(rows, cols, target, seed=seed, validate_timeout_ms=cfg.timeout_ms))
    except GenerationExhausted:
        return [BenchRecord(rows, cols, -1, s, trial, seed, "generation_failed", 0.0, 0, 0, 0) for s in cfg.solvers]
    out = []
    for name in cfg.solvers:
        try:
            res = run_solver(name, inst.puzzle, cfg.timeout_ms, seed, cfg.mcts_iterations, cfg.mcts_c, cfg.sat_cmd)
            status, rt, peak, nodes, steps = (res.status, res.elapsed_ms, res.peak_tracked_bytes,
                                              res.nodes_expanded, res.rollout_steps)
        except ExternalSolverError:
            status, rt, peak, nodes, steps = "solver_error", 0.0, 0, 0, 0
        out.append(BenchRecord(rows, cols, inst.actual_obstacles, name, trial, seed, status,
                               rt, peak, nodes, steps))
    return out


def run_bench(cfg: BenchConfig) -> list[BenchRecord]:
    """Every (size, trial) gets one generated instance, shared by all solvers."""
    warmup()
    tasks = [(i, t) for i in range(len(cfg.sizes)) for t in range(cfg.repeats)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(lambda it: _run_trial(cfg, *it), tasks))
    else:
        chunks = [_run_trial(cfg, i, t) for i, t in tasks]
    return [r for chunk in chunks for r in chunk]


def emit_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([repr(v) if isinstance(v, float) else v for v in astuple(r)])
    return buf.getvalue()


def parse_csv(text: str) -> list[BenchRecord]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {header}")
    out = []
    for row in rows:
        kw = {}
        for name, value in zip(header, row):
            if name in _INT_FIELDS:
                kw[name] = int(value)
            elif name == "runtime_ms":
                kw[name] = float(value)
            else:
                kw[name] = value
        out.append(BenchRecord(**kw))
    return out


@dataclass
class _Cell:
    runtimes: list = field(default_factory=list)
    peaks: list = field(default_factory=list)


def summarize(records: Sequence[BenchRecord], solvers: Sequence[str] | None = None):
    """Per-(grid size, solver) means over solved trials, ascending grid area."""
    if solvers is None:
        solvers = list(dict.fromkeys(r.solver for r in records))
    sizes = sorted({(r.rows, r.cols) for r in records}, key=lambda s: (s[0] * s[1], s))
    table = {}
    obstacles = {}
    for r in records:
        if r.obstacles >= 0:
            obstacles.setdefault((r.rows, r.cols), {})[(r.trial, r.seed)] = r.obstacles
        cell = table.setdefault(((r.rows, r.cols), r.solver), _Cell())
        if r.status == SOLVED:
            cell.runtimes.append(r.runtime_ms)
            cell.peaks.append(r.peak_tracked_bytes)
    return sizes, list(solvers), table, obstacles


def emit_table(records: Sequence[BenchRecord], solvers: Sequence[str] | None = None) -> str:
    sizes, solvers, table, obstacles = summarize(records, solvers)
    head = ["Grid Size", "Obstacles (mean)"]
    for s in solvers:
        head += [f"{s} Run-Time(s)", f"{s} Memory(MB)"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for size in sizes:
        obs = list(obstacles.get(size, {}).values())
        row = [f"{size[0]}x{size[1]}", f"{sum(obs) / len(obs):.1f}" if obs else "-"]
        for s in solvers:
            cell = table.get((size, s))
            if cell is None or not cell.runtimes:
                row += ["Failed", "Failed"]
            else:
                rt = sum(cell.runtimes) / len(cell.runtimes) / 1000.0
                mb = sum(cell.peaks) / len(cell.peaks) / 1e6
                row += [f"{rt:.4g}", f"{mb:.4g}"]
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def parse_sizes(text: str) -> list[tuple[int, int, int]]:
    """``"5x5:4,6x6:10"`` -> ``[(5, 5, 4), (6, 6, 10)]``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        dims, _, k = part.partition(":")
        r, _, c = dims.lower().partition("x")
        out.append((int(r), int(c), int(k) if k else 0))
    if not out:
        raise ValueError("no sizes given")
    return out
