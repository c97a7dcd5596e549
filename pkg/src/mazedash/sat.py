"""CNF encoding of the per-cell path model, DIMACS I/O and SAT back ends.

Variable ``x[t, c]`` is true when step ``t`` of the path is at free cell
``c`` (free cells numbered in row-major order). Clause families:

* start: the path begins at the start cell;
* each step holds exactly one cell, each cell is used at exactly one step;
* consecutive steps are orthogonal neighbours;
* forced-straight: arriving at ``c`` moving in direction ``d``, the next
  step continues to ``c + d`` unless that cell was visited earlier. No clause
  is emitted when ``c + d`` is a wall or obstacle, since turning is free there.

Turn/straight indicators are not separate variables; they are implied by
any model.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .grid import DIRECTIONS, Coord, Direction, Puzzle, verify_solution
from .kernels import dpll as _k
from .meter import MemoryMeter
from .results import LIMIT_EXCEEDED, SOLVED, UNSOLVABLE, SolveResult


class MalformedModel(ValueError):
    pass


class ExternalSolverError(RuntimeError):
    pass


@dataclass
class CnfFormula:
    """Clauses stored flat: clause ``i`` is ``lits[offsets[i]:offsets[i+1]]``."""

    num_vars: int
    offsets: np.ndarray
    lits: np.ndarray

    def __post_init__(self):
        self.offsets = np.asarray(self.offsets, dtype=np.int64)
        self.lits = np.asarray(self.lits, dtype=np.int32)
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        if len(self.offsets) == 0 or self.offsets[0] != 0 or self.offsets[-1] != len(self.lits):
            raise ValueError("offsets do not describe lits")
        if np.any(np.diff(self.offsets) <= 0):
            raise ValueError("empty clause")
        if len(self.lits) and (np.any(self.lits == 0) or np.abs(self.lits).max() > self.num_vars):
            raise ValueError("literal out of range")

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Sequence[int]]) -> "CnfFormula":
        clauses = [list(c) for c in clauses]
        lens = [len(c) for c in clauses]
        offsets = np.zeros(len(clauses) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        flat = [l for c in clauses for l in c]
        return cls(num_vars, offsets, np.array(flat, dtype=np.int32))

    @property
    def num_clauses(self) -> int:
        return len(self.offsets) - 1

    @property
    def clauses(self) -> Iterator[list[int]]:
        for i in range(self.num_clauses):
            yield self.lits[self.offsets[i] : self.offsets[i + 1]].tolist()

    def clause_multiset(self) -> Counter:
        return Counter(tuple(c) for c in self.clauses)

    def is_satisfied_by(self, assignment: np.ndarray) -> bool:
        """``assignment[v - 1]`` is the value of variable ``v``."""
        vals = np.asarray(assignment, dtype=bool)[np.abs(self.lits) - 1]
        lit_true = np.where(self.lits > 0, vals, ~vals)
        if self.num_clauses == 0:
            return True
        return bool(np.logical_or.reduceat(lit_true, self.offsets[:-1]).all())

    @property
    def nbytes(self) -> int:
        return int(self.offsets.nbytes + self.lits.nbytes)


class VarMap:
    """Bijection between variables ``1..T*T`` and (step, free-cell index)."""

    def __init__(self, puzzle: Puzzle):
        self.puzzle = puzzle
        self.cells = puzzle.free_cells()
        self.T = len(self.cells)
        self.cell_index = {c: i for i, c in enumerate(self.cells)}

    @property
    def num_vars(self) -> int:
        return self.T * self.T

    def var(self, t: int, c: int) -> int:
        return t * self.T + c + 1

    def decode(self, v: int) -> tuple[int, int]:
        return divmod(v - 1, self.T)

    def step_cell(self, v: int) -> tuple[int, Coord]:
        t, c = self.decode(v)
        return t, self.cells[c]


class _ClauseBuffer:
    def __init__(self):
        self.lens = []
        self.lits = []

    def add(self, lits):
        lits = np.asarray(lits, dtype=np.int32)
        self.lens.append(np.array([len(lits)], dtype=np.int64))
        self.lits.append(lits)

    def add_block(self, lens, lits):
        self.lens.append(np.asarray(lens, dtype=np.int64))
        self.lits.append(np.asarray(lits, dtype=np.int32).ravel())

    def formula(self, num_vars) -> CnfFormula:
        lens = np.concatenate(self.lens) if self.lens else np.zeros(0, dtype=np.int64)
        lits = np.concatenate(self.lits) if self.lits else np.zeros(0, dtype=np.int32)
        offsets = np.zeros(len(lens) + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        return CnfFormula(num_vars, offsets, lits)


def _exactly_one(buf: _ClauseBuffer, group: np.ndarray, pairs: tuple[np.ndarray, np.ndarray]):
    """At-least-one clause followed by pairwise at-most-one clauses."""
    i, j = pairs
    amo = np.empty((len(i), 2), dtype=np.int32)
    amo[:, 0] = -group[i]
    amo[:, 1] = -group[j]
    lens = np.full(len(i) + 1, 2, dtype=np.int64)
    lens[0] = len(group)
    buf.add_block(lens, np.concatenate([group, amo.ravel()]))


def exactly_one_clause_count(T: int) -> int:
    """Clauses contributed by the step and cell exactly-one families."""
    return 2 * T * (1 + T * (T - 1) // 2)


def encode_cnf(p: Puzzle) -> tuple[CnfFormula, VarMap]:
    vm = VarMap(p)
    T = vm.T
    grid = np.arange(1, T * T + 1, dtype=np.int32).reshape(T, T)  # grid[t, c] = var
    buf = _ClauseBuffer()

    buf.add([vm.var(0, vm.cell_index[p.start])])

    pairs = np.triu_indices(T, 1)
    for t in range(T):
        _exactly_one(buf, grid[t, :], pairs)
    for c in range(T):
        _exactly_one(buf, grid[:, c], pairs)
    n_eo = sum(len(x) for x in buf.lens) - 1
    assert n_eo == exactly_one_clause_count(T), (n_eo, T)

    neighbours = []
    for cell in vm.cells:
        out = []
        for d in DIRECTIONS:
            dr, dc = d.offset
            nb = Coord(cell.row + dr, cell.col + dc)
            if p.is_free(nb):
                out.append(vm.cell_index[nb])
        neighbours.append(out)

    for t in range(T - 1):
        for c in range(T):
            buf.add([-grid[t, c]] + [grid[t + 1, n] for n in neighbours[c]])

    # (behind, here, ahead) triples along a straight line of free cells
    triples = []
    for ci, cell in enumerate(vm.cells):
        for d in DIRECTIONS:
            dr, dc = d.offset
            back = Coord(cell.row - dr, cell.col - dc)
            ahead = Coord(cell.row + dr, cell.col + dc)
            if p.is_free(back) and p.is_free(ahead):
                triples.append((vm.cell_index[back], ci, vm.cell_index[ahead]))
    for t in range(1, T - 1):
        for b, c, a in triples:
            head = np.array([-grid[t - 1, b], -grid[t, c], grid[t + 1, a]], dtype=np.int32)
            buf.add(np.concatenate([head, grid[:t, a]]))

    return buf.formula(vm.num_vars), vm


def emit_dimacs(f: CnfFormula, comments: Sequence[str] = ()) -> str:
    out = [f"c {line}\n" for line in comments]
    out.append(f"p cnf {f.num_vars} {f.num_clauses}\n")
    for clause in f.clauses:
        out.append(" ".join(map(str, clause)) + " 0\n")
    return "".join(out)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses = []
    current = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    return CnfFormula.from_clauses(num_vars, clauses)


@dataclass
class SatResult:
    status: str  # "sat" | "unsat" | "unknown"
    assignment: np.ndarray | None = None  # assignment[v - 1] for variable v
    reason: str | None = None
    decisions: int = 0
    stats: dict = field(default_factory=dict)

    def value(self, var: int) -> bool:
        return bool(self.assignment[var - 1])

    def __repr__(self):
        if self.status == "unknown":
            return f"SatResult(unknown: {self.reason})"
        return f"SatResult({self.status}, decisions={self.decisions})"


def _pure_literals(f: CnfFormula, assign: np.ndarray) -> None:
    """Assign pure literals at the root, repeating until none remain."""
    n = f.num_vars
    var = np.abs(f.lits)
    codes = 2 * var + (f.lits < 0)
    starts = f.offsets[:-1]
    while True:
        vals = assign[var]
        lit_true = np.where(f.lits > 0, vals == 1, vals == -1)
        sat = np.logical_or.reduceat(lit_true, starts) if f.num_clauses else np.zeros(0, bool)
        active = np.repeat(~sat, np.diff(f.offsets))
        counts = np.bincount(codes[active], minlength=2 * n + 2)
        pos = counts[2::2][: n]
        neg = counts[3::2][: n]
        free = assign[1:] == 0
        to_true = free & (pos > 0) & (neg == 0)
        to_false = free & (neg > 0) & (pos == 0)
        if not (to_true.any() or to_false.any()):
            return
        assign[1:][to_true] = 1
        assign[1:][to_false] = -1


def solve_sat_internal(f: CnfFormula, timeout_ms: int | None = None,
                       meter: MemoryMeter | None = None, chunk: int = 4096,
                       deadline: float | None = None) -> SatResult:
    """Complete DPLL search. Only returns unknown when the time limit expires.

    ``deadline`` is an absolute ``time.perf_counter()`` value and takes
    precedence over ``timeout_ms``.
    """
    meter = meter if meter is not None else MemoryMeter()
    if deadline is None and timeout_ms is not None:
        deadline = time.perf_counter() + timeout_ms / 1000.0
    n = f.num_vars
    m = f.num_clauses

    assign = np.zeros(n + 1, dtype=np.int8)
    trail = np.zeros(n + 1, dtype=np.int32)
    regs = np.zeros(6, dtype=np.int64)
    regs[_k.PTR] = 1

    lens = np.diff(f.offsets)
    units = f.lits[f.offsets[:-1][lens == 1]]
    for lit in units.tolist():
        v = abs(lit)
        want = 1 if lit > 0 else -1
        if assign[v] == -want:
            return SatResult("unsat", stats={"reason": "conflicting units"})
        assign[v] = want
    _pure_literals(f, assign)
    root = np.nonzero(assign[1:])[0] + 1
    for v in root.tolist():
        trail[regs[_k.TRAIL_LEN]] = v if assign[v] == 1 else -v
        regs[_k.TRAIL_LEN] += 1

    lits = f.lits.copy()
    cstart = f.offsets
    head = np.empty(2 * n + 2, dtype=np.int32)
    wnext = np.empty(2 * m, dtype=np.int32)
    _k.build_watches(cstart, lits, head, wnext)
    lvl_start = np.zeros(n + 2, dtype=np.int64)
    lvl_lit = np.zeros(n + 2, dtype=np.int32)
    lvl_flip = np.zeros(n + 2, dtype=np.int8)
    meter.track(assign, trail, regs, lits, head, wnext, lvl_start, lvl_lit, lvl_flip)

    status = _k.RUNNING
    while deadline is None or time.perf_counter() < deadline:
        status = _k.dpll_run(n, cstart, lits, assign, trail, head, wnext,
                             lvl_start, lvl_lit, lvl_flip, regs, chunk)
        if status != _k.RUNNING:
            break

    stats = {"decisions": int(regs[_k.DECISIONS]), "propagations": int(regs[_k.PROPAGATIONS])}
    if status == _k.SAT:
        model = assign[1:] == 1
        if not f.is_satisfied_by(model):
            raise AssertionError("DPLL returned an assignment that violates the formula")
        return SatResult("sat", model, decisions=stats["decisions"], stats=stats)
    if status == _k.UNSAT:
        return SatResult("unsat", decisions=stats["decisions"], stats=stats)
    return SatResult("unknown", reason="timeout", decisions=stats["decisions"], stats=stats)


def parse_competition_output(text: str, num_vars: int) -> SatResult:
    status = None
    values = []
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = "sat"
            elif word == "UNSATISFIABLE":
                status = "unsat"
            else:
                status = "unknown"
        elif line.startswith("v "):
            values.extend(int(tok) for tok in line[2:].split())
    if status is None:
        return SatResult("unknown", reason="no status line in solver output")
    if status == "unknown":
        return SatResult("unknown", reason="solver reported UNKNOWN")
    if status == "unsat":
        return SatResult("unsat")
    model = np.zeros(num_vars, dtype=bool)
    for lit in values:
        if lit == 0:
            continue
        if abs(lit) > num_vars:
            return SatResult("unknown", reason=f"literal {lit} out of range")
        model[abs(lit) - 1] = lit > 0
    return SatResult("sat", model)


def solve_sat_external(f: CnfFormula, command: str, timeout_ms: int | None = None) -> SatResult:
    """Run an external solver; ``command`` must contain ``{file}``."""
    if "{file}" not in command:
        raise ValueError("solver command must contain a {file} placeholder")
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="mazedash-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(emit_dimacs(f))
        argv = [tok.replace("{file}", path) for tok in shlex.split(command)]
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True,
                timeout=None if timeout_ms is None else timeout_ms / 1000.0,
            )
        except FileNotFoundError:
            return SatResult("unknown", reason="launch failure")
        except PermissionError:
            return SatResult("unknown", reason="launch failure")
        except subprocess.TimeoutExpired:
            return SatResult("unknown", reason="timeout")
    finally:
        os.unlink(path)
    if proc.returncode not in (0, 10, 20):
        return SatResult("unknown", reason=f"solver exited with status {proc.returncode}")
    res = parse_competition_output(proc.stdout, f.num_vars)
    if res.status == "sat" and not f.is_satisfied_by(res.assignment):
        return SatResult("unknown", reason="reported model does not satisfy the formula")
    return res


def decode_model(assignment: np.ndarray, vm: VarMap, p: Puzzle) -> list[Direction]:
    x = np.asarray(assignment, dtype=bool).reshape(vm.T, vm.T)
    counts = x.sum(axis=1)
    bad = np.nonzero(counts != 1)[0]
    if len(bad):
        t = int(bad[0])
        raise MalformedModel(f"step {t} has {int(counts[t])} true cells")
    path = [vm.cells[int(c)] for c in np.argmax(x, axis=1)]
    moves: list[Direction] = []
    for a, b in zip(path, path[1:]):
        try:
            d = Direction.from_offset(b.row - a.row, b.col - a.col)
        except ValueError:
            raise MalformedModel(f"cells {tuple(a)} and {tuple(b)} are not adjacent") from None
        if not moves or moves[-1] != d:
            moves.append(d)
    return moves


def solve_sat(p: Puzzle, timeout_ms: int | None = None, command: str | None = None,
              meter: MemoryMeter | None = None) -> SolveResult:
    """Encode, solve (internal DPLL, or ``command`` when given) and decode.

    Every satisfiable answer is decoded and replayed through the verifier.
    """
    meter = meter if meter is not None else MemoryMeter()
    t0 = time.perf_counter()
    f, vm = encode_cnf(p)
    meter.alloc(f.nbytes)
    if command is None:
        deadline = None if timeout_ms is None else t0 + timeout_ms / 1000.0
        res = solve_sat_internal(f, meter=meter, deadline=deadline)
    else:
        left = None if timeout_ms is None else max(1, timeout_ms - int((time.perf_counter() - t0) * 1000))
        res = solve_sat_external(f, command, timeout_ms=left)
    elapsed = (time.perf_counter() - t0) * 1000.0

    if res.status == "sat":
        moves = decode_model(res.assignment, vm, p)
        check = verify_solution(p, moves)
        if not check.valid:
            raise AssertionError(f"decoded SAT model is not a valid solution: {check}")
        return SolveResult(SOLVED, moves, res.decisions, elapsed, meter.peak_bytes)
    if res.status == "unsat":
        return SolveResult(UNSOLVABLE, None, res.decisions, elapsed, meter.peak_bytes)
    if res.reason == "timeout":
        return SolveResult(LIMIT_EXCEEDED, None, res.decisions, elapsed, meter.peak_bytes)
    raise ExternalSolverError(res.reason)
