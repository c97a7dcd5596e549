"""Exhaustive depth-first search with chronological backtracking.

This is the naive baseline and the correctness oracle for the other solvers:
no ordering heuristics and no connectivity pruning. Children are tried in
U, R, D, L order, so the first solution found is deterministic.
"""

from __future__ import annotations

import time

import numpy as np

from .grid import Direction, Puzzle
from .kernels import dfs as _dfs
from .meter import MemoryMeter
from .results import LIMIT_EXCEEDED, SOLVED, UNSOLVABLE, SearchLimits, SolveResult

CHUNK = 1 << 16


def solve_backtrack(p: Puzzle, limits: SearchLimits | None = None, meter: MemoryMeter | None = None) -> SolveResult:
    limits = limits or SearchLimits()
    meter = meter if meter is not None else MemoryMeter()
    t0 = time.perf_counter()
    deadline = None if limits.timeout_ms is None else t0 + limits.timeout_ms / 1000.0

    depth_cap = p.free_count + 1
    cells = p.initial_cells()
    dirs = np.zeros(depth_cap, dtype=np.int8)
    lens = np.zeros(depth_cap, dtype=np.int32)
    nexts = np.zeros(depth_cap, dtype=np.int8)
    regs = np.array([p.index(p.start), 0, 1, 0], dtype=np.int64)
    meter.track(cells, dirs, lens, nexts, regs)

    while True:
        budget = CHUNK
        if limits.max_nodes is not None:
            budget = max(0, min(budget, limits.max_nodes - int(regs[_dfs.NODES])))
        status = _dfs.dfs_run(cells, p.rows, p.cols, p.free_count, dirs, lens, nexts, regs, budget)
        if status != _dfs.BUDGET:
            break
        if limits.max_nodes is not None and regs[_dfs.NODES] >= limits.max_nodes:
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break

    elapsed = (time.perf_counter() - t0) * 1000.0
    nodes = int(regs[_dfs.NODES])
    if status == _dfs.FOUND:
        depth = int(regs[_dfs.DEPTH])
        moves = [Direction(int(d)) for d in dirs[:depth]]
        return SolveResult(SOLVED, moves, nodes, elapsed, meter.peak_bytes)
    if status == _dfs.EXHAUSTED:
        return SolveResult(UNSOLVABLE, None, nodes, elapsed, meter.peak_bytes)
    return SolveResult(LIMIT_EXCEEDED, None, nodes, elapsed, meter.peak_bytes)
