"""Single-agent Monte-Carlo tree search over slide moves.

Tree nodes hold only a move and statistics; the grid lives in one scratch
cell array that is replayed on the way down and undone on the way up, so a
node costs ``NODE_BYTES`` regardless of grid size. Subtrees proven unable to
reach a full cover are blocked and never selected again, which makes the
search exhaustive once the budget is large enough.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .grid import Direction, Puzzle
from .kernels import mcts as _k
from .meter import MemoryMeter
from .results import LIMIT_EXCEEDED, SOLVED, UNSOLVABLE, SolveResult

NODE_BYTES = _k.NODE_BYTES


@dataclass(frozen=True)
class MctsConfig:
    exploration_c: float = math.sqrt(2.0)
    max_iterations: int = 10_000_000
    timeout_ms: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class MctsSearch:
    """One search tree plus its scratch state.

    ``run()`` drives whole iterations through the compiled loop; ``select``,
    ``expand``, ``simulate`` and ``backpropagate`` expose the four phases
    individually for inspection and testing.
    """

    def __init__(self, puzzle: Puzzle, cfg: MctsConfig | None = None, meter: MemoryMeter | None = None):
        self.puzzle = puzzle
        self.cfg = cfg or MctsConfig()
        self.meter = meter if meter is not None else MemoryMeter()
        self.rng = np.random.default_rng(self.cfg.seed)

        T = puzzle.free_count
        self.cells = puzzle.initial_cells()
        self.regs = np.zeros(7, dtype=np.int64)
        self.regs[_k.R_POS] = puzzle.index(puzzle.start)
        self.regs[_k.R_VISITED] = 1
        self.regs[_k.R_NODES] = 1
        self.path_node = np.zeros(T + 1, dtype=np.int32)
        self.path_dir = np.zeros(T + 1, dtype=np.int8)
        self.path_len = np.zeros(T + 1, dtype=np.int32)
        self.roll_dir = np.zeros(T + 1, dtype=np.int8)
        self.roll_len = np.zeros(T + 1, dtype=np.int32)
        self.solution = np.zeros(T + 1, dtype=np.int8)
        self.scratch_bytes = self.meter.track(
            self.cells, self.regs, self.path_node, self.path_dir, self.path_len,
            self.roll_dir, self.roll_len, self.solution,
        )

        self._capacity = 0
        self._grow(256)
        self.move[0] = _k.NO_MOVE
        self.parent[0] = -1
        self.first_child[0] = -1
        self.meter.alloc(NODE_BYTES)
        self._tracked_nodes = 1

    # tree storage

    def _grow(self, needed):
        cap = max(needed, 2 * self._capacity)
        for name, dtype in _k.NODE_FIELDS:
            old = getattr(self, name, None)
            arr = np.zeros(cap, dtype=dtype)
            if old is not None:
                arr[: len(old)] = old
            setattr(self, name, arr)
        self._capacity = cap

    @property
    def n_nodes(self) -> int:
        return int(self.regs[_k.R_NODES])

    @property
    def iterations(self) -> int:
        return int(self.regs[_k.R_ITERS])

    @property
    def rollout_steps(self) -> int:
        return int(self.regs[_k.R_ROLLOUT_STEPS])

    @property
    def root_blocked(self) -> bool:
        return bool(self.blocked[0])

    def _sync_meter(self):
        n = self.n_nodes
        if n > self._tracked_nodes:
            self.meter.alloc((n - self._tracked_nodes) * NODE_BYTES)
            self._tracked_nodes = n

    def tracked_bytes_per_node(self) -> float:
        return (self.meter.current_bytes - self.scratch_bytes) / self.n_nodes

    def children(self, node: int) -> range:
        f = int(self.first_child[node])
        return range(f, f + int(self.n_children[node])) if f >= 0 else range(0)

    def _tree_arrays(self):
        return (self.move, self.parent, self.first_child, self.n_children,
                self.visits, self.best, self.blocked, self.expanded)

    # the four phases, one at a time

    def select(self) -> int:
        """Descend to an unexpanded node; scratch ends at that node's state."""
        return int(_k.select_leaf(
            self.cells, self.puzzle.rows, self.puzzle.cols, self.regs,
            self.path_node, self.path_dir, self.path_len,
            self.move, self.first_child, self.n_children, self.visits, self.best,
            self.blocked, self.expanded, float(self.cfg.exploration_c),
        ))

    def expand(self, node: int) -> Direction | None:
        """Expand ``node``; returns the direction of a child that completes
        the cover, if any."""
        if self.n_nodes + 4 > self._capacity:
            self._grow(self.n_nodes + 4)
        p = self.puzzle
        win = int(_k.expand_node(self.cells, p.rows, p.cols, p.free_count, self.regs, node,
                                 *self._tree_arrays()))
        self._sync_meter()
        return None if win < 0 else Direction(win)

    def simulate(self, rng: np.random.Generator | None = None) -> tuple[float, list[Direction] | None]:
        """Random playout from the scratch state. Returns the reward and,
        when the playout covered every cell, the full winning move list."""
        p = self.puzzle
        rng = rng or self.rng
        randoms = rng.random(p.free_count)
        vis0 = int(self.regs[_k.R_VISITED])
        m, end = _k.rollout(self.cells, p.rows, p.cols, p.free_count, int(self.regs[_k.R_POS]),
                            vis0, randoms, self.roll_dir, self.roll_len)
        self.regs[_k.R_ROLLOUT_STEPS] += end - vis0
        reward = end / p.free_count
        if end == p.free_count:
            depth = int(self.regs[_k.R_DEPTH])
            moves = [Direction(int(d)) for d in self.path_dir[:depth]]
            moves += [Direction(int(d)) for d in self.roll_dir[:m]]
            return reward, moves
        return reward, None

    def backpropagate(self, reward: float) -> None:
        _k.backup(self.cells, self.puzzle.cols, self.regs, float(reward),
                  self.path_node, self.path_dir, self.path_len,
                  self.first_child, self.n_children, self.visits, self.best,
                  self.blocked, self.expanded)

    # driver

    def run(self) -> SolveResult:
        cfg = self.cfg
        p = self.puzzle
        t0 = time.perf_counter()
        deadline = None if cfg.timeout_ms is None else t0 + cfg.timeout_ms / 1000.0

        if p.free_count == 1:
            return self._result(SOLVED, [], t0)

        chunk = 32
        status = _k.RUNNING
        while True:
            left = cfg.max_iterations - self.iterations
            if left <= 0:
                break
            n = min(chunk, left)
            if self.n_nodes + 4 * n + 4 > self._capacity:
                self._grow(self.n_nodes + 4 * n + 4)
            randoms = self.rng.random((n, p.free_count))
            status = _k.mcts_run(
                self.cells, p.rows, p.cols, p.free_count, float(cfg.exploration_c), self.regs,
                randoms, n, self.path_node, self.path_dir, self.path_len,
                self.roll_dir, self.roll_len, self.solution, *self._tree_arrays(),
            )
            self._sync_meter()
            if status != _k.RUNNING:
                break
            if deadline is not None and time.perf_counter() >= deadline:
                break
            chunk = min(chunk * 2, 4096)

        if status == _k.SOLVED:
            k = int(self.regs[_k.R_SOL_LEN])
            return self._result(SOLVED, [Direction(int(d)) for d in self.solution[:k]], t0)
        if status == _k.ROOT_BLOCKED or self.root_blocked:
            return self._result(UNSOLVABLE, None, t0)
        return self._result(LIMIT_EXCEEDED, None, t0)

    def _result(self, status, moves, t0):
        return SolveResult(
            status,
            moves,
            nodes_expanded=self.iterations,
            elapsed_ms=(time.perf_counter() - t0) * 1000.0,
            peak_tracked_bytes=self.meter.peak_bytes,
            rollout_steps=self.rollout_steps,
        )


def solve_mcts(p: Puzzle, cfg: MctsConfig | None = None, meter: MemoryMeter | None = None) -> SolveResult:
    return MctsSearch(p, cfg, meter).run()
