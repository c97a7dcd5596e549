"""Solvable instance generation by random-walk carving.

An agent walks the empty grid in straight segments. Whenever it turns early,
the cell it would have moved into next becomes an obstacle, so the walk is a
legal slide sequence on the finished grid. Cells the walk never reached are
filled with obstacles. The walk, compressed to slide moves, is the witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels as _k
from .backtrack import solve_backtrack
from .grid import DIRECTIONS, Coord, Direction, Puzzle, format_moves, verify_solution
from .results import SearchLimits

# Candidate walks per attempt, each with its own early-turn probability; the
# walk whose final obstacle count lands closest to the target is kept. Large
# grids need rare early turns because unreached filler cells add obstacles too.
TURN_PROBS = tuple(0.5 * 0.8 ** (i / 2) for i in range(32))

# Walks that never turn early are nearly determined by their start cell and
# repeat across seeds, so candidates with fewer placed blockers rank last.
MIN_BLOCKERS = 2


class GenerationExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    rows: int
    cols: int
    target_obstacles: int = 0
    seed: int = 0
    max_retries: int = 100
    validate_timeout_ms: int | None = 60_000

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if not 0 <= self.target_obstacles < self.rows * self.cols:
            raise ValueError("target_obstacles must be in [0, rows*cols)")
        if self.max_retries < 1:
            raise ValueError("max_retries must be positive")


@dataclass(frozen=True)
class GeneratedInstance:
    puzzle: Puzzle
    witness: tuple[Direction, ...]
    actual_obstacles: int
    seed: int

    @property
    def witness_string(self) -> str:
        return format_moves(self.witness)

    def to_text(self) -> str:
        """Puzzle file text with a leading ';' metadata comment."""
        from .grid import serialize_puzzle

        meta = f"; seed={self.seed} obstacles={self.actual_obstacles} witness={self.witness_string}\n"
        return meta + serialize_puzzle(self.puzzle)


def carve_walk(rows: int, cols: int, target: int, rng: np.random.Generator, turn_prob: float = 0.5):
    """One random carving walk. Returns (start, obstacles, moves, blockers placed)."""
    cells = np.zeros(rows * cols, dtype=np.uint8)
    pos = int(rng.integers(rows * cols))
    start = pos
    cells[pos] = _k.VISITED
    placed = 0
    current = None
    moves = []
    while True:
        runs = [(d, _k.slide_length(cells, rows, cols, pos, int(d))) for d in DIRECTIONS if d != current]
        runs = [(d, n) for d, n in runs if n > 0]
        if not runs:
            break
        d, longest = runs[int(rng.integers(len(runs)))]
        if placed < target and longest > 1 and rng.random() < turn_prob:
            n = int(rng.integers(1, longest))
        else:
            n = longest
        pos = int(_k.apply_slide(cells, cols, pos, int(d), n))
        if n < longest:
            dr, dc = d.offset
            cells[(pos // cols + dr) * cols + (pos % cols + dc)] = _k.OBSTACLE
            placed += 1
        moves.append(d)
        current = d
    obstacles = [Coord(i // cols, i % cols) for i in np.nonzero(cells != _k.VISITED)[0].tolist()]
    return Coord(start // cols, start % cols), obstacles, moves, placed


def _attempt(cfg: GenConfig, attempt: int):
    ss = np.random.SeedSequence([cfg.seed, attempt])
    need = min(MIN_BLOCKERS, cfg.target_obstacles)
    best = None
    for child, turn_prob in zip(ss.spawn(len(TURN_PROBS)), TURN_PROBS):
        rng = np.random.default_rng(child)
        start, obstacles, moves, placed = carve_walk(cfg.rows, cfg.cols, cfg.target_obstacles, rng, turn_prob)
        rank = (placed < need, abs(len(obstacles) - cfg.target_obstacles))
        if best is None or rank < best[0]:
            best = (rank, start, obstacles, moves)
        if rank == (False, 0):
            break
    _, start, obstacles, moves = best
    return Puzzle(cfg.rows, cfg.cols, frozenset(obstacles), start), tuple(moves)


def generate_puzzle(cfg: GenConfig) -> GeneratedInstance:
    for attempt in range(cfg.max_retries):
        puzzle, witness = _attempt(cfg, attempt)
        if not verify_solution(puzzle, witness).valid:
            raise AssertionError("carved walk is not a valid solution of its own puzzle")
        inst = GeneratedInstance(puzzle, witness, len(puzzle.obstacles), cfg.seed)
        if validate_generated(inst, cfg.validate_timeout_ms):
            return inst
    raise GenerationExhausted(f"no validated instance after {cfg.max_retries} attempts")


def validate_generated(g: GeneratedInstance, timeout_ms: int | None = None) -> bool:
    if not verify_solution(g.puzzle, g.witness).valid:
        return False
    return solve_backtrack(g.puzzle, SearchLimits(timeout_ms=timeout_ms)).solved
