"""Puzzle definition, slide-move semantics and the solution verifier.

A slide keeps going until the next cell is a wall, an obstacle or a cell that
has already been visited. Because visited cells block exactly like obstacles,
any move sequence that can be replayed automatically obeys the forced-straight
turning rule, so the verifier only has to replay and count coverage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .kernels import slide as _k


class Direction(enum.IntEnum):
    U = 0
    R = 1
    D = 2
    L = 3

    @property
    def offset(self) -> tuple[int, int]:
        return int(_k.DR[self]), int(_k.DC[self])

    @property
    def opposite(self) -> "Direction":
        return Direction((self + 2) % 4)

    @property
    def perpendiculars(self) -> tuple["Direction", "Direction"]:
        return Direction((self + 1) % 4), Direction((self + 3) % 4)

    @property
    def char(self) -> str:
        return self.name

    @classmethod
    def from_char(cls, ch: str) -> "Direction":
        try:
            return cls[ch.upper()]
        except KeyError:
            raise ValueError(f"not a move character: {ch!r}") from None

    @classmethod
    def from_offset(cls, dr: int, dc: int) -> "Direction":
        for d in cls:
            if d.offset == (dr, dc):
                return d
        raise ValueError(f"not a unit offset: {(dr, dc)}")


DIRECTIONS = tuple(Direction)


class Coord(NamedTuple):
    row: int
    col: int


def parse_moves(text: str) -> list[Direction]:
    return [Direction.from_char(ch) for ch in text.strip()]


def format_moves(moves: Iterable[int]) -> str:
    return "".join(Direction(d).char for d in moves)


class PuzzleFormatError(ValueError):
    pass


class RaggedRows(PuzzleFormatError):
    pass


class NoStart(PuzzleFormatError):
    pass


class MultipleStart(PuzzleFormatError):
    pass


class InvalidCharacter(PuzzleFormatError):
    def __init__(self, line: int, col: int, char: str):
        super().__init__(f"invalid character {char!r} at line {line}, column {col}")
        self.position = (line, col)
        self.char = char


class IllegalMove(ValueError):
    pass


class UndoOrderViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Puzzle:
    rows: int
    cols: int
    obstacles: frozenset = field(default_factory=frozenset)
    start: Coord = Coord(0, 0)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and one column")
        obstacles = frozenset(Coord(*o) for o in self.obstacles)
        object.__setattr__(self, "obstacles", obstacles)
        object.__setattr__(self, "start", Coord(*self.start))
        for o in obstacles:
            if not self.in_bounds(o):
                raise ValueError(f"obstacle {tuple(o)} out of bounds")
        if not self.in_bounds(self.start):
            raise ValueError(f"start {tuple(self.start)} out of bounds")
        if self.start in obstacles:
            raise ValueError("start cell is an obstacle")

    @property
    def free_count(self) -> int:
        return self.rows * self.cols - len(self.obstacles)

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c[0] < self.rows and 0 <= c[1] < self.cols

    def is_free(self, c: Coord) -> bool:
        return self.in_bounds(c) and Coord(*c) not in self.obstacles

    def index(self, c: Coord) -> int:
        return c[0] * self.cols + c[1]

    def coord(self, pos: int) -> Coord:
        return Coord(pos // self.cols, pos % self.cols)

    def free_cells(self) -> list[Coord]:
        """Free cells in row-major order."""
        return [
            Coord(r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if Coord(r, c) not in self.obstacles
        ]

    def initial_cells(self) -> np.ndarray:
        """Flat cell array with obstacles marked and the start visited."""
        cells = np.zeros(self.rows * self.cols, dtype=np.uint8)
        for o in self.obstacles:
            cells[self.index(o)] = _k.OBSTACLE
        cells[self.index(self.start)] = _k.VISITED
        return cells

    def __str__(self) -> str:
        return serialize_puzzle(self)


def parse_puzzle(text: str) -> Puzzle:
    rows = []
    line_numbers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith(";"):
            continue
        rows.append(raw.rstrip())
        line_numbers.append(lineno)
    while rows and not rows[-1]:
        rows.pop()
        line_numbers.pop()
    if not rows:
        raise PuzzleFormatError("no grid rows")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise RaggedRows("grid rows have different lengths")

    obstacles = set()
    starts = []
    for r, (row, lineno) in enumerate(zip(rows, line_numbers)):
        for c, ch in enumerate(row):
            if ch == "#":
                obstacles.add(Coord(r, c))
            elif ch == "S":
                starts.append(Coord(r, c))
            elif ch != ".":
                raise InvalidCharacter(lineno, c + 1, ch)
    if not starts:
        raise NoStart("grid has no start cell")
    if len(starts) > 1:
        raise MultipleStart(f"grid has {len(starts)} start cells")
    return Puzzle(len(rows), width, frozenset(obstacles), starts[0])


def serialize_puzzle(p: Puzzle) -> str:
    out = []
    for r in range(p.rows):
        line = []
        for c in range(p.cols):
            if (r, c) == p.start:
                line.append("S")
            elif (r, c) in p.obstacles:
                line.append("#")
            else:
                line.append(".")
        out.append("".join(line) + "\n")
    return "".join(out)


class UndoToken(NamedTuple):
    direction: Direction
    slide_length: int


class SlideState:
    """Mutable exploration state on a single flat cell array.

    Equality is structural over (visited mask, agent, visited_count, moves).
    """

    def __init__(self, puzzle: Puzzle):
        self.puzzle = puzzle
        self.cells = puzzle.initial_cells()
        self.pos = puzzle.index(puzzle.start)
        self.visited_count = 1
        self.moves: list[Direction] = []
        self.undo_stack: list[UndoToken] = []

    @property
    def agent(self) -> Coord:
        return self.puzzle.coord(self.pos)

    @property
    def visited(self) -> np.ndarray:
        return (self.cells == _k.VISITED).reshape(self.puzzle.rows, self.puzzle.cols)

    def slide_destination(self, d: Direction) -> tuple[Coord, int] | None:
        p = self.puzzle
        n = int(_k.slide_length(self.cells, p.rows, p.cols, self.pos, int(d)))
        if n == 0:
            return None
        dr, dc = Direction(d).offset
        r, c = self.agent
        return Coord(r + n * dr, c + n * dc), n

    def legal_moves(self) -> list[Direction]:
        p = self.puzzle
        return [
            d for d in DIRECTIONS if _k.slide_length(self.cells, p.rows, p.cols, self.pos, int(d)) > 0
        ]

    def apply_move(self, d: Direction) -> UndoToken:
        d = Direction(d)
        p = self.puzzle
        n = int(_k.slide_length(self.cells, p.rows, p.cols, self.pos, int(d)))
        if n == 0:
            raise IllegalMove(f"{d.char} is blocked at {tuple(self.agent)}")
        self.pos = int(_k.apply_slide(self.cells, p.cols, self.pos, int(d), n))
        self.visited_count += n
        self.moves.append(d)
        token = UndoToken(d, n)
        self.undo_stack.append(token)
        return token

    def undo_move(self, token: UndoToken) -> None:
        if not self.undo_stack or self.undo_stack[-1] is not token:
            raise UndoOrderViolation("token is not the most recent move")
        self.undo_stack.pop()
        self.moves.pop()
        self.pos = int(
            _k.undo_slide(self.cells, self.puzzle.cols, self.pos, int(token.direction), token.slide_length)
        )
        self.visited_count -= token.slide_length

    def is_complete(self) -> bool:
        return self.visited_count == self.puzzle.free_count

    def is_deadlock(self) -> bool:
        if self.is_complete():
            return False
        p = self.puzzle
        return _k.count_moves(self.cells, p.rows, p.cols, self.pos) == 0

    def copy(self) -> "SlideState":
        other = SlideState.__new__(SlideState)
        other.puzzle = self.puzzle
        other.cells = self.cells.copy()
        other.pos = self.pos
        other.visited_count = self.visited_count
        other.moves = list(self.moves)
        other.undo_stack = list(self.undo_stack)
        return other

    def __eq__(self, other):
        if not isinstance(other, SlideState):
            return NotImplemented
        return (
            self.puzzle == other.puzzle
            and np.array_equal(self.cells, other.cells)
            and self.pos == other.pos
            and self.visited_count == other.visited_count
            and self.moves == other.moves
        )

    def __repr__(self):
        return f"SlideState(agent={tuple(self.agent)}, visited={self.visited_count}/{self.puzzle.free_count}, moves={format_moves(self.moves)!r})"


@dataclass(frozen=True)
class VerifyResult:
    outcome: str  # "valid" | "illegal_move" | "incomplete"
    index: int | None = None
    missing: int | None = None

    @property
    def valid(self) -> bool:
        return self.outcome == "valid"

    def __str__(self):
        if self.outcome == "valid":
            return "Valid"
        if self.outcome == "illegal_move":
            return f"IllegalMove({self.index})"
        return f"IncompleteCoverage({self.missing})"

    def to_dict(self) -> dict:
        return {"outcome": self.outcome, "index": self.index, "missing": self.missing}


def verify_solution(p: Puzzle, moves: Sequence[Direction] | str) -> VerifyResult:
    if isinstance(moves, str):
        try:
            moves = parse_moves(moves)
        except ValueError:
            bad = next(i for i, ch in enumerate(moves.strip()) if ch.upper() not in "URDL")
            return VerifyResult("illegal_move", index=bad)
    s = SlideState(p)
    for i, d in enumerate(moves):
        try:
            s.apply_move(d)
        except IllegalMove:
            return VerifyResult("illegal_move", index=i)
    missing = p.free_count - s.visited_count
    if missing:
        return VerifyResult("incomplete", missing=missing)
    return VerifyResult("valid")


def expand_to_cells(p: Puzzle, moves: Sequence[Direction] | str) -> list[Coord]:
    """Per-cell path: the start followed by every cell each slide traverses."""
    if isinstance(moves, str):
        moves = parse_moves(moves)
    s = SlideState(p)
    path = [p.start]
    for d in moves:
        dest = s.slide_destination(d)
        if dest is None:
            raise IllegalMove(f"{Direction(d).char} is blocked at {tuple(s.agent)}")
        dr, dc = Direction(d).offset
        r, c = s.agent
        path.extend(Coord(r + k * dr, c + k * dc) for k in range(1, dest[1] + 1))
        s.apply_move(d)
    return path
