from __future__ import annotations

from dataclasses import dataclass

from .grid import Direction, format_moves, parse_moves

SOLVED = "solved"
UNSOLVABLE = "unsolvable"
LIMIT_EXCEEDED = "limit_exceeded"


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: int | None = None
    timeout_ms: int | None = None

    def __post_init__(self):
        for name in ("max_nodes", "timeout_ms"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive or None")


@dataclass
class SolveResult:
    """Outcome of any solver plus its counters.

    For MCTS ``nodes_expanded`` equals the number of iterations run (each
    iteration expands exactly one node); for SAT it is the number of decisions.
    ``elapsed_ms`` is the only wall-clock field.
    """

    status: str
    moves: list[Direction] | None = None
    nodes_expanded: int = 0
    elapsed_ms: float = 0.0
    peak_tracked_bytes: int = 0
    rollout_steps: int = 0

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    @property
    def move_string(self) -> str | None:
        return None if self.moves is None else format_moves(self.moves)

    def counters(self) -> dict:
        """Deterministic fields (everything except timing)."""
        return {
            "status": self.status,
            "moves": self.move_string,
            "nodes_expanded": self.nodes_expanded,
            "peak_tracked_bytes": self.peak_tracked_bytes,
            "rollout_steps": self.rollout_steps,
        }

    def to_json_obj(self) -> dict:
        return {"result": self.counters(), "timing": {"elapsed_ms": self.elapsed_ms}}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SolveResult":
        r = obj["result"]
        moves = r["moves"]
        return cls(
            status=r["status"],
            moves=None if moves is None else parse_moves(moves),
            nodes_expanded=r["nodes_expanded"],
            elapsed_ms=obj.get("timing", {}).get("elapsed_ms", 0.0),
            peak_tracked_bytes=r["peak_tracked_bytes"],
            rollout_steps=r["rollout_steps"],
        )
