"""Maze Dash solver workbench: slide-move grid model, backtracking, MCTS and
SAT solvers, an instance generator and a benchmark harness."""

from ._jit import USE_JIT, backend
from .backtrack import solve_backtrack
from .bench import BenchConfig, BenchRecord, emit_csv, emit_table, run_bench
from .generator import GenConfig, GeneratedInstance, generate_puzzle, validate_generated
from .grid import (
    Coord,
    Direction,
    Puzzle,
    SlideState,
    UndoToken,
    VerifyResult,
    expand_to_cells,
    format_moves,
    parse_moves,
    parse_puzzle,
    serialize_puzzle,
    verify_solution,
)
from .mcts import MctsConfig, MctsSearch, solve_mcts
from .meter import MemoryMeter
from .results import SearchLimits, SolveResult
from .sat import CnfFormula, SatResult, VarMap, decode_model, emit_dimacs, encode_cnf, solve_sat

__all__ = [
    "USE_JIT", "backend",
    "Coord", "Direction", "Puzzle", "SlideState", "UndoToken", "VerifyResult",
    "parse_puzzle", "serialize_puzzle", "parse_moves", "format_moves",
    "verify_solution", "expand_to_cells",
    "SearchLimits", "SolveResult", "MemoryMeter",
    "solve_backtrack",
    "MctsConfig", "MctsSearch", "solve_mcts",
    "CnfFormula", "VarMap", "SatResult", "encode_cnf", "emit_dimacs", "decode_model", "solve_sat",
    "GenConfig", "GeneratedInstance", "generate_puzzle", "validate_generated",
    "BenchConfig", "BenchRecord", "run_bench", "emit_csv", "emit_table",
]
