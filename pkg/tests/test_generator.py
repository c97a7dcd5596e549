import numpy as np
import pytest

from oracles import replay
from mazedash import parse_puzzle, serialize_puzzle, solve_backtrack, verify_solution
from mazedash.generator import (
    GenConfig,
    GeneratedInstance,
    GenerationExhausted,
    carve_walk,
    generate_puzzle,
    validate_generated,
)
from mazedash.grid import Direction


@pytest.mark.parametrize("seed", range(10))
def test_corridor_witness(seed):
    g = generate_puzzle(GenConfig(1, 5, 0, seed=seed))
    assert g.witness_string in ("R", "L")
    assert g.actual_obstacles == 0
    assert g.puzzle.start in ((0, 0), (0, 4))


def test_five_by_five_deterministic():
    a = generate_puzzle(GenConfig(5, 5, 4, seed=1234))
    b = generate_puzzle(GenConfig(5, 5, 4, seed=1234))
    assert a.to_text() == b.to_text()
    assert verify_solution(a.puzzle, a.witness).valid
    assert a.actual_obstacles == len(a.puzzle.obstacles)


def test_witness_valid_by_independent_replay():
    for seed in range(200):
        g = generate_puzzle(GenConfig(6, 6, 10, seed=seed))
        p = g.puzzle
        path, err = replay(p.rows, p.cols, p.obstacles, p.start, g.witness_string)
        assert err is None and len(path) == p.free_count


@pytest.mark.parametrize("size,target", [(5, 4), (6, 10), (10, 32), (15, 66)])
def test_obstacle_count_near_target(size, target):
    counts = [generate_puzzle(GenConfig(size, size, target, seed=s)).actual_obstacles for s in range(30)]
    mean = float(np.mean(counts))
    assert abs(mean - target) <= max(2.0, 0.15 * target), (mean, counts)


def test_validate_generated_examples():
    g = generate_puzzle(GenConfig(6, 6, 10, seed=3))
    assert validate_generated(g)
    truncated = GeneratedInstance(g.puzzle, g.witness[:-1], g.actual_obstacles, g.seed)
    assert not validate_generated(truncated)
    fake = GeneratedInstance(parse_puzzle(".S.\n"), (Direction.L,), 0, 0)
    assert not validate_generated(fake)


def test_seed_collisions_rare():
    texts = {serialize_puzzle(generate_puzzle(GenConfig(10, 10, 32, seed=s)).puzzle) for s in range(1000)}
    assert len(texts) >= 995


def test_carve_walk_covers_every_free_cell():
    rng = np.random.default_rng(0)
    for _ in range(50):
        start, obstacles, moves, placed = carve_walk(7, 7, 12, rng)
        assert placed <= len(obstacles)
        path, err = replay(7, 7, obstacles, start, "".join(d.char for d in moves))
        assert err is None
        assert len(path) + len(obstacles) == 49


def test_generated_solvable_by_backtracking():
    for seed in range(30):
        g = generate_puzzle(GenConfig(10, 10, 32, seed=seed))
        assert solve_backtrack(g.puzzle).solved


def test_to_text_parses_back():
    g = generate_puzzle(GenConfig(5, 5, 4, seed=8))
    text = g.to_text()
    first = text.splitlines()[0]
    assert first.startswith("; seed=8 ")
    assert f"witness={g.witness_string}" in first
    assert parse_puzzle(text) == g.puzzle


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(3, 3, 9)
    with pytest.raises(ValueError):
        GenConfig(0, 3, 0)
    with pytest.raises(ValueError):
        GenConfig(3, 3, -1)
    with pytest.raises(ValueError):
        GenConfig(3, 3, 0, max_retries=0)


def test_exhaustion_is_reported(monkeypatch):
    import mazedash.generator as gen

    monkeypatch.setattr(gen, "validate_generated", lambda g, timeout_ms=None: False)
    with pytest.raises(GenerationExhausted):
        generate_puzzle(GenConfig(4, 4, 2, seed=0, max_retries=3))
