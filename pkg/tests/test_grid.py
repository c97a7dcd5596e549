import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import puzzle_from
from oracles import (
    all_small_puzzles,
    enumerate_cell_paths,
    enumerate_move_strings,
    replay,
    satisfies_model,
)
from mazedash.grid import (
    Coord,
    Direction,
    IllegalMove,
    InvalidCharacter,
    MultipleStart,
    NoStart,
    Puzzle,
    RaggedRows,
    SlideState,
    UndoOrderViolation,
    expand_to_cells,
    format_moves,
    parse_moves,
    parse_puzzle,
    serialize_puzzle,
    verify_solution,
)

U, R, D, L = Direction.U, Direction.R, Direction.D, Direction.L


# parsing and serialization


def test_parse_single_row():
    p = parse_puzzle("S..")
    assert (p.rows, p.cols, p.obstacles, p.start) == (1, 3, frozenset(), (0, 0))


def test_parse_with_obstacle():
    p = parse_puzzle("S#\n..")
    assert (p.rows, p.cols) == (2, 2)
    assert p.obstacles == {(0, 1)}
    assert p.start == (0, 0)


@pytest.mark.parametrize(
    "text,exc",
    [
        ("S.\n..\n...", RaggedRows),
        ("..\n..\n", NoStart),
        ("S.\n.S\n", MultipleStart),
        ("S.\n.x\n", InvalidCharacter),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_puzzle(text)


def test_invalid_character_position():
    with pytest.raises(InvalidCharacter) as info:
        parse_puzzle("; note\nS.\n.x\n")
    assert info.value.position == (3, 2)


def test_comments_and_trailing_whitespace_ignored():
    p = parse_puzzle("; seed=1\nS#  \n..\n; trailing\n\n")
    assert serialize_puzzle(p) == "S#\n..\n"


def test_serialize_examples():
    assert serialize_puzzle(Puzzle(1, 3, frozenset(), (0, 0))) == "S..\n"
    assert serialize_puzzle(Puzzle(2, 2, frozenset({(0, 1)}), (0, 0))) == "S#\n..\n"


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_parse_serialize_roundtrip(data):
    rows = data.draw(st.integers(1, 6))
    cols = data.draw(st.integers(1, 6))
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    start = data.draw(st.sampled_from(cells))
    obstacles = data.draw(st.sets(st.sampled_from(cells)))
    obstacles.discard(start)
    p = Puzzle(rows, cols, frozenset(obstacles), start)
    text = serialize_puzzle(p)
    assert parse_puzzle(text) == p
    assert serialize_puzzle(parse_puzzle(text)) == text


def test_puzzle_invariants():
    with pytest.raises(ValueError):
        Puzzle(2, 2, frozenset({(0, 0)}), (0, 0))
    with pytest.raises(ValueError):
        Puzzle(2, 2, frozenset({(2, 0)}), (0, 0))
    assert Puzzle(3, 4, frozenset({(1, 1)}), (0, 0)).free_count == 11


def test_direction_properties():
    assert [d.name for d in sorted(Direction)] == ["U", "R", "D", "L"]
    assert U.offset == (-1, 0) and R.offset == (0, 1) and D.offset == (1, 0) and L.offset == (0, -1)
    for d in Direction:
        assert d.opposite.opposite == d
        assert d.opposite != d
        assert set(d.perpendiculars) == set(Direction) - {d, d.opposite}
    assert parse_moves("urdl") == [U, R, D, L]
    assert format_moves([U, R, D, L]) == "URDL"


# slide semantics


def test_slide_destination_corridor():
    s = SlideState(parse_puzzle("S....\n"))
    assert s.slide_destination(R) == ((0, 4), 4)


def test_slide_destination_stops_before_visited(grid3):
    s = SlideState(grid3)
    for d in (R, D, L):
        s.apply_move(d)
    assert s.agent == (2, 0)
    assert s.slide_destination(U) == ((1, 0), 1)
    # the oracle replay agrees
    path, err = replay(3, 3, (), (0, 0), "RDLU")
    assert err is None and path[-1] == (1, 0)


def test_slide_destination_wall(grid3):
    assert SlideState(grid3).slide_destination(U) is None


def _stop_rule_holds(p, s, d):
    before = s.visited.copy()
    dest = s.slide_destination(d)
    if dest is None:
        dr, dc = d.offset
        nxt = (s.agent[0] + dr, s.agent[1] + dc)
        return not p.is_free(nxt) or before[nxt]
    stop, n = dest
    dr, dc = d.offset
    after = (stop[0] + dr, stop[1] + dc)
    if p.is_free(after) and not before[after]:
        return False
    for k in range(1, n + 1):
        cell = (s.agent[0] + k * dr, s.agent[1] + k * dc)
        if not p.is_free(cell) or before[cell]:
            return False
    return True


def test_stop_rule_exhaustive_3x3():
    for rows, cols, obs, start in all_small_puzzles(9):
        if (rows, cols) != (3, 3):
            continue
        p = puzzle_from(rows, cols, obs, start)
        s = SlideState(p)
        stack = [0]

        def walk(depth):
            for d in Direction:
                assert _stop_rule_holds(p, s, d)
            if depth == 4:
                return
            for d in s.legal_moves():
                t = s.apply_move(d)
                walk(depth + 1)
                s.undo_move(t)

        walk(0)
        assert stack == [0]


def test_legal_moves_examples(grid3):
    s = SlideState(grid3)
    assert s.legal_moves() == [R, D]
    s.apply_move(R)
    assert s.agent == (0, 2)
    assert s.legal_moves() == [D]
    m = SlideState(parse_puzzle(".S.\n"))
    m.apply_move(L)
    assert m.legal_moves() == []


def _reachable_branching(p):
    s = SlideState(p)
    worst_root = len(s.legal_moves())
    worst_inner = 0

    def walk():
        nonlocal worst_inner
        for d in s.legal_moves():
            t = s.apply_move(d)
            worst_inner = max(worst_inner, len(s.legal_moves()))
            assert d not in s.legal_moves() and d.opposite not in s.legal_moves()
            walk()
            s.undo_move(t)

    walk()
    return worst_root, worst_inner


def test_branch_bound_exhaustive():
    checked = 0
    for rows, cols, obs, start in all_small_puzzles(16, max_obstacles=2):
        if (rows, cols) not in ((3, 3), (4, 4)):
            continue
        root, inner = _reachable_branching(puzzle_from(rows, cols, obs, start))
        assert root <= 4
        assert inner <= 2
        checked += 1
    assert checked == 46 * 9 - (9 + 36 * 2) + (1 + 16 + 120) * 16 - (16 + 120 * 2)


def test_apply_move_examples(corridor):
    s = SlideState(corridor)
    s.apply_move(R)
    assert s.agent == (0, 2) and s.visited_count == 3
    s2 = SlideState(parse_puzzle("S.\n..\n"))
    for d in (R, D, L):
        s2.apply_move(d)
    assert s2.visited_count == 4 and s2.is_complete()


def test_apply_move_illegal(grid3):
    s = SlideState(grid3)
    with pytest.raises(IllegalMove):
        s.apply_move(U)
    assert s == SlideState(grid3)


def test_undo_restores_fresh():
    p = parse_puzzle("S....\n")
    s = SlideState(p)
    t = s.apply_move(R)
    s.undo_move(t)
    assert s == SlideState(p)
    assert s.undo_stack == []


@pytest.mark.parametrize("seed", range(20))
def test_random_apply_undo_sequence(seed):
    rng = random.Random(seed)
    cells = [(r, c) for r in range(5) for c in range(5)]
    obstacles = set(rng.sample(cells, rng.randint(0, 5)))
    start = rng.choice([c for c in cells if c not in obstacles])
    p = Puzzle(5, 5, frozenset(obstacles), start)
    s = SlideState(p)
    snapshots = [s.copy()]
    tokens = []
    for _ in range(10):
        moves = s.legal_moves()
        if not moves:
            break
        tokens.append(s.apply_move(rng.choice(moves)))
        snapshots.append(s.copy())
    while tokens:
        snapshots.pop()
        s.undo_move(tokens.pop())
        assert s == snapshots[-1]
        assert np.array_equal(s.cells, snapshots[-1].cells)
    assert s == SlideState(p)


def test_undo_stale_token(grid3):
    s = SlideState(grid3)
    t1 = s.apply_move(R)
    s.apply_move(D)
    with pytest.raises(UndoOrderViolation):
        s.undo_move(t1)


def test_state_invariants_after_moves(grid3):
    s = SlideState(grid3)
    for d in (R, D, L):
        s.apply_move(d)
        assert s.visited[grid3.start]
        assert s.visited_count == int(s.visited.sum())
        assert s.visited[s.agent]
        assert grid3.is_free(s.agent)
    replayed = SlideState(grid3)
    for d in s.moves:
        replayed.apply_move(d)
    assert replayed == s


def test_complete_and_deadlock():
    s = SlideState(parse_puzzle("S.\n..\n"))
    for d in (R, D, L):
        s.apply_move(d)
    assert s.is_complete() and not s.is_deadlock()
    m = SlideState(parse_puzzle(".S.\n"))
    m.apply_move(L)
    assert m.is_deadlock() and not m.is_complete()
    fresh = SlideState(parse_puzzle("S..\n...\n...\n"))
    assert not fresh.is_complete() and not fresh.is_deadlock()


# verifier and per-cell expansion


def test_verify_examples(grid3):
    assert str(verify_solution(grid3, "RDLUR")) == "Valid"
    assert str(verify_solution(grid3, "RDL")) == "IncompleteCoverage(2)"
    assert str(verify_solution(parse_puzzle(".S.\n"), "LR")) == "IllegalMove(1)"


def test_verify_examples_against_oracle():
    valid = []
    for m in enumerate_move_strings(3, 3, (), (0, 0), 6):
        path, _ = replay(3, 3, (), (0, 0), m)
        if len(path) == 9:
            valid.append(m)
    assert "RDLUR" in valid
    path, _ = replay(3, 3, (), (0, 0), "RDL")
    assert 9 - len(path) == 2
    _, err = replay(1, 3, (), (0, 1), "LR")
    assert err == 1


def test_expand_examples(grid3):
    assert expand_to_cells(parse_puzzle("S..\n"), "R") == [(0, 0), (0, 1), (0, 2)]
    assert expand_to_cells(parse_puzzle("S.\n..\n"), "RDL") == [(0, 0), (0, 1), (1, 1), (1, 0)]
    cells = expand_to_cells(grid3, "RDLUR")
    assert len(cells) == 9 and cells[-1] == (1, 1)
    assert satisfies_model(3, 3, (), (0, 0), [tuple(c) for c in cells])


def test_expand_illegal():
    with pytest.raises(IllegalMove):
        expand_to_cells(parse_puzzle(".S.\n"), "LR")


def test_verify_iff_full_expansion():
    for rows, cols, obs, start in all_small_puzzles(9, max_obstacles=2):
        p = puzzle_from(rows, cols, obs, start)
        for m in enumerate_move_strings(rows, cols, obs, start, 6):
            cells = expand_to_cells(p, m)
            assert verify_solution(p, m).valid == (len(cells) == p.free_count)
            # replayable prefixes never break the movement rules
            full = [tuple(c) for c in cells]
            if len(full) == p.free_count:
                assert satisfies_model(rows, cols, obs, start, full)


def test_model_equivalence_small():
    for rows, cols, obs, start in all_small_puzzles(6):
        p = puzzle_from(rows, cols, obs, start)
        per_cell = set(enumerate_cell_paths(rows, cols, obs, start))
        slides = set()
        for m in enumerate_move_strings(rows, cols, obs, start, p.free_count):
            if verify_solution(p, m).valid:
                slides.add(tuple(tuple(c) for c in expand_to_cells(p, m)))
        assert per_cell == slides, (rows, cols, obs, start)


def test_coord_helpers():
    p = Puzzle(2, 3, frozenset({(1, 2)}), (0, 1))
    assert p.index((1, 1)) == 4
    assert p.coord(4) == Coord(1, 1)
    assert p.free_cells() == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]
