import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mazedash import Puzzle, parse_puzzle  # noqa: E402

ACCEPTANCE_LINES = []


def puzzle_from(rows, cols, obstacles, start):
    return Puzzle(rows, cols, frozenset(obstacles), tuple(start))


@pytest.fixture
def grid3():
    return parse_puzzle("S..\n...\n...\n")


@pytest.fixture
def corridor():
    return parse_puzzle("S..\n")


@pytest.fixture
def mid_corridor():
    return parse_puzzle(".S.\n")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
