import numpy as np

from .._jit import njit

FREE = 0
VISITED = 1
OBSTACLE = 2

DR = np.array([-1, 0, 1, 0], dtype=np.int64)
DC = np.array([0, 1, 0, -1], dtype=np.int64)


@njit
def slide_length(cells, rows, cols, pos, d):
    """Number of cells the agent at ``pos`` would traverse moving in ``d``."""
    dr = DR[d]
    dc = DC[d]
    r = pos // cols + dr
    c = pos % cols + dc
    n = 0
    while 0 <= r < rows and 0 <= c < cols and cells[r * cols + c] == FREE:
        n += 1
        r += dr
        c += dc
    return n


@njit
def apply_slide(cells, cols, pos, d, n):
    step = DR[d] * cols + DC[d]
    for _ in range(n):
        pos += step
        cells[pos] = VISITED
    return pos


@njit
def undo_slide(cells, cols, pos, d, n):
    step = DR[d] * cols + DC[d]
    for _ in range(n):
        cells[pos] = FREE
        pos -= step
    return pos


@njit
def count_moves(cells, rows, cols, pos):
    k = 0
    for d in range(4):
        if slide_length(cells, rows, cols, pos, d) > 0:
            k += 1
    return k
