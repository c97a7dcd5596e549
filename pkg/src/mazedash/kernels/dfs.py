from .._jit import njit
from .slide import apply_slide, slide_length, undo_slide

BUDGET = 0
FOUND = 1
EXHAUSTED = 2

# regs layout
POS, DEPTH, VISITED, NODES = 0, 1, 2, 3


@njit
def dfs_run(cells, rows, cols, free_count, dirs, lens, nexts, regs, budget):
    """Resumable depth-first search over slide moves.

    Level ``k`` of the explicit stack holds the move taken there (``dirs``,
    ``lens``) and the next direction still to try (``nexts``). Runs until a
    full cover is found, the tree is exhausted, or ``budget`` moves have been
    applied; all state lives in the arrays so a later call picks up where
    this one stopped.
    """
    pos = regs[POS]
    depth = regs[DEPTH]
    visited = regs[VISITED]
    nodes = regs[NODES]
    status = BUDGET
    while True:
        if visited == free_count:
            status = FOUND
            break
        d = nexts[depth]
        n = 0
        while d < 4:
            n = slide_length(cells, rows, cols, pos, d)
            if n > 0:
                break
            d += 1
        if d < 4:
            if budget <= 0:
                break
            budget -= 1
            nexts[depth] = d + 1
            pos = apply_slide(cells, cols, pos, d, n)
            visited += n
            dirs[depth] = d
            lens[depth] = n
            depth += 1
            nexts[depth] = 0
            nodes += 1
        else:
            if depth == 0:
                status = EXHAUSTED
                break
            depth -= 1
            pos = undo_slide(cells, cols, pos, dirs[depth], lens[depth])
            visited -= lens[depth]
    regs[POS] = pos
    regs[DEPTH] = depth
    regs[VISITED] = visited
    regs[NODES] = nodes
    return status
