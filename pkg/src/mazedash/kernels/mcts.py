import math

import numpy as np

from .._jit import njit
from .slide import apply_slide, slide_length, undo_slide

RUNNING = 0
SOLVED = 1
ROOT_BLOCKED = 2

NO_MOVE = -1

# per-node field dtypes; a node is one slot in each array and nothing else
NODE_FIELDS = (
    ("move", np.int8),
    ("parent", np.int32),
    ("first_child", np.int32),
    ("n_children", np.int8),
    ("visits", np.int64),
    ("best", np.float64),
    ("blocked", np.uint8),
    ("expanded", np.uint8),
)
NODE_BYTES = sum(np.dtype(t).itemsize for _, t in NODE_FIELDS)

# regs layout
R_POS, R_VISITED, R_NODES, R_ROLLOUT_STEPS, R_ITERS, R_SOL_LEN, R_DEPTH = range(7)


@njit
def pick_child(node, first, nchild, visits, best, blocked, expanded, c):
    """Tree-policy child of ``node``: first unexpanded child in direction
    order, otherwise the highest UCT score; blocked children are skipped.
    Returns -1 when every child is blocked."""
    f = first[node]
    k = nchild[node]
    for i in range(f, f + k):
        if blocked[i] == 0 and expanded[i] == 0:
            return i
    log_n = math.log(visits[node] + 1.0)
    chosen = -1
    top = -1.0
    for i in range(f, f + k):
        if blocked[i] != 0:
            continue
        score = best[i] + c * math.sqrt(log_n / (visits[i] + 1.0))
        if chosen == -1 or score > top:
            chosen = i
            top = score
    return chosen


@njit
def select_leaf(cells, rows, cols, regs, path_node, path_dir, path_len,
                move, first, nchild, visits, best, blocked, expanded, c):
    """Descend from the root to an unexpanded node, applying each move to
    the scratch cells. Returns the leaf; depth is left in ``regs``."""
    pos = regs[R_POS]
    vis = regs[R_VISITED]
    node = 0
    depth = 0
    path_node[0] = 0
    while expanded[node] != 0:
        child = pick_child(node, first, nchild, visits, best, blocked, expanded, c)
        if child < 0:
            break
        d = move[child]
        n = slide_length(cells, rows, cols, pos, d)
        pos = apply_slide(cells, cols, pos, d, n)
        vis += n
        path_dir[depth] = d
        path_len[depth] = n
        depth += 1
        path_node[depth] = child
        node = child
    regs[R_POS] = pos
    regs[R_VISITED] = vis
    regs[R_DEPTH] = depth
    return node


@njit
def expand_node(cells, rows, cols, free_count, regs, node,
                move, parent, first, nchild, visits, best, blocked, expanded):
    """Create one child per legal move. Children that reach a deadlock are
    created blocked; a child that completes the cover is returned as the
    winning direction (otherwise -1)."""
    pos = regs[R_POS]
    vis = regs[R_VISITED]
    n_nodes = regs[R_NODES]
    first[node] = n_nodes
    k = 0
    win = -1
    for d in range(4):
        n = slide_length(cells, rows, cols, pos, d)
        if n == 0:
            continue
        i = n_nodes + k
        move[i] = d
        parent[i] = node
        first[i] = -1
        nchild[i] = 0
        visits[i] = 0
        best[i] = 0.0
        blocked[i] = 0
        expanded[i] = 0
        k += 1
        p2 = apply_slide(cells, cols, pos, d, n)
        if vis + n == free_count:
            best[i] = 1.0
            if win < 0:
                win = d
        else:
            dead = True
            for d2 in range(4):
                if slide_length(cells, rows, cols, p2, d2) > 0:
                    dead = False
                    break
            if dead:
                blocked[i] = 1
                expanded[i] = 1
                best[i] = (vis + n) / free_count
        undo_slide(cells, cols, p2, d, n)
    nchild[node] = k
    expanded[node] = 1
    if k == 0:
        blocked[node] = 1
    regs[R_NODES] = n_nodes + k
    return win


@njit
def rollout(cells, rows, cols, free_count, pos, vis, randoms, roll_dir, roll_len):
    """Uniformly random playout to a terminal state, undone before returning.
    Returns (number of moves, visited count at the end)."""
    m = 0
    legal = np.empty(4, dtype=np.int64)
    lens = np.empty(4, dtype=np.int64)
    while vis < free_count:
        k = 0
        for d in range(4):
            n = slide_length(cells, rows, cols, pos, d)
            if n > 0:
                legal[k] = d
                lens[k] = n
                k += 1
        if k == 0:
            break
        j = int(randoms[m] * k)
        if j >= k:
            j = k - 1
        d = legal[j]
        n = lens[j]
        pos = apply_slide(cells, cols, pos, d, n)
        vis += n
        roll_dir[m] = d
        roll_len[m] = n
        m += 1
    end = vis
    for i in range(m - 1, -1, -1):
        pos = undo_slide(cells, cols, pos, roll_dir[i], roll_len[i])
    return m, end


@njit
def backup(cells, cols, regs, reward, path_node, path_dir, path_len,
           first, nchild, visits, best, blocked, expanded):
    """Max-backup along the current path, eager blocked propagation, and
    undo of the descent so the scratch returns to the root state."""
    depth = regs[R_DEPTH]
    pos = regs[R_POS]
    vis = regs[R_VISITED]
    for k in range(depth, -1, -1):
        node = path_node[k]
        visits[node] += 1
        if reward > best[node]:
            best[node] = reward
        if expanded[node] != 0 and blocked[node] == 0:
            f = first[node]
            all_blocked = True
            for i in range(f, f + nchild[node]):
                if blocked[i] == 0:
                    all_blocked = False
                    break
            if all_blocked:
                blocked[node] = 1
        if k > 0:
            pos = undo_slide(cells, cols, pos, path_dir[k - 1], path_len[k - 1])
            vis -= path_len[k - 1]
    regs[R_POS] = pos
    regs[R_VISITED] = vis
    regs[R_DEPTH] = 0


@njit
def mcts_run(cells, rows, cols, free_count, c, regs, randoms, n_iters,
             path_node, path_dir, path_len, roll_dir, roll_len, solution,
             move, parent, first, nchild, visits, best, blocked, expanded):
    """Run up to ``n_iters`` select/expand/simulate/backup iterations.

    Iteration ``i`` draws its rollout choices from ``randoms[i]``.
    """
    for it in range(n_iters):
        if blocked[0] != 0:
            return ROOT_BLOCKED
        leaf = select_leaf(cells, rows, cols, regs, path_node, path_dir, path_len,
                           move, first, nchild, visits, best, blocked, expanded, c)
        regs[R_ITERS] += 1
        depth = regs[R_DEPTH]
        win = expand_node(cells, rows, cols, free_count, regs, leaf,
                          move, parent, first, nchild, visits, best, blocked, expanded)
        if win >= 0:
            for k in range(depth):
                solution[k] = path_dir[k]
            solution[depth] = win
            regs[R_SOL_LEN] = depth + 1
            backup(cells, cols, regs, 1.0, path_node, path_dir, path_len,
                   first, nchild, visits, best, blocked, expanded)
            return SOLVED
        vis0 = regs[R_VISITED]
        m, end = rollout(cells, rows, cols, free_count, regs[R_POS], vis0,
                         randoms[it], roll_dir, roll_len)
        regs[R_ROLLOUT_STEPS] += end - vis0
        reward = end / free_count
        if end == free_count:
            for k in range(depth):
                solution[k] = path_dir[k]
            for k in range(m):
                solution[depth + k] = roll_dir[k]
            regs[R_SOL_LEN] = depth + m
            backup(cells, cols, regs, reward, path_node, path_dir, path_len,
                   first, nchild, visits, best, blocked, expanded)
            return SOLVED
        backup(cells, cols, regs, reward, path_node, path_dir, path_len,
               first, nchild, visits, best, blocked, expanded)
    if blocked[0] != 0:
        return ROOT_BLOCKED
    return RUNNING
