from .._jit import njit

RUNNING = 0
SAT = 1
UNSAT = 2

# regs layout
TRAIL_LEN, QHEAD, LEVEL, PTR, DECISIONS, PROPAGATIONS = range(6)


@njit
def lit_code(lit):
    if lit > 0:
        return 2 * lit
    return -2 * lit + 1


@njit
def lit_value(assign, lit):
    a = assign[lit if lit > 0 else -lit]
    return a if lit > 0 else -a


@njit
def build_watches(cstart, lits, head, wnext):
    """Watch the first two literals of every clause with two or more."""
    for i in range(head.shape[0]):
        head[i] = -1
    m = cstart.shape[0] - 1
    for c in range(m):
        if cstart[c + 1] - cstart[c] < 2:
            wnext[2 * c] = -1
            wnext[2 * c + 1] = -1
            continue
        for s in range(2):
            w = 2 * c + s
            code = lit_code(lits[cstart[c] + s])
            wnext[w] = head[code]
            head[code] = w


@njit
def _enqueue(assign, trail, regs, lit):
    assign[lit if lit > 0 else -lit] = 1 if lit > 0 else -1
    trail[regs[TRAIL_LEN]] = lit
    regs[TRAIL_LEN] += 1


@njit
def _propagate(cstart, lits, assign, trail, head, wnext, regs):
    """Two-watched-literal unit propagation. Returns True on conflict."""
    while regs[QHEAD] < regs[TRAIL_LEN]:
        p = trail[regs[QHEAD]]
        regs[QHEAD] += 1
        regs[PROPAGATIONS] += 1
        fl = -p
        fc = lit_code(fl)
        prev = -1
        w = head[fc]
        while w != -1:
            nxt = wnext[w]
            c = w >> 1
            s = w & 1
            st = cstart[c]
            en = cstart[c + 1]
            other = lits[st + 1 - s]
            if lit_value(assign, other) == 1:
                prev = w
                w = nxt
                continue
            moved = False
            for k in range(st + 2, en):
                lk = lits[k]
                if lit_value(assign, lk) != -1:
                    lits[k] = fl
                    lits[st + s] = lk
                    if prev == -1:
                        head[fc] = nxt
                    else:
                        wnext[prev] = nxt
                    nc = lit_code(lk)
                    wnext[w] = head[nc]
                    head[nc] = w
                    moved = True
                    break
            if moved:
                w = nxt
                continue
            prev = w
            v = lit_value(assign, other)
            if v == 0:
                _enqueue(assign, trail, regs, other)
            else:
                return True
            w = nxt
    return False


@njit
def dpll_run(nvars, cstart, lits, assign, trail, head, wnext,
             lvl_start, lvl_lit, lvl_flip, regs, budget):
    """Chronological DPLL: branch on the lowest unassigned variable, true
    first. Stops at the top of the loop when ``budget`` decisions have been
    made so the call can be resumed."""
    while True:
        if _propagate(cstart, lits, assign, trail, head, wnext, regs):
            while True:
                level = regs[LEVEL]
                if level == 0:
                    return UNSAT
                start = lvl_start[level]
                for i in range(regs[TRAIL_LEN] - 1, start - 1, -1):
                    lit = trail[i]
                    v = lit if lit > 0 else -lit
                    assign[v] = 0
                    if v < regs[PTR]:
                        regs[PTR] = v
                regs[TRAIL_LEN] = start
                regs[QHEAD] = start
                if lvl_flip[level] == 0:
                    lvl_flip[level] = 1
                    lvl_lit[level] = -lvl_lit[level]
                    _enqueue(assign, trail, regs, lvl_lit[level])
                    break
                regs[LEVEL] = level - 1
            continue
        v = regs[PTR]
        while v <= nvars and assign[v] != 0:
            v += 1
        regs[PTR] = v
        if v > nvars:
            return SAT
        if budget <= 0:
            return RUNNING
        budget -= 1
        regs[DECISIONS] += 1
        level = regs[LEVEL] + 1
        regs[LEVEL] = level
        lvl_start[level] = regs[TRAIL_LEN]
        lvl_lit[level] = v
        lvl_flip[level] = 0
        _enqueue(assign, trail, regs, v)
