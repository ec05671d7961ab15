"""Pure-Python backtracking kernel.

Reference twin of ``_ckernel.pyx``; both must visit identical search trees
and report identical node counts.

Variables are vertex indices 0..n-1 assigned in increasing order.  Values
are codomain indices tried in increasing order.  ``later[d]`` lists the
neighbors j > d of variable d; ``closed[c]`` is the closed-neighborhood
bitmask of value c.  Assigning d := c intersects the domain of every j in
``later[d]`` with ``closed[c]`` (forward checking); a wipeout backtracks.

Status codes: 0 = search space exhausted, 1 = stopped early (solution in
first mode, or callback asked to halt), 2 = node budget exceeded.
"""

EXHAUSTED = 0
STOPPED = 1
BUDGET = 2


def run(n, later, closed, domains, max_nodes, first, callback=None):
    """Depth-first search over all assignments consistent with the constraints.

    Returns ``(status, nodes, solutions, assignment)`` where ``assignment``
    is the first solution (first mode) or None.
    """
    if n == 0:
        return EXHAUSTED, 0, 0, None
    for d in domains:
        if d == 0:
            return EXHAUSTED, 0, 0, None
    dom = [list(domains)] + [[0] * n for _ in range(n)]
    rem = [0] * n
    assign = [0] * n
    nodes = 0
    solutions = 0
    depth = 0
    rem[0] = dom[0][0]
    while depth >= 0:
        r = rem[depth]
        if r == 0:
            depth -= 1
            continue
        low = r & -r
        rem[depth] = r ^ low
        c = low.bit_length() - 1
        nodes += 1
        if nodes > max_nodes:
            return BUDGET, nodes - 1, solutions, None
        assign[depth] = c
        cur = dom[depth]
        nxt = dom[depth + 1]
        for j in range(depth + 1, n):
            nxt[j] = cur[j]
        cm = closed[c]
        ok = True
        for j in later[depth]:
            v = nxt[j] & cm
            if v == 0:
                ok = False
                break
            nxt[j] = v
        if not ok:
            continue
        if depth + 1 == n:
            solutions += 1
            if first:
                return STOPPED, nodes, solutions, list(assign)
            if callback is not None and callback(assign):
                return STOPPED, nodes, solutions, None
            continue
        depth += 1
        rem[depth] = nxt[depth]
    return EXHAUSTED, nodes, solutions, None
