# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backtracking kernel (at most 64 vertices).

Mirrors ``_kernel_py.run`` node for node; see that module for the contract.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    MAXN = 64


cdef inline int _ctz(uint64_t x) nogil:
    return __builtin_ctzll(x)


def run(int n, later, closed, domains, long long max_nodes, bint first, callback=None):
    cdef uint64_t cl[MAXN]
    cdef uint64_t *dom
    cdef uint64_t rem[MAXN]
    cdef int assign[MAXN]
    cdef int *lat
    cdef int latoff[MAXN + 1]
    cdef int i, j, k, depth, c, total
    cdef uint64_t r, low, v, cm
    cdef long long nodes = 0, solutions = 0
    cdef bint ok

    if n == 0:
        return 0, 0, 0, None
    if n > MAXN:
        raise ValueError("compiled kernel handles at most 64 vertices")
    for i in range(n):
        if domains[i] == 0:
            return 0, 0, 0, None

    total = 0
    for i in range(n):
        total += len(later[i])
    dom = <uint64_t *> malloc((n + 1) * n * sizeof(uint64_t))
    lat = <int *> malloc((total + 1) * sizeof(int))
    if dom == NULL or lat == NULL:
        free(dom)
        free(lat)
        raise MemoryError()
    try:
        k = 0
        for i in range(n):
            cl[i] = <uint64_t> closed[i]
            dom[i] = <uint64_t> domains[i]
            latoff[i] = k
            for j in later[i]:
                lat[k] = j
                k += 1
        latoff[n] = k

        depth = 0
        rem[0] = dom[0]
        while depth >= 0:
            r = rem[depth]
            if r == 0:
                depth -= 1
                continue
            low = r & (~r + 1)
            rem[depth] = r ^ low
            c = _ctz(low)
            nodes += 1
            if nodes > max_nodes:
                return 2, nodes - 1, solutions, None
            assign[depth] = c
            for j in range(depth + 1, n):
                dom[(depth + 1) * n + j] = dom[depth * n + j]
            cm = cl[c]
            ok = True
            for k in range(latoff[depth], latoff[depth + 1]):
                j = lat[k]
                v = dom[(depth + 1) * n + j] & cm
                if v == 0:
                    ok = False
                    break
                dom[(depth + 1) * n + j] = v
            if not ok:
                continue
            if depth + 1 == n:
                solutions += 1
                if first:
                    return 1, nodes, solutions, [assign[i] for i in range(n)]
                if callback is not None:
                    if callback([assign[i] for i in range(n)]):
                        return 1, nodes, solutions, None
                continue
            depth += 1
            rem[depth] = dom[depth * n + depth]
        return 0, nodes, solutions, None
    finally:
        free(dom)
        free(lat)
