# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled congruence closure kernel.

Drop-in accelerated twin of groundeq._ccore_py.close; the pure-Python module
documents the contract.  Union-find with path compression where the least id
is the class root, and repeated congruence sweeps until a fixpoint.
"""
from libc.stdlib cimport free, malloc

BACKEND = "compiled"


cdef int _find(int* parent, int x) nogil:
    cdef int root = x
    cdef int nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef bint _union(int* parent, int a, int b) nogil:
    cdef int ra = _find(parent, a)
    cdef int rb = _find(parent, b)
    if ra == rb:
        return 0
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb
    return 1


def close(int n, heads, arg_offsets, args, eq_pairs):
    """See groundeq._ccore_py.close for the contract."""
    cdef int m = len(args)
    cdef int npairs = len(eq_pairs)
    cdef int* c_parent = <int*> malloc(n * sizeof(int))
    cdef int* c_heads = <int*> malloc((n if n else 1) * sizeof(int))
    cdef int* c_off = <int*> malloc((n + 1) * sizeof(int))
    cdef int* c_args = <int*> malloc((m if m else 1) * sizeof(int))
    if not c_parent or not c_heads or not c_off or not c_args:
        free(c_parent); free(c_heads); free(c_off); free(c_args)
        raise MemoryError()
    cdef int i, j, k, lo, hi, la, lb, changed
    try:
        for i in range(n):
            c_parent[i] = i
            c_heads[i] = heads[i]
        for i in range(n + 1):
            c_off[i] = arg_offsets[i]
        for i in range(m):
            c_args[i] = args[i]

        changed = 0
        for k in range(0, npairs, 2):
            if _union(c_parent, eq_pairs[k], eq_pairs[k + 1]):
                changed = 1

        # Quadratic congruence sweep: cheap in C for the desk-scale node
        # counts this kernel sees (tens to a few hundred nodes).
        while changed:
            changed = 0
            for i in range(n):
                lo = c_off[i]
                hi = c_off[i + 1]
                if lo == hi:
                    continue
                for j in range(i + 1, n):
                    if c_heads[j] != c_heads[i]:
                        continue
                    if c_off[j + 1] - c_off[j] != hi - lo:
                        continue
                    if _find(c_parent, i) == _find(c_parent, j):
                        continue
                    la = lo
                    lb = c_off[j]
                    while la < hi:
                        if _find(c_parent, c_args[la]) != _find(c_parent, c_args[lb]):
                            break
                        la += 1
                        lb += 1
                    if la == hi:
                        _union(c_parent, i, j)
                        changed = 1

        return [_find(c_parent, i) for i in range(n)]
    finally:
        free(c_parent)
        free(c_heads)
        free(c_off)
        free(c_args)
