"""Pure-Python congruence closure kernel.

Same contract as the compiled extension ``groundeq._ccore``: given a node
table (heads plus flattened argument lists) and a list of equated node pairs,
return for every node the least node id in its congruence class.  The import
selection happens in :mod:`groundeq.closure`.
"""
from __future__ import annotations

from typing import List, Sequence

BACKEND = "pure-python"


def close(n: int, heads: Sequence[int], arg_offsets: Sequence[int],
          args: Sequence[int], eq_pairs: Sequence[int]) -> List[int]:
    """Close the merge of ``eq_pairs`` under congruence.

    ``arg_offsets`` has length n+1; node i's arguments are
    ``args[arg_offsets[i]:arg_offsets[i+1]]`` and always refer to smaller ids.
    ``eq_pairs`` is a flat [a0, b0, a1, b1, ...] list.
    """
    parent = list(range(n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        # Smaller id wins, so roots are canonical without a final relabel pass.
        if ra < rb:
            parent[rb] = ra
        else:
            parent[ra] = rb
        return True

    changed = False
    for k in range(0, len(eq_pairs), 2):
        changed |= union(eq_pairs[k], eq_pairs[k + 1])

    while changed:
        changed = False
        sig_table = {}
        for i in range(n):
            lo, hi = arg_offsets[i], arg_offsets[i + 1]
            if lo == hi:
                continue
            key = (heads[i],) + tuple(find(args[j]) for j in range(lo, hi))
            j = sig_table.get(key)
            if j is None:
                sig_table[key] = i
            elif union(i, j):
                changed = True

    return [find(i) for i in range(n)]
