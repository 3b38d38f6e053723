"""Exhaustive reference searches.

These are the slow, obviously-correct counterparts of the constructions
in `simple` and `openpart`. Tests and the acceptance suite compare fast
answers against them on small instances; nothing here may call the fast
paths.
"""

from __future__ import annotations

import itertools

from .ptree import StagedTree


def _pool_ancestors(st: StagedTree, x: int) -> list[int]:
    return [st.ancestor_at(x, lvl) for lvl in sorted(st.pool) if lvl < st.level[x]]


def exhaustive_sdr(st: StagedTree, members) -> dict[int, int] | None:
    """Backtracking search for an injective choice of pool-level
    ancestors, one per member. Returns one such map or None."""
    todo = sorted(members)
    cand = {x: _pool_ancestors(st, x) for x in todo}
    todo.sort(key=lambda x: (len(cand[x]), x))
    used: set[int] = set()
    chosen: dict[int, int] = {}

    def rec(k: int) -> bool:
        if k == len(todo):
            return True
        x = todo[k]
        for a in cand[x]:
            if a not in used:
                used.add(a)
                chosen[x] = a
                if rec(k + 1):
                    return True
                used.remove(a)
                del chosen[x]
        return False

    return dict(sorted(chosen.items())) if rec(0) else None


def exhaustive_segment_assignment(st: StagedTree, members) -> dict[int, int] | None:
    """Try every assignment of pool levels to members; return the first
    whose closed branch segments are pairwise disjoint, else None."""
    todo = sorted(members)
    levels = sorted(st.pool)
    if not todo:
        return {}
    if not levels:
        return None
    for choice in itertools.product(levels, repeat=len(todo)):
        segs = [set(st.branch_segment(x, lvl)) for x, lvl in zip(todo, choice)]
        ok = True
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                if segs[i] & segs[j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return dict(zip(todo, choice))
    return None


def exhaustive_chain_partitions(st: StagedTree):
    """Yield every partition of the nodes into branch segments.

    A segment partition is exactly a choice, per node with children, of
    at most one child glued upward; everything else starts its own cell.
    """
    internal = [i for i in st.nodes() if st.children(i)]
    option_sets = [(None,) + st.children(i) for i in internal]
    for choice in itertools.product(*option_sets):
        glue = {c: p for p, c in zip(internal, choice) if c is not None}
        cells: dict[int, list[int]] = {}
        root_of: dict[int, int] = {}
        for i in sorted(st.nodes(), key=lambda n: (st.level[n], n)):
            anchor = root_of[glue[i]] if i in glue else i
            root_of[i] = anchor
            cells.setdefault(anchor, []).append(i)
        yield tuple(frozenset(c) for _, c in sorted(cells.items()))
