"""Partition trees over order spaces, and their staged truncations.

A partition tree covers a space with nested closed intervals: the root
is the whole space, every expanded node splits into a left and right
child sharing one boundary point, and two-point intervals never split.
Trees are materialized breadth-first under a node budget, so deep or
limit levels simply never appear; verifiers treat an unexpanded wide
node as a frontier, not an error.

A StagedTree is the finite stage of a tree up to a chosen top level m,
with a designated pool of levels strictly below m that regressive maps
may land in.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import ordinal as ord_
from . import space as sp
from .errors import DomainError, InsufficientMaterialization, RangeError
from .ordinal import Ordinal
from .space import ClosedInterval

NODE_CAP = 200_000


@dataclass(frozen=True)
class TreeNode:
    id: int
    interval: ClosedInterval
    level: Ordinal
    parent: int | None
    children: tuple[int, ...] = ()


@dataclass(frozen=True)
class PartitionTree:
    space: sp.SpaceDescriptor
    nodes: dict[int, TreeNode]
    root_id: int
    budget: int | None = None


def build_tree(space, budget: int, split=None) -> PartitionTree:
    """Materialize a tree breadth-first until the budget is spent.

    A node splits only while at least two budget slots remain, so
    children always arrive in pairs. `split` may replace the canonical
    splitting rule; it gets (space, interval) and must return a point
    strictly between the endpoints.
    """
    if not isinstance(budget, int) or isinstance(budget, bool) or budget < 1:
        raise DomainError(f"budget must be a positive int, got {budget!r}")
    if budget > NODE_CAP:
        raise RangeError(f"budget {budget} exceeds the node cap {NODE_CAP}")
    if sp.space_size(space) == 1:
        raise DomainError("cannot build a tree over a one-point space")
    split = split or sp.canonical_split

    intervals = {0: sp.whole_interval(space)}
    levels = {0: ord_.ZERO}
    parents: dict[int, int | None] = {0: None}
    children: dict[int, list[int]] = {0: []}
    queue = deque([0])
    next_id = 1
    while queue and next_id + 2 <= budget:
        nid = queue.popleft()
        iv = intervals[nid]
        cnt = sp.point_count(space, iv)
        if cnt is not sp.INFINITE and cnt <= 2:
            continue
        w = split(space, iv)
        if (
            sp.compare_points(space, iv.lo, w) != "less"
            or sp.compare_points(space, w, iv.hi) != "less"
        ):
            raise DomainError(f"split callback returned {sp.render_point(space, w)}, not strictly inside")
        lvl = ord_.add(levels[nid], ord_.ONE)
        for sub in (ClosedInterval(iv.lo, w), ClosedInterval(w, iv.hi)):
            intervals[next_id] = sub
            levels[next_id] = lvl
            parents[next_id] = nid
            children[next_id] = []
            children[nid].append(next_id)
            queue.append(next_id)
            next_id += 1

    nodes = {
        i: TreeNode(i, intervals[i], levels[i], parents[i], tuple(children[i]))
        for i in range(next_id)
    }
    return PartitionTree(space, nodes, 0, budget)


def make_tree(space, rows, budget=None) -> PartitionTree:
    """Assemble a tree from explicit rows (id, lo, hi, level, parent).

    For hand-built fixtures, including deliberately broken ones; no
    admissibility checking happens here beyond linking children.
    """
    children: dict[int, list[int]] = {r[0]: [] for r in rows}
    roots = [r[0] for r in rows if r[4] is None]
    for r in rows:
        if r[4] is not None:
            if r[4] not in children:
                raise DomainError(f"row {r[0]} names missing parent {r[4]}")
            children[r[4]].append(r[0])
    nodes = {
        r[0]: TreeNode(r[0], ClosedInterval(r[1], r[2]), r[3], r[4], tuple(sorted(children[r[0]])))
        for r in rows
    }
    if len(roots) != 1:
        # verifier fixtures may be rootless on purpose; pick a stable anchor
        root_id = min(nodes) if nodes else 0
    else:
        root_id = roots[0]
    return PartitionTree(space, nodes, root_id, budget)


@dataclass(frozen=True)
class Violation:
    clause: str
    nodes: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple[Violation, ...]
    counts: dict[str, int] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


_PAIR_REPORT_CAP = 100


def verify_admissible(tree: PartitionTree) -> Verdict:
    """Check every structural clause over all node pairs.

    Clauses: linkage, root, nontrivial, two-point-leaf, binary-split,
    level-step, limit-intersection, reverse-inclusion, level-overlap,
    comparability. Pairwise work runs on dense endpoint ranks in numpy.
    """
    violations: list[Violation] = []
    counts: dict[str, int] = {}

    def report(clause, nodes, detail, weight=1):
        counts[clause] = counts.get(clause, 0) + weight
        if counts[clause] <= _PAIR_REPORT_CAP:
            violations.append(Violation(clause, tuple(nodes), detail))

    K = tree.space
    nodes = tree.nodes
    ids = sorted(nodes)
    if not ids:
        report("root", (), "empty tree")
        return Verdict(False, tuple(violations), counts)

    # linkage first; later passes assume a coherent parent structure
    broken = False
    for i in ids:
        n = nodes[i]
        if n.parent is not None and n.parent not in nodes:
            report("linkage", (i,), f"parent {n.parent} missing")
            broken = True
        for c in n.children:
            if c not in nodes or nodes[c].parent != i:
                report("linkage", (i, c), "child link not mirrored")
                broken = True
        if n.parent is not None and i not in nodes[n.parent].children:
            report("linkage", (i,), "not listed among parent's children")
            broken = True
    roots = [i for i in ids if nodes[i].parent is None]
    if len(roots) != 1:
        report("root", tuple(roots), f"expected exactly one root, found {len(roots)}")
        broken = True
    if broken:
        return Verdict(False, tuple(violations), counts)

    root = roots[0]
    if nodes[root].level != ord_.ZERO:
        report("root", (root,), f"root level is {nodes[root].level}, not 0")
    whole = sp.whole_interval(K)
    riv = nodes[root].interval
    if sp.point_key(K, riv.lo) != sp.point_key(K, whole.lo) or sp.point_key(K, riv.hi) != sp.point_key(K, whole.hi):
        report("root", (root,), "root interval is not the whole space")
    for i in ids:
        if i != root and nodes[i].level == ord_.ZERO:
            report("root", (i,), "non-root node at level 0")

    # reachability (cycles would hide below a fake root)
    order: list[int] = []
    tin: dict[int, int] = {}
    tout: dict[int, int] = {}
    clock = 0
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        i, done = stack.pop()
        if done:
            tout[i] = clock
            clock += 1
            continue
        tin[i] = clock
        clock += 1
        order.append(i)
        stack.append((i, True))
        for c in sorted(nodes[i].children, reverse=True):
            stack.append((c, False))
    unreachable = [i for i in ids if i not in tin]
    if unreachable:
        report("linkage", tuple(unreachable[:8]), f"{len(unreachable)} nodes unreachable from root")
        return Verdict(False, tuple(violations), counts)

    counts_pts = {}
    for i in ids:
        n = nodes[i]
        try:
            cnt = sp.point_count(K, n.interval)
        except DomainError:
            report("nontrivial", (i,), "interval endpoints out of order")
            cnt = 0
        counts_pts[i] = cnt
        if cnt is not sp.INFINITE and cnt < 2:
            report("nontrivial", (i,), f"interval has {cnt} points")
        if cnt == 2 and n.children:
            report("two-point-leaf", (i,), "two-point interval has children")
        if len(n.children) == 1:
            report("binary-split", (i,), "exactly one child")
        if len(n.children) > 2:
            report("binary-split", (i,), f"{len(n.children)} children")
        if len(n.children) == 2:
            a, b = (nodes[c] for c in n.children)
            if sp.point_key(K, a.interval.lo) > sp.point_key(K, b.interval.lo):
                a, b = b, a
            shape_ok = (
                sp.point_key(K, a.interval.lo) == sp.point_key(K, n.interval.lo)
                and sp.point_key(K, a.interval.hi) == sp.point_key(K, b.interval.lo)
                and sp.point_key(K, b.interval.hi) == sp.point_key(K, n.interval.hi)
                and sp.compare_points(K, a.interval.lo, a.interval.hi) == "less"
                and sp.compare_points(K, b.interval.lo, b.interval.hi) == "less"
            )
            if not shape_ok:
                report("binary-split", (i, a.id, b.id), "children do not split at a single interior point")
        if n.parent is not None:
            plvl = nodes[n.parent].level
            if n.level.kind == "limit":
                if not n.level > plvl:
                    report("level-step", (i,), f"limit level {n.level} not above parent level {plvl}")
            elif n.level != ord_.add(plvl, ord_.ONE):
                report("level-step", (i,), f"level {n.level} is not parent level {plvl} + 1")
        if n.level.kind == "limit":
            lo_best, hi_best = None, None
            a = n.parent
            while a is not None:
                aiv = nodes[a].interval
                if lo_best is None or sp.point_key(K, aiv.lo) > sp.point_key(K, lo_best):
                    lo_best = aiv.lo
                if hi_best is None or sp.point_key(K, aiv.hi) < sp.point_key(K, hi_best):
                    hi_best = aiv.hi
                a = nodes[a].parent
            if lo_best is not None and (
                sp.point_key(K, lo_best) != sp.point_key(K, n.interval.lo)
                or sp.point_key(K, hi_best) != sp.point_key(K, n.interval.hi)
            ):
                report(
                    "limit-intersection",
                    (i,),
                    "limit-level interval differs from the intersection of its ancestors",
                )

    # pairwise clauses on dense endpoint ranks
    keys = sorted({sp.point_key(K, nodes[i].interval.lo) for i in ids} | {sp.point_key(K, nodes[i].interval.hi) for i in ids})
    rank = {k: r for r, k in enumerate(keys)}
    pos = {i: p for p, i in enumerate(ids)}
    lo = np.array([rank[sp.point_key(K, nodes[i].interval.lo)] for i in ids], dtype=np.int64)
    hi = np.array([rank[sp.point_key(K, nodes[i].interval.hi)] for i in ids], dtype=np.int64)
    tin_a = np.array([tin[i] for i in ids], dtype=np.int64)
    tout_a = np.array([tout[i] for i in ids], dtype=np.int64)
    lvl_keys = sorted({nodes[i].level for i in ids})
    lvl_rank = {l: r for r, l in enumerate(lvl_keys)}
    lvl = np.array([lvl_rank[nodes[i].level] for i in ids], dtype=np.int64)

    anc = (tin_a[:, None] <= tin_a[None, :]) & (tout_a[None, :] <= tout_a[:, None])
    cont = (lo[:, None] <= lo[None, :]) & (hi[None, :] <= hi[:, None])
    overlap = np.maximum(lo[:, None], lo[None, :]) < np.minimum(hi[:, None], hi[None, :])
    eye = np.eye(len(ids), dtype=bool)

    def emit_pairs(clause, mask, describe):
        idx = np.argwhere(mask)
        if idx.size == 0:
            return
        counts[clause] = counts.get(clause, 0) + len(idx)
        for r, c in idx[:_PAIR_REPORT_CAP]:
            violations.append(Violation(clause, (ids[int(r)], ids[int(c)]), describe))

    mismatch = anc != cont
    emit_pairs(
        "reverse-inclusion",
        np.triu(mismatch | mismatch.T, 1),
        "tree order and reverse interval inclusion disagree",
    )
    same_lvl = lvl[:, None] == lvl[None, :]
    emit_pairs(
        "level-overlap",
        np.triu(same_lvl & overlap & ~eye, 1),
        "distinct same-level intervals share more than a point",
    )
    emit_pairs(
        "comparability",
        np.triu(overlap & ~(anc | anc.T), 1),
        "overlapping intervals on incomparable nodes",
    )

    return Verdict(not violations and not counts, tuple(violations), counts)


def endpoints(tree: PartitionTree) -> list:
    """All interval endpoints, sorted in the space order."""
    K = tree.space
    seen = {}
    for n in tree.nodes.values():
        for p in (n.interval.lo, n.interval.hi):
            seen[sp.point_key(K, p)] = p
    return [seen[k] for k in sorted(seen)]


def find_separating_pair(tree: PartitionTree, u, v):
    """Two endpoints x < y with u <= x < y <= v.

    Descends to the deepest node containing both points; a two-point
    node answers outright, otherwise its split point is the left mark
    and one more descent from the mark finds the right one.
    """
    K = tree.space
    if sp.compare_points(K, u, v) != "less":
        raise DomainError("need u < v")
    mark = None
    cur = u
    while True:
        node = tree.nodes[tree.root_id]
        if not sp.interval_contains_point(K, node.interval, cur) or not sp.interval_contains_point(
            K, node.interval, v
        ):
            raise DomainError("points outside the tree's root interval")
        while node.children:
            nxt = None
            for c in node.children:
                civ = tree.nodes[c].interval
                if sp.interval_contains_point(K, civ, cur) and sp.interval_contains_point(K, civ, v):
                    nxt = tree.nodes[c]
                    break
            if nxt is None:
                break
            node = nxt
        cnt = sp.point_count(K, node.interval)
        if cnt == 2:
            return (node.interval.lo, node.interval.hi)
        if not node.children:
            raise InsufficientMaterialization(
                f"node {node.id} spans the query but is an unexpanded frontier"
            )
        a, b = (tree.nodes[c].interval for c in node.children)
        w = a.hi if sp.point_key(K, a.lo) < sp.point_key(K, b.lo) else b.hi
        if mark is not None:
            return (mark, w)
        mark = w
        cur = w


@dataclass(frozen=True)
class ChainReport:
    ok: bool
    e_size: int
    f_size: int
    g_size: int
    mins_nondecreasing: bool
    maxes_nonincreasing: bool
    union_covers: bool
    f_ids: tuple[int, ...]
    g_ids: tuple[int, ...]


def chain_order_types(tree: PartitionTree, node_ids) -> ChainReport:
    """Split a chain of nodes by which endpoint moves.

    E is the whole chain root-down; F collects members whose minimum
    strictly rose, G those whose maximum strictly fell (both keep the
    first member). In an admissible tree E = F union G.
    """
    K = tree.space
    ids = list(dict.fromkeys(node_ids))
    if not ids:
        raise DomainError("empty chain")
    for i in ids:
        if i not in tree.nodes:
            raise DomainError(f"unknown node {i}")
    ids.sort(key=lambda i: (tree.nodes[i].level, i))
    for above, below in zip(ids, ids[1:]):
        a = tree.nodes[below].parent
        while a is not None and a != above:
            a = tree.nodes[a].parent
        if a != above:
            raise DomainError(f"nodes {above} and {below} are not comparable")

    seq = [tree.nodes[i] for i in ids]
    mins_ok = all(
        sp.compare_points(K, a.interval.lo, b.interval.lo) != "greater"
        for a, b in zip(seq, seq[1:])
    )
    maxes_ok = all(
        sp.compare_points(K, a.interval.hi, b.interval.hi) != "less"
        for a, b in zip(seq, seq[1:])
    )
    f_ids = [seq[0].id]
    g_ids = [seq[0].id]
    for a, b in zip(seq, seq[1:]):
        if sp.compare_points(K, b.interval.lo, a.interval.lo) == "greater":
            f_ids.append(b.id)
        if sp.compare_points(K, b.interval.hi, a.interval.hi) == "less":
            g_ids.append(b.id)
    union_covers = set(f_ids) | set(g_ids) == set(ids)
    ok = mins_ok and maxes_ok and union_covers
    return ChainReport(
        ok, len(ids), len(f_ids), len(g_ids), mins_ok, maxes_ok, union_covers,
        tuple(f_ids), tuple(g_ids),
    )


# -- staged trees -------------------------------------------------------------


@dataclass
class StagedTree:
    """Finite stage of a tree: levels 0..top_level, a pool of landing
    levels strictly below the top, and optional interval payloads.

    limit_top records whether the top level stands in for a limit stage
    of the idealized construction; a single-node stage never does.
    Instances are treated as immutable after construction.
    """

    parent: dict[int, int | None]
    level: dict[int, int]
    top_level: int
    pool: frozenset[int]
    payload: dict[int, ClosedInterval] | None = None
    space: sp.SpaceDescriptor | None = None
    limit_top: bool = True
    origin: dict[int, int] | None = None

    def __post_init__(self):
        self.pool = frozenset(self.pool)
        self._children: dict[int, tuple[int, ...]] = {i: () for i in self.parent}
        kids: dict[int, list[int]] = {i: [] for i in self.parent}
        for i, p in self.parent.items():
            if p is not None and p in kids:
                kids[p].append(i)
        self._children = {i: tuple(sorted(c)) for i, c in kids.items()}

    @property
    def has_designated_limit(self) -> bool:
        return self.limit_top and self.top_level > 0

    def nodes(self) -> list[int]:
        return sorted(self.parent)

    def root(self) -> int:
        roots = [i for i, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise DomainError(f"expected one root, found {len(roots)}")
        return roots[0]

    def children(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    def tops(self) -> list[int]:
        return sorted(i for i, l in self.level.items() if l == self.top_level)

    def level_nodes(self, lvl: int) -> list[int]:
        return sorted(i for i, l in self.level.items() if l == lvl)

    def ancestor_at(self, i: int, lvl: int) -> int:
        """The unique node at level lvl on the branch through i."""
        if lvl > self.level[i]:
            raise DomainError(f"node {i} at level {self.level[i]} has no ancestor at {lvl}")
        cur = i
        while self.level[cur] > lvl:
            cur = self.parent[cur]
        return cur

    def branch_segment(self, i: int, from_level: int) -> tuple[int, ...]:
        """Nodes on i's branch from from_level up to i, bottom first."""
        seg = []
        cur = i
        while self.level[cur] > from_level:
            seg.append(cur)
            cur = self.parent[cur]
        if self.level[cur] != from_level:
            raise DomainError(f"branch of {i} skips level {from_level}")
        seg.append(cur)
        return tuple(reversed(seg))

    def meet(self, a: int, b: int) -> int:
        """Deepest common ancestor."""
        x, y = a, b
        while self.level[x] > self.level[y]:
            x = self.parent[x]
        while self.level[y] > self.level[x]:
            y = self.parent[y]
        while x != y:
            x, y = self.parent[x], self.parent[y]
        return x

    def validate(self) -> None:
        ids = set(self.parent)
        if not ids:
            raise DomainError("staged tree has no nodes")
        if set(self.level) != ids:
            raise DomainError("level table does not match node set")
        roots = [i for i in ids if self.parent[i] is None]
        if len(roots) != 1:
            raise DomainError(f"expected one root, found {len(roots)}")
        if self.level[roots[0]] != 0:
            raise DomainError("root must sit at level 0")
        if not isinstance(self.top_level, int) or self.top_level < 0:
            raise DomainError(f"bad top level {self.top_level!r}")
        for i in ids:
            l = self.level[i]
            if not isinstance(l, int) or not 0 <= l <= self.top_level:
                raise DomainError(f"node {i} level {l!r} outside 0..{self.top_level}")
            p = self.parent[i]
            if p is not None:
                if p not in ids:
                    raise DomainError(f"node {i} has missing parent {p}")
                if self.level[i] != self.level[p] + 1:
                    raise DomainError(f"edge {p}->{i} does not step one level")
        if not self.pool <= set(range(self.top_level)):
            raise DomainError(
                f"pool {sorted(self.pool)} must lie strictly below the top level {self.top_level}"
            )
        if self.top_level == 0 and self.limit_top:
            raise DomainError("a single-level stage cannot designate its top as a limit")
        if self.payload is not None:
            if self.space is None:
                raise DomainError("payload intervals need a space")
            if set(self.payload) != ids:
                raise DomainError("payload table does not match node set")
            K = self.space
            whole = sp.whole_interval(K)
            for i in ids:
                iv = self.payload[i]
                if sp.compare_points(K, iv.lo, iv.hi) == "greater":
                    raise DomainError(f"payload of {i} out of order")
                cnt = sp.point_count(K, iv)
                if cnt is not sp.INFINITE and cnt < 2:
                    raise DomainError(f"payload of {i} is trivial")
                p = self.parent[i]
                if p is None:
                    if (
                        sp.point_key(K, iv.lo) != sp.point_key(K, whole.lo)
                        or sp.point_key(K, iv.hi) != sp.point_key(K, whole.hi)
                    ):
                        raise DomainError("root payload must be the whole space")
                elif not sp.interval_contains(K, self.payload[p], iv):
                    raise DomainError(f"payload of {i} escapes its parent")
            for lvl in range(self.top_level + 1):
                row = self.level_nodes(lvl)
                for ai in range(len(row)):
                    for bi in range(ai + 1, len(row)):
                        if sp.intervals_overlap_nontrivially(
                            K, self.payload[row[ai]], self.payload[row[bi]]
                        ):
                            raise DomainError(
                                f"same-level payloads of {row[ai]} and {row[bi]} overlap nontrivially"
                            )


def to_staged(tree: PartitionTree, m: int, pool, limit_top: bool = True) -> StagedTree:
    """Cut the materialized tree at level m and renumber.

    Requires every wide node strictly below m to be expanded, so the
    stage is a faithful prefix rather than an accident of the budget.
    """
    if not isinstance(m, int) or isinstance(m, bool) or m < 0:
        raise DomainError(f"top level must be a natural number, got {m!r}")
    pool = frozenset(pool)
    for l in pool:
        if not isinstance(l, int) or isinstance(l, bool) or not 0 <= l < m:
            raise DomainError(f"pool level {l!r} must lie strictly below the top level {m}")
    K = tree.space
    by_level: list[list[int]] = []
    for lvl in range(m + 1):
        want = ord_.from_int(lvl)
        row = sorted(i for i, n in tree.nodes.items() if n.level == want)
        by_level.append(row)
        if lvl < m:
            for i in row:
                n = tree.nodes[i]
                cnt = sp.point_count(K, n.interval)
                wide = cnt is sp.INFINITE or cnt > 2
                if wide and not n.children:
                    raise InsufficientMaterialization(
                        f"node {i} at level {lvl} is unexpanded but level {m} was requested"
                    )
    if not by_level[0]:
        raise DomainError("tree has no root at level 0")

    fresh: dict[int, int] = {}
    nid = 0
    for row in by_level:
        for old in row:
            fresh[old] = nid
            nid += 1
    parent = {
        fresh[old]: (None if tree.nodes[old].parent is None else fresh[tree.nodes[old].parent])
        for old in fresh
    }
    level = {fresh[old]: tree.nodes[old].level.as_int() for old in fresh}
    payload = {fresh[old]: tree.nodes[old].interval for old in fresh}
    origin = {new: old for old, new in fresh.items()}
    st = StagedTree(
        parent=parent,
        level=level,
        top_level=m,
        pool=pool,
        payload=payload,
        space=K,
        limit_top=limit_top and m > 0,
        origin=origin,
    )
    st.validate()
    return st


# -- serialization -------------------------------------------------------------


def tree_to_json(tree: PartitionTree) -> dict:
    K = tree.space
    rows = []
    for i in sorted(tree.nodes):
        n = tree.nodes[i]
        rows.append(
            {
                "id": n.id,
                "parent": n.parent,
                "level": ord_.render(n.level),
                "interval": sp.interval_to_json(K, n.interval),
            }
        )
    doc = {"v": 1, "kind": "tree", "space": sp.space_to_json(K), "nodes": rows}
    if tree.budget is not None:
        doc["budget"] = tree.budget
    return doc


def tree_from_json(doc) -> PartitionTree:
    if not isinstance(doc, dict) or doc.get("kind") != "tree":
        raise DomainError("not a tree document")
    K = sp.space_from_json(doc["space"])
    rows = []
    for r in doc["nodes"]:
        iv = sp.interval_from_json(K, r["interval"])
        rows.append((r["id"], iv.lo, iv.hi, ord_.parse(r["level"]), r["parent"]))
    return make_tree(K, rows, doc.get("budget"))


def staged_to_json(st: StagedTree) -> dict:
    rows = []
    for i in st.nodes():
        row = {"id": i, "parent": st.parent[i], "level": st.level[i]}
        if st.payload is not None:
            row["payload"] = sp.interval_to_json(st.space, st.payload[i])
        rows.append(row)
    doc = {
        "v": 1,
        "kind": "staged",
        "top_level": st.top_level,
        "pool": sorted(st.pool),
        "limit_top": st.limit_top,
        "nodes": rows,
    }
    if st.space is not None:
        doc["space"] = sp.space_to_json(st.space)
    return doc


def staged_from_json(doc) -> StagedTree:
    if not isinstance(doc, dict) or doc.get("kind") != "staged":
        raise DomainError("not a staged tree document")
    K = sp.space_from_json(doc["space"]) if "space" in doc else None
    parent = {}
    level = {}
    payload = {}
    for r in doc["nodes"]:
        parent[r["id"]] = r["parent"]
        level[r["id"]] = r["level"]
        if "payload" in r:
            if K is None:
                raise DomainError("payload rows need a space")
            payload[r["id"]] = sp.interval_from_json(K, r["payload"])
    st = StagedTree(
        parent=parent,
        level=level,
        top_level=doc["top_level"],
        pool=frozenset(doc["pool"]),
        payload=payload if payload else None,
        space=K,
        limit_top=doc.get("limit_top", True),
    )
    st.validate()
    return st


def tree_to_dot(tree: PartitionTree) -> str:
    K = tree.space
    lines = ["digraph tree {", "  node [shape=box, fontname=\"monospace\"];"]
    for i in sorted(tree.nodes):
        n = tree.nodes[i]
        label = f"{i}: [{sp.render_point(K, n.interval.lo)}, {sp.render_point(K, n.interval.hi)}]\\nlevel {ord_.render(n.level)}"
        lines.append(f'  n{i} [label="{label}"];')
    for i in sorted(tree.nodes):
        for c in tree.nodes[i].children:
            lines.append(f"  n{i} -> n{c};")
    lines.append("}")
    return "\n".join(lines)


def staged_to_dot(st: StagedTree, cell_of: dict[int, int] | None = None) -> str:
    palette = ["#dd7878", "#8caaee", "#a6d189", "#e5c890", "#ca9ee6", "#81c8be", "#ef9f76", "#99d1db"]
    lines = ["digraph staged {", "  node [shape=box, fontname=\"monospace\"];"]
    for i in st.nodes():
        bits = [str(i)]
        if st.payload is not None:
            iv = st.payload[i]
            bits.append(f"[{sp.render_point(st.space, iv.lo)}, {sp.render_point(st.space, iv.hi)}]")
        label = "\\n".join(bits) + f"\\nlevel {st.level[i]}"
        style = ""
        if cell_of is not None:
            style = f', style=filled, fillcolor="{palette[cell_of[i] % len(palette)]}"'
        if st.level[i] in st.pool:
            style += ", penwidth=2"
        lines.append(f'  n{i} [label="{label}"{style}];')
    for i in st.nodes():
        p = st.parent[i]
        if p is not None:
            lines.append(f"  n{p} -> n{i};")
    lines.append("}")
    return "\n".join(lines)
