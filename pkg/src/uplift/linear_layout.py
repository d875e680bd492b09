"""Spine orders, crossings, twists, page colorings and exact small-instance search."""

from __future__ import annotations

import bisect
import math
import random
import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .graph_core import Dag, Diagnostics, PASS, _fail

Edge = tuple[str, str]


def positions(order: Sequence[str] | Mapping[str, int]) -> Mapping[str, int]:
    if isinstance(order, Mapping):
        return order
    return {v: i for i, v in enumerate(order)}


def is_topological(g: Dag, order: Sequence[str]) -> bool:
    pos = positions(order)
    if len(pos) != len(g.vertices) or set(pos) != set(g.vertices):
        return False
    return all(pos[u] < pos[v] for u, v in g.edges)


def edges_cross(order, e1: Edge, e2: Edge) -> bool:
    pos = positions(order)
    a1, b1 = sorted((pos[e1[0]], pos[e1[1]]))
    a2, b2 = sorted((pos[e2[0]], pos[e2[1]]))
    return a1 < a2 < b1 < b2 or a2 < a1 < b2 < b1


def _intervals(pos: Mapping[str, int], edges: Sequence[Edge]) -> list[tuple[int, int]]:
    out = []
    for u, v in edges:
        a, b = pos[u], pos[v]
        out.append((a, b) if a < b else (b, a))
    return out


def max_twist(order, edges: Sequence[Edge]) -> tuple[int, list[int]]:
    """Largest pairwise-crossing subset of ``edges``; witness as indices into ``edges``.

    A k-twist sorted by left endpoints has a_1 < ... < a_k < b_1 < ... < b_k,
    so it spans the gap right after a_k.  Per gap, the answer is the longest
    chain increasing in both endpoints among the edges spanning it.
    """
    if not edges:
        return 0, []
    pos = positions(order)
    iv = _intervals(pos, edges)
    n = max(b for _, b in iv) + 1
    delta = [0] * (n + 1)
    for a, b in iv:
        delta[a] += 1
        delta[b] -= 1
    span, run = [], 0
    for g in range(n):
        run += delta[g]
        span.append(run)
    by_left = sorted(range(len(iv)), key=lambda i: (iv[i][0], -iv[i][1]))
    best, witness = 0, []
    for g in sorted(range(n), key=lambda g: -span[g]):
        if span[g] <= best:
            break
        cand = [i for i in by_left if iv[i][0] <= g < iv[i][1]]
        k, wit = _lis_right(iv, cand)
        if k > best:
            best, witness = k, wit
    return best, witness


def _lis_right(iv, cand: list[int]) -> tuple[int, list[int]]:
    tails: list[int] = []
    tail_idx: list[int] = []
    prev: dict[int, int | None] = {}
    for i in cand:
        b = iv[i][1]
        k = bisect.bisect_left(tails, b)
        prev[i] = tail_idx[k - 1] if k else None
        if k == len(tails):
            tails.append(b)
            tail_idx.append(i)
        else:
            tails[k] = b
            tail_idx[k] = i
    if not tails:
        return 0, []
    out = []
    i = tail_idx[-1]
    while i is not None:
        out.append(i)
        i = prev[i]
    return len(out), out[::-1]


def has_twist(order, edges: Sequence[Edge], k: int) -> bool:
    """True iff some k edges pairwise cross (stops at the first gap that has one)."""
    if k <= 0:
        return True
    pos = positions(order)
    iv = _intervals(pos, edges)
    if len(iv) < k:
        return False
    by_left = sorted(range(len(iv)), key=lambda i: (iv[i][0], -iv[i][1]))
    gaps = sorted({a for a, _ in iv})
    for g in gaps:
        cand = [i for i in by_left if iv[i][0] <= g < iv[i][1]]
        if len(cand) >= k and _lis_right(iv, cand)[0] >= k:
            return True
    return False


# ---------------------------------------------------------------------------
# Book embeddings
# ---------------------------------------------------------------------------


@dataclass
class BookEmbedding:
    """Spine plus a page label for every assigned edge index."""

    spine: tuple[str, ...]
    page_of: dict[int, Hashable]
    meta: dict = field(default_factory=dict)

    def labels(self) -> list[Hashable]:
        seen = dict.fromkeys(self.page_of[e] for e in sorted(self.page_of))
        try:
            return sorted(seen)
        except TypeError:
            return list(seen)

    def pages(self) -> list[list[int]]:
        groups: dict[Hashable, list[int]] = {}
        for e in sorted(self.page_of):
            groups.setdefault(self.page_of[e], []).append(e)
        return [groups[lab] for lab in self.labels()]

    @property
    def page_count(self) -> int:
        return len(set(self.page_of.values()))


def _page_crossing(ivs: list[tuple[int, int, int]]):
    """First crossing pair among ``(left, right, id)`` intervals, or None."""
    stack: list[tuple[int, int, int]] = []
    for a, b, i in sorted(ivs, key=lambda x: (x[0], -x[1])):
        while stack and stack[-1][1] <= a:
            stack.pop()
        if stack and stack[-1][0] < a and stack[-1][1] < b:
            return stack[-1][2], i
        stack.append((a, b, i))
    return None


def find_page_crossing(order, edges: Sequence[Edge], page_of: Mapping[int, Hashable]):
    """First same-page crossing ``(i, j)`` over edge indices, or None."""
    pos = positions(order)
    groups: dict[Hashable, list[tuple[int, int, int]]] = {}
    for i, lab in page_of.items():
        u, v = edges[i]
        a, b = sorted((pos[u], pos[v]))
        groups.setdefault(lab, []).append((a, b, i))
    for lab in groups:
        hit = _page_crossing(groups[lab])
        if hit is not None:
            return hit
    return None


def color_pages(order, edges: Sequence[Edge], ids: Sequence[int] | None = None) -> BookEmbedding:
    """First-fit page assignment in (left ascending, right descending) order.

    ``ids`` names the edges (defaults to their positions in ``edges``).
    """
    pos = positions(order)
    ids = list(range(len(edges))) if ids is None else list(ids)
    iv = _intervals(pos, edges)
    stacks: list[list[tuple[int, int]]] = []
    page_of: dict[int, int] = {}
    for k in sorted(range(len(edges)), key=lambda k: (iv[k][0], -iv[k][1])):
        a, b = iv[k]
        for p, st in enumerate(stacks):
            while st and st[-1][1] <= a:
                st.pop()
            if not st or st[-1][0] == a or st[-1][1] >= b:
                st.append((a, b))
                page_of[ids[k]] = p
                break
        else:
            stacks.append([(a, b)])
            page_of[ids[k]] = len(stacks) - 1
    spine = tuple(order) if not isinstance(order, Mapping) else tuple(sorted(pos, key=pos.get))
    twist, _ = max_twist(pos, edges)
    count = len(stacks)
    meta = {
        "algorithm": "first-fit",
        "page_count": count,
        "max_twist": twist,
        "reference_bound": reference_page_bound(twist),
    }
    return BookEmbedding(spine, page_of, meta)


def reference_page_bound(k: int) -> float:
    """14 k log2 k, the circle-graph coloring guarantee (reported, not enforced)."""
    return 14 * k * math.log2(k) if k > 1 else float(k)


def validate_book_embedding(
    g: Dag, be: BookEmbedding, edges: Iterable[int] | None = None
) -> Diagnostics:
    """Topological spine, every required edge assigned, no same-page crossing."""
    pos = {v: i for i, v in enumerate(be.spine)}
    if len(pos) != len(be.spine) or set(pos) != set(g.vertices):
        return _fail("spine-mismatch", "spine is not a permutation of the vertices", None)
    for e, (u, v) in enumerate(g.edges):
        if pos[u] >= pos[v]:
            return _fail("non-topological", f"edge {u!r}->{v!r} points backward", e)
    required = range(len(g.edges)) if edges is None else edges
    for e in required:
        if e not in be.page_of:
            return _fail("unassigned", f"edge {e} has no page", e)
    extra = [e for e in be.page_of if not 0 <= e < len(g.edges)]
    if extra:
        return _fail("unknown-edge", f"edge index {extra[0]} is out of range", extra[0])
    hit = find_page_crossing(pos, g.edges, be.page_of)
    if hit is not None:
        return _fail("same-page-crossing", f"edges {hit[0]} and {hit[1]} cross on one page", hit)
    return PASS


# ---------------------------------------------------------------------------
# Topological orders
# ---------------------------------------------------------------------------


def random_topological_order(g: Dag, rng: random.Random) -> list[str]:
    """Repeatedly emit a uniformly chosen available source (not uniform over orders)."""
    indeg = {v: len(g.in_edges[v]) for v in g.vertices}
    avail = [v for v in g.vertices if indeg[v] == 0]
    out = []
    while avail:
        k = rng.randrange(len(avail))
        avail[k], avail[-1] = avail[-1], avail[k]
        v = avail.pop()
        out.append(v)
        for w in g.successors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                avail.append(w)
    return out


class UniformOrderSampler:
    """Exact uniform sampling of topological orders via counts over down-sets.

    Only practical when the number of down-sets is small (a few hundred
    thousand); construction raises ``OverflowError`` beyond ``max_states``.
    """

    def __init__(self, g: Dag, max_states: int = 400_000):
        self.g = g
        idx = g.index
        self.verts = list(g.vertices)
        self.pred = [0] * len(self.verts)
        for u, v in g.edges:
            self.pred[idx[v]] |= 1 << idx[u]
        self.full = (1 << len(self.verts)) - 1
        self.count: dict[int, int] = {}
        self.max_states = max_states
        self.total = self._count(0)

    def _count(self, start: int) -> int:
        # iterative post-order to avoid recursion limits
        stack = [start]
        while stack:
            s = stack[-1]
            if s in self.count:
                stack.pop()
                continue
            if s == self.full:
                self.count[s] = 1
                stack.pop()
                continue
            kids = [s | (1 << i) for i in self._avail(s)]
            todo = [c for c in kids if c not in self.count]
            if todo:
                stack.extend(todo)
                if len(self.count) + len(stack) > self.max_states:
                    raise OverflowError("too many down-sets for exact sampling")
                continue
            self.count[s] = sum(self.count[c] for c in kids)
            stack.pop()
        return self.count[start]

    def _avail(self, s: int) -> list[int]:
        out = []
        free = self.full & ~s
        while free:
            low = free & -free
            i = low.bit_length() - 1
            if self.pred[i] & ~s == 0:
                out.append(i)
            free ^= low
        return out

    def sample(self, rng: random.Random) -> list[str]:
        s, out = 0, []
        while s != self.full:
            r = rng.randrange(self.count[s])
            for i in self._avail(s):
                c = self.count[s | (1 << i)]
                if r < c:
                    out.append(self.verts[i])
                    s |= 1 << i
                    break
                r -= c
        return out


def iter_topological_orders(g: Dag, limit: int | None = None):
    """All topological orders, smallest-index available vertex first."""
    order = [v for v in g.vertices]
    idx = g.index
    indeg = [len(g.in_edges[v]) for v in order]
    succ = [[idx[w] for w in g.successors(v)] for v in order]
    prefix: list[int] = []
    produced = 0

    def rec():
        nonlocal produced
        if len(prefix) == len(order):
            produced += 1
            yield [order[i] for i in prefix]
            return
        for i in range(len(order)):
            if indeg[i] == 0:
                indeg[i] = -1
                for j in succ[i]:
                    indeg[j] -= 1
                prefix.append(i)
                yield from rec()
                prefix.pop()
                for j in succ[i]:
                    indeg[j] += 1
                indeg[i] = 0
                if limit is not None and produced >= limit:
                    return

    yield from rec()


# ---------------------------------------------------------------------------
# Exact search on small graphs
# ---------------------------------------------------------------------------


@dataclass
class SearchResult:
    value: int | None
    exact: bool
    order: list[str] | None
    explored: int
    lower: int = 0
    pages: dict[int, int] | None = None
    witness: list[int] | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "exact": self.exact,
            "lower": self.lower,
            "order": self.order,
            "explored": self.explored,
        }


class _Budget:
    def __init__(self, nodes: int | None, ms: float | None):
        self.nodes = nodes
        self.deadline = None if ms is None else time.monotonic() + ms / 1000
        self.used = 0

    def spend(self) -> bool:
        self.used += 1
        if self.nodes is not None and self.used > self.nodes:
            return False
        if self.deadline is not None and self.used % 256 == 0 and time.monotonic() > self.deadline:
            return False
        return True


def _search_orders(g: Dag, leaf_score, budget: _Budget, best: int):
    """Branch and bound over topological orders.

    ``leaf_score(order, closed_edges, bound)`` returns the score of a complete
    order, or of a prefix when the prefix alone certifies ``>= bound``.
    Prefixes whose placed edges already reach ``best`` are cut using
    ``max_twist`` as a lower bound.
    """
    verts = list(g.vertices)
    idx = g.index
    indeg = [len(g.in_edges[v]) for v in verts]
    succ = [[idx[w] for w in g.successors(v)] for v in verts]
    inc = [[g.edges[e] for e in g.in_edges[v]] for v in verts]
    prefix: list[str] = []
    closed: list[Edge] = []
    state = {"best": best, "order": None, "complete": True}

    def rec(lb: int):
        if not budget.spend():
            state["complete"] = False
            return
        if len(prefix) == len(verts):
            score = leaf_score(prefix, closed, state["best"])
            if score < state["best"]:
                state["best"], state["order"] = score, list(prefix)
            return
        for i in range(len(verts)):
            if indeg[i] != 0:
                continue
            indeg[i] = -1
            for j in succ[i]:
                indeg[j] -= 1
            prefix.append(verts[i])
            closed.extend(inc[i])
            sub_lb = lb
            if inc[i]:
                sub_lb = max(lb, max_twist(prefix, closed)[0])
            if sub_lb < state["best"]:
                rec(sub_lb)
            del closed[len(closed) - len(inc[i]):]
            prefix.pop()
            for j in succ[i]:
                indeg[j] += 1
            indeg[i] = 0
            if not state["complete"]:
                return

    rec(0)
    return state


def brute_force_tn(g: Dag, budget: int | None = 2_000_000, budget_ms: float | None = None) -> SearchResult:
    """Twist number by exhaustive search; ``exact`` is False when the budget ran out."""
    if not g.edges:
        return SearchResult(0, True, list(g.topological_order()), 0)
    b = _Budget(budget, budget_ms)
    st = _search_orders(g, lambda order, closed, bound: max_twist(order, closed)[0], b, len(g.edges) + 1)
    order = st["order"]
    value = st["best"] if order is not None else None
    wit = max_twist(order, g.edges)[1] if order is not None else None
    lower = value if st["complete"] else 1
    return SearchResult(value, st["complete"], order, b.used, lower=lower, witness=wit)


def _k_colorable(order, edges: Sequence[Edge], k: int) -> dict[int, int] | None:
    """Assign ``edges`` to ``k`` pages under ``order`` (DSATUR backtracking)."""
    ff = color_pages(order, edges)
    if ff.page_count <= k:
        return {e: p for e, p in ff.page_of.items()}
    pos = positions(order)
    m = len(edges)
    conflict = [set() for _ in range(m)]
    iv = _intervals(pos, edges)
    for i in range(m):
        for j in range(i + 1, m):
            (a1, b1), (a2, b2) = iv[i], iv[j]
            if a1 < a2 < b1 < b2 or a2 < a1 < b2 < b1:
                conflict[i].add(j)
                conflict[j].add(i)
    color = [-1] * m

    def pick():
        best, key = -1, None
        for i in range(m):
            if color[i] < 0:
                sat = len({color[j] for j in conflict[i] if color[j] >= 0})
                cand = (sat, len(conflict[i]))
                if key is None or cand > key:
                    best, key = i, cand
        return best

    def rec(done: int) -> bool:
        if done == m:
            return True
        i = pick()
        used = {color[j] for j in conflict[i] if color[j] >= 0}
        top = max(color) + 1
        for c in range(min(k, top + 1)):
            if c not in used:
                color[i] = c
                if rec(done + 1):
                    return True
        color[i] = -1
        return False

    return {e: c for e, c in enumerate(color)} if rec(0) else None


def brute_force_pn(
    g: Dag, max_pages: int = 8, budget: int | None = 2_000_000, budget_ms: float | None = None
) -> SearchResult:
    """Page number by search over orders x page assignments, for ``k = 1, 2, ...``."""
    if not g.edges:
        return SearchResult(0, True, list(g.topological_order()), 0, pages={})
    b = _Budget(budget, budget_ms)
    lower = 1
    for k in range(1, max_pages + 1):
        found: dict = {}

        def leaf(order, closed, bound, k=k):
            pages = _k_colorable(order, g.edges, k)
            if pages is None:
                return bound
            found["pages"] = pages
            return -1

        st = _search_orders(g, leaf, b, k + 1)
        if st["order"] is not None:
            return SearchResult(k, True, st["order"], b.used, lower=k, pages=found["pages"])
        if not st["complete"]:
            return SearchResult(None, False, None, b.used, lower=lower)
        lower = k + 1
    return SearchResult(None, False, None, b.used, lower=lower)
