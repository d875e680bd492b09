"""Dominance realizers and the height-bounded spine order."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .graph_core import EmbeddedStGraph, GraphError, Reachability, require_valid, subset_height
from .linear_layout import BookEmbedding, color_pages, max_twist


@dataclass(frozen=True)
class Realizer:
    x_order: tuple[str, ...]
    y_order: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"x_order": list(self.x_order), "y_order": list(self.y_order)}


def _dfs_finish_reversed(g: EmbeddedStGraph, leftmost_first: bool) -> list[str]:
    """Reverse DFS post-order from s, children taken in left-to-right order or its mirror."""
    edges = g.edges
    kids = {}
    for v in g.vertices:
        outs = [edges[e][1] for e in g.out_lr(v)]
        kids[v] = outs if leftmost_first else outs[::-1]
    seen = {g.s}
    post: list[str] = []
    stack = [(g.s, iter(kids[g.s]))]
    while stack:
        v, it = stack[-1]
        for w in it:
            if w not in seen:
                seen.add(w)
                stack.append((w, iter(kids[w])))
                break
        else:
            stack.pop()
            post.append(v)
    return post[::-1]


def realizer_violation(reach: Reachability, r: Realizer):
    """First pair where the two orders disagree with reachability, as ``(u, v)``; None if exact.

    We need: u precedes v in reachability iff u is before v in both orders.
    """
    idx = {v: i for i, v in enumerate(reach.vertices)}
    n = len(reach.vertices)
    after_x = [0] * n
    acc = 0
    for v in reversed(r.x_order):
        after_x[idx[v]] = acc
        acc |= 1 << idx[v]
    after_y = [0] * n
    acc = 0
    for v in reversed(r.y_order):
        after_y[idx[v]] = acc
        acc |= 1 << idx[v]
    for i, v in enumerate(reach.vertices):
        both = after_x[i] & after_y[i]
        desc = reach.desc[i] & ~(1 << i)
        if both != desc:
            diff = both ^ desc
            j = (diff & -diff).bit_length() - 1
            return v, reach.vertices[j]
    return None


def dominance_realizer(g: EmbeddedStGraph, check: bool = True) -> Realizer:
    """Two topological orders whose common agreements are exactly the reachabilities.

    Among incomparable vertices, the x-order puts the left one first and the
    y-order the right one.  Both come from one depth-first search each,
    mirrored.
    """
    x = _dfs_finish_reversed(g, leftmost_first=False)
    y = _dfs_finish_reversed(g, leftmost_first=True)
    if len(x) != len(g.vertices):
        raise GraphError("not every vertex is reachable from s")
    r = Realizer(tuple(x), tuple(y))
    if check:
        bad = realizer_violation(g.reach, r)
        if bad is not None:
            raise GraphError(f"realizer disagrees with reachability at {bad}")
    return r


def height_spine(g: EmbeddedStGraph) -> tuple[str, ...]:
    return dominance_realizer(g).x_order


def incident_edges(g: EmbeddedStGraph, x: Iterable[str]) -> list[int]:
    xs = set(x)
    return [i for i, (u, v) in enumerate(g.edges) if u in xs or v in xs]


@dataclass
class HeightCertificate:
    order: tuple[str, ...]
    height: int
    twist: int
    witness: list[int]
    bound: int

    def to_dict(self) -> dict:
        return {"height": self.height, "twist": self.twist, "bound": self.bound, "witness": self.witness}


def bounded_twist_order(g: EmbeddedStGraph, x: Iterable[str]) -> HeightCertificate:
    """x-order spine plus the measured twist over edges touching ``x``.

    Raises if the twist exceeds 4 h(x), or 2 h when ``x`` is every vertex.
    """
    xs = set(x)
    order = height_spine(g)
    edges = incident_edges(g, xs)
    twist, wit = max_twist(order, [g.edges[e] for e in edges])
    h = subset_height(g.dag, xs)[0] if xs else 0
    bound = 2 * h if xs == set(g.vertices) else 4 * h
    if twist > bound:
        raise GraphError(f"twist {twist} exceeds bound {bound} for height {h}")
    return HeightCertificate(order, h, twist, [edges[i] for i in wit], bound)


def reference_height_bound(h: int) -> float:
    """56 h (log2 h + 2)."""
    return 56 * h * (math.log2(h) + 2) if h >= 1 else 0.0


def embed_height(g: EmbeddedStGraph) -> BookEmbedding:
    require_valid(g)
    cert = bounded_twist_order(g, g.vertices)
    be = color_pages(cert.order, g.edges)
    be.meta.update(
        algorithm="height",
        height=cert.height,
        twist_bound=cert.bound,
        reference_bound=reference_height_bound(cert.height),
    )
    return be
