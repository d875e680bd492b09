"""Width-bounded paging: cover X by non-crossing st-paths, subdivide, route, label pages.

Every topological order of the constructed supergraph G' is a valid spine
for the resulting assignment of E(G'[X]) and the subdivided originals.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .embedding_ops import WorkGraph
from .graph_core import (
    ChainCover,
    EmbeddedStGraph,
    GraphError,
    chain_cover,
    require_valid,
    validate_embedding,
)
from .linear_layout import BookEmbedding, find_page_crossing, random_topological_order

FWD, BWD = "fwd", "bwd"


@dataclass(frozen=True)
class PathCover:
    paths: tuple[tuple[str, ...], ...]
    covered: frozenset

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class Lens:
    i: int
    left: tuple[str, ...]
    right: tuple[str, ...]

    @property
    def source(self) -> str:
        return self.left[0]

    @property
    def sink(self) -> str:
        return self.left[-1]


@dataclass
class LensEdges:
    fwd: list[tuple[str, str]]
    bwd: list[tuple[str, str]]
    fwd_nontransitive: list[tuple[str, str]] = field(default_factory=list)
    bwd_nontransitive: list[tuple[str, str]] = field(default_factory=list)


def intra_label(i: int, side: int) -> str:
    return f"Q_{{{i}}}^{side}"


def star_label(i: int, direction: str, star: str, r: int) -> str:
    return f"Q_{{{i},{i + 1}}}^{r}:{direction}-{star}"


def declared_labels(w: int) -> set[str]:
    out = {intra_label(i, s) for i in range(1, w + 1) for s in (1, 2)}
    for i in range(1, w):
        for d in (FWD, BWD):
            for star in ("v", "w"):
                out |= {star_label(i, d, star, r) for r in range(3)}
    return out


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------


def _graph_view(g) -> WorkGraph:
    return g if isinstance(g, WorkGraph) else WorkGraph(g)


def _leftmost_shortest(w: WorkGraph, u: str, v: str, allowed: set[str]) -> list[str]:
    parent = {u: None}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        if a == v:
            break
        for e in w.out_lr(a):
            b = w.edges[e][1]
            if b in allowed and b not in parent:
                parent[b] = a
                queue.append(b)
    if v not in parent:
        raise GraphError(f"no path from {u!r} to {v!r}")
    out = [v]
    while out[-1] != u:
        out.append(parent[out[-1]])
    return out[::-1]


def extend_to_st_paths(g: EmbeddedStGraph, cover: ChainCover) -> PathCover:
    """One st-path per chain, through the chain's vertices in order."""
    w = _graph_view(g)
    reach = g.reach
    paths = []
    for chain in cover.chains:
        stops = list(chain)
        if stops[0] != g.s:
            stops.insert(0, g.s)
        if stops[-1] != g.t:
            stops.append(g.t)
        path = [stops[0]]
        for a, b in zip(stops, stops[1:]):
            allowed = {
                x for x in reach.members(reach.desc[reach.index[a]]) if reach.preceq(x, b)
            } | {b}
            path += _leftmost_shortest(w, a, b, allowed)[1:]
        paths.append(tuple(path))
    return PathCover(tuple(paths), frozenset(cover.target))


def _segments(p: Sequence[str], q: Sequence[str]):
    """Pairs of subpaths of ``p`` and ``q`` between consecutive common vertices."""
    qpos = {v: k for k, v in enumerate(q)}
    common = [(k, qpos[v]) for k, v in enumerate(p) if v in qpos]
    for (a1, b1), (a2, b2) in zip(common, common[1:]):
        yield tuple(p[a1 : a2 + 1]), tuple(q[b1 : b2 + 1])


def _is_left(w: WorkGraph, p: Sequence[str], q: Sequence[str]) -> bool:
    """Segment ``p`` leaves their common start to the left of ``q``."""
    order = w.out_lr(p[0])
    ep = w.by_pair[(p[0], p[1])]
    eq = w.by_pair[(q[0], q[1])]
    return order.index(ep) < order.index(eq)


def meet_join(g, p: Sequence[str], q: Sequence[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Left and right envelopes of two st-paths."""
    w = _graph_view(g)
    left, right = [p[0]], [p[0]]
    for sp, sq in _segments(p, q):
        if sp == sq:
            left += sp[1:]
            right += sp[1:]
        elif _is_left(w, sp, sq):
            left += sp[1:]
            right += sq[1:]
        else:
            left += sq[1:]
            right += sp[1:]
    return tuple(left), tuple(right)


def paths_cross(g, p: Sequence[str], q: Sequence[str]) -> bool:
    """Whether ``p`` and ``q`` swap sides at some common vertex."""
    w = _graph_view(g)
    side = None
    for sp, sq in _segments(p, q):
        if sp == sq:
            continue
        here = _is_left(w, sp, sq)
        if side is None:
            side = here
        elif side != here:
            return True
    return False


def uncross(g, cover: PathCover) -> PathCover:
    """Sort the paths left to right by repeated envelope exchange.

    Paths are subsets of a distributive lattice (the region left of a path),
    so odd-even transposition with meet/join as comparator ends in a chain.
    """
    w = _graph_view(g)
    paths = list(cover.paths)
    m = len(paths)
    for rnd in range(m + 2):
        changed = False
        for parity in (0, 1):
            for i in range(parity, m - 1, 2):
                lo, hi = meet_join(w, paths[i], paths[i + 1])
                if (lo, hi) != (paths[i], paths[i + 1]):
                    paths[i], paths[i + 1] = lo, hi
                    changed = True
        if not changed:
            break
    for i in range(m - 1):
        if meet_join(w, paths[i], paths[i + 1])[0] != paths[i]:
            raise GraphError("path uncrossing did not converge")
    return PathCover(tuple(paths), cover.covered)


# ---------------------------------------------------------------------------
# lenses
# ---------------------------------------------------------------------------


def find_lenses(g, cover: PathCover, i: int) -> list[Lens]:
    """Lenses between paths ``i`` and ``i + 1`` (0-based), bottom to top."""
    p, q = cover.paths[i], cover.paths[i + 1]
    return [Lens(i, sp, sq) for sp, sq in _segments(p, q) if sp != sq]


def _nontransitive(edges: list[tuple[int, int]]) -> list[int]:
    """Indices of edges (tail position, head position) not implied by another one.

    ``(a, b)`` is implied when some other edge ``(a', b')`` has ``a' >= a`` and
    ``b' <= b``: walk up the tail side to ``a'``, cross, walk up to ``b``.
    """
    keep = []
    for k, (a, b) in enumerate(edges):
        if not any(j != k and a2 >= a and b2 <= b for j, (a2, b2) in enumerate(edges)):
            keep.append(k)
    return keep


def classify_lens_edges(g, lens: Lens) -> LensEdges:
    w = _graph_view(g)
    pa = {v: k for k, v in enumerate(lens.left)}
    pb = {v: k for k, v in enumerate(lens.right)}
    a_in, b_in = set(lens.left[1:-1]), set(lens.right[1:-1])
    fwd, bwd = [], []
    for a in lens.left[1:-1]:
        for e in w.out_edges(a):
            if w.edges[e][1] in b_in:
                fwd.append(w.edges[e])
    for b in lens.right[1:-1]:
        for e in w.out_edges(b):
            if w.edges[e][1] in a_in:
                bwd.append(w.edges[e])
    fwd.sort(key=lambda e: (pa[e[0]], pb[e[1]]))
    bwd.sort(key=lambda e: (pa[e[1]], pb[e[0]]))
    fk = _nontransitive([(pa[u], pb[v]) for u, v in fwd])
    bk = _nontransitive([(pb[u], pa[v]) for u, v in bwd])
    out = LensEdges(fwd, bwd)
    out.fwd_nontransitive = [fwd[k] for k in fk]
    out.bwd_nontransitive = [bwd[k] for k in bk]
    for group in (out.fwd_nontransitive, out.bwd_nontransitive):
        ends = [x for e in group for x in e]
        if len(ends) != len(set(ends)):
            raise GraphError("non-transitive inter-path edges do not form a matching")
    return out


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


class _Path:
    """An st-path stored as successor/predecessor maps so splicing is O(1)."""

    def __init__(self, verts: Sequence[str]):
        self.s, self.t = verts[0], verts[-1]
        self.succ = dict(zip(verts, verts[1:]))
        self.pred = {b: a for a, b in self.succ.items()}

    def __contains__(self, v: str) -> bool:
        return v in self.succ or v == self.t

    def has_edge(self, a: str, b: str) -> bool:
        return self.succ.get(a) == b

    def splice(self, a: str, z: str, b: str) -> None:
        self.succ[a], self.succ[z] = z, b
        self.pred[b], self.pred[z] = z, a

    def vertices(self) -> tuple[str, ...]:
        out = [self.s]
        while out[-1] != self.t:
            out.append(self.succ[out[-1]])
        return tuple(out)

    def between(self, a: str, b: str) -> tuple[str, ...]:
        out = [a]
        while out[-1] != b:
            out.append(self.succ[out[-1]])
        return tuple(out)


class _Builder:
    def __init__(self, g: EmbeddedStGraph, cover: PathCover, paranoid: bool, max_vertices: int | None):
        self.g = g
        self.w = WorkGraph(g)
        self.paths = [_Path(p) for p in cover.paths]
        self.first_label: dict[int, str] = {}
        self.paranoid = paranoid
        self.max_vertices = max_vertices
        self.stats = {"subdivisions": 0, "route_edges": 0, "processed": 0}

    def check(self, where: str) -> None:
        if not self.paranoid:
            return
        frozen, _ = self.w.freeze()
        diag = validate_embedding(frozen)
        if not diag:
            raise GraphError(f"{where}: {diag.code}: {diag.message}")

    def subdivide(self, e: int, label: str) -> tuple[str, int, int]:
        w = self.w
        a, b = w.edges[e]
        origin = w.origin[e]
        if origin is not None:
            self.first_label.setdefault(origin, label)
        base = f"sd{origin}" if origin is not None else f"sdx{e}"
        z, e1, e2 = w.subdivide(e, w.fresh_name(base))
        for p in self.paths:
            if p.has_edge(a, b):
                p.splice(a, z, b)
        self.stats["subdivisions"] += 1
        if self.max_vertices is not None and len(w.vertices) > self.max_vertices:
            raise GraphError(f"supergraph exceeded {self.max_vertices} vertices")
        return z, e1, e2

    def arc(self, hub: str, start: int, stop: int) -> list[int]:
        """Edges strictly between ``start`` and ``stop`` going clockwise around ``hub``."""
        cyc = self.w.rot[hub]
        i, j = cyc.index(start), cyc.index(stop)
        n = len(cyc)
        return [cyc[(i + k) % n] for k in range(1, (j - i) % n)]

    def process_edge(self, i: int, direction: str, j: int, v: str, wv: str) -> None:
        w = self.w
        tail_path = self.paths[i] if direction == FWD else self.paths[i + 1]
        head_path = self.paths[i + 1] if direction == FWD else self.paths[i]
        e = w.by_pair[(v, wv)]
        p_out = w.by_pair[(v, tail_path.succ[v])]
        p_in = w.by_pair[(head_path.pred[wv], wv)]
        if direction == FWD:
            ev = self.arc(v, p_out, e)
            ew = self.arc(wv, p_in, e)
        else:
            ev = self.arc(v, e, p_out)
            ew = self.arc(wv, e, p_in)
        if any(w.edges[f][0] != v for f in ev) or any(w.edges[f][1] != wv for f in ew):
            raise GraphError(f"edge arcs at {v!r}/{wv!r} mix directions")
        r = j % 3
        lab_v = star_label(i + 1, direction, "v", r)
        lab_w = star_label(i + 1, direction, "w", r)
        u, e_lo, e_hi = self.subdivide(e, lab_v)
        ti, hi = (i, i + 1) if direction == FWD else (i + 1, i)
        v2, out_lo, _ = self.subdivide(p_out, intra_label(ti + 1, 1))
        w2, _, in_hi = self.subdivide(p_in, intra_label(hi + 1, 1))
        ys = [self.subdivide(f, lab_v)[1] for f in ev]
        xs = [self.subdivide(f, lab_w)[2] for f in ew]
        if direction == FWD:
            seq_w, w_forward = [in_hi, *xs, e_hi], True
            seq_v, v_forward = [out_lo, *ys, e_lo], False
        else:
            seq_w, w_forward = [e_hi, *xs, in_hi], False
            seq_v, v_forward = [e_lo, *ys, out_lo], True
        for hub, seq, forward in ((wv, seq_w, w_forward), (v, seq_v, v_forward)):
            for a, b in zip(seq, seq[1:]):
                fa, fb = w.other(a, hub), w.other(b, hub)
                tail, head = (fa, fb) if forward else (fb, fa)
                w.cut_corner(hub, a, b, tail, head)
                self.stats["route_edges"] += 1
        self.stats["processed"] += 1
        self.check(f"pair {i + 1} {direction} edge {v}->{wv}")

    def run(self) -> None:
        for i in range(len(self.paths) - 1):
            for direction in (FWD, BWD):
                cover = PathCover(
                    (self.paths[i].vertices(), self.paths[i + 1].vertices()), frozenset()
                )
                bounds = [(lens.source, lens.sink) for lens in find_lenses(self.w, cover, 0)]
                for s_l, t_l in bounds:
                    lens = Lens(i, self.paths[i].between(s_l, t_l), self.paths[i + 1].between(s_l, t_l))
                    cls = classify_lens_edges(self.w, lens)
                    todo = cls.fwd_nontransitive if direction == FWD else cls.bwd_nontransitive
                    for j, (a, b) in enumerate(todo, start=1):
                        self.process_edge(i, direction, j, a, b)

    def intra_page(self, a: str, b: str, member: dict[str, set[int]]) -> str:
        common = member.get(a, set()) & member.get(b, set())
        if not common:
            raise GraphError(f"edge {a!r}->{b!r} joins different paths after routing")
        k = min(common)
        p = self.paths[k]
        if p.has_edge(a, b):
            return intra_label(k + 1, 1)
        order = self.w.out_lr(a)
        mine = order.index(self.w.by_pair[(a, b)])
        along = order.index(self.w.by_pair[(a, p.succ[a])])
        return intra_label(k + 1, 1 if mine < along else 2)


@dataclass
class WidthResult:
    g: EmbeddedStGraph
    g_prime: EmbeddedStGraph
    x: frozenset
    cover: PathCover
    e_delta: list[int]
    page_of: dict[int, str]
    delta_page: dict[int, str]
    trace: dict[int, list[str]]
    stats: dict = field(default_factory=dict)

    def assigned(self, restrict: bool = True) -> list[tuple[str, str, str]]:
        """``(tail, head, label)`` for E(G'[X]) and E_Delta (or all of G'[P] if not restricted)."""
        out = []
        for e, lab in sorted(self.page_of.items()):
            u, v = self.g_prime.edges[e]
            if not restrict or (u in self.x and v in self.x):
                out.append((u, v, lab))
        for e, lab in sorted(self.delta_page.items()):
            u, v = self.g.edges[e]
            out.append((u, v, lab))
        return out

    def labels(self, restrict: bool = True) -> set[str]:
        return {lab for _, _, lab in self.assigned(restrict)}

    @property
    def page_count(self) -> int:
        return len(self.labels())

    @property
    def width(self) -> int:
        return len(self.cover)

    def to_dict(self) -> dict:
        from .io import graph_to_dict

        pages: dict[str, list] = {}
        for e, lab in sorted(self.page_of.items()):
            u, v = self.g_prime.edges[e]
            if u in self.x and v in self.x:
                pages.setdefault(lab, []).append({"g_prime": e})
        for e, lab in sorted(self.delta_page.items()):
            pages.setdefault(lab, []).append({"g": e})
        return {
            "g_prime": graph_to_dict(self.g_prime),
            "e_delta": list(self.e_delta),
            "pages": pages,
            "subdivision_trace": {str(k): v for k, v in sorted(self.trace.items())},
            "paths": [list(p) for p in self.cover.paths],
            "page_count": self.page_count,
            "stats": self.stats,
        }


def apply_width_construction(
    g: EmbeddedStGraph,
    x: Iterable[str],
    paths: Sequence[Sequence[str]] | None = None,
    paranoid: bool = False,
    max_vertices: int | None = None,
) -> WidthResult:
    """Build G' and a page assignment of E(G'[X]) and E_Delta valid for every order of G'.

    ``paths`` optionally supplies st-paths covering ``x``; otherwise a
    minimum chain cover is extended to paths.
    """
    require_valid(g)
    xs = frozenset(x)
    if not xs:
        empty = PathCover((), xs)
        return WidthResult(g, g, xs, empty, [], {}, {}, {}, {"paths": 0})
    if paths is None:
        cover = extend_to_st_paths(g, chain_cover(g.dag, xs, g.reach))
    else:
        cover = PathCover(tuple(tuple(p) for p in paths), xs)
        missing = xs - {v for p in cover.paths for v in p}
        if missing:
            raise GraphError(f"paths miss {sorted(missing)[:3]}")
    cover = uncross(g, cover)
    b = _Builder(g, cover, paranoid, max_vertices)
    b.run()
    w = b.w

    member: dict[str, set[int]] = {}
    for k, p in enumerate(b.paths):
        for v in p.vertices():
            member.setdefault(v, set()).add(k)
    page_work: dict[int, str] = {}
    for e, (u, v) in w.edges.items():
        if u in member and v in member:
            page_work[e] = b.intra_page(u, v, member)
    # an original survives only if one live edge still spans its own endpoints
    live_origins = {o for e, o in w.origin.items() if o is not None and w.edges[e] == g.edges[o]}
    e_delta = sorted(set(range(len(g.edges))) - live_origins)
    delta_page = {}
    for e in e_delta:
        delta_page[e] = b.first_label[e]

    g_prime, renum = w.freeze({"width_construction": True})
    trace = {}
    pieces: dict[int, dict[str, str]] = {}
    for e, o in w.origin.items():
        if o in delta_page:
            a, c = w.edges[e]
            pieces.setdefault(o, {})[a] = c
    for o, nxt in pieces.items():
        walk = [g.edges[o][0]]
        while walk[-1] != g.edges[o][1]:
            walk.append(nxt[walk[-1]])
        trace[o] = walk
    stats = dict(b.stats)
    stats.update(paths=len(b.paths), n=len(g.vertices), n_prime=len(g_prime.vertices))
    final_cover = PathCover(tuple(p.vertices() for p in b.paths), xs)
    return WidthResult(
        g, g_prime, xs, final_cover, e_delta,
        {renum[e]: lab for e, lab in page_work.items()}, delta_page, trace, stats,
    )


def width_violation(res: WidthResult, orders: int = 20, seed: int = 0, restrict: bool = False):
    """First same-page crossing over sampled topological orders of G', or None.

    Returns ``(order_index, edge_a, edge_b)`` with edges as ``(tail, head, label)``.
    """
    items = res.assigned(restrict)
    edges = [(u, v) for u, v, _ in items]
    page_of = {k: lab for k, (_, _, lab) in enumerate(items)}
    rng = random.Random(seed)
    for k in range(orders):
        order = random_topological_order(res.g_prime.dag, rng)
        hit = find_page_crossing(order, edges, page_of)
        if hit is not None:
            return k, items[hit[0]], items[hit[1]]
    return None


def reachability_preserved(res: WidthResult):
    """First pair ``u < v`` of G that G' loses, or None."""
    r, rp = res.g.reach, res.g_prime.reach
    keep = rp.mask(res.g.vertices)
    for u in res.g.vertices:
        want = r.desc[r.index[u]]
        have = rp.desc[rp.index[u]] & keep
        lost = r.members(want) - rp.members(have)
        if lost:
            return u, min(lost)
    return None


def embed_width(g: EmbeddedStGraph, paranoid: bool = False, seed: int | None = None) -> tuple[BookEmbedding, WidthResult]:
    """Book embedding of ``g`` from the width construction with X = V(G).

    The spine is a topological order of G' (seeded random when ``seed`` is
    given) restricted to the vertices of ``g``.
    """
    res = apply_width_construction(g, g.vertices, paranoid=paranoid)
    gp = res.g_prime.dag
    order = gp.topological_order() if seed is None else random_topological_order(gp, random.Random(seed))
    keep = set(g.vertices)
    spine = tuple(v for v in order if v in keep)
    edge_id = {e: k for k, e in enumerate(g.edges)}
    page_of = {}
    for u, v, lab in res.assigned(restrict=True):
        k = edge_id.get((u, v))
        if k is not None:
            page_of.setdefault(k, lab)
    be = BookEmbedding(spine, page_of, {"algorithm": "width", "width": res.width, "bound": 14 * res.width})
    be.meta["page_count"] = be.page_count
    return be, res
