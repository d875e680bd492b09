"""Directed acyclic graphs with clockwise rotation systems.

Vertices are strings; edges are ``(tail, head)`` pairs addressed by their
position in ``Dag.edges``.  Reachability is stored as Python-int bitsets
indexed by vertex position, which keeps closure queries cheap on graphs
with tens of thousands of vertices.

Rotation convention: ``rotation[v]`` lists the edge indices incident to
``v`` in clockwise order.  In an upward drawing this means outgoing edges
appear left to right, followed by incoming edges right to left.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class GraphError(ValueError):
    """Raised when an input graph violates a structural precondition."""


class CycleError(GraphError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = list(cycle)
        super().__init__(f"directed cycle: {' -> '.join(self.cycle)}")


@dataclass(frozen=True, eq=False)
class Dag:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]]):
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "edges", tuple((e[0], e[1]) for e in edges))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        return f"Dag(|V|={len(self.vertices)}, |E|={len(self.edges)})"

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {v: [] for v in self.vertices}
        for i, (u, _) in enumerate(self.edges):
            out.setdefault(u, []).append(i)
        return out

    @cached_property
    def in_edges(self) -> dict[str, list[int]]:
        inc: dict[str, list[int]] = {v: [] for v in self.vertices}
        for i, (_, v) in enumerate(self.edges):
            inc.setdefault(v, []).append(i)
        return inc

    @cached_property
    def edge_index(self) -> dict[tuple[str, str], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def successors(self, v: str) -> list[str]:
        return [self.edges[i][1] for i in self.out_edges[v]]

    def predecessors(self, v: str) -> list[str]:
        return [self.edges[i][0] for i in self.in_edges[v]]

    def sources(self) -> list[str]:
        return [v for v in self.vertices if not self.in_edges[v]]

    def sinks(self) -> list[str]:
        return [v for v in self.vertices if not self.out_edges[v]]

    def structural_problem(self) -> tuple[str, str, object] | None:
        """First violated simple-graph invariant as ``(code, message, witness)``."""
        seen_v: set[str] = set()
        for v in self.vertices:
            if v in seen_v:
                return "duplicate-vertex", f"vertex {v!r} declared twice", v
            seen_v.add(v)
        seen_e: dict[tuple[str, str], int] = {}
        for i, (u, v) in enumerate(self.edges):
            if u not in seen_v or v not in seen_v:
                return "unknown-vertex", f"edge {i} has undeclared endpoint", i
            if u == v:
                return "self-loop", f"edge {i} is a loop at {u!r}", i
            if (u, v) in seen_e or (v, u) in seen_e:
                j = seen_e.get((u, v), seen_e.get((v, u)))
                return "parallel-edge", f"edges {j} and {i} join {u!r},{v!r}", (j, i)
            seen_e[(u, v)] = i
        return None

    def check(self) -> None:
        problem = self.structural_problem()
        if problem is not None:
            raise GraphError(problem[1])
        self.topological_order()

    @cached_property
    def _topo(self) -> tuple[str, ...] | CycleError:
        indeg = {v: len(self.in_edges[v]) for v in self.vertices}
        # smallest-index-first keeps the order deterministic
        ready = [v for v in self.vertices if indeg[v] == 0]
        ready.reverse()
        order = []
        while ready:
            v = ready.pop()
            order.append(v)
            fresh = []
            for w in self.successors(v):
                indeg[w] -= 1
                if indeg[w] == 0:
                    fresh.append(w)
            fresh.sort(key=self.index.__getitem__, reverse=True)
            ready.extend(fresh)
        if len(order) < len(self.vertices):
            return CycleError(find_cycle(self))
        return tuple(order)

    def topological_order(self) -> tuple[str, ...]:
        topo = self._topo
        if isinstance(topo, CycleError):
            raise topo
        return topo

    def is_acyclic(self) -> bool:
        return not isinstance(self._topo, CycleError)

    def subgraph(self, keep: Iterable[str]) -> "Dag":
        keep = set(keep)
        return Dag(
            [v for v in self.vertices if v in keep],
            [e for e in self.edges if e[0] in keep and e[1] in keep],
        )


def find_cycle(g: Dag) -> list[str]:
    """Return one directed cycle as a vertex list (first vertex repeated last)."""
    color = {v: 0 for v in g.vertices}
    parent: dict[str, str] = {}
    for root in g.vertices:
        if color[root]:
            continue
        stack = [(root, iter(g.successors(root)))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(g.successors(w))))
                    break
                if color[w] == 1:
                    cyc = [v]
                    while cyc[-1] != w:
                        cyc.append(parent[cyc[-1]])
                    cyc.reverse()
                    return cyc + [cyc[0]]
            else:
                color[v] = 2
                stack.pop()
    return []


# ---------------------------------------------------------------------------
# Reachability
# ---------------------------------------------------------------------------


class Reachability:
    """Strict reachability ``u < v`` of a DAG, one descendant bitset per vertex."""

    def __init__(self, vertices: Sequence[str], desc: list[int]):
        self.vertices = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.desc = desc

    def precedes(self, u: str, v: str) -> bool:
        return bool(self.desc[self.index[u]] >> self.index[v] & 1)

    def preceq(self, u: str, v: str) -> bool:
        return u == v or self.precedes(u, v)

    def comparable(self, u: str, v: str) -> bool:
        return self.preceq(u, v) or self.preceq(v, u)

    def descendants(self, u: str) -> set[str]:
        return self.members(self.desc[self.index[u]])

    def members(self, mask: int) -> set[str]:
        out = set()
        while mask:
            low = mask & -mask
            out.add(self.vertices[low.bit_length() - 1])
            mask ^= low
        return out

    def mask(self, vs: Iterable[str]) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.index[v]
        return m

    def pairs(self) -> set[tuple[str, str]]:
        return {(u, v) for u in self.vertices for v in self.descendants(u)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Reachability):
            return NotImplemented
        return self.pairs() == other.pairs()


def transitive_closure(g: Dag) -> Reachability:
    order = g.topological_order()
    idx = g.index
    desc = [0] * len(g.vertices)
    for v in reversed(order):
        m = 0
        for w in g.successors(v):
            j = idx[w]
            m |= desc[j] | (1 << j)
        desc[idx[v]] = m
    return Reachability(g.vertices, desc)


# ---------------------------------------------------------------------------
# Width, height and chain covers
# ---------------------------------------------------------------------------


@dataclass
class ChainCover:
    target: frozenset[str]
    chains: list[list[str]]

    def __len__(self) -> int:
        return len(self.chains)


def _hopcroft_karp(left: Sequence[int], adj: Mapping[int, Sequence[int]]) -> dict[int, int]:
    """Maximum bipartite matching; returns left -> right."""
    inf = float("inf")
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}
    while True:
        dist: dict[int, float] = {}
        q = deque()
        for u in left:
            if u not in match_l:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = inf
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        if not found:
            return match_l

        def augment(u: int) -> bool:
            stack = [(u, iter(adj[u]))]
            trail = []
            while stack:
                x, it = stack[-1]
                for v in it:
                    w = match_r.get(v)
                    if w is None:
                        trail.append((x, v))
                        for a, b in trail:
                            match_l[a] = b
                            match_r[b] = a
                        return True
                    if dist[w] == dist[x] + 1:
                        trail.append((x, v))
                        stack.append((w, iter(adj[w])))
                        break
                else:
                    dist[x] = inf
                    stack.pop()
                    if trail:
                        trail.pop()
            return False

        for u in left:
            if u not in match_l:
                augment(u)


def _cover_and_antichain(
    reach: Reachability, xs: list[str]
) -> tuple[list[list[str]], list[str]]:
    pos = {reach.index[v]: k for k, v in enumerate(xs)}
    xmask = reach.mask(xs)
    adj: dict[int, list[int]] = {}
    for k, v in enumerate(xs):
        m = reach.desc[reach.index[v]] & xmask
        adj[k] = sorted(pos[i] for i in _bits(m))
    left = list(range(len(xs)))
    match = _hopcroft_karp(left, adj)

    nxt = dict(match)
    has_pred = set(match.values())
    chains = []
    for k in left:
        if k in has_pred:
            continue
        chain = [k]
        while chain[-1] in nxt:
            chain.append(nxt[chain[-1]])
        chains.append([xs[i] for i in chain])

    # Koenig: alternating reachability from unmatched left vertices
    match_r = {b: a for a, b in match.items()}
    vis_l = set()
    vis_r = set()
    q = deque(u for u in left if u not in match)
    vis_l.update(q)
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v in vis_r:
                continue
            vis_r.add(v)
            w = match_r.get(v)
            if w is not None and w not in vis_l:
                vis_l.add(w)
                q.append(w)
    # cover = (L - vis_l) | (R & vis_r); antichain = vertices in neither side
    antichain = [xs[k] for k in left if k in vis_l and k not in vis_r]
    return chains, antichain


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _ordered(g: Dag, x: Iterable[str]) -> list[str]:
    x = set(x)
    missing = x - set(g.index)
    if missing:
        raise GraphError(f"vertices not in graph: {sorted(missing)[:5]}")
    return [v for v in g.vertices if v in x]


def chain_cover(g: Dag, x: Iterable[str], reach: Reachability | None = None) -> ChainCover:
    """Minimum chain cover of ``x`` (Dilworth) via bipartite matching."""
    xs = _ordered(g, x)
    reach = reach or transitive_closure(g)
    chains, _ = _cover_and_antichain(reach, xs)
    # chains come out in topological order because matches follow reachability
    return ChainCover(frozenset(xs), chains)


def subset_width(
    g: Dag, x: Iterable[str], reach: Reachability | None = None
) -> tuple[int, list[str]]:
    """``w(x)`` and a maximum antichain of ``x``."""
    xs = _ordered(g, x)
    reach = reach or transitive_closure(g)
    chains, antichain = _cover_and_antichain(reach, xs)
    if len(chains) != len(antichain):
        raise AssertionError("chain cover and antichain sizes disagree")
    return len(antichain), antichain


def subset_height(g: Dag, x: Iterable[str]) -> tuple[int, list[str]]:
    """``h(x)``: most ``x``-vertices on one directed path, with that chain."""
    xs = set(_ordered(g, x))
    if not xs:
        return 0, []
    idx = g.index
    best: dict[str, int] = {}
    back: dict[str, str | None] = {}
    for v in g.topological_order():
        b, arg = 0, None
        for u in g.predecessors(v):
            if best[u] > b or (best[u] == b and arg is not None and idx[u] < idx[arg]):
                b, arg = best[u], u
        best[v] = b + (v in xs)
        back[v] = arg
    top = max(g.vertices, key=lambda v: (best[v], -idx[v]))
    chain = []
    v: str | None = top
    while v is not None:
        if v in xs:
            chain.append(v)
        v = back[v]
    chain.reverse()
    return best[top], chain


# ---------------------------------------------------------------------------
# Embedded st-graphs
# ---------------------------------------------------------------------------


@dataclass
class Diagnostics:
    ok: bool
    code: str | None = None
    message: str = ""
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


PASS = Diagnostics(True)


def _fail(code: str, message: str, witness: object = None) -> Diagnostics:
    return Diagnostics(False, code, message, witness)


@dataclass(frozen=True, eq=False)
class RotationSystem:
    """Clockwise incident-edge cycles plus an outer-face anchor edge.

    The outer face is the face traversed by the anchor edge in its own
    direction (tail toward head).
    """

    cycles: Mapping[str, tuple[int, ...]]
    outer_anchor: int | None = None

    def __init__(self, cycles: Mapping[str, Sequence[int]], outer_anchor: int | None = None):
        object.__setattr__(self, "cycles", {v: tuple(c) for v, c in cycles.items()})
        object.__setattr__(self, "outer_anchor", outer_anchor)

    def __getitem__(self, v: str) -> tuple[int, ...]:
        return self.cycles[v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RotationSystem):
            return NotImplemented
        return dict(self.cycles) == dict(other.cycles) and self.outer_anchor == other.outer_anchor

    @cached_property
    def position(self) -> dict[str, dict[int, int]]:
        return {v: {e: i for i, e in enumerate(c)} for v, c in self.cycles.items()}


def trace_faces(
    edges: Sequence[tuple[str, str]], cycles: Mapping[str, Sequence[int]]
) -> list[list[tuple[int, str]]]:
    """All faces as lists of darts ``(edge, toward_vertex)``.

    From dart ``(e, v)`` the walk leaves ``v`` along the edge immediately
    clockwise after ``e``.
    """
    pos = {v: {e: i for i, e in enumerate(c)} for v, c in cycles.items()}
    seen: set[tuple[int, str]] = set()
    faces = []
    for e, (a, b) in enumerate(edges):
        for start in ((e, b), (e, a)):
            if start in seen:
                continue
            face = []
            dart = start
            while dart not in seen:
                seen.add(dart)
                face.append(dart)
                f, v = dart
                cyc = cycles[v]
                nxt = cyc[(pos[v][f] + 1) % len(cyc)]
                x, y = edges[nxt]
                dart = (nxt, y if x == v else x)
            faces.append(face)
    return faces


def _components(g: Dag) -> list[set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for u, v in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    comps, seen = [], set()
    for r in g.vertices:
        if r in seen:
            continue
        comp = {r}
        stack = [r]
        while stack:
            for w in adj[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def check_rotation(g: Dag, rotation: RotationSystem) -> Diagnostics:
    """Rotation consistency, bimodality and the Euler formula."""
    for v in g.vertices:
        cyc = rotation.cycles.get(v)
        expect = sorted(g.out_edges[v] + g.in_edges[v])
        if cyc is None or sorted(cyc) != expect:
            return _fail("rotation-mismatch", f"rotation at {v!r} does not list its edges", v)
    for v in g.vertices:
        cyc = rotation[v]
        if len(cyc) < 3:
            continue
        kinds = [g.edges[e][0] == v for e in cyc]
        changes = sum(kinds[i] != kinds[i - 1] for i in range(len(kinds)))
        if changes > 2:
            return _fail("not-bimodal", f"incoming and outgoing edges interleave at {v!r}", v)
    faces = trace_faces(g.edges, rotation.cycles)
    comps = _components(g)
    comp_of = {v: k for k, c in enumerate(comps) for v in c}
    nf = [0] * len(comps)
    ne = [0] * len(comps)
    for face in faces:
        e = face[0][0]
        nf[comp_of[g.edges[e][0]]] += 1
    for u, _ in g.edges:
        ne[comp_of[u]] += 1
    for k, comp in enumerate(comps):
        f = nf[k] if ne[k] else 1
        if len(comp) - ne[k] + f != 2:
            return _fail(
                "euler",
                f"component of {min(comp)!r}: V-E+F = {len(comp) - ne[k] + f}, not 2",
                sorted(comp)[:5],
            )
    return PASS


@dataclass(frozen=True, eq=False)
class EmbeddedStGraph:
    dag: Dag
    rotation: RotationSystem
    s: str
    t: str
    meta: dict = field(default_factory=dict, compare=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddedStGraph):
            return NotImplemented
        return (
            self.dag == other.dag
            and self.rotation == other.rotation
            and (self.s, self.t) == (other.s, other.t)
        )

    def __repr__(self) -> str:
        return f"EmbeddedStGraph(|V|={len(self.dag.vertices)}, |E|={len(self.dag.edges)}, s={self.s!r}, t={self.t!r})"

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.dag.vertices

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return self.dag.edges

    @cached_property
    def reach(self) -> Reachability:
        return transitive_closure(self.dag)

    @cached_property
    def faces(self) -> list[list[tuple[int, str]]]:
        return trace_faces(self.dag.edges, self.rotation.cycles)

    @cached_property
    def outer_face(self) -> list[tuple[int, str]]:
        return self.faces[self._outer_face_index]

    @cached_property
    def _outer_face_index(self) -> int:
        anchor = self.anchor
        if anchor is None:
            return -1
        dart = (anchor, self.dag.edges[anchor][1])
        for k, face in enumerate(self.faces):
            if dart in face:
                return k
        raise GraphError("outer face anchor not found")

    @property
    def anchor(self) -> int | None:
        if self.rotation.outer_anchor is not None:
            return self.rotation.outer_anchor
        if not self.dag.edges:
            return None
        return self.rotation[self.s][0] if self.rotation[self.s] else None

    def outer_vertices(self) -> set[str]:
        if not self.dag.edges:
            return set(self.dag.vertices)
        return {v for _, v in self.outer_face}

    @cached_property
    def _lr(self) -> tuple[dict[str, list[int]], dict[str, list[int]]]:
        """Outgoing and incoming edges of every vertex, each left to right."""
        g = self.dag
        outs: dict[str, list[int]] = {}
        ins: dict[str, list[int]] = {}
        outer = self.outer_face if g.edges else []
        corner: dict[str, tuple[int, int]] = {}
        for k, (e, v) in enumerate(outer):
            corner.setdefault(v, (e, outer[(k + 1) % len(outer)][0]))
        for v in g.vertices:
            cyc = list(self.rotation[v])
            if not cyc:
                outs[v], ins[v] = [], []
                continue
            is_out = [g.edges[e][0] == v for e in cyc]
            if all(is_out) or not any(is_out):
                # single arc: start right after the outer corner
                if v in corner:
                    start = cyc.index(corner[v][1])
                else:
                    start = 0
                cyc = cyc[start:] + cyc[:start]
                if all(is_out):
                    outs[v], ins[v] = cyc, []
                else:
                    outs[v], ins[v] = [], cyc[::-1]
                continue
            n = len(cyc)
            start = next(i for i in range(n) if is_out[i] and not is_out[i - 1])
            cyc = cyc[start:] + cyc[:start]
            k = sum(is_out)
            outs[v] = cyc[:k]
            ins[v] = cyc[k:][::-1]
        return outs, ins

    def out_lr(self, v: str) -> list[int]:
        return self._lr[0][v]

    def in_lr(self, v: str) -> list[int]:
        return self._lr[1][v]


def validate_embedding(g: EmbeddedStGraph) -> Diagnostics:
    dag = g.dag
    problem = dag.structural_problem()
    if problem is not None:
        return _fail(*problem)
    if not dag.is_acyclic():
        return _fail("cycle", "graph has a directed cycle", find_cycle(dag))
    rot = check_rotation(dag, g.rotation)
    if not rot:
        return rot
    if g.s not in dag.index or g.t not in dag.index:
        return _fail("st-missing", "s or t is not a vertex", (g.s, g.t))
    sources, sinks = dag.sources(), dag.sinks()
    if sources != [g.s]:
        return _fail("source-not-unique", f"sources are {sources[:5]}, expected [{g.s!r}]", sources)
    if sinks != [g.t]:
        return _fail("sink-not-unique", f"sinks are {sinks[:5]}, expected [{g.t!r}]", sinks)
    if len(_components(dag)) > 1:
        return _fail("disconnected", "st-graph must be connected", None)
    if dag.edges:
        anchor = g.anchor
        if anchor is None or not 0 <= anchor < len(dag.edges):
            return _fail("bad-anchor", "outer face anchor is not an edge", anchor)
        outer = g.outer_vertices()
        for v in (g.s, g.t):
            if v not in outer:
                return _fail("st-not-outer", f"{v!r} is not on the outer face", v)
    return PASS


def require_valid(g: EmbeddedStGraph) -> EmbeddedStGraph:
    diag = validate_embedding(g)
    if not diag:
        raise GraphError(f"{diag.code}: {diag.message}")
    return g


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def rotation_from_positions(
    vertices: Sequence[str],
    edges: Sequence[tuple[str, str]],
    pos: Mapping[str, tuple[float, float]],
) -> dict[str, list[int]]:
    """Clockwise rotation of a straight-line drawing, starting at the leftmost outgoing edge."""
    import math

    inc: dict[str, list[tuple[float, int]]] = {v: [] for v in vertices}
    for i, (u, v) in enumerate(edges):
        for a, b in ((u, v), (v, u)):
            dx = pos[b][0] - pos[a][0]
            dy = pos[b][1] - pos[a][1]
            ang = math.atan2(dy, dx)
            # clockwise from straight left (angle pi) downward through 0
            inc[a].append((-ang if ang > -math.pi else math.pi, i))
    cycles = {}
    for v in vertices:
        cyc = [e for _, e in sorted(inc[v])]
        outs = [k for k, e in enumerate(cyc) if edges[e][0] == v]
        ins = [k for k, e in enumerate(cyc) if edges[e][1] == v]
        if outs and ins:
            n = len(cyc)
            start = next(
                (k for k in range(n) if edges[cyc[k]][0] == v and edges[cyc[k - 1]][1] == v), 0
            )
            cyc = cyc[start:] + cyc[:start]
        cycles[v] = cyc
    return cycles


def embedded_from_positions(
    vertices: Sequence[str],
    edges: Sequence[tuple[str, str]],
    pos: Mapping[str, tuple[float, float]],
    s: str,
    t: str,
    meta: dict | None = None,
) -> EmbeddedStGraph:
    cycles = rotation_from_positions(vertices, edges, pos)
    anchor = cycles[s][0] if cycles[s] else None
    return EmbeddedStGraph(Dag(vertices, edges), RotationSystem(cycles, anchor), s, t, meta or {})


def augment_to_st(g: Dag, rotation: RotationSystem) -> EmbeddedStGraph:
    """Extend ``g`` to a planar st-graph by adding edges inside faces.

    Fresh vertices ``__s__``/``__t__`` are added when ``g`` has several
    sources/sinks or several components; remaining extra sources and sinks
    are joined to a vertex of an incident face.  Bimodality and planarity
    are preserved; the result is validated before it is returned.
    """
    from .embedding_ops import augment_to_st as _impl

    return _impl(g, rotation)
