"""Mutable embedded graph used while a construction is in progress.

Edges carry stable integer ids that survive subdivisions and insertions;
``freeze`` renumbers the surviving edges into an ``EmbeddedStGraph``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .graph_core import (
    Dag,
    EmbeddedStGraph,
    GraphError,
    RotationSystem,
    trace_faces,
    validate_embedding,
)


class WorkGraph:
    def __init__(self, g: EmbeddedStGraph | None = None):
        self.vertices: list[str] = []
        self.vset: set[str] = set()
        self.edges: dict[int, tuple[str, str]] = {}
        self.rot: dict[str, list[int]] = {}
        self.by_pair: dict[tuple[str, str], int] = {}
        # original edge index of G (or None) that each live edge descends from
        self.origin: dict[int, int | None] = {}
        self.next_id = 0
        self.anchor: int | None = None
        self.s: str | None = None
        self.t: str | None = None
        self._names: dict[str, int] = {}
        self._lr_cache: dict[str, tuple[tuple[int, ...], list[int]]] = {}
        if g is not None:
            for v in g.vertices:
                self.add_vertex(v)
            for i, (u, v) in enumerate(g.edges):
                self._new_edge(u, v, origin=i)
            for v in g.vertices:
                self.rot[v] = list(g.rotation[v])
            self.anchor = g.anchor
            self.s, self.t = g.s, g.t

    # -- basic mutation -----------------------------------------------------

    def add_vertex(self, v: str) -> str:
        if v in self.vset:
            raise GraphError(f"vertex {v!r} exists")
        self.vertices.append(v)
        self.vset.add(v)
        self.rot[v] = []
        return v

    def fresh_name(self, base: str) -> str:
        k = self._names.get(base, 0)
        while True:
            name = f"{base}.{k}"
            k += 1
            if name not in self.vset:
                self._names[base] = k
                return name

    def _new_edge(self, u: str, v: str, origin: int | None = None) -> int:
        if (u, v) in self.by_pair or (v, u) in self.by_pair:
            raise GraphError(f"edge {u!r}-{v!r} exists")
        e = self.next_id
        self.next_id += 1
        self.edges[e] = (u, v)
        self.by_pair[(u, v)] = e
        self.origin[e] = origin
        return e

    def other(self, e: int, v: str) -> str:
        a, b = self.edges[e]
        return b if a == v else a

    def subdivide(self, e: int, name: str | None = None) -> tuple[str, int, int]:
        """Split ``e = (a, b)`` into ``(a, z), (z, b)``; returns ``(z, first, second)``."""
        a, b = self.edges.pop(e)
        del self.by_pair[(a, b)]
        origin = self.origin.pop(e)
        z = self.add_vertex(name or self.fresh_name(f"sd{e}"))
        e1 = self._new_edge(a, z, origin)
        e2 = self._new_edge(z, b, origin)
        ra, rb = self.rot[a], self.rot[b]
        ra[ra.index(e)] = e1
        rb[rb.index(e)] = e2
        self.rot[z] = [e2, e1]
        if self.anchor == e:
            self.anchor = e1
        return z, e1, e2

    def insert_edge(
        self,
        tail: str,
        head: str,
        at_tail: tuple[str, int | None],
        at_head: tuple[str, int | None],
    ) -> int:
        """Add ``tail -> head``; ``at_*`` is ``("before"|"after", edge)`` in that rotation."""
        e = self._new_edge(tail, head)
        for v, (where, ref) in ((tail, at_tail), (head, at_head)):
            cyc = self.rot[v]
            if ref is None:
                cyc.append(e)
                continue
            k = cyc.index(ref)
            cyc.insert(k if where == "before" else k + 1, e)
        return e

    def cut_corner(self, v: str, e1: int, e2: int, tail: str, head: str) -> int:
        """Join the far ends of consecutive edges ``e1``, ``e2 = next_cw(e1)`` at ``v``.

        The new edge closes a triangle with the corner of ``v`` between them,
        so it lies in the face that contains that corner.
        """
        cyc = self.rot[v]
        k = cyc.index(e1)
        if cyc[(k + 1) % len(cyc)] != e2:
            raise GraphError(f"edges {e1},{e2} are not consecutive at {v!r}")
        p, q = self.other(e1, v), self.other(e2, v)
        if {tail, head} != {p, q}:
            raise GraphError("cut_corner endpoints mismatch")
        pos = {p: ("before", e1), q: ("after", e2)}
        return self.insert_edge(tail, head, pos[tail], pos[head])

    def remove_edge(self, e: int) -> None:
        a, b = self.edges.pop(e)
        del self.by_pair[(a, b)]
        self.origin.pop(e)
        self.rot[a].remove(e)
        self.rot[b].remove(e)
        if self.anchor == e:
            self.anchor = None

    # -- queries ------------------------------------------------------------

    def out_edges(self, v: str) -> list[int]:
        return [e for e in self.rot[v] if self.edges[e][0] == v]

    def in_edges(self, v: str) -> list[int]:
        return [e for e in self.rot[v] if self.edges[e][1] == v]

    def out_lr(self, v: str) -> list[int]:
        """Outgoing edges left to right."""
        cyc = self.rot[v]
        n = len(cyc)
        is_out = [self.edges[e][0] == v for e in cyc]
        if all(is_out):
            return self._source_lr(v)
        start = next(i for i in range(n) if is_out[i] and not is_out[i - 1])
        return [cyc[(start + k) % n] for k in range(sum(is_out))]

    def _source_lr(self, v: str) -> list[int]:
        # the outer face walk leaves a source along its leftmost edge
        key = tuple(self.rot[v])
        hit = self._lr_cache.get(v)
        if hit is not None and hit[0] == key:
            return hit[1]
        face = self.face_of(self.anchor, self.edges[self.anchor][1])
        n = len(face)
        k = next(k for k in range(n) if face[k][1] == v)
        first = face[(k + 1) % n][0]
        i = key.index(first)
        order = list(key[i:] + key[:i])
        self._lr_cache[v] = (key, order)
        return order

    def in_lr(self, v: str) -> list[int]:
        cyc = self.rot[v]
        n = len(cyc)
        is_in = [self.edges[e][1] == v for e in cyc]
        if all(is_in):
            raise GraphError(f"{v!r} is a sink; use the stored order")
        start = next(i for i in range(n) if is_in[i] and not is_in[i - 1])
        return [cyc[(start + k) % n] for k in range(sum(is_in))][::-1]

    def face_of(self, e: int, toward: str) -> list[tuple[int, str]]:
        """Walk the face containing dart ``(e, toward)``."""
        start = (e, toward)
        face = [start]
        dart = start
        while True:
            f, v = dart
            cyc = self.rot[v]
            nxt = cyc[(cyc.index(f) + 1) % len(cyc)]
            dart = (nxt, self.other(nxt, v))
            if dart == start:
                return face
            face.append(dart)

    def faces(self) -> list[list[tuple[int, str]]]:
        ids = sorted(self.edges)
        local = {e: i for i, e in enumerate(ids)}
        edges = [self.edges[e] for e in ids]
        cycles = {v: [local[e] for e in c] for v, c in self.rot.items()}
        return [[(ids[e], v) for e, v in f] for f in trace_faces(edges, cycles)]

    # -- export ---------------------------------------------------------------

    def freeze(self, meta: dict | None = None) -> tuple[EmbeddedStGraph, dict[int, int]]:
        ids = sorted(self.edges)
        renum = {e: i for i, e in enumerate(ids)}
        dag = Dag(self.vertices, [self.edges[e] for e in ids])
        cycles = {v: [renum[e] for e in self.rot[v]] for v in self.vertices}
        anchor = renum[self.anchor] if self.anchor is not None else None
        g = EmbeddedStGraph(dag, RotationSystem(cycles, anchor), self.s, self.t, meta or {})
        return g, renum


# ---------------------------------------------------------------------------
# st-augmentation
# ---------------------------------------------------------------------------


Corner = tuple[str, int]  # (vertex, edge arriving at it in a face walk)


def _switches(w: WorkGraph, face) -> list[tuple[int, str, bool]]:
    """Switch corners of a face walk as ``(position, vertex, is_source_switch)``."""
    out = []
    n = len(face)
    for k in range(n):
        a, v = face[k]
        b = face[(k + 1) % n][0]
        a_out = w.edges[a][0] == v
        b_out = w.edges[b][0] == v
        if a_out == b_out:
            out.append((k, v, a_out))
    return out


def _assign_large_angles(w: WorkGraph, faces, outer: int) -> set[Corner] | None:
    """Give every source and sink one large-angle corner, face capacities permitting.

    A face with 2m switch corners holds m - 1 large angles, the outer face
    m + 1.  Solved as a capacitated bipartite matching (simple augmenting paths).
    """
    cap = []
    options: dict[str, list[tuple[int, Corner]]] = {}
    for fi, face in enumerate(faces):
        sw = _switches(w, face)
        m = len(sw) // 2
        cap.append(m + 1 if fi == outer else m - 1)
        for k, v, _ in sw:
            if not w.in_edges(v) or not w.out_edges(v):
                options.setdefault(v, []).append((fi, (v, face[k][0])))
    if any(c < 0 for c in cap) or sum(cap) != len(options):
        return None
    held: list[list[str]] = [[] for _ in faces]
    choice: dict[str, tuple[int, Corner]] = {}

    def place(v: str, seen: set[int]) -> bool:
        for fi, corner in options[v]:
            if fi in seen:
                continue
            seen.add(fi)
            if len(held[fi]) < cap[fi]:
                held[fi].append(v)
                choice[v] = (fi, corner)
                return True
            for u in list(held[fi]):
                if place(u, seen):
                    held[fi].remove(u)
                    held[fi].append(v)
                    choice[v] = (fi, corner)
                    return True
        return False

    for v in sorted(options):
        if not place(v, set()):
            return None
    return {corner for _, corner in choice.values()}


def _forward_dart(w: WorkGraph, face) -> int:
    return next(e for e, v in face if w.edges[e][1] == v)


def _saturate_face(w: WorkGraph, face, large: set[Corner]) -> bool:
    """Apply one L,S,S saturation inside ``face``; False if none applies."""
    sw = _switches(w, face)
    m = len(sw)
    if m < 3:
        return False
    lab = [(v, face[k][0]) in large for k, v, _ in sw]
    for step in (1, -1):
        for i in range(m):
            j, l = (i + step) % m, (i + 2 * step) % m
            if not (lab[i] and not lab[j] and not lab[l]):
                continue
            (kx, x, x_src), (kz, z, _) = sw[i], sw[l]
            if x == z or (x, z) in w.by_pair or (z, x) in w.by_pair:
                continue
            ax, az = face[kx][0], face[kz][0]
            tail, head = (z, x) if x_src else (x, z)
            at = {x: ("after", ax), z: ("after", az)}
            w.insert_edge(tail, head, at[tail], at[head])
            large.discard((x, ax))
            return True
    return False


def _saturate_component(w: WorkGraph, comp: set[str], hint: int | None):
    """Saturate one component to a single source and sink; returns ``(s, t, anchor)``."""
    faces = [f for f in w.faces() if f[0][1] in comp]
    order = sorted(range(len(faces)), key=lambda i: -len(faces[i]))
    if hint is not None and w.edges[hint][0] in comp:
        dart = (hint, w.edges[hint][1])
        order = [next(i for i, f in enumerate(faces) if dart in f)]
    large = None
    for outer in order:
        large = _assign_large_angles(w, faces, outer)
        if large is not None:
            break
    if large is None:
        raise GraphError("embedding is not upward planar (no large-angle assignment)")
    anchor = _forward_dart(w, faces[outer])
    _saturate_inner(w, comp, anchor, large)
    outer_face = w.face_of(anchor, w.edges[anchor][1])
    sw = _switches(w, outer_face)
    if len(sw) == 2:
        ends = {is_src: v for _, v, is_src in sw}
        return ends[True], ends[False], anchor
    s, t, anchor = _frame(w, outer_face, sw, large)
    _saturate_inner(w, comp | {s, t}, anchor, large)
    return s, t, anchor


def _saturate_inner(w: WorkGraph, comp: set[str], anchor: int, large: set[Corner]) -> None:
    while True:
        outer_dart = (anchor, w.edges[anchor][1])
        for f in w.faces():
            if f[0][1] not in comp or outer_dart in f:
                continue
            if any((v, e) in large for e, v in f) and _saturate_face(w, f, large):
                break
        else:
            return


def _frame(w: WorkGraph, face, sw, large: set[Corner]):
    """Close the outer face with fresh poles joined across two adjacent large angles."""
    m = len(sw)
    for i in range(m):
        (ki, vi, src_i), (kj, vj, _) = sw[i], sw[(i + 1) % m]
        if (vi, face[ki][0]) in large and (vj, face[kj][0]) in large:
            break
    else:
        raise GraphError("outer face has no two adjacent large angles")
    (kx, x), (ky, y) = ((ki, vi), (kj, vj)) if src_i else ((kj, vj), (ki, vi))
    large.discard((x, face[kx][0]))
    large.discard((y, face[ky][0]))
    s = w.add_vertex(w.fresh_name("__s__"))
    t = w.add_vertex(w.fresh_name("__t__"))
    a = w.insert_edge(s, x, (None, None), ("after", face[kx][0]))
    b = w.insert_edge(y, t, ("after", face[ky][0]), (None, None))
    w.insert_edge(s, t, (None, None), (None, None))
    # the side holding the monotone arc between x and y becomes the outer face
    n = len(face)
    arc = {face[(ki + d) % n] for d in range(1, (kj - ki) % n + 1)}
    for dart in ((a, x), (b, t), (a, s), (b, y)):
        f = w.face_of(*dart)
        if arc & set(f):
            return s, t, _forward_dart(w, f)
    raise GraphError("frame construction failed")


def augment_to_st(g: Dag, rotation: RotationSystem) -> EmbeddedStGraph:
    from .graph_core import _components, check_rotation

    problem = g.structural_problem()
    if problem is not None:
        raise GraphError(problem[1])
    if not g.is_acyclic():
        raise GraphError("input has a directed cycle")
    diag = check_rotation(g, rotation)
    if not diag:
        raise GraphError(f"{diag.code}: {diag.message}")
    if len(g.vertices) == 1:
        v = g.vertices[0]
        return EmbeddedStGraph(g, rotation, v, v, {"augmentation": []})
    sources, sinks = g.sources(), g.sinks()
    comps = sorted(_components(g), key=lambda c: min(g.index[v] for v in c))
    if len(sources) == 1 and len(sinks) == 1 and len(comps) == 1:
        cand = EmbeddedStGraph(g, rotation, sources[0], sinks[0], {"augmentation": []})
        if validate_embedding(cand):
            return cand

    w = WorkGraph()
    for v in g.vertices:
        w.add_vertex(v)
    for u, v in g.edges:
        w._new_edge(u, v)
    for v in g.vertices:
        w.rot[v] = list(rotation[v])
    base = set(w.edges)

    poles = []
    for comp in comps:
        if len(comp) == 1:
            poles.append((next(iter(comp)),) * 2 + (None,))
        else:
            poles.append(_saturate_component(w, comp, rotation.outer_anchor))
    if len(poles) == 1:
        w.s, w.t, w.anchor = poles[0]
    else:
        s = w.add_vertex(w.fresh_name("__s__"))
        t = w.add_vertex(w.fresh_name("__t__"))
        for sc, tc, anchor in poles:
            if anchor is None:
                e1 = w.insert_edge(s, sc, (None, None), (None, None))
                w.insert_edge(sc, t, (None, None), ("before", w.rot[t][0] if w.rot[t] else None))
                continue
            face = w.face_of(anchor, w.edges[anchor][1])
            at_s = next(e for e, v in face if v == sc)
            at_t = next(e for e, v in face if v == tc)
            w.insert_edge(s, sc, (None, None), ("after", at_s))
            e2 = w._new_edge(tc, t)
            w.rot[tc].insert(w.rot[tc].index(at_t) + 1, e2)
            w.rot[t].insert(0, e2)
        w.s, w.t, w.anchor = s, t, w.rot[s][0]
    added = [w.edges[e] for e in sorted(set(w.edges) - base)]
    out, _ = w.freeze({"augmentation": added})
    diag = validate_embedding(out)
    if not diag:
        raise GraphError(f"augmentation failed ({diag.code}): {diag.message}")
    return out
