"""Graph families: upward grids, N-grids, G_k, standalone fences, random st-graphs."""

from __future__ import annotations

import random

from .embedding_ops import WorkGraph
from .graph_core import Dag, EmbeddedStGraph, embedded_from_positions


def grid_name(l: int, r: int) -> str:
    return f"{l},{r}"


def n_name(kind: str, l: int, r: int) -> str:
    return f"{kind}{l},{r}"


def _grid_parts(n: int):
    vertices, edges, pos = [], [], {}
    for l in range(1, n + 1):
        for r in range(1, n + 1):
            v = grid_name(l, r)
            vertices.append(v)
            pos[v] = (float(r - l), float(l + r))
    for l in range(1, n + 1):
        for r in range(1, n + 1):
            v = grid_name(l, r)
            if l < n:
                edges.append((v, grid_name(l + 1, r)))
            if l < n and r < n:
                edges.append((v, grid_name(l + 1, r + 1)))
            if r < n:
                edges.append((v, grid_name(l, r + 1)))
    return vertices, edges, pos


def grid_levels(n: int) -> dict[int, list[str]]:
    return {
        h: [grid_name(l, h - l) for l in range(max(1, h - n), min(n, h - 1) + 1)]
        for h in range(2, 2 * n + 1)
    }


def gen_upward_grid(n: int) -> EmbeddedStGraph:
    """Γ_n with levels in ``meta["levels"]``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vertices, edges, pos = _grid_parts(n)
    meta = {"family": "grid", "n": n, "levels": grid_levels(n)}
    return embedded_from_positions(vertices, edges, pos, grid_name(1, 1), grid_name(n, n), meta)


def gen_n_grid(n: int) -> EmbeddedStGraph:
    """N_n: Γ_n plus one three-edge N-vertex per triangular face."""
    if n < 1:
        raise ValueError("n must be >= 1")
    vertices, edges, pos = _grid_parts(n)
    nverts = []
    for l in range(1, n):
        for r in range(1, n):
            x0, y0 = float(r - l), float(l + r)
            p, pl, pr, pt = (grid_name(l, r), grid_name(l + 1, r),
                             grid_name(l, r + 1), grid_name(l + 1, r + 1))
            if (l - r) % 2 == 0:
                a, b = n_name("a", l, r), n_name("b", l, r)
                pos[a] = (x0 - 1 / 3, y0 + 0.9)
                pos[b] = (x0 + 1 / 3, y0 + 1.1)
                edges += [(p, a), (a, pl), (a, pt), (p, b), (pr, b), (b, pt)]
                nverts += [a, b]
            else:
                c, d = n_name("c", l, r), n_name("d", l, r)
                pos[c] = (x0 + 1 / 3, y0 + 0.9)
                pos[d] = (x0 - 1 / 3, y0 + 1.1)
                edges += [(p, c), (c, pr), (c, pt), (p, d), (pl, d), (d, pt)]
                nverts += [c, d]
    vertices += nverts
    meta = {"family": "ngrid", "n": n, "levels": grid_levels(n), "n_vertices": nverts}
    return embedded_from_positions(vertices, edges, pos, grid_name(1, 1), grid_name(n, n), meta)


def gen_gk(k: int) -> Dag:
    """Path l1..lk r1..rk plus the edges (l_i, r_i).

    Not upward planar, so no rotation is attached.  The Hamiltonian path
    leaves a single topological order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ls = [f"l{i}" for i in range(1, k + 1)]
    rs = [f"r{i}" for i in range(1, k + 1)]
    path = ls + rs
    edges = list(zip(path, path[1:]))
    edges += [(ls[i], rs[i]) for i in range(k) if (ls[i], rs[i]) not in edges]
    return Dag(path, edges)


def gen_fence(k: int) -> EmbeddedStGraph:
    """Standalone k-fence: chains w_1..w_k and v_1..v_k with fence edges w_i -> v_i."""
    ws = [f"w{i}" for i in range(1, k + 1)]
    vs = [f"v{i}" for i in range(1, k + 1)]
    edges = list(zip(ws, ws[1:])) + list(zip(vs, vs[1:])) + [(ws[i], vs[i]) for i in range(k)]
    dag = Dag(ws + vs, edges)
    meta = {"family": "fence", "k": k, "upper": vs, "lower": ws}
    return _ladder_embedding(dag, ws, vs, meta)


def _ladder_embedding(dag: Dag, ws, vs, meta) -> EmbeddedStGraph:
    pos = {}
    for i, w in enumerate(ws):
        pos[w] = (float(i), float(i))
    for i, v in enumerate(vs):
        pos[v] = (float(i) - 0.5, float(i) + 0.5)
    return embedded_from_positions(dag.vertices, dag.edges, pos, ws[0], vs[-1], meta)


def gen_random_st(n: int, density: float = 0.5, seed: int = 0) -> EmbeddedStGraph:
    """Seeded random planar st-graph on ``n`` vertices.

    Grows a triangle by subdividing random edges; after each subdivision a
    chord is added with probability ``density`` in each inner face incident
    to the new vertex.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = random.Random(seed)
    w = WorkGraph()
    w.s, w.t = "s", "t"
    w.add_vertex("s")
    w.add_vertex("t")
    if n == 2:
        e = w._new_edge("s", "t")
        w.rot["s"], w.rot["t"] = [e], [e]
        w.anchor = e
        g, _ = w.freeze({"family": "random", "n": n, "seed": seed, "density": density})
        return g
    w.add_vertex("v0")
    e_sa = w._new_edge("s", "v0")
    e_st = w._new_edge("s", "t")
    e_at = w._new_edge("v0", "t")
    w.rot["s"] = [e_sa, e_st]
    w.rot["v0"] = [e_at, e_sa]
    w.rot["t"] = [e_st, e_at]
    w.anchor = e_sa
    for k in range(1, n - 2):
        e = rng.choice(sorted(w.edges))
        z, e1, e2 = w.subdivide(e, f"v{k}")
        outer = set(w.face_of(w.anchor, w.edges[w.anchor][1]))
        for dart in ((e1, z), (e2, z)):
            if dart in outer or rng.random() >= density:
                continue
            face = w.face_of(*dart)
            _random_chord(w, face, z, rng)
            outer = set(w.face_of(w.anchor, w.edges[w.anchor][1]))
    g, _ = w.freeze({"family": "random", "n": n, "seed": seed, "density": density})
    return g


def _face_chains(w: WorkGraph, face):
    """Split a face walk into its source, sink and the vertices of each side."""
    n = len(face)
    verts = [v for _, v in face]
    fwd = [w.edges[e][1] == v for e, v in face]
    # the source of the face: arrived at backward, leaves forward
    src = next(k for k in range(n) if not fwd[k] and fwd[(k + 1) % n])
    snk = next(k for k in range(n) if fwd[k] and not fwd[(k + 1) % n])
    side: dict[str, tuple[int, int]] = {}
    k, pos = (src + 1) % n, 1
    while k != snk:
        side[verts[k]] = (0, pos)
        k, pos = (k + 1) % n, pos + 1
    k, pos = (snk + 1) % n, 1
    while k != src:
        side[verts[k]] = (1, -pos)
        k, pos = (k + 1) % n, pos + 1
    return verts[src], verts[snk], side


def _random_chord(w: WorkGraph, face, z: str, rng: random.Random) -> None:
    s_f, t_f, side = _face_chains(w, face)
    n = len(face)
    kz = next(k for k in range(n) if face[k][1] == z)
    options = []
    for k in range(n):
        v = face[k][1]
        if v == z or (z, v) in w.by_pair or (v, z) in w.by_pair:
            continue
        options.append(k)
    if not options:
        return
    k = rng.choice(options)
    v = face[k][1]
    if v == s_f:
        tail, head = v, z
    elif v == t_f:
        tail, head = z, v
    elif side[v][0] == side[z][0]:
        tail, head = (z, v) if side[z][1] < side[v][1] else (v, z)
    else:
        tail, head = (z, v) if rng.random() < 0.5 else (v, z)
    at = {z: ("after", face[kz][0]), v: ("after", face[k][0])}
    w.insert_edge(tail, head, at[tail], at[head])
