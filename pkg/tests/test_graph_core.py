import random

import networkx as nx
import pytest

from conftest import brute_width, random_dag
from uplift.embedding_ops import augment_to_st
from uplift.generators import gen_n_grid, gen_random_st, gen_upward_grid, grid_levels
from uplift.graph_core import (
    CycleError,
    Dag,
    EmbeddedStGraph,
    GraphError,
    RotationSystem,
    chain_cover,
    find_cycle,
    rotation_from_positions,
    subset_height,
    subset_width,
    transitive_closure,
    validate_embedding,
)


def test_closure_small_cases():
    r = transitive_closure(Dag("st", [("s", "t")]))
    assert r.precedes("s", "t") and not r.precedes("t", "s")
    r = transitive_closure(Dag("abc", [("a", "b"), ("b", "c")]))
    assert r.precedes("a", "c")
    g = gen_upward_grid(2)
    r = g.reach
    assert not r.comparable("1,2", "2,1")
    assert r.precedes("1,1", "2,2")


@pytest.mark.parametrize("seed", range(20))
def test_closure_matches_networkx(seed):
    g = random_dag(random.Random(seed), 15, 0.2)
    r = transitive_closure(g)
    nxg = nx.DiGraph(list(g.edges))
    nxg.add_nodes_from(g.vertices)
    want = {(u, v) for u in g.vertices for v in nx.descendants(nxg, u)}
    assert r.pairs() == want


def test_cycle_detection():
    g = Dag("abc", [("a", "b"), ("b", "c"), ("c", "a")])
    assert not g.is_acyclic()
    cyc = find_cycle(g)
    assert cyc[0] == cyc[-1] and len(cyc) == 4
    with pytest.raises(CycleError):
        g.topological_order()


def test_width_and_height_examples():
    g2, g3, g4 = gen_upward_grid(2), gen_upward_grid(3), gen_upward_grid(4)
    assert subset_width(g2.dag, {"1,1", "2,2"})[0] == 1
    assert subset_width(g2.dag, grid_levels(2)[3])[0] == 2
    w, anti = subset_width(g4.dag, g4.vertices)
    assert w == 4 and brute_width(g4.reach, anti) == 4
    assert subset_height(g3.dag, ["2,2"])[0] == 1
    h, chain = subset_height(g3.dag, g3.vertices)
    assert h == 5 and all(g3.reach.precedes(a, b) for a, b in zip(chain, chain[1:]))
    assert subset_height(g4.dag, grid_levels(4)[5])[0] == 1


def test_chain_cover_examples():
    g = gen_upward_grid(2)
    assert len(chain_cover(g.dag, ["1,1", "1,2", "2,2"])) == 1
    cover = chain_cover(g.dag, grid_levels(2)[3])
    assert sorted(map(len, cover.chains)) == [1, 1]


@pytest.mark.parametrize("seed", range(25))
def test_chain_cover_matches_brute_force(seed):
    rng = random.Random(seed)
    g = gen_random_st(30, 0.5, seed)
    x = rng.sample(list(g.vertices), rng.randint(1, 10))
    cover = chain_cover(g.dag, x)
    members = [v for c in cover.chains for v in c]
    assert sorted(members) == sorted(x)
    for c in cover.chains:
        assert all(g.reach.precedes(a, b) for a, b in zip(c, c[1:]))
    # Dilworth: minimum cover size equals maximum antichain
    assert len(cover) == brute_width(g.reach, x) == subset_width(g.dag, x)[0]


def test_generated_graphs_validate():
    for g in [gen_upward_grid(n) for n in range(1, 7)] + [gen_n_grid(n) for n in range(1, 6)]:
        assert validate_embedding(g), validate_embedding(g).message
    for seed in range(200):
        g = gen_random_st(random.Random(seed).randint(2, 80), 0.6, seed)
        assert validate_embedding(g)


def test_bimodality_violation_reported():
    # the centre of the 3x3 grid has three incoming and three outgoing edges
    g = gen_upward_grid(3)
    cyc = list(g.rotation["2,2"])
    outs = [e for e in cyc if g.edges[e][0] == "2,2"]
    ins = [e for e in cyc if g.edges[e][1] == "2,2"]
    bad = dict(g.rotation.cycles)
    bad["2,2"] = [outs[0], ins[0], outs[1], ins[1], outs[2], ins[2]]
    h = EmbeddedStGraph(g.dag, RotationSystem(bad, g.anchor), g.s, g.t)
    diag = validate_embedding(h)
    assert diag.code == "not-bimodal" and diag.witness == "2,2"


def test_two_vertex_rotation_change_breaks_faces():
    g = gen_upward_grid(2)
    bad = dict(g.rotation.cycles)
    cyc = list(bad["1,1"])
    bad["1,1"] = [cyc[1], cyc[0], cyc[2]]
    diag = validate_embedding(EmbeddedStGraph(g.dag, RotationSystem(bad, g.anchor), g.s, g.t))
    assert not diag


def test_parallel_edges_rejected():
    dag = Dag("st", [("s", "t"), ("s", "t")])
    g = EmbeddedStGraph(dag, RotationSystem({"s": [0, 1], "t": [1, 0]}, 0), "s", "t")
    assert validate_embedding(g).code == "parallel-edge"


def test_augment_identity_on_st_graph():
    g = gen_upward_grid(3)
    h = augment_to_st(g.dag, g.rotation)
    assert h.dag == g.dag and (h.s, h.t) == (g.s, g.t)


def _check_augmented(base: Dag, h: EmbeddedStGraph):
    assert validate_embedding(h), validate_embedding(h).message
    assert set(base.vertices) <= set(h.vertices)
    assert set(base.edges) <= set(h.edges)


def test_augment_two_disjoint_edges():
    pos = {"a": (0.0, 0.0), "b": (0.0, 1.0), "c": (1.0, 0.0), "d": (1.0, 1.0)}
    edges = [("a", "b"), ("c", "d")]
    rot = RotationSystem(rotation_from_positions(list(pos), edges, pos), None)
    base = Dag(list(pos), edges)
    _check_augmented(base, augment_to_st(base, rot))


def test_augment_two_sinks():
    pos = {"a": (0.0, 0.0), "b": (-1.0, 1.0), "c": (1.0, 1.0)}
    edges = [("a", "b"), ("a", "c")]
    base = Dag(list(pos), edges)
    _check_augmented(base, augment_to_st(base, RotationSystem(rotation_from_positions(list(pos), edges, pos), None)))


@pytest.mark.parametrize("seed", range(60))
def test_augment_random_subgraphs(seed):
    rng = random.Random(seed)
    g = gen_random_st(rng.randint(4, 40), 0.7, seed)
    keep = [i for i in range(len(g.edges)) if rng.random() < 0.7]
    edges = [g.edges[i] for i in keep]
    remap = {old: new for new, old in enumerate(keep)}
    rot = RotationSystem({v: [remap[e] for e in g.rotation[v] if e in remap] for v in g.vertices}, None)
    base = Dag(g.vertices, edges)
    _check_augmented(base, augment_to_st(base, rot))


def test_dag_rejects_bad_edges():
    with pytest.raises(GraphError):
        Dag("ab", [("a", "z")]).check()
    with pytest.raises(GraphError):
        Dag("ab", [("a", "a")]).check()
