import random

import pytest

from conftest import random_dag
from uplift.fence_lab import (
    Fence,
    augment_fixpoint,
    certify_five_twist_partial,
    check_fence_twist,
    check_level_separation,
    check_separation_step,
    check_separation_twist,
    fence_problem,
    fences_brute_force,
    find_fences,
    find_minimal_cyclic,
    separating_dag,
    upper_vertex,
)
from uplift.generators import gen_fence, gen_n_grid, gen_upward_grid, grid_levels
from uplift.graph_core import Dag, transitive_closure
from uplift.linear_layout import has_twist, is_topological, iter_topological_orders, max_twist


def test_standalone_fence():
    g = gen_fence(5).dag
    found = find_fences(g, transitive_closure(g), 5)
    assert set(found) == {("v1", "w5")}
    aug = augment_fixpoint(g, 5)
    assert aug.added_edges == [("v1", "w5")] and not aug.cyclic


def test_grid_fences_match_brute_force():
    g = gen_upward_grid(3).dag
    r = transitive_closure(g)
    assert set(find_fences(g, r, 2)) == fences_brute_force(g, r, 2)


def test_path_and_tree_have_no_fences():
    path = Dag("abcdef", list(zip("abcde", "bcdef")))
    tree = Dag("rabcd", [("r", "a"), ("r", "b"), ("a", "c"), ("a", "d")])
    for g in (path, tree):
        r = transitive_closure(g)
        for k in (2, 3):
            assert not find_fences(g, r, k)
        assert not augment_fixpoint(g, 2).added


@pytest.mark.parametrize("seed", range(80))
def test_find_fences_matches_brute_force(seed):
    rng = random.Random(seed)
    g = random_dag(rng, rng.randint(4, 9), 0.35)
    if len(g.edges) > 20:
        g = Dag(g.vertices, g.edges[:20])
    r = transitive_closure(g)
    for k in (2, 3):
        found = find_fences(g, r, k)
        assert set(found) == fences_brute_force(g, r, k)
        for f in found.values():
            assert fence_problem(f, set(g.edges), r) is None


def test_fence_problem_rejects_reused_vertex():
    g = Dag("abc", [("a", "b"), ("b", "c")])
    f = Fence(("a", "b"), ("b", "c"))
    assert fence_problem(f, set(g.edges), transitive_closure(g)) == "vertices are not distinct"


def test_minimal_cyclic_instance():
    g = find_minimal_cyclic(2)
    assert g is not None and len(g.vertices) == 4
    aug = augment_fixpoint(g, 2)
    assert aug.cyclic
    cyc = aug.cycle
    assert cyc[0] == cyc[-1]
    edges = set(aug.graph().edges)
    assert all((a, b) in edges for a, b in zip(cyc, cyc[1:]))


@pytest.mark.parametrize("seed", range(25))
def test_violating_an_added_edge_forces_a_twist(seed):
    rng = random.Random(seed)
    g = random_dag(rng, rng.randint(5, 8), 0.4)
    k = 2
    aug = augment_fixpoint(g, k)
    if aug.cyclic:
        return
    # edges of the first round come straight from fences of g itself
    first = set(find_fences(g, transitive_closure(g), k))
    for order in iter_topological_orders(g, limit=300):
        pos = {v: i for i, v in enumerate(order)}
        for a, b in first:
            if pos[b] < pos[a]:
                assert has_twist(order, g.edges, k)


@pytest.mark.parametrize("seed", range(15))
def test_low_twist_orders_respect_fixpoint(seed):
    rng = random.Random(seed)
    g = random_dag(rng, rng.randint(5, 9), 0.45)
    k = 2
    aug = augment_fixpoint(g, k + 1)
    if aug.cyclic:
        return
    closed = aug.graph()
    for order in iter_topological_orders(g, limit=2000):
        if max_twist(order, g.edges)[0] <= k:
            assert is_topological(closed, order)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_fence_twist(k):
    r = check_fence_twist(k)
    assert r["ok"] and r["twist"] == k


def test_level_separation():
    g = gen_n_grid(2)
    levels = grid_levels(2)
    order = [v for h in sorted(levels) for v in levels[h]]
    order += [v for v in g.vertices if v not in order]
    assert check_level_separation(g, order)
    # N_3: (3,1) from level 4 placed before (1,2) from level 3
    g3 = gen_n_grid(3)
    head = ["1,1", "a1,1", "2,1", "3,1", "1,2"]
    bad = head + [v for v in g3.dag.topological_order() if v not in head]
    assert is_topological(g3.dag, bad)
    assert not check_level_separation(g3, bad)
    assert check_level_separation(gen_upward_grid(1), ["1,1"])


def test_separating_dag_orders_are_separating():
    g = gen_n_grid(3)
    sep = separating_dag(g)
    for order in iter_topological_orders(sep, limit=200):
        assert is_topological(g.dag, order) and check_level_separation(g, order)


def test_separation_twist_gate_and_small_case():
    assert check_separation_twist(2, 1)["ok"] is None
    r = check_separation_twist(3, 1, samples=2000, seed=4)
    assert r["ok"] and r["tested"] == 2000


def test_separation_twist_p2_sampled():
    r = check_separation_twist(10, 2, samples=40, seed=0)
    assert r["ok"]


def test_upper_vertices():
    assert upper_vertex(3, 3, 1, "right") == (3, 4)
    assert upper_vertex(3, 3, 1, "left") == (4, 3)
    assert upper_vertex(3, 3, 2, "right") == (2, 5)
    assert upper_vertex(3, 3, 2, "left") == (5, 2)


@pytest.mark.parametrize("n,i", [(2, 1), (2, 2), (3, 2), (3, 3), (4, 3)])
def test_separation_step(n, i):
    r = check_separation_step(n, i)
    assert r["ok"], r
    if i == 1:
        assert r["added"] == 0


def test_certify_budgets():
    zero = certify_five_twist_partial("zero")
    assert zero["skipped"] and zero["ok"] is None
    full = certify_five_twist_partial("default")
    assert full["ok"] and full["scope"] == "partial"
    assert "192" in full["note"]
