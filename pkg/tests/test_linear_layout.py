import itertools
import random
from collections import Counter

import networkx as nx
import pytest

from conftest import random_dag
from uplift.generators import gen_fence, gen_gk, gen_n_grid, gen_upward_grid
from uplift.graph_core import Dag
from uplift.linear_layout import (
    BookEmbedding,
    UniformOrderSampler,
    brute_force_pn,
    brute_force_tn,
    color_pages,
    edges_cross,
    has_twist,
    is_topological,
    iter_topological_orders,
    max_twist,
    random_topological_order,
    validate_book_embedding,
)


def subset_twist(order, edges) -> int:
    best = 0
    for k in range(1, len(edges) + 1):
        hit = any(
            all(edges_cross(order, a, b) for a, b in itertools.combinations(sub, 2))
            for sub in itertools.combinations(edges, k)
        )
        if not hit:
            break
        best = k
    return best


def test_edges_cross_basic():
    order = ["p1", "p2", "p3", "p4"]
    assert edges_cross(order, ("p1", "p3"), ("p2", "p4"))
    assert not edges_cross(order, ("p1", "p4"), ("p2", "p3"))
    assert not edges_cross(order, ("p1", "p2"), ("p2", "p3"))


def test_gk_twist_and_pages():
    g = gen_gk(4)
    order = g.topological_order()
    k, wit = max_twist(order, g.edges)
    assert k == 4
    assert {g.edges[i] for i in wit} == {(f"l{i}", f"r{i}") for i in range(1, 5)}
    assert max_twist(order, [g.edges[0]])[0] == 1
    be = color_pages(order, g.edges)
    assert be.page_count == 4 and validate_book_embedding(g, be)


@pytest.mark.parametrize("seed", range(60))
def test_max_twist_matches_subset_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 10)
    order = [f"p{i}" for i in range(n)]
    pairs = list(itertools.combinations(order, 2))
    edges = rng.sample(pairs, min(len(pairs), rng.randint(1, 12)))
    k, wit = max_twist(order, edges)
    assert k == subset_twist(order, edges)
    chosen = [edges[i] for i in wit]
    assert len(chosen) == k
    assert all(edges_cross(order, a, b) for a, b in itertools.combinations(chosen, 2))
    assert has_twist(order, edges, k) and not has_twist(order, edges, k + 1)


def test_color_pages_small_cases():
    order = list("abcdef")
    nested = [("a", "f"), ("b", "e"), ("c", "d")]
    assert color_pages(order, nested).page_count == 1
    assert color_pages(order, []).page_count == 0


def test_validator_reports_problems():
    g = gen_gk(4)
    order = g.topological_order()
    be = color_pages(order, g.edges)
    fence = [g.edges.index((f"l{i}", f"r{i}")) for i in (1, 2)]
    merged = dict(be.page_of)
    merged[fence[1]] = merged[fence[0]]
    assert validate_book_embedding(g, BookEmbedding(be.spine, merged)).code == "same-page-crossing"
    rev = list(be.spine)
    rev[0], rev[1] = rev[1], rev[0]
    assert validate_book_embedding(g, BookEmbedding(tuple(rev), be.page_of)).code == "non-topological"
    missing = {e: p for e, p in be.page_of.items() if e}
    assert validate_book_embedding(g, BookEmbedding(be.spine, missing)).code == "unassigned"


@pytest.mark.parametrize("seed", range(20))
def test_color_pages_always_valid(seed):
    g = random_dag(random.Random(seed), 14, 0.3)
    order = random_topological_order(g, random.Random(seed))
    be = color_pages(order, g.edges)
    assert validate_book_embedding(g, be)
    assert be.page_count >= max_twist(order, g.edges)[0]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_gk_exact_numbers(k):
    g = gen_gk(k)
    tn, pn = brute_force_tn(g), brute_force_pn(g)
    assert (tn.value, tn.exact) == (k, True)
    assert (pn.value, pn.exact) == (k, True)


def test_small_exact_numbers():
    path = Dag([f"p{i}" for i in range(5)], [(f"p{i}", f"p{i + 1}") for i in range(4)])
    assert brute_force_tn(path).value == 1
    star = Dag(["c", "x", "y", "z"], [("c", "x"), ("c", "y"), ("c", "z")])
    assert brute_force_pn(star).value == 1
    g2 = gen_upward_grid(2).dag
    tn, pn = brute_force_tn(g2), brute_force_pn(g2)
    assert tn.exact and pn.exact and tn.value <= pn.value
    n2 = gen_n_grid(2).dag
    assert brute_force_tn(n2).value <= brute_force_pn(n2).value


def test_three_fence_orders():
    g = gen_fence(3).dag
    res = brute_force_tn(g)
    assert res.exact
    count = 0
    for order in iter_topological_orders(g):
        pos = {v: i for i, v in enumerate(order)}
        if pos["w3"] < pos["v1"]:
            count += 1
            assert has_twist(order, g.edges, 3)
    assert count > 0


def test_order_enumeration_matches_networkx():
    g = gen_upward_grid(3).dag
    ours = {tuple(o) for o in iter_topological_orders(g)}
    nxg = nx.DiGraph(list(g.edges))
    theirs = {tuple(o) for o in nx.all_topological_sorts(nxg)}
    assert ours == theirs
    assert UniformOrderSampler(g).total == len(theirs)


def test_uniform_sampler_is_roughly_uniform():
    g = gen_upward_grid(2).dag
    sampler = UniformOrderSampler(g)
    rng = random.Random(3)
    counts = Counter(tuple(sampler.sample(rng)) for _ in range(4000))
    assert len(counts) == sampler.total == 2
    assert all(abs(c - 2000) < 200 for c in counts.values())
    for order in counts:
        assert is_topological(g, list(order))


def test_budget_exhaustion_is_flagged():
    g = gen_n_grid(3).dag
    res = brute_force_tn(g, budget=50)
    assert not res.exact
