import random

import pytest

from uplift.generators import gen_n_grid, gen_random_st, gen_upward_grid
from uplift.graph_core import chain_cover, validate_embedding
from uplift.linear_layout import max_twist, validate_book_embedding
from uplift.width_paging import (
    apply_width_construction,
    classify_lens_edges,
    declared_labels,
    embed_width,
    extend_to_st_paths,
    find_lenses,
    paths_cross,
    reachability_preserved,
    uncross,
    width_violation,
)


def _path_ok(g, p):
    return p[0] == g.s and p[-1] == g.t and all((a, b) in set(g.edges) for a, b in zip(p, p[1:]))


@pytest.mark.parametrize("seed", range(15))
def test_cover_extends_and_uncrosses(seed):
    rng = random.Random(seed)
    g = gen_random_st(rng.randint(6, 60), 0.6, seed)
    x = rng.sample(list(g.vertices), rng.randint(1, len(g.vertices)))
    cover = extend_to_st_paths(g, chain_cover(g.dag, x))
    assert all(_path_ok(g, p) for p in cover.paths)
    assert set(x) <= {v for p in cover.paths for v in p}
    flat = uncross(g, cover)
    assert len(flat.paths) == len(cover.paths)
    assert {v for p in flat.paths for v in p} >= set(x)
    for i in range(len(flat.paths)):
        for j in range(i + 1, len(flat.paths)):
            assert not paths_cross(g, flat.paths[i], flat.paths[j])


def test_lens_edges_on_grid():
    g = gen_upward_grid(3)
    cover = uncross(g, extend_to_st_paths(g, chain_cover(g.dag, g.vertices)))
    for i in range(len(cover.paths) - 1):
        for lens in find_lenses(g, cover, i):
            cls = classify_lens_edges(g, lens)
            assert set(cls.fwd_nontransitive) <= set(cls.fwd)
            assert set(cls.bwd_nontransitive) <= set(cls.bwd)


def _check(res, orders=20):
    assert validate_embedding(res.g_prime)
    assert reachability_preserved(res) is None
    assert width_violation(res, orders=orders, seed=1) is None
    assert res.labels() <= declared_labels(res.width)
    assert res.page_count <= 14 * res.width


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_grid_full_vertex_set(n):
    res = apply_width_construction(gen_upward_grid(n), gen_upward_grid(n).vertices, paranoid=n <= 4)
    assert res.width == n
    _check(res)


@pytest.mark.parametrize("seed", range(30))
def test_random_subsets(seed):
    rng = random.Random(seed)
    g = gen_random_st(rng.randint(5, 70), rng.choice([0.3, 0.7, 1.0]), seed)
    x = rng.sample(list(g.vertices), rng.randint(1, len(g.vertices)))
    res = apply_width_construction(g, x, paranoid=seed % 6 == 0)
    _check(res)
    # every original edge inside X is paged, either as itself or via its subdivision
    got = {(u, v) for u, v, _ in res.assigned()}
    kept = set(res.g_prime.edges)
    for e in g.edges:
        if e not in kept:
            assert e in got and e in {g.edges[k] for k in res.e_delta}
        elif e[0] in res.x and e[1] in res.x:
            assert e in got


def test_subdivision_trace_walks_edges():
    g = gen_n_grid(3)
    res = apply_width_construction(g, g.vertices)
    gp = set(res.g_prime.edges)
    for e, walk in res.trace.items():
        assert (walk[0], walk[-1]) == g.edges[e]
        assert all((a, b) in gp for a, b in zip(walk, walk[1:]))


def test_empty_subset_is_trivial():
    g = gen_upward_grid(3)
    res = apply_width_construction(g, [])
    assert res.page_count == 0 and res.g_prime is g


@pytest.mark.parametrize("g", [gen_upward_grid(3), gen_n_grid(4), gen_random_st(150, 0.5, 2)])
def test_embed_width(g):
    for seed in (None, 0, 1):
        be, res = embed_width(g, seed=seed)
        assert validate_book_embedding(g.dag, be)
        assert be.page_count <= 14 * res.width
        assert be.page_count >= max_twist(be.spine, g.edges)[0]
