import itertools
import math
import random

import pytest

from uplift.generators import gen_n_grid, gen_random_st, gen_upward_grid
from uplift.graph_core import embedded_from_positions
from uplift.linear_layout import max_twist, validate_book_embedding
from uplift.sublinear_paging import default_ell, embed_sublinear, max_uncovered_path


def directed_path(n):
    vs = [f"p{i}" for i in range(n)]
    pos = {v: (0.0, float(i)) for i, v in enumerate(vs)}
    return embedded_from_positions(vs, list(zip(vs, vs[1:])), pos, vs[0], vs[-1])


def all_st_paths(g):
    out = []

    def rec(path):
        v = path[-1]
        if v == g.t:
            out.append(tuple(path))
            return
        for w in g.dag.successors(v):
            rec(path + [w])

    rec([g.s])
    return out


def test_default_ell():
    assert default_ell(2) == 2
    n = 2000
    assert default_ell(n) == math.ceil(n ** (2 / 3) / math.log2(n) ** (1 / 3))


def test_max_uncovered_path_examples():
    g = directed_path(6)
    path, count = max_uncovered_path(g, set(), g.vertices)
    assert count == 6 and path == tuple(g.vertices)
    assert max_uncovered_path(g, g.vertices, g.vertices)[1] == 0
    g3 = gen_upward_grid(3)
    path, count = max_uncovered_path(g3, {"1,1", "3,3"}, g3.vertices)
    assert count == 3 and len(path) == 5


@pytest.mark.parametrize("seed", range(15))
def test_max_uncovered_path_matches_enumeration(seed):
    rng = random.Random(seed)
    g = gen_random_st(rng.randint(4, 16), 0.6, seed)
    covered = set(rng.sample(list(g.vertices), rng.randint(0, len(g.vertices) // 2)))
    path, count = max_uncovered_path(g, covered, g.vertices)
    best = max(sum(v not in covered for v in p) for p in all_st_paths(g))
    assert count == best == sum(v not in covered for v in path)


def _check(g, be, rep):
    assert validate_book_embedding(g.dag, be)
    checks = rep.checks()
    assert all(checks.values()), checks
    assert be.page_count <= 7 * rep.t * (rep.t + 1) + rep.e_s_pages
    assert rep.e_s_pages >= rep.e_s_twist
    assert be.page_count >= max_twist(be.spine, g.edges)[0]


def test_directed_path_single_round():
    g = directed_path(8)
    be, rep = embed_sublinear(g)
    _check(g, be, rep)
    assert rep.t == 1 and rep.e_s_pages == 0 and be.page_count <= 14


@pytest.mark.parametrize("g", [gen_upward_grid(6), gen_n_grid(4), gen_upward_grid(9)], ids=["grid6", "ngrid4", "grid9"])
def test_grids(g):
    be, rep = embed_sublinear(g, paranoid=len(g.vertices) < 60)
    _check(g, be, rep)
    assert rep.t <= math.ceil(len(g.vertices) / rep.ell)


@pytest.mark.parametrize("seed", range(6))
def test_random_graphs(seed):
    g = gen_random_st(80 + 40 * seed, 0.5, seed)
    be, rep = embed_sublinear(g)
    _check(g, be, rep)
    d = rep.to_dict()
    assert set(d) >= {"n", "ell", "t", "rounds", "e_s_twist", "total_pages", "bounds"}
    assert set(d["bounds"]) >= {"7t(t+1)", "4ell"}


def test_spine_respects_reachability():
    g = gen_n_grid(3)
    be, _ = embed_sublinear(g, ell=3)
    pos = {v: i for i, v in enumerate(be.spine)}
    for u, v in itertools.product(g.vertices, repeat=2):
        if g.reach.precedes(u, v):
            assert pos[u] < pos[v]


def test_ell_override_and_cap():
    g = gen_upward_grid(6)
    be, rep = embed_sublinear(g, ell=2)
    _check(g, be, rep)
    be, rep = embed_sublinear(g, ell=2, max_vertices=40)
    assert rep.capped
    assert validate_book_embedding(g.dag, be)
