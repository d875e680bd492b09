import itertools
import random

import pytest

from uplift.graph_core import Dag


def random_dag(rng: random.Random, n: int, p: float) -> Dag:
    names = [f"x{i}" for i in range(n)]
    edges = [(names[i], names[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Dag(names, edges)


def brute_width(reach, xs) -> int:
    xs = list(xs)
    for size in range(len(xs), 0, -1):
        for sub in itertools.combinations(xs, size):
            if all(not reach.comparable(a, b) for a, b in itertools.combinations(sub, 2)):
                return size
    return 0


@pytest.fixture
def rng():
    return random.Random(12345)
