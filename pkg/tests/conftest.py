from __future__ import annotations

import random

import pytest

from chainrank import Instance, make_instance


def figure_one() -> Instance:
    """Three students answering prefixes of lengths 2, 4, 5 over five
    questions; the canonical tiny ideal instance."""
    edges = [(1, q) for q in (1, 2)]
    edges += [(2, q) for q in (1, 2, 3, 4)]
    edges += [(3, q) for q in (1, 2, 3, 4, 5)]
    return make_instance(3, 5, edges)


@pytest.fixture
def fig1() -> Instance:
    return figure_one()


def random_instance(
    rng: random.Random,
    max_side: int = 6,
    density: float | None = None,
    with_orders: bool = True,
) -> Instance:
    n = rng.randint(1, max_side)
    m = rng.randint(1, max_side)
    p = density if density is not None else rng.choice([0.2, 0.5, 0.8])
    edges = [
        (s, q)
        for s in range(1, n + 1)
        for q in range(1, m + 1)
        if rng.random() < p
    ]
    so = tuple(rng.sample(range(1, n + 1), n)) if with_orders else None
    qo = tuple(rng.sample(range(1, m + 1), m)) if with_orders else None
    return make_instance(n, m, edges, so, qo)
