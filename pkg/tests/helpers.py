"""Shared fixtures-as-data and small builders for the test suite."""

import numpy as np

from commlens.graph import Graph, Partition, parse_edge_list
from commlens.rng import generator

TRIANGLE_TEXT = "0 1\n1 2\n2 0\n"

# two triangles 1-2-3 and 4-5-6 joined by the bridge 3-4
BARBELL_TEXT = "1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n3 4\n"

PATH3_TEXT = "1 2\n2 3\n"

STAR_TEXT = "c a\nc b\nc d\n"


def triangle() -> Graph:
    return parse_edge_list(TRIANGLE_TEXT).graph


def barbell() -> Graph:
    return parse_edge_list(BARBELL_TEXT).graph


def path3() -> Graph:
    return parse_edge_list(PATH3_TEXT).graph


def barbell_two_communities() -> Partition:
    return Partition([0, 0, 0, 1, 1, 1])


def random_weighted_graph(n: int, p: float, seed: int,
                          low: float = 0.1, high: float = 2.0) -> Graph:
    """Seeded G(n, p) with uniform random weights, isolated nodes kept."""
    rng = generator(seed, 17)
    edges = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((str(i), str(j), float(rng.uniform(low, high))))
    g, _ = Graph.from_edges(edges, node_order=[str(i) for i in range(n)])
    return g


def random_partition(n: int, kmax: int, seed: int) -> Partition:
    rng = generator(seed, 23)
    return Partition(rng.integers(0, kmax, size=n))


def nonempty_random_graph(n: int, p: float, seed: int) -> Graph:
    """Seeded unweighted G(n, p) guaranteed to have at least one edge."""
    from commlens.graph import random_graph

    for bump in range(1000):
        g = random_graph(n, p, seed + 1000 * bump)
        if g.total_weight > 0:
            return g
    raise AssertionError("could not draw a non-empty random graph")
