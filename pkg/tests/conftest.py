"""Shared helpers for the test suite: random instance factories."""

import numpy as np

from lcim.instance import make_instance, preprocess


def random_instance(rng, n_min=3, n_max=6, extra_edge_prob=0.35, b=None):
    """Random connected bidirectional instance (spanning tree plus extras)."""
    n = int(rng.integers(n_min, n_max + 1))
    arcs = {}
    order = list(rng.permutation(np.arange(1, n + 1)))
    for a, c in zip(order, order[1:]):
        a, c = int(a), int(c)
        arcs[(a, c)] = int(rng.integers(1, 11))
        arcs[(c, a)] = int(rng.integers(1, 11))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if (i, j) not in arcs and rng.random() < extra_edge_prob:
                arcs[(i, j)] = int(rng.integers(1, 11))
                arcs[(j, i)] = int(rng.integers(1, 11))
    thresholds = {}
    for i in range(1, n + 1):
        delta = sum(w for (a, c), w in arcs.items() if c == i)
        thresholds[i] = int(rng.integers(1, delta + 2))
    if b is None:
        b = int(rng.integers(1, n + 1))
    return preprocess(make_instance(n, arcs, thresholds, b))


def random_cycle_instance(rng, n_min=3, n_max=8, b=None):
    """Random simple-cycle instance on a shuffled node order."""
    n = int(rng.integers(n_min, n_max + 1))
    order = [int(v) for v in rng.permutation(np.arange(1, n + 1))]
    arcs = {}
    for a, c in zip(order, order[1:] + order[:1]):
        arcs[(a, c)] = int(rng.integers(1, 11))
        arcs[(c, a)] = int(rng.integers(1, 11))
    thresholds = {
        i: int(rng.integers(1, sum(w for (a, c), w in arcs.items() if c == i) + 2))
        for i in range(1, n + 1)
    }
    if b is None:
        b = int(rng.integers(1, n + 1))
    return preprocess(make_instance(n, arcs, thresholds, b))


def random_equal_tree(rng, n_min=2, n_max=12):
    """Random tree where every node has one common incoming weight."""
    n = int(rng.integers(n_min, n_max + 1))
    d = {i: int(rng.integers(1, 8)) for i in range(1, n + 1)}
    arcs = {}
    for i in range(2, n + 1):
        parent = int(rng.integers(1, i))
        arcs[(parent, i)] = d[i]
        arcs[(i, parent)] = d[parent]
    thresholds = {}
    for i in range(1, n + 1):
        degree = sum(1 for (a, c) in arcs if c == i)
        thresholds[i] = int(rng.integers(1, d[i] * degree + 1))
    return make_instance(n, arcs, thresholds, b=n)


def random_node_view(rng, v_max=6, node=0):
    """Random NodeView with strict slack sum(d) > h (so covers exist)."""
    from lcim.instance import NodeView

    v = int(rng.integers(2, v_max + 1))
    weights = [int(rng.integers(1, 11)) for _ in range(v)]
    h = int(rng.integers(1, sum(weights)))
    d = tuple((j, w) for j, w in enumerate(weights, start=1))
    return NodeView(node=node, h=h, d=d)


def random_fractional_point(rng, view):
    """Random fractional (x*, y*, z*) for one node's separation problems."""
    z = float(rng.uniform(0.05, 1.0))
    y = {j: float(rng.uniform(0.0, z)) for j in view.neighbors}
    x = float(rng.uniform(0.0, view.h * z))
    return x, y, z
