"""Ground-truth engines for tiny instances.

Everything here trades time for certainty: exhaustive activation-order
optima, brute-force validity checks of inequalities against all feasible
integral points, facet verification by affine rank of tight points, and an
exhaustive (U,C) subset scan.  These are the reference implementations the
fast code is tested against.
"""

from __future__ import annotations

import math
from itertools import permutations, product

import numpy as np

from .cyclecuts import uc_violation
from .knapcuts import xvar, yvar, zvar

__all__ = [
    "brute_force_optimum",
    "permutation_optimum",
    "activation_cost",
    "check_validity",
    "check_validity_instance",
    "check_facet",
    "enumerate_uc_subsets",
    "enumerate_feasible_points",
]

MAX_ORACLE_NODES = 12


def activation_cost(instance, order):
    """Incentive cost of activating `order` left to right, each node drawing
    full influence from previously activated neighbors."""
    active = set()
    cost = 0
    for i in order:
        influence = sum(
            instance.weight(j, i) for j in instance.neighbors(i) if j in active
        )
        cost += max(0, instance.threshold(i) - influence)
        active.add(i)
    return cost


def brute_force_optimum(instance):
    """Exact LCIM optimum with an optimal activation order.

    Optimal propagation is acyclic, so some activation order of the final
    active set realizes the optimum with every node receiving all influence
    from earlier neighbors; a subset DP over activation sets captures all
    orders at once.  Equivalent to full permutation enumeration (see
    `permutation_optimum`), just exponentially cheaper.
    """
    n = instance.n
    if n > MAX_ORACLE_NODES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_NODES} nodes")
    h = [instance.threshold(i) for i in range(1, n + 1)]
    inweights = []  # per node: list of (neighbor bit, weight)
    for i in range(1, n + 1):
        inweights.append(
            [(1 << (j - 1), instance.weight(j, i)) for j in instance.neighbors(i)]
        )

    size = 1 << n
    INF = math.inf
    f = [INF] * size
    last = [0] * size
    f[0] = 0
    for mask in range(1, size):
        best = INF
        arg = 0
        for i in range(n):
            bit = 1 << i
            if not mask & bit:
                continue
            rest = mask ^ bit
            if f[rest] is INF:
                continue
            influence = sum(w for nb, w in inweights[i] if rest & nb)
            cand = f[rest] + max(0, h[i] - influence)
            if cand < best:
                best = cand
                arg = i
        f[mask] = best
        last[mask] = arg

    best_mask = min(
        (m for m in range(size) if bin(m).count("1") >= instance.b),
        key=lambda m: f[m],
    )
    order = []
    mask = best_mask
    while mask:
        i = last[mask]
        order.append(i + 1)
        mask ^= 1 << i
    order.reverse()
    return f[best_mask], tuple(order)


def permutation_optimum(instance):
    """Literal minimum over all activation orders of all subsets of size >= b.

    Prefix costs are monotone, so branches exceeding the incumbent prune
    safely.  Only sensible for very small n; used to cross-check the DP.
    """
    n = instance.n
    if n > 7:
        raise ValueError("permutation oracle limited to 7 nodes")
    nodes = list(range(1, n + 1))
    best = (math.inf, ())
    for size in range(instance.b, n + 1):
        for perm in permutations(nodes, size):
            cost = activation_cost(instance, perm)
            if cost < best[0]:
                best = (cost, perm)
    return best


# ---------------------------------------------------------------------------
# Validity and facets over the single-node set P
# ---------------------------------------------------------------------------


def _node_points(view):
    """All minimal-x feasible points of P as (x, y-tuple, z)."""
    v = view.degree
    weights = view.weights
    for z in (0, 1):
        for ybits in product((0, 1), repeat=v):
            x = max(0, view.h * z - sum(w * y for w, y in zip(weights, ybits)))
            yield x, ybits, z


def _node_point_dict(view, x, ybits, z):
    point = {xvar(view.node): x, zvar(view.node): z}
    for j, y in zip(view.neighbors, ybits):
        point[yvar(j, view.node)] = y
    return point


def check_validity(ineq, view, tol=1e-9):
    """True iff no feasible point of P violates the inequality.

    Minimal-x points suffice: raising x only increases the left-hand side
    (the x coefficient of every node cut is positive).
    """
    for x, ybits, z in _node_points(view):
        if ineq.violation(_node_point_dict(view, x, ybits, z)) > tol:
            return False
    return True


def check_facet(ineq, view, tol=1e-8):
    """Whether a valid node inequality is facet-defining for conv(P).

    For every binary (y, z), the unique x making the cut tight is computed
    and kept when it is feasible for P; the inequality defines a facet iff
    the tight points affinely span dimension v + 1 in the (v+2)-dimensional
    variable space.
    """
    if not check_validity(ineq, view):
        raise ValueError("inequality is not valid; facetness undefined")
    i = view.node
    cx = ineq.coeffs.get(xvar(i), 0.0)
    if cx <= 0:
        raise ValueError("node inequality must have a positive x coefficient")
    v = view.degree
    tight = []
    for ybits, z in (
        (yb, zz) for zz in (0, 1) for yb in product((0, 1), repeat=v)
    ):
        rest = ineq.coeffs.get(zvar(i), 0.0) * z
        rest += sum(
            ineq.coeffs.get(yvar(j, i), 0.0) * y
            for j, y in zip(view.neighbors, ybits)
        )
        x_tight = (ineq.rhs - rest) / cx
        x_min = max(0, view.h * z - sum(w * y for w, y in zip(view.weights, ybits)))
        if x_tight >= x_min - 1e-9:
            tight.append([x_tight, *ybits, z])
    if len(tight) < v + 2:
        return False
    mat = np.array(tight, dtype=float)
    rank = np.linalg.matrix_rank(mat - mat[0], tol=tol)
    return rank == v + 1


# ---------------------------------------------------------------------------
# Validity over whole instances
# ---------------------------------------------------------------------------


def enumerate_feasible_points(instance):
    """All feasible integral points with minimal x, as variable dicts.

    Feasibility: edge coupling (influence only between active nodes, at
    most one direction per edge), acyclic influence support, coverage
    sum z >= b, and x set to the minimal incentive.
    """
    n = instance.n
    if n > 8:
        raise ValueError("instance enumeration limited to 8 nodes")
    edges = instance.edges()
    for zbits in product((0, 1), repeat=n):
        if sum(zbits) < instance.b:
            continue
        active_edges = [
            (i, j) for i, j in edges if zbits[i - 1] and zbits[j - 1]
        ]
        # per active edge: 0 = unused, 1 = i->j, 2 = j->i
        for states in product((0, 1, 2), repeat=len(active_edges)):
            succ = {}
            arcs = []
            for (i, j), s in zip(active_edges, states):
                if s == 1:
                    arcs.append((i, j))
                    succ.setdefault(i, []).append(j)
                elif s == 2:
                    arcs.append((j, i))
                    succ.setdefault(j, []).append(i)
            if _has_cycle(succ):
                continue
            point = {}
            for i in range(1, n + 1):
                point[zvar(i)] = zbits[i - 1]
            for (i, j), _ in instance.arcs:
                point[yvar(i, j)] = 0
            for i, j in arcs:
                point[yvar(i, j)] = 1
            for i in range(1, n + 1):
                influence = sum(
                    instance.weight(j, i)
                    for j in instance.neighbors(i)
                    if point[yvar(j, i)]
                )
                point[xvar(i)] = max(0, instance.threshold(i) * zbits[i - 1] - influence)
            yield point


def _has_cycle(succ):
    color = {}

    def visit(u):
        color[u] = 1
        for w in succ.get(u, ()):
            c = color.get(w)
            if c == 1:
                return True
            if c is None and visit(w):
                return True
        color[u] = 2
        return False

    return any(color.get(u) is None and visit(u) for u in succ)


def check_validity_instance(ineq, instance, tol=1e-9):
    """True iff no feasible integral point of the instance violates the cut."""
    return all(
        ineq.violation(point) <= tol for point in enumerate_feasible_points(instance)
    )


# ---------------------------------------------------------------------------
# Exhaustive (U,C) scan
# ---------------------------------------------------------------------------


def enumerate_uc_subsets(cycle, base_map, views, x_values, y_values, z_values):
    """Maximum (U,C) violation over every eligible subset U, by brute force."""
    nodes = cycle.nodes
    if len(nodes) > 12:
        raise ValueError("exhaustive scan limited to 12 cycle nodes")
    omegas = {
        i: base_map[i].omega(views[i], set(nodes)) for i in nodes
    }
    eligible = [i for i in nodes if omegas[i] >= 1]
    best_U, best_viol = (), uc_violation(
        cycle, base_map, omegas, (), x_values, y_values, z_values
    )
    for mask in range(1, 1 << len(eligible)):
        U = tuple(i for k, i in enumerate(eligible) if mask >> k & 1)
        viol = uc_violation(cycle, base_map, omegas, U, x_values, y_values, z_values)
        if viol > best_viol:
            best_U, best_viol = U, viol
    return best_U, best_viol
