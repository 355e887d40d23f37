"""Cycle-related cuts: generalized cycle elimination constraints (GCEC) and
the (U,C) inequalities coupling per-node base cuts around a directed cycle.

For a cycle C and a node subset U of eligible cycle nodes, the (U,C)
inequality scales each node's base inequality x_i + sum alpha_ji y_ji >=
beta_i z_i by gamma_i = delta(U)/omega_i, where omega_i is the node's
residual slack and delta(U) = lcm of the omegas.  The U = {} case is the
plain cycle cut sum_{(k,l) in C} (z_l - y_kl) >= 1, which dominates every
GCEC of the cycle; both are only valid when every feasible solution must
activate at least one cycle node (b > n - |V(C)|), so emission is guarded.

Separation is exact: the violation factorizes as delta(U) * (K + sum c_i),
so a dynamic program over achievable lcm values (with exact rational
accumulation of the c_i) finds the true maximum.  The sorted-theta chain
DAG of the prefix heuristic is kept as a diagnostic (`uc_dag_values`).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

from .knapcuts import Inequality, xvar, yvar, zvar

__all__ = [
    "Cycle",
    "BaseIneq",
    "UCData",
    "build_gcec",
    "find_violated_cycle_integer",
    "find_violated_cycles_fractional",
    "make_uc_data",
    "build_uc_cut",
    "separate_uc",
    "uc_violation",
    "uc_dag_values",
    "dominance_check",
    "base_from_inequality",
    "base_from_row",
    "cycle_cut_allowed",
]

VIOLATION_TOL = 1e-6
DELTA_CAP = 2**31


@dataclass(frozen=True)
class Cycle:
    """A directed cycle given by its arc sequence, head-to-tail chained."""

    arcs: tuple  # ((k, l), ...)

    def __post_init__(self):
        if len(self.arcs) < 2:
            raise ValueError("a cycle needs at least two arcs")
        for (a, b), (c, _) in zip(self.arcs, self.arcs[1:] + self.arcs[:1]):
            if b != c:
                raise ValueError("arcs do not chain head-to-tail")
        tails = [a for a, _ in self.arcs]
        if len(set(tails)) != len(tails):
            raise ValueError("repeated node in cycle")

    @property
    def nodes(self):
        return tuple(a for a, _ in self.arcs)

    def __len__(self):
        return len(self.arcs)

    def pred(self, node):
        """The cycle arc entering `node`."""
        for k, l in self.arcs:
            if l == node:
                return (k, l)
        raise KeyError(node)

    def canonical(self):
        """Rotate so the smallest node id comes first; orientation is kept."""
        nodes = self.nodes
        s = nodes.index(min(nodes))
        return Cycle(arcs=self.arcs[s:] + self.arcs[:s])


def cycle_cut_allowed(instance, cycle):
    """Whether the cycle cuts (U,C and U = {}) are valid for this instance.

    They presume some cycle node is active in every feasible solution, which
    the coverage requirement guarantees exactly when b > n - |V(C)|.
    """
    return instance.b > instance.n - len(cycle.nodes)


# ---------------------------------------------------------------------------
# GCEC
# ---------------------------------------------------------------------------


def build_gcec(cycle, k):
    """Generalized cycle elimination constraint with node k exempted:
    sum_{(i,j) in C} y_ij <= sum_{i in V(C), i != k} z_i."""
    if k not in cycle.nodes:
        raise ValueError(f"node {k} not on the cycle")
    coeffs = {}
    for i, j in cycle.arcs:
        coeffs[yvar(i, j)] = -1
        if i != k:
            coeffs[zvar(i)] = 1
    return Inequality(coeffs=coeffs, rhs=0.0, tag="gcec",
                      provenance=(cycle.arcs, k))


def find_violated_cycle_integer(y_values, tol=0.5):
    """Find a directed cycle in the support {(i,j): y_ij > tol} by DFS."""
    succ = {}
    for name, val in y_values.items():
        if val > tol:
            i, j = (int(t) for t in name[2:-1].split(","))
            succ.setdefault(i, []).append(j)
    color = {}
    parent_arc = {}

    for root in succ:
        if color.get(root):
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = "gray"
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt) == "gray":
                    # unwind the stack back to nxt
                    arcs = [(node, nxt)]
                    at = node
                    while at != nxt:
                        prev = parent_arc[at]
                        arcs.append(prev)
                        at = prev[0]
                    arcs.reverse()
                    return Cycle(arcs=tuple(arcs)).canonical()
                if color.get(nxt) is None:
                    color[nxt] = "gray"
                    parent_arc[nxt] = (node, nxt)
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = "black"
                stack.pop()
    return None


def find_violated_cycles_fractional(y_values, z_values, cap=10, tol=VIOLATION_TOL):
    """Cycles whose weight sum_{(k,l) in C} (z_l - y_kl) falls below 1.

    Arc weights are nonnegative at any point satisfying the edge-coupling
    rows, so a shortest-path search from each arc's head back to its tail
    closes the cheapest cycle through that arc.  Two-cycles are skipped
    (already covered by the edge-coupling rows); results are canonicalized
    and deduplicated, up to `cap` cycles.
    """
    arcs = {}
    adj = {}
    for name, val in y_values.items():
        i, j = (int(t) for t in name[2:-1].split(","))
        w = max(z_values.get(zvar(j), z_values.get(j, 0.0)) - val, 0.0)
        arcs[(i, j)] = w
        adj.setdefault(i, []).append((j, w))

    found = {}
    for (i, j), w0 in sorted(arcs.items()):
        if w0 >= 1.0 - tol:
            continue
        # Dijkstra from j back to i
        dist = {j: 0.0}
        prev = {}
        heap = [(0.0, j)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, math.inf):
                continue
            if u == i:
                break
            for v, w in adj.get(u, ()):
                nd = d + w
                if nd < dist.get(v, math.inf) - 1e-15:
                    dist[v] = nd
                    prev[v] = u
                    heapq.heappush(heap, (nd, v))
        if i not in dist or w0 + dist[i] >= 1.0 - tol:
            continue
        path = [i]
        while path[-1] != j:
            path.append(prev[path[-1]])
        path.reverse()  # j ... i
        if len(path) < 3:
            continue  # two-cycle
        cyc_arcs = [(i, j)] + [(path[t], path[t + 1]) for t in range(len(path) - 1)]
        try:
            cycle = Cycle(arcs=tuple(cyc_arcs)).canonical()
        except ValueError:
            continue  # shortest path touched the arc's endpoints twice
        found.setdefault(cycle.arcs, cycle)
        if len(found) >= cap:
            break
    return list(found.values())


# ---------------------------------------------------------------------------
# (U,C) inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseIneq:
    """A node's base inequality x_i + sum alpha_ji y_ji >= beta_i z_i."""

    node: int
    alpha: tuple  # ((j, alpha_ji), ...)
    beta: int

    def alpha_of(self, j):
        for k, a in self.alpha:
            if k == j:
                return a
        raise KeyError(j)

    def theta(self, x_values, y_values, z_values):
        """Slack of the base inequality at a point (may be negative)."""
        i = self.node
        val = x_values[xvar(i)] - self.beta * z_values[zvar(i)]
        for j, a in self.alpha:
            val += a * y_values.get(yvar(j, i), 0.0)
        return val

    def omega(self, view, cycle_nodes):
        """Residual slack h_i - beta_i + sum_{j outside the cycle} (alpha_ji - d_ji)."""
        w = view.h - self.beta
        for j, a in self.alpha:
            if j not in cycle_nodes:
                w += a - view.weight_of(j)
        return w


def base_from_inequality(ineq, view):
    """Read (alpha, beta) off a cover/packing cut for the node."""
    i = view.node
    alpha = tuple((j, ineq.coeffs.get(yvar(j, i), 0)) for j in view.neighbors)
    return BaseIneq(node=i, alpha=alpha, beta=-ineq.coeffs[zvar(i)])


def base_from_row(view):
    """Fallback base inequality: the node propagation row itself (alpha = d,
    beta = h), whose omega is 0 — such nodes are excluded from U."""
    return BaseIneq(node=view.node, alpha=tuple(view.d), beta=view.h)


@dataclass(frozen=True)
class UCData:
    cycle: Cycle
    U: tuple  # sorted node subset
    omega: tuple  # ((i, omega_i), ...) for i in U
    delta: int

    def __post_init__(self):
        for i, w in self.omega:
            if w < 1:
                raise ValueError(f"node {i} has omega {w} < 1")
            if self.delta % w != 0:
                raise ValueError("delta is not a common multiple of the omegas")

    def gamma(self, i):
        for k, w in self.omega:
            if k == i:
                return self.delta // w
        raise KeyError(i)


def make_uc_data(cycle, U, omegas):
    """Assemble UCData; delta(U) = lcm of the member omegas, 1 for U = {}."""
    U = tuple(sorted(U))
    om = tuple((i, omegas[i]) for i in U)
    delta = math.lcm(*(w for _, w in om)) if U else 1
    return UCData(cycle=cycle, U=U, omega=om, delta=delta)


def build_uc_cut(ucdata, base_map):
    """The (U,C) inequality

    sum_{i in U} gamma_i (x_i + sum_j alpha_ji y_ji - beta_i z_i)
        >= delta(U) (1 - sum_{(k,l) in C, l not in U} (z_l - y_kl)).
    """
    cycle, delta = ucdata.cycle, ucdata.delta
    inU = set(ucdata.U)
    coeffs = {}
    for i in ucdata.U:
        base = base_map[i]
        g = ucdata.gamma(i)
        coeffs[xvar(i)] = coeffs.get(xvar(i), 0) + g
        for j, a in base.alpha:
            key = yvar(j, i)
            coeffs[key] = coeffs.get(key, 0) + g * a
        coeffs[zvar(i)] = coeffs.get(zvar(i), 0) - g * base.beta
    for k, l in cycle.arcs:
        if l in inU:
            continue
        coeffs[zvar(l)] = coeffs.get(zvar(l), 0) + delta
        key = yvar(k, l)
        coeffs[key] = coeffs.get(key, 0) - delta
    coeffs = {k: v for k, v in coeffs.items() if v != 0}
    return Inequality(coeffs=coeffs, rhs=float(delta), tag="uc",
                      provenance=(cycle.arcs, ucdata.U))


def uc_violation(cycle, base_map, omegas, U, x_values, y_values, z_values):
    """Violation of the (U,C) inequality at a point, straight from Eq-form."""
    U = set(U)
    delta = math.lcm(*(omegas[i] for i in U)) if U else 1
    outside = 0.0
    for k, l in cycle.arcs:
        if l not in U:
            outside += z_values[zvar(l)] - y_values.get(yvar(k, l), 0.0)
    val = delta * (1.0 - outside)
    for i in U:
        val -= (delta // omegas[i]) * base_map[i].theta(x_values, y_values, z_values)
    return val


def separate_uc(cycle, base_map, views, x_values, y_values, z_values,
                tol=VIOLATION_TOL, delta_cap=DELTA_CAP):
    """Exact (U,C) separation over one violated cycle.

    With w_i = z_i - y_{pred(i),i} and W their sum, the violation is

        delta(U) * (K + sum_{i in U} c_i),  K = 1 - W,  c_i = w_i - theta_i/omega_i,

    so subsets sharing an lcm are interchangeable up to their c-sum.  The DP
    keeps, per achievable lcm value, the maximum exact rational c-sum and a
    witness subset; the best candidate (including U = {}) wins.  Nodes with
    omega <= 0 never enter U; lcm growth beyond `delta_cap` is pruned.

    Returns (U tuple, Inequality, violation) or None.
    """
    nodes = cycle.nodes
    omegas = {}
    theta = {}
    w = {}
    for i in nodes:
        base = base_map[i]
        omegas[i] = base.omega(views[i], set(nodes))
        theta[i] = base.theta(x_values, y_values, z_values)
        k, l = cycle.pred(i)
        w[i] = z_values[zvar(i)] - y_values.get(yvar(k, i), 0.0)
    K = Fraction(1) - sum((Fraction(w[i]) for i in nodes), Fraction(0))

    # state: lcm -> (best c-sum, witness subset)
    states = {}
    for i in nodes:
        if omegas[i] < 1:
            continue
        ci = Fraction(w[i]) - Fraction(theta[i]) / omegas[i]
        updates = [(omegas[i], ci, (i,))]
        for d, (csum, members) in states.items():
            nd = math.lcm(d, omegas[i])
            if nd > delta_cap:
                continue
            updates.append((nd, csum + ci, members + (i,)))
        for nd, csum, members in updates:
            cur = states.get(nd)
            if cur is None or csum > cur[0]:
                states[nd] = (csum, members)

    best_viol = K  # U = {}: plain cycle cut with delta = 1
    best_U = ()
    for d, (csum, members) in states.items():
        cand = d * (K + csum)
        if cand > best_viol:
            best_viol = cand
            best_U = tuple(sorted(members))

    violation = float(best_viol)
    if violation <= tol:
        return None
    ucdata = make_uc_data(cycle, best_U, omegas)
    return best_U, build_uc_cut(ucdata, base_map), violation


def uc_dag_values(cycle, base_map, views, x_values, y_values, z_values):
    """Arc lengths of the sorted-theta chain DAG used by the prefix heuristic.

    Returns (f_direct, exit_values) where f_direct is the 0 -> sink arc (the
    best singleton violation) and exit_values[k-1] is the exit arc of the
    k-th prefix of eligible nodes sorted by ascending theta.  Kept as a
    diagnostic; exact separation lives in `separate_uc`.
    """
    nodes = cycle.nodes
    omegas, theta, w = {}, {}, {}
    for i in nodes:
        base = base_map[i]
        omegas[i] = base.omega(views[i], set(nodes))
        theta[i] = base.theta(x_values, y_values, z_values)
        k, l = cycle.pred(i)
        w[i] = z_values[zvar(i)] - y_values.get(yvar(k, i), 0.0)
    W = sum(w.values())
    eligible = [i for i in nodes if omegas[i] >= 1]
    eligible.sort(key=lambda i: (theta[i], i))

    f_direct = max(
        (omegas[i] * (1.0 - (W - w[i])) - theta[i] for i in eligible),
        default=-math.inf,
    )
    exits = []
    for k in range(1, len(eligible) + 1):
        prefix = eligible[:k]
        delta = math.lcm(*(omegas[i] for i in prefix))
        outside = W - sum(w[i] for i in prefix)
        val = delta * (1.0 - outside)
        val -= sum((delta // omegas[i] + 1) * theta[i] for i in prefix)
        exits.append(val)
    return f_direct, exits


def dominance_check(cycle, y_values, z_values, tol=1e-9):
    """True unless some GCEC of the cycle is violated while the U = {} cycle
    cut is not — which the dominance argument rules out (z <= 1)."""
    W = 0.0
    for k, l in cycle.arcs:
        W += z_values[zvar(l)] - y_values.get(yvar(k, l), 0.0)
    gcec_violated = any(z_values[zvar(k)] - W > tol for k in cycle.nodes)
    empty_violated = 1.0 - W > tol
    return empty_violated or not gcec_violated
