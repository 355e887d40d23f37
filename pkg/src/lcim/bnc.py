"""Branch-and-cut engine for LCIM.

Three formulation modes are supported:

* ``def`` — the arc formulation with lazily separated cycle elimination
  constraints at integral candidates;
* ``cb``  — the same, preceded by a root cutting loop adding MIS, cover,
  packing and (U,C) cuts until no violated cut remains;
* ``ln``  — the layered-network formulation (only for b = n), where layer
  variables make cyclic influence infeasible outright.

The tree uses best-bound node selection and most-fractional branching with
a z-before-y tie-break.  All data are integral, so the optimum is integral
and node bounds are rounded up before pruning.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

from . import cyclecuts, knapcuts
from .knapcuts import CutPool, xvar, yvar, zvar
from .lp import LPModel, solve_lp

__all__ = [
    "MODES",
    "SolveParams",
    "SolveReport",
    "assemble",
    "solve",
    "root_cut_loop",
    "branch",
    "greedy_incumbent",
    "TSV_HEADER",
]

MODES = ("def", "cb", "ln")
CUT_FAMILIES = ("cover", "packing", "mis", "gcec", "uc")

TSV_HEADER = "\t".join(
    ["instance", "mode", "n", "m", "b", "status", "ub", "lb", "gap", "nodes"]
    + [f"cuts_{f}" for f in CUT_FAMILIES]
    + ["seconds"]
)


@dataclass
class SolveParams:
    time_limit: float = 600.0
    max_rounds: int = 50
    round_cut_cap: int = 200
    int_tol: float = 1e-6
    viol_tol: float = 1e-6
    cycle_cap: int = 10
    gcec_only: bool = False
    tree_sep_rounds: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.time_limit <= 0 or self.max_rounds <= 0 or self.round_cut_cap <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SolveReport:
    instance_id: str
    mode: str
    n: int
    m: int
    b: int
    status: str  # optimal | time_limit | infeasible
    ub: float
    lb: float
    gap: float
    nodes: int
    cuts: dict
    seconds: float
    incumbent: dict = field(default=None, repr=False)
    root_bound: float = None

    def tsv_line(self):
        cells = [
            self.instance_id,
            self.mode,
            str(self.n),
            str(self.m),
            str(self.b),
            self.status,
            _num(self.ub),
            _num(self.lb),
            _num(self.gap),
            str(self.nodes),
        ]
        cells += [str(self.cuts.get(f, 0)) for f in CUT_FAMILIES]
        cells.append(f"{self.seconds:.3f}")
        return "\t".join(cells)

    def text_block(self):
        lines = [
            f"instance  {self.instance_id}",
            f"mode      {self.mode}",
            f"size      n={self.n} m={self.m} b={self.b}",
            f"status    {self.status}",
            f"objective ub={_num(self.ub)} lb={_num(self.lb)} gap={_num(self.gap)}%",
            f"nodes     {self.nodes}",
            "cuts      "
            + " ".join(f"{f}={self.cuts.get(f, 0)}" for f in CUT_FAMILIES),
            f"time      {self.seconds:.3f}s",
        ]
        return "\n".join(lines)


def _num(v):
    if v is None or v != v:
        return "-"
    if v in (math.inf, -math.inf):
        return "inf" if v > 0 else "-inf"
    if v == int(v):
        return str(int(v))
    return f"{v:.6g}"


def gap_percent(ub, lb):
    """The optimality gap 100 * (ub - lb) / lb."""
    if ub == math.inf:
        return math.inf
    if abs(ub - lb) <= 1e-9:
        return 0.0
    if lb <= 0:
        return math.inf
    return 100.0 * (ub - lb) / lb


# ---------------------------------------------------------------------------
# Formulation assembly
# ---------------------------------------------------------------------------


def assemble(instance, mode):
    """Build the LP relaxation of the chosen formulation.

    Variables: x_i in [0, h_i] (paying more than h_i is never optimal),
    y_ij in [0,1] per directed arc, z_i in [0,1].  ``ln`` additionally
    fixes z = 1, orients every edge, and adds layer variables l_i in [1,n]
    with the anti-cycle rows y_ji - (n-1) y_ij <= l_j - l_i.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not instance.is_preprocessed():
        raise ValueError("instance must be preprocessed before solving")
    if mode == "ln" and instance.b != instance.n:
        raise ValueError("layered-network formulation requires b = n")

    n = instance.n
    model = LPModel()
    for i in range(1, n + 1):
        model.add_var(xvar(i), lb=0.0, ub=float(instance.threshold(i)), obj=1.0)
    for (i, j), _ in instance.arcs:
        model.add_var(yvar(i, j), lb=0.0, ub=1.0)
    zfix = 1.0 if mode == "ln" else 0.0
    for i in range(1, n + 1):
        model.add_var(zvar(i), lb=zfix, ub=1.0)
    if mode == "ln":
        for i in range(1, n + 1):
            model.add_var(f"l[{i}]", lb=1.0, ub=float(n))

    for i in range(1, n + 1):
        view = instance.node_view(i)
        row = {xvar(i): 1.0, zvar(i): -float(view.h)}
        for j, w in view.d:
            row[yvar(j, i)] = float(w)
        model.add_constraint(row, ">=", 0.0)

    for i, j in instance.edges():
        if mode == "ln":
            model.add_constraint({yvar(i, j): 1.0, yvar(j, i): 1.0}, "=", 1.0)
        else:
            model.add_constraint(
                {yvar(i, j): 1.0, yvar(j, i): 1.0, zvar(i): -1.0}, "<=", 0.0
            )
            model.add_constraint(
                {yvar(i, j): 1.0, yvar(j, i): 1.0, zvar(j): -1.0}, "<=", 0.0
            )

    model.add_constraint(
        {zvar(i): 1.0 for i in range(1, n + 1)}, ">=", float(instance.b)
    )

    if mode == "ln":
        for (j, i), _ in instance.arcs:
            model.add_constraint(
                {
                    yvar(j, i): 1.0,
                    yvar(i, j): -float(n - 1),
                    f"l[{j}]": -1.0,
                    f"l[{i}]": 1.0,
                },
                "<=",
                0.0,
            )
    return model


def greedy_incumbent(instance):
    """Feasible warm start: repeatedly activate the node whose remaining
    incentive (threshold minus influence from already-active neighbors) is
    smallest.  Returns (cost, activation order)."""
    active = []
    active_set = set()
    cost = 0
    for _ in range(instance.b):
        best = None
        for i in range(1, instance.n + 1):
            if i in active_set:
                continue
            influence = sum(
                instance.weight(j, i)
                for j in instance.neighbors(i)
                if j in active_set
            )
            marginal = max(0, instance.threshold(i) - influence)
            if best is None or marginal < best[0] or (
                marginal == best[0] and i < best[1]
            ):
                best = (marginal, i)
        cost += best[0]
        active.append(best[1])
        active_set.add(best[1])
    return cost, tuple(active)


# ---------------------------------------------------------------------------
# Root cutting loop (CB mode)
# ---------------------------------------------------------------------------


def root_cut_loop(model, instance, params, pool):
    """Separate MIS/cover/packing and cycle cuts at the root until none are
    violated; returns the final root LP bound.

    Per round: the LP is solved, each node runs exact MIS separation (with
    the companion cover and packing cuts derived from the same subset), and
    each violated cycle yields a (U,C) cut — or a GCEC when the coverage
    requirement cannot certify the cycle cuts' validity.
    """
    views = {i: instance.node_view(i) for i in range(1, instance.n + 1)}
    bound = None
    for _ in range(params.max_rounds):
        sol = solve_lp(model)
        if not sol.optimal:
            return sol.objective
        bound = sol.objective
        point = sol.values
        added = 0

        for i, view in views.items():
            if added >= params.round_cut_cap:
                break
            y_in = {j: point.get(yvar(j, i), 0.0) for j in view.neighbors}
            res = knapcuts.separate_mis(
                view, point[xvar(i)], y_in, point[zvar(i)], tol=params.viol_tol
            )
            if res is None:
                continue
            mis, cut, _ = res
            if pool.add(cut):
                model.add_constraint(cut.coeffs, ">=", cut.rhs)
                added += 1
            cover = knapcuts.cover_from_mis(view, mis.members)
            if cover is not None:
                ccut = knapcuts.build_cover_cut(view, cover.members)
                if ccut.violation(point) > params.viol_tol and pool.add(ccut):
                    model.add_constraint(ccut.coeffs, ">=", ccut.rhs)
                    added += 1
                packed = knapcuts.packing_from_cover(
                    view, cover, point[xvar(i)], y_in, point[zvar(i)],
                    tol=params.viol_tol,
                )
                if packed is not None and pool.add(packed[1]):
                    model.add_constraint(packed[1].coeffs, ">=", packed[1].rhs)
                    added += 1

        cycles = cyclecuts.find_violated_cycles_fractional(
            _yvals(point), point, cap=params.cycle_cap, tol=params.viol_tol
        )
        for cycle in cycles:
            if added >= params.round_cut_cap:
                break
            if not params.gcec_only and cyclecuts.cycle_cut_allowed(instance, cycle):
                base_map = _choose_bases(cycle, views, pool, point)
                res = cyclecuts.separate_uc(
                    cycle, base_map, views, point, point, point,
                    tol=params.viol_tol,
                )
                if res is not None and pool.add(res[1]):
                    model.add_constraint(res[1].coeffs, ">=", res[1].rhs)
                    added += 1
                    continue
            gcec = _best_gcec(cycle, point, params.viol_tol)
            if gcec is not None and pool.add(gcec):
                model.add_constraint(gcec.coeffs, ">=", gcec.rhs)
                added += 1

        if added == 0:
            break
    return bound


def _yvals(point):
    return {k: v for k, v in point.items() if k.startswith("y[")}


def _choose_bases(cycle, views, pool, point):
    """Per cycle node, the base inequality minimizing the slack theta; the
    node propagation row is the always-available fallback."""
    base_map = {}
    for i in cycle.nodes:
        view = views[i]
        candidates = [cyclecuts.base_from_row(view)]
        for cut in pool.for_node(i):
            candidates.append(cyclecuts.base_from_inequality(cut, view))
        base_map[i] = min(
            candidates, key=lambda b: b.theta(point, point, point)
        )
    return base_map


def _best_gcec(cycle, point, tol):
    """GCEC with the exempted node chosen to maximize violation."""
    W = 0.0
    for k, l in cycle.arcs:
        W += point[zvar(l)] - point.get(yvar(k, l), 0.0)
    k_best = max(cycle.nodes, key=lambda k: point[zvar(k)])
    if point[zvar(k_best)] - W <= tol:
        return None
    return cyclecuts.build_gcec(cycle, k_best)


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------


def branch(model, point, int_tol=1e-6):
    """Pick the most fractional binary variable (z before y on ties) and
    return the two child bound fixings."""
    best = None
    for idx, name in enumerate(model.var_names):
        kind = name[0]
        if kind not in ("y", "z"):
            continue
        val = point[name]
        frac = min(val - math.floor(val), math.ceil(val) - val)
        if frac <= int_tol:
            continue
        rank = (frac, 1 if kind == "z" else 0, -idx)
        if best is None or rank > best[0]:
            best = (rank, name)
    if best is None:
        raise ValueError("point is integral; should have been a candidate")
    name = best[1]
    return {name: (0.0, 0.0)}, {name: (1.0, 1.0)}


def _is_integral(model, point, int_tol):
    for name in model.var_names:
        if name[0] in ("y", "z"):
            val = point[name]
            if min(val - math.floor(val), math.ceil(val) - val) > int_tol:
                return False
    return True


def _repair_cost(instance, point, int_tol):
    """Incentive cost of an integral candidate with x recomputed exactly."""
    cost = 0
    for i in range(1, instance.n + 1):
        z = round(point[zvar(i)])
        influence = sum(
            instance.weight(j, i)
            for j in instance.neighbors(i)
            if round(point[yvar(j, i)])
        )
        cost += max(0, instance.threshold(i) * z - influence)
    return cost


def solve(instance, mode="def", params=None, instance_id="instance"):
    """Run branch-and-cut in the chosen mode and report the outcome."""
    if params is None:
        params = SolveParams()
    t0 = time.monotonic()
    pool = CutPool()
    model = assemble(instance, mode)

    if mode == "cb":
        root_bound = root_cut_loop(model, instance, params, pool)
    else:
        root_sol = solve_lp(model)
        root_bound = root_sol.objective if root_sol.optimal else None

    ub, greedy_order = greedy_incumbent(instance)
    incumbent = {"order": greedy_order, "objective": ub}
    lb_report = 0.0
    nodes = 0
    status = "optimal"

    views = {i: instance.node_view(i) for i in range(1, instance.n + 1)}
    counter = 0
    heap = [(0.0, counter, {}, 0)]
    while heap:
        if time.monotonic() - t0 > params.time_limit:
            status = "time_limit"
            break
        node_lb, _, overrides, seps = heapq.heappop(heap)
        lb_report = max(lb_report, node_lb)
        if math.ceil(node_lb - 1e-6) >= ub:
            continue
        sol = solve_lp(model, bound_overrides=overrides)
        nodes += 1
        if not sol.optimal:
            continue
        lb_node = sol.objective
        if math.ceil(lb_node - 1e-6) >= ub:
            continue
        point = sol.values

        if _is_integral(model, point, params.int_tol):
            cycle = None
            if mode != "ln":
                cycle = cyclecuts.find_violated_cycle_integer(_yvals(point))
            if cycle is not None:
                new = False
                gcec = cyclecuts.build_gcec(cycle, min(cycle.nodes))
                if pool.add(gcec):
                    model.add_constraint(gcec.coeffs, ">=", gcec.rhs)
                    new = True
                if not params.gcec_only and cyclecuts.cycle_cut_allowed(
                    instance, cycle
                ):
                    empty = cyclecuts.build_uc_cut(
                        cyclecuts.make_uc_data(cycle, (), {}), {}
                    )
                    if pool.add(empty):
                        model.add_constraint(empty.coeffs, ">=", empty.rhs)
                        new = True
                if not new:
                    raise RuntimeError(
                        "integral candidate violates a cycle cut already in the model"
                    )
                counter += 1
                heapq.heappush(heap, (lb_node, counter, overrides, seps))
                continue
            cost = _repair_cost(instance, point, params.int_tol)
            if cost < ub:
                ub = cost
                incumbent = {"point": dict(point), "objective": cost}
            continue

        if mode == "cb" and seps < params.tree_sep_rounds:
            # tighten the node with fresh MIS cuts before spending a branch
            added = 0
            for i, view in views.items():
                y_in = {j: point.get(yvar(j, i), 0.0) for j in view.neighbors}
                res = knapcuts.separate_mis(
                    view, point[xvar(i)], y_in, point[zvar(i)],
                    tol=params.viol_tol,
                )
                if res is not None and pool.add(res[1]):
                    model.add_constraint(res[1].coeffs, ">=", res[1].rhs)
                    added += 1
            if added:
                counter += 1
                heapq.heappush(heap, (lb_node, counter, overrides, seps + 1))
                continue

        left, right = branch(model, point, params.int_tol)
        for child in (left, right):
            merged = dict(overrides)
            merged.update(child)
            counter += 1
            heapq.heappush(heap, (lb_node, counter, merged, 0))

    if status == "optimal":
        lb_report = float(ub)
    else:
        open_lbs = [entry[0] for entry in heap]
        lb_report = max(lb_report, min(open_lbs)) if open_lbs else float(ub)
    lb_report = min(lb_report, float(ub))

    return SolveReport(
        instance_id=instance_id,
        mode=mode,
        n=instance.n,
        m=instance.m,
        b=instance.b,
        status=status if ub < math.inf else "infeasible",
        ub=float(ub),
        lb=lb_report,
        gap=gap_percent(float(ub), lb_report),
        nodes=nodes,
        cuts=dict(pool.counts),
        seconds=time.monotonic() - t0,
        incumbent=incumbent,
        root_bound=root_bound,
    )
