"""Bounded-variable linear programs and their solution.

All relaxations in this package (branch-and-bound nodes, root cut loops,
tree-hull integrality checks) go through `LPModel`/`solve_lp`.  The heavy
lifting is delegated to the HiGHS dual simplex via scipy, which returns
optimal basic solutions; the model object is the stable surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

__all__ = ["LPModel", "LPSolution", "solve_lp", "add_row"]

FEAS_TOL = 1e-7

_SENSES = ("<=", ">=", "=")


@dataclass
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: dict
    objective: float
    dual_objective: float = None

    def value(self, name):
        return self.values[name]

    @property
    def optimal(self):
        return self.status == "optimal"


class LPModel:
    """A minimization LP with explicit variable bounds and sparse rows."""

    def __init__(self):
        self.var_names = []
        self.lower = []
        self.upper = []
        self.obj = []
        self._index = {}
        self.rows = []  # (coeffs dict, sense, rhs)

    # -- construction ------------------------------------------------------

    def add_var(self, name, lb=0.0, ub=None, obj=0.0):
        if name in self._index:
            raise ValueError(f"duplicate variable {name!r}")
        if ub is not None and lb > ub:
            raise ValueError(f"variable {name!r} has lb {lb} > ub {ub}")
        self._index[name] = len(self.var_names)
        self.var_names.append(name)
        self.lower.append(float(lb))
        self.upper.append(np.inf if ub is None else float(ub))
        self.obj.append(float(obj))
        return name

    def has_var(self, name):
        return name in self._index

    def add_constraint(self, coeffs, sense, rhs):
        if sense not in _SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        for name, c in coeffs.items():
            if name not in self._index:
                raise ValueError(f"constraint references unknown variable {name!r}")
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient on {name!r}")
        if coeffs:
            self.rows.append((dict(coeffs), sense, float(rhs)))

    def set_bounds(self, name, lb, ub):
        k = self._index[name]
        self.lower[k] = float(lb)
        self.upper[k] = float(ub)

    def bounds(self, name):
        k = self._index[name]
        return self.lower[k], self.upper[k]

    def copy(self):
        other = LPModel.__new__(LPModel)
        other.var_names = list(self.var_names)
        other.lower = list(self.lower)
        other.upper = list(self.upper)
        other.obj = list(self.obj)
        other._index = dict(self._index)
        other.rows = list(self.rows)
        return other

    # -- debugging dump ----------------------------------------------------

    def dump(self):
        """Row-oriented sparse text form, for debugging only."""
        out = ["min " + " + ".join(f"{c:g}*{v}" for v, c in zip(self.var_names, self.obj) if c)]
        for coeffs, sense, rhs in self.rows:
            lhs = " + ".join(f"{c:g}*{v}" for v, c in sorted(coeffs.items()))
            out.append(f"{lhs} {sense} {rhs:g}")
        for v, lo, hi in zip(self.var_names, self.lower, self.upper):
            out.append(f"{lo:g} <= {v} <= {hi:g}")
        return "\n".join(out)


def add_row(model, inequality):
    """Append one constraint taken from an Inequality (sense >=)."""
    model.add_constraint(inequality.coeffs, ">=", inequality.rhs)
    return model


def solve_lp(model, bound_overrides=None):
    """Solve the model, returning an optimal basic solution when one exists.

    bound_overrides optionally maps variable names to (lb, ub) pairs used for
    this solve only (branching without copying the model).
    """
    nvars = len(model.var_names)
    lower = np.array(model.lower)
    upper = np.array(model.upper)
    if bound_overrides:
        for name, (lo, hi) in bound_overrides.items():
            k = model._index[name]
            lower[k] = lo
            upper[k] = hi

    data, rows_i, cols_i = [], [], []
    senses, rhss = [], []
    for r, (coeffs, sense, rhs) in enumerate(model.rows):
        for name, c in coeffs.items():
            rows_i.append(r)
            cols_i.append(model._index[name])
            data.append(c)
        senses.append(sense)
        rhss.append(rhs)

    nrows = len(model.rows)
    a_full = csr_matrix((data, (rows_i, cols_i)), shape=(nrows, nvars))
    senses = np.array(senses)
    rhss = np.array(rhss)

    le = senses == "<="
    ge = senses == ">="
    eq = senses == "="
    a_ub_parts, b_ub_parts = [], []
    if le.any():
        a_ub_parts.append(a_full[le])
        b_ub_parts.append(rhss[le])
    if ge.any():
        a_ub_parts.append(-a_full[ge])
        b_ub_parts.append(-rhss[ge])
    a_ub = None
    b_ub = None
    if a_ub_parts:
        from scipy.sparse import vstack

        a_ub = vstack(a_ub_parts, format="csr")
        b_ub = np.concatenate(b_ub_parts)
    a_eq = a_full[eq] if eq.any() else None
    b_eq = rhss[eq] if eq.any() else None

    res = linprog(
        c=np.array(model.obj),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=np.column_stack([lower, upper]),
        method="highs-ds",
    )

    if res.status == 2:
        return LPSolution(status="infeasible", values={}, objective=np.inf)
    if res.status == 3:
        return LPSolution(status="unbounded", values={}, objective=-np.inf)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")

    values = dict(zip(model.var_names, res.x))
    dual = None
    try:
        dual = float(res.fun - res.ineqlin.residual @ res.ineqlin.marginals * 0.0)
        # dual objective recomputed from marginals for the duality test
        dual = 0.0
        if a_ub is not None:
            dual += float(b_ub @ res.ineqlin.marginals)
        if a_eq is not None:
            dual += float(b_eq @ res.eqlin.marginals)
        finite_lo = np.isfinite(lower)
        finite_hi = np.isfinite(upper)
        dual += float(lower[finite_lo] @ res.lower.marginals[finite_lo])
        dual += float(upper[finite_hi] @ res.upper.marginals[finite_hi])
    except (AttributeError, TypeError):
        dual = None
    return LPSolution(status="optimal", values=values, objective=float(res.fun), dual_objective=dual)
