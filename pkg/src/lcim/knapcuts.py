"""Single-node knapsack cuts: continuous cover, continuous packing, and
minimal influencing subset (MIS) inequalities.

Every node of an LCIM instance carries the mixed 0-1 set

    P = { (x, y, z) : x + sum_j d_j y_j >= h z, x >= 0, y, z binary },

and the three families below are valid (often facet-defining) inequalities
for conv(P), lifted through the piecewise-linear functions Phi and Psi.
Separation is exact: MIS separation solves a small knapsack DP per residual
value rather than relying on a greedy prefix scan.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

__all__ = [
    "Inequality",
    "CoverSet",
    "PackingSet",
    "MisSet",
    "CutPool",
    "make_cover_set",
    "make_packing_set",
    "make_mis_set",
    "phi",
    "psi",
    "build_cover_cut",
    "build_packing_cut",
    "build_mis_cut",
    "separate_mis",
    "cover_from_mis",
    "packing_from_cover",
    "xvar",
    "yvar",
    "zvar",
]

VIOLATION_TOL = 1e-6


def xvar(i):
    return f"x[{i}]"


def yvar(j, i):
    """Arc variable for influence exerted by j on i."""
    return f"y[{j},{i}]"


def zvar(i):
    return f"z[{i}]"


@dataclass
class Inequality:
    """A sparse linear inequality  sum_k coeffs[k] * var_k >= rhs.

    Node cuts are normalized to "lhs >= 0" form: the x coefficient is 1 and
    z appears with a negative coefficient.
    """

    coeffs: dict
    rhs: float
    tag: str  # cover | packing | mis | gcec | uc | hull-eq | base
    provenance: tuple = ()

    def lhs_value(self, point):
        return sum(c * point.get(name, 0.0) for name, c in self.coeffs.items())

    def violation(self, point):
        """Positive when the point violates the inequality."""
        return self.rhs - self.lhs_value(point)

    def is_satisfied(self, point, tol=1e-9):
        return self.violation(point) <= tol

    @property
    def key(self):
        return (self.tag, self.provenance)

    def render(self):
        """Canonical text form, positive terms left, negated terms right."""

        def fmt(c, name):
            if c == int(c):
                c = int(c)
            return name if c == 1 else f"{c} {name}"

        order = sorted(self.coeffs, key=_var_sort_key)
        left = [fmt(c, name) for name in order if (c := self.coeffs[name]) > 0]
        right = [fmt(-c, name) for name in order if (c := self.coeffs[name]) < 0]
        rhs = self.rhs
        if rhs == int(rhs):
            rhs = int(rhs)
        if rhs != 0:
            right.append(str(rhs))
        return f"{' + '.join(left) or '0'} >= {' + '.join(right) or '0'}"


def _var_sort_key(name):
    kind = name[0]
    ids = tuple(int(t) for t in name[2:-1].split(","))
    return ({"x": 0, "y": 1, "z": 2}[kind], ids)


class CutPool:
    """Deduplicating cut store keyed by (family, provenance)."""

    def __init__(self):
        self._cuts = {}
        self.counts = {}

    def __len__(self):
        return len(self._cuts)

    def __iter__(self):
        return iter(self._cuts.values())

    def add(self, ineq):
        """Insert a cut; returns False when an identical cut is present."""
        if ineq.key in self._cuts:
            return False
        self._cuts[ineq.key] = ineq
        self.counts[ineq.tag] = self.counts.get(ineq.tag, 0) + 1
        return True

    def for_node(self, node, families=("cover", "packing")):
        """Node cuts usable as base inequalities for cycle coupling."""
        return [
            q
            for q in self._cuts.values()
            if q.tag in families and q.provenance and q.provenance[0] == node
        ]


# ---------------------------------------------------------------------------
# Defining sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverSet:
    """Minimal continuous cover S with residual pi = h - sum_{N\\S} d > 0."""

    node: int
    members: frozenset
    pi: int
    prefix: tuple  # prefix sums of S-weights > pi, sorted descending

    @property
    def r(self):
        return len(self.prefix)


@dataclass(frozen=True)
class PackingSet:
    """Minimal continuous packing L with residual lam = sum_L d - h > 0."""

    node: int
    members: frozenset
    lam: int
    prefix: tuple

    @property
    def r(self):
        return len(self.prefix)


@dataclass(frozen=True)
class MisSet:
    """Minimal influencing subset M with incentive residual p = h - sum_M d."""

    node: int
    members: frozenset
    p: int


def make_cover_set(view, S):
    """Validate S as a minimal cover of the node and build its lifting data.

    Minimality means no element can be dropped while keeping pi > 0, which
    is equivalent to d_j >= pi for every j in S.
    """
    S = frozenset(S)
    unknown = S - set(view.neighbors)
    if unknown:
        raise ValueError(f"cover references non-neighbors {sorted(unknown)}")
    total = sum(view.weights)
    inside = sum(w for j, w in view.d if j in S)
    pi = view.h + inside - total
    if pi <= 0:
        raise ValueError(f"not a cover: pi = {pi} <= 0")
    for j, w in view.d:
        if j in S and w < pi:
            raise ValueError(f"cover not minimal: element {j} (d={w}) removable")
    heavy = sorted((w for j, w in view.d if j in S and w > pi), reverse=True)
    prefix = []
    acc = 0
    for w in heavy:
        acc += w
        prefix.append(acc)
    return CoverSet(node=view.node, members=S, pi=pi, prefix=tuple(prefix))


def make_packing_set(view, L):
    """Validate L as a minimal packing (lam > 0, d_j >= lam for j in L)."""
    L = frozenset(L)
    unknown = L - set(view.neighbors)
    if unknown:
        raise ValueError(f"packing references non-neighbors {sorted(unknown)}")
    lam = sum(w for j, w in view.d if j in L) - view.h
    if lam <= 0:
        raise ValueError(f"not a packing: lam = {lam} <= 0")
    for j, w in view.d:
        if j in L and w < lam:
            raise ValueError(f"packing not minimal: element {j} (d={w}) removable")
    heavy = sorted((w for j, w in view.d if j in L and w > lam), reverse=True)
    prefix = []
    acc = 0
    for w in heavy:
        acc += w
        prefix.append(acc)
    return PackingSet(node=view.node, members=L, lam=lam, prefix=tuple(prefix))


def make_mis_set(view, M):
    """Validate M: the residual incentive p = h - sum_M d must be positive."""
    M = frozenset(M)
    unknown = M - set(view.neighbors)
    if unknown:
        raise ValueError(f"subset references non-neighbors {sorted(unknown)}")
    p = view.h - sum(w for j, w in view.d if j in M)
    if p <= 0:
        raise ValueError(f"residual incentive p = {p} <= 0")
    return MisSet(node=view.node, members=M, p=p)


# ---------------------------------------------------------------------------
# Lifting functions
# ---------------------------------------------------------------------------


def phi(d, cover):
    """Piecewise lifting function of a cover set.

    Phi is 0 on [0, D_1 - pi], climbs by pi across each ramp [D_j - pi, D_j],
    and grows linearly as r*pi + d - D_r past the last breakpoint.
    """
    if d < 0:
        raise ValueError("negative influence weight")
    pi, D, r = cover.pi, cover.prefix, cover.r
    if r == 0:
        return 0
    for j in range(r):
        if d <= D[j] - pi:
            return j * pi
        if d <= D[j]:
            return (j + 1) * pi + d - D[j]
    return r * pi + d - D[r - 1]


def psi(d, packing):
    """Piecewise lifting function of a packing set.

    Psi follows d - j*lam on ramps [D_j, D_{j+1} - lam], plateaus at
    D_j - j*lam, and is constant D_r - r*lam beyond D_r - lam.  The segment
    holding d is located by binary search over the breakpoints.
    """
    if d < 0:
        raise ValueError("negative influence weight")
    lam, D, r = packing.lam, packing.prefix, packing.r
    if r == 0:
        return 0
    if d >= D[r - 1] - lam:
        return D[r - 1] - r * lam
    j = bisect_right(D, d)  # number of breakpoints <= d; d lies past D_j
    if j < r and d > D[j] - lam:
        return D[j] - (j + 1) * lam
    return d - j * lam


# ---------------------------------------------------------------------------
# Cut constructors
# ---------------------------------------------------------------------------


def build_cover_cut(view, S):
    """Continuous cover inequality for a minimal cover S."""
    cover = make_cover_set(view, S)
    i, pi = view.node, cover.pi
    coeffs = {xvar(i): 1}
    zcoef = pi
    for j, w in view.d:
        if j in cover.members:
            coeffs[yvar(j, i)] = min(pi, w)
        else:
            lifted = phi(w, cover)
            coeffs[yvar(j, i)] = lifted
            zcoef += lifted
    coeffs[zvar(i)] = -zcoef
    return Inequality(coeffs=coeffs, rhs=0.0, tag="cover",
                      provenance=(i, tuple(sorted(cover.members))))


def build_packing_cut(view, L):
    """Continuous packing inequality for a minimal packing L."""
    packing = make_packing_set(view, L)
    i, lam = view.node, packing.lam
    coeffs = {xvar(i): 1}
    zcoef = 0
    for j, w in view.d:
        if j in packing.members:
            coeffs[yvar(j, i)] = max(0, w - lam)
            zcoef += max(0, w - lam)
        else:
            coeffs[yvar(j, i)] = psi(w, packing)
    coeffs[zvar(i)] = -zcoef
    return Inequality(coeffs=coeffs, rhs=0.0, tag="packing",
                      provenance=(i, tuple(sorted(packing.members))))


def build_mis_cut(view, M):
    """Minimal influencing subset inequality x + sum_{j not in M} min(d_j, p) y_j >= p z."""
    mis = make_mis_set(view, M)
    i, p = view.node, mis.p
    coeffs = {xvar(i): 1}
    for j, w in view.d:
        coeffs[yvar(j, i)] = 0 if j in mis.members else min(w, p)
    coeffs[zvar(i)] = -p
    return Inequality(coeffs=coeffs, rhs=0.0, tag="mis",
                      provenance=(i, tuple(sorted(mis.members))))


# ---------------------------------------------------------------------------
# Separation
# ---------------------------------------------------------------------------


def separate_mis(view, x_star, y_star, z_star, tol=VIOLATION_TOL):
    """Exact MIS separation at a fractional point.

    The violation of the MIS cut for a subset M with weight sum s is

        p*z - x - (T(p) - sum_{j in M} min(d_j, p) y_j),   p = h - s,

    where T(p) = sum_j min(d_j, p) y_j.  For each achievable residual p we
    maximize the recovered term by a 0/1 knapsack DP constrained to hit the
    weight sum s exactly, which makes the separation provably exact (a
    single greedy scan by ascending y* can miss the optimum).  Ties between
    equally violated subsets are resolved toward larger p.

    Returns (MisSet, Inequality, violation) or None when no cut exceeds tol.
    """
    h = view.h
    items = list(view.d)  # (neighbor, weight)
    v = len(items)
    best = None  # (violation, p, members)
    for s in range(0, h):  # ascending s = descending p keeps largest p on ties
        p = h - s
        # dp[k][t]: best recovered value using the first k items at weight sum t
        dp = [[None] * (s + 1) for _ in range(v + 1)]
        dp[0][0] = 0.0
        for k, (j, w) in enumerate(items):
            row, prev = dp[k + 1], dp[k]
            gain = min(w, p) * y_star.get(j, 0.0)
            for t in range(s + 1):
                cand = prev[t]
                if w <= t and prev[t - w] is not None:
                    take = prev[t - w] + gain
                    if cand is None or take > cand:
                        cand = take
                row[t] = cand
        if dp[v][s] is None:
            continue
        total = sum(min(w, p) * y_star.get(j, 0.0) for j, w in items)
        violation = p * z_star - x_star - (total - dp[v][s])
        if best is None or violation > best[0] + 1e-12:
            members = []
            t = s
            for k in range(v, 0, -1):
                j, w = items[k - 1]
                if dp[k - 1][t] is not None and abs(dp[k][t] - dp[k - 1][t]) <= 1e-9:
                    continue  # an optimal completion exists without item k
                members.append(j)
                t -= w
            best = (violation, p, frozenset(members))
    if best is None or best[0] <= tol:
        return None
    _, _, members = best
    mis = make_mis_set(view, members)
    cut = build_mis_cut(view, members)
    # recompute from the reconstructed subset; guards against backtrack drift
    violation = cut.violation(_node_point(view, x_star, y_star, z_star))
    if violation <= tol:
        return None
    return mis, cut, violation


def cover_from_mis(view, M):
    """Turn a minimal influencing subset into a cover: S = N \\ M, pi = p.

    The raw complement need not be minimal; elements with d_j < pi are
    peeled off (each removal lowers pi by d_j but keeps it positive) so the
    returned set always satisfies the cover constructor's preconditions.
    """
    mis = make_mis_set(view, M)
    members = set(view.neighbors) - mis.members
    pi = mis.p
    while True:
        removable = sorted(
            j for j, w in view.d if j in members and w < pi and pi - w > 0
        )
        if not removable:
            break
        j = removable[0]
        members.discard(j)
        pi -= view.weight_of(j)
    if not members:
        return None
    return make_cover_set(view, members)


def packing_from_cover(view, cover, x_star, y_star, z_star, tol=VIOLATION_TOL):
    """Derive the most violated packing cut reachable from a cover set.

    Every k in S whose transfer to the complement pushes the weight sum past
    h yields a candidate packing L = (N \\ S) + {k}; the candidate is shrunk
    to minimality and the most violated resulting cut is returned.
    """
    point = _node_point(view, x_star, y_star, z_star)
    outside = set(view.neighbors) - cover.members
    base = sum(w for j, w in view.d if j in outside)
    best = None
    for k in sorted(cover.members):
        if base + view.weight_of(k) <= view.h:
            continue
        members = set(outside) | {k}
        lam = base + view.weight_of(k) - view.h
        while True:
            removable = sorted(
                j for j, w in view.d if j in members and w < lam and lam - w > 0
            )
            if not removable:
                break
            j = removable[0]
            members.discard(j)
            lam -= view.weight_of(j)
        if not members:
            continue
        packing = make_packing_set(view, members)
        cut = build_packing_cut(view, members)
        violation = cut.violation(point)
        if violation > tol and (best is None or violation > best[2]):
            best = (packing, cut, violation)
    if best is None:
        return None
    return best[0], best[1]


def _node_point(view, x_star, y_star, z_star):
    point = {xvar(view.node): x_star, zvar(view.node): z_star}
    for j in view.neighbors:
        point[yvar(j, view.node)] = y_star.get(j, 0.0)
    return point
