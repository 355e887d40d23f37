"""LCIM instance data model, small-world generator, preprocessing and file I/O.

An instance is a bidirectional social graph: whenever the arc (i, j) exists,
so does (j, i), though the two influence weights may differ.  Node ids are
1..n.  Each node carries an integer activation threshold h_i and the instance
carries the required activation count b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

__all__ = [
    "Instance",
    "NodeView",
    "preprocess",
    "generate_small_world",
    "save",
    "load",
    "ParseError",
]


class ParseError(ValueError):
    """Raised when an instance file is malformed; carries the line number."""

    def __init__(self, lineno, reason):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True)
class NodeView:
    """Single-node propagation data: threshold plus incoming weighted arcs."""

    node: int
    h: int
    d: tuple  # ((neighbor, weight), ...) sorted by neighbor id

    @property
    def neighbors(self):
        return tuple(j for j, _ in self.d)

    @property
    def weights(self):
        return tuple(w for _, w in self.d)

    def weight_of(self, j):
        for k, w in self.d:
            if k == j:
                return w
        raise KeyError(j)

    @property
    def degree(self):
        return len(self.d)


@dataclass(frozen=True)
class Instance:
    """Immutable LCIM instance.

    arcs maps directed arc (i, j) to the positive integer influence weight
    d_ij exerted by i on j.  The arc set is symmetric as a relation.
    """

    n: int
    arcs: tuple  # (((i, j), d_ij), ...) sorted
    h: tuple  # h[i-1] is the threshold of node i
    b: int
    _arc_dict: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("instance needs at least one node")
        if not (1 <= self.b <= self.n):
            raise ValueError(f"b={self.b} outside [1, n={self.n}]")
        if len(self.h) != self.n:
            raise ValueError("threshold list length != n")
        seen = dict(self.arcs)
        if len(seen) != len(self.arcs):
            raise ValueError("duplicate arcs")
        for (i, j), w in self.arcs:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"arc ({i},{j}) references unknown node")
            if w < 1 or int(w) != w:
                raise ValueError(f"arc ({i},{j}) has nonpositive or fractional weight {w}")
            if (j, i) not in seen:
                raise ValueError(f"asymmetric arc set: ({i},{j}) present without ({j},{i})")
        for i, hi in enumerate(self.h, start=1):
            if hi < 1 or int(hi) != hi:
                raise ValueError(f"node {i} has nonpositive or fractional threshold {hi}")
        object.__setattr__(self, "_arc_dict", seen)

    # -- accessors ---------------------------------------------------------

    @property
    def m(self):
        """Number of directed arcs."""
        return len(self.arcs)

    def weight(self, i, j):
        return self._arc_dict[(i, j)]

    def has_arc(self, i, j):
        return (i, j) in self._arc_dict

    def threshold(self, i):
        return self.h[i - 1]

    def neighbors(self, i):
        """In-neighbors of i (equal to out-neighbors by symmetry)."""
        return tuple(sorted(j for (j, k) in self._arc_dict if k == i))

    def edges(self):
        """Undirected edge list as (i, j) with i < j."""
        return sorted({(min(i, j), max(i, j)) for (i, j), _ in self.arcs})

    def node_view(self, i):
        d = tuple(sorted((j, self._arc_dict[(j, i)]) for (j, k) in self._arc_dict if k == i))
        return NodeView(node=i, h=self.threshold(i), d=d)

    def node_views(self):
        return [self.node_view(i) for i in range(1, self.n + 1)]

    def with_b(self, b):
        return Instance(n=self.n, arcs=self.arcs, h=self.h, b=b)

    def is_preprocessed(self):
        return all(w <= self.threshold(j) for (_, j), w in self.arcs)


def make_instance(n, arc_weights, thresholds, b):
    """Build an Instance from a dict {(i, j): d_ij} and {i: h_i}."""
    arcs = tuple(sorted(arc_weights.items()))
    h = tuple(thresholds[i] for i in range(1, n + 1))
    return Instance(n=n, arcs=arcs, h=h, b=b)


def preprocess(instance):
    """Clamp every incoming weight to the receiver's threshold.

    Any d_ji > h_i is replaced by h_i; idempotent and otherwise lossless
    (weights above the threshold can never matter for activation).
    """
    new_arcs = tuple(
        ((i, j), min(w, instance.threshold(j))) for (i, j), w in instance.arcs
    )
    return Instance(n=instance.n, arcs=new_arcs, h=instance.h, b=instance.b)


def generate_small_world(n, v, q, a, seed, threshold_spread="variance"):
    """Generate a Watts-Strogatz LCIM instance.

    A ring lattice on n nodes with mean degree v is rewired with probability
    q per edge; each undirected edge becomes two directed arcs with i.i.d.
    weights uniform on {1,...,10}.  Thresholds follow a normal law with mean
    0.7 * (incoming weight sum) and, by default, variance (incoming weight
    sum)/degree; pass threshold_spread="stddev" to read the second parameter
    as a standard deviation instead.  b = ceil(a * n).  The result is already
    preprocessed and is a pure function of the seed.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    if v % 2 != 0 or v >= n:
        raise ValueError("mean degree v must be even and smaller than n")
    if not (0.0 <= q <= 1.0):
        raise ValueError("rewiring probability q must lie in [0, 1]")
    if not (0.0 < a <= 1.0):
        raise ValueError("penetration rate a must lie in (0, 1]")
    if threshold_spread not in ("variance", "stddev"):
        raise ValueError("threshold_spread must be 'variance' or 'stddev'")

    rng = np.random.default_rng(seed)
    g = nx.watts_strogatz_graph(n, v, q, seed=rng)

    arc_weights = {}
    for u, w in sorted(g.edges()):
        # networkx nodes are 0-based
        i, j = u + 1, w + 1
        arc_weights[(i, j)] = int(rng.integers(1, 11))
        arc_weights[(j, i)] = int(rng.integers(1, 11))

    thresholds = {}
    for node in range(1, n + 1):
        incoming = [w for (i, j), w in arc_weights.items() if j == node]
        vi = len(incoming)
        delta = sum(incoming)
        if vi == 0:
            raise ValueError(f"generated graph left node {node} isolated")
        spread = delta / vi
        scale = math.sqrt(spread) if threshold_spread == "variance" else spread
        upsilon = rng.normal(0.7 * delta, scale)
        hi = math.ceil(max(1.0, min(upsilon, float(delta))))
        if vi >= 2:
            # keep the strict slack sum(d) > h the cut machinery assumes
            hi = min(hi, delta - 1)
        thresholds[node] = max(1, hi)

    b = math.ceil(a * n)
    inst = make_instance(n, arc_weights, thresholds, b)
    return preprocess(inst)


def save(instance, path):
    """Write the line-oriented text format (see load)."""
    lines = ["lcim 1", f"{instance.n} {instance.m} {instance.b}"]
    for i in range(1, instance.n + 1):
        lines.append(f"{i} {instance.threshold(i)}")
    for (i, j), w in instance.arcs:
        lines.append(f"{i} {j} {w}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def loads(text, source="<string>"):
    """Parse an instance from text.

    Format: `lcim 1` magic, then `n m b`, then n threshold lines `i h_i`,
    then m arc lines `i j d_ij`.  `#` starts a comment line.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append((lineno, stripped))
    if not rows:
        raise ParseError(0, "empty file")

    it = iter(rows)
    lineno, magic = next(it)
    if magic.split() != ["lcim", "1"]:
        raise ParseError(lineno, f"bad magic {magic!r}, expected 'lcim 1'")
    try:
        lineno, header = next(it)
    except StopIteration:
        raise ParseError(lineno, "missing header line") from None
    parts = header.split()
    if len(parts) != 3:
        raise ParseError(lineno, "header must be '<n> <m> <b>'")
    try:
        n, m, b = (int(p) for p in parts)
    except ValueError:
        raise ParseError(lineno, "header fields must be integers") from None

    thresholds = {}
    for _ in range(n):
        try:
            lineno, row = next(it)
        except StopIteration:
            raise ParseError(lineno, "unexpected end of file in threshold block") from None
        parts = row.split()
        if len(parts) != 2:
            raise ParseError(lineno, "threshold line must be '<node> <h>'")
        try:
            i, hi = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, "threshold fields must be integers") from None
        if i in thresholds:
            raise ParseError(lineno, f"duplicate threshold for node {i}")
        thresholds[i] = hi

    arc_weights = {}
    for _ in range(m):
        try:
            lineno, row = next(it)
        except StopIteration:
            raise ParseError(lineno, "unexpected end of file in arc block") from None
        parts = row.split()
        if len(parts) != 3:
            raise ParseError(lineno, "arc line must be '<i> <j> <d>'")
        try:
            i, j, w = (int(p) for p in parts)
        except ValueError:
            raise ParseError(lineno, "arc fields must be integers") from None
        if (i, j) in arc_weights:
            raise ParseError(lineno, f"duplicate arc ({i},{j})")
        arc_weights[(i, j)] = w

    leftover = list(it)
    if leftover:
        raise ParseError(leftover[0][0], "trailing content after arc block")
    if sorted(thresholds) != list(range(1, n + 1)):
        raise ParseError(0, "threshold block does not cover nodes 1..n exactly")

    try:
        inst = make_instance(n, arc_weights, thresholds, b)
    except ValueError as exc:
        raise ParseError(0, f"{source}: {exc}") from None

    for i in range(1, n + 1):
        view = inst.node_view(i)
        if view.degree >= 2 and sum(view.weights) <= view.h:
            import warnings

            warnings.warn(
                f"node {i}: neighbor weights sum {sum(view.weights)} does not "
                f"exceed threshold {view.h}",
                stacklevel=2,
            )
    return inst


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), source=str(path))
