"""Graph representation, generators, products and retraction checks.

Graphs are simple and undirected.  Loops are never stored: the right of every
agent to stay put is a rule of the game engine, not an edge.  Vertices are the
integers ``0..n-1``; all-pairs hop distances are computed eagerly.
"""
from __future__ import annotations

import hashlib
import re
from collections import deque
from dataclasses import dataclass, field
from itertools import product as _product
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphError

#: Distance value used for pairs in different components.
INF = 2**30

#: Guard against accidental blow-up when multiplying graphs.
PRODUCT_VERTEX_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    dist: np.ndarray = field(repr=False)
    name: str = ""
    labels: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.dist.setflags(write=False)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def closed_neighborhood(self, v: int) -> tuple[int, ...]:
        return tuple(sorted((v, *self.adjacency[v])))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_connected(self) -> bool:
        return bool((self.dist[0] < INF).all())

    def is_tree(self) -> bool:
        return self.is_connected() and self.m == self.n - 1

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``vertices``, plus the new-index -> old-index list."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return build_graph(len(keep), edges), keep

    def to_edge_list(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        """Stable hash of the vertex count and edge set (names and labels excluded)."""
        return hashlib.sha256(self.to_edge_list().encode()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.n, self.adjacency))

    def vertex_label(self, v: int) -> str:
        if self.labels is None:
            return str(v)
        return f"{v}{self.labels[v]}"


def _bfs_distances(n: int, adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    dist = np.full((n, n), INF, dtype=np.int64)
    for s in range(n):
        row = dist[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = row[u] + 1
            for w in adjacency[u]:
                if row[w] == INF:
                    row[w] = du
                    queue.append(w)
    return dist


def build_graph(n: int, edges: Iterable[tuple[int, int]], name: str = "", labels=None) -> Graph:
    if n < 1:
        raise GraphError("a graph needs at least one vertex")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}; staying put is implicit")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    return Graph(n, adjacency, _bfs_distances(n, adjacency), name=name, labels=labels)


# -- generators ---------------------------------------------------------------

def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)], name=f"path:{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need at least 3 vertices")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle:{n}")


def clique_graph(n: int) -> Graph:
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)], name=f"clique:{n}")


def spider_graph(legs: Sequence[int]) -> Graph:
    """Star of paths.  Vertex 0 is the root; legs are numbered leg-major,
    each leg listed from the vertex next to the root out to its leaf."""
    if not legs or any(length < 1 for length in legs):
        raise GraphError("spider legs must be positive lengths")
    edges = []
    nxt = 1
    for length in legs:
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    if len(set(legs)) == 1:
        name = f"spider:{len(legs)}x{legs[0]}"
    else:
        name = "spider:" + ",".join(map(str, legs))
    return build_graph(nxt, edges, name=name)


def tree_from_parents(parents: Sequence[int]) -> Graph:
    """Tree from a parent array; the root has parent -1."""
    n = len(parents)
    roots = [v for v, p in enumerate(parents) if p == -1]
    if len(roots) != 1:
        raise GraphError("parent array needs exactly one root (parent -1)")
    edges = []
    for v, p in enumerate(parents):
        if p == -1:
            continue
        if not 0 <= p < n or p == v:
            raise GraphError(f"bad parent {p} for vertex {v}")
        edges.append((p, v))
    g = build_graph(n, edges, name="tree:" + ",".join(map(str, parents)))
    if not g.is_tree():
        raise GraphError("parent array does not describe a tree")
    return g


def _graph_product(g: Graph, h: Graph, strong: bool, limit: int) -> Graph:
    if g.n * h.n > limit:
        raise GraphError(f"product would have {g.n * h.n} vertices (limit {limit})")
    nh = h.n
    edges = []
    for u, up in _product(range(g.n), range(h.n)):
        a = u * nh + up
        for vp in h.adjacency[up]:
            edges.append((a, u * nh + vp))
        for v in g.adjacency[u]:
            edges.append((a, v * nh + up))
            if strong:
                for vp in h.adjacency[up]:
                    edges.append((a, v * nh + vp))
    glab = g.labels or tuple((i,) for i in range(g.n))
    hlab = h.labels or tuple((i,) for i in range(h.n))
    labels = tuple(gl + hl for gl, hl in _product(glab, hlab))
    op = "*" if strong else "+"
    return build_graph(g.n * nh, [e for e in edges if e[0] < e[1]], name=f"({g.name}{op}{h.name})", labels=labels)


def strong_product(g: Graph, h: Graph, limit: int = PRODUCT_VERTEX_LIMIT) -> Graph:
    """Strong product; vertex ``(u, u')`` gets index ``u * h.n + u'``."""
    return _graph_product(g, h, True, limit)


def cartesian_product(g: Graph, h: Graph, limit: int = PRODUCT_VERTEX_LIMIT) -> Graph:
    """Cartesian product; vertex ``(u, u')`` gets index ``u * h.n + u'``."""
    return _graph_product(g, h, False, limit)


def _fold(graphs: Sequence[Graph], op) -> Graph:
    # binary products composed left to right
    out = graphs[0]
    for h in graphs[1:]:
        out = op(out, h)
    return out


_SPEC = re.compile(r"^\s*([a-z]+)\s*:\s*(.+?)\s*$")


def _ints(text: str, sep: str) -> list[int]:
    try:
        return [int(x) for x in text.split(sep)]
    except ValueError:
        raise GraphError(f"malformed parameters {text!r}") from None


def generate(spec: str) -> Graph:
    """Build a graph from a generator spec such as ``path:7`` or ``king:4x5``.

    Families: ``path:n``, ``cycle:n``, ``clique:n``, ``spider:BxL`` (B legs of
    length L) or ``spider:L1,L2,...``, ``tree:p0,p1,...`` (parent array),
    ``grid:AxB[xC...]`` (Cartesian product of paths) and ``king:AxB[xC...]``
    (strong product of paths).
    """
    m = _SPEC.match(spec)
    if not m:
        raise GraphError(f"malformed generator spec {spec!r}")
    family, params = m.groups()
    if family == "tree":
        return tree_from_parents(_ints(params, ","))
    if family == "spider" and "x" not in params:
        return spider_graph(_ints(params, ","))
    nums = _ints(params, "x")
    if any(x < 1 for x in nums):
        raise GraphError(f"parameters must be positive in {spec!r}")
    if family in ("path", "cycle", "clique"):
        if len(nums) != 1:
            raise GraphError(f"{family} takes one parameter")
        return {"path": path_graph, "cycle": cycle_graph, "clique": clique_graph}[family](nums[0])
    if family == "spider":
        if len(nums) != 2:
            raise GraphError("spider takes BxL")
        return spider_graph([nums[1]] * nums[0])
    if family in ("grid", "king"):
        if len(nums) < 2:
            raise GraphError(f"{family} takes at least two side lengths")
        op = cartesian_product if family == "grid" else strong_product
        g = _fold([path_graph(x) for x in nums], op)
        return build_graph(g.n, g.edges, name=spec.strip(), labels=g.labels)
    raise GraphError(f"unknown graph family {family!r}")


def parse_edge_list(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty edge list")
    try:
        n, m = map(int, lines[0].split())
        edges = [tuple(map(int, ln.split())) for ln in lines[1:]]
    except ValueError:
        raise GraphError("edge list lines must hold two integers") from None
    if len(edges) != m or any(len(e) != 2 for e in edges):
        raise GraphError(f"header promises {m} edges, found {len(edges)}")
    return build_graph(n, edges)


def load_graph(source: str) -> Graph:
    """Generator spec, or a path to an edge-list file."""
    if _SPEC.match(source) and not source.endswith((".txt", ".edges")):
        try:
            return generate(source)
        except GraphError:
            pass
    try:
        with open(source) as fh:
            return parse_edge_list(fh.read())
    except FileNotFoundError:
        raise GraphError(f"{source!r} is neither a generator spec nor a readable file") from None


# -- metrics ------------------------------------------------------------------

def eccentricity_profile(g: Graph) -> tuple[int, int, frozenset[int]]:
    """Return ``(radius, diameter, center)``."""
    if not g.is_connected():
        raise GraphError("eccentricities need a connected graph")
    ecc = g.dist.max(axis=1)
    radius = int(ecc.min())
    return radius, int(ecc.max()), frozenset(int(v) for v in np.flatnonzero(ecc == radius))


def radius_of(g: Graph, vertices: Iterable[int]) -> int:
    """Radius of the subgraph induced by ``vertices``."""
    sub, _ = g.induced(vertices)
    return eccentricity_profile(sub)[0]


def is_connected_subset(g: Graph, vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    if not vs:
        return False
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vs


# -- retractions --------------------------------------------------------------

@dataclass(frozen=True)
class VertexMap:
    source: Graph
    target: frozenset[int]
    mapping: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.mapping[v]

    def compose(self, after: "VertexMap") -> "VertexMap":
        """``after`` applied to the output of ``self``."""
        return VertexMap(self.source, after.target, tuple(after.mapping[x] for x in self.mapping))


@dataclass
class RetractionCheck:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_retraction(m: VertexMap) -> RetractionCheck:
    g = m.source
    if len(m.mapping) != g.n:
        return RetractionCheck(False, f"map has {len(m.mapping)} entries for {g.n} vertices")
    for v, fv in enumerate(m.mapping):
        if fv not in m.target:
            return RetractionCheck(False, f"vertex {v} maps to {fv}, outside the target")
    for v in sorted(m.target):
        if m.mapping[v] != v:
            return RetractionCheck(False, f"target vertex {v} is moved to {m.mapping[v]}")
    for u, v in g.edges:
        fu, fv = m.mapping[u], m.mapping[v]
        if fu != fv and not g.has_edge(fu, fv):
            return RetractionCheck(False, f"edge ({u}, {v}) maps to non-edge ({fu}, {fv})")
    return RetractionCheck(True)


def verify_retraction(m: VertexMap) -> bool:
    return bool(check_retraction(m))


def identity_map(g: Graph) -> VertexMap:
    return VertexMap(g, frozenset(range(g.n)), tuple(range(g.n)))


def find_retraction(g: Graph, target: Iterable[int]) -> VertexMap | None:
    """Search for a retraction of ``g`` onto the induced subgraph on ``target``.

    Tries nearest-vertex projection first (exact for trees and for parts that
    hang off the rest of the graph at single vertices), then backtracking.
    """
    tgt = frozenset(target)
    order = sorted(tgt)
    mapping = []
    for v in range(g.n):
        if v in tgt:
            mapping.append(v)
        else:
            mapping.append(min(order, key=lambda u: (g.dist[v, u], u)))
    guess = VertexMap(g, tgt, tuple(mapping))
    if verify_retraction(guess):
        return guess

    free = sorted((v for v in range(g.n) if v not in tgt), key=lambda v: min(g.dist[v, u] for u in tgt))
    assign = {v: v for v in tgt}

    def ok(v, x):
        for w in g.adjacency[v]:
            if w in assign:
                y = assign[w]
                if x != y and not g.has_edge(x, y):
                    return False
        return True

    def search(i):
        if i == len(free):
            return True
        v = free[i]
        for x in sorted(order, key=lambda u: (g.dist[v, u], u)):
            if ok(v, x):
                assign[v] = x
                if search(i + 1):
                    return True
                del assign[v]
        return False

    if search(0):
        return VertexMap(g, tgt, tuple(assign[v] for v in range(g.n)))
    return None


def grid_index(n: int, x: int, y: int) -> int:
    """Index of 1-based grid coordinate ``(x, y)`` in ``grid:mxn``."""
    return (x - 1) * n + (y - 1)


def _peel_last_row(m: int, n: int, rows: int, cols: int) -> dict:
    # retraction of the rows x cols corner onto rows-1 x cols, 1-based coordinates
    f = {}
    for y in range(1, cols + 1):
        f[(rows, y)] = (rows - 1, y + 1) if y < cols else (rows - 1, cols - 1)
    return f


def subgrid_retraction(m: int, n: int, a: int, b: int) -> VertexMap:
    """Retraction of ``grid:mxn`` onto its ``a x b`` corner subgrid.

    Rows are peeled from ``m`` down to ``a``, then columns from ``n`` down to
    ``b``; each single step sends ``(r, y)`` to ``(r-1, y+1)`` for ``y`` below
    the last column and the corner to ``(r-1, c-1)``.
    """
    if not (m > 2 and n > 2 and 2 < a <= m and 2 < b <= n):
        raise GraphError(f"need 2 < a <= m and 2 < b <= n, got m={m} n={n} a={a} b={b}")
    cur = {(x, y): (x, y) for x in range(1, m + 1) for y in range(1, n + 1)}
    rows, cols = m, n
    while rows > a:
        step = _peel_last_row(m, n, rows, cols)
        cur = {p: step.get(q, q) for p, q in cur.items()}
        rows -= 1
    while cols > b:
        # transpose the row rule
        step = {(y, x): (y2, x2) for (x, y), (x2, y2) in _peel_last_row(n, m, cols, rows).items()}
        cur = {p: step.get(q, q) for p, q in cur.items()}
        cols -= 1
    g = generate(f"grid:{m}x{n}")
    mapping = tuple(grid_index(n, *cur[(x, y)]) for x in range(1, m + 1) for y in range(1, n + 1))
    target = frozenset(grid_index(n, x, y) for x in range(1, a + 1) for y in range(1, b + 1))
    return VertexMap(g, target, mapping)
