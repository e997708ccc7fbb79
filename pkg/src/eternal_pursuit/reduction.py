"""Set-cover gadget graphs and an exhaustive check of the cover/cop-count equivalence.

Vertex layout of :func:`build_reduction` (``a`` elements, ``b`` subsets,
``L = floor(log2 t) + 1``):

* ``0 .. b-1``            subset vertices (a clique)
* ``b .. b+a-1``          element vertices, adjacent to the subsets holding them
* next ``a*(t-1)``        pendant paths, element-major, each listed outward
* last ``L*t``            extra paths, one after another; the first vertex of
                          each is its element end and sees every subset vertex
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .engine import eternal_decision
from .errors import BudgetExceeded, GraphError
from .graph import Graph, build_graph

SUBSET, ELEMENT, ATTACHED, EXTRA = "subset", "element", "attached-path", "additional-path"

ORACLE_LIMIT = 20


@dataclass(frozen=True)
class SetCoverInstance:
    universe: int
    subsets: tuple[frozenset[int], ...]
    k: int = 1

    def __post_init__(self):
        if self.universe < 1 or not self.subsets or self.k < 1:
            raise GraphError("need a nonempty universe, at least one subset and k >= 1")
        covered = frozenset().union(*self.subsets)
        if covered != frozenset(range(1, self.universe + 1)):
            raise GraphError("subsets must cover exactly the elements 1..alpha")

    @property
    def beta(self) -> int:
        return len(self.subsets)

    @classmethod
    def parse(cls, text: str) -> "SetCoverInstance":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        try:
            alpha, beta, k = map(int, lines[0].split())
            subsets = tuple(frozenset(map(int, ln.split())) for ln in lines[1:])
        except (ValueError, IndexError):
            raise GraphError("expected 'alpha beta k' then one line of element ids per subset") from None
        if len(subsets) != beta:
            raise GraphError(f"header promises {beta} subsets, found {len(subsets)}")
        return cls(alpha, subsets, k)

    def format(self) -> str:
        lines = [f"{self.universe} {self.beta} {self.k}"]
        lines += [" ".join(map(str, sorted(s))) for s in self.subsets]
        return "\n".join(lines) + "\n"


def extra_path_count(t: int) -> int:
    return t.bit_length()  # floor(log2 t) + 1


@dataclass
class ReductionGraph:
    graph: Graph
    roles: tuple[str, ...]
    t: int
    instance: SetCoverInstance

    def role_map(self) -> str:
        return json.dumps({"t": self.t, "roles": list(self.roles)}, sort_keys=True)


def expected_order(instance: SetCoverInstance, t: int) -> int:
    return instance.beta + instance.universe + instance.universe * (t - 1) + extra_path_count(t) * t


def expected_size(instance: SetCoverInstance, t: int) -> int:
    b, a, extra = instance.beta, instance.universe, extra_path_count(t)
    clique = b * (b - 1) // 2
    membership = sum(len(s) for s in instance.subsets)
    return clique + membership + a * (t - 1) + extra * (t - 1) + extra * b


def build_reduction(instance: SetCoverInstance, t: int) -> ReductionGraph:
    if t < 1:
        raise ValueError("t must be positive")
    a, b = instance.universe, instance.beta
    roles = [SUBSET] * b + [ELEMENT] * a
    edges = list(itertools.combinations(range(b), 2))
    for j, s in enumerate(instance.subsets):
        edges += [(j, b + e - 1) for e in sorted(s)]
    nxt = b + a
    for e in range(a):
        prev = b + e
        for _ in range(t - 1):
            edges.append((prev, nxt))
            roles.append(ATTACHED)
            prev = nxt
            nxt += 1
    for _ in range(extra_path_count(t)):
        end = nxt
        roles.append(EXTRA)
        edges += [(j, end) for j in range(b)]
        nxt += 1
        prev = end
        for _ in range(t - 1):
            edges.append((prev, nxt))
            roles.append(EXTRA)
            prev = nxt
            nxt += 1
    g = build_graph(nxt, edges, name=f"set-cover-reduction(t={t})")
    red = ReductionGraph(g, tuple(roles), t, instance)
    problems = check_structure(red)
    if problems:
        raise AssertionError("; ".join(problems))
    return red


def check_structure(red: ReductionGraph) -> list[str]:
    """Structural invariants of the construction; empty when all hold."""
    g, roles, inst, t = red.graph, red.roles, red.instance, red.t
    a, b = inst.universe, inst.beta
    problems = []
    if g.n != expected_order(inst, t):
        problems.append(f"{g.n} vertices, expected {expected_order(inst, t)}")
    if g.m != expected_size(inst, t):
        problems.append(f"{g.m} edges, expected {expected_size(inst, t)}")
    subsets = [v for v in range(g.n) if roles[v] == SUBSET]
    if any(not g.has_edge(u, v) for u, v in itertools.combinations(subsets, 2)):
        problems.append("subset vertices do not form a clique")
    for j, s in enumerate(inst.subsets):
        for e in range(1, a + 1):
            if g.has_edge(j, b + e - 1) != (e in s):
                problems.append(f"membership edge between subset {j} and element {e} is wrong")
    base = b + a
    for e in range(a):
        tail = [b + e] + list(range(base + e * (t - 1), base + (e + 1) * (t - 1)))
        if any(not g.has_edge(x, y) for x, y in zip(tail, tail[1:])):
            problems.append(f"attached path of element {e + 1} is broken")
        if t > 1 and int(g.dist[tail[0], tail[-1]]) != t - 1:
            problems.append(f"attached path of element {e + 1} does not reach distance {t - 1}")
    start = base + a * (t - 1)
    for p in range(extra_path_count(t)):
        path = list(range(start + p * t, start + (p + 1) * t))
        if any(not g.has_edge(x, y) for x, y in zip(path, path[1:])):
            problems.append(f"additional path {p} is broken")
        if any(not g.has_edge(path[0], s) for s in subsets):
            problems.append(f"additional path {p} does not see every subset vertex")
    for u, v in g.edges:
        kinds = {roles[u], roles[v]}
        allowed = (kinds == {SUBSET} or kinds == {SUBSET, ELEMENT} or kinds == {ELEMENT, ATTACHED}
                   or kinds == {ATTACHED} or kinds == {EXTRA} or kinds == {SUBSET, EXTRA})
        if not allowed:
            problems.append(f"edge ({u}, {v}) joins {roles[u]} and {roles[v]}")
    return problems


def set_cover_oracle(instance: SetCoverInstance) -> int:
    """Smallest number of subsets covering the universe, by trying every selection."""
    if instance.beta > ORACLE_LIMIT:
        raise BudgetExceeded(f"set-cover oracle limited to {ORACLE_LIMIT} subsets")
    universe = frozenset(range(1, instance.universe + 1))
    for size in range(1, instance.beta + 1):
        for pick in itertools.combinations(instance.subsets, size):
            if frozenset().union(*pick) == universe:
                return size
    raise AssertionError("instance subsets cover the universe")  # pragma: no cover


@dataclass
class ReductionCheck:
    cover: int
    cops: int
    upper_holds: bool
    lower_holds: bool

    def __bool__(self):
        return self.upper_holds and self.lower_holds


def verify_reduction(instance: SetCoverInstance, t: int) -> ReductionCheck:
    """Check that ``cover + floor(log2 t) + 1`` cops win eternally and one fewer do not."""
    red = build_reduction(instance, t)
    cover = set_cover_oracle(instance)
    cops = cover + extra_path_count(t)
    upper = eternal_decision(red.graph, cops, t)
    lower = not eternal_decision(red.graph, cops - 1, t)
    return ReductionCheck(cover, cops, upper, lower)


def small_instances(max_alpha: int, max_beta: int):
    """Every instance with nonempty subsets covering the universe, up to subset reordering."""
    for alpha in range(1, max_alpha + 1):
        nonempty = [frozenset(c) for r in range(1, alpha + 1)
                    for c in itertools.combinations(range(1, alpha + 1), r)]
        for beta in range(1, max_beta + 1):
            for pick in itertools.combinations_with_replacement(nonempty, beta):
                if frozenset().union(*pick) == frozenset(range(1, alpha + 1)):
                    yield SetCoverInstance(alpha, tuple(pick), 1)
