"""Closed forms, decomposition bounds and combinatorial lemmas for eternal cop numbers.

Every bound is returned as a :class:`BoundReport` so it can be checked
against the exact solver.  Rational bounds keep exact fractions; ``value`` is
their integer ceiling.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .engine import capt_k, cop_number, single_play_value
from .errors import BoundError, BudgetExceeded, GraphError
from .graph import (
    Graph,
    VertexMap,
    check_retraction,
    eccentricity_profile,
    find_retraction,
    is_connected_subset,
    radius_of,
)

EXACT, UPPER, LOWER = "exact", "upper", "lower"

#: Largest tree solved by exact ball-cover search in :func:`tree_bound`.
TREE_SEARCH_LIMIT = 25


@dataclass
class BoundReport:
    name: str
    kind: str
    value: int
    certificate: dict = field(default_factory=dict)
    rational: Fraction | None = None
    exact_value: int | None = None

    def holds_for(self, exact: int) -> bool:
        if self.kind == UPPER:
            return self.value >= exact
        if self.kind == LOWER:
            return self.value <= exact
        return self.value == exact

    def as_dict(self) -> dict:
        doc = {"name": self.name, "kind": self.kind, "value": self.value, "certificate": self.certificate}
        if self.rational is not None:
            doc["numerator"] = self.rational.numerator
            doc["denominator"] = self.rational.denominator
        if self.exact_value is not None:
            doc["exact"] = self.exact_value
            doc["consistent"] = self.holds_for(self.exact_value)
        return doc

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, default=str)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


# -- time budgets and sequences -------------------------------------------------

def ell(i: int, t: int) -> int:
    """Attack-phase length ``ceil((1 - 2**-i) * t - 1/2)`` of level ``i``."""
    if i < 1 or t < 1:
        raise ValueError("i and t must be positive")
    return _ceil((1 - Fraction(1, 2**i)) * t - Fraction(1, 2))


def max_level(t: int) -> int:
    """Smallest level whose attack phase already has length ``t``; higher levels add nothing."""
    i = 1
    while ell(i, t) < t:
        i += 1
    return i


def maxseq(t: int) -> int:
    """Longest sum-decreasing sequence starting at ``t``: ``floor(log2 t) + 1``."""
    if t < 1:
        raise ValueError("t must be positive")
    return t.bit_length()


MAXSEQ_ORACLE_LIMIT = 256


def maxseq_oracle(t: int) -> int:
    """Longest sum-decreasing sequence starting at ``t``, by exhaustive search."""
    if t < 1:
        raise ValueError("t must be positive")
    if t > MAXSEQ_ORACLE_LIMIT:
        raise BudgetExceeded(f"oracle limited to t <= {MAXSEQ_ORACLE_LIMIT}")

    # slack: the largest next term every earlier term still allows
    @lru_cache(maxsize=None)
    def longest(slack: int) -> int:
        best = 0
        for x in range(1, slack + 1):
            best = max(best, 1 + longest(min(slack - x, x - 1)))
        return best

    return 1 + longest(t - 1)


def is_sum_decreasing(seq: Sequence[int]) -> bool:
    return all(x >= 1 and sum(seq[i + 1:]) < x for i, x in enumerate(seq))


# -- paths and cycles -----------------------------------------------------------

def path_value(n: int, t: int) -> int:
    if n < 1 or t < 1:
        raise ValueError("n and t must be positive")
    return -(-n // (t + 1))


def cycle_value(n: int, t: int) -> int:
    """Exact eternal cop number of the ``n``-cycle (``n = 3`` treated as a clique)."""
    if n < 3 or t < 1:
        raise ValueError("need n >= 3 and t >= 1")
    if n == 3:
        return 1
    if n <= 6:
        return 2
    if t >= -(-n // 2) - 2:
        return 2
    return -(-(n - 3) // (2 * t + 1)) + 1


def path_report(n: int, t: int) -> BoundReport:
    return BoundReport("path", EXACT, path_value(n, t), {"n": n, "t": t})


def cycle_report(n: int, t: int) -> BoundReport:
    if n <= 3:
        regime = "clique"
    elif n <= 6:
        regime = "small-cycle"
    elif t >= -(-n // 2) - 2:
        regime = "large-t"
    else:
        regime = "small-t"
    return BoundReport("cycle", EXACT, cycle_value(n, t), {"n": n, "t": t, "regime": regime})


def distance_dominates(g: Graph, s: Iterable[int], t: int) -> bool:
    s = list(s)
    if not s:
        raise ValueError("dominating set must be nonempty")
    return bool((g.dist[s].min(axis=0) <= t).all())


# -- retract decompositions -------------------------------------------------------

def retract_sum_bound(values: Sequence[int]) -> BoundReport:
    if not values or any(v < 1 for v in values):
        raise ValueError("each part needs a positive value")
    return BoundReport("retract-sum", UPPER, sum(values), {"parts": list(values)})


def in_level_class(g: Graph, i: int, k: int, t: int) -> bool:
    """Can ``k`` cops win a single play on ``g`` within ``ell(i, t)`` steps?

    An attack phase of length 0 is only won when the cops cover every vertex.
    """
    steps = ell(i, t)
    if steps == 0:
        return k >= g.n
    return single_play_value(g, k, steps)


def recurrent_attack_bound(g: Graph, t: int, i: int, k: int) -> BoundReport:
    if not in_level_class(g, i, k, t):
        raise BoundError(f"{k} cops cannot win a single play within ell({i}, {t}) = {ell(i, t)} steps")
    return BoundReport("recurrent-attack", UPPER, i * k, {"i": i, "k": k, "ell": ell(i, t)})


def best_level_parameters(g: Graph, t: int) -> tuple[int, int]:
    """Cheapest ``(i, k)`` with ``g`` in the level class: least ``i*k``, then least ``i``."""
    best = None
    for i in range(1, max_level(t) + 1):
        for k in range(1, g.n + 1):
            if best is not None and i * k >= best[0] * best[1]:
                break
            if in_level_class(g, i, k, t):
                if best is None or (i * k, i) < (best[0] * best[1], best[0]):
                    best = (i, k)
                break
    return best


@dataclass
class Part:
    vertices: frozenset[int]
    i: int
    k: int
    retraction: VertexMap | None = None


@dataclass
class Decomposition:
    parts: list[Part]

    def alpha(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for p in self.parts:
            out[(p.i, p.k)] = out.get((p.i, p.k), 0) + 1
        return out


def validate_decomposition(g: Graph, d: Decomposition, t: int, check_levels: bool = True) -> list[str]:
    """Problems with ``d`` as a retract decomposition of ``g``; empty when valid."""
    problems = []
    seen: set[int] = set()
    for idx, p in enumerate(d.parts):
        if seen & p.vertices:
            problems.append(f"part {idx} overlaps an earlier part")
        seen |= p.vertices
        if not is_connected_subset(g, p.vertices):
            problems.append(f"part {idx} does not induce a connected subgraph")
            continue
        if p.retraction is None:
            p.retraction = find_retraction(g, p.vertices)
        if p.retraction is None:
            problems.append(f"part {idx} is not a retract")
        else:
            chk = check_retraction(p.retraction)
            if not chk or p.retraction.target != p.vertices:
                problems.append(f"part {idx}: {chk.reason or 'retraction targets other vertices'}")
        if check_levels:
            sub, _ = g.induced(p.vertices)
            if not in_level_class(sub, p.i, p.k, t):
                problems.append(f"part {idx} is not won by {p.k} cop(s) within ell({p.i}, {t}) = {ell(p.i, t)} steps")
    if seen != set(range(g.n)):
        problems.append(f"parts miss vertices {sorted(set(range(g.n)) - seen)}")
    return problems


def retract_parameter_bound(g: Graph, d: Decomposition, t: int) -> BoundReport:
    problems = validate_decomposition(g, d, t)
    if problems:
        raise BoundError("invalid decomposition: " + "; ".join(problems))
    alpha = d.alpha()
    return BoundReport(
        "retract-parameters", UPPER, sum(i * k * a for (i, k), a in alpha.items()),
        {"alpha": {f"{i},{k}": a for (i, k), a in sorted(alpha.items())},
         "parts": [sorted(p.vertices) for p in d.parts]})


def decompose_with_best_levels(g: Graph, parts: Sequence[Iterable[int]], t: int) -> Decomposition:
    """Attach the cheapest level parameters to each part of a vertex partition."""
    out = []
    for vs in parts:
        vs = frozenset(vs)
        sub, _ = g.induced(vs)
        i, k = best_level_parameters(sub, t)
        out.append(Part(vs, i, k))
    return Decomposition(out)


# -- trees ------------------------------------------------------------------------

def radius_level(r: int, t: int) -> int | None:
    """Least level whose attack phase reaches radius ``r``; None if even ``t`` is too short."""
    for i in range(1, max_level(t) + 1):
        if r <= ell(i, t):
            return i
    return None


def _require_tree(g: Graph) -> None:
    if not g.is_tree():
        raise GraphError("input is not a tree")


def _balls(tree: Graph, t: int) -> list[tuple[int, frozenset[int], int]]:
    # one ball per (level, centre); a larger radius at the same level dominates
    out = []
    radii = sorted({ell(i, t) for i in range(1, max_level(t) + 1)})
    for r in radii:
        i = radius_level(r, t)
        for v in range(tree.n):
            ball = frozenset(int(u) for u in (tree.dist[v] <= r).nonzero()[0])
            out.append((i, ball, v))
    # drop balls contained in a ball of no greater weight
    keep = []
    for w, b, v in sorted(out, key=lambda x: (x[0], -len(x[1]), x[2])):
        if not any(w2 <= w and b <= b2 for w2, b2, _ in keep):
            keep.append((w, b, v))
    return keep


def _min_ball_cover(tree: Graph, t: int) -> list[tuple[int, frozenset[int], int]]:
    balls = _balls(tree, t)
    by_vertex = {v: [b for b in balls if v in b[1]] for v in range(tree.n)}
    max_ratio = max(len(b) / w for w, b, _ in balls)
    best: list = [None, math.inf]

    def search(uncovered: frozenset, chosen: list, cost: int):
        if not uncovered:
            if cost < best[1]:
                best[0], best[1] = list(chosen), cost
            return
        if cost + math.ceil(len(uncovered) / max_ratio) >= best[1]:
            return
        v = min(uncovered, key=lambda u: (len(by_vertex[u]), u))
        opts = sorted(by_vertex[v], key=lambda b: (-len(b[1] & uncovered) / b[0], b[0], b[2]))
        for w, b, c in opts:
            chosen.append((w, b, c))
            search(uncovered - b, chosen, cost + w)
            chosen.pop()

    search(frozenset(range(tree.n)), [], 0)
    return best[0]


def _greedy_ball_cover(tree: Graph, t: int) -> list[tuple[int, frozenset[int], int]]:
    r = ell(1, t)
    uncovered = set(range(tree.n))
    chosen = []
    while uncovered:
        v = max(range(tree.n), key=lambda c: (len(uncovered & set((tree.dist[c] <= r).nonzero()[0])), -c))
        ball = frozenset(int(u) for u in (tree.dist[v] <= r).nonzero()[0])
        chosen.append((1, ball, v))
        uncovered -= ball
    return chosen


def cover_to_partition(tree: Graph, cover: Sequence[tuple[int, frozenset[int]]]) -> list[frozenset[int]]:
    """Turn a cover by balls ``(centre, ball)`` into disjoint subtrees.

    Each vertex joins the ball where it sits deepest (radius minus distance to
    the centre), earlier balls winning ties. The next vertex towards a centre is
    then strictly deeper in that ball than in any rival, so every part contains
    its centre, is connected and stays inside its ball.
    """
    radius = [max(int(tree.dist[c, u]) for u in b) for c, b in cover]
    owner: dict[int, int] = {}
    for v in range(tree.n):
        best = max((radius[j] - int(tree.dist[c, v]), -j) for j, (c, b) in enumerate(cover) if v in b)
        owner[v] = -best[1]
    parts = [frozenset(v for v in range(tree.n) if owner[v] == j) for j in range(len(cover))]
    return [p for p in parts if p]


def tree_bound(tree: Graph, t: int) -> tuple[Decomposition, BoundReport]:
    """Split a tree into subtrees, each costing the least level covering its radius."""
    _require_tree(tree)
    if t < 1:
        raise ValueError("t must be positive")
    optimal = tree.n <= TREE_SEARCH_LIMIT
    cover = _min_ball_cover(tree, t) if optimal else _greedy_ball_cover(tree, t)
    pieces = cover_to_partition(tree, [(c, b) for _, b, c in cover])
    parts = []
    for vs in pieces:
        i = radius_level(radius_of(tree, vs), t)
        parts.append(Part(vs, i, 1))
    decomp = Decomposition(parts)
    value = sum(p.i for p in parts)
    alpha = {}
    for p in parts:
        alpha[p.i] = alpha.get(p.i, 0) + 1
    report = BoundReport("tree-decomposition", UPPER, value,
                         {"alpha": {str(i): a for i, a in sorted(alpha.items())},
                          "parts": [sorted(p.vertices) for p in parts], "optimal": optimal})
    return decomp, report


def single_ball_level(tree: Graph, t: int) -> int | None:
    return radius_level(eccentricity_profile(tree)[0], t)


def lower_threshold(i: int, t: int) -> Fraction:
    """Least branch depth for which ``i`` cops lose: ``(1 - 2**-i) * t + 1 - 2**-i``."""
    q = 1 - Fraction(1, 2**i)
    return q * t + q


def _dispersed(g: Graph, size: int, gap: int) -> list[int] | None:
    # size vertices pairwise at distance >= gap, by backtracking
    n = g.n
    chosen: list[int] = []

    def go(start):
        if len(chosen) == size:
            return True
        for v in range(start, n):
            if all(g.dist[v, u] >= gap for u in chosen):
                chosen.append(v)
                if go(v + 1):
                    return True
                chosen.pop()
        return False

    return list(chosen) if go(0) else None


def tree_lower_bound(tree: Graph, t: int) -> BoundReport:
    """Lower bound ``i + 1`` from ``i + 1`` vertices pairwise ``2*depth`` apart."""
    _require_tree(tree)
    diameter = int(tree.dist.max())
    best = BoundReport("tree-dispersion", LOWER, 1, {"i": 0})
    i = 1
    while True:
        depth = max(1, _ceil(lower_threshold(i, t)))
        if 2 * depth > diameter:
            break
        witness = _dispersed(tree, i + 1, 2 * depth)
        if witness is None:
            # more vertices at a larger gap cannot exist either
            break
        slack = lower_threshold(i, t) - ell(i, t)
        best = BoundReport("tree-dispersion", LOWER, i + 1,
                           {"i": i, "depth": depth, "witness": witness, "epsilon": str(slack)})
        i += 1
    return best


# -- products -----------------------------------------------------------------------

def strong_grid_bounds(dims: Sequence[int], t: int) -> tuple[BoundReport, BoundReport]:
    if not dims or any(d < 1 for d in dims) or t < 1:
        raise ValueError("dimensions and t must be positive")
    low = Fraction(math.prod(dims), (2 * t + 1) ** len(dims))
    high = math.prod(-(-d // (t + 1)) for d in dims)
    cert = {"dims": list(dims), "t": t}
    return (BoundReport("strong-grid-lower", LOWER, max(1, _ceil(low)), cert, rational=low),
            BoundReport("strong-grid-upper", UPPER, high, cert))


def strong_product_value(values: Sequence[int]) -> BoundReport:
    """Eternal value of a strong product whose factors all have value 1 except possibly the first."""
    if not values or values[0] < 1 or any(v != 1 for v in values[1:]):
        raise BoundError("every factor after the first must have eternal value 1")
    return BoundReport("strong-product", EXACT, values[0],
                       {"factor_values": list(values),
                        "strategy": "each cop follows its shadow strategies in every factor at once"})


def cartesian_grid_bounds(m: int, n: int, t: int) -> tuple[BoundReport, BoundReport]:
    if m < 2 or n < 2 or t < 1:
        raise ValueError("need m, n >= 2 and t >= 1")
    low = Fraction(m * n, 2 * t * t + 2 * t + 1)
    high = Fraction(64 * m * n, 9 * t * t + 12 * t + 4)
    cert = {"m": m, "n": n, "t": t, "ball_size": 2 * t * (t + 1) + 1}
    return (BoundReport("cartesian-grid-lower", LOWER, max(1, _ceil(low)), cert, rational=low),
            BoundReport("cartesian-grid-upper", UPPER, _ceil(high), cert, rational=high))


# -- everything that applies to one graph ----------------------------------------------

def distance_domination_number(g: Graph, t: int) -> int:
    """Fewest vertices within distance ``t`` of every vertex (exhaustive)."""
    for size in range(1, g.n + 1):
        for s in itertools.combinations(range(g.n), size):
            if distance_dominates(g, s, t):
                return size
    return g.n  # pragma: no cover


def _path_or_cycle(g: Graph) -> str | None:
    if max((g.degree(v) for v in range(g.n)), default=0) > 2 or not g.is_connected():
        return None
    return "path" if g.m == g.n - 1 else "cycle"


def _grid_dims(g: Graph) -> tuple[str, list[int]] | None:
    for family in ("grid", "king"):
        if g.name.startswith(family + ":"):
            return family, [int(x) for x in g.name.split(":", 1)[1].split("x")]
    return None


def applicable_bounds(g: Graph, t: int) -> list[BoundReport]:
    """Every bound in this module whose hypotheses ``g`` meets, for horizon ``t``."""
    reports = [BoundReport("order", UPPER, g.n, {"n": g.n})]
    reports.append(BoundReport("cop-number", LOWER, cop_number(g), {}))
    reports.append(BoundReport("distance-domination", LOWER, distance_domination_number(g, t), {"t": t}))
    i, k = best_level_parameters(g, t)
    reports.append(BoundReport("recurrent-attack", UPPER, i * k, {"i": i, "k": k, "ell": ell(i, t)}))
    # capture needs at least one step, and only a k below the best upper bound so far can tighten it
    for cops in range(1, min(g.n, i * k) if t >= 2 else 1):
        ck = capt_k(g, cops)
        if 2 * ck <= t:
            reports.append(BoundReport("capture-time", UPPER, cops, {"k": cops, "capt": ck}))
            break
    shape = _path_or_cycle(g)
    if shape == "path":
        reports.append(path_report(g.n, t))
    elif shape == "cycle":
        reports.append(cycle_report(g.n, t))
    if g.is_tree():
        reports.append(tree_bound(g, t)[1])
        reports.append(tree_lower_bound(g, t))
    grid = _grid_dims(g)
    if grid is not None:
        family, dims = grid
        if family == "king":
            reports.extend(strong_grid_bounds(dims, t))
        elif len(dims) == 2 and min(dims) >= 2:
            reports.extend(cartesian_grid_bounds(dims[0], dims[1], t))
    return reports
