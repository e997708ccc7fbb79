"""Verification suites: closed forms and bounds against the exact solver.

Each suite expands into independent instances (plain tuples, so they can be
shipped to worker processes) and every instance yields one :class:`Check`.
Results come back in instance order whatever the number of workers.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import networkx as nx

from .bounds import (
    cartesian_grid_bounds,
    cycle_value,
    path_value,
    strong_grid_bounds,
    tree_bound,
    tree_lower_bound,
    validate_decomposition,
)
from .engine import eternal_cop_number
from .graph import build_graph, cycle_graph, generate, path_graph, subgrid_retraction, verify_retraction
from .reduction import SetCoverInstance, small_instances, verify_reduction

SUITES = ("paths", "cycles", "trees", "grids", "reduction")

#: The reduction graph grows quickly with t; larger horizons are left to the unit tests.
REDUCTION_MAX_T = 2


@dataclass
class Check:
    suite: str
    instance: str
    t: int
    expected: str
    got: str
    ok: bool


def _paths(max_n, max_t):
    return [("paths", n, t) for n in range(1, max_n + 1) for t in range(1, max_t + 1)]


def _cycles(max_n, max_t):
    return [("cycles", n, t) for n in range(3, max_n + 1) for t in range(1, max_t + 1)]


def _trees(max_n, max_t):
    out = []
    for n in range(2, max_n + 1):
        for tree in nx.nonisomorphic_trees(n):
            edges = tuple(sorted(tuple(sorted(e)) for e in tree.edges()))
            out += [("trees", n, edges, t) for t in range(1, max_t + 1)]
    return out


def _grids(max_n, max_t):
    out = []
    for a in range(2, max_n + 1):
        for b in range(a, max_n // a + 1):
            for t in range(1, max_t + 1):
                out.append(("grids", f"grid:{a}x{b}", t))
                out.append(("grids", f"king:{a}x{b}", t))
    return out


def _reduction(max_n, max_t):
    return [("reduction", inst.universe, tuple(tuple(sorted(s)) for s in inst.subsets), t)
            for inst in small_instances(2, 2) for t in range(1, min(max_t, REDUCTION_MAX_T) + 1)]


_EXPAND = {"paths": _paths, "cycles": _cycles, "trees": _trees, "grids": _grids, "reduction": _reduction}


def instances(suite: str, max_n: int, max_t: int) -> list[tuple]:
    names = SUITES if suite == "all" else (suite,)
    if any(s not in _EXPAND for s in names):
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    return [job for s in names for job in _EXPAND[s](max_n, max_t)]


def run_instance(job: tuple) -> list[Check]:
    kind = job[0]
    if kind == "paths":
        _, n, t = job
        got = eternal_cop_number(path_graph(n), t).value
        want = path_value(n, t)
        return [Check(kind, f"path:{n}", t, str(want), str(got), got == want)]
    if kind == "cycles":
        _, n, t = job
        got = eternal_cop_number(cycle_graph(n), t).value
        want = cycle_value(n, t)
        return [Check(kind, f"cycle:{n}", t, str(want), str(got), got == want)]
    if kind == "trees":
        _, n, edges, t = job
        g = build_graph(n, edges)
        name = "tree:" + ",".join(f"{u}-{v}" for u, v in edges)
        exact = eternal_cop_number(g, t).value
        decomp, upper = tree_bound(g, t)
        lower = tree_lower_bound(g, t)
        problems = validate_decomposition(g, decomp, t, check_levels=False)
        return [
            Check(kind, name, t, f"{lower.value} <= value <= {upper.value}", str(exact),
                  lower.value <= exact <= upper.value),
            Check(kind, name + " partition", t, "valid", "; ".join(problems) or "valid", not problems),
        ]
    if kind == "grids":
        return _grid_checks(job[1], job[2])
    if kind == "reduction":
        _, alpha, subsets, t = job
        inst = SetCoverInstance(alpha, tuple(frozenset(s) for s in subsets))
        res = verify_reduction(inst, t)
        name = f"cover(alpha={alpha}, subsets={[list(s) for s in subsets]})"
        got = f"{res.cops} cops win: {res.upper_holds}, {res.cops - 1} lose: {res.lower_holds}"
        return [Check(kind, name, t, f"{res.cops} cops win, one fewer lose", got, bool(res))]
    raise ValueError(f"unknown instance {job!r}")


def _grid_checks(spec: str, t: int) -> list[Check]:
    g = generate(spec)
    family, dims = spec.split(":")
    a, b = map(int, dims.split("x"))
    exact = eternal_cop_number(g, t).value
    if family == "king":
        low, high = strong_grid_bounds([a, b], t)
    else:
        low, high = cartesian_grid_bounds(a, b, t)
    checks = [Check("grids", spec, t, f"{low.value} <= value <= {high.value}", str(exact),
                    low.holds_for(exact) and high.holds_for(exact))]
    if family == "king" and path_value(a, t) == 1:
        want = path_value(b, t)
        checks.append(Check("grids", spec + " product law", t, str(want), str(exact), exact == want))
    if family == "grid" and t == 1:
        for x, y in itertools.product(range(3, a + 1), range(3, b + 1)):
            ok = verify_retraction(subgrid_retraction(a, b, x, y))
            checks.append(Check("grids", f"{spec} retracts onto {x}x{y}", 0, "retraction",
                                "retraction" if ok else "not a retraction", ok))
    return checks


def run_suite(suite: str, max_n: int, max_t: int, jobs: int = 1) -> list[Check]:
    work = instances(suite, max_n, max_t)
    if jobs <= 1 or len(work) < 2:
        batches = map(run_instance, work)
        return [c for batch in batches for c in batch]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [c for batch in pool.map(run_instance, work, chunksize=4) for c in batch]


def report(checks: list[Check]) -> dict:
    bad = [c for c in checks if not c.ok]
    return {"checked": len(checks), "mismatches": len(bad), "instances": [asdict(c) for c in checks]}
