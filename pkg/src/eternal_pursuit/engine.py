"""Exact solver for bounded-time Cops and Robbers, single play and eternal.

A *configuration* is a sorted tuple of cop positions (several cops may share a
vertex).  For a fixed graph and cop count every configuration gets an index in
lexicographic order, and the game is solved by backward induction over
``(configuration, robber)`` tables, one boolean table per number of remaining
time-steps:

* ``wins[s][c, r]`` -- cops to move from ``c`` with ``s`` steps left and the
  robber on the unoccupied vertex ``r`` can force a capture whose
  capture-moment configuration lies in the target set.
* ``holds[s][c', r]`` -- same question right after the cops moved to ``c'``,
  robber to move (used for strategy extraction).

A capture happens when a cop steps onto the robber, or when the robber steps
onto a cop.  The eternal win set is the greatest fixpoint of
``W -> {c : every placement against c is won with target W}``.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

from .errors import BudgetExceeded, GraphError, IllegalMove
from .graph import Graph

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 5 * 10**7
BUDGET_ENV = "ETERNAL_PURSUIT_BUDGET"

Config = tuple[int, ...]


def state_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            logger.warning("ignoring malformed %s=%r", BUDGET_ENV, raw)
    return DEFAULT_BUDGET


def config_count(n: int, k: int) -> int:
    return comb(n + k - 1, k)


def enumerate_configs(n: int, k: int, budget: int | None = None) -> Iterator[Config]:
    """All multisets of ``k`` vertices out of ``n``, as sorted tuples in lexicographic order."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    budget = state_budget() if budget is None else budget
    if config_count(n, k) > budget:
        raise BudgetExceeded(f"{config_count(n, k)} configurations exceed the budget of {budget}")
    return combinations_with_replacement(range(n), k)


def _check_t(t: int) -> None:
    if t < 1:
        raise ValueError("the number of time-steps must be a positive integer")


def _require_connected(g: Graph) -> None:
    if not g.is_connected():
        raise GraphError("the solver needs a connected graph")


class Arena:
    """Configuration space of ``k`` cops on ``g``, with team-move successors."""

    def __init__(self, g: Graph, k: int, budget: int | None = None):
        _require_connected(g)
        self.g, self.k = g, k
        self.budget = state_budget() if budget is None else budget
        n = g.n
        if config_count(n, k) * n > self.budget:
            raise BudgetExceeded(
                f"{config_count(n, k)} configurations x {n} robber positions exceed the budget of {self.budget}")
        self.configs: list[Config] = list(enumerate_configs(n, k, self.budget))
        self.index = {c: i for i, c in enumerate(self.configs)}
        C = len(self.configs)
        occ = np.zeros((C, n), dtype=bool)
        for i, c in enumerate(self.configs):
            occ[i, list(c)] = True
        self.occupied = occ
        closed = np.eye(n, dtype=np.int32)
        for u, v in g.edges:
            closed[u, v] = closed[v, u] = 1
        self.closed = closed

        rows, cols = [], []
        total = 0
        nbhd = [g.closed_neighborhood(v) for v in range(n)]
        for i, c in enumerate(self.configs):
            succ = {tuple(sorted(p)) for p in product(*(nbhd[v] for v in c))}
            total += len(succ)
            if total > self.budget:
                raise BudgetExceeded(f"successor table exceeds the budget of {self.budget}")
            js = sorted(self.index[s] for s in succ)
            rows.extend([i] * len(js))
            cols.extend(js)
        self.successors = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(C, C))

    @property
    def size(self) -> int:
        return len(self.configs)

    def successors_of(self, i: int) -> np.ndarray:
        s = self.successors
        return s.indices[s.indptr[i]:s.indptr[i + 1]]

    def mask(self, configs) -> np.ndarray:
        if configs is None:
            return np.ones(self.size, dtype=bool)
        m = np.zeros(self.size, dtype=bool)
        for c in configs:
            m[self.index[tuple(sorted(c))]] = True
        return m

    def step(self, wins_prev: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One more time-step of look-ahead: returns ``(wins, holds)``."""
        occ = self.occupied
        tcol = target[:, None]
        # robber moves from r to r'; stepping onto a cop ends the play in that configuration
        after_robber = np.where(occ, tcol, wins_prev)
        holds = ((~after_robber).astype(np.int32) @ self.closed) == 0
        after_cops = np.where(occ, tcol, holds)
        wins = (self.successors @ after_cops.astype(np.int32)) > 0
        return wins, holds


@lru_cache(maxsize=32)
def _arena(g: Graph, k: int, budget: int) -> Arena:
    return Arena(g, k, budget)


def get_arena(g: Graph, k: int) -> Arena:
    return _arena(g, k, state_budget())


@dataclass
class Layers:
    """Backward-induction tables for one target set.

    ``wins[s]`` for ``s = 0..len-1``; beyond the stored range the tables are
    constant (the recursion reached its fixpoint), so lookups clamp.
    """
    arena: Arena
    target: np.ndarray
    wins: list[np.ndarray]
    holds: list[np.ndarray]
    stable: bool
    _hold_depth: np.ndarray | None = field(default=None, repr=False)

    def win(self, s: int) -> np.ndarray:
        return self.wins[min(s, len(self.wins) - 1)]

    def hold(self, s: int) -> np.ndarray:
        return self.holds[min(s, len(self.holds) - 1)]

    def single_play_winners(self, s: int) -> np.ndarray:
        return (self.win(s) | self.arena.occupied).all(axis=1)

    @property
    def hold_depth(self) -> np.ndarray:
        """Fewest remaining steps with which a robber-to-move position is already won."""
        if self._hold_depth is None:
            depth = np.full(self.holds[0].shape, np.iinfo(np.int64).max, dtype=np.int64)
            for s in range(len(self.holds) - 1, 0, -1):
                depth[self.holds[s]] = s
            self._hold_depth = depth
        return self._hold_depth


def solve_layers(arena: Arena, target: np.ndarray, t: int) -> Layers:
    C, n = arena.occupied.shape
    wins = [np.zeros((C, n), dtype=bool)]
    holds = [np.zeros((C, n), dtype=bool)]
    stable = False
    for s in range(1, t + 1):
        if (s + 1) * C * n > arena.budget:
            raise BudgetExceeded(f"{s + 1} layers of {C}x{n} states exceed the budget of {arena.budget}")
        w, h = arena.step(wins[-1], target)
        if s > 1 and np.array_equal(w, wins[-1]) and np.array_equal(h, holds[-1]):
            stable = True
            break
        wins.append(w)
        holds.append(h)
    return Layers(arena, target, wins, holds, stable)


@dataclass
class SolveStats:
    configs: int = 0
    rounds: int = 0
    layers: int = 0

    def merge(self, other: "SolveStats") -> None:
        self.configs += other.configs
        self.rounds += other.rounds
        self.layers += other.layers


@dataclass
class CaptureResult:
    win: bool
    end_configs: frozenset


def bounded_capture(g: Graph, start: Sequence[int], robber: int, t: int, target=None) -> CaptureResult:
    """Can the cops, moving first from ``start``, capture within ``t`` steps and end inside ``target``?

    ``target`` is an iterable of configurations, or ``None`` for all of them.
    ``end_configs`` lists the capture-moment configurations reachable when the
    cops follow the lexicographically least winning moves against every robber.
    """
    _check_t(t)
    start = tuple(sorted(start))
    if robber in start:
        raise IllegalMove(f"robber placed on cop-occupied vertex {robber}")
    arena = get_arena(g, len(start))
    layers = solve_layers(arena, arena.mask(target), t)
    ci = arena.index[start]
    if not layers.win(t)[ci, robber]:
        return CaptureResult(False, frozenset())
    ends = set()
    seen = set()
    stack = [(ci, robber, t)]
    while stack:
        c, r, s = stack.pop()
        if (c, r, s) in seen:
            continue
        seen.add((c, r, s))
        nxt = best_move(layers, c, r, s)
        if arena.occupied[nxt, r]:
            ends.add(arena.configs[nxt])
            continue
        for r2 in g.closed_neighborhood(r):
            if arena.occupied[nxt, r2]:
                ends.add(arena.configs[nxt])
            else:
                stack.append((nxt, r2, s - 1))
    return CaptureResult(True, frozenset(ends))


def best_move(layers: Layers, c: int, r: int, s: int) -> int | None:
    """Winning successor of config ``c`` that captures soonest, lexicographically least among those."""
    arena = layers.arena
    hold = layers.hold(s)
    depth = layers.hold_depth
    best, best_key = None, None
    for j in arena.successors_of(c):
        if arena.occupied[j, r]:
            if not layers.target[j]:
                continue
            key = 0
        elif hold[j, r]:
            key = depth[j, r]
        else:
            continue
        if best_key is None or key < best_key:
            best, best_key = int(j), key
    return best


def single_play_value(g: Graph, k: int, t: int) -> bool:
    """Is there a start configuration of ``k`` cops capturing every placement within ``t`` steps?"""
    _check_t(t)
    _require_connected(g)
    if k >= g.n:
        return True
    arena = get_arena(g, k)
    return bool(solve_layers(arena, arena.mask(None), t).single_play_winners(t).any())


def c_t(g: Graph, t: int) -> int:
    """Fewest cops winning a single play within ``t`` time-steps."""
    _check_t(t)
    _require_connected(g)
    for k in range(1, g.n + 1):
        if single_play_value(g, k, t):
            return k
    return g.n


def capture_horizon(n: int, k: int) -> int:
    """Number of (cop configuration, robber) positions; no optimal play is longer."""
    return n * config_count(n, k)


def capt_k(g: Graph, k: int) -> float:
    """Fewest time-steps in which ``k`` cops surely capture; ``inf`` when they never do."""
    _require_connected(g)
    if k < 1:
        raise ValueError("k must be positive")
    if k >= g.n:
        return 1
    arena = get_arena(g, k)
    target = arena.mask(None)
    C, n = arena.occupied.shape
    wins = np.zeros((C, n), dtype=bool)
    for s in range(1, capture_horizon(g.n, k) + 1):
        new, _ = arena.step(wins, target)
        if (new | arena.occupied).all(axis=1).any():
            return s
        if np.array_equal(new, wins):
            break
        wins = new
    return float("inf")


def cop_number(g: Graph) -> int:
    """Classic cop number, from the unbounded game's least fixpoint."""
    _require_connected(g)
    for k in range(1, g.n + 1):
        if k >= g.n:
            return k
        arena = get_arena(g, k)
        target = arena.mask(None)
        wins = np.zeros(arena.occupied.shape, dtype=bool)
        while True:
            new, _ = arena.step(wins, target)
            if np.array_equal(new, wins):
                break
            wins = new
        if (wins | arena.occupied).all(axis=1).any():
            return k
    return g.n


@dataclass
class EternalSolution:
    arena: Arena
    t: int
    win_mask: np.ndarray
    layers: Layers
    stats: SolveStats
    removal_round: np.ndarray = field(repr=False)

    @property
    def win_set(self) -> list[Config]:
        return [self.arena.configs[i] for i in np.flatnonzero(self.win_mask)]

    def __bool__(self):
        return bool(self.win_mask.any())


def solve_eternal(g: Graph, k: int, t: int) -> EternalSolution:
    """Greatest fixpoint of the per-play capture operator.

    ``removal_round[c]`` is the round in which ``c`` left the candidate set
    (0 for configurations that survive); it ranks robber refutations.
    """
    _check_t(t)
    arena = get_arena(g, k)
    stats = SolveStats(configs=arena.size)
    win = np.ones(arena.size, dtype=bool)
    removal = np.zeros(arena.size, dtype=np.int64)
    while True:
        stats.rounds += 1
        layers = solve_layers(arena, win, t)
        stats.layers += len(layers.wins) - 1
        new = win & layers.single_play_winners(t)
        removal[win & ~new] = stats.rounds
        logger.debug("round %d: %d -> %d configs", stats.rounds, win.sum(), new.sum())
        if np.array_equal(new, win):
            break
        win = new
    return EternalSolution(arena, t, win, layers, stats, removal)


def eternal_win_set(g: Graph, k: int, t: int) -> list[Config]:
    return solve_eternal(g, k, t).win_set


@dataclass
class SolveResult:
    value: int
    certificate: object = None
    stats: SolveStats = field(default_factory=SolveStats)


def eternal_cop_number(g: Graph, t: int, k_min: int = 1, with_strategy: bool = False) -> SolveResult:
    """Fewest cops that capture within ``t`` steps in every play, forever."""
    _check_t(t)
    _require_connected(g)
    stats = SolveStats()
    for k in range(max(1, k_min), g.n + 1):
        sol = solve_eternal(g, k, t)
        stats.merge(sol.stats)
        if sol:
            cert = None
            if with_strategy:
                from .strategy import extract_strategy
                cert = extract_strategy(g, k, t, solution=sol)
            return SolveResult(k, cert, stats)
    raise AssertionError("n cops always win")  # pragma: no cover


def eternal_decision(g: Graph, k: int, t: int) -> bool:
    _check_t(t)
    _require_connected(g)
    return bool(solve_eternal(g, k, t))
