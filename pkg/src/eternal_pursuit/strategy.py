"""Positional cop strategies: extraction, JSON storage and replay.

A table maps every cop-turn state ``(configuration, robber, steps left)`` that
can arise from its start configurations to the configuration the cops move
to.  Tables built from the eternal win set are *certified*: every play
replayed through them ends in a capture within ``t`` steps, in a configuration
from which the next play is again won.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol

import numpy as np

from .engine import Arena, Config, EternalSolution, Layers, best_move, get_arena, solve_eternal, solve_layers
from .errors import IllegalMove, StrategyError
from .graph import Graph

FORMAT_VERSION = 1

State = tuple[Config, int, int]


@dataclass
class StrategyTable:
    graph_digest: str
    k: int
    t: int
    winning_configs: list[Config]
    moves: dict[State, Config]
    certified: bool = True
    start: Config | None = None

    def __post_init__(self):
        if self.start is None and self.winning_configs:
            self.start = self.winning_configs[0]

    def move(self, config: Config, robber: int, steps_left: int) -> Config:
        try:
            return self.moves[(config, robber, steps_left)]
        except KeyError:
            raise StrategyError(
                f"no move stored for cops {config}, robber {robber}, {steps_left} steps left") from None

    def to_json(self) -> str:
        doc = {
            "version": FORMAT_VERSION,
            "graph": self.graph_digest,
            "k": self.k,
            "t": self.t,
            "certified": self.certified,
            "start": list(self.start) if self.start else None,
            "winning_configs": [list(c) for c in self.winning_configs],
            "moves": [[list(c), r, s, list(nc)] for (c, r, s), nc in sorted(self.moves.items())],
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, graph: Graph | None = None) -> "StrategyTable":
        doc = json.loads(text)
        if doc.get("version") != FORMAT_VERSION:
            raise StrategyError(f"unsupported strategy format version {doc.get('version')!r}")
        if graph is not None and doc["graph"] != graph.digest():
            raise StrategyError("strategy table was built for a different graph")
        moves = {(tuple(c), r, s): tuple(nc) for c, r, s, nc in doc["moves"]}
        return cls(doc["graph"], doc["k"], doc["t"], [tuple(c) for c in doc["winning_configs"]],
                   moves, doc["certified"], tuple(doc["start"]) if doc["start"] else None)


def _explore(arena: Arena, layers: Layers, starts: Iterable[int], t: int,
             fallback: Callable[[int, int], int] | None = None) -> dict[State, Config]:
    g = arena.g
    moves: dict[State, Config] = {}
    seen_configs: set[int] = set()
    pending = list(starts)
    while pending:
        c0 = pending.pop()
        if c0 in seen_configs:
            continue
        seen_configs.add(c0)
        stack = [(c0, r, t) for r in range(g.n) if not arena.occupied[c0, r]]
        while stack:
            c, r, s = stack.pop()
            key = (arena.configs[c], r, s)
            if key in moves:
                continue
            nxt = best_move(layers, c, r, s)
            if nxt is None:
                if fallback is None:
                    raise StrategyError(f"state {key} is not winning")
                nxt = fallback(c, r)
            moves[key] = arena.configs[nxt]
            if arena.occupied[nxt, r]:
                pending.append(nxt)
                continue
            for r2 in g.closed_neighborhood(r):
                if arena.occupied[nxt, r2]:
                    pending.append(nxt)
                elif s > 1:
                    stack.append((nxt, r2, s - 1))
    return moves


def extract_strategy(g: Graph, k: int, t: int, solution: EternalSolution | None = None) -> StrategyTable:
    """Certified eternal strategy: lexicographically least move that stays winning."""
    sol = solution or solve_eternal(g, k, t)
    if not sol:
        raise StrategyError(f"{k} cops cannot win every play within {t} steps")
    arena = sol.arena
    starts = [int(i) for i in np.flatnonzero(sol.win_mask)]
    moves = _explore(arena, sol.layers, starts, t)
    return StrategyTable(g.digest(), k, t, sol.win_set, moves, certified=True)


def single_play_strategy(g: Graph, k: int, t: int) -> StrategyTable:
    """Strategy that wins the current play when it can, ignoring where it ends.

    Not certified for eternal play: after a play it may sit in a configuration
    from which some placement cannot be answered; there it closes in greedily.
    """
    arena = get_arena(g, k)
    layers = solve_layers(arena, arena.mask(None), t)
    winners = [int(i) for i in np.flatnonzero(layers.single_play_winners(t))]
    if not winners:
        raise StrategyError(f"{k} cops cannot win a single play within {t} steps")
    dist = g.dist

    def greedy(c, r):
        succ = arena.successors_of(c)
        return int(min(succ, key=lambda j: (min(dist[v, r] for v in arena.configs[j]), j)))

    moves = _explore(arena, layers, [winners[0]], t, fallback=greedy)
    return StrategyTable(g.digest(), k, t, [arena.configs[i] for i in winners], moves, certified=False)


# -- replay -------------------------------------------------------------------

@dataclass
class Event:
    play: int
    step: int
    kind: str  # place | cops | robber | capture | escape
    cops: Config
    robber: int | None
    steps_left: int

    def describe(self, g: Graph | None = None) -> str:
        lab = (lambda v: g.vertex_label(v)) if g is not None else str
        cops = "[" + ", ".join(lab(v) for v in self.cops) + "]"
        rob = "-" if self.robber is None else lab(self.robber)
        if self.kind == "capture":
            return f"play {self.play}: robber captured at {rob} after {self.step} step(s); cops {cops}"
        if self.kind == "escape":
            return f"play {self.play}: robber at {rob} survived {self.step} step(s); cops lose"
        return f"play {self.play} step {self.step} {self.kind:>6}: cops {cops} robber {rob} ({self.steps_left} left)"


class Session:
    """Plays against a strategy table, one robber decision at a time."""

    def __init__(self, g: Graph, table: StrategyTable):
        if table.graph_digest != g.digest():
            raise StrategyError("strategy table was built for a different graph")
        self.g, self.table = g, table
        self.config: Config = table.start
        self.play = 0
        self.robber: int | None = None
        self.steps_left = 0
        self.step = 0
        self.finished = False  # robber escaped
        self.transcript: list[Event] = []

    @property
    def awaiting_placement(self) -> bool:
        return self.robber is None and not self.finished

    def _log(self, kind):
        ev = Event(self.play, self.step, kind, self.config, self.robber, self.steps_left)
        self.transcript.append(ev)
        return ev

    def place(self, v: int) -> list[Event]:
        if not self.awaiting_placement:
            raise IllegalMove("the robber is already on the board")
        if not 0 <= v < self.g.n:
            raise IllegalMove(f"no vertex {v}")
        if v in self.config:
            raise IllegalMove(f"vertex {v} is occupied by a cop")
        self.play += 1
        self.robber, self.steps_left, self.step = v, self.table.t, 0
        return [self._log("place")] + self._cop_turn()

    def move(self, v: int) -> list[Event]:
        if self.robber is None or self.finished:
            raise IllegalMove("no robber on the board")
        if v != self.robber and not self.g.has_edge(self.robber, v):
            raise IllegalMove(f"vertex {v} is not adjacent to the robber at {self.robber}")
        self.robber = v
        if v in self.config:
            return [self._end("capture")]
        ev = self._log("robber")
        if self.steps_left == 0:
            return [ev, self._end("escape")]
        return [ev] + self._cop_turn()

    def _cop_turn(self) -> list[Event]:
        try:
            nxt = self.table.move(self.config, self.robber, self.steps_left)
        except StrategyError:
            if self.table.certified:
                raise
            return [self._end("escape")]
        self.config = nxt
        self.steps_left -= 1
        self.step += 1
        if self.robber in nxt:
            return [self._end("capture")]
        return [self._log("cops")]

    def _end(self, kind) -> Event:
        ev = self._log(kind)
        if kind == "escape":
            self.finished = True
        self.robber = None
        return ev


class RobberPolicy(Protocol):
    def place(self, g: Graph, cops: Config, play: int) -> int: ...

    def move(self, g: Graph, cops: Config, robber: int, steps_left: int, step: int) -> int: ...


def replay(g: Graph, table: StrategyTable, plays: list[tuple[int, list[int]]]) -> list[Event]:
    """Replay scripted robber plays; each is ``(placement, moves)``, missing moves are passes."""
    session = Session(g, table)
    for placement, moves in plays:
        session.place(placement)
        i = 0
        while session.robber is not None:
            session.move(moves[i] if i < len(moves) else session.robber)
            i += 1
        if session.finished:
            break
    return session.transcript


def play_out(g: Graph, table: StrategyTable, robber: RobberPolicy, max_plays: int) -> Session:
    """Run up to ``max_plays`` plays of a robber policy against ``table``."""
    session = Session(g, table)
    while session.play < max_plays and not session.finished:
        session.place(robber.place(g, session.config, session.play + 1))
        while session.robber is not None:
            session.move(robber.move(g, session.config, session.robber, session.steps_left, session.step))
    return session


class OptimalRobber:
    """Robber that refutes every configuration outside the eternal win set.

    From a configuration removed in fixpoint round ``j`` it picks a placement
    that the cops cannot answer while ending in the round-``j-1`` candidate
    set, then plays to keep it that way.  Each capture therefore lands in a
    configuration removed strictly earlier, so the cops run out of room.
    """

    def __init__(self, g: Graph, sol: EternalSolution):
        self.g, self.sol, self.arena = g, sol, sol.arena
        self._layers: dict[int, Layers] = {}
        self._round = 0

    def _candidates(self, rnd: int) -> np.ndarray:
        # candidate set before round rnd was evaluated
        rm = self.sol.removal_round
        return (rm == 0) | (rm >= rnd)

    def layers_for(self, rnd: int) -> Layers:
        if rnd not in self._layers:
            self._layers[rnd] = solve_layers(self.arena, self._candidates(rnd), self.sol.t)
        return self._layers[rnd]

    def place(self, g, cops, play):
        ci = self.arena.index[cops]
        rnd = int(self.sol.removal_round[ci])
        if rnd == 0:
            raise StrategyError(f"configuration {cops} is in the eternal win set")
        self._round = rnd
        win = self.layers_for(rnd).win(self.sol.t)[ci]
        return int(next(r for r in range(g.n) if r not in cops and not win[r]))

    def move(self, g, cops, robber, steps_left, step):
        layers = self.layers_for(self._round)
        ci = self.arena.index[cops]
        win = layers.win(steps_left)
        occ = self.arena.occupied[ci]
        tgt = layers.target[ci]
        for r2 in g.closed_neighborhood(robber):
            bad_for_cops = (not tgt) if occ[r2] else (steps_left == 0 or not win[ci, r2])
            if bad_for_cops:
                return r2
        return robber


@dataclass
class BranchSacrificeRobber:
    """Scripted robber on a rooted tree whose leaves all sit at depth ``depth``.

    In play ``j <= levels`` the robber appears at depth
    ``(2**(levels-j+1) - 1) * (t - depth + 1)`` in a branch with no cop and
    waits; if still free after ``t - (depth - that)`` steps it runs for the
    leaf.  Later robbers appear on a leaf of a cop-free branch and wait.
    """
    root: int
    t: int
    levels: int
    depth: int
    _target_leaf: int | None = field(default=None, init=False)
    _deadline: int = field(default=0, init=False)

    def _branches(self, g: Graph):
        out = []
        for child in g.adjacency[self.root]:
            members = [v for v in range(g.n) if g.dist[v, self.root] == g.dist[v, child] + 1]
            out.append(members)
        return out

    def place(self, g, cops, play):
        free = [b for b in self._branches(g) if not set(b) & set(cops)]
        if not free:
            raise StrategyError("every branch holds a cop")
        branch = free[0]
        leaf = max(branch, key=lambda v: (g.dist[v, self.root], -v))
        self._target_leaf = leaf
        if play <= self.levels:
            j = play
            depth = (2 ** (self.levels - j + 1) - 1) * (self.t - self.depth + 1)
            depth = min(depth, self.depth)
            spot = next(v for v in branch if g.dist[v, self.root] == depth and g.dist[v, leaf] == self.depth - depth)
            self._deadline = self.t - (self.depth - depth)
            return spot
        self._deadline = self.t + 1
        return leaf

    def move(self, g, cops, robber, steps_left, step):
        if step < self._deadline or robber == self._target_leaf:
            return robber
        return next(v for v in g.adjacency[robber] if g.dist[v, self._target_leaf] < g.dist[robber, self._target_leaf])
