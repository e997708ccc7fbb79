"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here shares code with the package beyond the Graph container.
"""
from __future__ import annotations

import itertools
from collections import deque
from functools import lru_cache
from math import ceil


def bfs_dist(n, edges):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    out = []
    for s in range(n):
        d = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if w not in d:
                    d[w] = d[u] + 1
                    q.append(w)
        out.append([d.get(v) for v in range(n)])
    return out


def _closed(g, v):
    return (v,) + tuple(g.adjacency[v])


def make_game(g, k):
    """Return ``wins(config, robber, steps, target)`` by plain recursion."""
    configs = list(itertools.combinations_with_replacement(range(g.n), k))

    @lru_cache(maxsize=None)
    def wins(c, r, s, target):
        if s == 0:
            return False
        for move in itertools.product(*(_closed(g, v) for v in c)):
            c2 = tuple(sorted(move))
            if r in c2:
                if c2 in target:
                    return True
                continue
            ok = True
            for r2 in _closed(g, r):
                if r2 in c2:
                    if c2 not in target:
                        ok = False
                        break
                elif not wins(c2, r2, s - 1, target):
                    ok = False
                    break
            if ok:
                return True
        return False

    return configs, wins


def single_play_oracle(g, k, t):
    configs, wins = make_game(g, k)
    every = frozenset(configs)
    return any(all(wins(c, r, t, every) for r in range(g.n) if r not in c) for c in configs)


def eternal_oracle(g, k, t):
    configs, wins = make_game(g, k)
    w = frozenset(configs)
    while True:
        nw = frozenset(c for c in w if all(wins(c, r, t, w) for r in range(g.n) if r not in c))
        if nw == w:
            return bool(w)
        w = nw


def eternal_value_oracle(g, t):
    for k in range(1, g.n + 1):
        if eternal_oracle(g, k, t):
            return k
    return g.n


def path_formula(n, t):
    return ceil(n / (t + 1))


def maxseq_brute(t):
    """Longest strictly sum-decreasing positive sequence starting with ``t``."""
    best = 0
    stack = [([t], 0)]
    while stack:
        seq, _ = stack.pop()
        best = max(best, len(seq))
        # the next term x must keep every earlier term above the sum of all later ones
        tails = [sum(seq[i + 1:]) for i in range(len(seq))]
        room = min(seq[i] - tails[i] - 1 for i in range(len(seq)))
        for x in range(1, room + 1):
            stack.append((seq + [x], 0))
    return best


def decomposition_example():
    """Grid-minus-corners, five-legged spider and two paths, joined leaf to leaf.

    Returns the graph and its four parts (block of 12, spider of 21, two paths of 5).
    """
    from eternal_pursuit.graph import build_graph

    names = {}

    def vid(key):
        return names.setdefault(key, len(names))

    edges = []
    block = [(x, y) for x in range(1, 5) for y in range(-1, 3)
             if not (x in (1, 4) and y in (-1, 2))]
    for x, y in block:
        for dx, dy in ((1, 0), (0, 1)):
            if (x + dx, y + dy) in block:
                edges.append((vid(("b", x, y)), vid(("b", x + dx, y + dy))))
    hub = vid(("s", 0, 0))
    legs = []
    for leg in range(5):
        prev = hub
        for depth in range(1, 5):
            cur = vid(("s", leg, depth))
            edges.append((prev, cur))
            prev = cur
        legs.append(prev)
    paths = []
    for p in range(2):
        ids = [vid(("p", p, j)) for j in range(5)]
        edges += list(zip(ids, ids[1:]))
        paths.append(frozenset(ids))
    left_leaf, right_leaf = legs[0], legs[1]
    edges.append((left_leaf, vid(("b", 4, 0))))
    for p in range(2):
        edges.append((right_leaf, vid(("p", p, 0))))
    g = build_graph(len(names), edges, name="four-retract example")
    blue = frozenset(v for k, v in names.items() if k[0] == "b")
    red = frozenset(v for k, v in names.items() if k[0] == "s")
    return g, [blue, red] + paths
