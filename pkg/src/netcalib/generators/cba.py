"""Clustering Barabasi-Albert growth (preferential attachment + triad formation)."""
from __future__ import annotations

from ..graph import Graph, GraphError
from ..rng import python_rng

MAX_REDRAWS = 100


def generate_cba(n: int, m: int, p: float, seed: int, *key) -> Graph:
    """Grow a graph from an ``m``-clique, attaching ``m`` edges per new node.

    The first edge of each arrival is preferential. Each later edge is a
    triad-formation step with probability ``p`` (a random unlinked neighbour
    of the previous target) and preferential otherwise.
    """
    n, m = int(n), int(m)
    if m < 1 or n <= m:
        raise GraphError(f"CBA needs n > m >= 1, got n={n}, m={m}")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"CBA probability must lie in [0, 1], got {p}")
    rng = python_rng(seed, "CBA", *key)
    adj: list[set[int]] = [set() for _ in range(n)]
    # each edge endpoint once: uniform draws from it are degree-proportional
    stubs: list[int] = []
    for u in range(m):
        for v in range(u + 1, m):
            adj[u].add(v)
            adj[v].add(u)
            stubs += (u, v)

    for new in range(m, n):
        linked: set[int] = set()

        def preferential() -> int:
            for _ in range(MAX_REDRAWS):
                t = stubs[int(rng.random() * len(stubs))] if stubs else int(rng.random() * new)
                if t not in linked:
                    return t
            free = [v for v in range(new) if v not in linked]
            return free[int(rng.random() * len(free))]

        target = preferential()
        linked.add(target)
        for _ in range(1, m):
            nxt = -1
            if p > 0 and rng.random() < p:
                cands = [w for w in adj[target] if w not in linked]
                if cands:
                    cands.sort()
                    nxt = cands[int(rng.random() * len(cands))]
            if nxt < 0:
                nxt = preferential()
            linked.add(nxt)
            target = nxt
        for t in linked:
            adj[new].add(t)
            adj[t].add(new)
            stubs += (new, t)

    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return Graph.from_edges(n, edges)
