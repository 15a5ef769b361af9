"""Undirected forest-fire growth with a single burning probability."""
from __future__ import annotations

import math
from collections import deque

from ..graph import Graph, GraphError
from ..rng import python_rng


def generate_ff(n: int, burn_p: float, seed: int, *key) -> Graph:
    """Each arrival links to a uniform ambassador, then burns outward.

    From every newly linked node a Geometric(1 - burn_p) number of its
    untouched neighbours is linked, breadth-first; no node burns twice.
    """
    n = int(n)
    if n < 2:
        raise GraphError("forest fire needs n >= 2")
    if not 0.0 <= burn_p < 1.0:
        raise GraphError(f"burn_p must lie in [0, 1), got {burn_p}")
    rng = python_rng(seed, "FF", *key)
    log_p = math.log(burn_p) if burn_p > 0 else None
    adj: list[list[int]] = [[] for _ in range(n)]
    edges = []
    for new in range(1, n):
        ambassador = int(rng.random() * new)
        burned = {new, ambassador}
        links = [ambassador]
        queue = deque([ambassador])
        while queue and log_p is not None:
            x = queue.popleft()
            # number of failures before the first success, success prob 1 - burn_p
            count = int(math.log(1.0 - rng.random()) / log_p)
            if count == 0:
                continue
            fresh = [w for w in adj[x] if w not in burned]
            if len(fresh) > count:
                fresh = rng.sample(fresh, count)
            for w in fresh:
                burned.add(w)
                links.append(w)
                queue.append(w)
        for w in links:
            adj[new].append(w)
            adj[w].append(new)
            edges.append((w, new))
    return Graph.from_edges(n, edges)
