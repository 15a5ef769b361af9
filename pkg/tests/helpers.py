"""Graph fixtures shared by the test modules."""
from __future__ import annotations

import itertools
import random

from netcalib.graph import Graph


def complete(n):
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


NAMED = {
    "K4": complete(4),
    "P4": path(4),
    "P5": path(5),
    "C4": cycle(4),
    "C5": cycle(5),
    "K1,4": star(4),
}


def random_connected(n, extra_p, seed):
    """Random spanning tree plus independent extra edges."""
    rng = random.Random(seed)
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < extra_p:
            edges.append((u, v))
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def small_world(n, k, beta, seed):
    """Ring lattice with ``k`` neighbours per node, each edge rewired with probability ``beta``."""
    rng = random.Random(seed)
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if v in adj[u] and rng.random() < beta:
                w = rng.randrange(n)
                while w == u or w in adj[u]:
                    w = rng.randrange(n)
                adj[u].discard(v)
                adj[v].discard(u)
                adj[u].add(w)
                adj[w].add(u)
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in adj[u] if u < v])


def planted_partition(sizes, p_in, p_out, seed):
    rng = random.Random(seed)
    block = [b for b, s in enumerate(sizes) for _ in range(s)]
    n = len(block)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2)
             if rng.random() < (p_in if block[u] == block[v] else p_out)]
    return Graph.from_edges(n, edges), block


def two_cliques_bridge():
    edges = list(itertools.combinations(range(5), 2))
    edges += [(u + 5, v + 5) for u, v in itertools.combinations(range(5), 2)]
    edges.append((4, 5))
    return Graph.from_edges(10, edges)
