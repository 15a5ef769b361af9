"""Joint degree matrix extraction and exact 2K construction with neighbour switches."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..graph import Graph, GraphError
from ..rng import python_rng

SWITCH_BUDGET_FACTOR = 10
MIX_SWAPS_FACTOR = 10


class ConstructionError(GraphError):
    pass


@dataclass
class JointDegreeMatrix:
    """Edge counts keyed by ``(k, l)`` with ``k <= l``, plus nodes per degree."""

    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    degree_counts: dict[int, int] = field(default_factory=dict)

    @property
    def num_edges(self) -> int:
        return sum(self.counts.values())

    @property
    def num_nodes(self) -> int:
        return sum(self.degree_counts.values())

    def check(self) -> None:
        """Stub accounting: class ``k`` owns exactly ``k * n_k`` edge ends."""
        ends: Counter = Counter()
        for (k, l), c in self.counts.items():
            if k > l or c < 0:
                raise ConstructionError(f"bad JDM entry {(k, l)}: {c}")
            ends[k] += c
            ends[l] += c
        for k in set(ends) | set(self.degree_counts):
            if ends[k] != k * self.degree_counts.get(k, 0):
                raise ConstructionError(
                    f"degree class {k}: {ends[k]} edge ends but "
                    f"{k} x {self.degree_counts.get(k, 0)} stubs")
        for (k, l), c in self.counts.items():
            nk, nl = self.degree_counts.get(k, 0), self.degree_counts.get(l, 0)
            limit = nk * (nk - 1) // 2 if k == l else nk * nl
            if c > limit:
                raise ConstructionError(f"JDM entry {(k, l)}={c} exceeds the simple-graph limit {limit}")


def extract_jdm(graph: Graph) -> JointDegreeMatrix:
    deg = graph.degrees
    counts: Counter = Counter()
    for u, v in graph.edges():
        a, b = int(deg[u]), int(deg[v])
        counts[(a, b) if a <= b else (b, a)] += 1
    degree_counts = Counter(int(d) for d in deg)
    return JointDegreeMatrix(dict(sorted(counts.items())), dict(sorted(degree_counts.items())))


class _Builder:
    def __init__(self, jdm: JointDegreeMatrix, rng):
        self.rng = rng
        self.classes: dict[int, list[int]] = {}
        self.degree: list[int] = []
        for k in sorted(jdm.degree_counts):
            ids = list(range(len(self.degree), len(self.degree) + jdm.degree_counts[k]))
            self.degree += [k] * len(ids)
            rng.shuffle(ids)  # random tie-break among equally saturated nodes
            self.classes[k] = ids
        self.residual = list(self.degree)
        self.adj: list[set[int]] = [set() for _ in self.degree]
        self.switches = 0
        self.budget = SWITCH_BUDGET_FACTOR * max(jdm.num_edges, 1)

    def link(self, u, v):
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.residual[u] -= 1
        self.residual[v] -= 1

    def unlink(self, u, v):
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.residual[u] += 1
        self.residual[v] += 1

    def least_saturated(self, k, exclude=(), avoid_adjacent_to=None):
        best, best_res = None, 0
        for v in self.classes[k]:
            res = self.residual[v]
            if res > best_res and v not in exclude:
                if avoid_adjacent_to is not None and v in self.adj[avoid_adjacent_to]:
                    continue
                best, best_res = v, res
        return best

    def _spend_switch(self):
        self.switches += 1
        if self.switches > self.budget:
            raise ConstructionError(f"rewiring budget of {self.budget} switches exhausted")

    def switch(self, u, v, l):
        """Give ``u`` a new degree-``l`` partner while ``v`` (degree ``l``, adjacent to ``u``)
        takes over an edge of another degree-``l`` node ``w``."""
        cands = [w for w in self.classes[l] if w != u and w != v and w not in self.adj[u]]
        self.rng.shuffle(cands)
        for w in cands:
            ts = [t for t in self.adj[w] if t != v and t not in self.adj[v]]
            if ts:
                t = ts[int(self.rng.random() * len(ts))]
                self._spend_switch()
                self.unlink(w, t)
                self.link(v, t)
                self.link(u, w)
                return True
        return False

    def double_switch(self, u, k):
        """``u`` is the only unsaturated degree-``k`` node and needs a (k, k) edge:
        replace an edge (w, t) by (u, w) and (u, t) with ``w`` of degree ``k``."""
        cands = [w for w in self.classes[k] if w != u and w not in self.adj[u]]
        self.rng.shuffle(cands)
        for w in cands:
            ts = [t for t in self.adj[w] if t != u and t not in self.adj[u]]
            if ts:
                t = ts[int(self.rng.random() * len(ts))]
                self._spend_switch()
                self.unlink(w, t)
                self.link(u, w)
                self.link(u, t)
                return True
        return False

    def add_edge(self, k, l):
        u = self.least_saturated(k)
        if u is None:
            raise ConstructionError(f"degree class {k} has no free stubs")
        v = self.least_saturated(l, exclude=(u,), avoid_adjacent_to=u)
        if v is not None:
            self.link(u, v)
            return
        v = self.least_saturated(l, exclude=(u,))
        if v is not None:
            if self.switch(u, v, l) or self.switch(v, u, k):
                return
        elif k == l and self.residual[u] >= 2:
            if self.double_switch(u, k):
                return
        raise ConstructionError(f"no neighbour switch available for entry {(k, l)}")

    def mix(self, attempts: int) -> int:
        """Random JDM-preserving swaps (a, b), (c, d) -> (a, d), (c, b) with deg b == deg d."""
        edges = [(u, v) for u, nb in enumerate(self.adj) for v in nb if u < v]
        if len(edges) < 2:
            return 0
        where = {e: i for i, e in enumerate(edges)}
        rng, adj, deg = self.rng, self.adj, self.degree
        done = 0
        for _ in range(attempts):
            a, b = edges[int(rng.random() * len(edges))]
            if rng.random() < 0.5:
                a, b = b, a
            peers = self.classes[deg[b]]
            d = peers[int(rng.random() * len(peers))]
            if d == b or not adj[d]:
                continue
            nb = sorted(adj[d])
            c = nb[int(rng.random() * len(nb))]
            if len({a, b, c, d}) < 4 or d in adj[a] or b in adj[c]:
                continue
            for old_e, new_e in (((a, b), (a, d)), ((c, d), (c, b))):
                i = where.pop((min(old_e), max(old_e)))
                key = (min(new_e), max(new_e))
                edges[i] = key
                where[key] = i
            for x, y in ((a, b), (c, d)):
                adj[x].discard(y)
                adj[y].discard(x)
            for x, y in ((a, d), (c, b)):
                adj[x].add(y)
                adj[y].add(x)
            done += 1
        return done


def construct_2k(jdm: JointDegreeMatrix, seed: int, *key, mix_factor: int = MIX_SWAPS_FACTOR) -> Graph:
    """Build a simple graph whose joint degree matrix equals ``jdm`` exactly.

    Entries are processed from the highest degrees down; every edge joins
    the least saturated nodes of the two classes, and collisions are
    resolved by JDM-preserving neighbour switches. The result is then
    randomised with ``mix_factor * m`` attempted JDM-preserving swaps, so
    the output is a random draw from the graphs sharing ``jdm`` rather than
    the construction's structured seed graph.
    """
    jdm.check()
    builder = _Builder(jdm, python_rng(seed, "TWO_K", *key))
    for (k, l) in sorted(jdm.counts, reverse=True):
        for _ in range(jdm.counts[(k, l)]):
            builder.add_edge(l, k)
    builder.mix(mix_factor * jdm.num_edges)
    edges = [(u, v) for u, nb in enumerate(builder.adj) for v in nb if u < v]
    return Graph.from_edges(len(builder.degree), edges)
