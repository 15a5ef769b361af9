"""Simple undirected graphs in compressed sparse row form.

Every graph handled by the toolkit is simple, undirected and unweighted.
Node ids are dense integers ``0..n-1``.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class Graph:
    """Immutable simple graph.

    ``indptr``/``indices`` hold the sorted neighbor lists; ``labels`` keeps
    the original node labels when the graph came from a file.
    """

    __slots__ = ("n", "indptr", "indices", "labels", "_edges")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray, labels=None):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.labels = labels
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._edges = None

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "Graph":
        """Build a graph from any edge collection, simplifying on the way."""
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2) if len(edges) else np.empty((0, 2), np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphError(f"edge endpoint out of range for n={n}")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keep = lo != hi
        lo, hi = lo[keep], hi[keep]
        if lo.size:
            key = np.unique(lo * n + hi)
            lo, hi = key // n, key % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst.astype(np.int64), labels)

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with ``u < v``, lexicographically sorted."""
        if self._edges is None:
            src = np.repeat(np.arange(self.n), self.degrees)
            mask = src < self.indices
            self._edges = np.column_stack([src[mask], self.indices[mask]])
            self._edges.setflags(write=False)
        return self._edges

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges()}

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def adjacency_lists(self) -> list[list[int]]:
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled densely in increasing original id order."""
        nodes = np.unique(np.asarray(list(nodes), dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        e = self.edges()
        keep = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0)
        sub = remap[e[keep]]
        labels = [self.labels[i] for i in nodes] if self.labels is not None else None
        return Graph.from_edges(nodes.size, sub, labels)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        ncomp, _ = csgraph.connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def simplify(edges, n: int | None = None) -> Graph:
    """Drop loops, collapse duplicates and orientation."""
    edges = list(edges)
    if n is None:
        n = 1 + max((max(u, v) for u, v in edges), default=-1)
    return Graph.from_edges(n, edges)


def parse_edge_list(stream: TextIO | str) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments; columns after the
    second are ignored. Labels are mapped to ids in first-appearance order.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    index: dict[str, int] = {}
    edges = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tokens = s.split()
        if len(tokens) < 2:
            raise EdgeListParseError("expected two node tokens", lineno)
        ids = []
        for tok in tokens[:2]:
            if tok not in index:
                index[tok] = len(index)
            ids.append(index[tok])
        edges.append(ids)
    if not edges:
        raise EdgeListParseError("no edges")
    return Graph.from_edges(len(index), edges, labels=list(index))


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def write_edge_list(graph: Graph, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")


def component_labels(graph: Graph) -> np.ndarray:
    _, labels = csgraph.connected_components(graph.adjacency(), directed=False)
    return labels


def largest_connected_component(graph: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Equal-sized components are resolved in favour of the one holding the
    smallest original node id.
    """
    if graph.n == 0:
        raise GraphError("empty graph has no components")
    labels = component_labels(graph)
    # connected_components numbers components by their smallest node id
    sizes = np.bincount(labels)
    best = int(np.argmax(sizes))
    if sizes[best] == graph.n:
        return graph
    return graph.subgraph(np.flatnonzero(labels == best))


def bfs_distances(adj: list[list[int]], source: int) -> list[int]:
    """Hop distances from ``source``; -1 marks unreachable nodes."""
    dist = [-1] * len(adj)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = du
                q.append(w)
    return dist
