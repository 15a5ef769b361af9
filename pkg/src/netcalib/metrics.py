"""Structural metrics of simple graphs.

Path and centrality metrics need a connected graph; :func:`metric_vector`
hands them the largest connected component. Size normalisations divide by
the natural logarithm of the node count of the graph they are computed on.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csgraph

from .graph import Graph, GraphError, bfs_distances, largest_connected_component

METRIC_NAMES: tuple[str, ...] = (
    "num_nodes",
    "num_edges",
    "density",
    "avg_deg",
    "max_deg",
    "max_deg_n",
    "assortativity",
    "avg_clust",
    "glob_clust",
    "idp_1",
    "idp_2",
    "idp_3",
    "idp_4",
    "max_eigen",
    "max_vbc",
    "max_ebc",
    "avg_path_log",
    "p_diam_log",
)

SIZE_METRICS: tuple[str, ...] = ("num_nodes", "num_edges")

# the selection used by the calibration stage when none is supplied
DEFAULT_SELECTION: tuple[str, ...] = (
    "assortativity",
    "avg_clust",
    "avg_deg",
    "p_diam_log",
    "idp_1",
    "idp_3",
    "idp_4",
    "max_deg_n",
)

# columns whose normalisation is a local choice rather than a fixed convention
LOCALLY_NORMALIZED: frozenset[str] = frozenset(
    {"max_deg_n", "max_vbc", "max_ebc", "avg_path_log", "p_diam_log",
     "idp_1", "idp_2", "idp_3", "idp_4"}
)

_DEGREE = {"density", "avg_deg", "max_deg", "max_deg_n", "idp_1", "idp_2", "idp_3", "idp_4"}
_CLUSTER = {"avg_clust", "glob_clust"}
_PATH = {"avg_path_log", "p_diam_log"}
_EIGEN = {"max_eigen"}
_BETWEENNESS = {"max_vbc", "max_ebc"}

EXACT_PATH_CUTOFF = 20_000
PATH_SAMPLE_SOURCES = 2_000


class MetricError(GraphError):
    pass


class ConvergenceError(MetricError):
    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"power iteration did not converge after {iterations} iterations")


@dataclass(frozen=True)
class MetricVector:
    """All metrics of one graph. Metrics not computed are NaN.

    ``assortativity`` is NaN when undefined (zero degree variance).
    """

    num_nodes: int
    num_edges: int
    density: float = math.nan
    avg_deg: float = math.nan
    max_deg: float = math.nan
    max_deg_n: float = math.nan
    assortativity: float = math.nan
    avg_clust: float = math.nan
    glob_clust: float = math.nan
    idp_1: float = math.nan
    idp_2: float = math.nan
    idp_3: float = math.nan
    idp_4: float = math.nan
    max_eigen: float = math.nan
    max_vbc: float = math.nan
    max_ebc: float = math.nan
    avg_path_log: float = math.nan
    p_diam_log: float = math.nan

    def __getitem__(self, name: str) -> float:
        if name not in METRIC_NAMES:
            raise KeyError(f"unknown metric {name!r}")
        return getattr(self, name)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def row(self) -> list[float]:
        return [getattr(self, name) for name in METRIC_NAMES]

    @classmethod
    def from_mapping(cls, values) -> "MetricVector":
        kw = {}
        for f in fields(cls):
            v = values.get(f.name, math.nan)
            if f.name in SIZE_METRICS:
                v = int(float(v))
            else:
                v = math.nan if v in ("", None) else float(v)
            kw[f.name] = v
        return cls(**kw)


def validate_selection(names: Iterable[str]) -> tuple[str, ...]:
    names = tuple(names)
    if not names:
        raise MetricError("metric selection is empty")
    unknown = [n for n in names if n not in METRIC_NAMES]
    if unknown:
        raise MetricError(f"unknown metric(s): {', '.join(unknown)}")
    if len(set(names)) != len(names):
        raise MetricError("metric selection contains duplicates")
    return names


# --- degree ---------------------------------------------------------------

def idp_bins(degrees: np.ndarray) -> np.ndarray:
    """Fractions of nodes in [0, mu/2), [mu/2, mu), [mu, 2mu), [2mu, inf)."""
    degrees = np.asarray(degrees, dtype=np.float64)
    mu = degrees.mean()
    counts = np.array([
        np.count_nonzero(degrees < mu / 2),
        np.count_nonzero((degrees >= mu / 2) & (degrees < mu)),
        np.count_nonzero((degrees >= mu) & (degrees < 2 * mu)),
        np.count_nonzero(degrees >= 2 * mu),
    ], dtype=np.float64)
    return counts / degrees.size


def degree_metrics(graph: Graph) -> dict[str, float]:
    n = graph.n
    if n < 2:
        raise MetricError("degree metrics need at least 2 nodes")
    deg = graph.degrees
    m = graph.m
    idp = idp_bins(deg)
    max_deg = int(deg.max())
    return {
        "avg_deg": 2.0 * m / n,
        "max_deg": max_deg,
        "max_deg_n": max_deg / n,
        "density": 2.0 * m / (n * (n - 1)),
        "idp_1": float(idp[0]),
        "idp_2": float(idp[1]),
        "idp_3": float(idp[2]),
        "idp_4": float(idp[3]),
    }


# --- clustering -----------------------------------------------------------

def triangles_per_node(graph: Graph) -> np.ndarray:
    a = graph.adjacency()
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0


def clustering_metrics(graph: Graph) -> dict[str, float]:
    if graph.n < 3:
        raise MetricError("clustering metrics need at least 3 nodes")
    tri = triangles_per_node(graph)
    deg = graph.degrees.astype(np.float64)
    wedges = deg * (deg - 1) / 2.0
    local = np.divide(tri, wedges, out=np.zeros_like(tri), where=wedges > 0)
    total_wedges = wedges.sum()
    return {
        "avg_clust": float(local.mean()),
        "glob_clust": float(tri.sum() / total_wedges) if total_wedges > 0 else 0.0,
    }


# --- assortativity --------------------------------------------------------

def assortativity(graph: Graph) -> float:
    """Degree assortativity; NaN when the endpoint degrees have no variance."""
    e = graph.edges()
    if e.shape[0] == 0:
        return math.nan
    deg = graph.degrees.astype(np.float64)
    x = np.concatenate([deg[e[:, 0]], deg[e[:, 1]]])
    y = np.concatenate([deg[e[:, 1]], deg[e[:, 0]]])
    xc = x - x.mean()
    var = float(np.dot(xc, xc))
    if var <= 1e-12 * x.size * max(1.0, float(x.mean()) ** 2):
        return math.nan
    yc = y - y.mean()
    return float(np.dot(xc, yc) / math.sqrt(var * float(np.dot(yc, yc))))


# --- paths ----------------------------------------------------------------

def pseudo_diameter(graph: Graph, adj: list[list[int]] | None = None) -> int:
    """Iterated double sweep starting at node 0; farthest ties go to the smallest id."""
    if adj is None:
        adj = graph.adjacency_lists()
    source, ecc = 0, -1
    while True:
        dist = bfs_distances(adj, source)
        far = max(dist)
        if far <= ecc:
            return ecc
        ecc = far
        source = dist.index(far)


def average_path_length(graph: Graph, exact_cutoff: int = EXACT_PATH_CUTOFF,
                        samples: int = PATH_SAMPLE_SOURCES, seed: int = 0) -> float:
    n = graph.n
    a = graph.adjacency()
    if n <= exact_cutoff:
        sources = np.arange(n)
        pairs = n * (n - 1)
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=samples, replace=False))
        pairs = samples * (n - 1)
    total = 0.0
    chunk = max(1, 4_000_000 // max(n, 1))
    for start in range(0, sources.size, chunk):
        d = csgraph.shortest_path(a, method="D", directed=False, unweighted=True,
                                  indices=sources[start:start + chunk])
        if np.isinf(d).any():
            raise MetricError("graph is disconnected; extract the largest component first")
        total += float(d.sum())
    return total / pairs


def path_metrics(graph: Graph, exact_cutoff: int = EXACT_PATH_CUTOFF,
                 samples: int = PATH_SAMPLE_SOURCES, seed: int = 0) -> dict[str, float]:
    if graph.n < 2:
        raise MetricError("path metrics need at least 2 nodes")
    if not graph.is_connected():
        raise MetricError("graph is disconnected; extract the largest component first")
    log_n = math.log(graph.n)
    return {
        "avg_path_log": average_path_length(graph, exact_cutoff, samples, seed) / log_n,
        "p_diam_log": pseudo_diameter(graph) / log_n,
    }


# --- centralities ---------------------------------------------------------

def principal_eigenvector(graph: Graph, tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    """Unit-norm leading eigenvector of the adjacency matrix.

    Power iteration on ``A + I`` from the uniform vector; the shift removes
    the sign oscillation on bipartite graphs.
    """
    a = graph.adjacency()
    x = np.full(graph.n, 1.0 / math.sqrt(graph.n))
    for it in range(1, max_iter + 1):
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < tol:
            return y
        x = y
    raise ConvergenceError(max_iter)


def brandes_betweenness(graph: Graph) -> tuple[np.ndarray, dict[tuple[int, int], float]]:
    """Vertex and edge betweenness summed over unordered pairs (unnormalised)."""
    adj = graph.adjacency_lists()
    n = graph.n
    vb = [0.0] * n
    eb: dict[tuple[int, int], float] = {(int(u), int(v)): 0.0 for u, v in graph.edges()}
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s], dist[s] = 1, 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                order.append(v)
                dv = dist[v] + 1
                for w in adj[v]:
                    if dist[w] < 0:
                        dist[w] = dv
                        nxt.append(w)
                    if dist[w] == dv:
                        sigma[w] += sigma[v]
                        preds[w].append(v)
            frontier = nxt
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                eb[(v, w) if v < w else (w, v)] += c
                delta[v] += c
            if w != s:
                vb[w] += delta[w]
    # every unordered pair was counted from both ends
    return np.asarray(vb) / 2.0, {e: b / 2.0 for e, b in eb.items()}


def centrality_metrics(graph: Graph) -> dict[str, float]:
    n = graph.n
    if n < 3:
        raise MetricError("centrality metrics need at least 3 nodes")
    if not graph.is_connected():
        raise MetricError("graph is disconnected; extract the largest component first")
    out = {"max_eigen": float(principal_eigenvector(graph).max())}
    out.update(betweenness_maxima(graph))
    return out


def betweenness_maxima(graph: Graph) -> dict[str, float]:
    n = graph.n
    vb, eb = brandes_betweenness(graph)
    return {
        "max_vbc": float(vb.max()) / ((n - 1) * (n - 2) / 2.0),
        "max_ebc": max(eb.values()) / (n * (n - 1) / 2.0),
    }


# --- assembly -------------------------------------------------------------

def metric_vector(graph: Graph, names: Iterable[str] | None = None,
                  exact_path_cutoff: int = EXACT_PATH_CUTOFF,
                  path_samples: int = PATH_SAMPLE_SOURCES) -> MetricVector:
    """Compute the metric vector of ``graph``.

    ``names`` restricts the work to the groups those metrics need; the
    remaining fields stay NaN. Path and centrality metrics use the largest
    connected component; the size fields always describe the full graph.
    """
    if graph.n < 3:
        raise MetricError("metric vector needs at least 3 nodes")
    wanted = set(METRIC_NAMES if names is None else validate_selection(names))
    values: dict[str, float] = {"num_nodes": graph.n, "num_edges": graph.m}
    if wanted & _DEGREE:
        values.update(degree_metrics(graph))
    if wanted & _CLUSTER:
        values.update(clustering_metrics(graph))
    if "assortativity" in wanted:
        values["assortativity"] = assortativity(graph)
    if wanted & (_PATH | _EIGEN | _BETWEENNESS):
        core = largest_connected_component(graph)
        if "avg_path_log" in wanted:
            values.update(path_metrics(core, exact_path_cutoff, path_samples))
        elif "p_diam_log" in wanted:
            values["p_diam_log"] = pseudo_diameter(core) / math.log(core.n)
        if wanted & (_EIGEN | _BETWEENNESS) and core.n < 3:
            raise MetricError("largest component too small for centrality metrics")
        if wanted & _EIGEN:
            values["max_eigen"] = float(principal_eigenvector(core).max())
        if wanted & _BETWEENNESS:
            values.update(betweenness_maxima(core))
    return MetricVector(**values)


def project(vector: MetricVector, selection: Sequence[str]) -> np.ndarray:
    """Selected components in selection order; undefined slots are NaN."""
    selection = validate_selection(selection)
    return np.array([float(vector[name]) for name in selection], dtype=np.float64)
