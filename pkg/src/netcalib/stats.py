"""Rank correlations across domains, metric selection and Canberra distance."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .metrics import SIZE_METRICS

DOMAINS = ("friendship", "communication", "collaboration")
DEFAULT_THRESHOLD = 0.65
MIN_ROWS_PER_DOMAIN = 3


class StatsError(ValueError):
    pass


class UndefinedCorrelation(StatsError):
    pass


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman's rho with average ranks for ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise StatsError("spearman needs two sequences of equal length")
    if x.size < 3:
        raise StatsError("spearman needs at least 3 observations")
    rx = rankdata(x) - (x.size + 1) / 2.0
    ry = rankdata(y) - (y.size + 1) / 2.0
    sx, sy = np.dot(rx, rx), np.dot(ry, ry)
    if sx == 0 or sy == 0:
        raise UndefinedCorrelation("constant sequence has no rank correlation")
    return float(np.clip(np.dot(rx, ry) / math.sqrt(sx * sy), -1.0, 1.0))


@dataclass
class MetricTable:
    """One row per network; ``columns`` maps metric name to its values."""

    names: list[str]
    domains: list[str]
    columns: dict[str, np.ndarray]

    @property
    def metrics(self) -> list[str]:
        return list(self.columns)

    def domain_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for d in self.domains:
            counts[d] = counts.get(d, 0) + 1
        return counts


def domain_avg_correlation(table: MetricTable) -> np.ndarray:
    """Mean over domains of |rho| for every metric pair.

    Pairs undefined within a domain (a constant or missing column) are
    averaged over the remaining domains; pairs undefined everywhere are NaN.
    """
    for dom, count in table.domain_counts().items():
        if count < MIN_ROWS_PER_DOMAIN:
            raise StatsError(
                f"domain {dom!r} has {count} rows; at least {MIN_ROWS_PER_DOMAIN} needed")
    names = table.metrics
    k = len(names)
    sums = np.zeros((k, k))
    counts = np.zeros((k, k))
    domains = np.asarray(table.domains)
    for dom in sorted(set(table.domains)):
        rows = domains == dom
        cols = [np.asarray(table.columns[name], dtype=np.float64)[rows] for name in names]
        for i in range(k):
            for j in range(i, k):
                ok = ~(np.isnan(cols[i]) | np.isnan(cols[j]))
                if ok.sum() < MIN_ROWS_PER_DOMAIN:
                    continue
                try:
                    rho = abs(spearman(cols[i][ok], cols[j][ok]))
                except UndefinedCorrelation:
                    continue
                sums[i, j] += rho
                counts[i, j] += 1
                if i != j:
                    sums[j, i] += rho
                    counts[j, i] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


@dataclass
class CorrelationNetwork:
    nodes: list[str]
    weights: dict[tuple[str, str], float] = field(default_factory=dict)
    threshold: float = DEFAULT_THRESHOLD

    def neighbors(self, node: str) -> set[str]:
        out = set()
        for a, b in self.weights:
            if a == node:
                out.add(b)
            elif b == node:
                out.add(a)
        return out

    def edge_rows(self) -> list[tuple[str, str, float]]:
        return [(a, b, w) for (a, b), w in self.weights.items()]


def build_correlation_network(matrix: np.ndarray, names: Sequence[str],
                              threshold: float = DEFAULT_THRESHOLD) -> CorrelationNetwork:
    """Connect two metrics when their entry strictly exceeds ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise StatsError("threshold must lie in [0, 1]")
    matrix = np.asarray(matrix, dtype=np.float64)
    names = list(names)
    if matrix.shape != (len(names), len(names)):
        raise StatsError("matrix shape does not match the metric names")
    weights = {}
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            w = matrix[i, j]
            if not np.isnan(w) and w > threshold:
                weights[(names[i], names[j])] = float(w)
    return CorrelationNetwork(names, weights, threshold)


def greedy_mis(nodes: Sequence[str], edges: Mapping[tuple[str, str], float] | set) -> list[str]:
    """Greedy maximal independent set: minimum degree first, ties by name."""
    adj = {v: set() for v in nodes}
    for a, b in edges:
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    chosen = []
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        chosen.append(v)
        removed = adj[v] | {v}
        for u in removed:
            adj.pop(u, None)
        for nb in adj.values():
            nb -= removed
    return chosen


def select_metrics(network: CorrelationNetwork,
                   size_seeds: Sequence[str] = SIZE_METRICS) -> list[str]:
    """Drop the size metrics and their neighbours, then take a greedy MIS."""
    missing = [s for s in size_seeds if s not in network.nodes]
    if missing:
        raise StatsError(f"size seed(s) not in network: {', '.join(missing)}")
    excluded = set(size_seeds)
    for s in size_seeds:
        excluded |= network.neighbors(s)
    remainder = [v for v in network.nodes if v not in excluded]
    if not remainder:
        raise StatsError("all metrics size-dependent")
    return greedy_mis(remainder, network.weights)


def canberra(x: Sequence[float], y: Sequence[float]) -> tuple[float, int]:
    """Canberra distance and the number of slots skipped.

    A slot is skipped when either side is NaN (undefined assortativity);
    0/0 terms contribute nothing.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise StatsError(f"dimension mismatch: {x.shape} vs {y.shape}")
    mask = np.isnan(x) | np.isnan(y)
    xv, yv = x[~mask], y[~mask]
    num = np.abs(xv - yv)
    den = np.abs(xv) + np.abs(yv)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(terms.sum()), int(mask.sum())


def canberra_terms(x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Per-component Canberra terms; NaN where a slot is masked."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    den = np.abs(x) + np.abs(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(den > 0, np.abs(x - y) / den, 0.0)
    t[np.isnan(x) | np.isnan(y)] = np.nan
    return t
