"""Grid-search calibration of network models against a target graph.

Each lattice point is scored by the mean Canberra distance between the
selected metrics of seeded realisations and those of the target; the
argmin over the lattice (earliest point on ties) is the calibrated model.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .generators import (MODEL_PARAMS, MODELS, ConstructionError, ModelParams,
                         construct_2k, extract_jdm, fit_sbm_partition, generate_cba,
                         generate_ff, sample_dcsbm)
from .graph import Graph, GraphError, largest_connected_component
from .metrics import (METRIC_NAMES, SIZE_METRICS, DEFAULT_SELECTION, MetricError,
                      MetricVector, metric_vector, project, validate_selection)
from .stats import canberra

log = logging.getLogger(__name__)

COUNTERPART_TAG = 0x5EED_C0DE
DEFAULT_REPLICATES = 3


def _frange(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(count)]


DEFAULT_AXES: dict[str, dict[str, list]] = {
    "CBA": {"cba_m": list(range(1, 11)), "cba_p": _frange(0.0, 1.0, 0.1)},
    "FF": {"ff_burn_p": _frange(0.05, 0.5, 0.025)},
    "SBM": {"sbm_blocks": list(range(1, 26))},
    "TWO_K": {},
}


class CalibrationError(RuntimeError):
    pass


@dataclass
class ParamGrid:
    model_id: str
    axes: dict[str, list] = field(default_factory=dict)
    replicates: int = DEFAULT_REPLICATES
    base_seed: int = 0

    def __post_init__(self):
        if self.model_id not in MODELS:
            raise ValueError(f"unknown model {self.model_id!r}")
        expected = set(MODEL_PARAMS[self.model_id])
        if set(self.axes) != expected:
            raise ValueError(f"{self.model_id} grid needs axes {sorted(expected)}, got {sorted(self.axes)}")
        if any(len(v) == 0 for v in self.axes.values()):
            raise ValueError("grid axes must be non-empty")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    @classmethod
    def default(cls, model_id: str, replicates: int = DEFAULT_REPLICATES, base_seed: int = 0) -> "ParamGrid":
        return cls(model_id, {k: list(v) for k, v in DEFAULT_AXES[model_id].items()}, replicates, base_seed)

    def points(self) -> list[dict]:
        """Lattice points in lexicographic axis order (the tie-break order)."""
        names = list(MODEL_PARAMS[self.model_id])
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axes[n] for n in names))]

    def __len__(self) -> int:
        return math.prod(len(v) for v in self.axes.values())


@dataclass
class PointResult:
    index: int
    params: dict
    mean_distance: float
    distances: list[float]
    masked: list[int]
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class CalibrationResult:
    model_id: str
    selection: tuple[str, ...]
    best_params: ModelParams
    best_distance: float
    per_point: list[PointResult]
    counterpart: Graph
    counterpart_seed: int
    counterpart_metrics: MetricVector

    def ledger_csv(self) -> str:
        names = list(MODEL_PARAMS[self.model_id])
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point", *names, "mean_distance", "distances", "masked", "error"])
        for p in self.per_point:
            w.writerow([
                p.index, *(p.params[n] for n in names),
                _fmt(p.mean_distance),
                ";".join(_fmt(d) for d in p.distances),
                ";".join(str(m) for m in p.masked),
                p.error or "",
            ])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "model_id": self.model_id,
            "selection": list(self.selection),
            "best_params": self.best_params.active(),
            "best_distance": _fmt(self.best_distance),
            "n_target": self.best_params.n_target,
            "base_seed": self.best_params.seed,
            "counterpart_seed": self.counterpart_seed,
            "counterpart_nodes": self.counterpart.n,
            "counterpart_edges": self.counterpart.m,
            "points_evaluated": len(self.per_point),
            "points_failed": sum(not p.ok for p in self.per_point),
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return "nan" if x is None or math.isnan(x) else repr(float(x))


class _Model:
    """Per-grid generator; fits that do not depend on the seed are cached."""

    def __init__(self, model_id: str, target: Graph):
        self.model_id = model_id
        self.target = target
        self._sbm_cache: dict[int, object] = {}
        self._jdm = None

    def __call__(self, params: ModelParams, *key) -> Graph:
        if self.model_id == "CBA":
            return generate_cba(params.n_target, params.cba_m, params.cba_p, params.seed, *key)
        if self.model_id == "FF":
            return generate_ff(params.n_target, params.ff_burn_p, params.seed, *key)
        if self.model_id == "SBM":
            b = params.sbm_blocks
            if b not in self._sbm_cache:
                self._sbm_cache[b] = fit_sbm_partition(self.target, b)
            return sample_dcsbm(self._sbm_cache[b], params.seed, *key)
        if self._jdm is None:
            self._jdm = extract_jdm(self.target)
        return construct_2k(self._jdm, params.seed, *key)


def selected_vector(graph: Graph, selection: Sequence[str]) -> np.ndarray:
    """Selected metrics of ``graph``; path and centrality metrics come from its LCC."""
    return project(metric_vector(graph, selection), selection)


def evaluate_point(model_id: str, params: ModelParams, target_vec: np.ndarray,
                   selection: Sequence[str], replicates: int, seed: int,
                   point_index: int = 0, target: Graph | None = None,
                   generator: Callable[..., Graph] | None = None) -> PointResult:
    """Mean Canberra distance of ``replicates`` realisations to ``target_vec``.

    Replicate ``i`` draws from the stream keyed by ``(seed, model_id,
    point_index, i)``. Replicates whose generation fails are left out of
    the mean; if all fail the point carries an error.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if generator is None:
        if target is None and model_id in ("SBM", "TWO_K"):
            raise ValueError(f"{model_id} needs the target graph")
        generator = _Model(model_id, target)
    params = replace(params, seed=seed)
    distances, masked, errors = [], [], []
    for rep in range(replicates):
        try:
            g = generator(params, point_index, rep)
            d, skipped = canberra(selected_vector(g, selection), target_vec)
        except (GraphError, MetricError) as exc:
            errors.append(str(exc))
            continue
        distances.append(d)
        masked.append(skipped)
    active = params.active()
    if not distances:
        return PointResult(point_index, active, math.nan, [], [], "; ".join(sorted(set(errors))))
    return PointResult(point_index, active, float(np.mean(distances)), distances, masked)


def _evaluate_task(args):
    model_id, params, target_vec, selection, replicates, seed, index, target = args
    return evaluate_point(model_id, params, target_vec, selection, replicates, seed, index, target)


def grid_search(target: Graph, grid: ParamGrid, selection: Sequence[str] = DEFAULT_SELECTION,
                jobs: int = 1, counterpart_names: Sequence[str] | None = None) -> CalibrationResult:
    """Evaluate every lattice point and regenerate a counterpart at the argmin.

    ``counterpart_names`` limits which metrics of the counterpart are
    computed (all by default).
    """
    selection = validate_selection(selection)
    if target.n < 3:
        raise CalibrationError("target needs at least 3 nodes")
    target_vec = selected_vector(target, selection)
    points = [ModelParams(grid.model_id, target.n, **pt) for pt in grid.points()]
    if jobs > 1 and len(points) > 1:
        tasks = [(grid.model_id, p, target_vec, selection, grid.replicates, grid.base_seed, i, target)
                 for i, p in enumerate(points)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_point = list(pool.map(_evaluate_task, tasks))
    else:
        model = _Model(grid.model_id, target)
        per_point = [evaluate_point(grid.model_id, p, target_vec, selection, grid.replicates,
                                    grid.base_seed, i, generator=model)
                     for i, p in enumerate(points)]
    valid = [p for p in per_point if p.ok]
    if not valid:
        raise CalibrationError(f"{grid.model_id}: every grid point failed ({per_point[0].error})")
    best = min(valid, key=lambda p: (p.mean_distance, p.index))
    cp_seed = (grid.base_seed ^ COUNTERPART_TAG) & ((1 << 64) - 1)
    best_params = replace(points[best.index], seed=grid.base_seed)
    counterpart = _Model(grid.model_id, target)(replace(best_params, seed=cp_seed))
    cp_view = largest_connected_component(counterpart)
    return CalibrationResult(
        model_id=grid.model_id,
        selection=selection,
        best_params=best_params,
        best_distance=best.mean_distance,
        per_point=per_point,
        counterpart=counterpart,
        counterpart_seed=cp_seed,
        counterpart_metrics=metric_vector(cp_view, counterpart_names),
    )


def evaluation_vector(vector: MetricVector, selection: Sequence[str],
                      include_size: bool = True) -> np.ndarray:
    names = list(selection) + ([s for s in SIZE_METRICS if s not in selection] if include_size else [])
    return project(vector, names)


def evaluation_distance(real_graph: Graph, counterpart: Graph, selection: Sequence[str],
                        include_size: bool = True) -> float:
    """Canberra distance over the selection plus node and edge counts.

    A disconnected counterpart is reduced to its largest component first.
    """
    selection = validate_selection(selection)
    cp = largest_connected_component(counterpart)
    names = list(selection) + [s for s in SIZE_METRICS if include_size and s not in selection]
    real = metric_vector(real_graph, names)
    other = metric_vector(cp, names)
    return canberra(evaluation_vector(real, selection, include_size),
                    evaluation_vector(other, selection, include_size))[0]


def metric_names_for_report(selection: Sequence[str]) -> list[str]:
    extra = ["avg_clust", "p_diam_log", "max_deg_n", "max_eigen"]
    return [n for n in METRIC_NAMES if n in set(selection) | set(extra) | set(SIZE_METRICS)]


__all__ = [
    "CalibrationError", "CalibrationResult", "ConstructionError", "DEFAULT_AXES", "ParamGrid",
    "PointResult", "evaluate_point", "evaluation_distance", "evaluation_vector", "grid_search",
    "selected_vector",
]
