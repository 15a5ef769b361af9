"""Batch stages: metrics, selection, calibration and report.

Every stage reads and writes plain files under one output directory, so
stages can be rerun independently. Output bytes depend only on the inputs,
the config and the seed.
"""
from __future__ import annotations

import configparser
import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .calibration import (DEFAULT_AXES, DEFAULT_REPLICATES, CalibrationError, ParamGrid,
                          evaluation_vector, grid_search, metric_names_for_report)
from .generators import MODEL_LABELS, MODEL_PARAMS, MODELS
from .graph import GraphError, read_edge_list, write_edge_list
from .metrics import (LOCALLY_NORMALIZED, METRIC_NAMES, SIZE_METRICS, DEFAULT_SELECTION,
                      MetricError, MetricVector, metric_vector, validate_selection)
from .stats import (DEFAULT_THRESHOLD, DOMAINS, MetricTable, StatsError,
                    build_correlation_network, canberra, domain_avg_correlation, select_metrics)

log = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"
MATRIX_FILE = "correlation_matrix.csv"
EDGES_FILE = "correlation_edges.csv"
SELECTION_FILE = "selection.txt"
CALIBRATION_DIR = "calibration"
REPORT_DIR = "report"

JOINT_FRACTION = 0.8
DIAGNOSTIC_METRICS = ("avg_clust", "p_diam_log")
SCATTER_METRICS = ("avg_clust", "p_diam_log", "max_deg_n", "max_eigen")


class PipelineError(RuntimeError):
    """A stage could not produce any output."""


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    name: str
    domain: str


def read_manifest(path) -> list[ManifestEntry]:
    """CSV with header ``path,name,domain``; relative paths resolve against the manifest."""
    path = Path(path)
    base = path.parent
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"path", "name", "domain"} - set(reader.fieldnames or ())
        if missing:
            raise PipelineError(f"manifest lacks column(s): {', '.join(sorted(missing))}")
        for row in reader:
            domain = row["domain"].strip()
            if domain not in DOMAINS:
                raise PipelineError(f"network {row['name']!r}: unknown domain {domain!r}")
            p = Path(row["path"].strip())
            entries.append(ManifestEntry(p if p.is_absolute() else base / p, row["name"].strip(), domain))
    names = [e.name for e in entries]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise PipelineError(f"duplicate network name(s): {', '.join(dupes)}")
    return entries


def _parse_list(text: str, cast):
    return [cast(tok.strip()) for tok in text.split(",") if tok.strip()]


@dataclass
class RunConfig:
    """Run settings; every field can be set from a flat ``key = value`` file."""

    threshold: float = DEFAULT_THRESHOLD
    selection: list[str] | None = None
    models: list[str] = field(default_factory=lambda: list(MODELS))
    cba_m: list[int] = field(default_factory=lambda: list(DEFAULT_AXES["CBA"]["cba_m"]))
    cba_p: list[float] = field(default_factory=lambda: list(DEFAULT_AXES["CBA"]["cba_p"]))
    ff_burn_p: list[float] = field(default_factory=lambda: list(DEFAULT_AXES["FF"]["ff_burn_p"]))
    sbm_blocks: list[int] = field(default_factory=lambda: list(DEFAULT_AXES["SBM"]["sbm_blocks"]))
    replicates: int = DEFAULT_REPLICATES
    base_seed: int = 0
    out: Path = Path("out")
    exact_path_cutoff: int = 20_000
    path_samples: int = 2_000
    include_size: bool = True
    full_counterpart_metrics: bool = True
    figures: bool = True
    jobs: int = 1

    _LISTS = {"cba_m": int, "cba_p": float, "ff_burn_p": float, "sbm_blocks": int,
              "models": str, "selection": str}

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        text = Path(path).read_text(encoding="utf-8")
        parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        parser.read_string(text)
        values = {}
        for section in parser.sections():
            values.update(parser[section])
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls) if not f.name.startswith("_")}
        kw = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if not isinstance(raw, str):
                kw[key] = raw
            elif key in cls._LISTS:
                kw[key] = _parse_list(raw, cls._LISTS[key]) or None
            elif key in ("include_size", "full_counterpart_metrics", "figures"):
                kw[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key == "out":
                kw[key] = Path(raw.strip())
            else:
                kw[key] = type(getattr(cls(), key))(raw.strip())
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.selection is not None:
            self.selection = list(validate_selection(self.selection))
        self.models = [m.strip().upper().replace("2K", "TWO_K") for m in self.models]
        unknown = [m for m in self.models if m not in MODELS]
        if unknown or not self.models:
            raise ValueError(f"models must be drawn from {MODELS}")
        for axis in ("cba_m", "cba_p", "ff_burn_p", "sbm_blocks"):
            if not getattr(self, axis):
                raise ValueError(f"grid axis {axis} is empty")
        if any(not 0 <= p <= 1 for p in self.cba_p) or any(not 0 <= p < 1 for p in self.ff_burn_p):
            raise ValueError("grid probabilities out of range")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")

    def grid(self, model_id: str) -> ParamGrid:
        axes = {name: list(getattr(self, name)) for name in MODEL_PARAMS[model_id]}
        return ParamGrid(model_id, axes, self.replicates, self.base_seed)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, int, np.floating, np.integer)) else v
                        for v in row])


def _pool_map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# --- stage 1: metrics -----------------------------------------------------

METRICS_HEADER = ["name", "domain", *METRIC_NAMES]


def _metrics_task(args):
    entry, cfg = args
    try:
        graph = read_edge_list(entry.path)
        vec = metric_vector(graph, exact_path_cutoff=cfg.exact_path_cutoff,
                            path_samples=cfg.path_samples)
    except (OSError, GraphError, MetricError) as exc:
        return entry, None, str(exc)
    return entry, vec, None


def run_metrics(manifest: Sequence[ManifestEntry], cfg: RunConfig) -> Path:
    """One row of all metrics per network; bad networks are skipped with a warning."""
    results = _pool_map(_metrics_task, [(e, cfg) for e in manifest], cfg.jobs)
    rows = []
    for entry, vec, err in results:
        if err is not None:
            log.warning("skipping %s: %s", entry.name, err)
            continue
        rows.append([entry.name, entry.domain, *vec.row()])
    if not rows:
        raise PipelineError("no network could be processed")
    out = cfg.out / METRICS_FILE
    _write_csv(out, METRICS_HEADER, rows)
    log.info("wrote %d metric rows to %s", len(rows), out)
    return out


def read_metric_table(path) -> tuple[list[str], list[str], list[MetricVector]]:
    names, domains, vectors = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            names.append(row["name"])
            domains.append(row["domain"])
            vectors.append(MetricVector.from_mapping(row))
    return names, domains, vectors


# --- stage 2: selection ---------------------------------------------------

def run_selection(metrics_path, cfg: RunConfig) -> list[str]:
    """Correlation network over all metrics, then size exclusion and greedy MIS."""
    names, domains, vectors = read_metric_table(metrics_path)
    table = MetricTable(names, domains, {
        m: np.array([float(v[m]) for v in vectors]) for m in METRIC_NAMES})
    matrix = domain_avg_correlation(table)
    network = build_correlation_network(matrix, METRIC_NAMES, cfg.threshold)
    selection = select_metrics(network)
    _write_csv(cfg.out / MATRIX_FILE, ["metric", *METRIC_NAMES],
               ([a, *matrix[i]] for i, a in enumerate(METRIC_NAMES)))
    _write_csv(cfg.out / EDGES_FILE, ["metric_a", "metric_b", "weight"], network.edge_rows())
    (cfg.out / SELECTION_FILE).write_text("".join(f"{s}\n" for s in selection), encoding="utf-8")
    log.info("selected %d metrics: %s", len(selection), ", ".join(selection))
    return selection


def read_selection(path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").split()
    return list(validate_selection(lines))


# --- stage 3: calibration -------------------------------------------------

def _calibration_dir(cfg: RunConfig, name: str) -> Path:
    return cfg.out / CALIBRATION_DIR / name


def _calibrate_task(args):
    entry, model_id, selection, cfg = args
    target_dir = _calibration_dir(cfg, entry.name)
    target_dir.mkdir(parents=True, exist_ok=True)
    meta_path = target_dir / f"{model_id}.json"
    try:
        target = read_edge_list(entry.path)
        names = None if cfg.full_counterpart_metrics else metric_names_for_report(selection)
        result = grid_search(target, cfg.grid(model_id), selection, counterpart_names=names)
    except (OSError, GraphError, MetricError, CalibrationError) as exc:
        meta = {"model_id": model_id, "network": entry.name, "status": "failed", "error": str(exc)}
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (target_dir / f"{model_id}.ledger.csv").write_text(f"error\n{json.dumps(str(exc))}\n",
                                                          encoding="utf-8")
        return entry.name, model_id, str(exc)
    (target_dir / f"{model_id}.ledger.csv").write_text(result.ledger_csv(), encoding="utf-8")
    meta = result.metadata()
    meta.update(network=entry.name, domain=entry.domain, status="ok",
                counterpart_metrics={k: _fmt(v) for k, v in result.counterpart_metrics.as_dict().items()})
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    sidecar = {"model_id": model_id, "params": result.best_params.active(),
               "seed": result.counterpart_seed, "n_target": result.best_params.n_target}
    edges_path = target_dir / f"{model_id}.edges"
    write_edge_list(result.counterpart, edges_path,
                    header=f"{MODEL_LABELS[model_id]} counterpart of {entry.name}")
    edges_path.with_suffix(".meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return entry.name, model_id, None


def run_calibration(manifest: Sequence[ManifestEntry], selection: Sequence[str],
                    cfg: RunConfig) -> list[tuple[str, str, str | None]]:
    """Calibrate every model against every network; failures are isolated per pair."""
    selection = list(validate_selection(selection))
    tasks = [(e, m, selection, cfg) for e in manifest for m in cfg.models]
    outcomes = _pool_map(_calibrate_task, tasks, cfg.jobs)
    for name, model_id, err in outcomes:
        if err is not None:
            log.warning("calibration of %s on %s failed: %s", model_id, name, err)
    if all(err is not None for _, _, err in outcomes):
        raise PipelineError("every calibration failed")
    return outcomes


# --- stage 4: report ------------------------------------------------------

def load_results(cfg: RunConfig) -> list[dict]:
    root = cfg.out / CALIBRATION_DIR
    results = []
    if root.is_dir():
        for path in sorted(root.glob("*/*.json")):
            if path.name.endswith(".meta.json"):
                continue
            meta = json.loads(path.read_text(encoding="utf-8"))
            if meta.get("status") == "ok":
                results.append(meta)
    return results


def joint_score(target: MetricVector, counterpart: MetricVector) -> tuple[float, float, float]:
    """Ratios counterpart/target for clustering and normalised diameter, and their minimum."""
    ratios = []
    for name in DIAGNOSTIC_METRICS:
        t, c = float(target[name]), float(counterpart[name])
        ratios.append(c / t if t > 0 else (1.0 if c >= t else 0.0))
    return ratios[0], ratios[1], min(ratios)


def run_report(cfg: RunConfig, selection: Sequence[str] | None = None) -> dict[str, Path]:
    """Domain x model distance table, scatter data, clustering/diameter diagnostic."""
    results = load_results(cfg)
    if not results:
        raise PipelineError("no calibration results to report")
    names, domains, vectors = read_metric_table(cfg.out / METRICS_FILE)
    real = dict(zip(names, vectors))
    domain_of = dict(zip(names, domains))
    report = cfg.out / REPORT_DIR

    distances: dict[tuple[str, str], list[float]] = {}
    detail_rows, diag_rows = [], []
    for meta in results:
        name, model_id = meta["network"], meta["model_id"]
        if name not in real:
            log.warning("no metrics row for %s; skipping its %s counterpart", name, model_id)
            continue
        sel = selection or meta["selection"]
        cp = MetricVector.from_mapping(meta["counterpart_metrics"])
        d, masked = canberra(evaluation_vector(real[name], sel, cfg.include_size),
                             evaluation_vector(cp, sel, cfg.include_size))
        distances.setdefault((domain_of[name], model_id), []).append(d)
        detail_rows.append([name, domain_of[name], MODEL_LABELS[model_id], d, masked])
        c_ratio, d_ratio, score = joint_score(real[name], cp)
        diag_rows.append([name, domain_of[name], MODEL_LABELS[model_id],
                          real[name]["avg_clust"], cp["avg_clust"],
                          real[name]["p_diam_log"], cp["p_diam_log"],
                          c_ratio, d_ratio, score, int(score >= JOINT_FRACTION)])

    present = [d for d in DOMAINS if d in set(domain_of.values())]
    matrix_rows = []
    for dom in present:
        for model_id in MODELS:
            vals = distances.get((dom, model_id), [])
            matrix_rows.append([dom, MODEL_LABELS[model_id],
                                float(np.mean(vals)) if vals else math.nan, len(vals)])
    paths = {"domain_distances": report / "domain_distances.csv",
             "distances": report / "distances.csv",
             "scatter": report / "scatter.csv",
             "diagnostic": report / "diagnostic.csv",
             "diagnostic_summary": report / "diagnostic_summary.csv"}
    _write_csv(paths["domain_distances"], ["domain", "model", "mean_distance", "networks"], matrix_rows)
    _write_csv(paths["distances"], ["network", "domain", "model", "distance", "masked_slots"], detail_rows)

    scatter_header = ["network", "domain", "category",
                      *(f"{m}*" if m in LOCALLY_NORMALIZED else m for m in SCATTER_METRICS)]
    scatter_rows = [[n, domain_of[n], "real", *(real[n][m] for m in SCATTER_METRICS)] for n in names]
    for meta in results:
        if meta["network"] in real:
            cp = MetricVector.from_mapping(meta["counterpart_metrics"])
            scatter_rows.append([meta["network"], domain_of[meta["network"]],
                                 MODEL_LABELS[meta["model_id"]], *(cp[m] for m in SCATTER_METRICS)])
    _write_csv(paths["scatter"], scatter_header, scatter_rows)

    _write_csv(paths["diagnostic"],
               ["network", "domain", "model", "target_avg_clust", "counterpart_avg_clust",
                "target_p_diam_log", "counterpart_p_diam_log", "clust_ratio", "diam_ratio",
                "joint_score", "passes_joint"], diag_rows)
    summary = []
    for model_id in MODELS:
        rows = [r for r in diag_rows if r[2] == MODEL_LABELS[model_id]]
        if rows:
            summary.append([MODEL_LABELS[model_id], len(rows),
                            sum(r[10] for r in rows) / len(rows),
                            float(np.mean([r[9] for r in rows]))])
    _write_csv(paths["diagnostic_summary"],
               ["model", "counterparts", "fraction_passing", "mean_joint_score"], summary)

    if cfg.figures:
        from . import plotting
        paths.update(plotting.render_report(report, matrix_rows, scatter_header, scatter_rows))
    return paths


# --- full pipeline --------------------------------------------------------

def run_all(manifest_path, cfg: RunConfig) -> dict[str, Path]:
    manifest = read_manifest(manifest_path)
    cfg.out.mkdir(parents=True, exist_ok=True)
    metrics_path = run_metrics(manifest, cfg)
    if cfg.selection:
        selection = list(cfg.selection)
        (cfg.out / SELECTION_FILE).write_text("".join(f"{s}\n" for s in selection), encoding="utf-8")
    else:
        selection = run_selection(metrics_path, cfg)
    run_calibration(manifest, selection, cfg)
    return run_report(cfg, selection)


__all__ = [
    "ManifestEntry", "PipelineError", "RunConfig", "joint_score", "read_manifest",
    "read_selection", "run_all", "run_calibration", "run_metrics", "run_report", "run_selection",
    "StatsError", "DEFAULT_SELECTION", "SIZE_METRICS",
]
