"""Report figures rendered with the Agg backend.

PNG metadata is stripped so reruns produce identical files.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 4.5

CATEGORY_STYLE = {
    "real": dict(color="#222222", marker="o", s=28),
    "2K": dict(color="#1b9e77", marker="s", s=18),
    "CBA": dict(color="#d95f02", marker="^", s=18),
    "FF": dict(color="#7570b3", marker="v", s=18),
    "SBM": dict(color="#e7298a", marker="D", s=14),
}

params = {
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (fig_width, fig_width * golden_mean),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "svg.hashsalt": "netcalib",
}

SCATTER_PAIRS = (
    ("avg_clust", "p_diam_log*"),
    ("max_deg_n*", "max_eigen"),
)


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def domain_distance_figure(matrix_rows, path: Path) -> Path:
    """Grouped bars of mean evaluation distance per domain and model."""
    domains = list(dict.fromkeys(r[0] for r in matrix_rows))
    models = list(dict.fromkeys(r[1] for r in matrix_rows))
    value = {(r[0], r[1]): r[2] for r in matrix_rows}
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        width = 0.8 / len(models)
        x = np.arange(len(domains))
        for i, model in enumerate(models):
            ys = [value.get((d, model), math.nan) for d in domains]
            ax.bar(x + i * width, ys, width, label=model,
                   color=CATEGORY_STYLE.get(model, {}).get("color"))
        ax.set_xticks(x + width * (len(models) - 1) / 2)
        ax.set_xticklabels(domains)
        ax.set_ylabel("mean Canberra distance")
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def scatter_figure(header, rows, x_name, y_name, path: Path) -> Path:
    ix, iy, icat = header.index(x_name), header.index(y_name), header.index("category")
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for cat, style in CATEGORY_STYLE.items():
            pts = [(float(r[ix]), float(r[iy])) for r in rows if r[icat] == cat]
            if pts:
                xs, ys = zip(*pts)
                ax.scatter(xs, ys, label=cat, alpha=0.8, **style)
        ax.set_xlabel(x_name.rstrip("*"))
        ax.set_ylabel(y_name.rstrip("*"))
        ax.legend(frameon=False)
        fig.tight_layout()
        return _save(fig, path)


def render_report(report_dir: Path, matrix_rows, scatter_header, scatter_rows) -> dict[str, Path]:
    figdir = Path(report_dir) / "figures"
    out = {"fig_domain_distances": domain_distance_figure(matrix_rows, figdir / "domain_distances.png")}
    for x_name, y_name in SCATTER_PAIRS:
        key = f"{x_name.rstrip('*')}_vs_{y_name.rstrip('*')}"
        out[f"fig_{key}"] = scatter_figure(scatter_header, scatter_rows, x_name, y_name,
                                           figdir / f"scatter_{key}.png")
    return out
