"""Command line entry point: ``netcalib {metrics,select,calibrate,report,all}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .generators import MODELS
from .metrics import DEFAULT_SELECTION

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2

log = logging.getLogger("netcalib")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value run configuration")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="base seed for every random stream")
    common.add_argument("--threshold", type=float, help="correlation network threshold")
    common.add_argument("--models", help=f"comma-separated subset of {','.join(MODELS)}")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="netcalib", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, needs_manifest, help_text in (
        ("metrics", True, "compute the metric table of every network"),
        ("select", False, "build the correlation network and select metrics"),
        ("calibrate", True, "calibrate every model against every network"),
        ("report", False, "domain distance table, scatter data and diagnostic"),
        ("all", True, "run the full pipeline"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if needs_manifest:
            p.add_argument("--manifest", type=Path, required=True, help="CSV with path,name,domain")
    return parser


def load_config(args) -> pipeline.RunConfig:
    cfg = pipeline.RunConfig.from_file(args.config) if args.config else pipeline.RunConfig()
    if args.out is not None:
        cfg.out = args.out
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.threshold is not None:
        cfg.threshold = args.threshold
    if args.models:
        cfg.models = args.models.split(",")
    if args.jobs is not None:
        cfg.jobs = args.jobs
    cfg.validate()
    return cfg


def _selection(cfg: pipeline.RunConfig) -> list[str]:
    path = cfg.out / pipeline.SELECTION_FILE
    if path.exists():
        return pipeline.read_selection(path)
    return list(cfg.selection or DEFAULT_SELECTION)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except (OSError, ValueError) as exc:
        parser.exit(EXIT_USAGE, f"netcalib: error: {exc}\n")
    cfg.out.mkdir(parents=True, exist_ok=True)
    try:
        if args.command == "metrics":
            pipeline.run_metrics(pipeline.read_manifest(args.manifest), cfg)
        elif args.command == "select":
            selection = pipeline.run_selection(cfg.out / pipeline.METRICS_FILE, cfg)
            print("\n".join(selection))
        elif args.command == "calibrate":
            pipeline.run_calibration(pipeline.read_manifest(args.manifest), _selection(cfg), cfg)
        elif args.command == "report":
            pipeline.run_report(cfg, _selection(cfg))
        else:
            pipeline.run_all(args.manifest, cfg)
    except (pipeline.PipelineError, pipeline.StatsError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
