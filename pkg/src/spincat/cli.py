"""Command-line harness: run sweeps, manage presets and the cache, render figures.

Exit codes: 0 success, 1 configuration error, 2 partial per-point failures,
3 total failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .cache import ENV_CACHE_DIR, GroundStateCache, default_cache_dir
from .sweep import PRESETS, ConfigError, SweepConfig, run_sweep

ENV_OUTPUT_DIR = "SPINCAT_OUTPUT_DIR"
ENV_WORKERS = "SPINCAT_WORKERS"


def _load_config(args) -> SweepConfig:
    if args.preset:
        raw = dict(PRESETS[args.preset])
    elif args.config:
        return _apply_overrides(SweepConfig.from_file(args.config), args)
    else:
        raise ConfigError("provide a config file or --preset")
    return _apply_overrides(SweepConfig.from_dict(raw), args)


def _apply_overrides(cfg: SweepConfig, args) -> SweepConfig:
    updates: dict = {}
    out = args.output_dir or os.environ.get(ENV_OUTPUT_DIR)
    if out:
        updates["output_dir"] = out
    workers = args.workers if args.workers else os.environ.get(ENV_WORKERS)
    if workers:
        updates["workers"] = int(workers)
    if getattr(args, "n_cutoff", None):
        updates["n_cutoff"] = args.n_cutoff
    if not updates:
        return cfg
    raw = cfg.to_dict()
    raw.update(updates)
    return SweepConfig.from_dict(raw)


def _cmd_run(args) -> int:
    try:
        cfg = _load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    cache = None
    if not args.no_cache:
        cache_dir = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
        cache = GroundStateCache(cache_dir)
    subdir = args.preset if args.preset else cfg.experiment
    out = Path(cfg.output_dir) / subdir
    report = run_sweep(cfg, output_dir=out, cache=cache)
    for failure in report.failures:
        print(f"FAILED {failure['point']}: {failure['error']}", file=sys.stderr)
    print(f"wrote {report.csv_path}")
    if args.plot:
        from .plots import render_output_dir

        for png in render_output_dir(report.output_dir):
            print(f"wrote {png}")
    if report.failures:
        print(
            f"{len(report.failures)} grid point(s) failed "
            f"(see {report.manifest_path})",
            file=sys.stderr,
        )
    return report.exit_code


def _cmd_validate(args) -> int:
    try:
        SweepConfig.from_file(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.config}: OK")
    return 0


def _cmd_presets(args) -> int:
    if args.write:
        outdir = Path(args.write)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, raw in PRESETS.items():
            path = outdir / f"{name}.json"
            path.write_text(json.dumps(raw, indent=2) + "\n")
            print(f"wrote {path}")
        return 0
    for name, raw in PRESETS.items():
        print(f"{name}: {raw['experiment']}  N={raw['n_atoms']} "
              f"g/gc={raw['g_over_gc']} ratio={raw['omega_ratio']}")
    return 0


def _cmd_cache(args) -> int:
    cache_dir = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
    cache = GroundStateCache(cache_dir)
    if args.action == "list":
        entries = cache.entries()
        for path in entries:
            print(path)
        print(f"{len(entries)} cached ground state(s) in {cache_dir}")
        return 0
    removed = cache.clear()
    print(f"removed {removed} cached ground state(s) from {cache_dir}")
    return 0


def _cmd_plot(args) -> int:
    from .plots import render_output_dir

    written = render_output_dir(args.directory)
    if not written:
        print(f"no renderable CSV files found in {args.directory}",
              file=sys.stderr)
        return 1
    for png in written:
        print(f"wrote {png}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincat",
        description="Heralded spin cat states from the Dicke model: sweeps, "
                    "Wigner data, and thermodynamic-limit references.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep from a config file or preset")
    run.add_argument("config", nargs="?", help="JSON config file")
    run.add_argument("--preset", choices=sorted(PRESETS),
                     help="run a built-in figure preset")
    run.add_argument("-o", "--output-dir", help=f"output root (or ${ENV_OUTPUT_DIR})")
    run.add_argument("--workers", type=int, help=f"thread count (or ${ENV_WORKERS})")
    run.add_argument("--n-cutoff", type=int, help="override the photon cutoff")
    run.add_argument("--cache-dir", help=f"ground-state cache (or ${ENV_CACHE_DIR})")
    run.add_argument("--no-cache", action="store_true",
                     help="solve every point fresh")
    run.add_argument("--plot", action="store_true",
                     help="render figures after the run")
    run.set_defaults(func=_cmd_run)

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("config")
    val.set_defaults(func=_cmd_validate)

    pre = sub.add_parser("presets", help="list or export figure presets")
    pre.add_argument("--write", metavar="DIR", help="write preset JSON files")
    pre.set_defaults(func=_cmd_presets)

    cac = sub.add_parser("cache", help="inspect or clear the ground-state cache")
    cac.add_argument("action", choices=("list", "clear"))
    cac.add_argument("--cache-dir", help=f"cache directory (or ${ENV_CACHE_DIR})")
    cac.set_defaults(func=_cmd_cache)

    plot = sub.add_parser("plot", help="render figures from a results directory")
    plot.add_argument("directory")
    plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
