"""Command-line entry point.

Subcommands:

* ``run``    -- run every agent in a config, one trial per seed; writes
  ``<out>/<agent>/results.csv`` and ``sorted.csv`` plus run metadata.
* ``sweep``  -- repeat ``run`` for each value of one config key, in
  ``<out>/<key>=<value>/`` subdirectories.
* ``trace``  -- replay one trial and write the per-step trace of one
  episode.
* ``report`` -- render figures from a previous run's CSV files.

``--set key=value`` overrides any config key; every run writes a
``metadata.json`` capturing the fully resolved configuration so the run
can be replayed bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config, preset_names, resolved_items
from .harness import (
    run_experiment,
    run_trace,
    write_results_csv,
    write_sorted_csv,
    write_trace_csv,
)


def _add_common(parser):
    parser.add_argument(
        "--config",
        required=True,
        help="config file path or bundled preset name "
        f"({', '.join(preset_names())})",
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    parser.add_argument(
        "--out", default="out", help="output directory (default: ./out)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikecart",
        description="Spiking-column reinforcement learning on the cart-pole task.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment")
    _add_common(p_run)
    p_run.add_argument("--jobs", type=int, default=1, help="parallel trials")
    p_run.add_argument(
        "--trace", action="store_true", help="also trace the first episode"
    )
    p_run.add_argument(
        "--figures", action="store_true", help="render figures after the run"
    )
    p_run.add_argument(
        "--dump-weights",
        action="store_true",
        help="snapshot end-of-trial column weights and Q-tables",
    )

    p_sweep = sub.add_parser("sweep", help="run once per value of one key")
    _add_common(p_sweep)
    p_sweep.add_argument("--key", required=True, help="config key to sweep")
    p_sweep.add_argument(
        "--values", required=True, help="comma-separated values"
    )
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--figures", action="store_true")

    p_trace = sub.add_parser("trace", help="trace one episode of one trial")
    _add_common(p_trace)
    p_trace.add_argument("--seed", type=int, required=True)
    p_trace.add_argument("--episode", type=int, required=True)
    p_trace.add_argument("--agent", default=None, help="agent kind override")
    p_trace.add_argument("--figures", action="store_true")

    p_report = sub.add_parser("report", help="render figures from CSV output")
    p_report.add_argument(
        "--out", default="out", help="run directory to render"
    )
    return parser


def _write_metadata(out_dir: Path, config, args_summary: dict):
    meta = {
        "version": __version__,
        "invocation": args_summary,
        "config": {key: value for key, value in resolved_items(config)},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_convergence_csv(path, trials):
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["seed", "convergence_episode", "episodes_run"])
        for trial in trials:
            writer.writerow(
                [
                    trial.seed,
                    "" if trial.convergence_episode is None
                    else trial.convergence_episode,
                    len(trial.episodes),
                ]
            )


def _run_one(
    config, out_dir: Path, jobs: int, trace: bool, dump_weights: bool = False
) -> None:
    for kind in config.agents:
        agent_dir = out_dir / kind
        agent_dir.mkdir(parents=True, exist_ok=True)
        dump_dir = str(agent_dir / "weights") if dump_weights else None
        trials = run_experiment(config, kind, jobs=jobs, dump_dir=dump_dir)
        write_results_csv(agent_dir / "results.csv", trials)
        write_sorted_csv(agent_dir / "sorted.csv", trials)
        if config.convergence.enabled:
            _write_convergence_csv(agent_dir / "convergence.csv", trials)
        if trace or config.trace:
            rows = run_trace(config, kind, config.seeds[0], 1)
            write_trace_csv(agent_dir / "trace.csv", rows)
        print(f"{kind}: {len(trials)} trials -> {agent_dir}")


def cmd_run(args) -> int:
    config = load_config(args.config, args.overrides)
    out_dir = Path(args.out)
    _write_metadata(
        out_dir, config, {"command": "run", "config": args.config}
    )
    _run_one(config, out_dir, args.jobs, args.trace, args.dump_weights)
    if args.figures:
        from .report import render_run_dir

        for path in render_run_dir(out_dir):
            print(f"figure: {path}")
    return 0


def cmd_sweep(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    out_root = Path(args.out)
    for value in values:
        overrides = list(args.overrides) + [f"{args.key}={value}"]
        config = load_config(args.config, overrides)
        out_dir = out_root / f"{args.key}={value}"
        _write_metadata(
            out_dir,
            config,
            {"command": "sweep", "config": args.config, "value": value},
        )
        _run_one(config, out_dir, args.jobs, trace=False)
    if args.figures and values:
        from .report import render_sorted_series

        for kind in load_config(args.config, args.overrides).agents:
            csvs = {
                f"{args.key}={v}": out_root / f"{args.key}={v}" / kind / "sorted.csv"
                for v in values
            }
            csvs = {k: p for k, p in csvs.items() if p.exists()}
            if csvs:
                render_sorted_series(csvs, out_root / f"sweep_{kind}.png")
                print(f"figure: {out_root / f'sweep_{kind}.png'}")
    return 0


def cmd_trace(args) -> int:
    config = load_config(args.config, args.overrides)
    kind = args.agent or config.agents[0]
    out_dir = Path(args.out)
    _write_metadata(
        out_dir,
        config,
        {
            "command": "trace",
            "config": args.config,
            "agent": kind,
            "seed": args.seed,
            "episode": args.episode,
        },
    )
    rows = run_trace(config, kind, args.seed, args.episode)
    path = out_dir / f"trace_{kind}_seed{args.seed}_ep{args.episode}.csv"
    write_trace_csv(path, rows)
    print(f"trace: {path} ({len(rows)} steps)")
    if args.figures:
        from .report import render_trace

        render_trace(path, path.with_suffix(".png"))
        print(f"figure: {path.with_suffix('.png')}")
    return 0


def cmd_report(args) -> int:
    from .report import render_run_dir

    written = render_run_dir(Path(args.out))
    if not written:
        print(f"no renderable CSV files under {args.out}", file=sys.stderr)
        return 1
    for path in written:
        print(f"figure: {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "trace": cmd_trace,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
