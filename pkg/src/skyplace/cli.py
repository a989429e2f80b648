"""Command line: ``skyplace run | replicate | sweep | config``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import kernels
from .config import ALGORITHMS, ConfigError, SimConfig, dump_config, load_config, parse_seeds
from .engine import run_episode, run_replications, sweep
from .export import write_json, write_manifest, write_table_csv, write_timeseries_csv

log = logging.getLogger("skyplace")


def _base_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    changes = {}
    if getattr(args, "algo", None):
        changes["algorithm"] = args.algo
    if args.users is not None:
        changes["n_users"] = args.users
    if args.uavs is not None:
        changes["n_uavs"] = args.uavs
    if args.steps is not None:
        changes["steps"] = args.steps
    if args.channel_mode is not None:
        changes["channel_mode"] = args.channel_mode
    if getattr(args, "seeds", None):
        changes["seeds"] = parse_seeds(args.seeds)
    return cfg.replace(**changes)


def _common(p: argparse.ArgumentParser, algo=True):
    p.add_argument("--config", help="INI configuration file")
    if algo:
        p.add_argument("--algo", choices=ALGORITHMS)
    p.add_argument("--users", type=int)
    p.add_argument("--uavs", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--channel-mode", choices=("expected", "bernoulli"))
    p.add_argument("--backend", choices=("cython", "python"),
                   help="kernel backend (default: compiled if available)")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skyplace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one episode; writes timeseries.csv, summary.json, manifest.json")
    _common(p)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("replicate", help="several seeds; writes summary.json, manifest.json")
    _common(p)
    p.add_argument("--seeds", help="e.g. 0-19 or 1,5,9 (default from config)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("sweep", help="users or UAV count sweep; writes sweep.csv, manifest.json")
    _common(p, algo=False)
    p.add_argument("--axis", choices=("users", "uavs"), required=True)
    p.add_argument("--values", required=True, help="comma list or a-b ranges, e.g. 30,60,90 or 2-12")
    p.add_argument("--algos", default=",".join(ALGORITHMS))
    p.add_argument("--seeds")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("config", help="print the resolved configuration as INI")
    p.add_argument("--config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "config":
            cfg = load_config(args.config) if args.config else SimConfig()
            sys.stdout.write(dump_config(cfg.resolved()))
            return 0
        cfg = _base_config(args)
        cfg.resolved()
        backend = kernels.get_backend(args.backend)
    except (ConfigError, ImportError, OSError) as exc:
        print(f"skyplace: error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cmd = " ".join(["skyplace"] + list(argv if argv is not None else sys.argv[1:]))
    t0 = time.perf_counter()

    if args.command == "run":
        res = run_episode(cfg, args.seed, backend)
        write_timeseries_csv(res, out / "timeseries.csv")
        summary = res.summary()
        summary.update(seed=args.seed, algorithm=cfg.algorithm)
        write_json(summary, out / "summary.json")
        write_manifest(cfg, [args.seed], out / "manifest.json", cmd, backend.name)
    elif args.command == "replicate":
        agg = run_replications(cfg, jobs=args.jobs, backend=backend.name)
        write_json(agg.to_dict(), out / "summary.json")
        write_manifest(cfg, cfg.seeds, out / "manifest.json", cmd, backend.name)
    else:
        values = parse_seeds(args.values)
        algos = [a for a in args.algos.split(",") if a]
        try:
            rows = sweep(cfg, args.axis, values, algos, jobs=args.jobs, backend=backend.name)
        except ConfigError as exc:
            print(f"skyplace: error: {exc}", file=sys.stderr)
            return 2
        write_table_csv(rows, out / "sweep.csv")
        write_manifest(cfg, cfg.seeds, out / "manifest.json", cmd, backend.name)
    log.info("%s finished in %.1f s -> %s", args.command, time.perf_counter() - t0, out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
