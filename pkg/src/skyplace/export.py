"""Result files: per-step CSV, JSON summaries and the run manifest.

Time-series CSV column order (one row per timestep):

    t, throughput_per_bs, rate_per_user, dropped_per_bs, dropped_total,
    served_users, satisfied_uavs, mean_utility,
    tp_<b>, drop_<b>, load_<b>        for every BS b (0 = terrestrial),
    x_<u>, y_<u>, h_<u>, act_<u>      for every UAV u (1-based BS id)

Throughputs and rates are in bit/s, positions in metres. Floats are written
with ``repr`` so identical runs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .config import SimConfig, dump_config
from .engine import RunResult

HEADER = ("t", "throughput_per_bs", "rate_per_user", "dropped_per_bs", "dropped_total",
          "served_users", "satisfied_uavs", "mean_utility")


def timeseries_header(n_bs: int, n_uavs: int) -> list[str]:
    cols = list(HEADER)
    for b in range(n_bs):
        cols += [f"tp_{b}", f"drop_{b}", f"load_{b}"]
    for u in range(1, n_uavs + 1):
        cols += [f"x_{u}", f"y_{u}", f"h_{u}", f"act_{u}"]
    return cols


def _f(x) -> str:
    return repr(float(x))


def write_timeseries_csv(result: RunResult, path) -> Path:
    path = Path(path)
    n_uavs = result.uav_xyh.shape[1]
    n_bs = n_uavs + 1
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(timeseries_header(n_bs, n_uavs))
        for i, row in enumerate(result.rows):
            served = int(row.bs_associated.sum() - row.bs_dropped.sum())
            line = [row.timestep, _f(row.mean_throughput_per_bs), _f(row.mean_rate_per_user),
                    _f(row.mean_dropped_per_bs), row.total_dropped, served, row.satisfied_uavs,
                    _f(row.mean_utility)]
            for b in range(n_bs):
                line += [_f(row.bs_throughput[b]), int(row.bs_dropped[b]), _f(row.bs_load[b])]
            for u in range(n_uavs):
                x, y, h = result.uav_xyh[i, u]
                line += [_f(x), _f(y), _f(h), int(result.uav_activation[i, u])]
            w.writerow(line)
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(data, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    return path


def write_manifest(cfg: SimConfig, seeds, path, command: str, backend: str) -> Path:
    from . import __version__

    resolved = cfg.resolved()
    manifest = {
        "command": command,
        "seeds": list(seeds),
        "config": resolved.to_dict(),
        "config_ini": dump_config(resolved),
        "package_version": __version__,
        "kernel_backend": backend,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
    }
    return write_json(manifest, path)


def write_table_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    if not rows:
        path.write_text("")
        return path
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (_f(v) if isinstance(v, float) else v) for k, v in r.items()})
    return path
