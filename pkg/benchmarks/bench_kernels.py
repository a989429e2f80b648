"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--users 210] [--uavs 8] [--steps 2000]

Times ``link_gains`` (full B x K refresh), ``network_step`` and one complete
learning episode on every available backend, then checks that both backends
produce the same trajectory.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from skyplace import kernels
from skyplace.config import SimConfig
from skyplace.engine import Episode, run_episode


def _per_call(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--users", type=int, default=210)
    ap.add_argument("--uavs", type=int, default=8)
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args(argv)

    cfg = SimConfig(n_users=args.users, n_uavs=args.uavs, steps=args.steps)
    backends = [b for b in (kernels.CYTHON, kernels.PYTHON) if b is not None]
    if kernels.CYTHON is None:
        print("compiled kernels not built; timing numpy backend only")

    net = Episode(cfg, 0, kernels.PYTHON).net
    e_los, e_nlos = net._exponents(range(net.n_bs))
    rx = net.tx_power[:, None] * net.expected_gain()
    load_est = np.linspace(0.1, 0.8, net.n_bs)

    print(f"{'kernel':<16}" + "".join(f"{b.name:>14}" for b in backends))
    calls = {
        "link_gains": lambda b: lambda: b.link_gains(net.bs_xyh, net._ref_los, net._ref_nlos, e_los, e_nlos,
                                                     net.ue_xyh, net.env.alpha, net.env.beta,
                                                     net.env.gamma_env),
        "network_step": lambda b: lambda: b.network_step(rx, load_est, net.demand, net.noise, net.bandwidth),
    }
    for name, make in calls.items():
        cells = "".join(f"{_per_call(make(b), 200) * 1e6:>11.1f} us" for b in backends)
        print(f"{name:<16}{cells}")

    results = {}
    cells = ""
    for b in backends:
        t = timeit.default_timer()
        results[b.name] = run_episode(cfg, 0, b)
        cells += f"{timeit.default_timer() - t:>13.2f}s"
    print(f"{'episode':<16}{cells}")

    if len(results) == 2:
        a, c = results["python"], results["cython"]
        same = np.array_equal(a.uav_xyh, c.uav_xyh)
        dev = np.max(np.abs(a.series("throughput_per_bs") - c.series("throughput_per_bs")))
        print(f"identical UAV trajectories: {same}; max throughput deviation {dev:.3g} bps")


if __name__ == "__main__":
    main()
