"""Time-stepped episodes, seed replications and parameter sweeps.

Order of work inside one timestep:

1. UAV move selection and execution (learning only)
2. load-estimate update
3. association, rates, loads
4. capacity enforcement (inside the kernel with 3)
5-8. utility, satisfaction, policy update, threshold adaptation (learning only)
9. metrics
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import game, kernels
from .baselines import (CandidateSet, altitude_levels, place_random, place_random_fixed,
                        place_strategic_all)
from .channel import EnvironmentParams, dbm_to_watt, noise_power, terrestrial_profile, uav_profile
from .config import ALGORITHMS, ConfigError, SimConfig
from .geometry import (AltitudeBounds, HexRegion, Position3D, apply_strategy, hex_candidate_grid,
                       sample_uniform_xy)
from .network import BsKind, MetricsRow, NetworkState, collect_metrics

SUMMARY_METRICS = ("throughput_per_bs", "rate_per_user", "dropped_per_bs", "dropped_total",
                   "satisfied_uavs", "mean_utility")

# fixed sub-stream ids so each random consumer is independent of the others
STREAM_USERS = 1
STREAM_UAV_INIT = 2
STREAM_BASELINE = 3
STREAM_CHANNEL = 4
STREAM_AGENT = 1000


def stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream_id]))


@dataclass
class RunResult:
    config: SimConfig
    seed: int
    rows: list[MetricsRow]
    uav_xyh: np.ndarray
    uav_activation: np.ndarray
    user_xyh: np.ndarray
    equilibrium_step: int | None = None
    backend: str = ""
    thresholds: np.ndarray = field(default=None, repr=False)

    @property
    def final_positions(self) -> np.ndarray:
        return self.uav_xyh[-1] if len(self.uav_xyh) else np.zeros((0, 3))

    def series(self, metric: str) -> np.ndarray:
        getters = {
            "throughput_per_bs": lambda r: r.mean_throughput_per_bs,
            "rate_per_user": lambda r: r.mean_rate_per_user,
            "dropped_per_bs": lambda r: r.mean_dropped_per_bs,
            "dropped_total": lambda r: r.total_dropped,
            "satisfied_uavs": lambda r: r.satisfied_uavs,
            "mean_utility": lambda r: r.mean_utility,
        }
        return np.array([getters[metric](r) for r in self.rows], dtype=float)

    def summary(self) -> dict:
        """Means of each KPI over the last ``summary_tail`` fraction of the horizon."""
        n = len(self.rows)
        tail = max(1, math.ceil(self.config.summary_tail * n))
        out = {m: float(self.series(m)[n - tail:].mean()) for m in SUMMARY_METRICS}
        out["equilibrium_step"] = self.equilibrium_step
        return out


def _candidates(cfg: SimConfig, region: HexRegion, bounds: AltitudeBounds) -> CandidateSet:
    return CandidateSet(tuple(hex_candidate_grid(region, cfg.n_candidates)),
                        altitude_levels(bounds, cfg.altitude_levels), cfg.fixed_altitude)


def initial_uav_positions(cfg: SimConfig, seed: int, region: HexRegion,
                          bounds: AltitudeBounds) -> list[Position3D]:
    n = cfg.n_uavs
    if cfg.initial_positions is not None:
        return [Position3D(*p) for p in cfg.initial_positions]
    if n == 0:
        return []
    if cfg.algorithm == "learning":
        rng = stream(seed, STREAM_UAV_INIT)
        xy = sample_uniform_xy(region, n, rng)
        h = rng.uniform(bounds.h_min, bounds.h_max, n)
        return [Position3D(float(x), float(y), float(z)) for (x, y), z in zip(xy, h)]
    rng = stream(seed, STREAM_BASELINE)
    if cfg.algorithm == "random_fixed":
        return [place_random_fixed(region, cfg.fixed_altitude, rng) for _ in range(n)]
    cands = _candidates(cfg, region, bounds)
    if cfg.algorithm == "strategic":
        return place_strategic_all(cands, [region.center], n)
    return [place_random(cands, rng) for _ in range(n)]


def build_network(cfg: SimConfig, seed: int, uavs: list[Position3D], backend=None) -> NetworkState:
    region = HexRegion(cfg.radius)
    users = sample_uniform_xy(region, cfg.n_users, stream(seed, STREAM_USERS))
    ue_xyh = np.column_stack([users, np.full(cfg.n_users, cfg.user_altitude)])
    bs_xyh = [(region.center[0], region.center[1], cfg.bs_altitude)] + [p.as_tuple() for p in uavs]
    kinds = [BsKind.TERRESTRIAL] + [BsKind.UAV] * len(uavs)
    profiles = [terrestrial_profile(cfg.carrier_ghz)] + [uav_profile(cfg.carrier_ghz)] * len(uavs)
    tx = [dbm_to_watt(cfg.bs_power_dbm)] + [dbm_to_watt(cfg.uav_power_dbm)] * len(uavs)
    return NetworkState(
        env=EnvironmentParams(cfg.alpha, cfg.beta, cfg.gamma_env),
        bs_kind=kinds, bs_xyh=bs_xyh, tx_power=tx, profiles=profiles,
        ue_xyh=ue_xyh, demand=np.full(cfg.n_users, cfg.demand_bps),
        noise=noise_power(cfg.bandwidth_hz, cfg.noise_psd_dbm_hz),
        bandwidth=cfg.bandwidth_hz, backend=backend,
    )


class Episode:
    """One run of the network; ``step()`` advances a single timestep."""

    def __init__(self, cfg: SimConfig, seed: int, backend=None):
        self.cfg = cfg = cfg.resolved()
        self.seed = seed
        self.backend = backend if backend is not None else kernels.DEFAULT
        self.region = HexRegion(cfg.radius)
        self.bounds = AltitudeBounds(cfg.h_min, cfg.h_max)
        self.positions = initial_uav_positions(cfg, seed, self.region, self.bounds)
        self.net = build_network(cfg, seed, self.positions, self.backend)
        self.learning = cfg.algorithm == "learning"
        self.weights = game.GameWeights(cfg.phi, cfg.varphi, cfg.norm, cfg.f_max, cfg.d_min)
        self.agents = [game.UavAgent(bs_id=u + 1, threshold=cfg.threshold,
                                     threshold_floor=cfg.threshold_floor,
                                     learning_rate=cfg.learning_rate)
                       for u in range(cfg.n_uavs)]
        self.agent_rngs = [stream(seed, STREAM_AGENT + u) for u in range(cfg.n_uavs)]
        self.channel_rng = stream(seed, STREAM_CHANNEL)
        self.eta_exponent = cfg.eta_exponent
        self.t = 0
        self.gamma_act = np.zeros(cfg.n_uavs, dtype=np.int64)
        self._sampled = np.ones(cfg.n_uavs, dtype=bool)
        self._gain = self.net.expected_gain()

    def _move_uavs(self) -> None:
        cfg = self.cfg
        moved = []
        for u, agent in enumerate(self.agents):
            s = game.select_strategy(agent, self.agent_rngs[u])
            agent.last_strategy = s
            self._sampled[u] = not agent.satisfied
            if agent.satisfied:
                continue  # holds the location its last move produced
            old = self.positions[u]
            new = apply_strategy(old, s, cfg.step_xy, cfg.step_h, self.region, self.bounds)
            if new is not old:
                self.positions[u] = new
                self.net.move_bs(agent.bs_id, new.as_tuple())
                moved.append(agent.bs_id)
        if moved:
            self.net.refresh_links(moved)
            if cfg.channel_mode == "expected":
                net = self.net
                pr = net.pr_los[moved]
                self._gain[moved] = pr * net.g_los[moved] + (1.0 - pr) * net.g_nlos[moved]

    def _learn(self, served_rate: np.ndarray) -> float:
        cfg, w = self.cfg, self.weights
        xyh = self.net.bs_xyh[1:]
        self.gamma_act = game.activation_all(xyh, w.d_min)
        total = 0.0
        for u, agent in enumerate(self.agents):
            f = game.utility(served_rate[agent.bs_id], int(self.gamma_act[u]), w)
            agent.last_utility = f
            theta = game.satisfaction_indicator(f, agent.threshold)
            agent.satisfied = theta == 1
            if theta == 0:
                # only a move sampled this step is reinforced; a UAV satisfied last
                # step held still and keeps its policy
                if self._sampled[u]:
                    q = game.q_factor(f, agent.threshold, w.f_max)
                    agent.policy = game.update_policy(agent.policy, agent.last_strategy, theta, q,
                                                      agent.learning_rate)
                agent.unsatisfied_streak += 1
                game.adapt_threshold(agent, cfg.threshold_window, cfg.threshold_decay)
            else:
                agent.unsatisfied_streak = 0
            total += f
        return total / len(self.agents) if self.agents else 0.0

    def step(self) -> MetricsRow:
        self.t += 1
        t = self.t
        if self.learning and self.agents:
            self._move_uavs()
        self.net.update_load_estimates(t, lambda s: s ** -self.eta_exponent)
        if self.cfg.channel_mode == "bernoulli":
            gain = self.net.sampled_gain(self.channel_rng)
        else:
            gain = self._gain
        out = self.net.step(gain)
        mean_u = 0.0
        if self.learning and self.agents:
            mean_u = self._learn(out.served_rate)
        else:
            self.gamma_act = game.activation_all(self.net.bs_xyh[1:], self.cfg.d_min)
        n_sat = sum(a.satisfied for a in self.agents) if self.learning else 0
        return collect_metrics(out, t, n_sat, mean_u)


def run_episode(cfg: SimConfig, seed: int, backend=None) -> RunResult:
    ep = Episode(cfg, seed, backend)
    n_u = ep.cfg.n_uavs
    steps = ep.cfg.steps
    rows = []
    uav_xyh = np.empty((steps, n_u, 3))
    act = np.empty((steps, n_u), dtype=np.int64)
    thresholds = np.empty((steps, n_u))
    eq_step = None
    for i in range(steps):
        rows.append(ep.step())
        uav_xyh[i] = ep.net.bs_xyh[1:]
        act[i] = ep.gamma_act
        thresholds[i] = [a.threshold for a in ep.agents]
        if eq_step is None and ep.learning and game.is_satisfaction_equilibrium(ep.agents):
            eq_step = ep.t
    return RunResult(ep.cfg, seed, rows, uav_xyh, act, ep.net.ue_xyh.copy(), eq_step,
                     ep.backend.name, thresholds)


def _summary_of(cfg: SimConfig, seed: int, backend_name: str | None) -> dict:
    res = run_episode(cfg, seed, kernels.get_backend(backend_name))
    return res.summary()


@dataclass
class Aggregate:
    config: SimConfig
    per_seed: dict[int, dict]
    mean: dict[str, float]
    std: dict[str, float]

    @property
    def n(self) -> int:
        return len(self.per_seed)

    def sem(self, metric: str) -> float:
        return self.std[metric] / math.sqrt(self.n) if self.n > 1 else 0.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.config.algorithm,
            "n_users": self.config.n_users,
            "n_uavs": self.config.n_uavs,
            "seeds": sorted(self.per_seed),
            "mean": self.mean,
            "std": self.std,
            "per_seed": {str(s): self.per_seed[s] for s in sorted(self.per_seed)},
        }


def aggregate(cfg: SimConfig, per_seed: dict[int, dict]) -> Aggregate:
    # fixed seed order keeps the float sums independent of execution order
    seeds = sorted(per_seed)
    mean, std = {}, {}
    for m in SUMMARY_METRICS:
        vals = np.array([per_seed[s][m] for s in seeds], dtype=float)
        mean[m] = float(vals.mean())
        std[m] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return Aggregate(cfg, per_seed, mean, std)


def run_replications(cfg: SimConfig, seeds=None, jobs: int = 1, backend: str | None = None) -> Aggregate:
    seeds = tuple(cfg.seeds if seeds is None else seeds)
    if not seeds:
        raise ConfigError("need at least one seed")
    cfg = cfg.replace(seeds=seeds)
    cfg.resolved()
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(partial(_summary_of, cfg, backend_name=backend), seeds))
    else:
        results = [_summary_of(cfg, s, backend) for s in seeds]
    return aggregate(cfg, dict(zip(seeds, results)))


SWEEP_AXES = {"users": "n_users", "uavs": "n_uavs"}


def sweep(cfg: SimConfig, axis: str, values, algorithms=ALGORITHMS, seeds=None,
          jobs: int = 1, backend: str | None = None) -> list[dict]:
    """Long-format table: one row per (algorithm, axis value, metric)."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {sorted(SWEEP_AXES)}")
    values = list(values)
    algorithms = list(algorithms)
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    if not algorithms:
        raise ConfigError("sweep needs at least one algorithm")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}")
    rows = []
    for algo in algorithms:
        for v in values:
            c = cfg.replace(algorithm=algo, **{SWEEP_AXES[axis]: int(v)})
            agg = run_replications(c, seeds, jobs=jobs, backend=backend)
            for m in SUMMARY_METRICS:
                rows.append({
                    "algorithm": algo, "axis": axis, "value": int(v), "metric": m,
                    "mean": agg.mean[m], "std": agg.std[m], "sem": agg.sem(m), "n_seeds": agg.n,
                })
    return rows
