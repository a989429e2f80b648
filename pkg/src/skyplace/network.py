"""Base stations, users, load-aware association and capacity enforcement.

The per-timestep matrix work is delegated to :mod:`skyplace.kernels`; the
functions here are the readable single-BS / single-user versions and the
state container the engine mutates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .channel import Condition, EnvironmentParams, RadioProfile
from .geometry import Position3D


class BsKind(Enum):
    TERRESTRIAL = "terrestrial"
    UAV = "uav"


@dataclass
class BaseStation:
    id: int
    kind: BsKind
    position: Position3D
    tx_power: float
    profile: RadioProfile
    load: float = 0.0
    load_estimate: float = 0.0

    def __post_init__(self):
        if self.tx_power <= 0:
            raise ValueError("tx_power must be positive")


@dataclass
class UserTerminal:
    id: int
    position: Position3D
    demand: float
    serving_bs: int | None = None
    dropped: bool = False

    def __post_init__(self):
        if self.demand <= 0:
            raise ValueError("demand must be positive")


@dataclass
class MetricsRow:
    timestep: int
    bs_throughput: np.ndarray
    user_rate: np.ndarray
    bs_dropped: np.ndarray
    bs_associated: np.ndarray
    bs_load: np.ndarray
    satisfied_uavs: int = 0
    mean_utility: float = 0.0

    @property
    def mean_throughput_per_bs(self) -> float:
        return float(self.bs_throughput.mean()) if self.bs_throughput.size else 0.0

    @property
    def mean_rate_per_user(self) -> float:
        return float(self.user_rate.mean()) if self.user_rate.size else 0.0

    @property
    def mean_dropped_per_bs(self) -> float:
        return float(self.bs_dropped.mean()) if self.bs_dropped.size else 0.0

    @property
    def total_dropped(self) -> int:
        return int(self.bs_dropped.sum())


def bs_load(demands, rates) -> float:
    """Fraction of time a BS needs to carry ``demands`` at the given link ``rates``."""
    total = 0.0
    for v, r in zip(demands, rates):
        if r <= 0:
            raise ValueError("zero rate for a user with positive demand")
        total += v / r
    return total


def eta_power_law(t: int, exponent: float = 0.9) -> float:
    """Decaying load-estimation learning rate ``t ** -exponent``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return float(t) ** -exponent


def update_load_estimate(b: BaseStation, t: int, eta_rule=eta_power_law) -> float:
    """Blend last step's load into the broadcast estimate; stores and returns it."""
    eta = eta_rule(t)
    b.load_estimate = eta * b.load + (1.0 - eta) * b.load_estimate
    return b.load_estimate


def associate_users(rx: np.ndarray, load_estimate: np.ndarray) -> np.ndarray:
    """Serving BS index per user: argmax of ``rx[b, k] * (1 - load_estimate[b])``.

    ``np.argmax`` returns the first maximum, so ties go to the lowest BS id.
    """
    rx = np.asarray(rx, dtype=float)
    if rx.shape[0] == 0:
        raise ValueError("need at least one base station")
    return np.argmax(rx * (1.0 - np.asarray(load_estimate))[:, None], axis=0)


def enforce_capacity(fractions: dict[int, float]) -> tuple[list[int], float]:
    """Greedy drop of the largest time fractions until the load fits in [0, 1].

    ``fractions`` maps user id to ``demand / rate``. Returns the dropped ids in
    drop order and the residual load.
    """
    ranked = sorted(fractions.items(), key=lambda kv: (-kv[1], kv[0]))
    # residual sums accumulated from the smallest fraction upwards
    tails = [0.0] * (len(ranked) + 1)
    acc = 0.0
    for j in range(len(ranked) - 1, -1, -1):
        acc += ranked[j][1]
        tails[j] = acc
    n_drop = 0
    while n_drop < len(ranked) and not tails[n_drop] <= 1.0:
        n_drop += 1
    return [uid for uid, _ in ranked[:n_drop]], tails[n_drop]


@dataclass
class StepOutcome:
    serving: np.ndarray
    rate: np.ndarray
    dropped: np.ndarray
    load: np.ndarray
    offered_load: np.ndarray
    served_demand: np.ndarray
    served_rate: np.ndarray
    n_assoc: np.ndarray
    n_dropped: np.ndarray


@dataclass
class NetworkState:
    """Array view of all BSs and users; index 0.. of BS arrays is the BS id.

    Gains are kept per condition so a moved UAV only needs its own row
    recomputed.
    """

    env: EnvironmentParams
    bs_kind: list[BsKind]
    bs_xyh: np.ndarray
    tx_power: np.ndarray
    profiles: list[RadioProfile]
    ue_xyh: np.ndarray
    demand: np.ndarray
    noise: float
    bandwidth: float
    backend: object = None
    load: np.ndarray = field(default=None)
    load_estimate: np.ndarray = field(default=None)
    pr_los: np.ndarray = field(default=None, repr=False)
    g_los: np.ndarray = field(default=None, repr=False)
    g_nlos: np.ndarray = field(default=None, repr=False)
    last: StepOutcome | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.backend is None:
            self.backend = kernels.DEFAULT
        n_bs = len(self.bs_kind)
        self.bs_xyh = np.array(self.bs_xyh, dtype=float).reshape(n_bs, 3)
        self.ue_xyh = np.array(self.ue_xyh, dtype=float).reshape(-1, 3)
        self.tx_power = np.asarray(self.tx_power, dtype=float)
        self.demand = np.asarray(self.demand, dtype=float)
        if self.load is None:
            self.load = np.zeros(n_bs)
        if self.load_estimate is None:
            self.load_estimate = np.zeros(n_bs)
        self._ref_los = np.array([p.ref_loss_los for p in self.profiles])
        self._ref_nlos = np.array([p.ref_loss_nlos for p in self.profiles])
        self.refresh_links()

    @property
    def n_bs(self) -> int:
        return len(self.bs_kind)

    @property
    def n_users(self) -> int:
        return self.ue_xyh.shape[0]

    def _exponents(self, rows):
        e_los = np.array([self.profiles[b].exponent(Condition.LOS, self.bs_xyh[b, 2]) for b in rows])
        e_nlos = np.array([self.profiles[b].exponent(Condition.NLOS, self.bs_xyh[b, 2]) for b in rows])
        return e_los, e_nlos

    def refresh_links(self, rows=None):
        """Recompute LoS probability and gains for BS ``rows`` (all when None)."""
        if rows is None:
            rows = list(range(self.n_bs))
            e_los, e_nlos = self._exponents(rows)
            self.pr_los, self.g_los, self.g_nlos = self.backend.link_gains(
                self.bs_xyh, self._ref_los, self._ref_nlos, e_los, e_nlos, self.ue_xyh,
                self.env.alpha, self.env.beta, self.env.gamma_env)
            return
        rows = list(rows)
        if not rows:
            return
        e_los, e_nlos = self._exponents(rows)
        pr, gl, gn = self.backend.link_gains(
            self.bs_xyh[rows], self._ref_los[rows], self._ref_nlos[rows], e_los, e_nlos,
            self.ue_xyh, self.env.alpha, self.env.beta, self.env.gamma_env)
        self.pr_los[rows] = pr
        self.g_los[rows] = gl
        self.g_nlos[rows] = gn

    def move_bs(self, b: int, xyh) -> None:
        self.bs_xyh[b] = xyh

    def expected_gain(self) -> np.ndarray:
        return self.pr_los * self.g_los + (1.0 - self.pr_los) * self.g_nlos

    def sampled_gain(self, rng: np.random.Generator) -> np.ndarray:
        """One Bernoulli LoS/NLoS realisation per link."""
        los = rng.random(self.pr_los.shape) < self.pr_los
        return np.where(los, self.g_los, self.g_nlos)

    def update_load_estimates(self, t: int, eta_rule=eta_power_law) -> np.ndarray:
        eta = eta_rule(t)
        self.load_estimate = eta * self.load + (1.0 - eta) * self.load_estimate
        return self.load_estimate

    def step(self, gain: np.ndarray) -> StepOutcome:
        """Associate, compute rates, enforce capacity; stores the new loads."""
        rx = self.tx_power[:, None] * gain
        out = StepOutcome(*self.backend.network_step(
            rx, self.load_estimate, self.demand, self.noise, self.bandwidth))
        self.load = out.load
        self.last = out
        return out

    def base_stations(self) -> list[BaseStation]:
        return [BaseStation(b, self.bs_kind[b], Position3D(*self.bs_xyh[b]), float(self.tx_power[b]),
                            self.profiles[b], float(self.load[b]), float(self.load_estimate[b]))
                for b in range(self.n_bs)]

    def user_terminals(self) -> list[UserTerminal]:
        users = []
        for k in range(self.n_users):
            u = UserTerminal(k, Position3D(*self.ue_xyh[k]), float(self.demand[k]))
            if self.last is not None:
                u.serving_bs = int(self.last.serving[k])
                u.dropped = bool(self.last.dropped[k])
            users.append(u)
        return users


def collect_metrics(out: StepOutcome, t: int, satisfied_uavs: int = 0,
                    mean_utility: float = 0.0) -> MetricsRow:
    """KPIs for timestep ``t``: carried demand per BS and the link rate per user.

    Dropped users contribute neither throughput nor rate.
    """
    user_rate = np.where(out.dropped, 0.0, out.rate)
    return MetricsRow(
        timestep=t,
        bs_throughput=out.served_demand.copy(),
        user_rate=user_rate,
        bs_dropped=out.n_dropped.copy(),
        bs_associated=out.n_assoc.copy(),
        bs_load=out.load.copy(),
        satisfied_uavs=satisfied_uavs,
        mean_utility=mean_utility,
    )

