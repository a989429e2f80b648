"""Satisfaction-form placement game played by the UAVs.

Each UAV keeps a probability vector over the seven moves. A UAV that was
satisfied last step holds its position; an unsatisfied one samples a move,
observes its utility and reinforces the sampled move in proportion to how
far the utility sits above or below its threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import N_STRATEGIES, StrategyId


@dataclass(frozen=True)
class GameWeights:
    """Utility weights.

    ``norm`` scales the served rate sum (bps) and is kept separate from the
    policy learning rate. ``f_max`` bounds the utility for the reward factor.
    """

    phi: float = 1.0
    varphi: float = 1.0
    norm: float = 1.0
    f_max: float = 1.0
    d_min: float = 10.0

    def __post_init__(self):
        if not (self.phi > 0 and self.varphi >= 0 and self.norm > 0 and self.f_max > 0):
            raise ValueError(f"invalid game weights {self}")


@dataclass
class UavAgent:
    bs_id: int
    threshold: float
    threshold_floor: float
    learning_rate: float = 0.1
    policy: np.ndarray = field(default_factory=lambda: np.full(N_STRATEGIES, 1.0 / N_STRATEGIES))
    satisfied: bool = False
    last_strategy: StrategyId = StrategyId.NO_CHANGE
    last_utility: float = 0.0
    unsatisfied_streak: int = 0

    def __post_init__(self):
        self.policy = np.asarray(self.policy, dtype=float)
        if self.policy.shape != (N_STRATEGIES,):
            raise ValueError("policy must have one entry per strategy")
        if self.threshold < self.threshold_floor:
            raise ValueError("threshold below its floor")


def activation(position, others, d_min: float) -> int:
    """1 if any other UAV is strictly closer than ``d_min`` (3D), else 0."""
    p = np.asarray(position, dtype=float)
    for q in others:
        if math.dist(p, q) < d_min:
            return 1
    return 0


def activation_all(xyh: np.ndarray, d_min: float) -> np.ndarray:
    """Collision flags for every row of ``xyh`` against all other rows."""
    n = len(xyh)
    if n < 2:
        return np.zeros(n, dtype=np.int64)
    diff = xyh[:, None, :] - xyh[None, :, :]
    dist = np.sqrt((diff * diff).sum(-1))
    np.fill_diagonal(dist, np.inf)
    return (dist < d_min).any(axis=1).astype(np.int64)


def utility(served_rate_sum: float, gamma_act: int, w: GameWeights) -> float:
    return w.phi * served_rate_sum / w.norm - w.varphi * gamma_act


def satisfaction_indicator(f_u: float, threshold: float) -> int:
    return 1 if f_u >= threshold else 0


def select_strategy(u: UavAgent, rng: np.random.Generator) -> StrategyId:
    """Repeat the last move if satisfied, otherwise sample from the policy.

    A satisfied agent does not touch ``rng``.
    """
    if u.satisfied:
        return u.last_strategy
    cdf = np.cumsum(u.policy)
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return StrategyId(min(i, N_STRATEGIES - 1) + 1)


def q_factor(f_u: float, gamma_u: float, f_max: float) -> float:
    if f_max <= 0:
        raise ValueError("f_max must be positive")
    q = (f_max + f_u - gamma_u) / (2.0 * f_max)
    return min(1.0, max(0.0, q))


def update_policy(policy: np.ndarray, chosen: StrategyId, theta: int, q: float, mu: float) -> np.ndarray:
    """Linear reward-inaction step toward ``chosen``; a satisfied agent keeps its policy."""
    if theta == 1:
        return policy
    step = mu * q
    if not 0.0 <= step <= 1.0:
        raise ValueError(f"mu*q={step} outside [0, 1]")
    new = policy * (1.0 - step)
    new[StrategyId(chosen).index] += step
    return new


def adapt_threshold(u: UavAgent, window: int, decay: float, floor: float | None = None) -> float:
    """Lower the threshold of a UAV unsatisfied for ``window`` consecutive steps."""
    if not 0.0 < decay < 1.0:
        raise ValueError("decay must be in (0, 1)")
    floor = u.threshold_floor if floor is None else floor
    if u.unsatisfied_streak >= window:
        # never raises: a negative threshold times decay would move up
        u.threshold = min(u.threshold, max(floor, decay * u.threshold))
        u.unsatisfied_streak = 0
    return u.threshold


def is_satisfaction_equilibrium(agents) -> bool:
    return all(a.satisfied for a in agents)
