"""Air-to-ground and terrestrial propagation.

Scalar reference implementations live here; the per-timestep matrix versions
are in :mod:`skyplace.kernels`. Internal arithmetic is in linear watts, dB
only at the edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Position3D, distance_3d, horizontal_distance

LN2 = math.log(2.0)


class Condition(Enum):
    LOS = "los"
    NLOS = "nlos"


@dataclass(frozen=True)
class EnvironmentParams:
    """Built-up ratio ``alpha``, buildings per km^2 ``beta``, height scale ``gamma_env`` (m)."""

    alpha: float = 0.3
    beta: float = 500.0
    gamma_env: float = 15.0

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must be in (0, 1]")
        if self.beta <= 0 or self.gamma_env <= 0:
            raise ValueError("beta and gamma_env must be positive")


@dataclass(frozen=True)
class RadioProfile:
    """Reference losses (dB) and path-loss exponents ``a + b * log10(h_b)``."""

    ref_loss_los: float
    ref_loss_nlos: float
    exp_los: tuple[float, float]
    exp_nlos: tuple[float, float]

    def exponent(self, condition: Condition, h_b: float) -> float:
        a, b = self.exp_los if condition is Condition.LOS else self.exp_nlos
        if b == 0.0:
            return a
        if h_b <= 0:
            raise ValueError("altitude-dependent exponent needs h_b > 0")
        return a + b * math.log10(h_b)

    def ref_loss(self, condition: Condition) -> float:
        return self.ref_loss_los if condition is Condition.LOS else self.ref_loss_nlos


def terrestrial_profile(fc_ghz: float) -> RadioProfile:
    f = 20.0 * math.log10(fc_ghz)
    return RadioProfile(28.0 + f, 13.54 + f, (2.2, 0.0), (3.9, 0.0))


def uav_profile(fc_ghz: float) -> RadioProfile:
    f = 20.0 * math.log10(fc_ghz)
    return RadioProfile(30.9 + f, 32.4 + f, (2.225, -0.05), (4.32, -0.76))


@dataclass(frozen=True)
class LinkBudget:
    pr_los: float
    loss_los: float
    loss_nlos: float
    expected_gain: float


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def los_factor_count(env: EnvironmentParams, r: float) -> int:
    """Number of obstruction factors in the LoS product at horizontal range ``r``."""
    return max(0, math.floor(r * math.sqrt(env.alpha * env.beta) / 1000.0 - 1.0) + 1)


def los_probability(env: EnvironmentParams, h_b: float, h_k: float, r: float) -> float:
    """Probability that no building blocks the ray from height ``h_b`` to ``h_k``."""
    if h_b <= h_k:
        raise ValueError(f"transmitter must be above receiver (h_b={h_b}, h_k={h_k})")
    if r < 0:
        raise ValueError("negative horizontal distance")
    two_g2 = 2.0 * env.gamma_env ** 2
    p = 1.0
    for n in range(los_factor_count(env, r)):
        hn = h_b - (n + 0.5) * (h_b - h_k) / (n + 1)
        p *= 1.0 - math.exp(-hn * hn / two_g2)
    return p


def path_loss_db(profile: RadioProfile, condition: Condition, d: float, h_b: float) -> float:
    if d <= 0:
        raise ValueError("path loss needs d > 0")
    return profile.ref_loss(condition) + 10.0 * profile.exponent(condition, h_b) * math.log10(d)


def link_budget(env: EnvironmentParams, profile: RadioProfile, b: Position3D, k: Position3D) -> LinkBudget:
    r = horizontal_distance(b, k)
    d = distance_3d(b, k)
    pr = los_probability(env, b.h, k.h, r)
    l_los = path_loss_db(profile, Condition.LOS, d, b.h)
    l_nlos = path_loss_db(profile, Condition.NLOS, d, b.h)
    gain = pr * 10.0 ** (-l_los / 10.0) + (1.0 - pr) * 10.0 ** (-l_nlos / 10.0)
    return LinkBudget(pr, l_los, l_nlos, gain)


def noise_power(bandwidth: float, psd_dbm_hz: float = -174.0) -> float:
    """Thermal noise power in watts over ``bandwidth`` Hz."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return dbm_to_watt(psd_dbm_hz + 10.0 * math.log10(bandwidth))


def sinr(rx_powers, serving: int, sigma2: float) -> float:
    """Linear SINR of the link from BS ``serving``.

    ``rx_powers[b]`` is ``p_b * g_bk`` in watts for every BS ``b``; all
    non-serving BSs interfere.
    """
    interference = 0.0
    for b, p in enumerate(rx_powers):
        if b != serving:
            interference += p
    return rx_powers[serving] / (interference + sigma2)


def achievable_rate(sinr_linear: float, bandwidth: float) -> float:
    if sinr_linear < 0:
        raise ValueError("negative SINR")
    return bandwidth * math.log1p(sinr_linear) / LN2
