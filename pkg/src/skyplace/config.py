"""Simulation configuration and its INI-file form.

Every field has a default; the radio and scenario defaults are the 2 GHz /
10 MHz hexagonal-cell setup (one 46 dBm terrestrial BS at 25 m, 24 dBm UAVs
between 22.5 m and 300 m, 1.8 Mbps per user). Fields left ``None`` are derived
in :meth:`SimConfig.resolved`.
"""
from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field, fields

ALGORITHMS = ("learning", "strategic", "random_fixed", "random")
CHANNEL_MODES = ("expected", "bernoulli")

# INI section of every field
SECTIONS = {
    "scenario": ("radius", "n_users", "n_uavs", "user_altitude", "bs_altitude", "h_min", "h_max",
                 "algorithm", "steps", "initial_positions"),
    "radio": ("carrier_ghz", "bandwidth_hz", "noise_psd_dbm_hz", "demand_bps", "bs_power_dbm",
              "uav_power_dbm", "alpha", "beta", "gamma_env", "channel_mode", "eta_exponent"),
    "game": ("phi", "varphi", "norm", "f_max", "d_min", "learning_rate", "threshold",
             "threshold_window", "threshold_decay", "threshold_floor", "step_xy", "step_h"),
    "baselines": ("n_candidates", "altitude_levels", "fixed_altitude"),
    "run": ("seeds", "summary_tail"),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    radius: float = 250.0
    n_users: int = 210
    n_uavs: int = 8
    user_altitude: float = 1.5
    bs_altitude: float = 25.0
    h_min: float = 22.5
    h_max: float = 300.0
    algorithm: str = "learning"
    steps: int = 2000
    initial_positions: tuple[tuple[float, float, float], ...] | None = None

    carrier_ghz: float = 2.0
    bandwidth_hz: float = 10e6
    noise_psd_dbm_hz: float = -174.0
    demand_bps: float = 1.8e6
    bs_power_dbm: float = 46.0
    uav_power_dbm: float = 24.0
    alpha: float = 0.3
    beta: float = 500.0
    gamma_env: float = 15.0
    channel_mode: str = "expected"
    eta_exponent: float = 0.9

    phi: float = 1.0
    varphi: float = 1.0
    norm: float | None = None
    f_max: float | None = None
    d_min: float = 10.0
    learning_rate: float = 0.1
    threshold: float | None = None
    threshold_window: int = 100
    threshold_decay: float = 0.9
    threshold_floor: float | None = None
    step_xy: float = 10.0
    step_h: float | None = None

    n_candidates: int = 79
    altitude_levels: int = 28
    fixed_altitude: float = 100.0

    seeds: tuple[int, ...] = field(default_factory=lambda: tuple(range(20)))
    summary_tail: float = 0.1

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def resolved(self) -> "SimConfig":
        """Fill derived defaults and validate."""
        norm = self.norm if self.norm is not None else max(self.n_users, 1) * self.demand_bps
        f_max = self.f_max if self.f_max is not None else self.phi
        threshold = self.threshold if self.threshold is not None else 0.5 * f_max
        floor = self.threshold_floor if self.threshold_floor is not None else 0.05 * f_max
        floor = min(floor, threshold)
        step_h = self.step_h
        if step_h is None:
            step_h = (self.h_max - self.h_min) / max(self.altitude_levels - 1, 1)
        cfg = dataclasses.replace(self, norm=norm, f_max=f_max, threshold=threshold,
                                  threshold_floor=floor, step_h=step_h)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        errs = []
        if self.algorithm not in ALGORITHMS:
            errs.append(f"algorithm must be one of {ALGORITHMS}")
        if self.channel_mode not in CHANNEL_MODES:
            errs.append(f"channel_mode must be one of {CHANNEL_MODES}")
        if self.n_users < 0 or self.n_uavs < 0:
            errs.append("counts must be >= 0")
        if self.steps < 1:
            errs.append("steps must be >= 1")
        if self.radius <= 0:
            errs.append("radius must be positive")
        if not 0 < self.h_min <= self.h_max:
            errs.append("need 0 < h_min <= h_max")
        if not self.user_altitude < self.h_min:
            errs.append("UAVs must fly above the users")
        if not self.user_altitude < self.bs_altitude:
            errs.append("terrestrial BS must be above the users")
        if self.bandwidth_hz <= 0 or self.demand_bps <= 0 or self.carrier_ghz <= 0:
            errs.append("bandwidth, demand and carrier must be positive")
        if not 0 < self.alpha <= 1 or self.beta <= 0 or self.gamma_env <= 0:
            errs.append("invalid environment parameters")
        if not 0 < self.threshold_decay < 1:
            errs.append("threshold_decay must be in (0, 1)")
        if self.threshold_window < 1:
            errs.append("threshold_window must be >= 1")
        if not 0 <= self.learning_rate <= 1:
            errs.append("learning_rate must be in [0, 1]")
        if self.step_xy <= 0 or (self.step_h is not None and self.step_h <= 0):
            errs.append("step sizes must be positive")
        if not 0 < self.summary_tail <= 1:
            errs.append("summary_tail must be in (0, 1]")
        if not self.seeds:
            errs.append("need at least one seed")
        if self.initial_positions is not None and len(self.initial_positions) != self.n_uavs:
            errs.append("initial_positions must list one position per UAV")
        if not self.h_min <= self.fixed_altitude <= self.h_max:
            errs.append("fixed_altitude outside altitude bounds")
        if errs:
            raise ConfigError("; ".join(errs))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["seeds"] = list(self.seeds)
        if self.initial_positions is not None:
            d["initial_positions"] = [list(p) for p in self.initial_positions]
        return d


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    typ = str(_FIELD_TYPES[name])
    if raw.lower() in ("", "none", "auto") and "None" in typ:
        return None
    if name == "seeds":
        return parse_seeds(raw)
    if name == "initial_positions":
        pts = []
        for chunk in raw.split(";"):
            if chunk.strip():
                x, y, h = (float(v) for v in chunk.split(","))
                pts.append((x, y, h))
        return tuple(pts)
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("float"):
        return float(raw)
    return raw


def parse_seeds(raw: str) -> tuple[int, ...]:
    """Parse ``"0,1,5"`` or ranges like ``"0-19"``."""
    seeds = []
    for part in raw.replace(" ", "").split(","):
        if not part:
            continue
        m = re.fullmatch(r"(\d+)-(\d+)", part)
        if m:
            seeds.extend(range(int(m.group(1)), int(m.group(2)) + 1))
        else:
            seeds.append(int(part))
    return tuple(seeds)


def load_config(path, base: SimConfig | None = None) -> SimConfig:
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    changes = {}
    for section in parser.sections():
        allowed = SECTIONS.get(section)
        if allowed is None:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            try:
                changes[key] = _parse_value(key, raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return (base or SimConfig()).replace(**changes)


def dump_config(cfg: SimConfig) -> str:
    """INI text that :func:`load_config` reads back to ``cfg``."""
    lines = []
    d = dataclasses.asdict(cfg)
    for section, names in SECTIONS.items():
        lines.append(f"[{section}]")
        for name in names:
            v = d[name]
            if v is None:
                text = "none"
            elif name == "seeds":
                text = ",".join(str(s) for s in v)
            elif name == "initial_positions":
                text = ";".join(",".join(repr(float(c)) for c in p) for p in v)
            else:
                text = repr(v) if isinstance(v, float) else str(v)
            lines.append(f"{name} = {text}")
        lines.append("")
    return "\n".join(lines)
