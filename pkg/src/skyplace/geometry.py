"""Region, positions and discrete UAV moves.

The service area is a flat-top hexagon centred at ``center``; the first
vertex sits on the positive x axis at distance ``radius``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

SQRT3 = math.sqrt(3.0)
_EPS = 1e-9


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.h)):
            raise ValueError(f"non-finite position {self!r}")
        if self.h < 0:
            raise ValueError(f"negative altitude {self.h}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.h)


@dataclass(frozen=True)
class HexRegion:
    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("hexagon radius must be positive")

    @property
    def apothem(self) -> float:
        return self.radius * SQRT3 / 2.0


@dataclass(frozen=True)
class AltitudeBounds:
    h_min: float
    h_max: float

    def __post_init__(self):
        if not (0 < self.h_min <= self.h_max):
            raise ValueError("need 0 < h_min <= h_max")

    def contains(self, h: float) -> bool:
        return self.h_min - _EPS <= h <= self.h_max + _EPS


class StrategyId(IntEnum):
    """The seven moves; ``value - 1`` indexes the policy vector."""

    UP = 1
    DOWN = 2
    LEFT = 3
    RIGHT = 4
    FORWARD = 5
    BACKWARD = 6
    NO_CHANGE = 7

    @property
    def index(self) -> int:
        return self.value - 1


N_STRATEGIES = len(StrategyId)


def _contains_xy(region: HexRegion, x: float, y: float) -> bool:
    dx = abs(x - region.center[0])
    dy = abs(y - region.center[1])
    return dy <= region.apothem + _EPS and SQRT3 * dx + dy <= SQRT3 * region.radius + _EPS


def contains(region: HexRegion, p) -> bool:
    """True if the horizontal part of ``p`` is inside or on the hexagon."""
    if isinstance(p, Position3D):
        return _contains_xy(region, p.x, p.y)
    return _contains_xy(region, float(p[0]), float(p[1]))


def contains_xy_array(region: HexRegion, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    dx = np.abs(np.asarray(x) - region.center[0])
    dy = np.abs(np.asarray(y) - region.center[1])
    return (dy <= region.apothem + _EPS) & (SQRT3 * dx + dy <= SQRT3 * region.radius + _EPS)


def sample_uniform_xy(region: HexRegion, n: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample ``n`` horizontal points uniformly from the hexagon.

    Returns an ``(n, 2)`` array. Draws come in batches from the bounding box,
    so the result depends only on the generator state and ``n``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    out = np.empty((n, 2))
    filled = 0
    cx, cy = region.center
    a = region.apothem
    while filled < n:
        batch = max(16, int((n - filled) * 1.4))
        x = rng.uniform(cx - region.radius, cx + region.radius, batch)
        y = rng.uniform(cy - a, cy + a, batch)
        keep = contains_xy_array(region, x, y)
        take = min(int(keep.sum()), n - filled)
        out[filled:filled + take, 0] = x[keep][:take]
        out[filled:filled + take, 1] = y[keep][:take]
        filled += take
    return out


def sample_uniform_users(region: HexRegion, n: int, user_altitude: float,
                         rng: np.random.Generator) -> list[Position3D]:
    xy = sample_uniform_xy(region, n, rng)
    return [Position3D(float(x), float(y), float(user_altitude)) for x, y in xy]


def horizontal_distance(a: Position3D, b: Position3D) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def distance_3d(a: Position3D, b: Position3D) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.h - b.h) ** 2)


def apply_strategy(p: Position3D, s: StrategyId, step_xy: float, step_h: float,
                   region: HexRegion, bounds: AltitudeBounds) -> Position3D:
    """Move ``p`` by one step of ``s``; an infeasible result leaves ``p`` unchanged."""
    s = StrategyId(s)
    x, y, h = p.x, p.y, p.h
    if s is StrategyId.NO_CHANGE:
        return p
    if s is StrategyId.UP:
        h += step_h
    elif s is StrategyId.DOWN:
        h -= step_h
    elif s is StrategyId.LEFT:
        x -= step_xy
    elif s is StrategyId.RIGHT:
        x += step_xy
    elif s is StrategyId.FORWARD:
        y += step_xy
    elif s is StrategyId.BACKWARD:
        y -= step_xy
    if not bounds.contains(h) or not _contains_xy(region, x, y):
        return p
    return Position3D(x, y, h)


def _lattice_points(region: HexRegion, pitch: float, rotation: float = 0.0) -> np.ndarray:
    # triangular lattice through the centre, rows rotated by `rotation` radians
    n = int(math.ceil(region.radius / pitch)) + 2
    i, j = np.meshgrid(np.arange(-2 * n, 2 * n + 1), np.arange(-2 * n, 2 * n + 1), indexing="xy")
    u = pitch * (i + 0.5 * j)
    v = pitch * (SQRT3 / 2.0) * j
    c, s = math.cos(rotation), math.sin(rotation)
    x = (c * u - s * v).ravel() + region.center[0]
    y = (s * u + c * v).ravel() + region.center[1]
    keep = contains_xy_array(region, x, y)
    pts = np.column_stack([x[keep], y[keep]])
    order = np.lexsort((pts[:, 0], pts[:, 1]))
    return pts[order]


def hex_candidate_grid(region: HexRegion, target_count: int,
                       n_pitches: int = 4000) -> list[tuple[float, float]]:
    """Triangular-lattice points clipped to ``region`` with exactly ``target_count`` points.

    The lattice always has a point on the centre. Rotations of 0, 1, ..., 29
    degrees are tried in turn; for each, pitches are scanned from ``2 * radius``
    down to ``radius / 100`` and the first pitch giving the count wins. An
    unrotated lattice only produces centred hexagonal numbers (1, 7, 19, 37,
    61, 91, ...), which is why rotation is part of the search. Points are
    ordered by (y, x).
    """
    return list(_hex_candidate_grid(region, target_count, n_pitches))


@lru_cache(maxsize=64)
def _hex_candidate_grid(region: HexRegion, target_count: int,
                        n_pitches: int) -> tuple[tuple[float, float], ...]:
    if target_count < 1:
        raise ValueError("target_count must be >= 1")
    pitches = np.geomspace(2.0 * region.radius, region.radius / 100.0, n_pitches)
    for deg in range(30):
        rot = math.radians(deg)
        for pitch in pitches:
            pts = _lattice_points(region, float(pitch), rot)
            if len(pts) == target_count:
                return tuple((float(x), float(y)) for x, y in pts)
            if len(pts) > target_count:
                break
    raise ValueError(f"no lattice pitch yields exactly {target_count} points in {region}")
