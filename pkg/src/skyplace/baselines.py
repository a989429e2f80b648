"""Static benchmark placements: strategic, random at fixed altitude, random grid."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AltitudeBounds, HexRegion, Position3D, contains, sample_uniform_xy


@dataclass(frozen=True)
class CandidateSet:
    horizontal: tuple[tuple[float, float], ...]
    altitudes: tuple[float, ...]
    fixed_altitude: float = 100.0

    def __post_init__(self):
        if not self.horizontal:
            raise ValueError("empty candidate list")

    def validate(self, region: HexRegion, bounds: AltitudeBounds) -> None:
        if not all(contains(region, p) for p in self.horizontal):
            raise ValueError("candidate outside region")
        if not all(bounds.contains(h) for h in self.altitudes):
            raise ValueError("candidate altitude outside bounds")


def altitude_levels(bounds: AltitudeBounds, count: int) -> tuple[float, ...]:
    return tuple(float(h) for h in np.linspace(bounds.h_min, bounds.h_max, count))


def place_strategic(candidates: CandidateSet, existing_bs) -> Position3D:
    """Candidate with the largest minimum horizontal distance to ``existing_bs``.

    Ties go to the lowest candidate index. With no existing BS the first
    candidate is returned.
    """
    best_i, best_d = 0, -math.inf
    for i, (x, y) in enumerate(candidates.horizontal):
        d = min((math.hypot(x - b[0], y - b[1]) for b in existing_bs), default=math.inf)
        if d > best_d:
            best_i, best_d = i, d
    x, y = candidates.horizontal[best_i]
    return Position3D(x, y, candidates.fixed_altitude)


def place_strategic_all(candidates: CandidateSet, existing_bs, n: int) -> list[Position3D]:
    """Sequential strategic placement of ``n`` UAVs, each seeing the earlier ones."""
    placed: list[Position3D] = []
    existing = [tuple(b)[:2] for b in existing_bs]
    for _ in range(n):
        p = place_strategic(candidates, existing)
        placed.append(p)
        existing.append((p.x, p.y))
    return placed


def place_random_fixed(region: HexRegion, fixed_altitude: float, rng: np.random.Generator) -> Position3D:
    x, y = sample_uniform_xy(region, 1, rng)[0]
    return Position3D(float(x), float(y), fixed_altitude)


def place_random(candidates: CandidateSet, rng: np.random.Generator) -> Position3D:
    i = int(rng.integers(len(candidates.horizontal)))
    j = int(rng.integers(len(candidates.altitudes)))
    x, y = candidates.horizontal[i]
    return Position3D(x, y, candidates.altitudes[j])
