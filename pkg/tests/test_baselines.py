import math

import numpy as np
import pytest

from skyplace.baselines import (CandidateSet, altitude_levels, place_random, place_random_fixed,
                                place_strategic, place_strategic_all)
from skyplace.geometry import AltitudeBounds, HexRegion, contains, hex_candidate_grid

REGION = HexRegion(250.0)
BOUNDS = AltitudeBounds(22.5, 300.0)


@pytest.fixture(scope="module")
def cands():
    return CandidateSet(tuple(hex_candidate_grid(REGION, 79)), altitude_levels(BOUNDS, 28), 100.0)


def test_altitude_levels():
    lv = altitude_levels(BOUNDS, 28)
    assert len(lv) == 28 and lv[0] == 22.5 and lv[-1] == 300.0
    assert np.allclose(np.diff(lv), 277.5 / 27)


def test_candidates_validate(cands):
    cands.validate(REGION, BOUNDS)
    with pytest.raises(ValueError):
        CandidateSet((), (100.0,))
    with pytest.raises(ValueError):
        CandidateSet(((500.0, 0.0),), (100.0,)).validate(REGION, BOUNDS)


def test_strategic_first_is_farthest_from_center(cands):
    p = place_strategic(cands, [(0.0, 0.0)])
    far = max(math.hypot(x, y) for x, y in cands.horizontal)
    assert math.hypot(p.x, p.y) == pytest.approx(far)
    assert p.h == 100.0


def test_strategic_single_candidate():
    c = CandidateSet(((1.0, 2.0),), (100.0,))
    p = place_strategic(c, [(0.0, 0.0), (5.0, 5.0)])
    assert (p.x, p.y) == (1.0, 2.0)


def test_strategic_matches_brute_force(cands):
    existing = [(0.0, 0.0)]
    placed = place_strategic_all(cands, existing, 6)
    for p in placed:
        scores = [min(math.dist(c, e) for e in existing) for c in cands.horizontal]
        best = max(scores)
        first = scores.index(best)
        assert (p.x, p.y) == cands.horizontal[first]
        existing.append((p.x, p.y))


def test_strategic_deterministic(cands):
    a = place_strategic_all(cands, [(0, 0)], 8)
    b = place_strategic_all(cands, [(0, 0)], 8)
    assert a == b
    assert len({(p.x, p.y) for p in a}) == 8


def test_random_fixed(cands):
    rng = np.random.default_rng(0)
    pts = [place_random_fixed(REGION, 100.0, rng) for _ in range(500)]
    assert all(contains(REGION, p) and p.h == 100.0 for p in pts)


def test_random_support_and_frequencies(cands):
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(5)
    n = 79 * 28 * 12
    hi = {c: i for i, c in enumerate(cands.horizontal)}
    ai = {h: j for j, h in enumerate(cands.altitudes)}
    counts = np.zeros((79, 28))
    for _ in range(n):
        p = place_random(cands, rng)
        counts[hi[(p.x, p.y)], ai[p.h]] += 1
    assert counts.size == 2212
    # marginals are uniform over both index sets
    assert stats.chisquare(counts.sum(1)).pvalue > 1e-4
    assert stats.chisquare(counts.sum(0)).pvalue > 1e-4
    assert stats.chisquare(counts.ravel()).pvalue > 1e-4
