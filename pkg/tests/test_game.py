import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skyplace.game import (GameWeights, UavAgent, activation, activation_all, adapt_threshold,
                           is_satisfaction_equilibrium, q_factor, satisfaction_indicator,
                           select_strategy, update_policy, utility)
from skyplace.geometry import N_STRATEGIES, StrategyId

UNIFORM = np.full(N_STRATEGIES, 1 / N_STRATEGIES)


def test_utility_examples():
    w = GameWeights(norm=10.0)
    assert utility(5.0, 0, w) == 0.5
    assert utility(5.0, 1, w) == -0.5
    assert utility(0.0, 0, w) == 0.0


def test_weights_validation():
    with pytest.raises(ValueError):
        GameWeights(norm=0.0)


def test_activation():
    assert activation((0, 0, 100), [(0, 0, 105)], 10) == 1
    assert activation((0, 0, 100), [(0, 0, 110)], 10) == 0  # strict
    assert activation((0, 0, 100), [], 10) == 0


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50), st.floats(20, 60)), max_size=8))
def test_activation_all_matches_scalar(pts):
    xyh = np.array(pts, dtype=float).reshape(-1, 3)
    flags = activation_all(xyh, 10.0)
    for i in range(len(pts)):
        others = [p for j, p in enumerate(pts) if j != i]
        assert flags[i] == activation(pts[i], others, 10.0)


def test_satisfaction_indicator():
    assert satisfaction_indicator(0.5, 0.5) == 1
    assert satisfaction_indicator(0.49, 0.5) == 0


def test_q_factor():
    assert q_factor(0.5, 0.5, 1.0) == 0.5
    assert q_factor(1.0, 0.0, 1.0) == 1.0
    assert q_factor(-5.0, 0.5, 1.0) == 0.0
    with pytest.raises(ValueError):
        q_factor(0.0, 0.0, 0.0)


def test_update_policy_plugin():
    new = update_policy(UNIFORM.copy(), StrategyId.UP, 0, 0.35, 1.0)
    assert new[0] == pytest.approx(1 / 7 + 0.35 * 6 / 7, abs=1e-12)
    assert new[1:] == pytest.approx(np.full(6, (1 / 7) * 0.65), abs=1e-12)
    assert new.sum() == pytest.approx(1.0, abs=1e-15)


def test_update_policy_satisfied_unchanged():
    p = UNIFORM.copy()
    assert update_policy(p, StrategyId.UP, 1, 0.9, 0.5) is p


def test_update_policy_bounds():
    with pytest.raises(ValueError):
        update_policy(UNIFORM.copy(), StrategyId.UP, 0, 1.0, 1.5)
    # mu*q = 1 collapses onto the chosen move
    p = update_policy(UNIFORM.copy(), StrategyId.LEFT, 0, 1.0, 1.0)
    assert p[StrategyId.LEFT.index] == 1.0 and p.sum() == 1.0


@given(st.lists(st.tuples(st.sampled_from(list(StrategyId)), st.floats(0, 1)), max_size=200),
       st.floats(0, 1))
def test_update_policy_simplex(steps, mu):
    p = UNIFORM.copy()
    for s, q in steps:
        p = update_policy(p, s, 0, q, mu)
        assert np.all(p >= 0) and np.all(p <= 1)
        assert abs(p.sum() - 1) < 1e-9


def test_select_strategy_satisfied_repeats_and_leaves_rng():
    a = UavAgent(1, 0.5, 0.05, satisfied=True, last_strategy=StrategyId.LEFT)
    rng = np.random.default_rng(3)
    state = rng.bit_generator.state
    assert select_strategy(a, rng) == StrategyId.LEFT
    assert rng.bit_generator.state == state


def test_select_strategy_degenerate():
    p = np.zeros(7)
    p[StrategyId.FORWARD.index] = 1.0
    a = UavAgent(1, 0.5, 0.05, policy=p)
    rng = np.random.default_rng(0)
    assert all(select_strategy(a, rng) == StrategyId.FORWARD for _ in range(200))


def test_select_strategy_uniform_frequencies():
    scipy_stats = pytest.importorskip("scipy.stats")
    a = UavAgent(1, 0.5, 0.05)
    rng = np.random.default_rng(11)
    n = 70000
    counts = np.bincount([select_strategy(a, rng).index for _ in range(n)], minlength=7)
    assert scipy_stats.chisquare(counts).pvalue > 1e-4


def test_adapt_threshold():
    a = UavAgent(1, 0.5, 0.05, unsatisfied_streak=99)
    assert adapt_threshold(a, 100, 0.9) == 0.5 and a.unsatisfied_streak == 99
    a.unsatisfied_streak = 100
    assert adapt_threshold(a, 100, 0.9) == pytest.approx(0.45)
    assert a.unsatisfied_streak == 0
    a = UavAgent(1, 0.051, 0.05, unsatisfied_streak=100)
    assert adapt_threshold(a, 100, 0.9) == 0.05
    a = UavAgent(1, -1.0, -1.0, unsatisfied_streak=100)
    assert adapt_threshold(a, 100, 0.9) == -1.0
    with pytest.raises(ValueError):
        adapt_threshold(a, 100, 1.0)


@given(st.floats(-2, 2), st.integers(1, 5))
def test_adapt_threshold_never_raises(gamma, rounds):
    a = UavAgent(1, gamma, min(gamma, 0.05))
    for _ in range(rounds):
        a.unsatisfied_streak = 100
        before = a.threshold
        after = adapt_threshold(a, 100, 0.9)
        assert after <= before and after >= a.threshold_floor


def test_equilibrium():
    assert is_satisfaction_equilibrium([])
    a, b = UavAgent(1, 0.5, 0.05, satisfied=True), UavAgent(2, 0.5, 0.05, satisfied=True)
    assert is_satisfaction_equilibrium([a, b])
    b.satisfied = False
    assert not is_satisfaction_equilibrium([a, b])


def test_agent_validation():
    with pytest.raises(ValueError):
        UavAgent(1, 0.5, 0.05, policy=np.ones(3))
    with pytest.raises(ValueError):
        UavAgent(1, 0.01, 0.05)
