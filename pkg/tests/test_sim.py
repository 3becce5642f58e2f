import math

import numpy as np
import pytest

from alqg.baselines import naive_profile
from alqg.equilibrium import AffineAgentRule, MixtureRule, Regime, StrategyProfile, solve
from alqg.model import TABLE1_STAGE, AdversaryConstraints, Belief, ModelParams, table1
from alqg.sim import SimConfig, draw_uniforms, monte_carlo_value, rollout, sweep

P = TABLE1_STAGE


def result_tuple(res):
    return (
        res.mean_total_reward,
        res.stderr,
        res.tail_mean,
        res.tail_stderr,
        res.diverged_count,
        res.stage_means.tobytes(),
    )


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(rollouts=0)
    with pytest.raises(ValueError):
        SimConfig(divergence_threshold=0)
    with pytest.raises(ValueError):
        SimConfig(seed=-1)


def test_perfect_channel_variance():
    # zero manipulation noise: the belief variance after every stage is the process noise
    params = ModelParams.time_invariant(P, 4, Belief(0.5, 1.0))
    prof = StrategyProfile(
        Regime.PURE_UNIQUE, (AffineAgentRule(-1.5 / 5.5, 0.0),), (MixtureRule((1.0,), (1.0,), 2.0, noise_scale=0.0),), stationary=True
    )
    traj = rollout(prof, params, seed=3)
    assert [r.belief.sigma2 for r in traj.records[1:]] == [P.omega2] * 3
    assert all(r.s_hat == r.s for r in traj.records)


def test_rollout_deterministic_and_consistent():
    params = table1(5)
    prof = solve(params, AdversaryConstraints(-1, 2, 2.0)).profile
    t1 = rollout(prof, params, seed=42, index=7)
    t2 = rollout(prof, params, seed=42, index=7)
    assert t1 == t2
    assert t1.total_reward == pytest.approx(sum(r.r for r in t1.records))
    assert rollout(prof, params, seed=43, index=7) != t1


def test_uniform_substreams_independent_of_chunking():
    whole = draw_uniforms(5, 0, 50, 7)
    parts = np.concatenate([draw_uniforms(5, 0, 13, 7), draw_uniforms(5, 13, 50, 7)])
    assert np.array_equal(whole, parts)
    assert np.all((whole > 0) & (whole < 1))


def test_monte_carlo_bitwise_repeatable(monkeypatch):
    params = table1(3)
    prof = solve(params, AdversaryConstraints(-1, 1, 2.0)).profile
    cfg = SimConfig(rollouts=3001, seed=9)
    a = monte_carlo_value(prof, params, cfg)
    b = monte_carlo_value(prof, params, cfg)
    assert result_tuple(a) == result_tuple(b)
    monkeypatch.setenv("ALQG_THREADS", "1")
    monkeypatch.setattr("alqg.sim._MAX_CHUNK_FLOATS", 1000)
    c = monte_carlo_value(prof, params, cfg)
    assert c.diverged_count == a.diverged_count
    assert c.mean_total_reward == pytest.approx(a.mean_total_reward, rel=1e-12)


def test_rollout_matches_monte_carlo_member():
    params = table1(2)
    prof = solve(params, AdversaryConstraints(1, 1, 2.0)).profile
    res = monte_carlo_value(prof, params, SimConfig(rollouts=1, seed=21))
    assert res.mean_total_reward == pytest.approx(rollout(prof, params, 21, 0).total_reward, rel=1e-12)
    assert res.stderr == 0.0
    assert res.insufficient_sample


def test_all_diverged_reported():
    params = ModelParams.time_invariant(P, 200, Belief(0, 1))
    res = monte_carlo_value(naive_profile(P, AdversaryConstraints(-3, 3, 2.0)), params, SimConfig(rollouts=200, seed=1))
    assert res.all_diverged
    assert res.diverged_count == 200
    assert math.isnan(res.mean_total_reward)


def test_horizon_mismatch():
    prof = solve(table1(2), AdversaryConstraints(1, 1, 2.0)).profile
    with pytest.raises(ValueError):
        monte_carlo_value(prof, table1(3), SimConfig(rollouts=10))


@pytest.mark.parametrize(
    "c,expected",
    [
        (AdversaryConstraints(1, 1, 2.0), -4.295455),
        (AdversaryConstraints(-1, 1, 2.0), -4.5),
        (AdversaryConstraints(1, 2, 2.0), -4.318182),
    ],
)
def test_table1_monte_carlo(c, expected):
    params = table1(2)
    rep = solve(params, c)
    assert rep.value == pytest.approx(expected, abs=1e-6)
    res = monte_carlo_value(rep.profile, params, SimConfig(rollouts=100_000, seed=2024))
    assert abs(res.mean_total_reward - rep.value) <= 3 * res.stderr


def test_sweep_rows_and_errors():
    params = table1(3)

    def factory(lam):
        c = AdversaryConstraints(-1, 1, lam)
        return {"closed": -lam, "spe": solve(params, c).profile}

    rows = sweep(factory, [2.0, 0.5, 3.0], params, SimConfig(rollouts=500, seed=0), name="lambda")
    assert [r["lambda"] for r in rows] == [2.0, 0.5, 3.0]
    assert "error" in rows[1] and "spe_mean" not in rows[1]
    for r in (rows[0], rows[2]):
        assert r["spe_diverged"] == 0 and r["spe_stderr"] > 0
