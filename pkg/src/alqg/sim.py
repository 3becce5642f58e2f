"""Seeded Monte Carlo evaluation of strategy profiles.

Randomness is counter based: rollout ``r`` reads its uniforms from a Philox
stream keyed on the seed, starting at counter block ``r * K`` where ``K`` is
the number of blocks one rollout needs. Any chunk of rollouts can be drawn
independently, so results do not depend on chunking or thread scheduling.
Gaussians are produced from the uniforms by inverse CDF (``scipy.special.ndtri``).

Per-rollout uniform layout for horizon ``N``: slot 0 draws the initial state;
for stage ``i`` (1-based) slot ``3i-2`` picks the adversary's support point,
slot ``3i-1`` the manipulation noise and slot ``3i`` the process noise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.special import ndtri

from .equilibrium import StrategyProfile
from .lqg import update_moments
from .model import (
    DEFAULT_DIVERGENCE_THRESHOLD,
    AdversaryAction,
    AgentAction,
    Belief,
    ModelParams,
    StageRecord,
    Trajectory,
    stage_reward,
    step_dynamics,
)

_MAX_CHUNK_FLOATS = 4_000_000


@dataclass(frozen=True)
class SimConfig:
    rollouts: int = 10_000
    seed: int = 0
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    burn_in: int = 0  # stages skipped by the tail average

    def __post_init__(self):
        if self.rollouts < 1:
            raise ValueError("rollouts must be at least 1")
        if not self.divergence_threshold > 0:
            raise ValueError("divergence_threshold must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")


@dataclass(frozen=True)
class SimResult:
    """Monte Carlo estimate over the rollouts that stayed bounded.

    ``tail_mean``/``tail_stderr`` describe the per-rollout average reward over
    stages ``burn_in+1..N``; with ``burn_in=0`` that is the mean per-stage reward.
    """

    mean_total_reward: float
    stderr: float
    mean_per_stage_reward: float
    tail_mean: float
    tail_stderr: float
    stage_means: np.ndarray = field(repr=False)
    diverged_count: int
    rollouts: int
    seed: int
    horizon: int
    burn_in: int

    @property
    def n_used(self) -> int:
        return self.rollouts - self.diverged_count

    @property
    def all_diverged(self) -> bool:
        return self.n_used == 0

    @property
    def insufficient_sample(self) -> bool:
        return self.n_used < 2


def _blocks_per_rollout(horizon: int) -> int:
    return -(-(1 + 3 * horizon) // 4)


def draw_uniforms(seed: int, start: int, stop: int, horizon: int) -> np.ndarray:
    """Uniforms in (0, 1) for rollouts ``start..stop-1``, shape ``(stop-start, 1+3N)``."""
    k = _blocks_per_rollout(horizon)
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[start * k, 0, 0, 0]))
    u = gen.random((stop - start, 4 * k))[:, : 1 + 3 * horizon]
    u[u == 0.0] = 2.0**-54
    return u


def _simulate(profile: StrategyProfile, params: ModelParams, u: np.ndarray, threshold: float, record: bool = False):
    n = u.shape[0]
    horizon = params.horizon
    b = params.initial_belief
    mu = np.full(n, float(b.mu))
    s2 = np.full(n, float(b.sigma2))
    s = b.mu + math.sqrt(b.sigma2) * ndtri(u[:, 0])
    rewards = np.zeros((n, horizon))
    alive = np.ones(n, dtype=bool)
    log = []
    for i in range(1, horizon + 1):
        p = params.stage(i)
        agent, adversary = profile.rules(i)
        alive &= np.abs(s) <= threshold
        s = np.where(alive, s, 0.0)
        mu = np.where(alive, mu, 0.0)
        pi, d2 = adversary.sample(s2, u[:, 3 * i - 2])
        s_hat = pi * s + np.sqrt(d2) * ndtri(u[:, 3 * i - 1])
        kappa, rho = agent(mu, s2)
        a = kappa * s_hat + rho
        rewards[:, i - 1] = stage_reward(s, a, p)
        if record:
            log.append((s, s_hat, a, rewards[:, i - 1], mu, s2, pi, d2, kappa, rho))
        mu, s2 = update_moments(mu, s2, pi, d2, s_hat, a, p)
        s = step_dynamics(s, a, math.sqrt(p.omega2) * ndtri(u[:, 3 * i]), p)
    alive &= np.isfinite(rewards).all(axis=1)
    rewards[~alive] = 0.0
    return rewards, alive, log


def _check_horizon(profile: StrategyProfile, params: ModelParams) -> None:
    if not profile.stationary and profile.horizon != params.horizon:
        raise ValueError(f"profile horizon {profile.horizon} != model horizon {params.horizon}")


def rollout(
    profile: StrategyProfile,
    params: ModelParams,
    seed: int,
    index: int = 0,
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> Trajectory:
    """Single trajectory; identical to rollout ``index`` of :func:`monte_carlo_value` with the same seed."""
    _check_horizon(profile, params)
    u = draw_uniforms(seed, index, index + 1, params.horizon)
    _, alive, log = _simulate(profile, params, u, divergence_threshold, record=True)
    recs = []
    for s, s_hat, a, r, mu, s2, pi, d2, kappa, rho in log:
        if not abs(s[0]) <= divergence_threshold:
            break
        recs.append(
            StageRecord(
                float(s[0]), float(s_hat[0]), float(a[0]), float(r[0]),
                Belief(float(mu[0]), float(s2[0])),
                AdversaryAction(float(pi[0]), float(d2[0])),
                AgentAction(float(np.broadcast_to(kappa, (1,))[0]), float(np.broadcast_to(rho, (1,))[0])),
            )
        )
    return Trajectory(tuple(recs), diverged=not bool(alive[0]))


def _worker_count() -> int:
    env = os.environ.get("ALQG_THREADS")
    cap = os.cpu_count() or 1
    if env:
        cap = max(1, min(cap, int(env)))
    return cap


def monte_carlo_value(profile: StrategyProfile, params: ModelParams, cfg: SimConfig) -> SimResult:
    """Estimate the expected accumulated reward of ``profile`` under ``params``."""
    _check_horizon(profile, params)
    horizon = params.horizon
    if cfg.burn_in >= horizon:
        raise ValueError("burn_in must be smaller than the horizon")
    width = 4 * _blocks_per_rollout(horizon)
    chunk = max(1, min(cfg.rollouts, _MAX_CHUNK_FLOATS // width))
    bounds = [(lo, min(lo + chunk, cfg.rollouts)) for lo in range(0, cfg.rollouts, chunk)]

    def run(span):
        u = draw_uniforms(cfg.seed, span[0], span[1], horizon)
        rewards, alive, _ = _simulate(profile, params, u, cfg.divergence_threshold)
        return rewards.sum(axis=1), rewards[:, cfg.burn_in :].mean(axis=1), alive, rewards.sum(axis=0)

    workers = min(_worker_count(), len(bounds))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(span) for span in bounds]

    totals = np.concatenate([p[0] for p in parts])
    tails = np.concatenate([p[1] for p in parts])
    alive = np.concatenate([p[2] for p in parts])
    stage_sums = np.zeros(horizon)
    for p in parts:
        stage_sums += p[3]
    n = int(alive.sum())
    diverged = cfg.rollouts - n

    def mean_se(x):
        if n == 0:
            return math.nan, math.nan
        if n == 1:
            return float(x[0]), 0.0
        return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n))

    mean, se = mean_se(totals[alive])
    tail_mean, tail_se = mean_se(tails[alive])
    return SimResult(
        mean_total_reward=mean,
        stderr=se,
        mean_per_stage_reward=mean / horizon,
        tail_mean=tail_mean,
        tail_stderr=tail_se,
        stage_means=stage_sums / n if n else np.full(horizon, math.nan),
        diverged_count=diverged,
        rollouts=cfg.rollouts,
        seed=cfg.seed,
        horizon=horizon,
        burn_in=cfg.burn_in,
    )


def sweep(
    factory: Callable[[float], Mapping[str, object]],
    grid: Iterable[float],
    params: ModelParams,
    cfg: SimConfig,
    name: str = "x",
) -> list[dict]:
    """Evaluate ``factory(x)`` at each grid point.

    The factory maps a grid value to named entries. Floats are closed-form
    values and are copied into the row. :class:`StrategyProfile` entries are
    simulated under ``params`` and contribute ``<key>_mean``,
    ``<key>_stderr`` and ``<key>_diverged``. An exception at one grid point
    is stored in that row's ``error`` field and the sweep moves on.
    """
    rows = []
    for x in grid:
        row: dict = {name: x}
        try:
            for key, entry in factory(x).items():
                if isinstance(entry, StrategyProfile):
                    res = monte_carlo_value(entry, params, cfg)
                    row[f"{key}_mean"] = res.tail_mean
                    row[f"{key}_stderr"] = res.tail_stderr
                    row[f"{key}_diverged"] = res.diverged_count
                else:
                    row[key] = entry
        except Exception as exc:  # recorded per row by design
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows
