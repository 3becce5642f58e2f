"""Equilibrium certification by one-shot deviation.

Every equilibrium built in :mod:`alqg.equilibrium` has an exact closed-form
continuation value. That makes a single-stage deviation search enough: at a
given stage and belief, compute the expected reward-plus-continuation ``Q``
for the profile's own actions and compare it with the best deviation found
by each player.

``q_stage`` is the general pointwise ``Q`` for an arbitrary manipulation
``(pi, delta2)`` and agent action ``(kappa, rho)``. The remaining ``q_*``
functions are the specialised closed forms (adversary against a babbling
agent, agent against a zero-mean mixture, the two-stage family). They are
coded literally and serve as cross-checks on ``q_stage``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baselines import naive_attack_pi
from .equilibrium import (
    AdversaryMixture,
    CoefficientLadder,
    StrategyProfile,
    coefficient_ladder,
)
from .lqg import control_gain, theta_tilde_ladder
from .model import AdversaryConstraints, Belief, ModelParams, StageParams, saturating_delta2

DEFAULT_TOL = 1e-8


class UnsupportedProfileError(ValueError):
    """The profile has no closed-form continuation value to check against."""


@dataclass(frozen=True)
class Continuation:
    """Coefficients of the value from stage ``i+1`` on: ``-mean*mu^2 - var*sigma2 - const``."""

    mean: float
    var: float
    const: float


def continuation(ladder: CoefficientLadder, stage: int, omega2: Sequence[float], kind: str) -> Continuation:
    values = ladder.theta_hat if kind == "hat" else ladder.theta_check
    n = ladder.horizon
    const = math.fsum(values[j - 1] * omega2[j - 2] for j in range(stage + 2, n + 1))
    return Continuation(ladder.tilde(stage + 1), float(values[stage]), const)


def q_stage(belief: Belief, pi, delta2, kappa, rho, p: StageParams, cont: Continuation):
    """Expected stage reward plus continuation for one manipulation and one agent action.

    Broadcasts over array arguments. ``pi`` must be nonzero or ``delta2`` positive.
    """
    mu, s2 = belief.mu, belief.sigma2
    a2 = p.alpha**2
    tn, vn = cont.mean, cont.var
    curv = p.phi + tn * p.beta**2
    cross = tn * p.alpha * p.beta
    signal = pi * pi * s2
    w = signal / (signal + delta2)
    mean_a = pi * kappa * mu + rho
    return (
        -(p.theta + tn * a2) * mu**2
        - vn * p.omega2
        - (p.theta + vn * a2) * s2
        - curv * mean_a**2
        - 2 * cross * mu * mean_a
        + (vn - tn) * a2 * w * s2
        - curv * kappa**2 * (signal + delta2)
        - 2 * cross * pi * kappa * s2
        - cont.const
    )


def q_mixture(belief: Belief, mixture: AdversaryMixture, kappa, rho, p: StageParams, cont: Continuation):
    return sum(
        prob * q_stage(belief, act.pi, act.delta2, kappa, rho, p, cont)
        for act, prob in zip(mixture.actions, mixture.probs)
    )


def agent_best_response(belief: Belief, mixture: AdversaryMixture, p: StageParams, theta_tilde_next: float):
    """Maximiser of ``q_mixture`` over ``(kappa, rho)``; valid for any finite mixture."""
    mu, s2 = belief.mu, belief.sigma2
    curv = p.phi + theta_tilde_next * p.beta**2
    cross = theta_tilde_next * p.alpha * p.beta
    e1 = mixture.mean_pi
    e2 = mixture.mean_pi2
    spread = math.fsum(q * (a.pi**2 * s2 + a.delta2) for a, q in zip(mixture.actions, mixture.probs))
    kappa = -cross * e1 * s2 / (curv * (mu**2 * (e2 - e1**2) + spread))
    rho = -kappa * mu * e1 - cross * mu / curv
    return kappa, rho


# --------------------------------------------------------------------------
# literal closed forms used as cross-checks


def q_pure(belief, pi, delta2, kappa, rho, ladder: CoefficientLadder, stage: int, params: ModelParams):
    """Pure-regime ``Q`` with the pure value ladder as continuation."""
    cont = continuation(ladder, stage, params.omega2, "hat")
    return q_stage(belief, pi, delta2, kappa, rho, params.stage(stage), cont)


def q_adversary_vs_babbler(belief, pi, delta2, ladder: CoefficientLadder, stage: int, params: ModelParams):
    """Adversary's ``Q`` against the babbling agent; depends on ``(pi, delta2)`` only through the signal share."""
    p = params.stage(stage)
    cont = continuation(ladder, stage, params.omega2, "check")
    tn, vn = cont.mean, cont.var
    mu, s2 = belief.mu, belief.sigma2
    a2 = p.alpha**2
    share = pi * pi * s2 / (pi * pi * s2 + delta2)
    return (
        -(p.theta + tn * a2 - tn**2 * a2 * p.beta**2 / (p.phi + tn * p.beta**2)) * mu**2
        - (p.theta + vn * a2) * s2
        - vn * p.omega2
        + (vn - tn) * a2 * share * s2
        - cont.const
    )


def q_agent_vs_mixture(belief, mixture: AdversaryMixture, kappa, rho, ladder: CoefficientLadder, stage: int, params: ModelParams):
    """Agent's ``Q`` against a mixture whose points all saturate the information bound.

    Keeps the terms in the mean coefficient, so it is also valid when that mean
    is nonzero (the agent's incentive to deviate then shows up as a linear
    term in ``kappa``).
    """
    p = params.stage(stage)
    lam = ladder.lam
    _require_saturating(mixture, belief, lam)
    cont = continuation(ladder, stage, params.omega2, "check")
    tn, vn = cont.mean, cont.var
    mu, s2 = belief.mu, belief.sigma2
    a2 = p.alpha**2
    curv = p.phi + tn * p.beta**2
    cross = tn * p.alpha * p.beta
    e1, e2 = mixture.mean_pi, mixture.mean_pi2
    return (
        -(p.theta + tn * a2) * mu**2
        - vn * p.omega2
        - (p.theta + vn * a2 - (vn - tn) * a2 * (lam - 1) / lam) * s2
        - curv * e2 * (mu**2 + lam / (lam - 1) * s2) * kappa**2
        - 2 * curv * e1 * mu * kappa * rho
        - curv * rho**2
        - 2 * cross * e1 * (mu**2 + s2) * kappa
        - 2 * cross * mu * rho
        - cont.const
    )


def q_agent_given_obs(belief: Belief, mixture: AdversaryMixture, s_hat, a, p: StageParams, cont: Continuation):
    """Agent's ``Q`` after observing ``s_hat`` and choosing ``a``, averaging the posterior over ``mixture``.

    Concave quadratic in ``a``, which is why affine agent rules suffice. For a
    point-mass ``mixture`` its expectation over ``s_hat`` under ``a = kappa*s_hat + rho``
    equals :func:`q_stage`.
    """
    mu, s2 = belief.mu, belief.sigma2
    curv = p.phi + cont.mean * p.beta**2
    m1 = m2 = post_var = 0.0
    for act, prob in zip(mixture.actions, mixture.probs):
        den = act.pi**2 * s2 + act.delta2
        m = (act.pi * s2 * s_hat + mu * act.delta2) / den
        m1 = m1 + prob * m
        m2 = m2 + prob * m * m
        post_var = post_var + prob * p.alpha**2 * s2 * act.delta2 / den
    return (
        -p.theta * (mu**2 + s2)
        - curv * a**2
        - 2 * cont.mean * m1 * p.alpha * p.beta * a
        - cont.mean * m2 * p.alpha**2
        - cont.var * post_var
        - cont.var * p.omega2
        - cont.const
    )


def _require_saturating(mixture: AdversaryMixture, belief: Belief, lam: float) -> None:
    for act in mixture.actions:
        target = saturating_delta2(act.pi, belief.sigma2, lam)
        if act.pi == 0 or not math.isclose(act.delta2, target, rel_tol=1e-9):
            raise ValueError("closed form needs every support point at delta2 = pi^2 sigma2/(lam-1)")


def q_two_stage(
    belief: Belief,
    params: ModelParams,
    lam: float,
    kappa,
    rho=None,
    pi=None,
    delta2=None,
    mixture: AdversaryMixture | None = None,
):
    """First-stage ``Q`` of a two-stage game in its several reduced forms.

    * ``pi`` and ``delta2`` given: pointwise value for that manipulation.
    * ``pi`` given without ``delta2``: same, with the saturating ``delta2``.
    * ``mixture`` given with ``rho``: expectation over a saturating mixture.
    * ``mixture`` given without ``rho``: ``rho`` replaced by its best response,
      leaving a concave quadratic in ``kappa``.
    """
    p1, p2 = params.stages
    t2 = p2.theta
    mu, s2 = belief.mu, belief.sigma2
    curv = p1.phi + t2 * p1.beta**2
    cross = t2 * p1.alpha * p1.beta
    base = -(p1.theta + t2 * p1.alpha**2) * mu**2 - t2 * p1.omega2 - (p1.theta + t2 * p1.alpha**2) * s2
    if mixture is None:
        if pi is None:
            raise ValueError("give pi (and optionally delta2) or a mixture")
        mean_a = pi * kappa * mu + rho
        if delta2 is None:
            noise = kappa**2 * lam / (lam - 1) * pi**2 * s2
        else:
            noise = kappa**2 * (pi**2 * s2 + delta2)
        return base - curv * mean_a**2 - 2 * cross * mu * mean_a - curv * noise - 2 * cross * pi * kappa * s2
    _require_saturating(mixture, belief, lam)
    e1, e2 = mixture.mean_pi, mixture.mean_pi2
    if rho is None:
        return (
            -(p1.theta + t2 * p1.alpha**2 - t2**2 * p1.alpha**2 * p1.beta**2 / curv) * mu**2
            - t2 * p1.omega2
            - (p1.theta + t2 * p1.alpha**2) * s2
            - curv * (e2 * (mu**2 + lam / (lam - 1) * s2) - e1**2 * mu**2) * kappa**2
            - 2 * cross * e1 * s2 * kappa
        )
    return (
        base
        - curv * e2 * (mu**2 + lam / (lam - 1) * s2) * kappa**2
        - 2 * curv * e1 * mu * kappa * rho
        - curv * rho**2
        - 2 * cross * e1 * (mu**2 + s2) * kappa
        - 2 * cross * mu * rho
    )


def two_stage_indifference_gap(params: ModelParams, c: AdversaryConstraints, belief: Belief, profile: StrategyProfile) -> float:
    """``Q(eps_lo) - Q(eps_hi)`` at the profile's first-stage agent action."""
    kappa, rho = profile.rules(1)[0](belief.mu, belief.sigma2)
    q_lo = q_two_stage(belief, params, c.lam, kappa, rho, pi=c.eps_lo)
    q_hi = q_two_stage(belief, params, c.lam, kappa, rho, pi=c.eps_hi)
    return float(q_lo - q_hi)


# --------------------------------------------------------------------------
# deviation search


@dataclass(frozen=True)
class GridSpec:
    """Search grid for deviations.

    The adversary grid has ``n_pi`` coefficients over the bounds, minus a notch
    of half-width ``notch`` around 0, and noise variances at each fraction of
    the saturating value. The agent grid is a square of ``agent_points^2``
    actions around the profile action, checked in addition to the analytic optimum.
    """

    n_pi: int = 401
    notch: float = 1e-6
    noise_fractions: tuple[float, ...] = (1.0, 0.5, 0.1)
    agent_points: int = 21
    agent_radius: float = 0.5


@dataclass(frozen=True)
class DeviationCertificate:
    stage: int
    player: str
    belief: Belief
    best_deviation: tuple[float, float]
    improvement: float
    tolerance: float

    @property
    def certified(self) -> bool:
        return self.improvement <= self.tolerance

    @property
    def verdict(self) -> str:
        return "certified" if self.certified else "falsified"


def adversary_grid(c: AdversaryConstraints, sigma2: float, grid: GridSpec):
    pis = np.unique(np.concatenate([np.linspace(c.eps_lo, c.eps_hi, grid.n_pi), [c.eps_lo, c.eps_hi]]))
    pis = pis[np.abs(pis) > grid.notch]
    fr = np.asarray(grid.noise_fractions)
    pi_g, fr_g = np.meshgrid(pis, fr, indexing="ij")
    return pi_g.ravel(), (fr_g * saturating_delta2(pi_g, sigma2, c.lam)).ravel()


def one_shot_deviation_check(
    profile: StrategyProfile,
    params: ModelParams,
    c: AdversaryConstraints,
    stage: int,
    belief: Belief,
    grid: GridSpec | None = None,
    tol: float = DEFAULT_TOL,
    ladder: CoefficientLadder | None = None,
) -> tuple[DeviationCertificate, DeviationCertificate]:
    """Certificates ``(adversary, agent)`` for one stage at one belief."""
    if profile.variance_ladder not in ("hat", "check"):
        raise UnsupportedProfileError(f"no closed-form continuation for ladder {profile.variance_ladder!r}")
    if not profile.stationary and profile.horizon != params.horizon:
        raise ValueError("profile horizon does not match the model")
    grid = grid or GridSpec()
    ladder = ladder or coefficient_ladder(params, c.lam)
    p = params.stage(stage)
    cont = continuation(ladder, stage, params.omega2, profile.variance_ladder)
    agent_rule, adv_rule = profile.rules(stage)
    kappa, rho = (float(v) for v in agent_rule(belief.mu, belief.sigma2))
    mixture = adv_rule(belief)
    q_profile = float(q_mixture(belief, mixture, kappa, rho, p, cont))

    pis, d2s = adversary_grid(c, belief.sigma2, grid)
    q_grid = q_stage(belief, pis, d2s, kappa, rho, p, cont)
    k = int(np.argmin(q_grid))
    adv_cert = DeviationCertificate(
        stage, "adversary", belief, (float(pis[k]), float(d2s[k])), q_profile - float(q_grid[k]), tol
    )

    ka, ra = agent_best_response(belief, mixture, p, cont.mean)
    offs = np.linspace(-1, 1, grid.agent_points)
    dk, dr = np.meshgrid(offs, offs, indexing="ij")
    kk = np.concatenate([[ka], kappa + grid.agent_radius * (1 + abs(kappa)) * dk.ravel()])
    rr = np.concatenate([[ra], rho + grid.agent_radius * (1 + abs(rho)) * dr.ravel()])
    vals = q_mixture(belief, mixture, kk, rr, p, cont)
    j = int(np.argmax(vals))
    agent_cert = DeviationCertificate(
        stage, "agent", belief, (float(kk[j]), float(rr[j])), float(vals[j]) - q_profile, tol
    )
    return adv_cert, agent_cert


def reachable_beliefs(profile: StrategyProfile, params: ModelParams, count: int, seed: int = 0) -> list[list[Belief]]:
    """Beliefs met along ``count`` simulated trajectories; entry ``i-1`` lists stage-``i`` beliefs."""
    from .sim import rollout

    per_stage: list[list[Belief]] = [[] for _ in range(params.horizon)]
    for r in range(count):
        traj = rollout(profile, params, seed, index=r)
        for i, rec in enumerate(traj.records):
            per_stage[i].append(rec.belief)
    return per_stage


def certify_profile(
    profile: StrategyProfile,
    params: ModelParams,
    c: AdversaryConstraints,
    beliefs: Sequence[Sequence[Belief]] | None = None,
    grid: GridSpec | None = None,
    tol: float = DEFAULT_TOL,
) -> list[DeviationCertificate]:
    """Deviation certificates at every stage; by default at the initial belief for stage 1
    and at the belief of one simulated path for later stages."""
    if beliefs is None:
        beliefs = reachable_beliefs(profile, params, 1)
        beliefs[0] = [params.initial_belief]
    ladder = coefficient_ladder(params, c.lam)
    certs = []
    for i, stage_beliefs in enumerate(beliefs, start=1):
        for b in stage_beliefs:
            certs.extend(one_shot_deviation_check(profile, params, c, i, b, grid, tol, ladder))
    return certs


# --------------------------------------------------------------------------
# naive-agent attack


def naive_value(params: ModelParams, lam: float, pis: np.ndarray, fractions: np.ndarray) -> np.ndarray:
    """Exact expected reward of the finite-horizon naive agent under pure attacks.

    ``pis`` and ``fractions`` have shape ``(..., N)``: the coefficient and the
    fraction of the saturating noise variance used at each stage. Propagates the
    first two moments of the state together with the belief variance.
    """
    tt = theta_tilde_ladder(params)
    b = params.initial_belief
    m = np.full(pis.shape[:-1], float(b.mu))
    q = np.full(pis.shape[:-1], b.mu**2 + b.sigma2)
    s2 = np.full(pis.shape[:-1], float(b.sigma2))
    total = np.zeros(pis.shape[:-1])
    for i, p in enumerate(params.stages):
        kappa = -control_gain(tt[i + 1], p)
        pi = pis[..., i]
        d2 = fractions[..., i] * saturating_delta2(pi, s2, lam)
        total += -p.theta * q - p.phi * kappa**2 * (pi**2 * q + d2)
        closed = p.alpha + p.beta * kappa * pi
        m, q = closed * m, closed**2 * q + p.beta**2 * kappa**2 * d2 + p.omega2
        s2 = p.alpha**2 * s2 * d2 / (pi**2 * s2 + d2) + p.omega2
    return total


def naive_attack_optimality_check(
    params: ModelParams,
    c: AdversaryConstraints,
    resolution: float = 0.01,
    noise_fractions: Sequence[float] = (1.0, 0.5, 0.1),
    tol: float = DEFAULT_TOL,
) -> DeviationCertificate:
    """Exhaustive grid over per-stage pure attacks against the naive agent.

    The last stage is skipped: the naive agent does not act on it. Horizons above 3 are refused.
    """
    n = params.horizon
    if n > 3:
        raise ValueError("exhaustive naive-attack search is limited to horizon <= 3")
    pi_a = naive_attack_pi(c)
    steps = int(round((c.eps_hi - c.eps_lo) / resolution))
    pis = np.linspace(c.eps_lo, c.eps_hi, steps + 1)
    pis = pis[pis != 0]
    fr = np.asarray(noise_fractions, dtype=float)
    options_pi, options_fr = np.meshgrid(pis, fr, indexing="ij")
    options = np.stack([options_pi.ravel(), options_fr.ravel()], axis=1)
    free = max(n - 1, 0)
    if free:
        idx = np.array(list(itertools.product(range(len(options)), repeat=free)))
        grid_pis = np.concatenate([options[idx, 0], np.full((len(idx), n - free), pi_a)], axis=1)
        grid_fr = np.concatenate([options[idx, 1], np.ones((len(idx), n - free))], axis=1)
    else:
        grid_pis, grid_fr = np.full((1, n), pi_a), np.ones((1, n))
    values = naive_value(params, c.lam, grid_pis, grid_fr)
    ref = float(naive_value(params, c.lam, np.full((1, n), pi_a), np.ones((1, n)))[0])
    k = int(np.argmin(values))
    return DeviationCertificate(
        0, "adversary", params.initial_belief, (float(grid_pis[k, 0]), float(grid_fr[k, 0])), ref - float(values[k]), tol
    )
