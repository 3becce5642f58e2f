"""Finite-horizon subgame perfect equilibria of the adversarial LQG game.

Which equilibrium exists depends only on the coefficient bounds
``[eps_lo, eps_hi]`` and the horizon:

* ``eps_lo == eps_hi != 0``: a unique pure equilibrium with an informative
  agent (:func:`solve_pure_spe`).
* ``eps_lo < 0 < eps_hi``: a continuum of babbling equilibria in behavioural
  strategies, all with the same value (:func:`solve_behavioral_spe`).
* same-sign strict bounds and ``N == 2``: a unique mixed equilibrium
  (:func:`solve_two_stage_spe`).
* one bound at zero: no equilibrium at all.

Strategy rules are small callables of the belief ``(mu, sigma2)`` that also
accept numpy arrays, so the simulator can apply them across rollouts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .lqg import control_gain, riccati_step
from .model import (
    AdversaryAction,
    AdversaryConstraints,
    AgentAction,
    Belief,
    ModelParams,
    StageParams,
    check,
    saturating_delta2,
)


class Regime(str, enum.Enum):
    DEGENERATE_ONE_STAGE = "DegenerateOneStage"
    INFEASIBLE_ADVERSARY = "InfeasibleAdversary"
    PURE_UNIQUE = "PureUnique"
    BEHAVIORAL_CONTINUUM = "BehavioralContinuum"
    NO_SPE = "NoSPE"
    TWO_STAGE_UNIQUE = "TwoStageUnique"
    UNKNOWN_OPEN = "UnknownOpen"


class RegimeError(ValueError):
    """The requested solver does not apply to the given bounds and horizon."""


class SupportError(ValueError):
    """A behavioural adversary support violates the equilibrium conditions."""


def classify_regime(c: AdversaryConstraints, horizon: int) -> Regime:
    lo, hi = c.eps_lo, c.eps_hi
    if lo == hi == 0:
        return Regime.INFEASIBLE_ADVERSARY
    if horizon == 1:
        return Regime.DEGENERATE_ONE_STAGE
    if lo == hi:
        return Regime.PURE_UNIQUE
    if lo < 0 < hi:
        return Regime.BEHAVIORAL_CONTINUUM
    if lo == 0 or hi == 0:
        return Regime.NO_SPE
    if horizon == 2:
        return Regime.TWO_STAGE_UNIQUE
    return Regime.UNKNOWN_OPEN


# --------------------------------------------------------------------------
# coefficient ladders


@dataclass(frozen=True)
class CoefficientLadder:
    """Backward value coefficients, stored as arrays of length ``N+1``.

    ``theta_tilde[i-1]`` multiplies ``mu_i^2``; ``theta_hat`` and
    ``theta_check`` multiply ``sigma_i^2`` in the pure and behavioural regimes.
    The last entry of each array is the zero terminal coefficient.
    """

    theta_tilde: np.ndarray
    theta_hat: np.ndarray
    theta_check: np.ndarray
    lam: float

    @property
    def horizon(self) -> int:
        return len(self.theta_tilde) - 1

    def tilde(self, i: int) -> float:
        return float(self.theta_tilde[i - 1])

    def hat(self, i: int) -> float:
        return float(self.theta_hat[i - 1])

    def check(self, i: int) -> float:
        return float(self.theta_check[i - 1])

    def variance(self, i: int, kind: str) -> float:
        return self.hat(i) if kind == "hat" else self.check(i)


def coefficient_ladder(params: ModelParams, lam: float) -> CoefficientLadder:
    n = params.horizon
    tt = np.zeros(n + 1)
    th = np.zeros(n + 1)
    tc = np.zeros(n + 1)
    shrink = (lam - 1.0) / lam
    for i in range(n - 1, -1, -1):
        p = params.stages[i]
        a2 = p.alpha**2
        t_next = tt[i + 1]
        lqr_drop = t_next**2 * a2 * p.beta**2 / (p.phi + t_next * p.beta**2)
        tt[i] = riccati_step(t_next, p)
        th[i] = p.theta + th[i + 1] * a2 - (lqr_drop + (th[i + 1] - t_next) * a2) * shrink
        tc[i] = p.theta + tc[i + 1] * a2 - (tc[i + 1] - t_next) * a2 * shrink
    return CoefficientLadder(tt, th, tc, lam)


def _noise_tail(ladder_values: np.ndarray, omega2: Sequence[float], stage: int) -> float:
    # sum_{j=stage+1}^{N} v_j * omega2_{j-1}
    n = len(ladder_values) - 1
    return math.fsum(ladder_values[j - 1] * omega2[j - 2] for j in range(stage + 1, n + 1))


def pure_value(belief: Belief, ladder: CoefficientLadder, stage: int, omega2: Sequence[float]) -> float:
    """Equilibrium value of the subgame starting at ``stage`` in the pure regime."""
    return (
        -ladder.tilde(stage) * belief.mu**2
        - ladder.hat(stage) * belief.sigma2
        - _noise_tail(ladder.theta_hat, omega2, stage)
    )


def behavioral_value(belief: Belief, ladder: CoefficientLadder, stage: int, omega2: Sequence[float]) -> float:
    """Equilibrium value in the behavioural regime; independent of the chosen support."""
    return (
        -ladder.tilde(stage) * belief.mu**2
        - ladder.check(stage) * belief.sigma2
        - _noise_tail(ladder.theta_check, omega2, stage)
    )


# --------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class AdversaryMixture:
    """Finite-support behavioural adversary strategy at one belief."""

    actions: tuple[AdversaryAction, ...]
    probs: tuple[float, ...]

    @property
    def mean_pi(self) -> float:
        return math.fsum(p * a.pi for a, p in zip(self.actions, self.probs))

    @property
    def mean_pi2(self) -> float:
        return math.fsum(p * a.pi**2 for a, p in zip(self.actions, self.probs))


@dataclass(frozen=True)
class MixtureRule:
    """Adversary rule mixing over fixed coefficients with belief-scaled noise.

    Each coefficient ``pi_k`` is played with probability ``probs[k]`` and noise
    variance ``noise_scale * pi_k^2 sigma2 / (lam - 1)``; ``noise_scale = 1``
    saturates the mutual-information bound. A pure rule is a single point.
    """

    pis: tuple[float, ...]
    probs: tuple[float, ...]
    lam: float
    noise_scale: float = 1.0

    def __call__(self, belief: Belief) -> AdversaryMixture:
        acts = tuple(
            AdversaryAction(pi, self.noise_scale * saturating_delta2(pi, belief.sigma2, self.lam)) for pi in self.pis
        )
        return AdversaryMixture(acts, tuple(self.probs))

    def sample(self, sigma2, u):
        """Draw ``(pi, delta2)`` arrays from uniforms ``u`` by inverse CDF over the support."""
        pis = np.asarray(self.pis, dtype=float)
        if len(pis) == 1:
            pi = np.full(np.shape(u), pis[0])
        else:
            cdf = np.cumsum(self.probs)
            idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(pis) - 1)
            pi = pis[idx]
        return pi, self.noise_scale * saturating_delta2(pi, sigma2, self.lam)


@dataclass(frozen=True)
class AffineAgentRule:
    """``kappa`` constant, ``rho = rho_gain * mu``."""

    kappa: float
    rho_gain: float

    def __call__(self, mu, sigma2):
        return self.kappa + 0.0 * mu, self.rho_gain * mu


@dataclass(frozen=True)
class TwoStageAgentRule:
    """First-stage agent best response to a two-point same-sign mixture."""

    stage: StageParams
    theta_next: float
    lam: float
    mean_pi: float
    mean_pi2: float

    def __call__(self, mu, sigma2):
        p = self.stage
        cross = self.theta_next * p.alpha * p.beta
        curv = p.phi + self.theta_next * p.beta**2
        spread = self.mean_pi2 * (mu**2 + self.lam / (self.lam - 1) * sigma2) - self.mean_pi**2 * mu**2
        kappa = -cross * self.mean_pi * sigma2 / (curv * spread)
        rho = -self.mean_pi * mu * kappa - cross * mu / curv
        return kappa, rho


@dataclass(frozen=True)
class ScaledAgentRule:
    """Wraps another agent rule and multiplies its gain; used to corrupt profiles."""

    base: Callable
    kappa_scale: float

    def __call__(self, mu, sigma2):
        kappa, rho = self.base(mu, sigma2)
        return self.kappa_scale * kappa, rho


@dataclass(frozen=True)
class StrategyProfile:
    """Per-stage agent and adversary rules.

    A stationary profile stores one rule pair that applies at every stage and
    can be simulated over any horizon. ``variance_ladder`` names the
    coefficient sequence ("hat" or "check") giving the profile's continuation
    value, which the verifier needs.
    """

    regime: Regime
    agent_rules: tuple
    adversary_rules: tuple
    stationary: bool = False
    variance_ladder: str = "hat"

    @property
    def horizon(self) -> int | None:
        return None if self.stationary else len(self.agent_rules)

    def rules(self, i: int):
        k = 0 if self.stationary else i - 1
        return self.agent_rules[k], self.adversary_rules[k]

    def agent_action(self, i: int, belief: Belief) -> AgentAction:
        kappa, rho = self.rules(i)[0](belief.mu, belief.sigma2)
        return AgentAction(float(kappa), float(rho))

    def adversary_strategy(self, i: int, belief: Belief) -> AdversaryMixture:
        return self.rules(i)[1](belief)

    def perturbed(self, kappa_scale: float = 1.0, prob_shift: float = 0.0) -> "StrategyProfile":
        """Corrupted copy: agent gains scaled, first support probability moved by ``prob_shift``."""
        agents = tuple(ScaledAgentRule(r, kappa_scale) for r in self.agent_rules)
        advs = []
        for r in self.adversary_rules:
            if prob_shift and len(r.probs) >= 2:
                probs = list(r.probs)
                probs[0] += prob_shift
                probs[1] -= prob_shift
                if min(probs) < 0:
                    raise ValueError("probability shift leaves the simplex")
                r = replace(r, probs=tuple(probs))
            advs.append(r)
        return replace(self, agent_rules=agents, adversary_rules=tuple(advs))


@dataclass(frozen=True)
class EquilibriumReport:
    regime: Regime
    ladder: CoefficientLadder | None
    profile: StrategyProfile | None
    value: float | None
    message: str = ""
    certificates: tuple = field(default=())


def _require(regime: Regime, c: AdversaryConstraints, horizon: int) -> None:
    got = classify_regime(c, horizon)
    if got is not regime:
        raise RegimeError(f"regime is {got.value}, solver requires {regime.value}")


def default_support(c: AdversaryConstraints) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Two-point support at the bounds with zero mean coefficient."""
    lo, hi = c.eps_lo, c.eps_hi
    return (lo, hi), (hi / (hi - lo), -lo / (hi - lo))


def pure_agent_rule(theta_next: float, p: StageParams, lam: float, pi: float) -> AffineAgentRule:
    g = control_gain(theta_next, p)
    return AffineAgentRule(-g * (lam - 1) / (lam * pi), -g / lam)


def babbling_agent_rule(theta_next: float, p: StageParams) -> AffineAgentRule:
    return AffineAgentRule(0.0, -control_gain(theta_next, p))


def pure_form_profile(params: ModelParams, lam: float, pi: float, regime: Regime = Regime.PURE_UNIQUE) -> StrategyProfile:
    """Pure-equilibrium-shaped profile with the adversary always playing ``pi``."""
    tt = coefficient_ladder(params, lam).theta_tilde
    agents = tuple(pure_agent_rule(tt[i + 1], p, lam, pi) for i, p in enumerate(params.stages))
    adv = MixtureRule((pi,), (1.0,), lam)
    return StrategyProfile(regime, agents, (adv,) * params.horizon, variance_ladder="hat")


def solve_pure_spe(params: ModelParams, c: AdversaryConstraints) -> tuple[CoefficientLadder, StrategyProfile]:
    check(params, c)
    _require(Regime.PURE_UNIQUE, c, params.horizon)
    return coefficient_ladder(params, c.lam), pure_form_profile(params, c.lam, c.eps_hi)


def _support_rule(support, c: AdversaryConstraints) -> MixtureRule:
    if support is None:
        pis, probs = default_support(c)
    else:
        pis = tuple(float(pi) for pi, _ in support)
        probs = tuple(float(p) for _, p in support)
    if len(set(pis)) < 2 or len(set(pis)) != len(pis):
        raise SupportError("support needs at least two distinct coefficients")
    if any(p <= 0 for p in probs) or abs(math.fsum(probs) - 1) > 1e-12:
        raise SupportError("support probabilities must be positive and sum to 1")
    for pi in pis:
        if pi == 0 or not c.eps_lo <= pi <= c.eps_hi:
            raise SupportError(f"support coefficient {pi} is infeasible")
    scale = max(abs(pi) for pi in pis)
    if abs(math.fsum(p * pi for pi, p in zip(pis, probs))) > 1e-12 * scale:
        raise SupportError("support must have zero mean coefficient")
    return MixtureRule(pis, probs, c.lam)


def solve_behavioral_spe(
    params: ModelParams, c: AdversaryConstraints, support: Sequence[tuple[float, float]] | None = None
) -> tuple[CoefficientLadder, StrategyProfile]:
    """Babbling equilibrium; ``support`` is a list of ``(pi, probability)`` pairs."""
    check(params, c)
    _require(Regime.BEHAVIORAL_CONTINUUM, c, params.horizon)
    ladder = coefficient_ladder(params, c.lam)
    adv = _support_rule(support, c)
    agents = tuple(babbling_agent_rule(ladder.theta_tilde[i + 1], p) for i, p in enumerate(params.stages))
    profile = StrategyProfile(Regime.BEHAVIORAL_CONTINUUM, agents, (adv,) * params.horizon, variance_ladder="check")
    return ladder, profile


def two_stage_mixture(c: AdversaryConstraints) -> MixtureRule:
    lo, hi = c.eps_lo, c.eps_hi
    return MixtureRule((lo, hi), (hi / (lo + hi), lo / (lo + hi)), c.lam)


def two_stage_value(belief: Belief, params: ModelParams, c: AdversaryConstraints) -> float:
    p1, p2 = params.stages
    t2 = p2.theta
    lam = c.lam
    mix = two_stage_mixture(c)(belief)
    e1, e2 = mix.mean_pi, mix.mean_pi2
    mu, s2 = belief.mu, belief.sigma2
    curv = p1.phi + t2 * p1.beta**2
    spread = e2 * (mu**2 + lam / (lam - 1) * s2) - e1**2 * mu**2
    return (
        -(p1.theta + t2 * p1.alpha**2 - t2**2 * p1.alpha**2 * p1.beta**2 / curv) * mu**2
        - t2 * p1.omega2
        - (p1.theta + t2 * p1.alpha**2) * s2
        + t2**2 * p1.alpha**2 * p1.beta**2 * e1**2 * s2**2 / (curv * spread)
    )


def solve_two_stage_spe(params: ModelParams, c: AdversaryConstraints, b1: Belief | None = None):
    """Unique two-stage equilibrium for same-sign bounds; returns ``(profile, value)``."""
    check(params, c)
    _require(Regime.TWO_STAGE_UNIQUE, c, params.horizon)
    b1 = params.initial_belief if b1 is None else b1
    p1, p2 = params.stages
    mix = two_stage_mixture(c)
    pis, probs = np.array(mix.pis), np.array(mix.probs)
    agent1 = TwoStageAgentRule(p1, p2.theta, c.lam, float(probs @ pis), float(probs @ pis**2))
    profile = StrategyProfile(
        Regime.TWO_STAGE_UNIQUE, (agent1, AffineAgentRule(0.0, 0.0)), (mix, mix), variance_ladder="hat"
    )
    return profile, two_stage_value(b1, params, c)


def solve_degenerate(params: ModelParams, c: AdversaryConstraints) -> StrategyProfile:
    """One-stage game: the agent does nothing and any feasible adversary strategy is optimal."""
    check(params, c)
    _require(Regime.DEGENERATE_ONE_STAGE, c, params.horizon)
    lo, hi = c.eps_lo, c.eps_hi
    if lo < 0 < hi:
        pis, probs = default_support(c)
    else:
        pis = tuple(sorted({x for x in (lo, hi) if x != 0}))
        probs = (1.0 / len(pis),) * len(pis)
    return StrategyProfile(
        Regime.DEGENERATE_ONE_STAGE, (AffineAgentRule(0.0, 0.0),), (MixtureRule(pis, probs, c.lam),)
    )


def solve(params: ModelParams, c: AdversaryConstraints, belief: Belief | None = None) -> EquilibriumReport:
    """Dispatch on the regime and return the equilibrium with its value at ``belief``."""
    check(params, c)
    belief = params.initial_belief if belief is None else belief
    regime = classify_regime(c, params.horizon)
    ladder = coefficient_ladder(params, c.lam)
    omega2 = params.omega2
    if regime is Regime.DEGENERATE_ONE_STAGE:
        return EquilibriumReport(regime, ladder, solve_degenerate(params, c), pure_value(belief, ladder, 1, omega2))
    if regime is Regime.PURE_UNIQUE:
        _, prof = solve_pure_spe(params, c)
        return EquilibriumReport(regime, ladder, prof, pure_value(belief, ladder, 1, omega2))
    if regime is Regime.BEHAVIORAL_CONTINUUM:
        _, prof = solve_behavioral_spe(params, c)
        return EquilibriumReport(regime, ladder, prof, behavioral_value(belief, ladder, 1, omega2))
    if regime is Regime.TWO_STAGE_UNIQUE:
        prof, value = solve_two_stage_spe(params, c, belief)
        return EquilibriumReport(regime, ladder, prof, value)
    messages = {
        Regime.INFEASIBLE_ADVERSARY: "no feasible adversary action when eps_lo = eps_hi = 0",
        Regime.NO_SPE: "no subgame perfect equilibrium exists when one bound is zero",
        Regime.UNKNOWN_OPEN: "same-sign bounds with horizon >= 3 have no known closed form",
    }
    return EquilibriumReport(regime, ladder, None, None, "no equilibrium constructed: " + messages[regime])
