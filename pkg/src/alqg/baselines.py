"""Non-strategic reference agents.

The *naive* agent ignores the adversary and runs plain LQR on the reported
state; the adversary's best reply flips the sign of the state with maximal
noise. The *alert* agent knows an attack is happening but assumes a fixed
coefficient ``pi_hat`` instead of best-responding to the equilibrium mixture.

The closed-form naive attack is stated for symmetric bounds
``eps_lo = -eps_hi``. For other bounds we use the most negative feasible
coefficient ``eps_lo`` (which equals ``-eps_hi`` in the symmetric case). If
no negative coefficient is feasible there is no closed form and we refuse.
"""

from __future__ import annotations

from .equilibrium import AffineAgentRule, MixtureRule, Regime, StrategyProfile, default_support
from .lqg import control_gain, theta_tilde_ladder
from .model import AdversaryAction, AdversaryConstraints, AgentAction, Belief, ModelParams, StageParams, saturating_delta2
from .stationary import StationarityError, kleene_iterate, map_L


def stationary_theta_tilde(p: StageParams, lam: float = 2.0) -> float:
    # the first component of L does not involve lam
    res = kleene_iterate(map_L, p, lam)
    if not res.converged:
        raise StationarityError("curvature iteration did not converge")
    return res.theta_tilde


def naive_agent_rule(belief: Belief, theta_tilde: float, p: StageParams) -> AgentAction:
    return AgentAction(-control_gain(theta_tilde, p), 0.0)


def naive_attack_pi(c: AdversaryConstraints) -> float:
    if not c.eps_lo < 0:
        raise ValueError("naive-agent attack needs a feasible negative coefficient (eps_lo < 0)")
    return c.eps_lo


def optimal_attack_on_naive(belief: Belief, c: AdversaryConstraints) -> AdversaryAction:
    pi = naive_attack_pi(c)
    return AdversaryAction(pi, saturating_delta2(pi, belief.sigma2, c.lam))


def alert_agent_rule(belief: Belief, pi_hat: float, theta_tilde: float, p: StageParams, lam: float) -> AgentAction:
    if pi_hat == 0:
        raise ValueError("alert agent needs pi_hat != 0")
    g = control_gain(theta_tilde, p)
    return AgentAction(-g * (lam - 1) / (lam * pi_hat), -g * belief.mu / lam)


def naive_profile(p: StageParams, c: AdversaryConstraints) -> StrategyProfile:
    """Stationary naive LQR agent against its optimal pure attack."""
    tt = stationary_theta_tilde(p, c.lam)
    return StrategyProfile(
        Regime.PURE_UNIQUE,
        (AffineAgentRule(-control_gain(tt, p), 0.0),),
        (MixtureRule((naive_attack_pi(c),), (1.0,), c.lam),),
        stationary=True,
    )


def naive_finite_profile(params: ModelParams, c: AdversaryConstraints) -> StrategyProfile:
    """Finite-horizon naive agent (LQR gains from the curvature ladder) against the same attack."""
    tt = theta_tilde_ladder(params)
    agents = tuple(AffineAgentRule(-control_gain(tt[i + 1], p), 0.0) for i, p in enumerate(params.stages))
    adv = MixtureRule((naive_attack_pi(c),), (1.0,), c.lam)
    return StrategyProfile(Regime.PURE_UNIQUE, agents, (adv,) * params.horizon)


def alert_profile(p: StageParams, c: AdversaryConstraints, pi_hat: float | None = None) -> StrategyProfile:
    """Stationary alert agent against the equilibrium behavioural adversary; ``pi_hat`` defaults to ``eps_hi``."""
    pi_hat = c.eps_hi if pi_hat is None else pi_hat
    if pi_hat == 0:
        raise ValueError("alert agent needs pi_hat != 0")
    if not c.eps_lo < 0 < c.eps_hi:
        raise ValueError("alert-agent comparison uses the behavioural adversary (eps_lo < 0 < eps_hi)")
    tt = stationary_theta_tilde(p, c.lam)
    g = control_gain(tt, p)
    pis, probs = default_support(c)
    return StrategyProfile(
        Regime.BEHAVIORAL_CONTINUUM,
        (AffineAgentRule(-g * (c.lam - 1) / (c.lam * pi_hat), -g / c.lam),),
        (MixtureRule(pis, probs, c.lam),),
        stationary=True,
        variance_ladder="check",
    )
