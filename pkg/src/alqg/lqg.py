"""Classical LQG pieces shared by every solver.

The cost-to-go curvature recursion, the optimal affine control for a known
observation channel and the Bayesian belief update. The array-level helpers
(``posterior_mean``, ``update_moments``) broadcast over numpy arrays and are
what the simulator calls in its inner loop.
"""

from __future__ import annotations

import numpy as np

from .model import AdversaryAction, AgentAction, Belief, ModelParams, StageParams


def riccati_step(theta_next, p: StageParams):
    """One backward step of the scalar LQR curvature recursion."""
    return p.theta + p.phi * p.alpha**2 * theta_next / (p.phi + theta_next * p.beta**2)


def theta_tilde_ladder(params: ModelParams) -> np.ndarray:
    """Backward curvature coefficients ``[t_1, ..., t_N, t_{N+1}=0]``.

    Uses the rearranged form ``theta + phi*alpha^2*t/(phi + beta^2*t)``, which is
    algebraically identical to ``theta + t*alpha^2 - t^2 alpha^2 beta^2/(phi + t beta^2)``
    but has no subtraction.
    """
    n = params.horizon
    out = np.zeros(n + 1)
    for i in range(n - 1, -1, -1):
        out[i] = riccati_step(out[i + 1], params.stages[i])
    return out


def control_gain(theta_next, p: StageParams):
    """``theta_next*alpha*beta / (phi + theta_next*beta^2)``; the LQR feedback is minus this."""
    return theta_next * p.alpha * p.beta / (p.phi + theta_next * p.beta**2)


def lqg_gain(belief: Belief, channel: AdversaryAction, theta_tilde_next: float, p: StageParams) -> AgentAction:
    """Optimal ``(kappa, rho)`` when the channel ``(pi, delta2)`` is known.

    With ``pi = 1, delta2 = 0`` this is the LQR law ``(-gain, 0)``.
    """
    pi, d2 = channel.pi, channel.delta2
    if pi == 0 and d2 == 0:
        raise ValueError("channel carries no signal and no noise (pi = delta2 = 0)")
    g = control_gain(theta_tilde_next, p)
    if d2 == 0:
        # noiseless report; pi^2 sigma2 may underflow for tiny pi
        return AgentAction(-g / pi, 0.0)
    denom = pi * pi * belief.sigma2 + d2
    return AgentAction(-g * pi * belief.sigma2 / denom, -g * belief.mu * d2 / denom)


def posterior_mean(mu, sigma2, pi, delta2, s_hat):
    # innovation form mu + k*(s_hat - pi*mu); equal to the convex combination
    # (pi*sigma2*s_hat + mu*delta2)/(pi^2 sigma2 + delta2) without cancellation
    k = _kalman_gain(sigma2, pi, delta2)
    return mu + k * (s_hat - pi * mu)


def _kalman_gain(sigma2, pi, delta2):
    # a noiseless report gives k = 1/pi exactly, even when pi^2 sigma2 underflows
    sigma2, pi, delta2 = np.asarray(sigma2, float), np.asarray(pi, float), np.asarray(delta2, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = pi * sigma2 / (pi * pi * sigma2 + delta2)
        return np.where(delta2 == 0, 1.0 / pi, k) if np.any(delta2 == 0) else k


def _residual_var(sigma2, pi, delta2):
    sigma2, pi, delta2 = np.asarray(sigma2, float), np.asarray(pi, float), np.asarray(delta2, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = sigma2 * delta2 / (pi * pi * sigma2 + delta2)
        return np.where(delta2 == 0, 0.0, r) if np.any(delta2 == 0) else r


def posterior_after_obs(belief: Belief, channel: AdversaryAction, s_hat: float) -> float:
    if channel.pi == 0 and channel.delta2 == 0:
        raise ValueError("channel carries no signal and no noise (pi = delta2 = 0)")
    return float(posterior_mean(belief.mu, belief.sigma2, channel.pi, channel.delta2, s_hat))


def update_moments(mu, sigma2, pi, delta2, s_hat, a, p: StageParams):
    """Next-stage ``(mu, sigma2)``; broadcasts over arrays."""
    m = posterior_mean(mu, sigma2, pi, delta2, s_hat)
    s2 = p.alpha**2 * _residual_var(sigma2, pi, delta2) + p.omega2
    return p.alpha * m + p.beta * a, s2


def belief_update(belief: Belief, channel: AdversaryAction, s_hat: float, a: float, p: StageParams) -> Belief:
    if channel.pi == 0 and channel.delta2 == 0:
        raise ValueError("channel carries no signal and no noise (pi = delta2 = 0)")
    mu, s2 = update_moments(belief.mu, belief.sigma2, channel.pi, channel.delta2, s_hat, a, p)
    return Belief(float(mu), float(s2))
