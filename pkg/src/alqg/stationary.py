"""Stationary analysis of the time-invariant game.

The coefficient recursions of the finite-horizon equilibria become the
order-preserving maps ``L`` (pure) and ``J`` (behavioural) on the nonnegative
quadrant. Iterating them from ``(0, 0)`` climbs monotonically to their least
fixed point when ``lam > alpha^2``, and the fixed point gives stationary
strategies and the steady-state reward per stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .equilibrium import (
    MixtureRule,
    Regime,
    StrategyProfile,
    babbling_agent_rule,
    default_support,
    pure_agent_rule,
)
from .model import AdversaryConstraints, StageParams, ValidationError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10**6
DIVERGENCE_BOUND = 1e12


class StationarityError(ValueError):
    """Raised when ``lam <= alpha^2`` or the bounds admit no stationary equilibrium."""


def map_L(x: float, y: float, p: StageParams, lam: float) -> tuple[float, float]:
    lqr = p.phi * p.alpha**2 * x / (p.phi + p.beta**2 * x)
    return p.theta + lqr, p.theta + lqr * (lam - 1) / lam + p.alpha**2 * y / lam


def map_J(x: float, y: float, p: StageParams, lam: float) -> tuple[float, float]:
    lqr = p.phi * p.alpha**2 * x / (p.phi + p.beta**2 * x)
    return p.theta + lqr, p.theta + p.alpha**2 * x * (lam - 1) / lam + p.alpha**2 * y / lam


@dataclass(frozen=True)
class FixedPointResult:
    theta_tilde: float
    theta_companion: float
    iterations: int
    converged: bool
    trace: np.ndarray | None = None


def kleene_iterate(
    mapping: Callable,
    p: StageParams,
    lam: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: bool = False,
) -> FixedPointResult:
    """Iterate ``mapping`` from ``(0, 0)`` until the sup-norm step is at most ``tol``.

    Non-convergence is reported in the result (``converged=False``), either
    when a component exceeds ``DIVERGENCE_BOUND`` or when ``max_iter`` runs out.
    With ``trace=True`` the iterates ``(x_n, y_n)`` for ``n = 0, 1, ...`` are kept.
    """
    x, y = 0.0, 0.0
    hist = [(x, y)] if trace else None
    for n in range(1, max_iter + 1):
        nx, ny = mapping(x, y, p, lam)
        if trace:
            hist.append((nx, ny))
        step = max(abs(nx - x), abs(ny - y))
        x, y = nx, ny
        if step <= tol:
            return FixedPointResult(x, y, n, True, np.array(hist) if trace else None)
        if x > DIVERGENCE_BOUND or y > DIVERGENCE_BOUND or not (math.isfinite(x) and math.isfinite(y)):
            break
    return FixedPointResult(x, y, n, False, np.array(hist) if trace else None)


def iterate_n(mapping: Callable, p: StageParams, lam: float, n: int) -> np.ndarray:
    """The first ``n`` iterates from ``(0, 0)``, shape ``(n+1, 2)`` including the start."""
    out = np.zeros((n + 1, 2))
    for k in range(n):
        out[k + 1] = mapping(out[k, 0], out[k, 1], p, lam)
    return out


def riccati_root(p: StageParams) -> float:
    """Positive root of ``beta^2 x^2 - (theta beta^2 + phi alpha^2 - phi) x - theta phi = 0``.

    This is the stationary curvature solved directly, kept as a cross-check
    on the iteration rather than as the main path.
    """
    a = p.beta**2
    b = p.theta * p.beta**2 + p.phi * p.alpha**2 - p.phi
    c = p.theta * p.phi
    disc = math.sqrt(b * b + 4 * a * c)
    if b >= 0:
        return (b + disc) / (2 * a)
    return 2 * c / (disc - b)


def fixed_point_oracle(p: StageParams, lam: float) -> tuple[float, float, float]:
    """``(theta_tilde, theta_hat, theta_check)`` from the fixed-point equations in closed form."""
    if not lam > p.alpha**2:
        raise StationarityError(f"need lambda > alpha^2, got lambda={lam}, alpha^2={p.alpha**2}")
    x = riccati_root(p)
    contraction = 1 - p.alpha**2 / lam
    hat = (p.theta + (x - p.theta) * (lam - 1) / lam) / contraction
    chk = (p.theta + p.alpha**2 * x * (lam - 1) / lam) / contraction
    return x, hat, chk


def _require_stable(p: StageParams, c: AdversaryConstraints) -> None:
    problems = [f"stage: {m}" for m in p.problems()] + c.problems()
    if problems:
        raise ValidationError(problems)
    if not c.lam > p.alpha**2:
        raise StationarityError(f"stationary equilibrium requires lambda > alpha^2 ({c.lam} <= {p.alpha**2})")


def _fixed_point(mapping, p: StageParams, lam: float) -> FixedPointResult:
    res = kleene_iterate(mapping, p, lam)
    if not res.converged:
        raise StationarityError(f"fixed-point iteration did not converge after {res.iterations} steps")
    return res


def stationary_pure_profile(p: StageParams, c: AdversaryConstraints) -> StrategyProfile:
    _require_stable(p, c)
    if not (c.eps_lo == c.eps_hi != 0):
        raise StationarityError("stationary pure equilibrium requires eps_lo = eps_hi != 0")
    theta_tilde = _fixed_point(map_L, p, c.lam).theta_tilde
    return StrategyProfile(
        Regime.PURE_UNIQUE,
        (pure_agent_rule(theta_tilde, p, c.lam, c.eps_hi),),
        (MixtureRule((c.eps_hi,), (1.0,), c.lam),),
        stationary=True,
        variance_ladder="hat",
    )


def stationary_behavioral_profile(p: StageParams, c: AdversaryConstraints) -> StrategyProfile:
    _require_stable(p, c)
    if not c.eps_lo < 0 < c.eps_hi:
        raise StationarityError("stationary behavioural equilibrium requires eps_lo < 0 < eps_hi")
    theta_tilde = _fixed_point(map_J, p, c.lam).theta_tilde
    pis, probs = default_support(c)
    return StrategyProfile(
        Regime.BEHAVIORAL_CONTINUUM,
        (babbling_agent_rule(theta_tilde, p),),
        (MixtureRule(pis, probs, c.lam),),
        stationary=True,
        variance_ladder="check",
    )


def stationary_profile(p: StageParams, c: AdversaryConstraints) -> StrategyProfile:
    if c.eps_lo == c.eps_hi:
        return stationary_pure_profile(p, c)
    return stationary_behavioral_profile(p, c)


def asymptotic_avg_reward(regime: str, p: StageParams, lam: float) -> float:
    """Steady-state expected reward per stage, ``-theta_hat*omega2`` or ``-theta_check*omega2``."""
    if not lam > p.alpha**2:
        raise StationarityError(f"need lambda > alpha^2, got lambda={lam}, alpha^2={p.alpha**2}")
    if regime == "pure":
        return -_fixed_point(map_L, p, lam).theta_companion * p.omega2
    if regime == "behavioral":
        return -_fixed_point(map_J, p, lam).theta_companion * p.omega2
    raise ValueError(f"unknown regime {regime!r}; expected 'pure' or 'behavioral'")
