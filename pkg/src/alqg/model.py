"""Primitives of the adversarial LQG game.

Scalar state dynamics ``s' = alpha*s + beta*a + z``, quadratic stage rewards,
the Gaussian belief held by both players, and the feasible set of
observation manipulations ``s_hat = pi*s + c`` with ``c ~ N(0, delta2)``.

Types here are plain immutable values. They do not validate on construction;
call :func:`validate` (or :func:`check`) so that every violated invariant can
be reported at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# relative slack when testing the mutual-information bound, so that actions
# built to saturate it are not rejected by rounding
MI_RTOL = 1e-12

DEFAULT_DIVERGENCE_THRESHOLD = 1e9


class ValidationError(ValueError):
    """Raised when model parameters or constraints violate an invariant."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class StageParams:
    """Coefficients of one stage: dynamics, process noise and reward weights."""

    alpha: float
    beta: float
    omega2: float
    theta: float
    phi: float

    def problems(self) -> list[str]:
        out = []
        if not _finite(self.alpha, self.beta, self.omega2, self.theta, self.phi):
            out.append("stage coefficients must be finite")
        if self.alpha == 0:
            out.append("alpha must be nonzero")
        if self.beta == 0:
            out.append("beta must be nonzero")
        if not self.omega2 > 0:
            out.append("omega2 must be positive")
        if not self.theta > 0:
            out.append("theta must be positive")
        if not self.phi > 0:
            out.append("phi must be positive")
        return out


@dataclass(frozen=True)
class Belief:
    """Gaussian belief N(mu, sigma2) about the current state."""

    mu: float
    sigma2: float


@dataclass(frozen=True)
class ModelParams:
    stages: tuple[StageParams, ...]
    initial_belief: Belief = field(default_factory=lambda: Belief(0.0, 1.0))

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))

    @classmethod
    def time_invariant(cls, stage: StageParams, horizon: int, initial_belief: Belief | None = None):
        if initial_belief is None:
            initial_belief = Belief(0.0, 1.0)
        return cls(stages=(stage,) * int(horizon), initial_belief=initial_belief)

    @property
    def horizon(self) -> int:
        return len(self.stages)

    @property
    def is_time_invariant(self) -> bool:
        return len(set(self.stages)) <= 1

    def stage(self, i: int) -> StageParams:
        """Parameters of stage ``i`` (1-based, as in the game's stage numbering)."""
        if not 1 <= i <= self.horizon:
            raise IndexError(f"stage {i} outside 1..{self.horizon}")
        return self.stages[i - 1]

    @property
    def omega2(self) -> np.ndarray:
        return np.array([p.omega2 for p in self.stages])

    def with_horizon(self, horizon: int) -> "ModelParams":
        if not self.is_time_invariant:
            raise ValueError("only time-invariant models can be re-horizoned")
        return ModelParams.time_invariant(self.stages[0], horizon, self.initial_belief)


@dataclass(frozen=True)
class AdversaryConstraints:
    """Bounds ``eps_lo <= pi <= eps_hi`` and the mutual-information ratio ``lam``."""

    eps_lo: float
    eps_hi: float
    lam: float

    def problems(self) -> list[str]:
        out = []
        if not _finite(self.eps_lo, self.eps_hi, self.lam):
            out.append("adversary bounds must be finite")
        if self.eps_lo > self.eps_hi:
            out.append("eps_lo must not exceed eps_hi")
        if not self.lam > 1:
            out.append("lambda must exceed 1")
        return out


@dataclass(frozen=True)
class AdversaryAction:
    pi: float
    delta2: float


@dataclass(frozen=True)
class AgentAction:
    kappa: float
    rho: float


@dataclass(frozen=True)
class StageRecord:
    s: float
    s_hat: float
    a: float
    r: float
    belief: Belief
    adversary: AdversaryAction
    agent: AgentAction


@dataclass(frozen=True)
class Trajectory:
    records: tuple[StageRecord, ...]
    diverged: bool = False

    @property
    def total_reward(self) -> float:
        if self.diverged:
            return math.nan
        return math.fsum(rec.r for rec in self.records)


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.valid

    def raise_if_invalid(self) -> None:
        if self.problems:
            raise ValidationError(self.problems)


def _finite(*xs) -> bool:
    return all(math.isfinite(x) for x in xs)


def validate(params: ModelParams, constraints: AdversaryConstraints | None = None) -> ValidationReport:
    problems = []
    if params.horizon < 1:
        problems.append("horizon must be at least 1")
    for i, p in enumerate(params.stages, start=1):
        problems.extend(f"stage {i}: {msg}" for msg in p.problems())
    b = params.initial_belief
    if not _finite(b.mu, b.sigma2):
        problems.append("initial belief must be finite")
    if not b.sigma2 > 0:
        problems.append("initial belief variance sigma1_sq must be positive")
    if constraints is not None:
        problems.extend(constraints.problems())
    return ValidationReport(tuple(problems))


def check(params: ModelParams, constraints: AdversaryConstraints | None = None) -> None:
    validate(params, constraints).raise_if_invalid()


def step_dynamics(s, a, z, p: StageParams):
    return p.alpha * s + p.beta * a + z


def stage_reward(s, a, p: StageParams):
    return -p.theta * s * s - p.phi * a * a


def mi_ratio(action: AdversaryAction, belief: Belief) -> float:
    """Ratio ``(pi^2 sigma2 + delta2) / delta2``; the mutual information is half its log."""
    pi, d2 = action.pi, action.delta2
    if d2 == 0:
        if pi == 0:
            raise ValueError("mutual information undefined for pi = 0 and delta2 = 0")
        return math.inf
    return 1.0 + pi * pi * belief.sigma2 / d2


def is_feasible(action: AdversaryAction, belief: Belief, c: AdversaryConstraints) -> bool:
    pi, d2 = action.pi, action.delta2
    if pi == 0 or not c.eps_lo <= pi <= c.eps_hi or d2 < 0:
        return False
    return mi_ratio(action, belief) >= c.lam * (1 - MI_RTOL)


def saturating_delta2(pi, sigma2, lam):
    """Largest feasible manipulation variance for coefficient ``pi``."""
    return pi * pi * sigma2 / (lam - 1.0)


def max_variance_action(pi: float, belief: Belief, c: AdversaryConstraints) -> AdversaryAction:
    if pi == 0:
        raise ValueError("pi = 0 is never feasible")
    if not c.eps_lo <= pi <= c.eps_hi:
        raise ValueError(f"pi = {pi} outside [{c.eps_lo}, {c.eps_hi}]")
    return AdversaryAction(pi, saturating_delta2(pi, belief.sigma2, c.lam))


# Default parameters of the numerical study.
TABLE1_STAGE = StageParams(alpha=-0.5, beta=-1.5, omega2=1.0, theta=2.0, phi=1.0)
TABLE1_BELIEF = Belief(0.0, 1.0)


def table1(horizon: int = 2) -> ModelParams:
    return ModelParams.time_invariant(TABLE1_STAGE, horizon, TABLE1_BELIEF)
