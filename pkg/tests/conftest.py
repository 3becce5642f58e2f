import numpy as np
import pytest

from alqg.model import AdversaryConstraints, Belief, ModelParams, StageParams


def random_stage(rng: np.random.Generator) -> StageParams:
    sign = lambda: rng.choice([-1.0, 1.0])
    return StageParams(
        alpha=sign() * rng.uniform(0.2, 1.3),
        beta=sign() * rng.uniform(0.3, 2.0),
        omega2=rng.uniform(0.2, 2.0),
        theta=rng.uniform(0.5, 3.0),
        phi=rng.uniform(0.5, 3.0),
    )


def random_params(rng: np.random.Generator, horizon: int, time_invariant: bool = False) -> ModelParams:
    belief = Belief(rng.uniform(-1.0, 1.0), rng.uniform(0.3, 2.0))
    if time_invariant:
        return ModelParams.time_invariant(random_stage(rng), horizon, belief)
    return ModelParams(tuple(random_stage(rng) for _ in range(horizon)), belief)


def random_constraints(rng: np.random.Generator, kind: str) -> AdversaryConstraints:
    lam = rng.uniform(1.2, 5.0)
    if kind == "pure":
        eps = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 2.0)
        return AdversaryConstraints(eps, eps, lam)
    if kind == "behavioral":
        return AdversaryConstraints(-rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), lam)
    if kind == "two_stage":
        lo, hi = sorted(rng.uniform(0.3, 2.5, size=2))
        if rng.random() < 0.5:
            lo, hi = -hi, -lo
        return AdversaryConstraints(float(lo), float(hi), lam)
    raise ValueError(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
