import math

import pytest
from hypothesis import given, strategies as st

from alqg.model import (
    AdversaryAction,
    AdversaryConstraints,
    Belief,
    ModelParams,
    StageParams,
    Trajectory,
    StageRecord,
    AgentAction,
    ValidationError,
    check,
    is_feasible,
    max_variance_action,
    mi_ratio,
    stage_reward,
    step_dynamics,
    table1,
    validate,
    TABLE1_STAGE,
)

P = TABLE1_STAGE
SYM = AdversaryConstraints(-1.0, 1.0, 2.0)


def test_table1_is_valid():
    assert validate(table1(2), SYM).valid


def test_zero_alpha_rejected():
    bad = ModelParams.time_invariant(StageParams(0.0, -1.5, 1.0, 2.0, 1.0), 2, Belief(0, 1))
    report = validate(bad, SYM)
    assert not report.valid
    assert any("alpha must be nonzero" in m for m in report.problems)


def test_lambda_one_rejected():
    report = validate(table1(2), AdversaryConstraints(-1, 1, 1.0))
    assert any("lambda must exceed 1" in m for m in report.problems)


def test_every_violation_reported():
    bad = ModelParams.time_invariant(StageParams(0.0, 0.0, -1.0, 0.0, 0.0), 1, Belief(0, 0))
    report = validate(bad, AdversaryConstraints(1, -1, 0.5))
    assert len(report.problems) >= 7
    with pytest.raises(ValidationError):
        check(bad)


@pytest.mark.parametrize("s,a,z,expected", [(1, 0, 0, -0.5), (0, 1, 0, -1.5), (2, 1, 0.25, -2.25)])
def test_step_dynamics(s, a, z, expected):
    assert step_dynamics(s, a, z, P) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("s,a,expected", [(0, 0, 0), (1, 0, -2), (1, 1, -3)])
def test_stage_reward(s, a, expected):
    assert stage_reward(s, a, P) == expected


def test_mi_ratio_examples():
    b = Belief(0, 1)
    assert mi_ratio(AdversaryAction(1, 1), b) == 2
    assert mi_ratio(AdversaryAction(1, 0), b) == math.inf
    assert mi_ratio(AdversaryAction(2, 4), b) == 2
    with pytest.raises(ValueError):
        mi_ratio(AdversaryAction(0, 0), b)


def test_feasibility_examples():
    b = Belief(0, 1)
    assert is_feasible(AdversaryAction(1, 1), b, SYM)
    assert not is_feasible(AdversaryAction(0, 1), b, SYM)
    assert not is_feasible(AdversaryAction(1, 3), b, SYM)
    assert not is_feasible(AdversaryAction(1.5, 0.1), b, SYM)


@pytest.mark.parametrize("pi,expected", [(1, (1, 1)), (-1, (-1, 1)), (2, (2, 4))])
def test_max_variance_action(pi, expected):
    act = max_variance_action(pi, Belief(0, 1), AdversaryConstraints(-2, 2, 2.0))
    assert (act.pi, act.delta2) == expected


def test_max_variance_rejects_zero():
    with pytest.raises(ValueError):
        max_variance_action(0.0, Belief(0, 1), SYM)


def test_trajectory_total():
    rec = lambda r: StageRecord(0.0, 0.0, 0.0, r, Belief(0, 1), AdversaryAction(1, 1), AgentAction(0, 0))
    assert Trajectory((rec(-1.0), rec(-2.5)), False).total_reward == -3.5


finite = dict(allow_nan=False, allow_infinity=False)


@given(
    pi=st.floats(-5, 5, **finite).filter(lambda x: abs(x) > 1e-3),
    sigma2=st.floats(1e-3, 10, **finite),
    lam=st.floats(1.01, 20, **finite),
    frac=st.floats(1e-3, 1.0, **finite),
)
def test_feasible_actions_meet_ratio(pi, sigma2, lam, frac):
    c = AdversaryConstraints(-5, 5, lam)
    b = Belief(0.0, sigma2)
    sat = max_variance_action(pi, b, c)
    assert mi_ratio(sat, b) == pytest.approx(lam, rel=1e-12)
    assert is_feasible(sat, b, c)
    smaller = AdversaryAction(pi, frac * sat.delta2)
    assert is_feasible(smaller, b, c)
    assert mi_ratio(smaller, b) >= lam * (1 - 1e-12)


# squares of values below ~1e-160 underflow to zero, so keep clear of that range
coord = st.floats(-1e3, 1e3, **finite).filter(lambda x: x == 0 or abs(x) > 1e-100)


@given(s=coord, a=coord)
def test_reward_nonpositive(s, a):
    r = stage_reward(s, a, P)
    assert r <= 0
    assert (r == 0) == (s == 0 and a == 0)
