import pytest

from alqg.baselines import (
    alert_agent_rule,
    alert_profile,
    naive_agent_rule,
    naive_attack_pi,
    naive_finite_profile,
    naive_profile,
    optimal_attack_on_naive,
    stationary_theta_tilde,
)
from alqg.model import TABLE1_STAGE, AdversaryConstraints, Belief, mi_ratio, table1
from alqg.stationary import stationary_pure_profile

P = TABLE1_STAGE


def test_naive_rule():
    tt = stationary_theta_tilde(P)
    act = naive_agent_rule(Belief(0.8, 1), tt, P)
    assert act.kappa == pytest.approx(-0.27492, abs=1e-5)
    assert act.rho == 0
    assert naive_agent_rule(Belief(1, 1), 0.0, P).kappa == 0


@pytest.mark.parametrize("eps,expected", [(1, (-1, 1)), (2, (-2, 4))])
def test_attack_on_naive(eps, expected):
    c = AdversaryConstraints(-eps, eps, 2.0)
    act = optimal_attack_on_naive(Belief(0, 1), c)
    assert (act.pi, act.delta2) == expected
    assert mi_ratio(act, Belief(0, 1)) == pytest.approx(2.0)


def test_attack_needs_negative_coefficient():
    with pytest.raises(ValueError):
        naive_attack_pi(AdversaryConstraints(0.5, 1.0, 2.0))


def test_alert_rule():
    tt = stationary_theta_tilde(P)
    act = alert_agent_rule(Belief(0, 1), 1.0, tt, P, 2.0)
    assert act.kappa == pytest.approx(-0.13746, abs=1e-5)
    assert act.rho == 0
    spe = stationary_pure_profile(P, AdversaryConstraints(1.5, 1.5, 3.0)).agent_action(1, Belief(0.4, 1))
    alert = alert_agent_rule(Belief(0.4, 1), 1.5, tt, P, 3.0)
    assert (alert.kappa, alert.rho) == pytest.approx((spe.kappa, spe.rho), rel=1e-12)
    far = alert_agent_rule(Belief(0.4, 1), 1.0, tt, P, 1e12)
    g = tt * P.alpha * P.beta / (P.phi + tt * P.beta**2)
    assert far.kappa == pytest.approx(-g, rel=1e-9)
    assert far.rho == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        alert_agent_rule(Belief(0, 1), 0.0, tt, P, 2.0)


def test_profiles_build():
    c = AdversaryConstraints(-1, 1, 2.0)
    assert naive_profile(P, c).stationary
    assert alert_profile(P, c).variance_ladder == "check"
    fin = naive_finite_profile(table1(3), c)
    assert fin.horizon == 3
    assert fin.agent_action(3, Belief(0, 1)).kappa == 0
