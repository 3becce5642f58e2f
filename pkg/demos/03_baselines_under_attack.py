"""
Naive and alert agents under attack
===================================

Compare the strategic agent with an attack-unaware LQR agent and with an
agent that expects a fixed manipulation coefficient.
"""

from alqg import AdversaryConstraints, Belief, ModelParams, SimConfig, monte_carlo_value
from alqg.baselines import alert_profile, naive_profile
from alqg.model import TABLE1_STAGE
from alqg.stationary import asymptotic_avg_reward

p = TABLE1_STAGE
params = ModelParams.time_invariant(p, 200, Belief(0.0, 1.0))
cfg = SimConfig(rollouts=2000, seed=5, burn_in=100)

for eps in (0.5, 1.0, 1.5, 2.0):
    c = AdversaryConstraints(-eps, eps, 2.0)
    naive = monte_carlo_value(naive_profile(p, c), params, cfg)
    alert = monte_carlo_value(alert_profile(p, c), params, cfg)
    spe = asymptotic_avg_reward("behavioral", p, 2.0)
    naive_txt = "unstable" if naive.diverged_count else f"{naive.tail_mean:8.3f}"
    print(f"eps={eps:3.1f}  SPE {spe:7.3f}  alert {alert.tail_mean:7.3f}  naive {naive_txt}"
          f"  ({naive.diverged_count} of {naive.rollouts} naive rollouts diverged)")

# the naive loop multiplies the state by alpha - beta*kappa*eps each stage;
# past |.| = 1 the closed loop is unstable and no average reward exists
