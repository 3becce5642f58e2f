"""
Stationary rewards and the information bound
============================================

Iterate the coefficient maps from the origin, then trace the steady-state
reward per stage as the mutual-information bound tightens.
"""

import numpy as np

from alqg import kleene_iterate, map_J, map_L
from alqg.model import TABLE1_STAGE
from alqg.stationary import asymptotic_avg_reward, iterate_n

p = TABLE1_STAGE

# the iterates climb monotonically to the least fixed point
for lam in (1.5, 2.0):
    it = iterate_n(map_L, p, lam, 8)
    print(f"lambda={lam}: first L iterates", np.round(it[:, 1], 4))
    res_l, res_j = kleene_iterate(map_L, p, lam), kleene_iterate(map_J, p, lam)
    print(f"  fixed points after {res_l.iterations}/{res_j.iterations} steps:"
          f" theta_tilde={res_l.theta_tilde:.5f} theta_hat={res_l.theta_companion:.5f} theta_check={res_j.theta_companion:.5f}")

# larger lambda leaves the adversary less room, so both rewards rise;
# randomising costs the agent more than a known fixed coefficient
print("\nlambda   pure      behavioural")
for lam in np.linspace(1.1, 10, 10):
    print(f"{lam:5.2f}  {asymptotic_avg_reward('pure', p, lam):.5f}  {asymptotic_avg_reward('behavioral', p, lam):.5f}")
