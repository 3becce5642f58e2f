"""
Certifying equilibria
=====================

Check every stage of an equilibrium for profitable one-shot deviations,
then corrupt it and watch the certificate fail.
"""

from alqg import AdversaryConstraints, certify_profile, solve, table1
from alqg.equilibrium import pure_form_profile
from alqg.verify import one_shot_deviation_check, reachable_beliefs

params = table1(4)
c = AdversaryConstraints(-1.0, 2.0, 2.0)
prof = solve(params, c).profile

beliefs = reachable_beliefs(prof, params, 5, seed=0)
certs = certify_profile(prof, params, c, beliefs)
print(f"{len(certs)} certificates, worst improvement {max(x.improvement for x in certs):.2e}")

# shifting probability mass breaks the zero-mean condition; the agent can now profit
bad = certify_profile(prof.perturbed(prob_shift=0.1), params, c, beliefs)
worst = max(bad, key=lambda x: x.improvement)
print(f"corrupted: stage {worst.stage} {worst.player} gains {worst.improvement:.4f} by {worst.best_deviation}")

# a pure profile cannot survive when the adversary has a choice of coefficients
forced = pure_form_profile(params, c.lam, c.eps_hi)
adv, _ = one_shot_deviation_check(forced, params, c, 1, params.initial_belief)
print(f"pure profile with free bounds: adversary switches to pi={adv.best_deviation[0]:g}, gaining {adv.improvement:.4f}")
