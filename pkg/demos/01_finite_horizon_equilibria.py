"""
Finite-horizon equilibria
=========================

Solve the default two-stage game under three kinds of bounds on the
manipulation coefficient and compare the closed-form values with rollouts.
"""

from alqg import AdversaryConstraints, SimConfig, monte_carlo_value, solve, table1

params = table1(horizon=2)

# a fixed coefficient gives a pure equilibrium, bounds of opposite sign a
# babbling one, and same-sign bounds the two-stage mixed equilibrium
cases = {
    "pure (eps_lo = eps_hi = 1)": AdversaryConstraints(1.0, 1.0, 2.0),
    "behavioural (-1 <= pi <= 1)": AdversaryConstraints(-1.0, 1.0, 2.0),
    "two-stage (1 <= pi <= 2)": AdversaryConstraints(1.0, 2.0, 2.0),
}

for name, c in cases.items():
    report = solve(params, c)
    act = report.profile.agent_action(1, params.initial_belief)
    mix = report.profile.adversary_strategy(1, params.initial_belief)
    sim = monte_carlo_value(report.profile, params, SimConfig(rollouts=100_000, seed=1))
    print(name)
    print(f"  regime            {report.regime.value}")
    print(f"  agent gain        kappa={act.kappa + 0.0:+.6f} rho={act.rho + 0.0:+.6f}")
    print("  adversary         " + ", ".join(f"pi={a.pi:g} w.p. {p:.3f}" for a, p in zip(mix.actions, mix.probs)))
    print(f"  closed-form value {report.value:.6f}")
    print(f"  Monte Carlo       {sim.mean_total_reward:.4f} +/- {sim.stderr:.4f}")

# one bound at zero: no equilibrium exists and the solver says so
print(solve(params, AdversaryConstraints(0.0, 1.0, 2.0)).message)
