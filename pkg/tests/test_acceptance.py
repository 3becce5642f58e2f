"""One test per acceptance criterion; each records a PASS/FAIL line shown in the pytest summary."""

import io
import time
from fractions import Fraction

import numpy as np
import pytest

from alqg.cli import main, read_csv
from alqg.equilibrium import (
    Regime,
    RegimeError,
    classify_regime,
    coefficient_ladder,
    pure_form_profile,
    solve,
    solve_pure_spe,
    two_stage_mixture,
)
from alqg.model import TABLE1_STAGE, AdversaryConstraints, Belief, ModelParams, table1
from alqg.sim import SimConfig, monte_carlo_value
from alqg.stationary import fixed_point_oracle, kleene_iterate, map_J, map_L, stationary_profile
from alqg.verify import certify_profile, one_shot_deviation_check, q_two_stage, reachable_beliefs

from conftest import ACCEPTANCE_LINES, random_constraints, random_params, random_stage

C = AdversaryConstraints


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_criterion_1_closed_form_ladder():
    a2, b2, th, ph, lam = Fraction(1, 4), Fraction(9, 4), Fraction(2), Fraction(1), Fraction(2)
    t2 = h2 = k2 = th
    t1 = th + t2 * a2 - t2**2 * a2 * b2 / (ph + t2 * b2)
    h1 = th + h2 * a2 - (t2**2 * a2 * b2 / (ph + t2 * b2) + (h2 - t2) * a2) * (lam - 1) / lam
    k1 = th + k2 * a2 - (k2 - t2) * a2 * (lam - 1) / lam
    params = table1(2)
    timings = []
    for _ in range(20):
        start = time.perf_counter()
        lad = coefficient_ladder(params, 2.0)
        timings.append(time.perf_counter() - start)
    errs = [abs(lad.theta_tilde[0] - float(t1)), abs(lad.theta_hat[0] - float(h1)), abs(lad.theta_check[0] - float(k1))]
    fast = min(timings) < 1e-3
    record(
        1,
        max(errs) <= 1e-9 and fast,
        f"theta_tilde1={lad.theta_tilde[0]:.6f} theta_hat1={lad.theta_hat[0]:.6f} theta_check1={lad.theta_check[0]:.6f} "
        f"max err {max(errs):.1e}, runtime {min(timings) * 1e6:.0f} us",
    )


def test_criterion_2_fixed_point_oracle():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst, monotone, count = 0.0, True, 0
    for _ in range(60):
        p = random_stage(rng)
        lam = max(1.0, p.alpha**2) + rng.uniform(0.05, 8)
        roots = np.roots([p.beta**2, -(p.theta * p.beta**2 + p.phi * p.alpha**2 - p.phi), -p.theta * p.phi])
        x = float(max(roots.real))
        for mapping in (map_L, map_J):
            res = kleene_iterate(mapping, p, lam, trace=True)
            worst = max(worst, abs(res.theta_tilde - x))
            monotone &= bool(np.all(np.diff(res.trace, axis=0) >= 0)) and res.converged
        count += 1
    elapsed = time.perf_counter() - start
    record(2, worst <= 1e-8 and monotone and elapsed < 1.0, f"{count} parameter sets, max |theta_tilde - root| {worst:.1e}, monotone={monotone}, {elapsed:.2f} s")


def mc_agreement(kind: str, horizons, sets: int, seed0: int):
    rng = np.random.default_rng({"pure": 31, "behavioral": 32, "two_stage": 33}[kind])
    failures, total, worst_z = [], 0, 0.0
    for n in horizons:
        for k in range(sets):
            params = random_params(rng, n)
            c = random_constraints(rng, kind)
            rep = solve(params, c)
            res = monte_carlo_value(rep.profile, params, SimConfig(rollouts=100_000, seed=seed0 + 100 * n + k))
            z = abs(res.mean_total_reward - rep.value) / res.stderr
            worst_z = max(worst_z, z)
            total += 1
            if z > 3:
                failures.append((n, k, round(z, 2)))
    return failures, total, worst_z


def test_criterion_3_values_vs_monte_carlo():
    lines, ok = [], True
    for kind, horizons in (("pure", (2, 3, 5)), ("behavioral", (2, 3, 5)), ("two_stage", (2,))):
        start = time.perf_counter()
        failures, total, worst = mc_agreement(kind, horizons, 10, seed0=7000)
        elapsed = time.perf_counter() - start
        ok &= not failures and elapsed < 60
        lines.append(f"{kind}: {total - len(failures)}/{total} within 3 se (max z {worst:.2f}, {elapsed:.1f} s)")
        if failures:
            lines.append(f"{kind} outside: {failures}")
    record(3, ok, "; ".join(lines))


def test_criterion_4_certification():
    start = time.perf_counter()
    results = {}
    for name, c, params in (
        ("pure", C(1, 1, 2.0), table1(4)),
        ("behavioral", C(-1, 2, 2.0), table1(4)),
        ("two-stage", C(1, 2, 2.0), table1(2)),
    ):
        prof = solve(params, c).profile
        beliefs = reachable_beliefs(prof, params, 10, seed=0)
        beliefs[0] = [params.initial_belief] + beliefs[0]
        certs = certify_profile(prof, params, c, beliefs)
        results[name] = all(x.certified for x in certs) and max(x.improvement for x in certs) <= 1e-8
        for label, kw in (("kappa x1.1", dict(kappa_scale=1.1)), ("prob +0.1", dict(prob_shift=0.1))):
            if name == "pure" and "prob" in label:
                continue
            if name == "behavioral" and "kappa" in label:
                # the babbling gain is zero, so scaling it changes nothing
                continue
            bad = certify_profile(prof.perturbed(**kw), params, c, beliefs)
            results[f"{name} {label} falsified"] = not all(x.certified for x in bad)
    elapsed = time.perf_counter() - start
    ok = all(results.values()) and elapsed < 10
    record(4, ok, ", ".join(f"{k}={'ok' if v else 'NO'}" for k, v in results.items()) + f", {elapsed:.2f} s")


def test_criterion_5_nonexistence():
    start = time.perf_counter()
    params = table1(3)
    improvements = []
    for c in (C(-1, 1, 2.0), C(-0.5, 2, 1.5), C(1, 2, 2.0), C(-2, -1, 3.0), C(0, 1, 2.0), C(-1, 0, 2.0)):
        pi = c.eps_hi if c.eps_hi != 0 else c.eps_lo
        prof = pure_form_profile(params, c.lam, pi)
        adv, _ = one_shot_deviation_check(prof, params, c, 1, Belief(0.3, 1.0))
        improvements.append(adv.improvement)
    refused = True
    for c in (C(0, 1, 2.0), C(-1, 0, 2.0)):
        refused &= classify_regime(c, 3) is Regime.NO_SPE and solve(params, c).profile is None
        try:
            solve_pure_spe(params, c)
            refused = False
        except RegimeError:
            pass
    elapsed = time.perf_counter() - start
    ok = min(improvements) > 0 and refused and elapsed < 10
    record(5, ok, f"min adversary improvement {min(improvements):.3g} over {len(improvements)} regimes, NoSPE refused={refused}, {elapsed:.2f} s")


def test_criterion_6_indifference():
    rng = np.random.default_rng(6)
    worst, exact = 0.0, True
    for _ in range(25):
        params = random_params(rng, 2)
        c = random_constraints(rng, "two_stage")
        b = Belief(rng.normal(), rng.uniform(0.2, 2.5))
        prof = solve(params, c, b).profile
        act = prof.agent_action(1, b)
        q_lo = q_two_stage(b, params, c.lam, act.kappa, act.rho, pi=c.eps_lo)
        q_hi = q_two_stage(b, params, c.lam, act.kappa, act.rho, pi=c.eps_hi)
        worst = max(worst, abs(q_lo - q_hi))
        exact &= two_stage_mixture(c).probs[0] == c.eps_hi / (c.eps_lo + c.eps_hi)
    table = two_stage_mixture(C(1, 2, 2.0)).probs[0] == 2 / 3
    record(6, worst <= 1e-9 and exact and table, f"25 same-sign pairs, max |Q(eps_lo) - Q(eps_hi)| {worst:.1e}, p* exact={exact and table}")


def test_criterion_7_steady_state():
    start = time.perf_counter()
    parts, ok = [], True
    params = ModelParams.time_invariant(TABLE1_STAGE, 200, Belief(0.0, 1.0))
    seed = 77
    for lam in (1.5, 2.0):
        _, hat, chk = fixed_point_oracle(TABLE1_STAGE, lam)
        for name, c, target in (("pure", C(1, 1, lam), -hat), ("behavioral", C(-1, 1, lam), -chk)):
            seed += 1
            res = monte_carlo_value(stationary_profile(TABLE1_STAGE, c), params, SimConfig(20_000, seed=seed, burn_in=100))
            z = abs(res.tail_mean - target) / res.tail_stderr
            ok &= z <= 3 and res.diverged_count == 0
            parts.append(f"{name} lam={lam}: {res.tail_mean:.4f} vs {target:.4f} (z {z:.2f})")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    record(7, ok, "; ".join(parts) + f", {elapsed:.1f} s")


@pytest.fixture(scope="module")
def figure_csvs(tmp_path_factory):
    d = tmp_path_factory.mktemp("figs")
    start = time.perf_counter()
    out = {}
    for fig in (3, 4, 5):
        path = d / f"fig{fig}.csv"
        code, _ = run_cli("reproduce", "--fig", str(fig), "--out", str(path))
        assert code == 0
        out[fig] = path
    return out, time.perf_counter() - start


def test_criterion_8_figure_trends(figure_csvs):
    paths, elapsed = figure_csvs
    _, f3 = read_csv(paths[3].read_text())
    pure = np.array([r["avg_reward_pure"] for r in f3])
    beh = np.array([r["avg_reward_behavioral"] for r in f3])
    fig3 = bool(np.all(np.diff(pure) >= 0) and np.all(np.diff(beh) >= 0) and np.all(beh <= pure))

    _, f4 = read_csv(paths[4].read_text())
    fig4 = True
    for lam in (1.5, 2.0):
        block = np.array([[r["theta_tilde_L"], r["theta_hat_L"], r["theta_tilde_J"], r["theta_check_J"]] for r in f4 if r["lambda"] == lam])
        fig4 &= bool(np.all(np.diff(block, axis=0) >= 0) and np.max(np.abs(block[-1] - block[-2])) < 1e-8)

    _, f5 = read_csv(paths[5].read_text())
    below, checked = True, 0
    for r in f5:
        below &= r["reward_alert_mean"] <= r["reward_spe"] + 3 * r["reward_alert_stderr"]
        if r["naive_diverged"] < 1 and np.isfinite(r["reward_naive_mean"]):
            below &= r["reward_naive_mean"] <= r["reward_spe"] + 3 * r["reward_naive_stderr"]
            checked += 1
    diverges = any(r["naive_diverged"] > 0 for r in f5 if r["eps"] == max(x["eps"] for x in f5))
    ok = fig3 and fig4 and below and diverges and checked > 0 and elapsed < 300
    record(8, ok, f"fig3 trends={fig3}, fig4 monotone+converged={fig4}, fig5 baselines below SPE={below} ({checked} naive rows), naive divergence flagged={diverges}, {elapsed:.1f} s")


def test_criterion_9_determinism(figure_csvs, tmp_path):
    paths, _ = figure_csvs
    same = True
    for fig in (3, 4, 5):
        again = tmp_path / f"again{fig}.csv"
        assert run_cli("reproduce", "--fig", str(fig), "--out", str(again))[0] == 0
        same &= again.read_bytes() == paths[fig].read_bytes()
    sims = []
    for _ in range(2):
        p = tmp_path / f"sim{len(sims)}.csv"
        assert run_cli("simulate", "--eps-lo", "-1", "--eps-hi", "2", "--horizon", "20", "--rollouts", "5000", "--seed", "123", "--out", str(p))[0] == 0
        sims.append(p.read_bytes())
    same &= sims[0] == sims[1]
    record(9, same, "fig3/fig4/fig5 and simulate outputs byte-identical across repeated runs with the same seed")
