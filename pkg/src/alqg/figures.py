"""Row builders for the numerical study: stationary rewards, fixed-point iterates, baseline comparison."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .baselines import alert_profile, naive_profile
from .model import AdversaryConstraints, ModelParams, StageParams
from .sim import SimConfig, sweep
from .stationary import asymptotic_avg_reward, iterate_n, map_J, map_L

FIG3_COLUMNS = ("lambda", "avg_reward_pure", "avg_reward_behavioral")
FIG4_COLUMNS = ("n", "theta_tilde_L", "theta_hat_L", "theta_tilde_J", "theta_check_J", "lambda")
FIG5_COLUMNS = (
    "lambda",
    "eps",
    "reward_spe",
    "reward_naive_mean",
    "reward_naive_stderr",
    "reward_alert_mean",
    "reward_alert_stderr",
    "naive_diverged",
)

FIG3_LAMBDAS = tuple(np.linspace(1.1, 10.0, 50))
FIG4_LAMBDAS = (1.5, 2.0)
FIG4_ITERATIONS = 40
FIG5_LAMBDAS = tuple(np.linspace(1.5, 10.0, 18))
FIG5_EPS = (1.0, 2.0)
FIG5_HORIZON = 200
FIG5_ROLLOUTS = 2000


def fig3_rows(p: StageParams, lambdas: Sequence[float] = FIG3_LAMBDAS) -> list[dict]:
    return [
        {
            "lambda": lam,
            "avg_reward_pure": asymptotic_avg_reward("pure", p, lam),
            "avg_reward_behavioral": asymptotic_avg_reward("behavioral", p, lam),
        }
        for lam in lambdas
    ]


def fig4_rows(p: StageParams, lambdas: Sequence[float] = FIG4_LAMBDAS, n: int = FIG4_ITERATIONS) -> list[dict]:
    rows = []
    for lam in lambdas:
        it_l = iterate_n(map_L, p, lam, n)
        it_j = iterate_n(map_J, p, lam, n)
        for k in range(n + 1):
            rows.append(
                {
                    "n": k,
                    "theta_tilde_L": it_l[k, 0],
                    "theta_hat_L": it_l[k, 1],
                    "theta_tilde_J": it_j[k, 0],
                    "theta_check_J": it_j[k, 1],
                    "lambda": lam,
                }
            )
    return rows


def fig5_rows(
    params: ModelParams,
    cfg: SimConfig,
    lambdas: Sequence[float] = FIG5_LAMBDAS,
    eps_values: Sequence[float] = FIG5_EPS,
) -> list[dict]:
    """Stationary behavioural SPE against naive and alert agents with symmetric bounds ``-eps <= pi <= eps``.

    ``params`` must be time invariant; its horizon sets the simulation length
    and ``cfg.burn_in`` the stages dropped from the per-stage average.
    """
    p = params.stage(1)
    rows = []
    for eps in eps_values:

        def factory(lam, eps=eps):
            c = AdversaryConstraints(-eps, eps, lam)
            return {
                "reward_spe": asymptotic_avg_reward("behavioral", p, lam),
                "naive": naive_profile(p, c),
                "alert": alert_profile(p, c),
            }

        for row in sweep(factory, lambdas, params, cfg, name="lambda"):
            rows.append(
                {
                    "lambda": row["lambda"],
                    "eps": eps,
                    "reward_spe": row.get("reward_spe", float("nan")),
                    "reward_naive_mean": row.get("naive_mean", float("nan")),
                    "reward_naive_stderr": row.get("naive_stderr", float("nan")),
                    "reward_alert_mean": row.get("alert_mean", float("nan")),
                    "reward_alert_stderr": row.get("alert_stderr", float("nan")),
                    "naive_diverged": row.get("naive_diverged", -1),
                }
            )
    return rows
