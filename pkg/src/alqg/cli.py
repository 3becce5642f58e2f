"""Command-line front end.

Exit codes: 0 success or certified, 1 invalid input, 2 unsupported regime,
3 falsified certificate or every rollout diverged.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .baselines import alert_profile, naive_finite_profile, naive_profile
from .equilibrium import Regime, RegimeError, SupportError, solve
from .figures import (
    FIG3_COLUMNS,
    FIG3_LAMBDAS,
    FIG4_COLUMNS,
    FIG4_ITERATIONS,
    FIG4_LAMBDAS,
    FIG5_COLUMNS,
    FIG5_EPS,
    FIG5_HORIZON,
    FIG5_LAMBDAS,
    FIG5_ROLLOUTS,
    fig3_rows,
    fig4_rows,
    fig5_rows,
)
from .model import (
    DEFAULT_DIVERGENCE_THRESHOLD,
    TABLE1_BELIEF,
    TABLE1_STAGE,
    AdversaryConstraints,
    Belief,
    ModelParams,
    StageParams,
    ValidationError,
    validate,
)
from .sim import SimConfig, monte_carlo_value
from .stationary import (
    StationarityError,
    fixed_point_oracle,
    kleene_iterate,
    map_J,
    map_L,
    stationary_profile,
)
from .verify import UnsupportedProfileError, certify_profile, reachable_beliefs, two_stage_indifference_gap

EXIT_OK, EXIT_INVALID, EXIT_UNSUPPORTED, EXIT_FAILED = 0, 1, 2, 3
VERIFY_BELIEFS = 10


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration


def _strict(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    return data


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer")
    return value


@dataclass(frozen=True)
class StageBlock:
    alpha: float = TABLE1_STAGE.alpha
    beta: float = TABLE1_STAGE.beta
    omega2: float = TABLE1_STAGE.omega2
    theta: float = TABLE1_STAGE.theta
    phi: float = TABLE1_STAGE.phi

    @classmethod
    def from_dict(cls, d, where):
        _strict(cls, d, where)
        return cls(**{k: _number(v, f"{where}.{k}") for k, v in d.items()})

    def params(self) -> StageParams:
        return StageParams(self.alpha, self.beta, self.omega2, self.theta, self.phi)


@dataclass(frozen=True)
class ModelBlock:
    """Either ``time_invariant`` or ``stages`` (one entry per stage) must be set."""

    time_invariant: StageBlock | None = field(default_factory=StageBlock)
    stages: tuple[StageBlock, ...] | None = None
    horizon: int = 2
    mu1: float = TABLE1_BELIEF.mu
    sigma1_sq: float = TABLE1_BELIEF.sigma2

    @classmethod
    def from_dict(cls, d, where="model"):
        _strict(cls, d, where)
        kw = {}
        if "time_invariant" in d:
            ti = d["time_invariant"]
            kw["time_invariant"] = None if ti is None else StageBlock.from_dict(ti, f"{where}.time_invariant")
        if "stages" in d:
            st = d["stages"]
            if st is not None and not isinstance(st, list):
                raise ConfigError(f"{where}.stages: expected a list")
            kw["stages"] = None if st is None else tuple(
                StageBlock.from_dict(s, f"{where}.stages[{k}]") for k, s in enumerate(st)
            )
            if "time_invariant" not in d and st is not None:
                kw["time_invariant"] = None
        if "horizon" in d:
            kw["horizon"] = _integer(d["horizon"], f"{where}.horizon")
        for k in ("mu1", "sigma1_sq"):
            if k in d:
                kw[k] = _number(d[k], f"{where}.{k}")
        out = cls(**kw)
        if (out.time_invariant is None) == (out.stages is None):
            raise ConfigError(f"{where}: give exactly one of time_invariant or stages")
        if out.stages is not None and len(out.stages) != out.horizon:
            raise ConfigError(f"{where}: stages has {len(out.stages)} entries but horizon is {out.horizon}")
        return out

    def params(self) -> ModelParams:
        if self.horizon < 1:
            raise ValidationError(["horizon must be at least 1"])
        belief = Belief(self.mu1, self.sigma1_sq)
        if self.stages is not None:
            return ModelParams(tuple(s.params() for s in self.stages), belief)
        return ModelParams.time_invariant(self.time_invariant.params(), self.horizon, belief)


@dataclass(frozen=True)
class AdversaryBlock:
    eps_lo: float = -1.0
    eps_hi: float = 1.0
    # JSON key is "lambda"
    lam: float = 2.0

    @classmethod
    def from_dict(cls, d, where="adversary"):
        if not isinstance(d, dict):
            raise ConfigError(f"{where}: expected an object")
        unknown = sorted(set(d) - {"eps_lo", "eps_hi", "lambda"})
        if unknown:
            raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
        kw = {k: _number(d[k], f"{where}.{k}") for k in ("eps_lo", "eps_hi") if k in d}
        if "lambda" in d:
            kw["lam"] = _number(d["lambda"], f"{where}.lambda")
        return cls(**kw)

    def to_dict(self):
        return {"eps_lo": self.eps_lo, "eps_hi": self.eps_hi, "lambda": self.lam}

    def constraints(self) -> AdversaryConstraints:
        return AdversaryConstraints(self.eps_lo, self.eps_hi, self.lam)


@dataclass(frozen=True)
class SimBlock:
    rollouts: int = 10_000
    seed: int = 0
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD

    @classmethod
    def from_dict(cls, d, where="sim"):
        _strict(cls, d, where)
        kw = {}
        for k in ("rollouts", "seed"):
            if k in d:
                kw[k] = _integer(d[k], f"{where}.{k}")
        if "divergence_threshold" in d:
            kw["divergence_threshold"] = _number(d["divergence_threshold"], f"{where}.divergence_threshold")
        return cls(**kw)


@dataclass(frozen=True)
class SweepBlock:
    """Grid over ``lambda`` or ``eps`` (symmetric bounds ``-eps..eps``)."""

    variable: str = "lambda"
    start: float = 1.5
    stop: float = 10.0
    points: int = 18

    @classmethod
    def from_dict(cls, d, where="sweep"):
        _strict(cls, d, where)
        kw = dict(d)
        if "variable" in kw and kw["variable"] not in ("lambda", "eps"):
            raise ConfigError(f"{where}.variable: expected 'lambda' or 'eps'")
        for k in ("start", "stop"):
            if k in kw:
                kw[k] = _number(kw[k], f"{where}.{k}")
        if "points" in kw:
            kw["points"] = _integer(kw["points"], f"{where}.points")
        out = cls(**kw)
        if out.points < 1:
            raise ConfigError(f"{where}.points: must be at least 1")
        if out.points > 1 and not out.stop > out.start:
            raise ConfigError(f"{where}: grid must be strictly increasing (stop > start)")
        return out

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    model: ModelBlock = field(default_factory=ModelBlock)
    adversary: AdversaryBlock = field(default_factory=AdversaryBlock)
    sim: SimBlock = field(default_factory=SimBlock)
    sweep: SweepBlock | None = None
    output: str | None = None

    @classmethod
    def from_dict(cls, d) -> "RunConfig":
        _strict(cls, d, "config")
        kw = {}
        if "model" in d:
            kw["model"] = ModelBlock.from_dict(d["model"])
        if "adversary" in d:
            kw["adversary"] = AdversaryBlock.from_dict(d["adversary"])
        if "sim" in d:
            kw["sim"] = SimBlock.from_dict(d["sim"])
        if d.get("sweep") is not None:
            kw["sweep"] = SweepBlock.from_dict(d["sweep"])
        if d.get("output") is not None:
            if not isinstance(d["output"], str):
                raise ConfigError("config.output: expected a string")
            kw["output"] = d["output"]
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        m = self.model
        return {
            "model": {
                "time_invariant": None if m.time_invariant is None else dataclasses.asdict(m.time_invariant),
                "stages": None if m.stages is None else [dataclasses.asdict(s) for s in m.stages],
                "horizon": m.horizon,
                "mu1": m.mu1,
                "sigma1_sq": m.sigma1_sq,
            },
            "adversary": self.adversary.to_dict(),
            "sim": dataclasses.asdict(self.sim),
            "sweep": None if self.sweep is None else dataclasses.asdict(self.sweep),
            "output": self.output,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def params(self) -> ModelParams:
        return self.model.params()

    def constraints(self) -> AdversaryConstraints:
        return self.adversary.constraints()

    def check(self) -> tuple[ModelParams, AdversaryConstraints]:
        """Validated model and constraints; raises :class:`ValidationError` listing every violation."""
        params, c = self.params(), self.constraints()
        problems = list(validate(params, c).problems)
        if self.sim.rollouts < 1:
            problems.append("rollouts must be at least 1")
        if not self.sim.divergence_threshold > 0:
            problems.append("divergence_threshold must be positive")
        if not 0 <= self.sim.seed < 2**64:
            problems.append("seed must be an unsigned 64-bit integer")
        if problems:
            raise ValidationError(problems)
        return params, c


def apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    sim, adv, model = cfg.sim, cfg.adversary, cfg.model
    if args.seed is not None:
        sim = dataclasses.replace(sim, seed=args.seed)
    if args.rollouts is not None:
        sim = dataclasses.replace(sim, rollouts=args.rollouts)
    if args.lam is not None:
        adv = dataclasses.replace(adv, lam=args.lam)
    if args.eps_lo is not None:
        adv = dataclasses.replace(adv, eps_lo=args.eps_lo)
    if args.eps_hi is not None:
        adv = dataclasses.replace(adv, eps_hi=args.eps_hi)
    if args.horizon is not None:
        if model.stages is not None:
            raise ConfigError("--horizon cannot change a per-stage model")
        model = dataclasses.replace(model, horizon=args.horizon)
    out = cfg.output if args.out is None else args.out
    return dataclasses.replace(cfg, sim=sim, adversary=adv, model=model, output=out)


# --------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".12g")
    return "" if v is None else str(v)


def csv_text(rows: Sequence[dict], columns: Sequence[str], seed: int | None = None, note: str = "") -> str:
    buf = io.StringIO(newline="")
    comment = f"# alqg {__version__}"
    if seed is not None:
        comment += f" seed={seed}"
    if note:
        comment += f" {note}"
    buf.write(comment + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Parse a CSV written by this tool back into ``(columns, rows)``; numeric cells become floats."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.reader(lines)
    cols = next(reader)
    return cols, [{c: _parse_cell(v) for c, v in zip(cols, r)} for r in reader]


def _parse_cell(v: str):
    if v == "":
        return math.nan
    try:
        return float(v)
    except ValueError:
        return v


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _jsonable(x):
    if isinstance(x, float):
        return x + 0.0 if math.isfinite(x) else str(x)
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(x.item())
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _print_json(obj, stdout) -> None:
    stdout.write(json.dumps(_jsonable(obj), indent=2) + "\n")


# --------------------------------------------------------------------------
# commands


def cmd_solve(cfg: RunConfig, args, stdout) -> int:
    params, c = cfg.check()
    report = solve(params, c)
    out = {"regime": report.regime.value, "horizon": params.horizon}
    if report.ladder is not None:
        out["ladder"] = {
            "theta_tilde": report.ladder.theta_tilde,
            "theta_hat": report.ladder.theta_hat,
            "theta_check": report.ladder.theta_check,
        }
    if report.profile is None:
        out["message"] = report.message
    else:
        b1 = params.initial_belief
        act = report.profile.agent_action(1, b1)
        mix = report.profile.adversary_strategy(1, b1)
        out["stage1_agent"] = {"kappa": act.kappa, "rho": act.rho}
        out["stage1_adversary"] = [
            {"pi": a.pi, "delta2": a.delta2, "prob": q} for a, q in zip(mix.actions, mix.probs)
        ]
        out["value"] = report.value
    _print_json(out, stdout)
    return EXIT_OK


def _stationary_problems(params: ModelParams, c: AdversaryConstraints) -> list[str]:
    problems = list(validate(params, c).problems)
    if not params.is_time_invariant:
        problems.append("stationary analysis needs a time-invariant model")
    else:
        a2 = params.stage(1).alpha ** 2
        if not c.lam > a2:
            problems.append(f"lambda must exceed alpha^2 = {a2:g} for a stationary equilibrium (got {c.lam:g})")
    return problems


def cmd_stationary(cfg: RunConfig, args, stdout) -> int:
    params, c = cfg.params(), cfg.constraints()
    problems = _stationary_problems(params, c)
    if problems:
        raise ValidationError(problems)
    p = params.stage(1)
    res_l = kleene_iterate(map_L, p, c.lam)
    res_j = kleene_iterate(map_J, p, c.lam)
    out = {
        "lambda": c.lam,
        "theta_tilde": res_l.theta_tilde,
        "theta_hat": res_l.theta_companion,
        "theta_check": res_j.theta_companion,
        "avg_reward_pure": -res_l.theta_companion * p.omega2,
        "avg_reward_behavioral": -res_j.theta_companion * p.omega2,
        "iterations_L": res_l.iterations,
        "iterations_J": res_j.iterations,
        "converged": res_l.converged and res_j.converged,
        "oracle": dict(zip(("theta_tilde", "theta_hat", "theta_check"), fixed_point_oracle(p, c.lam))),
    }
    try:
        prof = stationary_profile(p, c)
        b1 = params.initial_belief
        act = prof.agent_action(1, b1)
        out["profile"] = {
            "regime": prof.regime.value,
            "kappa": act.kappa,
            "rho_gain": prof.rules(1)[0].rho_gain,
            "support": list(zip(prof.rules(1)[1].pis, prof.rules(1)[1].probs)),
        }
    except StationarityError as exc:
        out["profile"] = None
        out["message"] = str(exc)
    if args.trace:
        lambdas = sorted({1.5, 2.0, c.lam}) if cfg.sweep is None else list(cfg.sweep.grid())
        for lam in lambdas:
            if not lam > p.alpha**2:
                raise ValidationError([f"trace lambda {lam:g} must exceed alpha^2 = {p.alpha**2:g}"])
        text = csv_text(fig4_rows(p, lambdas, FIG4_ITERATIONS), FIG4_COLUMNS)
        if cfg.output:
            _emit(text, cfg.output, stdout)
            out["trace"] = cfg.output
        else:
            out["trace_csv"] = text
    _print_json(out, stdout)
    return EXIT_OK if out["converged"] else EXIT_FAILED


SIM_COLUMNS = (
    "profile",
    "lambda",
    "eps_lo",
    "eps_hi",
    "horizon",
    "rollouts",
    "seed",
    "burn_in",
    "mean_total_reward",
    "stderr",
    "mean_per_stage_reward",
    "tail_mean",
    "tail_stderr",
    "diverged_count",
)


def build_profile(selector: str, params: ModelParams, c: AdversaryConstraints):
    """Profile for ``simulate``.

    ``spe`` is the stationary equilibrium when the model is time invariant and
    one exists, otherwise the finite-horizon equilibrium; ``spe-finite`` forces the latter.
    """
    if selector == "spe" and params.is_time_invariant:
        try:
            return stationary_profile(params.stage(1), c)
        except StationarityError:
            pass
    if selector in ("spe", "spe-finite"):
        report = solve(params, c)
        if report.profile is None:
            raise RegimeError(report.message)
        return report.profile
    if not params.is_time_invariant and selector == "alert":
        raise ConfigError("the alert agent needs a time-invariant model")
    if selector == "naive":
        return naive_profile(params.stage(1), c) if params.is_time_invariant else naive_finite_profile(params, c)
    if selector == "alert":
        return alert_profile(params.stage(1), c)
    raise ConfigError(f"unknown profile {selector!r}")


def _sim_row(selector, params, c, sim: SimBlock):
    cfg = SimConfig(sim.rollouts, sim.seed, sim.divergence_threshold, burn_in=params.horizon // 2)
    res = monte_carlo_value(build_profile(selector, params, c), params, cfg)
    row = {
        "profile": selector,
        "lambda": c.lam,
        "eps_lo": c.eps_lo,
        "eps_hi": c.eps_hi,
        "horizon": params.horizon,
        "rollouts": res.rollouts,
        "seed": res.seed,
        "burn_in": res.burn_in,
        "mean_total_reward": res.mean_total_reward,
        "stderr": res.stderr,
        "mean_per_stage_reward": res.mean_per_stage_reward,
        "tail_mean": res.tail_mean,
        "tail_stderr": res.tail_stderr,
        "diverged_count": res.diverged_count,
    }
    return row, res


def cmd_simulate(cfg: RunConfig, args, stdout) -> int:
    params, c = cfg.check()
    points = [c]
    if cfg.sweep is not None:
        if cfg.sweep.variable == "lambda":
            points = [AdversaryConstraints(c.eps_lo, c.eps_hi, float(x)) for x in cfg.sweep.grid()]
        else:
            points = [AdversaryConstraints(-float(x), float(x), c.lam) for x in cfg.sweep.grid()]
    rows, failed = [], False
    for pc in points:
        problems = pc.problems()
        if problems:
            raise ValidationError(problems)
        row, res = _sim_row(args.profile, params, pc, cfg.sim)
        rows.append(row)
        failed |= res.all_diverged
    _emit(csv_text(rows, SIM_COLUMNS, seed=cfg.sim.seed), cfg.output, stdout)
    if failed:
        print("error: every rollout diverged", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


CERT_COLUMNS = ("stage", "player", "mu", "sigma2", "deviation_0", "deviation_1", "improvement", "tolerance", "verdict")


def cmd_verify(cfg: RunConfig, args, stdout) -> int:
    params, c = cfg.check()
    report = solve(params, c)
    if report.profile is None:
        raise RegimeError(report.message)
    profile = report.profile
    if args.perturb:
        probs = profile.rules(1)[1].probs
        profile = profile.perturbed(kappa_scale=1 + args.perturb, prob_shift=args.perturb if len(probs) >= 2 else 0.0)
    beliefs = reachable_beliefs(profile, params, VERIFY_BELIEFS, seed=cfg.sim.seed)
    # every trajectory starts from the prior, so stage 1 needs a single check
    beliefs[0] = [params.initial_belief]
    certs = certify_profile(profile, params, c, beliefs)
    rows = [
        {
            "stage": x.stage,
            "player": x.player,
            "mu": x.belief.mu,
            "sigma2": x.belief.sigma2,
            "deviation_0": x.best_deviation[0],
            "deviation_1": x.best_deviation[1],
            "improvement": x.improvement,
            "tolerance": x.tolerance,
            "verdict": x.verdict,
        }
        for x in certs
    ]
    ok = all(x.certified for x in certs)
    note = f"regime={report.regime.value}"
    if report.regime is Regime.TWO_STAGE_UNIQUE:
        gaps = [abs(two_stage_indifference_gap(params, c, b, profile)) for b in beliefs[0]]
        note += f" indifference_gap={max(gaps):.3g}"
    _emit(csv_text(rows, CERT_COLUMNS, seed=cfg.sim.seed, note=note), cfg.output, stdout)
    if not ok:
        worst = max(certs, key=lambda x: x.improvement)
        print(
            f"falsified: stage {worst.stage} {worst.player} deviation {worst.best_deviation} "
            f"improves by {worst.improvement:.6g} > {worst.tolerance:g}",
            file=sys.stderr,
        )
        return EXIT_FAILED
    return EXIT_OK


REPRODUCE_HELP = f"""\
default grids (override lambda with a sweep block in the config):
  fig 3: lambda in linspace(1.1, 10, 50)
  fig 4: n = 0..{FIG4_ITERATIONS}, lambda in {list(FIG4_LAMBDAS)}
  fig 5: lambda in linspace(1.5, 10, 18), eps in {list(FIG5_EPS)} (bounds -eps..eps),
         horizon {FIG5_HORIZON}, {FIG5_ROLLOUTS} rollouts, per-stage average over the
         last half of the horizon; --horizon and --rollouts override
"""


def cmd_reproduce(cfg: RunConfig, args, stdout) -> int:
    params = cfg.params()
    problems = list(validate(params).problems)
    if not params.is_time_invariant:
        problems.append("figures need a time-invariant model")
    if problems:
        raise ValidationError(problems)
    p = params.stage(1)
    lambdas = None
    if cfg.sweep is not None:
        if cfg.sweep.variable != "lambda":
            raise ConfigError("reproduce sweeps lambda only")
        lambdas = [float(x) for x in cfg.sweep.grid()]
    for lam in lambdas or ():
        if not lam > max(1.0, p.alpha**2):
            raise ValidationError([f"lambda {lam:g} must exceed max(1, alpha^2)"])
    seed = None
    if args.fig == 3:
        text = csv_text(fig3_rows(p, lambdas or FIG3_LAMBDAS), FIG3_COLUMNS)
    elif args.fig == 4:
        text = csv_text(fig4_rows(p, lambdas or FIG4_LAMBDAS), FIG4_COLUMNS)
    else:
        horizon = args.horizon or FIG5_HORIZON
        rollouts = args.rollouts or FIG5_ROLLOUTS
        seed = cfg.sim.seed
        sim = SimConfig(rollouts, seed, cfg.sim.divergence_threshold, burn_in=horizon // 2)
        rows = fig5_rows(ModelParams.time_invariant(p, horizon, params.initial_belief), sim, lambdas or FIG5_LAMBDAS)
        text = csv_text(rows, FIG5_COLUMNS, seed=seed, note=f"horizon={horizon} rollouts={rollouts}")
    _emit(text, cfg.output, stdout)
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (unknown fields are errors)")
    common.add_argument("--seed", type=int)
    common.add_argument("--rollouts", type=int)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--eps-lo", type=float)
    common.add_argument("--eps-hi", type=float)
    common.add_argument("--horizon", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")

    parser = argparse.ArgumentParser(prog="alqg", description="Adversarial LQG cheap-talk game toolkit.")
    parser.add_argument("--version", action="version", version=f"alqg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="closed-form equilibrium for the configured game")
    st = sub.add_parser("stationary", parents=[common], help="stationary fixed points and rewards")
    st.add_argument("--trace", action="store_true", help="export the fixed-point iterates as CSV")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo evaluation of a profile")
    sim.add_argument("--profile", choices=("spe", "spe-finite", "naive", "alert"), default="spe")
    ver = sub.add_parser("verify", parents=[common], help="one-shot deviation certificates")
    ver.add_argument("--perturb", type=float, default=0.0, help="corrupt the profile by this fraction first")
    rep = sub.add_parser(
        "reproduce",
        parents=[common],
        help="CSV data for the numerical study",
        epilog=REPRODUCE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    rep.add_argument("--fig", type=int, choices=(3, 4, 5), required=True)
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "stationary": cmd_stationary,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = RunConfig.from_json(fh.read())
        else:
            cfg = RunConfig()
        cfg = apply_overrides(cfg, args)
        if args.dump_config:
            stdout.write(cfg.to_json())
            return EXIT_OK
        return COMMANDS[args.command](cfg, args, stdout)
    except (ConfigError, ValidationError, SupportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RegimeError, UnsupportedProfileError, StationarityError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
