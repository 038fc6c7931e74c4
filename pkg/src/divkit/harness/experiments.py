"""Experiment drivers. Each trial depends only on (resolved config, trial index)."""
from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..cascade import build_cascade, evaluate_cascade
from ..channels import Policy, RouterSpec, router_metrics, simulate_pair, simulate_trusted_checker, within_se
from ..data import LabeledDataset, SplitSpec
from ..diversity import independence_pfd, population_experiment
from ..regression import ordered_scores, retraining_experiment
from ..rng import child_seed, trial_seed
from ..scorer import accuracy, train, with_seed
from . import config as C
from .generate import gen_data, gen_routed
from .io import load_csv


@dataclass
class Outcome:
    results: dict
    per_trial: list
    tables: dict = field(default_factory=dict)  # file name -> (header, rows)

    def report(self, cfg: C.ExperimentConfig) -> dict:
        return {
            "tool_version": __version__,
            "resolved_config": cfg.resolved_dict(),
            "results": self.results,
            "per_trial": self.per_trial,
        }


def load_dataset(data: dict) -> LabeledDataset:
    (key, val), = data.items()
    if key == "generator":
        return gen_data(C.generator_spec(val))
    return load_csv(val)


def map_trials(fn, args: list, jobs: int) -> list:
    if jobs <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=min(jobs, len(args))) as pool:
        return list(pool.map(fn, args))


# -- retraining --------------------------------------------------------------

def _retraining_trial(arg):
    ds, p, master, k = arg
    seed = trial_seed(master, k)
    cfg = with_seed(C.train_config(p["train"]), seed)
    out = retraining_experiment(
        ds, cfg, SplitSpec(tuple(p["split"]), seed), float(p["threshold"]),
        retrain_cfg=C.train_config(p["retrain"]), fresh=p["mode"] == "fresh",
    )
    row = {"trial": k, "seed": seed, **out.report.to_dict()}
    scores = (ordered_scores(out.before), ordered_scores(out.after)) if k == 0 else None
    return row, scores


def run_retraining(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    ds = load_dataset(cfg.data)
    rows = map_trials(_retraining_trial, [(ds, cfg.params, cfg.master_seed, k) for k in range(cfg.trials)], jobs)
    per_trial = [r for r, _ in rows]
    before, after = rows[0][1]
    acc_b = [r["acc_before"] for r in per_trial]
    acc_a = [r["acc_after"] for r in per_trial]
    results = {
        "n_test": per_trial[0]["n"],
        "median_acc_before": statistics.median(acc_b),
        "median_acc_after": statistics.median(acc_a),
        "median_fp_before": statistics.median(r["fp_before"] for r in per_trial),
        "median_fp_after": statistics.median(r["fp_after"] for r in per_trial),
        "median_fn_before": statistics.median(r["fn_before"] for r in per_trial),
        "median_fn_after": statistics.median(r["fn_after"] for r in per_trial),
        "trials_with_regressions": sum(r["regressed"] > 0 for r in per_trial),
        "total_regressed": sum(r["regressed"] for r in per_trial),
        "total_repaired": sum(r["repaired"] for r in per_trial),
        "trials_improved_or_equal": sum(a >= b for a, b in zip(acc_a, acc_b)),
        "dataset_size": len(ds),
        "rate_convention": per_trial[0]["rate_convention"],
    }
    tables = {
        "ordered_scores_before.csv": (["rank", "score"], before),
        "ordered_scores_after.csv": (["rank", "score"], after),
    }
    return Outcome(results, per_trial, tables)


# -- cascade -----------------------------------------------------------------

def _cascade_trial(arg):
    ds, p, master, k = arg
    seed = trial_seed(master, k)
    tcfg = with_seed(C.train_config(p["train"]), seed)
    build = build_cascade(ds, int(p["depth"]), C.score_range(p["range"]), tcfg, seed, float(p["final_tie_threshold"]))
    ens = build.ensemble
    m = evaluate_cascade(ens, build.holdout)
    return {
        "trial": k,
        "seed": seed,
        "holdout_size": len(build.holdout),
        "models_built": len(ens.models),
        "truncated": build.truncated,
        "truncation_reason": build.truncation_reason,
        "stage_training_sizes": [len(ids) for ids in build.stage_ids],
        **m.to_dict(),
    }


def run_cascade(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    ds = load_dataset(cfg.data)
    per_trial = map_trials(_cascade_trial, [(ds, cfg.params, cfg.master_seed, k) for k in range(cfg.trials)], jobs)
    acc = [r["accuracy"] for r in per_trial]
    base = [r["model0_accuracy"] for r in per_trial]
    results = {
        "median_accuracy": statistics.median(acc),
        "median_model0_accuracy": statistics.median(base),
        "strict_improvements": sum(a > b for a, b in zip(acc, base)),
        "ties": sum(a == b for a, b in zip(acc, base)),
        "truncated_trials": sum(bool(r["truncated"]) for r in per_trial),
        "dataset_size": len(ds),
    }
    rows = [[r["trial"], r["accuracy"], r["model0_accuracy"], *r["deciding_counts"]] for r in per_trial]
    width = max(len(r["deciding_counts"]) for r in per_trial)
    rows = [row + [0] * (3 + width - len(row)) for row in rows]
    tables = {"cascade_trials.csv": (["trial", "accuracy", "model0_accuracy", *(f"decided_by_{k}" for k in range(width))], rows)}
    return Outcome(results, per_trial, tables)


# -- diversity ---------------------------------------------------------------

def _diversity_trial(arg):
    p, master, k = arg
    seed = trial_seed(master, k)
    curves = []
    for j, spec in enumerate(p["profiles"]):
        prof = C.profile(spec)
        c = population_experiment(prof, int(p["n_versions"]), int(p["n_pairs"]), child_seed(seed, j))
        d = c.to_dict()
        d["name"] = spec.get("name", f"profile-{j}")
        d["pair_within_3se"] = abs(c.mean_pair_pfd - c.analytic_pair_pfd) <= 3 * c.pair_pfd_se
        d["independence_pair_pfd"] = independence_pfd(c.analytic_single_pfd, c.analytic_single_pfd)
        curves.append(d)
    return {"trial": k, "seed": seed, "curves": curves}


def run_diversity(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    per_trial = map_trials(_diversity_trial, [(cfg.params, cfg.master_seed, k) for k in range(cfg.trials)], jobs)
    results = {"profiles": per_trial[0]["curves"]}
    rows = []
    for t in per_trial:
        for c in t["curves"]:
            rows.append([c["mean_single_pfd"], c["mean_pair_pfd"], c["empirical_improvement"], c["analytic_pair_pfd"]])
    tables = {"curve.csv": (["mean_single_pfd", "mean_pair_pfd", "empirical_improvement", "analytic_pair_pfd"], rows)}
    return Outcome(results, per_trial, tables)


# -- channels ----------------------------------------------------------------

def _channels_trial(arg):
    p, master, k = arg
    seed = trial_seed(master, k)
    profiles = p.get("profiles", {})
    pair, tc = p["pair"], p["trusted_checker"]
    a, b = C.channel(pair["a"], profiles), C.channel(pair["b"], profiles)
    ps = simulate_pair(a, b, int(pair["n_demands"]), Policy(pair["policy"]), child_seed(seed, 0))
    t, c = C.channel(tc["trusted"], profiles), C.channel(tc["checker"], profiles)
    cs = simulate_trusted_checker(t, c, int(tc["n_demands"]), child_seed(seed, 1))
    out = {"trial": k, "seed": seed, "pair": ps.to_dict(), "trusted_checker": cs.to_dict()}
    # analytic oracles only exist for constant-probability channels
    if a.p is not None and b.p is not None:
        exp = a.p * b.p
        out["pair"]["analytic_both_fail"] = exp
        out["pair"]["both_fail_within_3se"] = within_se(ps.both_fail_rate, exp, ps.n)
    if t.p is not None and c.p is not None:
        exp = t.p * c.p
        out["trusted_checker"]["analytic_undermining"] = exp
        out["trusted_checker"]["undermining_within_3se"] = within_se(cs.rates["undermining"], exp, cs.n)
    return out


def run_channels(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    per_trial = map_trials(_channels_trial, [(cfg.params, cfg.master_seed, k) for k in range(cfg.trials)], jobs)
    first = per_trial[0]
    results = {
        "missed_hazard_rate": first["pair"]["rates"]["missed_hazard"],
        "spurious_flag_rate": first["pair"]["rates"]["spurious_flag"],
        "trusted_checker_rates": first["trusted_checker"]["rates"],
        "mean_missed_hazard_rate": statistics.fmean(t["pair"]["rates"]["missed_hazard"] for t in per_trial),
        "mean_undermining_rate": statistics.fmean(t["trusted_checker"]["rates"]["undermining"] for t in per_trial),
    }
    return Outcome(results, per_trial)


# -- router ------------------------------------------------------------------

def _router_trial(arg):
    data, p, master, k = arg
    seed = trial_seed(master, k)
    ds, routes = gen_routed(C.routed_spec(data["routed"]))
    cfg = with_seed(C.train_config(p["train"]), seed)
    thr = float(p["threshold"])
    order = np.random.Generator(np.random.PCG64(seed)).permutation(len(ds))
    half = len(ds) // 2
    tr, te = order[:half], order[half:]
    train_ds, test_ds = ds.take(tr), ds.take(te)
    route_ds = LabeledDataset(train_ds.ids, train_ds.features, routes[tr], ds.dim)
    router = train(route_ds, with_seed(cfg, child_seed(seed, 0)))
    specialists = tuple(
        train(train_ds.take(routes[tr] == r), with_seed(cfg, child_seed(seed, r + 1))) for r in (0, 1)
    )
    spec = RouterSpec(router, specialists)
    m = router_metrics(spec, test_ds, routes[te], thr)
    single = train(train_ds, with_seed(cfg, child_seed(seed, 3)))
    return {"trial": k, "seed": seed, **m.to_dict(), "single_model_accuracy": accuracy(single, test_ds, thr)}


def run_router(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    per_trial = map_trials(_router_trial, [(cfg.data, cfg.params, cfg.master_seed, k) for k in range(cfg.trials)], jobs)
    results = {
        "median_accuracy": statistics.median(t["accuracy"] for t in per_trial),
        "median_single_model_accuracy": statistics.median(t["single_model_accuracy"] for t in per_trial),
        "median_confusion_factor": statistics.median(t["confusion_factor"] for t in per_trial),
        "max_decomposition_error": max(abs(t["accuracy"] - t["decomposition"]) for t in per_trial),
    }
    return Outcome(results, per_trial)


RUNNERS = {
    "cascade": run_cascade,
    "retraining": run_retraining,
    "diversity": run_diversity,
    "channels": run_channels,
    "router": run_router,
}


def execute(cfg: C.ExperimentConfig, jobs: int = 1) -> Outcome:
    return RUNNERS[cfg.kind](cfg, jobs)
