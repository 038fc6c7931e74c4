"""Command line: ``divkit <subcommand>``.

Experiment subcommands load a config (the shipped default when ``--config``
is omitted), apply flag overrides and hand off to :func:`runner.run`.
"""
from __future__ import annotations

import json
import logging
import sys

import click

from ..data import DataError
from ..scorer import TrainConfig, accuracy, train
from . import config as C
from .generate import PRESETS, gen_data, preset_spec
from .io import load_csv, save_csv
from .runner import EXIT_INVALID, run


def _common(f):
    f = click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory (beats $DIVKIT_OUT).")(f)
    f = click.option("--jobs", type=int, default=1, show_default=True, help="Parallel trial workers.")(f)
    f = click.option("--seed", "master_seed", type=int, default=None, help="Override master_seed.")(f)
    f = click.option("--trials", type=int, default=None, help="Override the number of trials.")(f)
    f = click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Experiment config JSON.")(f)
    return f


def _dispatch(name: str, config_path, out, jobs, overrides: dict):
    path = config_path or C.shipped_config(name)
    sys.exit(run(path, out=out, jobs=jobs, overrides=overrides))


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Defence-in-depth experiments: cascades, regression faults, diversity, channels."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command("run")
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--jobs", type=int, default=1, show_default=True)
def run_cmd(config_path, out, jobs):
    """Run any experiment config."""
    sys.exit(run(config_path, out=out, jobs=jobs))


@main.command("cascade")
@_common
@click.option("--depth", type=int, default=None)
@click.option("--a", "range_a", type=float, default=None, help="Lower edge of the confidence range.")
@click.option("--b", "range_b", type=float, default=None, help="Upper edge of the confidence range.")
@click.option("--data", "data_path", type=click.Path(dir_okay=False), default=None, help="CSV dataset instead of the generator.")
def cascade_cmd(config_path, trials, master_seed, jobs, out, depth, range_a, range_b, data_path):
    """Difficulty cascade built on 50% of the data, evaluated on the rest."""
    _dispatch("cascade", config_path, out, jobs, {
        "trials": trials, "master_seed": master_seed, "params.depth": depth,
        "params.range.a": range_a, "params.range.b": range_b,
        "data": {"path": data_path} if data_path else None,
    })


@main.command("retrain-diff")
@_common
@click.option("--mode", type=click.Choice(["warm", "fresh"]), default=None)
@click.option("--data", "data_path", type=click.Path(dir_okay=False), default=None)
def retrain_cmd(config_path, trials, master_seed, jobs, out, mode, data_path):
    """40/40/20 retraining protocol with regression-fault counts."""
    _dispatch("retraining", config_path, out, jobs, {
        "trials": trials, "master_seed": master_seed, "params.mode": mode,
        "data": {"path": data_path} if data_path else None,
    })


@main.command("diversity")
@_common
@click.option("--n-versions", type=int, default=None)
@click.option("--n-pairs", type=int, default=None)
def diversity_cmd(config_path, trials, master_seed, jobs, out, n_versions, n_pairs):
    """Population experiment over difficulty profiles."""
    _dispatch("fig2-profile", config_path, out, jobs, {
        "trials": trials, "master_seed": master_seed,
        "params.n_versions": n_versions, "params.n_pairs": n_pairs,
    })


@main.command("channels")
@_common
@click.option("--n-demands", type=int, default=None, help="Demands for both simulations.")
def channels_cmd(config_path, trials, master_seed, jobs, out, n_demands):
    """Diverse pair and trusted-channel-plus-checker simulations."""
    _dispatch("channels", config_path, out, jobs, {
        "trials": trials, "master_seed": master_seed,
        "params.pair.n_demands": n_demands, "params.trusted_checker.n_demands": n_demands,
    })


@main.command("router")
@_common
def router_cmd(config_path, trials, master_seed, jobs, out):
    """Router-to-specialist ensemble with confusion factor."""
    _dispatch("router", config_path, out, jobs, {"trials": trials, "master_seed": master_seed})


@main.command("gen-data")
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default="two-blob", show_default=True)
@click.option("--n", type=int, default=None)
@click.option("--dim", type=int, default=None)
@click.option("--hard-weight", type=float, default=None, help="hard-region preset only")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def gen_data_cmd(preset, n, dim, hard_weight, seed, out_path):
    """Write a synthetic dataset as CSV (id,f0..,label)."""
    kw = {k: v for k, v in {"n": n, "dim": dim, "hard_weight": hard_weight, "seed": seed}.items() if v is not None}
    try:
        ds = gen_data(preset_spec(preset, **kw))
    except DataError as exc:
        click.echo(f"divkit: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    save_csv(ds, out_path)
    click.echo(f"wrote {len(ds)} demands (dim {ds.dim}) to {out_path}")


@main.command("train")
@click.argument("data_path", type=click.Path(dir_okay=False))
@click.option("--lr", type=float, default=0.1, show_default=True)
@click.option("--epochs", type=int, default=300, show_default=True)
@click.option("--l2", type=float, default=1e-4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="ScorerParams JSON.")
def train_cmd(data_path, lr, epochs, l2, seed, out_path):
    """Train a scorer on a CSV dataset and save its parameters."""
    try:
        ds = load_csv(data_path)
        params = train(ds, TrainConfig(lr, epochs, l2, seed))
    except DataError as exc:
        click.echo(f"divkit: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(params.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    click.echo(f"training accuracy {accuracy(params, ds):.4f}; parameters written to {out_path}")


if __name__ == "__main__":
    main()
