"""Experiment configuration: loading, defaults and up-front validation.

A config is a JSON object::

    {"kind": "cascade", "master_seed": 7, "trials": 20,
     "data": {"generator": {"preset": "hard-region"}},
     "params": {...}}

``resolve`` fills every default so the report can embed a config that
reproduces it exactly. ``validate`` builds every module-level object the
experiment will need, so bad values fail before any work or output.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..channels import ChannelSpec, Policy
from ..data import DataError, ScoreRange, SplitSpec
from ..diversity import DifficultyProfile
from ..scorer import TrainConfig
from .generate import GeneratorSpec, RoutedSpec

KINDS = ("cascade", "retraining", "diversity", "channels", "router")


class ConfigError(ValueError):
    pass


DEFAULT_TRAIN = {"learning_rate": 0.1, "epochs": 300, "l2_penalty": 1e-4, "init_seed": 0}

DEFAULT_PARAMS = {
    "cascade": {
        "depth": 2,
        "range": {"a": 0.1, "b": 0.9},
        "final_tie_threshold": 0.5,
        "train": DEFAULT_TRAIN,
    },
    "retraining": {
        "split": [0.4, 0.4, 0.2],
        "threshold": 0.5,
        "mode": "warm",
        "train": DEFAULT_TRAIN,
        "retrain": None,
    },
    "diversity": {
        "n_versions": 2000,
        "n_pairs": 1000,
        "profiles": [{"name": "fig2-profile", "kind": "beta-quantiles", "alpha": 0.3, "beta": 30.0, "m": 2000}],
    },
    "channels": {
        "profiles": {},
        "pair": {
            "a": {"name": "lidar", "p": 0.1},
            "b": {"name": "stereo", "p": 0.1},
            "policy": "both-must-fail",
            "n_demands": 100000,
        },
        "trusted_checker": {
            "trusted": {"name": "lidar", "p": 0.05},
            "checker": {"name": "stereo", "p": 0.1},
            "n_demands": 100000,
        },
    },
    "router": {
        "threshold": 0.5,
        "train": DEFAULT_TRAIN,
    },
}

DEFAULT_DATA = {
    "cascade": {"generator": {"preset": "hard-region"}},
    "retraining": {"generator": {"preset": "two-blob"}},
    "diversity": None,
    "channels": None,
    "router": {"routed": {}},
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    master_seed: int
    trials: int
    data: dict | None
    params: dict
    out: str | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "master_seed": self.master_seed, "trials": self.trials, "data": self.data, "params": self.params}
        if self.out is not None:
            d["out"] = self.out
        return d

    def resolved_dict(self) -> dict:
        """The reproducible body: everything except the output location."""
        return {"kind": self.kind, "master_seed": self.master_seed, "trials": self.trials, "data": self.data, "params": self.params}


def _merge(base, over):
    if isinstance(base, dict) and isinstance(over, dict):
        out = copy.deepcopy(base)
        for k, v in over.items():
            out[k] = _merge(base.get(k), v) if k in base else copy.deepcopy(v)
        return out
    return copy.deepcopy(over)


def resolve(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"kind", "master_seed", "trials", "data", "params", "out"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    seed = raw.get("master_seed", 0)
    trials = raw.get("trials", 1)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("master_seed must be a 64-bit unsigned integer")
    if not isinstance(trials, int) or isinstance(trials, bool) or trials < 1:
        raise ConfigError("trials must be a positive integer")
    params = _merge(DEFAULT_PARAMS[kind], raw.get("params") or {})
    if kind == "retraining" and params.get("retrain") is None:
        params["retrain"] = params["train"]
    data = raw.get("data", DEFAULT_DATA[kind])
    data = copy.deepcopy(data)
    cfg = ExperimentConfig(kind, seed, trials, data, params, raw.get("out"))
    validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return resolve(raw)


def shipped_config(name: str) -> Path:
    """Path of a config bundled with the package (e.g. ``"cascade"``)."""
    ref = resources.files("divkit") / "configs" / f"{name}.json"
    return Path(str(ref))


def shipped_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("divkit").joinpath("configs").iterdir() if p.name.endswith(".json"))


# -- builders, shared by validation and execution ---------------------------

def train_config(d: dict) -> TrainConfig:
    try:
        return TrainConfig(float(d["learning_rate"]), int(d["epochs"]), float(d["l2_penalty"]), int(d["init_seed"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad train config: {exc}") from exc


def score_range(d: dict) -> ScoreRange:
    try:
        return ScoreRange(float(d["a"]), float(d["b"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad range: {exc}") from exc


def profile(d: dict) -> DifficultyProfile:
    kind = d.get("kind")
    try:
        if kind == "beta-quantiles":
            if float(d["alpha"]) <= 0 or float(d["beta"]) <= 0 or int(d["m"]) < 1:
                raise ConfigError("beta-quantiles needs alpha, beta > 0 and m >= 1")
            return DifficultyProfile.beta_quantiles(float(d["alpha"]), float(d["beta"]), int(d["m"]))
        if kind == "constant":
            if int(d["m"]) < 1:
                raise ConfigError("constant profile needs m >= 1")
            return DifficultyProfile.constant(float(d["value"]), int(d["m"]))
        if kind == "explicit":
            theta = d["theta"]
            if not theta:
                raise ConfigError("explicit profile is empty")
            return DifficultyProfile(theta)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad profile {d.get('name')!r}: {exc}") from exc
    raise ConfigError(f"unknown profile kind {kind!r}")


def channel(d: dict, profiles: dict) -> ChannelSpec:
    try:
        prof = None
        if "profile" in d:
            if d["profile"] not in profiles:
                raise ConfigError(f"channel {d.get('name')!r} references unknown profile {d['profile']!r}")
            prof = profile(profiles[d["profile"]])
        return ChannelSpec(str(d["name"]), None if prof is not None else float(d["p"]), prof, d.get("failure_mode", "detection"))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad channel spec: {exc}") from exc


def generator_spec(d: dict) -> GeneratorSpec:
    return GeneratorSpec.from_dict(d)


def routed_spec(d: dict) -> RoutedSpec:
    try:
        return RoutedSpec(**d)
    except TypeError as exc:
        raise ConfigError(f"bad routed generator spec: {exc}") from exc


def validate(cfg: ExperimentConfig) -> None:
    try:
        _validate(cfg)
    except ConfigError:
        raise
    except (DataError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _validate_data(cfg: ExperimentConfig):
    data = cfg.data
    if cfg.kind in ("diversity", "channels"):
        if data is not None:
            raise ConfigError(f"{cfg.kind} experiments take no dataset")
        return
    if not isinstance(data, dict) or len(data) != 1:
        raise ConfigError("data must be {'generator': {...}}, {'routed': {...}} or {'path': ...}")
    (key, val), = data.items()
    if cfg.kind == "router":
        if key != "routed":
            raise ConfigError("router experiments need data.routed")
        routed_spec(val)
    elif key == "generator":
        generator_spec(val)
    elif key == "path":
        if not Path(val).is_file():
            raise ConfigError(f"dataset {val}: no such file")
    else:
        raise ConfigError(f"unknown data source {key!r}")


def _validate(cfg: ExperimentConfig):
    _validate_data(cfg)
    p = cfg.params
    if cfg.kind == "cascade":
        if not isinstance(p["depth"], int) or p["depth"] < 1:
            raise ConfigError("depth must be a positive integer")
        score_range(p["range"])
        if not 0.0 <= float(p["final_tie_threshold"]) <= 1.0:
            raise ConfigError("final_tie_threshold must lie in [0, 1]")
        train_config(p["train"])
    elif cfg.kind == "retraining":
        SplitSpec(tuple(p["split"]), 0)
        if len(p["split"]) != 3:
            raise ConfigError("retraining split needs three fractions")
        if not 0.0 <= float(p["threshold"]) <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        if p["mode"] not in ("warm", "fresh"):
            raise ConfigError("mode must be 'warm' or 'fresh'")
        train_config(p["train"])
        train_config(p["retrain"])
    elif cfg.kind == "diversity":
        if int(p["n_versions"]) < 2:
            raise ConfigError("n_versions must be at least 2")
        n_possible = int(p["n_versions"]) * (int(p["n_versions"]) - 1) // 2
        if not 1 <= int(p["n_pairs"]) <= n_possible:
            raise ConfigError(f"n_pairs must lie in [1, {n_possible}]")
        if not p["profiles"]:
            raise ConfigError("at least one profile required")
        for prof in p["profiles"]:
            profile(prof)
    elif cfg.kind == "channels":
        profiles = p.get("profiles", {})
        pair, tc = p["pair"], p["trusted_checker"]
        channel(pair["a"], profiles)
        channel(pair["b"], profiles)
        Policy(pair["policy"])
        channel(tc["trusted"], profiles)
        channel(tc["checker"], profiles)
        for block in (pair, tc):
            if int(block["n_demands"]) < 1:
                raise ConfigError("n_demands must be at least 1")
    elif cfg.kind == "router":
        if not 0.0 <= float(p["threshold"]) <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        train_config(p["train"])
