"""Deterministic logistic scorer with warm-start retraining.

Scores near 1 mean confidently clean, near 0 confidently malicious.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .data import DataError, Demand, LabeledDataset
from .rng import generator

DEFAULT_THRESHOLD = 0.5
INIT_SCALE = 0.01


@dataclass(frozen=True)
class ScorerParams:
    weights: tuple[float, ...]
    bias: float
    dim: int = field(default=0)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))
        if self.dim == 0:
            object.__setattr__(self, "dim", len(w))
        if self.dim < 1 or len(w) != self.dim:
            raise DataError("weights length must equal dimensionality")
        if not (np.all(np.isfinite(w)) and np.isfinite(self.bias)):
            raise DataError("non-finite scorer parameters")

    @classmethod
    def zeros(cls, dim: int) -> "ScorerParams":
        return cls((0.0,) * dim, 0.0, dim)

    @property
    def w(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.float64)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "weights": list(self.weights), "bias": self.bias}

    @classmethod
    def from_dict(cls, d: dict) -> "ScorerParams":
        try:
            return cls(tuple(d["weights"]), d["bias"], int(d["dim"]))
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed scorer parameters: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScorerParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 300
    l2_penalty: float = 1e-4
    init_seed: int = 0

    def __post_init__(self):
        if not (self.learning_rate > 0 and np.isfinite(self.learning_rate)):
            raise DataError("learning_rate must be positive")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise DataError("epochs must be a positive integer")
        if not (self.l2_penalty >= 0 and np.isfinite(self.l2_penalty)):
            raise DataError("l2_penalty must be non-negative")
        if not 0 <= int(self.init_seed) < 2**64:
            raise DataError("init_seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "epochs": int(self.epochs),
            "l2_penalty": self.l2_penalty,
            "init_seed": int(self.init_seed),
        }


def _check_training_set(ds: LabeledDataset):
    if len(ds) == 0:
        raise DataError("empty dataset")
    if not np.all(np.isfinite(ds.features)):
        raise DataError("invalid features")


def _check_dim(p: ScorerParams, dim: int):
    if p.dim != dim:
        raise DataError(f"dimensionality mismatch: scorer {p.dim}, data {dim}")


def init_params(dim: int, seed: int) -> ScorerParams:
    """Small symmetric uniform draw in [-INIT_SCALE, INIT_SCALE]."""
    draw = generator(seed).uniform(-INIT_SCALE, INIT_SCALE, dim + 1)
    return ScorerParams(tuple(draw[:dim]), draw[dim], dim)


def train(ds: LabeledDataset, cfg: TrainConfig) -> ScorerParams:
    _check_training_set(ds)
    return retrain(init_params(ds.dim, cfg.init_seed), ds, cfg)


def retrain(p: ScorerParams, ds: LabeledDataset, cfg: TrainConfig) -> ScorerParams:
    """Continue gradient descent from ``p``; ``cfg.init_seed`` is not used."""
    _check_training_set(ds)
    _check_dim(p, ds.dim)
    w, b = kernels.logistic_gd(ds.features, ds.labels, p.w, p.bias, cfg.learning_rate, cfg.l2_penalty, cfg.epochs)
    return ScorerParams(tuple(w), b, ds.dim)


def fresh_retrain(p: ScorerParams, ds: LabeledDataset, cfg: TrainConfig) -> ScorerParams:
    """Comparison mode: ignore ``p`` and train from scratch on ``ds``."""
    _check_dim(p, ds.dim)
    return train(ds, cfg)


def loss(p: ScorerParams, ds: LabeledDataset, l2_penalty: float = 0.0) -> float:
    """Mean cross-entropy of the sigmoid score plus (l2/2)||w||^2."""
    _check_dim(p, ds.dim)
    z = ds.features @ p.w + p.bias
    ce = np.logaddexp(0.0, z) - ds.labels * z
    return float(ce.mean() + 0.5 * l2_penalty * np.dot(p.w, p.w))


def loss_gradient(p: ScorerParams, ds: LabeledDataset, l2_penalty: float = 0.0) -> tuple[np.ndarray, float]:
    _check_dim(p, ds.dim)
    g = kernels.sigmoid(ds.features @ p.w + p.bias) - ds.labels
    n = len(ds)
    return ds.features.T @ g / n + l2_penalty * p.w, float(g.sum() / n)


def _features(d) -> np.ndarray:
    return np.asarray(d.features if isinstance(d, Demand) else d, dtype=np.float64)


def score(p: ScorerParams, d) -> float:
    x = _features(d)
    _check_dim(p, x.shape[-1] if x.ndim else 1)
    return float(kernels.sigmoid(np.array([x @ p.w + p.bias]))[0])


def score_all(p: ScorerParams, ds: LabeledDataset) -> np.ndarray:
    _check_dim(p, ds.dim)
    return kernels.sigmoid(ds.features @ p.w + p.bias)


def label_scores(scores, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """1 strictly above the threshold; ties go to 0 (the attack class)."""
    return (np.asarray(scores) > threshold).astype(np.int8)


def classify(p: ScorerParams, d, threshold: float = DEFAULT_THRESHOLD) -> int:
    if not 0.0 <= threshold <= 1.0:
        raise DataError("threshold must lie in [0, 1]")
    return 1 if score(p, d) > threshold else 0


def accuracy(p: ScorerParams, ds: LabeledDataset, threshold: float = DEFAULT_THRESHOLD) -> float:
    return float(np.mean(label_scores(score_all(p, ds), threshold) == ds.labels))


def with_seed(cfg: TrainConfig, seed: int) -> TrainConfig:
    return replace(cfg, init_seed=int(seed))
