"""Difficulty-driven cascade ensembles.

Model k+1 is trained only on the demands Model k scored inside the closed
confidence range [a, b]; confidently scored demands are excluded outright
rather than down-weighted. At prediction time the first model whose score
leaves [a, b] decides, and the last model decides anything still in-between.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .data import DataError, LabeledDataset, ScoreRange, SplitSpec, split_dataset
from .rng import child_seed
from .scorer import DEFAULT_THRESHOLD, ScorerParams, TrainConfig, score, score_all, train, with_seed


@dataclass(frozen=True)
class PartitionResult:
    easy: LabeledDataset
    difficult: LabeledDataset


@dataclass(frozen=True)
class CascadeEnsemble:
    models: tuple[ScorerParams, ...]
    range: ScoreRange
    final_tie_threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if not self.models:
            raise DataError("cascade needs at least one model")
        if len({m.dim for m in self.models}) != 1:
            raise DataError("cascade models disagree on dimensionality")
        if not 0.0 <= self.final_tie_threshold <= 1.0:
            raise DataError("final_tie_threshold must lie in [0, 1]")

    @property
    def dim(self) -> int:
        return self.models[0].dim

    def to_dict(self) -> dict:
        return {
            "range": {"a": self.range.a, "b": self.range.b},
            "final_tie_threshold": self.final_tie_threshold,
            "models": [m.to_dict() for m in self.models],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CascadeEnsemble":
        return cls(
            tuple(ScorerParams.from_dict(m) for m in d["models"]),
            ScoreRange(float(d["range"]["a"]), float(d["range"]["b"])),
            float(d.get("final_tie_threshold", DEFAULT_THRESHOLD)),
        )


@dataclass(frozen=True)
class CascadeDecision:
    label: int
    deciding_model: int
    deciding_score: float


@dataclass(frozen=True)
class CascadeBuild:
    """Result of :func:`build_cascade`.

    ``truncated`` is set when construction stopped before ``depth`` models
    because a difficult subset came out empty or single-class.
    """

    ensemble: CascadeEnsemble
    holdout: LabeledDataset
    stage_ids: tuple[np.ndarray, ...]
    requested_depth: int
    truncated: bool = False
    truncation_reason: str | None = None

    def __iter__(self):
        yield self.ensemble
        yield self.holdout


def partition_by_confidence(p: ScorerParams, ds: LabeledDataset, r: ScoreRange) -> PartitionResult:
    s = score_all(p, ds)
    hard = r.contains(s)
    return PartitionResult(easy=ds.take(~hard), difficult=ds.take(hard))


def build_cascade(
    available: LabeledDataset,
    depth: int,
    r: ScoreRange,
    cfg: TrainConfig,
    seed: int,
    final_tie_threshold: float = DEFAULT_THRESHOLD,
) -> CascadeBuild:
    if depth < 1:
        raise DataError("depth must be a positive integer")
    train_set, holdout = split_dataset(available, SplitSpec((0.5, 0.5), seed))
    if len(train_set) == 0:
        raise DataError("empty training set")
    models = [train(train_set, with_seed(cfg, child_seed(cfg.init_seed, 0)))]
    stage_ids = [train_set.ids]
    truncated, reason = False, None
    current = train_set
    for k in range(1, depth):
        nxt = partition_by_confidence(models[-1], current, r).difficult
        if len(nxt) == 0:
            truncated, reason = True, f"empty difficult subset at stage {k}"
            break
        if len(set(nxt.labels.tolist())) < 2:
            truncated, reason = True, f"single-class difficult subset at stage {k}"
            break
        models.append(train(nxt, with_seed(cfg, child_seed(cfg.init_seed, k))))
        stage_ids.append(nxt.ids)
        current = nxt
    return CascadeBuild(
        ensemble=CascadeEnsemble(tuple(models), r, final_tie_threshold),
        holdout=holdout,
        stage_ids=tuple(stage_ids),
        requested_depth=depth,
        truncated=truncated,
        truncation_reason=reason,
    )


def adjudicate(scores, r: ScoreRange, final_tie_threshold: float = DEFAULT_THRESHOLD) -> CascadeDecision:
    scores = list(scores)
    if not scores:
        raise DataError("scores must be non-empty")
    last = len(scores) - 1
    for k, s in enumerate(scores):
        if s < r.a:
            return CascadeDecision(0, k, float(s))
        if s > r.b:
            return CascadeDecision(1, k, float(s))
        if k == last:
            return CascadeDecision(1 if s > final_tie_threshold else 0, k, float(s))
    raise AssertionError("unreachable")


def cascade_predict(e: CascadeEnsemble, d) -> CascadeDecision:
    """Score model by model, stopping at the first confident one."""
    last = len(e.models) - 1
    for k, m in enumerate(e.models):
        s = score(m, d)
        if s < e.range.a:
            return CascadeDecision(0, k, s)
        if s > e.range.b:
            return CascadeDecision(1, k, s)
        if k == last:
            return CascadeDecision(1 if s > e.final_tie_threshold else 0, k, s)
    raise AssertionError("unreachable")


def adjudicate_all(e: CascadeEnsemble, ds: LabeledDataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eager counterpart of :func:`cascade_predict_all`: score everything, then adjudicate."""
    return kernels.adjudicate_batch(all_scores(e, ds), e.range.a, e.range.b, e.final_tie_threshold)


def cascade_predict_all(e: CascadeEnsemble, ds: LabeledDataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised lazy prediction: model k+1 only scores rows model k left in-between.

    Returns (labels, deciding model, deciding score).
    """
    if ds.dim != e.dim:
        raise DataError(f"dimensionality mismatch: ensemble {e.dim}, data {ds.dim}")
    n = len(ds)
    labels = np.zeros(n, dtype=np.int8)
    deciders = np.zeros(n, dtype=np.int64)
    dscores = np.zeros(n, dtype=np.float64)
    pending = np.arange(n)
    last = len(e.models) - 1
    for k, m in enumerate(e.models):
        if pending.size == 0:
            break
        s = kernels.sigmoid(ds.features[pending] @ m.w + m.bias)
        low, high = s < e.range.a, s > e.range.b
        done = low | high if k < last else np.ones_like(low)
        idx = pending[done]
        lab = np.where(low, 0, np.where(high, 1, (s > e.final_tie_threshold).astype(np.int8)))
        labels[idx] = lab[done]
        deciders[idx] = k
        dscores[idx] = s[done]
        pending = pending[~done]
    return labels, deciders, dscores


def all_scores(e: CascadeEnsemble, ds: LabeledDataset) -> np.ndarray:
    """(n, k) matrix of every model's score; the eager oracle for lazy prediction."""
    return np.column_stack([score_all(m, ds) for m in e.models])


@dataclass
class CascadeMetrics:
    n: int
    accuracy: float
    fp_rate: float
    fn_rate: float
    deciding_counts: list[int]
    deciding_accuracy: list[float | None]
    model0_accuracy: float
    correct: int = field(repr=False, default=0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "fp_rate": self.fp_rate,
            "fn_rate": self.fn_rate,
            "deciding_counts": list(self.deciding_counts),
            "deciding_accuracy": list(self.deciding_accuracy),
            "model0_accuracy": self.model0_accuracy,
        }


def evaluate_cascade(e: CascadeEnsemble, ds: LabeledDataset) -> CascadeMetrics:
    """Accuracy, FP/FN (normalised by n, attack = class 0 is the positive) and per-model breakdown."""
    if len(ds) == 0:
        raise DataError("empty dataset")
    labels, deciders, _ = cascade_predict_all(e, ds)
    truth = ds.labels
    ok = labels == truth
    n = len(ds)
    counts, cond = [], []
    for k in range(len(e.models)):
        sel = deciders == k
        c = int(sel.sum())
        counts.append(c)
        cond.append(float(ok[sel].mean()) if c else None)
    m0 = (score_all(e.models[0], ds) > e.final_tie_threshold).astype(np.int8)
    return CascadeMetrics(
        n=n,
        accuracy=float(ok.sum() / n),
        fp_rate=float(np.sum((labels == 0) & (truth == 1)) / n),
        fn_rate=float(np.sum((labels == 1) & (truth == 0)) / n),
        deciding_counts=counts,
        deciding_accuracy=cond,
        model0_accuracy=float(np.sum(m0 == truth) / n),
        correct=int(ok.sum()),
    )
