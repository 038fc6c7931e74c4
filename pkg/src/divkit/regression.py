"""Regression faults: items a model got right before retraining and wrong after.

FP/FN orientation: an attack (label 0) is the detection target, so a false
positive is a clean item predicted 0 and a false negative is an attack
predicted 1. Both rates are normalised by the test-set size.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .data import DataError, LabeledDataset, SplitSpec, split_dataset
from .scorer import DEFAULT_THRESHOLD, ScorerParams, TrainConfig, fresh_retrain, label_scores, retrain, score_all, train

RATE_CONVENTION = "attack (label 0) is positive; FP = clean predicted attack, FN = attack predicted clean; rates over n"


@dataclass(frozen=True)
class PredictionRecord:
    demand_id: int
    score: float
    predicted_label: int
    true_label: int

    def __post_init__(self):
        if self.predicted_label not in (0, 1) or self.true_label not in (0, 1):
            raise DataError("labels must be 0 or 1")
        if not 0.0 <= self.score <= 1.0:
            raise DataError("score must lie in [0, 1]")


@dataclass(frozen=True)
class RegressionReport:
    n: int
    acc_before: float
    acc_after: float
    fp_before: float
    fn_before: float
    fp_after: float
    fn_after: float
    regressed: int
    repaired: int
    regressed_ids: tuple[int, ...]
    repaired_ids: tuple[int, ...]
    correct_before: int
    correct_after: int

    @property
    def D(self) -> int:
        return self.regressed

    def accuracy_delta(self) -> Fraction:
        """Exact change in accuracy, equal to (repaired - regressed) / n."""
        return Fraction(self.correct_after - self.correct_before, self.n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "acc_before": self.acc_before,
            "acc_after": self.acc_after,
            "fp_before": self.fp_before,
            "fn_before": self.fn_before,
            "fp_after": self.fp_after,
            "fn_after": self.fn_after,
            "regressed": self.regressed,
            "repaired": self.repaired,
            "regressed_ids": list(self.regressed_ids),
            "repaired_ids": list(self.repaired_ids),
            "rate_convention": RATE_CONVENTION,
        }


def predictions(p: ScorerParams, ds: LabeledDataset, threshold: float = DEFAULT_THRESHOLD) -> list[PredictionRecord]:
    s = score_all(p, ds)
    pred = label_scores(s, threshold)
    return [
        PredictionRecord(int(i), float(sc), int(pl), int(tl))
        for i, sc, pl, tl in zip(ds.ids, s, pred, ds.labels)
    ]


def correctness_vector(preds: Sequence[PredictionRecord]) -> list[bool]:
    return [r.predicted_label == r.true_label for r in preds]


def _arrays(preds: Sequence[PredictionRecord]):
    ids = np.fromiter((r.demand_id for r in preds), dtype=np.int64, count=len(preds))
    pred = np.fromiter((r.predicted_label for r in preds), dtype=np.int8, count=len(preds))
    truth = np.fromiter((r.true_label for r in preds), dtype=np.int8, count=len(preds))
    return ids, pred, truth


def _rates(pred: np.ndarray, truth: np.ndarray) -> tuple[int, float, float]:
    n = len(truth)
    correct = int(np.sum(pred == truth))
    fp = int(np.sum((pred == 0) & (truth == 1)))
    fn = int(np.sum((pred == 1) & (truth == 0)))
    return correct, fp / n, fn / n


def regression_diff(before: Sequence[PredictionRecord], after: Sequence[PredictionRecord]) -> RegressionReport:
    """Diff two prediction arms aligned by demand id."""
    if len(before) != len(after):
        raise DataError("arms disagree on ground truth")
    if not before:
        raise DataError("empty prediction arms")
    ids_b, pred_b, truth_b = _arrays(before)
    ids_a, pred_a, truth_a = _arrays(after)
    if len(np.unique(ids_b)) != len(ids_b):
        raise DataError("duplicate demand ids")
    ob, oa = np.argsort(ids_b, kind="stable"), np.argsort(ids_a, kind="stable")
    if not np.array_equal(ids_b[ob], ids_a[oa]) or not np.array_equal(truth_b[ob], truth_a[oa]):
        raise DataError("arms disagree on ground truth")
    ids = ids_b[ob]
    pb, pa, truth = pred_b[ob], pred_a[oa], truth_b[ob]
    ok_b, ok_a = pb == truth, pa == truth
    reg = ok_b & ~ok_a
    rep = ~ok_b & ok_a
    n = len(ids)
    cb, fpb, fnb = _rates(pb, truth)
    ca, fpa, fna = _rates(pa, truth)
    return RegressionReport(
        n=n,
        acc_before=cb / n,
        acc_after=ca / n,
        fp_before=fpb,
        fn_before=fnb,
        fp_after=fpa,
        fn_after=fna,
        regressed=int(reg.sum()),
        repaired=int(rep.sum()),
        regressed_ids=tuple(int(i) for i in ids[reg]),
        repaired_ids=tuple(int(i) for i in ids[rep]),
        correct_before=cb,
        correct_after=ca,
    )


def ordered_scores(preds: Sequence[PredictionRecord]) -> list[tuple[int, float]]:
    """Scores ascending, ties broken by demand id; ranks start at 0."""
    ranked = sorted(preds, key=lambda r: (r.score, r.demand_id))
    return [(k, r.score) for k, r in enumerate(ranked)]


@dataclass(frozen=True)
class RetrainingOutcome:
    report: RegressionReport
    before: list[PredictionRecord]
    after: list[PredictionRecord]
    params_before: ScorerParams
    params_after: ScorerParams


def retraining_experiment(
    ds: LabeledDataset,
    cfg: TrainConfig,
    spec: SplitSpec,
    threshold: float = DEFAULT_THRESHOLD,
    retrain_cfg: TrainConfig | None = None,
    fresh: bool = False,
) -> RetrainingOutcome:
    """Train on part 1, retrain on parts 1+2, evaluate both on part 3.

    ``fresh=True`` retrains from scratch on the combined data instead of
    continuing from the part-1 model.
    """
    if len(spec.fractions) != 3:
        raise DataError("retraining protocol needs a three-way split")
    part1, part2, test = split_dataset(ds, spec)
    if min(len(part1), len(part2), len(test)) == 0:
        raise DataError("dataset too small for three non-empty parts")
    p0 = train(part1, cfg)
    step = fresh_retrain if fresh else retrain
    p1 = step(p0, part1.concat(part2), retrain_cfg or cfg)
    before = predictions(p0, test, threshold)
    after = predictions(p1, test, threshold)
    return RetrainingOutcome(regression_diff(before, after), before, after, p0, p1)
