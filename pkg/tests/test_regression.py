from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from divkit.data import DataError, SplitSpec
from divkit.harness.generate import gen_data, two_blob
from divkit.regression import (
    PredictionRecord,
    correctness_vector,
    ordered_scores,
    regression_diff,
    retraining_experiment,
)
from divkit.scorer import TrainConfig


def rec(i, pred, true, score=0.5):
    return PredictionRecord(i, score, pred, true)


def arms_from_correctness(before, after):
    """All items have true label 1; correct means predicted 1."""
    b = [rec(i, int(c), 1) for i, c in enumerate(before)]
    a = [rec(i, int(c), 1) for i, c in enumerate(after)]
    return b, a


def test_correctness_vector():
    assert correctness_vector([rec(0, 1, 1)]) == [True]
    assert correctness_vector([rec(0, 0, 1)]) == [False]
    mixed = [rec(0, 1, 1), rec(1, 0, 1), rec(2, 0, 0), rec(3, 1, 0)]
    assert correctness_vector(mixed) == [True, False, True, False]


def test_identical_arms():
    b = [rec(i, i % 2, (i // 2) % 2) for i in range(10)]
    r = regression_diff(b, list(b))
    assert (r.regressed, r.repaired) == (0, 0)
    assert r.acc_after == r.acc_before


def test_hand_enumerated_transitions():
    b, a = arms_from_correctness([1, 1, 0, 0], [1, 0, 1, 0])
    r = regression_diff(b, a)
    assert (r.regressed, r.repaired) == (1, 1)
    assert r.regressed_ids == (1,) and r.repaired_ids == (2,)
    assert r.acc_after - r.acc_before == 0


def test_fp_fn_orientation():
    # FP: clean (1) predicted attack (0); FN: attack (0) predicted clean (1)
    before = [rec(0, 0, 1), rec(1, 1, 0), rec(2, 1, 0), rec(3, 1, 1)]
    r = regression_diff(before, before)
    assert r.fp_before == 0.25 and r.fn_before == 0.5


def test_alignment_by_id_not_order():
    b = [rec(0, 1, 1), rec(1, 0, 0), rec(2, 1, 0)]
    a = [rec(2, 0, 0), rec(0, 0, 1), rec(1, 0, 0)]
    r = regression_diff(b, a)
    assert r.regressed_ids == (0,) and r.repaired_ids == (2,)


@pytest.mark.parametrize(
    "after",
    [
        [rec(0, 1, 1), rec(5, 1, 1)],  # id mismatch
        [rec(0, 1, 0), rec(1, 1, 1)],  # truth mismatch
        [rec(0, 1, 1)],  # length
    ],
)
def test_arms_must_agree(after):
    before = [rec(0, 1, 1), rec(1, 1, 1)]
    with pytest.raises(DataError, match="arms disagree on ground truth"):
        regression_diff(before, after)


def test_record_validation():
    with pytest.raises(DataError):
        PredictionRecord(0, 1.5, 1, 1)
    with pytest.raises(DataError):
        PredictionRecord(0, 0.5, 2, 1)


@given(st.lists(st.tuples(st.booleans(), st.booleans(), st.booleans()), min_size=1, max_size=200))
def test_invariants(rows):
    before = [rec(i, int(p ^ (not t)), int(t)) for i, (p, q, t) in enumerate(rows)]
    after = [rec(i, int(q ^ (not t)), int(t)) for i, (p, q, t) in enumerate(rows)]
    r = regression_diff(before, after)
    assert r.accuracy_delta() == Fraction(r.repaired - r.regressed, r.n)
    assert r.regressed + r.repaired <= r.n
    assert len(r.regressed_ids) == r.regressed and len(r.repaired_ids) == r.repaired
    assert not set(r.regressed_ids) & set(r.repaired_ids)
    swapped = regression_diff(after, before)
    assert (swapped.regressed, swapped.repaired) == (r.repaired, r.regressed)


def test_ordered_scores():
    recs = [rec(0, 1, 1, 0.9), rec(1, 0, 0, 0.1), rec(2, 1, 1, 0.5)]
    assert [s for _, s in ordered_scores(recs)] == [0.1, 0.5, 0.9]
    ties = [rec(7, 1, 1, 0.3), rec(2, 1, 1, 0.3), rec(5, 1, 1, 0.3)]
    ranked = ordered_scores(ties)
    assert [r for r, _ in ranked] == [0, 1, 2]
    assert [rec_.demand_id for rec_ in sorted(ties, key=lambda r: (r.score, r.demand_id))] == [2, 5, 7]


def test_ordered_scores_random_permutation():
    rng = np.random.default_rng(0)
    scores = rng.random(1000)
    out = ordered_scores([rec(i, 1, 1, float(s)) for i, s in enumerate(scores)])
    vals = [s for _, s in out]
    assert vals == sorted(scores.tolist())
    assert [r for r, _ in out] == list(range(1000))


def test_retraining_zero_effective_steps():
    ds = gen_data(two_blob(n=500, dim=4, seed=1))
    out = retraining_experiment(
        ds, TrainConfig(), SplitSpec((0.4, 0.4, 0.2), 1), retrain_cfg=TrainConfig(learning_rate=1e-12, epochs=1)
    )
    assert out.report.regressed == 0 and out.report.repaired == 0
    assert out.report.n == 100


def test_retraining_fresh_mode_differs_from_warm():
    ds = gen_data(two_blob(n=500, dim=4, seed=1))
    spec = SplitSpec((0.4, 0.4, 0.2), 1)
    warm = retraining_experiment(ds, TrainConfig(), spec)
    fresh = retraining_experiment(ds, TrainConfig(), spec, fresh=True)
    assert warm.params_before == fresh.params_before
    assert warm.params_after != fresh.params_after


def test_retraining_needs_three_parts():
    ds = gen_data(two_blob(n=50, dim=2, seed=1))
    with pytest.raises(DataError):
        retraining_experiment(ds, TrainConfig(), SplitSpec((0.5, 0.5), 0))


def test_report_serialises_convention():
    b, a = arms_from_correctness([1, 0], [0, 1])
    d = regression_diff(b, a).to_dict()
    assert {"acc_before", "acc_after", "fp_before", "fn_before", "fp_after", "fn_after", "regressed", "repaired"} <= set(d)
    assert "attack (label 0) is positive" in d["rate_convention"]
