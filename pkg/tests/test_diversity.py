import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from divkit.data import DataError
from divkit.diversity import (
    ChannelOutcome,
    ChannelResults,
    DifficultyProfile,
    JointFailureTable,
    expected_pair_pfd,
    expected_single_pfd,
    improvement_factor,
    independence_pfd,
    joint_failures,
    pair_pfd,
    pfd,
    population_experiment,
    report_factor,
)


def channel(n, failed_ids, tags=None):
    failed = [i in failed_ids for i in range(n)]
    return ChannelResults(range(n), failed, tags)


def test_joint_failures_examples():
    t = joint_failures(channel(10, {2}), channel(10, {2}))
    assert (t.both_fail, t.both_fail_identical, t.neither) == (1, 1, 9)
    t = joint_failures(channel(10, set()), channel(10, set()))
    assert (t.n, t.both_fail, t.only_a, t.only_b, t.neither) == (10, 0, 0, 0, 10)
    t = joint_failures(channel(10, {1, 2}), channel(10, {2, 3}))
    assert (t.both_fail, t.only_a, t.only_b, t.neither) == (1, 1, 1, 7)
    assert pair_pfd(t) == 0.1


def test_identical_failures_need_equal_tags():
    a = channel(4, {0, 1}, tags=[1, 2, 0, 0])
    b = channel(4, {0, 1}, tags=[1, 3, 0, 0])
    t = joint_failures(a, b)
    assert (t.both_fail, t.both_fail_identical) == (2, 1)
    assert pair_pfd(t, identical_only=True) == 0.25


def test_identical_only_zero():
    t = JointFailureTable(10, 2, 0, 0, 8, 0)
    assert pair_pfd(t, identical_only=True) == 0.0
    assert pair_pfd(t) == 0.2


def test_joint_failures_requires_same_ids():
    with pytest.raises(DataError):
        joint_failures(channel(3, set()), ChannelResults([0, 1, 5], [False] * 3))


def test_table_invariants_enforced():
    with pytest.raises(DataError):
        JointFailureTable(10, 1, 1, 1, 1, 0)
    with pytest.raises(DataError):
        JointFailureTable(10, 1, 0, 0, 9, 2)


def test_pfd():
    assert pfd(channel(10, set())) == 0.0
    assert pfd(channel(10, {3, 4})) == 0.2
    rng = np.random.default_rng(0)
    f = rng.random(777) < 0.3
    assert pfd(ChannelResults(range(777), f)) == sum(bool(x) for x in f) / 777
    with pytest.raises(DataError):
        pfd(ChannelResults([], []))


def test_channel_results_outcome_view():
    outcomes = [ChannelOutcome(3, True, 2), ChannelOutcome(1, False)]
    c = ChannelResults.from_outcomes(outcomes)
    assert c.outcomes == outcomes
    with pytest.raises(DataError):
        ChannelResults([1, 1], [True, False])


def test_independence_and_improvement():
    assert independence_pfd(0.1, 0.1) == pytest.approx(0.01, abs=1e-15)
    assert independence_pfd(0.0, 0.7) == 0.0
    assert independence_pfd(0.2, 0.3) == pytest.approx(0.06, abs=1e-15)
    assert improvement_factor(0.2, 0.1) == 2.0
    assert improvement_factor(0.3, 0.3) == 1.0
    assert math.isinf(improvement_factor(0.2, 0.0))
    assert report_factor(improvement_factor(0.2, 0.0)) == "no-joint-failures"
    with pytest.raises(DataError, match="single channel never fails"):
        improvement_factor(0.0, 0.0)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=300))
def test_pair_bounded_by_margins(rows):
    a = ChannelResults(range(len(rows)), [x for x, _ in rows])
    b = ChannelResults(range(len(rows)), [y for _, y in rows])
    t = joint_failures(a, b)
    pp = pair_pfd(t)
    assert pp <= min(pfd(a), pfd(b))
    if pp > 0:
        assert improvement_factor(pfd(a), pp) >= 1 and improvement_factor(pfd(b), pp) >= 1


def test_expected_pfd_examples():
    const = DifficultyProfile.constant(0.1, 50)
    assert expected_pair_pfd(const) == pytest.approx(0.01, abs=1e-15)
    assert expected_pair_pfd(const) == pytest.approx(independence_pfd(0.1, 0.1), abs=1e-15)
    het = DifficultyProfile([0.2, 0.0])
    assert expected_single_pfd(het) == pytest.approx(0.1, abs=1e-15)
    assert expected_pair_pfd(het) == pytest.approx(0.02, abs=1e-15)
    assert expected_pair_pfd(het) > 0.01
    with pytest.raises(DataError):
        expected_pair_pfd(DifficultyProfile([]))
    with pytest.raises(DataError):
        DifficultyProfile([0.5, 1.2])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=100))
def test_jensen(theta):
    p = DifficultyProfile(theta)
    m = expected_single_pfd(p)
    assert expected_pair_pfd(p) >= independence_pfd(m, m) - 1e-15


def test_profile_cycles():
    p = DifficultyProfile([0.2, 0.0])
    assert p.at(np.arange(5)).tolist() == [0.2, 0.0, 0.2, 0.0, 0.2]


def test_population_all_zero():
    c = population_experiment(DifficultyProfile.constant(0.0, 100), 10, 20, 1)
    assert c.mean_single_pfd == 0 and c.mean_pair_pfd == 0


def test_population_constant_matches_analytic():
    c = population_experiment(DifficultyProfile.constant(0.1, 2000), 200, 1000, 11)
    assert abs(c.mean_pair_pfd - 0.01) <= 3 * c.pair_pfd_se
    assert c.analytic_pair_pfd == pytest.approx(0.01, abs=1e-15)


def test_population_is_deterministic_and_seed_sensitive():
    p = DifficultyProfile.beta_quantiles(0.3, 30, 300)
    assert population_experiment(p, 50, 100, 4) == population_experiment(p, 50, 100, 4)
    assert population_experiment(p, 50, 100, 4) != population_experiment(p, 50, 100, 5)


def test_population_validation():
    p = DifficultyProfile.constant(0.1, 10)
    with pytest.raises(DataError):
        population_experiment(p, 1, 1, 0)
    with pytest.raises(DataError):
        population_experiment(p, 4, 7, 0)  # only 6 distinct pairs


def test_fig2_profile_improvement_in_range():
    p = DifficultyProfile.beta_quantiles(0.3, 30.0, 2000)
    es, ep = expected_single_pfd(p), expected_pair_pfd(p)
    assert 10 <= es / ep <= 1000
    c = population_experiment(p, 2000, 1000, 3)
    assert 10 <= c.empirical_improvement <= 1000
