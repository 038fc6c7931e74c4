import numpy as np
import pytest

from divkit.channels import (
    ChannelSpec,
    Inconsistency,
    Policy,
    RouterSpec,
    SensorReading,
    consistency_check,
    draw_failures,
    route_predict,
    route_predict_all,
    router_metrics,
    simulate_pair,
    simulate_trusted_checker,
    within_se,
)
from divkit.data import DataError, Demand, LabeledDataset
from divkit.diversity import DifficultyProfile, binomial_se, expected_pair_pfd
from divkit.scorer import ScorerParams, classify

from conftest import make_dataset

PLAUSIBLE = (0.5, 100.0)


@pytest.mark.parametrize(
    "reading,reason",
    [
        (SensorReading(True, 5.0), None),
        (SensorReading(False, None), None),
        (SensorReading(False, 3.0), Inconsistency.SPURIOUS_DISTANCE),
        (SensorReading(True, None), Inconsistency.MISSING_DISTANCE),
        (SensorReading(True, 250.0), Inconsistency.IMPLAUSIBLE_DISTANCE),
    ],
)
def test_consistency_check(reading, reason):
    r = consistency_check(reading, PLAUSIBLE)
    assert bool(r) == (reason is None)
    assert r.reason == reason


def test_consistency_interval_must_be_non_empty():
    with pytest.raises(DataError):
        consistency_check(SensorReading(False), (5.0, 1.0))


def test_channel_spec_validation():
    with pytest.raises(DataError):
        ChannelSpec("x")
    with pytest.raises(DataError):
        ChannelSpec("x", p=0.1, profile=DifficultyProfile([0.1]))
    with pytest.raises(DataError):
        ChannelSpec("x", p=1.5)
    with pytest.raises(ValueError):
        ChannelSpec("x", p=0.1, failure_mode="explodes")


def test_zero_probability_channels():
    z = ChannelSpec("z", p=0.0)
    s = simulate_pair(z, z, 1000, seed=1)
    assert s.both_fail_rate == s.either_fail_rate == s.rate_a == 0.0


def test_independent_pair_product_oracle():
    a, b = ChannelSpec("a", p=0.1), ChannelSpec("b", p=0.1)
    s = simulate_pair(a, b, 100_000, seed=5)
    assert within_se(s.both_fail_rate, 0.01, s.n)
    assert s.both_fail_rate <= min(s.rate_a, s.rate_b)


def test_shared_profile_induces_correlation():
    prof = DifficultyProfile([0.2, 0.0])
    a, b = ChannelSpec("a", profile=prof), ChannelSpec("b", profile=prof)
    s = simulate_pair(a, b, 100_000, seed=5)
    expected = expected_pair_pfd(prof)
    assert expected == pytest.approx(0.02)
    assert abs(s.both_fail_rate - expected) <= 3 * binomial_se(expected, s.n)
    assert s.both_fail_rate >= s.rate_a * s.rate_b - 3 * binomial_se(s.rate_a * s.rate_b, s.n)


def test_policy_selects_system_rate():
    a, b = ChannelSpec("a", p=0.2), ChannelSpec("b", p=0.3)
    both = simulate_pair(a, b, 5000, Policy.BOTH_MUST_FAIL, seed=2)
    either = simulate_pair(a, b, 5000, "either-flags", seed=2)
    assert both.system_failure_rate == both.missed_hazard_rate
    assert either.system_failure_rate == either.spurious_flag_rate
    assert both.both_fail_rate == either.both_fail_rate


def test_draws_are_chunk_independent():
    spec = ChannelSpec("a", p=0.37)
    whole = draw_failures(spec, 1000, seed=9, stream=0)
    parts = np.concatenate([draw_failures(spec, 250, seed=9, stream=0, start=s) for s in range(0, 1000, 250)])
    assert np.array_equal(whole, parts)


def test_trusted_checker_extremes():
    perfect = ChannelSpec("c", p=0.0)
    t = simulate_trusted_checker(ChannelSpec("t", p=0.3), perfect, 10_000, seed=1)
    assert t.undermining == 0 and t.caught > 0
    c = ChannelSpec("c", p=0.1)
    t = simulate_trusted_checker(perfect, c, 100_000, seed=1)
    assert t.caught == 0 and t.undermining == 0
    assert within_se(t.rates["nuisance"], 0.1, t.n)


def test_trusted_checker_product_oracle_and_sum():
    t = simulate_trusted_checker(ChannelSpec("t", p=0.05), ChannelSpec("c", p=0.1), 100_000, seed=3)
    assert within_se(t.rates["undermining"], 0.005, t.n)
    assert t.both_correct + t.caught + t.undermining + t.nuisance == t.n
    assert sum(t.rates.values()) == pytest.approx(1.0, abs=1e-12)


def test_simulations_are_seed_deterministic():
    a, b = ChannelSpec("a", p=0.3), ChannelSpec("b", p=0.2)
    assert simulate_pair(a, b, 1000, seed=4) == simulate_pair(a, b, 1000, seed=4)
    assert simulate_pair(a, b, 1000, seed=4) != simulate_pair(a, b, 1000, seed=5)


def test_stats_json_shape():
    d = simulate_pair(ChannelSpec("a", p=0.1), ChannelSpec("b", p=0.2), 100, seed=1).to_dict()
    assert {"n", "rates", "seed", "spec"} <= set(d)


# -- router ------------------------------------------------------------------

def test_route_predict_composition():
    router = ScorerParams((np.log(9.0),), 0.0)  # score 0.9 at x=1
    spec1 = ScorerParams((np.log(4.0),), 0.0)  # score 0.8 at x=1
    r = RouterSpec(router, (ScorerParams((-5.0,), 0.0), spec1))
    assert route_predict(r, Demand(0, (1.0,))) == (1, 1)


def test_identical_specialists_make_route_irrelevant():
    rng = np.random.default_rng(0)
    s = ScorerParams(tuple(rng.normal(size=3)), 0.1)
    for _ in range(50):
        router = ScorerParams(tuple(rng.normal(size=3)), rng.normal())
        d = Demand(0, tuple(rng.normal(size=3)))
        assert route_predict(RouterSpec(router, (s, s)), d)[0] == classify(s, d)


def test_route_predict_matches_eager_oracle():
    rng = np.random.default_rng(1)
    r = RouterSpec(*[ScorerParams(tuple(rng.normal(size=3)), rng.normal()) for _ in range(1)],
                   tuple(ScorerParams(tuple(rng.normal(size=3)), rng.normal()) for _ in range(2)))
    ds = make_dataset(500, 3, seed=2)
    labels, routes = route_predict_all(r, ds)
    for i, d in enumerate(ds):
        route = classify(r.router, d)
        assert routes[i] == route
        assert labels[i] == classify(r.specialists[route], d)
        assert route_predict(r, d) == (labels[i], routes[i])


def test_changing_a_specialist_never_changes_route():
    rng = np.random.default_rng(2)
    router = ScorerParams(tuple(rng.normal(size=2)), 0.0)
    ds = make_dataset(200, 2, seed=3)
    _, r1 = route_predict_all(RouterSpec(router, (ScorerParams.zeros(2), ScorerParams.zeros(2))), ds)
    _, r2 = route_predict_all(RouterSpec(router, (ScorerParams((9.0, 1.0), 3.0), ScorerParams((-1.0, 2.0), 0.0))), ds)
    assert np.array_equal(r1, r2)


def test_router_metrics_perfect_and_constant_router():
    ds = make_dataset(400, 2, seed=4)
    routes = (ds.features[:, 0] > 0).astype(int)
    perfect = RouterSpec(ScorerParams((1.0, 0.0), 0.0), (ScorerParams.zeros(2), ScorerParams.zeros(2)))
    assert router_metrics(perfect, ds, routes).confusion_factor == 0.0
    balanced = np.array([0, 1] * 200)
    always0 = RouterSpec(ScorerParams((0.0, 0.0), -5.0), (ScorerParams.zeros(2), ScorerParams.zeros(2)))
    m = router_metrics(always0, ds, balanced)
    assert m.confusion_factor == 0.5 and m.route_weights == (1.0, 0.0)


def test_router_metrics_decomposition():
    rng = np.random.default_rng(5)
    ds = make_dataset(300, 3, seed=6)
    r = RouterSpec(ScorerParams(tuple(rng.normal(size=3)), 0.2),
                   (ScorerParams(tuple(rng.normal(size=3)), 0.0), ScorerParams(tuple(rng.normal(size=3)), 0.0)))
    m = router_metrics(r, ds, rng.integers(0, 2, 300))
    assert abs(m.accuracy - m.decomposition) <= 1e-12
    assert m.routing_accuracy + m.confusion_factor == pytest.approx(1.0)


def test_router_validation():
    with pytest.raises(DataError):
        RouterSpec(ScorerParams.zeros(2), (ScorerParams.zeros(2),))
    with pytest.raises(DataError):
        RouterSpec(ScorerParams.zeros(2), (ScorerParams.zeros(2), ScorerParams.zeros(3)))
    r = RouterSpec(ScorerParams.zeros(2), (ScorerParams.zeros(2), ScorerParams.zeros(2)))
    with pytest.raises(DataError):
        router_metrics(r, make_dataset(10, 2), [0] * 9)
    assert RouterSpec.from_dict(r.to_dict()) == r
