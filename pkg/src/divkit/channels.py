"""Simulated safety channels: diverse pairs, trusted channel plus checker, and routing.

Channel failures are Bernoulli per demand. Two channels reading the same
``DifficultyProfile`` become positively correlated through the shared theta;
channels with constant ``p`` fail independently.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import DataError, LabeledDataset
from .diversity import DifficultyProfile, binomial_se
from .rng import counter_uniforms
from .scorer import DEFAULT_THRESHOLD, ScorerParams, score, score_all


class FailureMode(str, Enum):
    DETECTION = "detection"
    MEASUREMENT = "measurement"


class Policy(str, Enum):
    BOTH_MUST_FAIL = "both-must-fail"
    EITHER_FLAGS = "either-flags"


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    p: float | None = None
    profile: DifficultyProfile | None = None
    failure_mode: FailureMode = FailureMode.DETECTION

    def __post_init__(self):
        if (self.p is None) == (self.profile is None):
            raise DataError(f"channel {self.name!r}: give exactly one of p or profile")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise DataError(f"channel {self.name!r}: p must lie in [0, 1]")
        object.__setattr__(self, "failure_mode", FailureMode(self.failure_mode))

    def failure_probability(self, index: np.ndarray) -> np.ndarray:
        if self.profile is not None:
            return self.profile.at(index)
        return np.full(len(index), self.p)

    def to_dict(self) -> dict:
        d = {"name": self.name, "failure_mode": self.failure_mode.value}
        if self.p is not None:
            d["p"] = self.p
        else:
            d["profile_size"] = len(self.profile)
            d["profile_mean"] = float(self.profile.theta.mean())
        return d


def draw_failures(spec: ChannelSpec, n: int, seed: int, stream: int, start: int = 0) -> np.ndarray:
    """Failures for demands start..start+n-1; chunking does not change the draws."""
    idx = np.arange(start, start + n, dtype=np.int64)
    return counter_uniforms(seed, stream, idx) < spec.failure_probability(idx)


@dataclass(frozen=True)
class SensorReading:
    detected: bool
    distance: float | None = None


class Inconsistency(str, Enum):
    MISSING_DISTANCE = "missing-distance"
    SPURIOUS_DISTANCE = "spurious-distance"
    IMPLAUSIBLE_DISTANCE = "implausible-distance"


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    reason: Inconsistency | None = None

    def __bool__(self) -> bool:
        return self.consistent


def consistency_check(r: SensorReading, plausible: tuple[float, float]) -> ConsistencyResult:
    """Detection and distance must agree: no object, no distance; an object, a plausible distance."""
    lo, hi = plausible
    if not lo <= hi:
        raise DataError("plausible interval is empty")
    if r.detected:
        if r.distance is None:
            return ConsistencyResult(False, Inconsistency.MISSING_DISTANCE)
        if not lo <= r.distance <= hi:
            return ConsistencyResult(False, Inconsistency.IMPLAUSIBLE_DISTANCE)
        return ConsistencyResult(True)
    if r.distance is not None:
        return ConsistencyResult(False, Inconsistency.SPURIOUS_DISTANCE)
    return ConsistencyResult(True)


@dataclass(frozen=True)
class PairStats:
    n: int
    seed: int
    policy: Policy
    rate_a: float
    rate_b: float
    both_fail_rate: float
    either_fail_rate: float
    a: ChannelSpec
    b: ChannelSpec

    @property
    def missed_hazard_rate(self) -> float:
        return self.both_fail_rate

    @property
    def spurious_flag_rate(self) -> float:
        return self.either_fail_rate

    @property
    def system_failure_rate(self) -> float:
        return self.both_fail_rate if self.policy is Policy.BOTH_MUST_FAIL else self.either_fail_rate

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "policy": self.policy.value,
            "rates": {
                "channel_a": self.rate_a,
                "channel_b": self.rate_b,
                "missed_hazard": self.both_fail_rate,
                "spurious_flag": self.either_fail_rate,
                "system_failure": self.system_failure_rate,
            },
            "spec": {"a": self.a.to_dict(), "b": self.b.to_dict()},
        }


def simulate_pair(a: ChannelSpec, b: ChannelSpec, n_demands: int, policy=Policy.BOTH_MUST_FAIL, seed: int = 0) -> PairStats:
    """Every demand is evaluated as a hazard and as a benign case.

    As a hazard the 1oo2 pair misses it only when both channels fail; as a
    benign demand a single failing channel raises a spurious flag.
    """
    if n_demands < 1:
        raise DataError("n_demands must be at least 1")
    fa = draw_failures(a, n_demands, seed, 0)
    fb = draw_failures(b, n_demands, seed, 1)
    return PairStats(
        n=n_demands,
        seed=seed,
        policy=Policy(policy),
        rate_a=float(fa.mean()),
        rate_b=float(fb.mean()),
        both_fail_rate=float((fa & fb).mean()),
        either_fail_rate=float((fa | fb).mean()),
        a=a,
        b=b,
    )


@dataclass(frozen=True)
class CheckerStats:
    n: int
    seed: int
    both_correct: int
    caught: int
    undermining: int
    nuisance: int
    trusted: ChannelSpec
    checker: ChannelSpec

    def rate(self, count: int) -> float:
        return count / self.n

    @property
    def rates(self) -> dict:
        return {
            "both_correct": self.rate(self.both_correct),
            "caught": self.rate(self.caught),
            "undermining": self.rate(self.undermining),
            "nuisance": self.rate(self.nuisance),
        }

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "counts": {
                "both_correct": self.both_correct,
                "caught": self.caught,
                "undermining": self.undermining,
                "nuisance": self.nuisance,
            },
            "rates": self.rates,
            "spec": {"trusted": self.trusted.to_dict(), "checker": self.checker.to_dict()},
        }


def simulate_trusted_checker(trusted: ChannelSpec, checker: ChannelSpec, n_demands: int, seed: int = 0) -> CheckerStats:
    """Trusted channel produces the output; the checker only raises disagreement flags.

    Outcomes: caught (trusted wrong, checker right), undermining (both wrong,
    no flag), nuisance (trusted right, checker wrong).
    """
    if n_demands < 1:
        raise DataError("n_demands must be at least 1")
    ft = draw_failures(trusted, n_demands, seed, 0)
    fc = draw_failures(checker, n_demands, seed, 1)
    return CheckerStats(
        n=n_demands,
        seed=seed,
        both_correct=int((~ft & ~fc).sum()),
        caught=int((ft & ~fc).sum()),
        undermining=int((ft & fc).sum()),
        nuisance=int((~ft & fc).sum()),
        trusted=trusted,
        checker=checker,
    )


def within_se(observed: float, expected: float, n: int, k: float = 3.0) -> bool:
    se = binomial_se(expected, n)
    return abs(observed - expected) <= k * se if se > 0 else observed == expected


@dataclass(frozen=True)
class RouterSpec:
    router: ScorerParams
    specialists: tuple[ScorerParams, ScorerParams]

    def __post_init__(self):
        object.__setattr__(self, "specialists", tuple(self.specialists))
        if len(self.specialists) != 2:
            raise DataError("router needs exactly two specialists")
        if len({self.router.dim, *(s.dim for s in self.specialists)}) != 1:
            raise DataError("router and specialists disagree on dimensionality")

    @property
    def dim(self) -> int:
        return self.router.dim

    def to_dict(self) -> dict:
        return {"router": self.router.to_dict(), "specialists": [s.to_dict() for s in self.specialists]}

    @classmethod
    def from_dict(cls, d: dict) -> "RouterSpec":
        return cls(ScorerParams.from_dict(d["router"]), tuple(ScorerParams.from_dict(s) for s in d["specialists"]))


def route_predict(r: RouterSpec, d, threshold: float = DEFAULT_THRESHOLD) -> tuple[int, int]:
    """(label, route taken)."""
    route = 1 if score(r.router, d) > threshold else 0
    label = 1 if score(r.specialists[route], d) > threshold else 0
    return label, route


def route_predict_all(r: RouterSpec, ds: LabeledDataset, threshold: float = DEFAULT_THRESHOLD):
    routes = (score_all(r.router, ds) > threshold).astype(np.int8)
    labels = np.empty(len(ds), dtype=np.int8)
    for k in (0, 1):
        sel = routes == k
        if sel.any():
            labels[sel] = (score_all(r.specialists[k], ds.take(sel)) > threshold).astype(np.int8)
    return labels, routes


@dataclass(frozen=True)
class RouterMetrics:
    n: int
    routing_accuracy: float
    confusion_factor: float
    accuracy: float
    route_weights: tuple[float, float]
    route_accuracies: tuple[float | None, float | None]
    decomposition: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "routing_accuracy": self.routing_accuracy,
            "confusion_factor": self.confusion_factor,
            "accuracy": self.accuracy,
            "route_weights": list(self.route_weights),
            "route_accuracies": list(self.route_accuracies),
            "decomposition": self.decomposition,
        }


def router_metrics(r: RouterSpec, ds: LabeledDataset, true_routes, threshold: float = DEFAULT_THRESHOLD) -> RouterMetrics:
    """Routing quality plus end-to-end accuracy split by the route actually taken."""
    true_routes = np.asarray(true_routes).reshape(-1)
    if len(true_routes) != len(ds):
        raise DataError("true_routes not aligned with dataset")
    if len(ds) == 0:
        raise DataError("empty dataset")
    if not np.all(np.isin(true_routes, (0, 1))):
        raise DataError("routes must be 0 or 1")
    labels, routes = route_predict_all(r, ds, threshold)
    ok = labels == ds.labels
    n = len(ds)
    weights, accs = [], []
    for k in (0, 1):
        sel = routes == k
        c = int(sel.sum())
        weights.append(c / n)
        accs.append(float(ok[sel].sum() / c) if c else None)
    decomposition = sum(w * a for w, a in zip(weights, accs) if a is not None)
    misrouted = int(np.sum(routes != true_routes))
    return RouterMetrics(
        n=n,
        routing_accuracy=1.0 - misrouted / n,
        confusion_factor=misrouted / n,
        accuracy=float(ok.sum() / n),
        route_weights=(weights[0], weights[1]),
        route_accuracies=(accs[0], accs[1]),
        decomposition=float(decomposition),
    )
