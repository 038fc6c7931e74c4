"""Failure-correlation statistics for diverse channel pairs.

The difficulty model: a version drawn at random fails demand d with
probability theta_d, independently of other versions given theta. Two
versions then fail together on d with probability theta_d**2, so a pair's
expected pfd is mean(theta**2), which is never below the independence
prediction mean(theta)**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .data import DataError
from .rng import counter_uniforms, generator

NO_JOINT_FAILURES = "no-joint-failures"


@dataclass(frozen=True)
class ChannelOutcome:
    demand_id: int
    failed: bool
    output_tag: int = 0


class ChannelResults:
    """Per-demand pass/fail record of one channel, array backed."""

    __slots__ = ("ids", "failed", "tags")

    def __init__(self, ids, failed, tags=None):
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        failed = np.asarray(failed, dtype=bool).reshape(-1)
        tags = np.zeros(len(ids), dtype=np.int64) if tags is None else np.asarray(tags, dtype=np.int64).reshape(-1)
        if not (len(ids) == len(failed) == len(tags)):
            raise DataError("channel result arrays differ in length")
        if len(np.unique(ids)) != len(ids):
            raise DataError("duplicate demand ids")
        self.ids, self.failed, self.tags = ids, failed, tags

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[ChannelOutcome]) -> "ChannelResults":
        return cls(
            [o.demand_id for o in outcomes],
            [o.failed for o in outcomes],
            [o.output_tag for o in outcomes],
        )

    @property
    def outcomes(self) -> list[ChannelOutcome]:
        return [ChannelOutcome(int(i), bool(f), int(t)) for i, f, t in zip(self.ids, self.failed, self.tags)]

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class JointFailureTable:
    n: int
    both_fail: int
    only_a: int
    only_b: int
    neither: int
    both_fail_identical: int

    def __post_init__(self):
        if self.both_fail + self.only_a + self.only_b + self.neither != self.n:
            raise DataError("joint failure counts do not sum to n")
        if not 0 <= self.both_fail_identical <= self.both_fail:
            raise DataError("identical failures exceed joint failures")

    @property
    def pfd_a(self) -> float:
        return (self.both_fail + self.only_a) / self.n

    @property
    def pfd_b(self) -> float:
        return (self.both_fail + self.only_b) / self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "both_fail": self.both_fail,
            "only_a": self.only_a,
            "only_b": self.only_b,
            "neither": self.neither,
            "both_fail_identical": self.both_fail_identical,
        }


class DifficultyProfile:
    __slots__ = ("theta",)

    def __init__(self, theta):
        theta = np.asarray(theta, dtype=np.float64).reshape(-1)
        if not np.all((theta >= 0) & (theta <= 1)):
            raise DataError("difficulty values must lie in [0, 1]")
        theta.setflags(write=False)
        self.theta = theta

    def __len__(self) -> int:
        return len(self.theta)

    def at(self, index) -> np.ndarray:
        """Difficulty of demand ``index``; the profile repeats cyclically."""
        return self.theta[np.asarray(index) % len(self.theta)]

    @classmethod
    def constant(cls, value: float, m: int) -> "DifficultyProfile":
        return cls(np.full(m, float(value)))

    @classmethod
    def beta_quantiles(cls, alpha: float, beta: float, m: int) -> "DifficultyProfile":
        """Deterministic profile: the m mid-point quantiles of Beta(alpha, beta)."""
        from scipy.stats import beta as beta_dist

        return cls(beta_dist.ppf((np.arange(m) + 0.5) / m, alpha, beta))


def joint_failures(a: ChannelResults, b: ChannelResults) -> JointFailureTable:
    if len(a) != len(b):
        raise DataError("channels cover different demands")
    oa, ob = np.argsort(a.ids, kind="stable"), np.argsort(b.ids, kind="stable")
    if not np.array_equal(a.ids[oa], b.ids[ob]):
        raise DataError("channels cover different demands")
    fa, fb = a.failed[oa], b.failed[ob]
    both = fa & fb
    return JointFailureTable(
        n=len(a),
        both_fail=int(both.sum()),
        only_a=int((fa & ~fb).sum()),
        only_b=int((~fa & fb).sum()),
        neither=int((~fa & ~fb).sum()),
        both_fail_identical=int((both & (a.tags[oa] == b.tags[ob])).sum()),
    )


def pfd(c: ChannelResults) -> float:
    if len(c) == 0:
        raise DataError("empty channel results")
    return int(c.failed.sum()) / len(c)


def pair_pfd(t: JointFailureTable, identical_only: bool = False) -> float:
    """1-out-of-2 pfd: the pair fails only where both channels fail."""
    if t.n < 1:
        raise DataError("empty joint failure table")
    return (t.both_fail_identical if identical_only else t.both_fail) / t.n


def independence_pfd(pa: float, pb: float) -> float:
    if not (0.0 <= pa <= 1.0 and 0.0 <= pb <= 1.0):
        raise DataError("probabilities must lie in [0, 1]")
    return pa * pb


def improvement_factor(single_pfd: float, pair_pfd: float) -> float:
    """single / pair; ``math.inf`` stands for "no observed joint failures"."""
    if single_pfd <= 0:
        raise DataError("single channel never fails")
    if pair_pfd == 0:
        return math.inf
    return single_pfd / pair_pfd


def report_factor(x: float):
    return NO_JOINT_FAILURES if math.isinf(x) else x


def expected_single_pfd(profile: DifficultyProfile) -> float:
    if len(profile) == 0:
        raise DataError("empty difficulty profile")
    return float(np.mean(profile.theta))


def expected_pair_pfd(profile: DifficultyProfile) -> float:
    if len(profile) == 0:
        raise DataError("empty difficulty profile")
    return float(np.mean(profile.theta ** 2))


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class PopulationCurve:
    n_demands: int
    n_versions: int
    n_pairs: int
    mean_single_pfd: float
    mean_pair_pfd: float
    empirical_improvement: float
    analytic_single_pfd: float
    analytic_pair_pfd: float
    analytic_improvement: float
    pair_pfd_se: float

    def to_dict(self) -> dict:
        return {
            "n_demands": self.n_demands,
            "n_versions": self.n_versions,
            "n_pairs": self.n_pairs,
            "mean_single_pfd": self.mean_single_pfd,
            "mean_pair_pfd": self.mean_pair_pfd,
            "empirical_improvement": report_factor(self.empirical_improvement),
            "analytic_single_pfd": self.analytic_single_pfd,
            "analytic_pair_pfd": self.analytic_pair_pfd,
            "analytic_improvement": report_factor(self.analytic_improvement),
            "pair_pfd_se": self.pair_pfd_se,
        }


def version_failures(profile: DifficultyProfile, n_versions: int, seed: int) -> np.ndarray:
    """(n_versions, m) failure matrix; row v uses its own counter stream."""
    m = len(profile)
    idx = np.arange(m)
    return np.vstack([counter_uniforms(seed, v, idx) < profile.theta for v in range(n_versions)])


def sample_pairs(n_versions: int, n_pairs: int, seed: int) -> np.ndarray:
    iu, iv = np.triu_indices(n_versions, k=1)
    if n_pairs > len(iu):
        raise DataError(f"only {len(iu)} distinct pairs among {n_versions} versions")
    pick = np.sort(generator(seed).choice(len(iu), size=n_pairs, replace=False))
    return np.column_stack([iu[pick], iv[pick]]).astype(np.int64)


def population_experiment(profile: DifficultyProfile, n_versions: int, n_pairs: int, seed: int) -> PopulationCurve:
    if n_versions < 2:
        raise DataError("need at least two versions")
    if n_pairs < 1:
        raise DataError("need at least one pair")
    m = len(profile)
    es, ep = expected_single_pfd(profile), expected_pair_pfd(profile)
    F = version_failures(profile, n_versions, seed)
    pairs = sample_pairs(n_versions, n_pairs, seed)
    single = F.sum(axis=1) / m
    joint = kernels.pair_joint_counts(F, pairs) / m
    mean_single, mean_pair = float(single.mean()), float(joint.mean())
    return PopulationCurve(
        n_demands=m,
        n_versions=n_versions,
        n_pairs=n_pairs,
        mean_single_pfd=mean_single,
        mean_pair_pfd=mean_pair,
        empirical_improvement=improvement_factor(mean_single, mean_pair) if mean_single > 0 else math.nan,
        analytic_single_pfd=es,
        analytic_pair_pfd=ep,
        analytic_improvement=improvement_factor(es, ep) if es > 0 else math.nan,
        pair_pfd_se=binomial_se(ep, n_pairs * m),
    )
