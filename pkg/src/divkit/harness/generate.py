"""Synthetic labelled data: Gaussian class clusters with an optional hard region."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm

from ..data import DataError, LabeledDataset
from ..rng import generator


@dataclass(frozen=True)
class GeneratorSpec:
    """Equal-prior two-class mixture.

    The hard region is a pair of opposite-label clusters sharing
    ``hard_center``. Each is nudged by ``hard_offset`` along the class axis
    *against* its class (class 1 toward the class-0 centre), so a model fitted
    to the main clusters scores them in-between and mostly wrong, while a
    model trained on that region alone can still separate them.
    """

    n: int
    dim: int
    center0: tuple[float, ...]
    center1: tuple[float, ...]
    spread0: float = 0.5
    spread1: float = 0.5
    hard_weight: float = 0.0
    hard_center: tuple[float, ...] | None = None
    hard_offset: float = 0.3
    hard_spread: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "center0", tuple(float(c) for c in self.center0))
        object.__setattr__(self, "center1", tuple(float(c) for c in self.center1))
        if self.hard_center is not None:
            object.__setattr__(self, "hard_center", tuple(float(c) for c in self.hard_center))
        if self.n < 2 or self.dim < 1:
            raise DataError("generator needs n >= 2 and dim >= 1")
        if len(self.center0) != self.dim or len(self.center1) != self.dim:
            raise DataError("cluster centres must have length dim")
        if self.hard_center is not None and len(self.hard_center) != self.dim:
            raise DataError("hard_center must have length dim")
        if min(self.spread0, self.spread1, self.hard_spread) <= 0:
            raise DataError("spreads must be positive")
        if not 0.0 <= self.hard_weight < 1.0:
            raise DataError("hard_weight must lie in [0, 1)")
        if self.hard_offset < 0:
            raise DataError("hard_offset must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("center0", "center1", "hard_center"):
            if d[k] is not None:
                d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        d = dict(d)
        preset = d.pop("preset", None)
        if preset is not None:
            return preset_spec(preset, **d)
        try:
            return cls(**d)
        except TypeError as exc:
            raise DataError(f"bad generator spec: {exc}") from exc


def two_blob(n: int = 5000, dim: int = 20, spread: float = 0.5, separation: float = 2.0, seed: int = 2024) -> GeneratorSpec:
    """Centres at +/- separation/2 along the all-ones diagonal."""
    c = separation / (2.0 * math.sqrt(dim))
    return GeneratorSpec(n, dim, (-c,) * dim, (c,) * dim, spread, spread, seed=seed)


def hard_region(n: int = 4000, dim: int = 4, hard_weight: float = 0.3, seed: int = 2024) -> GeneratorSpec:
    return GeneratorSpec(
        n, dim, (-1.5,) * dim, (1.5,) * dim, 0.5, 0.5,
        hard_weight=hard_weight, hard_center=(0.0,) * dim, hard_offset=0.3, hard_spread=0.5, seed=seed,
    )


PRESETS = {"two-blob": two_blob, "hard-region": hard_region}


def preset_spec(name: str, **overrides) -> GeneratorSpec:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise DataError(f"unknown generator preset {name!r}; choose from {sorted(PRESETS)}") from None
    try:
        return factory(**overrides)
    except TypeError as exc:
        raise DataError(f"bad overrides for preset {name!r}: {exc}") from exc


def gen_data(spec: GeneratorSpec) -> LabeledDataset:
    rng = generator(spec.seed)
    n, dim = spec.n, spec.dim
    labels = rng.integers(0, 2, n).astype(np.int8)
    hard = rng.random(n) < spec.hard_weight
    noise = rng.standard_normal((n, dim))
    c0, c1 = np.array(spec.center0), np.array(spec.center1)
    X = np.where(labels[:, None] == 1, c1 + spec.spread1 * noise, c0 + spec.spread0 * noise)
    if hard.any():
        axis = c1 - c0
        norm_ = np.linalg.norm(axis)
        u = axis / norm_ if norm_ > 0 else np.eye(dim)[0]
        hc = np.array(spec.hard_center) if spec.hard_center is not None else (c0 + c1) / 2
        sign = np.where(labels[hard] == 1, -1.0, 1.0)
        X[hard] = hc + spec.hard_offset * sign[:, None] * u + spec.hard_spread * noise[hard]
    return LabeledDataset(np.arange(n), X, labels, dim)


def bayes_accuracy(spec: GeneratorSpec) -> float:
    """Closed-form optimum for equal-spread isotropic clusters without a hard region."""
    if spec.hard_weight > 0 or spec.spread0 != spec.spread1:
        raise DataError("closed form needs equal spreads and no hard region")
    gap = np.linalg.norm(np.array(spec.center1) - np.array(spec.center0))
    return float(norm.cdf(gap / (2.0 * spec.spread0)))


@dataclass(frozen=True)
class RoutedSpec:
    """Two operating regimes (e.g. straight vs corner) whose class boundaries point opposite ways.

    Feature 0 carries the regime at +/- ``route_separation`` with unit noise;
    feature 1 carries the class at +/- ``class_separation``, with the sign
    flipped in regime 1. Remaining features are noise.
    """

    n: int = 4000
    dim: int = 4
    route_separation: float = 1.5
    class_separation: float = 1.0
    spread: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.dim < 2:
            raise DataError("routed generator needs n >= 2 and dim >= 2")
        if self.spread <= 0:
            raise DataError("spread must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def gen_routed(spec: RoutedSpec) -> tuple[LabeledDataset, np.ndarray]:
    rng = generator(spec.seed)
    n = spec.n
    routes = rng.integers(0, 2, n).astype(np.int8)
    labels = rng.integers(0, 2, n).astype(np.int8)
    X = spec.spread * rng.standard_normal((n, spec.dim))
    X[:, 0] = np.where(routes == 1, spec.route_separation, -spec.route_separation) + rng.standard_normal(n)
    flip = np.where(routes == 1, -1.0, 1.0)
    X[:, 1] += flip * np.where(labels == 1, spec.class_separation, -spec.class_separation)
    return LabeledDataset(np.arange(n), X, labels, spec.dim), routes
