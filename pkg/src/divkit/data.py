"""Datasets, splits and score ranges shared by every experiment.

Label convention: 1 = clean (score pole near 1), 0 = attack (score pole near 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

CLEAN = 1
ATTACK = 0


class DataError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Demand:
    id: int
    features: tuple[float, ...]

    def __post_init__(self):
        if self.id < 0:
            raise DataError("demand id must be non-negative")
        if not all(np.isfinite(self.features)):
            raise DataError("invalid features")


class LabeledDataset:
    """Immutable array-backed collection of demands with binary labels.

    ``features`` is an (n, dim) float64 array, ``ids`` an int64 array and
    ``labels`` an int8 array; all three are read-only views.
    """

    __slots__ = ("ids", "features", "labels", "dim")

    def __init__(self, ids, features, labels, dim: int | None = None):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1) if dim in (None, 1) else features.reshape(-1, dim)
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        labels_raw = np.asarray(labels).reshape(-1)
        n = len(ids)
        if dim is None:
            dim = features.shape[1] if features.ndim == 2 and features.shape[1] else 0
        if dim < 1:
            raise DataError("dimensionality must be positive")
        if features.shape != (n, dim):
            raise DataError(f"features shape {features.shape} does not match ({n}, {dim})")
        if len(labels_raw) != n:
            raise DataError("labels and demands differ in length")
        if n and not np.all(np.isin(labels_raw, (0, 1))):
            raise DataError("labels must be 0 or 1")
        if not np.all(np.isfinite(features)):
            raise DataError("invalid features")
        if n and ids.min() < 0:
            raise DataError("demand ids must be non-negative")
        if len(np.unique(ids)) != n:
            raise DataError("duplicate demand ids")
        object.__setattr__(self, "ids", _frozen(ids))
        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels_raw.astype(np.int8)))
        object.__setattr__(self, "dim", int(dim))

    def __setattr__(self, name, value):
        raise AttributeError("LabeledDataset is immutable")

    def __reduce__(self):
        return (LabeledDataset, (np.array(self.ids), np.array(self.features), np.array(self.labels), self.dim))

    @classmethod
    def from_demands(cls, demands: Sequence[Demand], labels: Sequence[int], dim: int) -> "LabeledDataset":
        feats = np.array([d.features for d in demands], dtype=np.float64).reshape(len(demands), dim)
        return cls([d.id for d in demands], feats, labels, dim)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[Demand]:
        for i in range(len(self)):
            yield self.demand(i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.features, other.features)
        )

    def __repr__(self) -> str:
        return f"LabeledDataset(n={len(self)}, dim={self.dim})"

    @property
    def demands(self) -> list[Demand]:
        return list(self)

    def demand(self, i: int) -> Demand:
        return Demand(int(self.ids[i]), tuple(float(x) for x in self.features[i]))

    def take(self, index) -> "LabeledDataset":
        """Subset by positional index array or boolean mask, preserving the given order."""
        index = np.asarray(index)
        return LabeledDataset(self.ids[index], self.features[index], self.labels[index], self.dim)

    def concat(self, other: "LabeledDataset") -> "LabeledDataset":
        if other.dim != self.dim:
            raise DataError("dimensionality mismatch")
        return LabeledDataset(
            np.concatenate([self.ids, other.ids]),
            np.vstack([self.features, other.features]),
            np.concatenate([self.labels, other.labels]),
            self.dim,
        )

    def class_counts(self) -> tuple[int, int]:
        ones = int(self.labels.sum())
        return len(self) - ones, ones


@dataclass(frozen=True)
class SplitSpec:
    fractions: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        fr = tuple(float(f) for f in self.fractions)
        object.__setattr__(self, "fractions", fr)
        if not fr or any(not np.isfinite(f) or f <= 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
            raise DataError("invalid split")
        if not 0 <= int(self.seed) < 2**64:
            raise DataError("invalid split")


@dataclass(frozen=True)
class ScoreRange:
    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a <= self.b <= 1.0):
            raise DataError(f"invalid score range [{self.a}, {self.b}]")

    def contains(self, s):
        """Closed-interval membership; boundary scores count as in-between."""
        return (s >= self.a) & (s <= self.b)


def part_sizes(n: int, fractions: Sequence[float]) -> list[int]:
    sizes = [int(np.floor(f * n + 1e-9)) for f in fractions]
    k = len(sizes) - 1
    while sum(sizes) > n:
        if sizes[k] > 0:
            sizes[k] -= 1
        k = (k - 1) % len(sizes)
    for k in range(n - sum(sizes)):
        sizes[k % len(sizes)] += 1
    return sizes


def split_dataset(ds: LabeledDataset, spec: SplitSpec) -> list[LabeledDataset]:
    """Seeded unstratified shuffle followed by contiguous cuts.

    Remainders from non-divisible fractions go to the earliest parts.
    """
    if len(ds) == 0:
        raise DataError("empty dataset")
    if not isinstance(spec, SplitSpec):
        raise DataError("invalid split")
    order = np.random.Generator(np.random.PCG64(spec.seed)).permutation(len(ds))
    parts, start = [], 0
    for size in part_sizes(len(ds), spec.fractions):
        parts.append(ds.take(order[start:start + size]))
        start += size
    return parts
