"""Masked Euclidean k-nearest-neighbour classification and recognition rate.

All operations are pure functions of immutable inputs; neighbour ordering and
vote ties are fully specified so identical inputs always yield identical
labels, regardless of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset

REJECT = -1  # returned by classify(reject_ties=True) when no class wins the vote


@dataclass(frozen=True)
class FeatureMask:
    """Fixed-length bit string selecting which features enter the metric.

    Bit n corresponds to feature n; the leftmost character of the text form
    is feature 0.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("mask must be a non-empty 1D bit string")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "FeatureMask":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"mask string must be '0'/'1' characters, got {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) == ord("1"))

    @classmethod
    def from_indices(cls, indices: Sequence[int], length: int) -> "FeatureMask":
        bits = np.zeros(length, dtype=bool)
        for i in indices:
            if not 0 <= i < length:
                raise ValueError(f"feature index {i} out of range for length {length}")
            bits[i] = True
        return cls(bits)

    @classmethod
    def full(cls, length: int) -> "FeatureMask":
        return cls(np.ones(length, dtype=bool))

    @property
    def length(self) -> int:
        return self.bits.size

    @property
    def active_count(self) -> int:
        return int(self.bits.sum())

    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_index_string(self) -> str:
        return ",".join(str(i) for i in self.active_indices())

    def __eq__(self, other):
        return isinstance(other, FeatureMask) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())


@dataclass(frozen=True)
class Neighbor:
    sample_index: int
    distance: float
    label: int


def _check_mask(mask: FeatureMask, feature_count: int) -> np.ndarray:
    if mask.length != feature_count:
        raise ValueError(
            f"mask length {mask.length} does not match feature count {feature_count}"
        )
    active = mask.active_indices()
    if active.size == 0:
        raise ValueError("mask has no active features")
    return active


def masked_distance(x, m, mask: FeatureMask) -> float:
    """Euclidean distance over the mask's active coordinates only."""
    x = np.asarray(x, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    if x.shape != m.shape or x.ndim != 1:
        raise ValueError("x and m must be 1D sequences of equal length")
    active = _check_mask(mask, x.size)
    diff = x[active] - m[active]
    return math.sqrt(float(np.dot(diff, diff)))


def _squared_distances(train_active: np.ndarray, x_active: np.ndarray) -> np.ndarray:
    # squared distances are compared internally (monotone in the metric);
    # square roots are taken only where a distance is reported or summed
    diff = train_active - x_active
    return np.einsum("ij,ij->i", diff, diff)


def _nearest_order(d2: np.ndarray) -> np.ndarray:
    # stable sort: equal distances fall back to ascending sample index
    return np.argsort(d2, kind="stable")


def k_nearest(train: Dataset, x, k: int, mask: FeatureMask) -> list[Neighbor]:
    """The k closest training samples, ties broken by ascending sample index."""
    if not 1 <= k <= train.n_samples:
        raise ValueError(f"k must be in 1..{train.n_samples}, got {k}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (train.feature_count,):
        raise ValueError("query length does not match the training feature count")
    active = _check_mask(mask, train.feature_count)
    d2 = _squared_distances(train.features[:, active], x[active])
    order = _nearest_order(d2)[:k]
    return [
        Neighbor(int(i), math.sqrt(float(d2[i])), int(train.labels[i])) for i in order
    ]


def _vote(d2: np.ndarray, labels: np.ndarray, k: int, n_classes: int, reject_ties: bool) -> int:
    idx = _nearest_order(d2)[:k]
    votes = labels[idx]
    counts = np.bincount(votes, minlength=n_classes)
    top = counts.max()
    tied = np.flatnonzero(counts == top)
    if tied.size == 1:
        return int(tied[0])
    if reject_ties:
        return REJECT
    # tie rule: smallest summed distance of the class's voting neighbours,
    # then smallest class id
    dist_sums = np.bincount(votes, weights=np.sqrt(d2[idx]), minlength=n_classes)
    return int(min(tied, key=lambda c: (dist_sums[c], c)))


def classify(
    train: Dataset, x, k: int, mask: FeatureMask, reject_ties: bool = False
) -> int:
    """Plurality vote among the k nearest prototypes; k=1 is minimum-distance.

    With ``reject_ties=True`` an unresolved vote returns ``REJECT`` instead of
    applying the summed-distance/class-id tie rule.
    """
    if not 1 <= k <= train.n_samples:
        raise ValueError(f"k must be in 1..{train.n_samples}, got {k}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (train.feature_count,):
        raise ValueError("query length does not match the training feature count")
    active = _check_mask(mask, train.feature_count)
    d2 = _squared_distances(train.features[:, active], x[active])
    return _vote(d2, train.labels, k, len(train.classes), reject_ties)


def recognition_rate(
    train: Dataset,
    test: Dataset,
    k: int,
    mask: FeatureMask,
    reject_ties: bool = False,
) -> tuple[int, float, list[tuple[int, int]]]:
    """Classify every test sample; returns (hits, hit rate, per-sample pairs).

    ``per_sample`` lists (predicted, actual) label ids in test order, so
    error listings can be reconstructed.  A rejected prediction never counts
    as a hit.
    """
    if train.feature_count != test.feature_count:
        raise ValueError("train and test feature counts differ")
    if train.classes != test.classes:
        raise ValueError("train and test class vocabularies differ")
    if not 1 <= k <= train.n_samples:
        raise ValueError(f"k must be in 1..{train.n_samples}, got {k}")
    active = _check_mask(mask, train.feature_count)
    train_active = train.features[:, active]
    test_active = test.features[:, active]
    n_classes = len(train.classes)

    per_sample: list[tuple[int, int]] = []
    hits = 0
    for row, actual in zip(test_active, test.labels):
        d2 = _squared_distances(train_active, row)
        predicted = _vote(d2, train.labels, k, n_classes, reject_ties)
        per_sample.append((predicted, int(actual)))
        if predicted == actual:
            hits += 1
    return hits, hits / test.n_samples, per_sample
