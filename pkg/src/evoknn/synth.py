"""Synthetic planted-feature datasets for verifiable selection experiments.

Class identity is carried only by a small known set of informative features:
each class mean is a distinct lattice point on those coordinates (scaled by
the separation) and zero elsewhere, with shared Gaussian noise on every
feature.  The planted set is therefore necessary and sufficient for
classification, which makes selection-quality assertions sharp.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import ClassLabel, Dataset


@dataclass(frozen=True)
class SynthSpec:
    n_classes: int = 14
    n_features: int = 117
    informative: tuple[int, ...] = (70, 101, 112)
    class_separation: float = 10.0
    noise_sd: float = 1.0
    train_per_class: int = 10
    test_per_class: int = 5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "informative", tuple(self.informative))
        if self.n_classes < 1 or self.n_features < 1:
            raise ValueError("n_classes and n_features must be positive")
        if not self.informative:
            raise ValueError("informative feature set must be non-empty")
        if len(set(self.informative)) != len(self.informative):
            raise ValueError("informative feature indices must be distinct")
        if any(not 0 <= i < self.n_features for i in self.informative):
            raise ValueError("informative feature index out of range")
        if self.class_separation <= 0 or self.noise_sd <= 0:
            raise ValueError("class_separation and noise_sd must be positive")
        if self.train_per_class < 1 or self.test_per_class < 1:
            raise ValueError("per-class sample counts must be positive")


def _standard_normal(rng: np.random.Generator, count: int) -> np.ndarray:
    # Box-Muller on the generator's uniform stream; only rng.random() is
    # consumed, so draws replay bit-identically across library versions
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps the log finite
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(2.0 * np.pi * u2)
    out[1::2] = radius * np.sin(2.0 * np.pi * u2)
    return out[:count]


def class_means(spec: SynthSpec) -> np.ndarray:
    """Planted mean vectors, one row per class.

    Informative coordinates hold the class index written in the smallest
    base whose digit tuples cover all classes, scaled by the separation, so
    distinct classes always differ by at least one separation step on at
    least one informative feature.  All other coordinates are zero.
    """
    m = len(spec.informative)
    base = 1
    while base**m < spec.n_classes:
        base += 1
    means = np.zeros((spec.n_classes, spec.n_features))
    for c in range(spec.n_classes):
        digits = []
        value = c
        for _ in range(m):
            digits.append(value % base)
            value //= base
        for j, feature in enumerate(spec.informative):
            means[c, feature] = digits[m - 1 - j] * spec.class_separation
    return means


def _sample_block(
    means: np.ndarray, counts: Sequence[int], spec: SynthSpec, rng: np.random.Generator
) -> Dataset:
    # draw order: classes in id order, samples within class, one noise
    # vector per sample
    rows = []
    labels = []
    for c in range(spec.n_classes):
        for _ in range(counts[c]):
            noise = _standard_normal(rng, spec.n_features)
            rows.append(means[c] + spec.noise_sd * noise)
            labels.append(c)
    classes = tuple(ClassLabel(c, f"c{c}") for c in range(spec.n_classes))
    return Dataset(np.asarray(rows), np.asarray(labels), classes)


def generate(spec: SynthSpec) -> tuple[Dataset, Dataset]:
    """Seed-deterministic (train, test) pair with exact per-class counts.

    All training samples are drawn first, then all test samples, from one
    generator seeded with ``spec.seed``.
    """
    rng = np.random.default_rng(spec.seed)
    means = class_means(spec)
    train = _sample_block(means, [spec.train_per_class] * spec.n_classes, spec, rng)
    test = _sample_block(means, [spec.test_per_class] * spec.n_classes, spec, rng)
    return train, test


def generate_pool(spec: SynthSpec, class_counts: Sequence[int]) -> Dataset:
    """One dataset with ``class_counts[c]`` samples of class c.

    Supports uneven per-class sizes (e.g. a pool that is randomly split
    afterwards); the per-class train/test counts in ``spec`` are ignored.
    """
    if len(class_counts) != spec.n_classes:
        raise ValueError("class_counts must list one count per class")
    if any(n < 1 for n in class_counts):
        raise ValueError("class counts must be positive")
    rng = np.random.default_rng(spec.seed)
    return _sample_block(class_means(spec), list(class_counts), spec, rng)
