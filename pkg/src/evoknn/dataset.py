"""Labelled tabular datasets: CSV loading, splitting, optional min-max scaling."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised when a dataset file or construction violates the format contract."""


@dataclass(frozen=True)
class ClassLabel:
    """A class in the vocabulary: dense id plus its original name."""

    id: int
    name: str


@dataclass(frozen=True)
class Sample:
    """One labelled observation, viewed out of a dataset's storage."""

    features: np.ndarray
    label: int


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix with integer labels and a class vocabulary.

    ``features`` is (n_samples, feature_count) float64, ``labels`` is
    (n_samples,) int with values indexing into ``classes``.  Class ids are
    dense 0..c-1.  All arrays are write-protected after construction so the
    dataset can be shared freely across concurrent readers.
    """

    features: np.ndarray
    labels: np.ndarray
    classes: tuple[ClassLabel, ...] = field(default=())

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labs = np.asarray(self.labels, dtype=np.intp)
        if feats.ndim != 2:
            raise DatasetError("features must be a 2D array")
        if feats.shape[0] == 0:
            raise DatasetError("dataset is empty")
        if labs.shape != (feats.shape[0],):
            raise DatasetError("labels must be one per sample")
        if not np.isfinite(feats).all():
            raise DatasetError("features contain NaN or infinite values")
        classes = tuple(self.classes)
        ids = [c.id for c in classes]
        if ids != list(range(len(classes))):
            raise DatasetError("class ids must be dense 0..c-1 in order")
        names = [c.name for c in classes]
        if len(set(names)) != len(names) or any(not n for n in names):
            raise DatasetError("class names must be unique and non-empty")
        if labs.size and (labs.min() < 0 or labs.max() >= len(classes)):
            raise DatasetError("sample label outside the class vocabulary")
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "classes", classes)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    def sample(self, i: int) -> Sample:
        """Row ``i`` as a Sample (a read-only view, not a copy)."""
        return Sample(self.features[i], int(self.labels[i]))

    def __iter__(self):
        return (self.sample(i) for i in range(self.n_samples))

    def __len__(self) -> int:
        return self.n_samples


def from_rows(rows: Sequence[Sequence[float]], label_names: Sequence[str]) -> Dataset:
    """Build a Dataset from feature rows and per-row label names.

    Class ids are assigned by first appearance, so permuting rows permutes
    samples while ids keep following the first occurrence of each name.
    """
    if len(rows) != len(label_names):
        raise DatasetError("one label per row required")
    order: dict[str, int] = {}
    labels = []
    for name in label_names:
        if name not in order:
            order[name] = len(order)
        labels.append(order[name])
    classes = tuple(ClassLabel(i, n) for n, i in order.items())
    return Dataset(np.asarray(rows, dtype=np.float64), np.asarray(labels), classes)


def load_csv(path, label_column="label", has_header: bool = True) -> Dataset:
    """Load a labelled dataset from a comma-separated file.

    ``label_column`` selects the label column by header name or 0-based
    index (an int, or a digit string when there is no header).  Remaining
    columns become features in file order.  Blank lines are ignored; a
    ragged or non-numeric row is reported with its 1-based row number.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        raw = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not raw:
        raise DatasetError(f"{path}: empty file")

    header: list[str] | None = None
    if has_header:
        header = [cell.strip() for cell in raw[0][1]]
        if len(set(header)) != len(header):
            raise DatasetError(f"{path}: duplicate header names")
        raw = raw[1:]
        if not raw:
            raise DatasetError(f"{path}: no data rows")

    width = len(raw[0][1])
    if width < 2:
        raise DatasetError(f"{path}: need at least one feature column besides the label")
    label_idx = _resolve_label_column(label_column, header, width, path)

    rows: list[list[float]] = []
    names: list[str] = []
    for lineno, row in raw:
        if len(row) != width:
            raise DatasetError(
                f"{path}: ragged row {lineno} has {len(row)} columns, expected {width}"
            )
        names.append(row[label_idx].strip())
        try:
            rows.append(
                [float(cell) for j, cell in enumerate(row) if j != label_idx]
            )
        except ValueError:
            bad = next(
                j for j, cell in enumerate(row)
                if j != label_idx and not _is_float(cell)
            )
            raise DatasetError(
                f"{path}: non-numeric feature value {row[bad]!r} at row {lineno}, column {bad}"
            ) from None
    return from_rows(rows, names)


def _resolve_label_column(label_column, header, width, path) -> int:
    if isinstance(label_column, int):
        idx = label_column
    elif isinstance(label_column, str) and header is not None and label_column in header:
        return header.index(label_column)
    elif isinstance(label_column, str) and label_column.lstrip("-").isdigit():
        idx = int(label_column)
    else:
        raise DatasetError(f"{path}: label column {label_column!r} not found")
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise DatasetError(f"{path}: label column index {label_column} out of range")
    return idx


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_csv(d: Dataset, path, include_header: bool = True, label_name: str = "label") -> None:
    """Write a dataset as CSV (features then a final label-name column).

    Float cells use ``repr`` so finite values round-trip exactly through
    ``load_csv``.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if include_header:
            writer.writerow([f"f{j}" for j in range(d.feature_count)] + [label_name])
        for row, lab in zip(d.features, d.labels):
            writer.writerow([repr(float(v)) for v in row] + [d.classes[lab].name])


def split_random(
    d: Dataset, test_count: int, seed: int, stratified: bool = False
) -> tuple[Dataset, Dataset]:
    """Split off ``test_count`` random samples, fully determined by ``seed``.

    Returns disjoint (train, test) whose union is the input; both parts keep
    the complete class vocabulary even when a class ends up with no test
    samples.  ``stratified=True`` allocates per-class test counts by largest
    remainder of the class proportions instead of uniform sampling.
    """
    n = d.n_samples
    if not 0 < test_count < n:
        raise DatasetError(f"test_count must be in 1..{n - 1}, got {test_count}")
    rng = np.random.default_rng(seed)
    if stratified:
        test_idx = _stratified_pick(d.labels, len(d.classes), test_count, rng)
    else:
        test_idx = rng.permutation(n)[:test_count]
    test_mask = np.zeros(n, dtype=bool)
    test_mask[test_idx] = True
    train = Dataset(d.features[~test_mask], d.labels[~test_mask], d.classes)
    test = Dataset(d.features[test_mask], d.labels[test_mask], d.classes)
    return train, test


def _stratified_pick(labels, n_classes, test_count, rng) -> np.ndarray:
    counts = np.bincount(labels, minlength=n_classes)
    exact = counts * (test_count / labels.size)
    take = np.floor(exact).astype(int)
    # largest-remainder rounding, ties by class id; never exceed class size
    remainders = exact - take
    for c in np.lexsort((np.arange(n_classes), -remainders)):
        if take.sum() >= test_count:
            break
        if take[c] < counts[c]:
            take[c] += 1
    picked = []
    for c in range(n_classes):
        members = np.flatnonzero(labels == c)
        picked.extend(rng.permutation(members)[: take[c]])
    return np.asarray(sorted(picked), dtype=np.intp)


def unify_vocabulary(a: Dataset, b: Dataset) -> tuple[Dataset, Dataset]:
    """Remap two datasets onto one shared class vocabulary, matching by name.

    Needed after loading train/test from separate files, where first-appearance
    ids were assigned per file.  ``a``'s ordering wins; names only present in
    ``b`` are appended.
    """
    order: dict[str, int] = {c.name: c.id for c in a.classes}
    for c in b.classes:
        if c.name not in order:
            order[c.name] = len(order)
    classes = tuple(ClassLabel(i, n) for n, i in order.items())
    remap_b = np.asarray([order[c.name] for c in b.classes], dtype=np.intp)
    a2 = Dataset(a.features, a.labels, classes)
    b2 = Dataset(b.features, remap_b[b.labels], classes)
    return a2, b2


def normalize_minmax(
    train: Dataset, others: Sequence[Dataset] = ()
) -> tuple[Dataset, list[Dataset], tuple[np.ndarray, np.ndarray]]:
    """Affinely map each feature so the train min/max land on 0/1.

    The train-set bounds are applied unchanged to ``others``, so their values
    may fall outside [0, 1].  Constant train features map to 0 everywhere.
    Returns (scaled train, scaled others, (per-feature min, per-feature max)).
    """
    lo = train.features.min(axis=0)
    hi = train.features.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)

    def apply(d: Dataset) -> Dataset:
        scaled = (d.features - lo) / safe
        scaled[:, span == 0] = 0.0
        return Dataset(scaled, d.labels, d.classes)

    return apply(train), [apply(d) for d in others], (lo.copy(), hi.copy())
