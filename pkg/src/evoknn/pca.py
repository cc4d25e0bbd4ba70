"""Two-component PCA for 2D scatterplot projection.

The top two eigenpairs of the sample covariance matrix (divisor n-1) are
extracted by cyclic threshold-Jacobi rotations, a deterministic iterative
diagonalisation driven until the off-diagonal norm falls below a relative
residual.  Axes follow a fixed sign convention (first component above 1e-12
in magnitude is positive) so repeated fits are bit-identical and degenerate
eigenvalue pairs still resolve to a reproducible basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Dataset
from .knn import FeatureMask


@dataclass(frozen=True)
class ProjectionModel:
    """Mean and the two dominant covariance eigenpairs, full feature length.

    When fitted through a mask, the axes are zero on inactive features, so
    ``project`` stays a plain dot product against full-length samples.
    """

    mean: np.ndarray
    axis1: np.ndarray
    axis2: np.ndarray
    eigenvalue1: float
    eigenvalue2: float

    def __post_init__(self):
        for name in ("mean", "axis1", "axis2"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.mean.shape == self.axis1.shape == self.axis2.shape):
            raise ValueError("mean and axes must share one feature length")
        if not self.eigenvalue1 >= self.eigenvalue2 >= 0.0:
            raise ValueError("eigenvalues must satisfy ev1 >= ev2 >= 0")
        if abs(float(self.axis1 @ self.axis2)) > 1e-9:
            raise ValueError("axes must be orthogonal")
        for axis in (self.axis1, self.axis2):
            if abs(float(axis @ axis) - 1.0) > 1e-9:
                raise ValueError("axes must have unit norm")

    @property
    def feature_count(self) -> int:
        return self.mean.size


def _jacobi_eigh(a: np.ndarray, residual: float, max_sweeps: int = 60):
    """Diagonalise a symmetric matrix by cyclic Jacobi rotations.

    Stops once the off-diagonal Frobenius norm is at most ``residual`` times
    the matrix norm.  Returns (eigenvalues, eigenvector columns) in the
    internal (unsorted) order.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = math.sqrt(float((a * a).sum()))
    if scale == 0.0:
        return np.zeros(n), v
    target = residual * scale
    skip = target / (2.0 * n)  # elements this small cannot keep off-norm above target
    for _ in range(max_sweeps):
        off2 = float((a * a).sum()) - float((np.diagonal(a) ** 2).sum())
        if off2 <= target * target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    root = math.sqrt(theta * theta + 1.0)
                    t = 1.0 / (theta + root) if theta >= 0 else 1.0 / (theta - root)
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                bp = a[p, :].copy()
                bq = a[q, :].copy()
                a[p, :] = c * bp - s * bq
                a[q, :] = s * bp + c * bq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diagonal(a).copy(), v


def _fix_sign(axis: np.ndarray) -> np.ndarray:
    for value in axis:
        if abs(value) > 1e-12:
            return axis if value > 0 else -axis
    return axis


def fit_pca2(
    d: Dataset, mask: Optional[FeatureMask] = None, residual: float = 1e-10
) -> ProjectionModel:
    """Fit the two dominant principal components of a (possibly masked) dataset.

    The covariance uses divisor n-1 over the active features only; the
    resulting axes are embedded back into full feature length with zeros on
    inactive coordinates.
    """
    if d.n_samples < 2:
        raise ValueError("PCA needs at least 2 samples")
    if mask is None:
        indices = np.arange(d.feature_count)
    else:
        if mask.length != d.feature_count:
            raise ValueError("mask length does not match the dataset")
        indices = mask.active_indices()
    if indices.size < 2:
        raise ValueError("PCA needs at least 2 active features")

    x = d.features[:, indices]
    centred = x - x.mean(axis=0)
    cov = centred.T @ centred / (d.n_samples - 1)
    values, vectors = _jacobi_eigh(cov, residual)
    order = np.argsort(-values, kind="stable")[:2]

    axes = np.zeros((2, d.feature_count))
    eigenvalues = []
    for row, j in enumerate(order):
        vec = vectors[:, j]
        vec = vec / math.sqrt(float(vec @ vec))
        axes[row, indices] = vec
        axes[row] = _fix_sign(axes[row])
        eigenvalues.append(max(float(values[j]), 0.0))

    return ProjectionModel(
        mean=d.features.mean(axis=0),
        axis1=axes[0],
        axis2=axes[1],
        eigenvalue1=eigenvalues[0],
        eigenvalue2=eigenvalues[1],
    )


def project(model: ProjectionModel, x) -> tuple[float, float]:
    """Coordinates of one sample on (axis1, axis2), relative to the mean."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.feature_count,):
        raise ValueError("sample length does not match the model")
    centred = x - model.mean
    return float(model.axis1 @ centred), float(model.axis2 @ centred)


def project_rows(model: ProjectionModel, rows: np.ndarray) -> np.ndarray:
    """Project many samples at once; returns an (n, 2) array."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != model.feature_count:
        raise ValueError("rows must be (n, feature_count)")
    centred = rows - model.mean
    return np.column_stack([centred @ model.axis1, centred @ model.axis2])
