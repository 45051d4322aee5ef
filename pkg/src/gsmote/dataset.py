"""Binary tabular datasets: CSV loading, min-max scaling and the balancing target."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Raised when a file or array cannot form a valid binary dataset."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus binary labels.

    ``labels`` keeps the original class identifiers (as strings); ``y`` is the
    derived 0/1 encoding with 1 for the minority class.
    """

    features: np.ndarray
    labels: np.ndarray
    minority_label: str
    majority_label: str
    name: str = "dataset"
    y: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels).astype(str)
        if X.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {X.shape}")
        n, p = X.shape
        if p < 1:
            raise DatasetError("at least one feature column is required")
        if n < 2:
            raise DatasetError(f"at least 2 rows are required, got {n}")
        if labels.shape != (n,):
            raise DatasetError(f"labels shape {labels.shape} does not match {n} rows")
        if not np.all(np.isfinite(X)):
            raise DatasetError("features contain missing or non-finite values")
        classes = set(np.unique(labels).tolist())
        if classes != {self.minority_label, self.majority_label}:
            raise DatasetError(
                f"labels {sorted(classes)} do not match minority/majority "
                f"({self.minority_label!r}, {self.majority_label!r})"
            )
        y = (labels == self.minority_label).astype(np.int64)
        if y.sum() > n - y.sum():
            raise DatasetError("minority class is larger than the majority class")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "y", _frozen(y))

    @classmethod
    def from_arrays(cls, features, labels, name: str = "dataset") -> "Dataset":
        """Build a dataset, assigning the rarer class as minority.

        Count ties go to the lexicographically smaller label.
        """
        labels = np.asarray(labels).astype(str)
        values, counts = np.unique(labels, return_counts=True)
        if len(values) != 2:
            raise DatasetError(f"labels are not binary: found {len(values)} classes")
        # np.unique sorts values, so argmin picks the lexicographically first on ties
        minority = str(values[int(np.argmin(counts))])
        majority = str(values[1 - int(np.argmin(counts))])
        return cls(features, labels, minority, majority, name)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def minority_idx(self) -> np.ndarray:
        return np.flatnonzero(self.y == 1)

    @property
    def majority_idx(self) -> np.ndarray:
        return np.flatnonzero(self.y == 0)

    @property
    def n_minority(self) -> int:
        return int(self.y.sum())

    @property
    def n_majority(self) -> int:
        return self.n_samples - self.n_minority

    @property
    def imbalance_ratio(self) -> float:
        return self.n_majority / self.n_minority


def load_csv(path, label_column: str | None = None, name: str | None = None) -> Dataset:
    """Read a headed UTF-8 CSV into a :class:`Dataset`.

    The label column defaults to the last column. Every other cell must parse
    as a finite float; row and column of the first bad cell are reported.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    if label_column is None:
        label_pos = len(header) - 1
    elif label_column in header:
        label_pos = header.index(label_column)
    else:
        raise DatasetError(f"{path}: label column {label_column!r} not in header {header}")
    if len(header) < 2:
        raise DatasetError(f"{path}: need at least one feature column besides the label")
    if len(body) < 2:
        raise DatasetError(f"{path}: at least 2 rows are required, got {len(body)}")

    feature_cols = [j for j in range(len(header)) if j != label_pos]
    X = np.empty((len(body), len(feature_cols)))
    labels = []
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise DatasetError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")
        for out_j, j in enumerate(feature_cols):
            try:
                value = float(row[j])
            except ValueError:
                raise DatasetError(
                    f"{path}: row {i + 2}, column {header[j]!r}: cannot parse {row[j]!r}"
                ) from None
            if not math.isfinite(value):
                raise DatasetError(f"{path}: row {i + 2}, column {header[j]!r}: non-finite value")
            X[i, out_j] = value
        labels.append(row[label_pos])

    n_classes = len(set(labels))
    if n_classes != 2:
        raise DatasetError(f"{path}: labels are not binary ({n_classes} distinct values)")
    return Dataset.from_arrays(X, labels, name=name or path.stem)


def write_csv(dataset: Dataset, path, feature_names=None, label_name: str = "label") -> None:
    """Write features (shortest round-trip float repr) and labels; label last."""
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(dataset.n_features)]
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow([*feature_names, label_name])
        for row, label in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [label])


@dataclass(frozen=True)
class ScalingParams:
    minimum: np.ndarray
    maximum: np.ndarray


def fit_minmax(train) -> ScalingParams:
    """Per-feature min and max of the training rows (a Dataset or an array)."""
    X = np.asarray(getattr(train, "features", train), dtype=float)
    return ScalingParams(_frozen(X.min(axis=0)), _frozen(X.max(axis=0)))


def apply_minmax(params: ScalingParams, features) -> np.ndarray:
    """Map each feature through ``(x - min) / (max - min)``; constant features go to 0.

    Values outside the fitted range fall outside [0, 1]; nothing is clipped.
    """
    X = np.asarray(features, dtype=float)
    span = params.maximum - params.minimum
    safe = np.where(span > 0, span, 1.0)
    out = (X - params.minimum) / safe
    return np.where(span > 0, out, 0.0)


def synthetic_count(d: Dataset) -> int:
    """Number of synthetic minority rows that makes the classes equal in size."""
    return d.n_majority - d.n_minority
