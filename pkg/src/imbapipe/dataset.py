"""Tabular dataset loading, label encoding, summaries, and normalization.

A :class:`Dataset` is an immutable bundle of a float feature matrix, the
feature names from the CSV header, the raw label strings, and (after
:func:`encode_labels`) a binary target vector.  Normalization is the usual
z-score transform fitted once and applied everywhere, with zero-variance
columns mapping to all zeros instead of dividing by zero.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_LABEL_COLUMN = "label"
DEFAULT_POSITIVE_CLASSES = ("Candidate",)


class DataError(Exception):
    """Base class for dataset-level failures (bad file, bad cell, bad names)."""


class MissingLabelColumn(DataError):
    def __init__(self, column: str, available: Sequence[str]):
        self.column = column
        super().__init__(
            f"label column {column!r} not found; available columns: {list(available)}"
        )


class DuplicateFeatureName(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate feature name {name!r} in header")


class NonNumericCell(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"non-numeric value {value!r} at data row {row}, column {column!r}"
        )


class NonFiniteCell(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"non-finite value {value!r} at data row {row}, column {column!r}"
        )


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus names and labels. Treat all arrays as read-only."""

    features: np.ndarray
    feature_names: tuple[str, ...]
    raw_labels: tuple[str, ...] | None = None
    target: np.ndarray | None = None
    label_column: str = DEFAULT_LABEL_COLUMN

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DataError(f"feature matrix must be 2-D, got shape {X.shape}")
        if len(self.feature_names) != X.shape[1]:
            raise DataError(
                f"{len(self.feature_names)} feature names for {X.shape[1]} columns"
            )
        seen = set()
        for name in self.feature_names:
            if name in seen:
                raise DuplicateFeatureName(name)
            seen.add(name)
        if not np.all(np.isfinite(X)):
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise NonFiniteCell(int(r) + 1, self.feature_names[int(c)], str(X[r, c]))
        X.setflags(write=False)
        object.__setattr__(self, "features", X)
        if self.raw_labels is not None:
            object.__setattr__(self, "raw_labels", tuple(self.raw_labels))
            if len(self.raw_labels) != X.shape[0]:
                raise DataError("raw_labels length does not match row count")
        if self.target is not None:
            t = np.asarray(self.target, dtype=np.int64)
            if t.shape != (X.shape[0],):
                raise DataError("target length does not match row count")
            bad = np.setdiff1d(np.unique(t), [0, 1])
            if bad.size:
                raise DataError(f"target must be binary 0/1, found {bad.tolist()}")
            t.setflags(write=False)
            object.__setattr__(self, "target", t)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(negative count, positive count); requires an encoded target."""
        if self.target is None:
            raise DataError("dataset has no encoded target")
        pos = int(self.target.sum())
        return self.n_rows - pos, pos


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature mean and population standard deviation."""

    feature_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        for attr in ("mean", "std"):
            arr = np.asarray(getattr(self, attr), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NormalizationParams":
        return cls(
            feature_names=tuple(doc["feature_names"]),
            mean=np.asarray(doc["mean"], dtype=np.float64),
            std=np.asarray(doc["std"], dtype=np.float64),
        )


@dataclass(frozen=True)
class SummaryStatistics:
    """Per-feature mean, std, min, quartiles, and max (linear interpolation)."""

    feature_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    minimum: np.ndarray
    p25: np.ndarray
    p50: np.ndarray
    p75: np.ndarray
    maximum: np.ndarray

    COLUMNS = ("mean", "std", "min", "25%", "50%", "75%", "max")

    def row(self, name: str) -> tuple[float, ...]:
        i = self.feature_names.index(name)
        return (
            float(self.mean[i]),
            float(self.std[i]),
            float(self.minimum[i]),
            float(self.p25[i]),
            float(self.p50[i]),
            float(self.p75[i]),
            float(self.maximum[i]),
        )

    def as_rows(self) -> list[tuple[str, tuple[float, ...]]]:
        return [(name, self.row(name)) for name in self.feature_names]


def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCell(row, column, text) from None
    if not math.isfinite(value):
        raise NonFiniteCell(row, column, text)
    return value


def load_csv(path: str | os.PathLike, label_column: str = DEFAULT_LABEL_COLUMN) -> Dataset:
    """Read a header-driven CSV into a Dataset.

    Every column except ``label_column`` must be numeric.  Cell errors are
    reported with their 1-based data row and column name.
    """
    if not os.path.exists(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty file: {path}") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise MissingLabelColumn(label_column, header)
        label_idx = header.index(label_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != label_idx)
        seen = set()
        for name in feature_names:
            if name in seen:
                raise DuplicateFeatureName(name)
            seen.add(name)

        rows: list[list[float]] = []
        labels: list[str] = []
        for row_no, record in enumerate(reader, start=1):
            if not record:
                continue
            if len(record) != len(header):
                raise DataError(
                    f"data row {row_no} has {len(record)} fields, expected {len(header)}"
                )
            values = []
            for i, cell in enumerate(record):
                if i == label_idx:
                    labels.append(cell.strip())
                else:
                    name = header[i]
                    values.append(_parse_cell(cell.strip(), row_no, name))
            rows.append(values)

    if not rows:
        raise DataError(f"no data rows in {path}")
    X = np.asarray(rows, dtype=np.float64)
    return Dataset(
        features=X,
        feature_names=feature_names,
        raw_labels=tuple(labels),
        label_column=label_column,
    )


def encode_labels(
    dataset: Dataset, positive_classes: Iterable[str] = DEFAULT_POSITIVE_CLASSES
) -> Dataset:
    """Collapse raw label strings into a binary target.

    Labels in ``positive_classes`` become 1, everything else 0.
    """
    positive = set(positive_classes)
    if not positive:
        raise DataError("positive class set must not be empty")
    if dataset.raw_labels is None:
        raise DataError("dataset has no raw labels to encode")
    target = np.fromiter(
        (1 if lab in positive else 0 for lab in dataset.raw_labels),
        dtype=np.int64,
        count=dataset.n_rows,
    )
    return Dataset(
        features=dataset.features,
        feature_names=dataset.feature_names,
        raw_labels=dataset.raw_labels,
        target=target,
        label_column=dataset.label_column,
    )


def summarize(dataset: Dataset) -> SummaryStatistics:
    """Describe every feature column. Percentiles interpolate linearly."""
    X = dataset.features
    if X.shape[0] < 1:
        raise DataError("cannot summarize an empty dataset")
    q = np.percentile(X, [25, 50, 75], axis=0)
    return SummaryStatistics(
        feature_names=dataset.feature_names,
        mean=X.mean(axis=0),
        std=X.std(axis=0),
        minimum=X.min(axis=0),
        p25=q[0],
        p50=q[1],
        p75=q[2],
        maximum=X.max(axis=0),
    )


def fit_normalizer(dataset: Dataset) -> NormalizationParams:
    """Fit per-feature z-score parameters (population std, divisor n)."""
    X = dataset.features
    if X.shape[0] < 2:
        raise DataError("normalizer needs at least 2 rows")
    return NormalizationParams(
        feature_names=dataset.feature_names,
        mean=X.mean(axis=0),
        std=X.std(axis=0),
    )


def normalize_matrix(X: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    """(X - mean) / std with zero-std columns mapped to all zeros."""
    safe = np.where(std == 0.0, 1.0, std)
    out = (X - mean) / safe
    if np.any(std == 0.0):
        out[:, std == 0.0] = 0.0
    return out


def apply_normalizer(dataset: Dataset, params: NormalizationParams) -> Dataset:
    """Return a normalized copy of the dataset. Feature names must match."""
    if dataset.feature_names != params.feature_names:
        raise DataError(
            "feature names do not match normalizer: "
            f"{dataset.feature_names[:3]}... vs {params.feature_names[:3]}..."
        )
    X = normalize_matrix(dataset.features, params.mean, params.std)
    return Dataset(
        features=X,
        feature_names=dataset.feature_names,
        raw_labels=dataset.raw_labels,
        target=dataset.target,
        label_column=dataset.label_column,
    )


def write_csv(dataset: Dataset, path: str | os.PathLike) -> None:
    """Write the dataset back out with 17 significant digits per value.

    That precision makes load_csv(write_csv(ds)) bit-exact for float64.
    """
    if dataset.raw_labels is not None:
        labels = dataset.raw_labels
    elif dataset.target is not None:
        labels = tuple(str(int(t)) for t in dataset.target)
    else:
        raise DataError("dataset has no labels to write")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [dataset.label_column])
        for i in range(dataset.n_rows):
            row = [format(v, ".17g") for v in dataset.features[i]]
            row.append(labels[i])
            writer.writerow(row)
