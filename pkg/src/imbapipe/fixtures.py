"""Synthetic datasets shaped like the rockfall inventories.

The real TLS inventories are proprietary, so these generators mimic their
shapes: row/column/class counts match, feature names match the published
attribute list, and the class structure is two overlapping Gaussian
clusters (candidates vs everything else) plus pure-noise columns.  They
are shape mimics for exercising the pipeline, not reconstructions.

Every draw comes from one seeded generator in a fixed order, so a given
(generator, seed) pair always emits the identical dataset.
"""

from __future__ import annotations

import numpy as np

from .dataset import DEFAULT_LABEL_COLUMN as LABEL_COLUMN, Dataset
from .utils import rng_for

POSITIVE_LABEL = "Candidate"
NEGATIVE_LABELS = ("Limit_effect", "Unknow", "Vegetation", "Precursor")

# (name, base mean, base scale, positive shift in scale units)
_DEGOTALLS_COLUMNS = (
    ("x", 500.0, 120.0, 0.0),
    ("y", 300.0, 80.0, 0.0),
    ("z", 80.0, 30.0, 0.0),
    ("n_points", 240.0, 90.0, 0.9),
    ("n_order", 3.0, 1.2, 0.0),
    ("volume", 0.8, 0.5, 1.3),
    ("positive_volume", 0.5, 0.3, 0.3),
    ("negative_volume", 0.3, 0.2, 0.0),
    ("area", 1.6, 0.7, 1.1),
    ("class_1_mean", 0.45, 0.12, 0.4),
    ("class_1_sigma", 0.10, 0.04, 0.0),
    ("class_2_mean", 0.38, 0.11, 0.0),
    ("class_2_sigma", 0.09, 0.03, 0.0),
    ("class_3_mean", 0.30, 0.10, 0.0),
    ("class_3_sigma", 0.08, 0.03, 0.0),
    ("class_4_mean", 0.22, 0.09, 0.0),
    ("class_4_sigma", 0.07, 0.03, 0.0),
    ("n_orientations_o", 14.0, 5.0, 0.0),
    ("intensity_mean_o", 1300.0, 260.0, 0.7),
    ("intensity_sigma_o", 180.0, 60.0, 0.0),
    ("intensity_mean_d", 1150.0, 240.0, 0.2),
    ("intensity_sigma_d", 160.0, 55.0, 0.0),
    ("correlation_i", 0.1, 0.35, -0.4),
    ("orientation_mean_o", 180.0, 70.0, 0.0),
    ("slope_mean_o", 55.0, 14.0, 0.6),
    ("orientation_mean_d", 175.0, 68.0, 0.0),
    ("slope_mean_d", 52.0, 13.0, 0.0),
    ("coplanararity_i_mean_o", 0.62, 0.15, -0.3),
    ("coplanararity_i_sigma_o", 0.12, 0.05, 0.0),
    ("colinearity_i_mean_o", 0.40, 0.13, 0.0),
    ("colinearity_i_sigma_o", 0.10, 0.04, 0.0),
    ("coplanararity_i_mean_d", 0.58, 0.14, 0.0),
    ("coplanararity_i_sigma_d", 0.11, 0.05, 0.0),
    ("colinearity_i_mean_d", 0.37, 0.12, 0.0),
    ("colinearity_i_sigma_d", 0.09, 0.04, 0.0),
    ("angles_mean", 42.0, 12.0, 0.5),
    ("angles_sigma", 9.0, 3.5, 0.0),
)

# Castellfollit rows lack the change-volume and downsampled-orientation
# attributes of the Degotalls export.
_CASTELLFOLLIT_DROPPED = {
    "volume",
    "positive_volume",
    "negative_volume",
    "n_orientations_o",
    "orientation_mean_d",
    "slope_mean_d",
}
_CASTELLFOLLIT_COLUMNS = tuple(
    col for col in _DEGOTALLS_COLUMNS if col[0] not in _CASTELLFOLLIT_DROPPED
)

# Mild per-subclass flavor on a few columns so the negative side is not one
# perfectly homogeneous blob (shifts are small against the candidate shift).
_SUBCLASS_SHIFTS = {
    "Vegetation": {"class_2_mean": 0.3, "colinearity_i_mean_o": 0.25},
    "Precursor": {"intensity_mean_o": 0.3, "volume": 0.2},
}

DEGOTALLS_FEATURES = tuple(col[0] for col in _DEGOTALLS_COLUMNS)
CASTELLFOLLIT_FEATURES = tuple(col[0] for col in _CASTELLFOLLIT_COLUMNS)

_DEGOTALLS_NEGATIVES = (
    ("Limit_effect", 1530),
    ("Unknow", 2840),
    ("Vegetation", 1020),
    ("Precursor", 549),
)
_CASTELLFOLLIT_NEGATIVES = (
    ("Limit_effect", 2660),
    ("Unknow", 5120),
    ("Vegetation", 1780),
    ("Precursor", 773),
)


def _gaussian_mimic(columns, class_counts, seed: int, tag: str) -> Dataset:
    rng = rng_for(seed, "fixture", tag)
    blocks = []
    labels = []
    for label, count in class_counts:
        rows = np.empty((count, len(columns)))
        for j, (name, mean, scale, pos_shift) in enumerate(columns):
            center = mean
            if label == POSITIVE_LABEL:
                center = mean + pos_shift * scale
            center += _SUBCLASS_SHIFTS.get(label, {}).get(name, 0.0) * scale
            rows[:, j] = rng.normal(center, scale, size=count)
        blocks.append(rows)
        labels.extend([label] * count)
    features = np.vstack(blocks)
    order = rng.permutation(len(labels))
    return Dataset(
        feature_names=tuple(name for name, *_ in columns),
        features=features[order],
        raw_labels=tuple(np.array(labels, dtype=object)[order].tolist()),
        label_column=LABEL_COLUMN,
    )


def make_degotalls_like(seed: int = 0) -> Dataset:
    """6004 rows, 37 features, 65 candidates (the main survey site shape)."""
    counts = ((POSITIVE_LABEL, 65),) + _DEGOTALLS_NEGATIVES
    return _gaussian_mimic(_DEGOTALLS_COLUMNS, counts, seed, "degotalls")


def make_castellfollit_like(seed: int = 0) -> Dataset:
    """10371 rows, 31 features, 38 candidates (the second survey site shape)."""
    counts = ((POSITIVE_LABEL, 38),) + _CASTELLFOLLIT_NEGATIVES
    return _gaussian_mimic(_CASTELLFOLLIT_COLUMNS, counts, seed, "castellfollit")


def make_signal_fixture(
    n: int = 400,
    d: int = 20,
    informative: int = 3,
    positive_rate: float = 0.25,
    separation: float = 1.8,
    seed: int = 0,
) -> Dataset:
    """Small fixture whose label depends on exactly the first ``informative``
    features; the remaining columns are independent noise.

    Positives are shifted by ``separation`` scale units on every informative
    column, giving a known ground truth for selection and importance tests.
    """
    if not 1 <= informative <= d:
        raise ValueError("informative must be in 1..d")
    rng = rng_for(seed, "fixture", "signal", n, d, informative)
    n_pos = max(1, int(round(n * positive_rate)))
    n_neg = n - n_pos
    X = rng.normal(0.0, 1.0, size=(n, d))
    X[:n_pos, :informative] += separation
    labels = [POSITIVE_LABEL] * n_pos + ["Unknow"] * n_neg
    order = rng.permutation(n)
    return Dataset(
        feature_names=tuple(f"f{j}" for j in range(d)),
        features=X[order],
        raw_labels=tuple(np.array(labels, dtype=object)[order].tolist()),
        label_column=LABEL_COLUMN,
    )


FIXTURES = {
    "degotalls-like": make_degotalls_like,
    "castellfollit-like": make_castellfollit_like,
}
