"""Trained-pipeline bundles: final fit, JSON persistence, row prediction.

A bundle is everything the prediction service needs in one JSON document:
the winning pipeline's provenance, the normalizer statistics for exactly
the selected features (in selection order), and the serialized model.
Clients send raw feature values; prediction always normalizes with the
stored statistics before scoring.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .classifiers import TrainedModel, train_model
from .dataset import Dataset, fit_normalizer, normalize_matrix
from .evaluation import EvaluationError, PipelineSpec, select_k_best
from .resampling import resample
from .utils import derive_seed

FORMAT_VERSION = 1

POSITIVE_LABEL = "Candidate"
NEGATIVE_LABEL = "Not candidate"


class BundleError(Exception):
    pass


class BundleInputError(BundleError):
    """A prediction request that cannot be scored; lists the offending names."""

    def __init__(self, message: str, missing=(), unknown=(), non_finite=()):
        self.missing = list(missing)
        self.unknown = list(unknown)
        self.non_finite = list(non_finite)
        super().__init__(message)


@dataclass(frozen=True)
class ModelBundle:
    format_version: int
    created_at: str
    pipeline_id: str
    pipeline: dict
    positive_label: str
    feature_names: tuple[str, ...]
    feature_means: np.ndarray
    feature_stds: np.ndarray
    model: TrainedModel

    def __post_init__(self):
        n = len(self.feature_names)
        if len(self.feature_means) != n or len(self.feature_stds) != n:
            raise BundleError("normalizer statistics do not match the feature list")

    def order_request(self, values: dict) -> np.ndarray:
        """Raw request mapping -> raw vector in bundle feature order."""
        missing = [name for name in self.feature_names if name not in values]
        unknown = [name for name in values if name not in self.feature_names]
        if missing or unknown:
            raise BundleInputError(
                f"missing features: {missing}; unknown features: {unknown}",
                missing=missing,
                unknown=unknown,
            )
        row = np.empty(len(self.feature_names))
        bad = []
        for i, name in enumerate(self.feature_names):
            try:
                row[i] = float(values[name])
            except (TypeError, ValueError):
                bad.append(name)
                continue
            if not math.isfinite(row[i]):
                bad.append(name)
        if bad:
            raise BundleInputError(
                f"non-finite values for: {bad}", non_finite=bad
            )
        return row

    def predict_row(self, values: dict) -> tuple[str, float]:
        raw = self.order_request(values)
        std = np.where(self.feature_stds == 0.0, 1.0, self.feature_stds)
        normalized = (raw - self.feature_means) / std
        normalized[self.feature_stds == 0.0] = 0.0
        score = self.model.predict_score(normalized)
        label = self.positive_label if score > 0.5 else NEGATIVE_LABEL
        return label, float(score)

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "created_at": self.created_at,
            "pipeline_id": self.pipeline_id,
            "pipeline": self.pipeline,
            "positive_label": self.positive_label,
            "features": [
                {
                    "name": name,
                    "mean": float(self.feature_means[i]),
                    "std": float(self.feature_stds[i]),
                }
                for i, name in enumerate(self.feature_names)
            ],
            "model": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelBundle":
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise BundleError(
                f"unsupported bundle format {version!r}; this build reads {FORMAT_VERSION}"
            )
        feats = doc["features"]
        return cls(
            format_version=version,
            created_at=doc["created_at"],
            pipeline_id=doc["pipeline_id"],
            pipeline=doc["pipeline"],
            positive_label=doc["positive_label"],
            feature_names=tuple(f["name"] for f in feats),
            feature_means=np.array([f["mean"] for f in feats]),
            feature_stds=np.array([f["std"] for f in feats]),
            model=TrainedModel.from_dict(doc["model"]),
        )


def train_final(
    dataset: Dataset,
    pipeline: PipelineSpec,
    seed: int = 0,
    created_at: str | None = None,
) -> ModelBundle:
    """Fit the whole pipeline on the full dataset and package it.

    Normalizer and feature selection use all rows; the stored feature list
    is in selection order (best first) for int-k pipelines, original column
    order otherwise.
    """
    if dataset.target is None:
        raise BundleError("dataset labels are not encoded; call encode_labels first")
    norm = fit_normalizer(dataset)
    X = normalize_matrix(dataset.features, norm.mean, norm.std)
    y = dataset.target

    if pipeline.features is None:
        cols = list(range(dataset.n_features))
    elif isinstance(pipeline.features, int):
        cols = [int(i) for i in select_k_best(X, y, pipeline.features)]
    else:
        cols = list(pipeline.features)
        if any(not 0 <= c < dataset.n_features for c in cols):
            raise EvaluationError(f"feature indices out of range: {cols}")

    Xsel = X[:, cols]
    rs = resample(
        pipeline.resampler, Xsel, y, derive_seed(seed, "final", "resample", pipeline.resampler.key())
    )
    model = train_model(
        pipeline.model, rs.features, rs.target, derive_seed(seed, "final", "train", pipeline.model.key())
    )
    if created_at is None:
        created_at = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return ModelBundle(
        format_version=FORMAT_VERSION,
        created_at=created_at,
        pipeline_id=pipeline.identifier(),
        pipeline=pipeline.to_dict(),
        positive_label=POSITIVE_LABEL,
        feature_names=tuple(dataset.feature_names[c] for c in cols),
        feature_means=np.array([norm.mean[c] for c in cols]),
        feature_stds=np.array([norm.std[c] for c in cols]),
        model=model,
    )


def save_bundle(bundle: ModelBundle, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(bundle.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bundle(path: str) -> ModelBundle:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise BundleError(f"bundle file not found: {path}")
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle file {path} is not valid JSON: {exc}")
    return ModelBundle.from_dict(doc)
