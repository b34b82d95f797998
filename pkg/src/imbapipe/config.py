"""Experiment configuration: YAML loading, defaults, validation, hashing.

A run is fully described by one config document; every stage artifact is
stamped with the hash of the resolved config so stale or mismatched
intermediates fail loudly instead of being silently reused.  Fields that
cannot change results (output directory, worker count) stay out of the
hash.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import yaml

from .classifiers import FAMILIES, ModelSpec, default_grid
from .resampling import KINDS, ResamplerSpec


class ConfigError(ValueError):
    pass


DEFAULT_ROSTER = (
    "cluster_centroids",
    "cluster_representatives",
    "smote",
    "adasyn",
    "prowsyn",
    "smote_tomek",
    "smote_ipf",
)

DEFAULTS: dict[str, Any] = {
    "dataset": {
        "path": None,
        "label_column": "label",
        "positive_classes": ["Candidate"],
        "normalization": "global",
    },
    "cv": {"folds": 10},
    "resamplers": {"roster": list(DEFAULT_ROSTER), "top": 3},
    "models": {"families": list(FAMILIES), "grids": {}},
    "selection": {"k_min": 5},
    "compare": {
        "pipelines": 5,
        "repetitions": 10,
        "alpha": 0.05,
        "cd_formula": "demsar",
        "basis": "run-mean",
    },
    "importance": {"permutations": 100},
    "ablation": {"families": None, "resamplers": None},
    "seed": 0,
}


# Mappings whose keys are user content (family names), not config schema.
_OPEN_KEYS = {"models.grids"}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and isinstance(value, dict) and where not in _OPEN_KEYS:
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict

    @property
    def dataset_path(self) -> str | None:
        return self.raw["dataset"]["path"]

    @property
    def label_column(self) -> str:
        return self.raw["dataset"]["label_column"]

    @property
    def positive_classes(self) -> tuple[str, ...]:
        return tuple(self.raw["dataset"]["positive_classes"])

    @property
    def per_fold_normalize(self) -> bool:
        return self.raw["dataset"]["normalization"] == "per-fold"

    @property
    def folds(self) -> int:
        return self.raw["cv"]["folds"]

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    @property
    def roster(self) -> list[ResamplerSpec]:
        return [ResamplerSpec(kind) for kind in self.raw["resamplers"]["roster"]]

    @property
    def top_resamplers(self) -> int:
        return self.raw["resamplers"]["top"]

    @property
    def families(self) -> list[str]:
        return list(self.raw["models"]["families"])

    def grid_for(self, family: str) -> list[ModelSpec]:
        override = self.raw["models"]["grids"].get(family)
        if override is None:
            return default_grid(family)
        return [ModelSpec(family, params) for params in override]

    @property
    def k_min(self) -> int:
        return self.raw["selection"]["k_min"]

    @property
    def compare(self) -> dict:
        return self.raw["compare"]

    @property
    def importance_permutations(self) -> int:
        return self.raw["importance"]["permutations"]

    @property
    def ablation_families(self) -> list[str]:
        return list(self.raw["ablation"]["families"] or self.families)

    @property
    def ablation_roster(self) -> list[ResamplerSpec]:
        kinds = self.raw["ablation"]["resamplers"] or self.raw["resamplers"]["roster"]
        return [ResamplerSpec(kind) for kind in kinds]

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.raw, sort_keys=True)


def _validate(raw: dict) -> None:
    ds = raw["dataset"]
    if ds["normalization"] not in ("global", "per-fold"):
        raise ConfigError("dataset.normalization must be 'global' or 'per-fold'")
    if not ds["positive_classes"]:
        raise ConfigError("dataset.positive_classes must not be empty")
    if raw["cv"]["folds"] < 2:
        raise ConfigError("cv.folds must be >= 2")
    if not isinstance(raw["seed"], int):
        raise ConfigError("seed must be an integer (no wall-clock seeding)")
    for kind in raw["resamplers"]["roster"]:
        if kind not in KINDS:
            raise ConfigError(f"unknown resampler kind {kind!r}; known: {sorted(KINDS)}")
    if not 1 <= raw["resamplers"]["top"] <= len(raw["resamplers"]["roster"]):
        raise ConfigError("resamplers.top must be within the roster size")
    for family in raw["models"]["families"]:
        if family not in FAMILIES:
            raise ConfigError(f"unknown model family {family!r}; known: {list(FAMILIES)}")
    for family, grid in raw["models"]["grids"].items():
        if family not in FAMILIES:
            raise ConfigError(f"grid override for unknown family {family!r}")
        if not isinstance(grid, list) or not grid:
            raise ConfigError(f"grid override for {family} must be a non-empty list")
        for params in grid:
            ModelSpec(family, params)  # raises on bad parameters
    if raw["selection"]["k_min"] < 1:
        raise ConfigError("selection.k_min must be >= 1")
    cmp_ = raw["compare"]
    if cmp_["repetitions"] < 2:
        raise ConfigError("compare.repetitions must be >= 2")
    if cmp_["pipelines"] < 2:
        raise ConfigError("compare.pipelines must be >= 2")
    if cmp_["cd_formula"] not in ("demsar", "paper"):
        raise ConfigError("compare.cd_formula must be 'demsar' or 'paper'")
    if cmp_["basis"] not in ("run-mean", "per-fold"):
        raise ConfigError("compare.basis must be 'run-mean' or 'per-fold'")
    if raw["importance"]["permutations"] < 1:
        raise ConfigError("importance.permutations must be >= 1")
    for kind in raw["ablation"]["resamplers"] or []:
        if kind not in KINDS:
            raise ConfigError(f"unknown ablation resampler {kind!r}")
    for family in raw["ablation"]["families"] or []:
        if family not in FAMILIES:
            raise ConfigError(f"unknown ablation family {family!r}")


def make_config(overrides: dict | None = None) -> ExperimentConfig:
    raw = _merge(DEFAULTS, overrides or {})
    _validate(raw)
    return ExperimentConfig(raw=raw)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}")
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config root must be a mapping, got {type(doc).__name__}")
    return make_config(doc)


def resolve_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Config from a YAML file with overrides applied on top.

    ``path`` may be None or the literal string "default" for the built-in
    defaults.  Overrides use the same nested shape as the file.
    """
    base = load_config(path).raw if path not in (None, "default") else DEFAULTS
    raw = _merge(base, overrides or {})
    _validate(raw)
    return ExperimentConfig(raw=raw)
