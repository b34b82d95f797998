"""Model zoo: eleven classifier families behind one spec-driven interface.

A :class:`ModelSpec` names a family plus its hyperparameters; train it with
:func:`train_model` and you get back a :class:`TrainedModel` whose
``predict_score`` is always a number in [0, 1] (a probability where the
family has one, a vote fraction for ensembles, a logistic-squashed margin
for the margin-based families).  ``predict`` thresholds that score at 0.5
with ties going to class 0.

:func:`default_grid` returns each family's search grid in a stable,
documented order; :func:`default_params` is the single configuration used
when a family runs untuned.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from ..utils import as_float_matrix, derive_seed
from .bayes import GaussianNB
from .boosting import GradientBoosting
from .discriminant import LinearDiscriminant, QuadraticDiscriminant
from .ensemble import AdaBoost, ExtraTrees, RandomForest
from .mlp import MLP
from .neighbors import KNeighbors
from .svm import PegasosSVC
from .tree import DecisionTree, entropy, gini, node_impurity, split_quality

FAMILIES = ("LDA", "QDA", "KNN", "GNB", "DT", "AdaBoost", "RF", "ET", "GB", "SVC", "MLP")

# Grid axes that appear in the protocol but have no implementation here.
# They are reported as skipped rather than silently dropped.
UNSUPPORTED_GRID_VALUES = {
    "GB": {"booster": ["dart"]},
    "MLP": {"optimizer": ["lbfgs"]},
}


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """A classifier family plus hyperparameters (family defaults applied)."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        merged = dict(default_params(self.family))
        for k, v in self.params.items():
            if k not in merged and k not in _EXTRA_PARAMS.get(self.family, ()):
                raise ModelError(f"{self.family} does not take parameter {k!r}")
            merged[k] = v
        object.__setattr__(self, "params", merged)

    def key(self) -> str:
        return json.dumps({"family": self.family, "params": self.params}, sort_keys=True)

    def label(self) -> str:
        """Short human-readable parameter summary for reports."""
        parts = [f"{k}={v}" for k, v in sorted(self.params.items())]
        return f"{self.family}({', '.join(parts)})" if parts else self.family

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelSpec":
        return cls(family=doc["family"], params=dict(doc.get("params", {})))


_DEFAULTS: dict[str, dict] = {
    "LDA": {"solver": "svd", "shrinkage": "none"},
    "QDA": {},
    "KNN": {"k": 5},
    "GNB": {},
    "DT": {"splitter": "best", "criterion": "gini", "max_depth": None},
    "AdaBoost": {"estimators": 50, "base_depth": 5},
    "RF": {"trees": 100, "criterion": "gini"},
    "ET": {"trees": 100, "criterion": "gini"},
    "GB": {"booster": "gbtree", "learning_rate": 0.1, "estimators": 100},
    "SVC": {"kernel": "rbf", "degree": 3, "C": 1.0},
    "MLP": {"hidden": 100, "activation": "relu", "optimizer": "adam"},
}

# Optional knobs accepted beyond the gridded ones.
_EXTRA_PARAMS: dict[str, tuple[str, ...]] = {
    "GB": ("max_depth", "reg_lambda", "reg_alpha"),
    "SVC": ("coef0", "budget", "iterations"),
    "MLP": ("learning_rate", "batch_size", "max_epochs", "patience", "tol"),
}


def default_params(family: str) -> dict:
    if family not in _DEFAULTS:
        raise ModelError(f"unknown family {family!r}")
    return dict(_DEFAULTS[family])


def default_grid(family: str) -> list[ModelSpec]:
    """The family's hyperparameter grid, in documented evaluation order."""
    if family == "LDA":
        axes = [("solver", ["svd", "lsqr", "eigen"]), ("shrinkage", ["none", "auto"])]
    elif family == "QDA":
        return [ModelSpec("QDA")]
    elif family == "KNN":
        axes = [("k", [1, 3, 5, 9])]
    elif family == "GNB":
        return [ModelSpec("GNB")]
    elif family == "DT":
        axes = [("splitter", ["best", "random"]), ("criterion", ["gini", "entropy"])]
    elif family == "AdaBoost":
        axes = [("estimators", [10, 50, 100, 500])]
    elif family == "RF" or family == "ET":
        axes = [("trees", [10, 100, 500, 1000]), ("criterion", ["gini", "entropy"])]
    elif family == "GB":
        axes = [
            ("booster", ["gbtree", "gblinear"]),
            ("learning_rate", [0.1, 0.01, 0.001, 0.0001]),
            ("estimators", [10, 50, 100]),
        ]
    elif family == "SVC":
        kernels = [("poly", deg) for deg in range(2, 9)] + [("rbf", 3), ("sigmoid", 3)]
        return [
            ModelSpec("SVC", {"kernel": k, "degree": deg, "C": c})
            for (k, deg), c in itertools.product(kernels, [0.1, 1.0, 10.0, 100.0])
        ]
    elif family == "MLP":
        axes = [
            ("hidden", [50, 100, 150, 200]),
            ("activation", ["relu", "tanh", "logistic"]),
            ("optimizer", ["sgd", "adam"]),
        ]
    else:
        raise ModelError(f"unknown family {family!r}")
    names = [name for name, _ in axes]
    combos = itertools.product(*[values for _, values in axes])
    return [ModelSpec(family, dict(zip(names, combo))) for combo in combos]


class TrainedModel:
    """A fitted classifier with validated prediction entry points."""

    def __init__(self, spec: ModelSpec, impl, n_features: int):
        self.spec = spec
        self.impl = impl
        self.n_features = n_features
        self.converged = getattr(impl, "converged", True)

    def score_many(self, X) -> np.ndarray:
        return self.impl.score_many(X)

    def predict_many(self, X) -> np.ndarray:
        return (self.score_many(X) > 0.5).astype(np.int64)

    def predict_score(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.n_features:
            raise ModelError(f"expected a vector of {self.n_features} features")
        return float(self.score_many(x[None, :])[0])

    def predict(self, x) -> int:
        return int(self.predict_score(x) > 0.5)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "n_features": self.n_features,
            "converged": bool(self.converged),
            "state": self.impl.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainedModel":
        spec = ModelSpec.from_dict(doc["spec"])
        impl_cls = _IMPL[spec.family]
        impl = impl_cls.from_dict(doc["state"])
        model = cls(spec, impl, doc["n_features"])
        model.converged = doc["converged"]
        return model


_IMPL = {
    "LDA": LinearDiscriminant,
    "QDA": QuadraticDiscriminant,
    "KNN": KNeighbors,
    "GNB": GaussianNB,
    "DT": DecisionTree,
    "AdaBoost": AdaBoost,
    "RF": RandomForest,
    "ET": ExtraTrees,
    "GB": GradientBoosting,
    "SVC": PegasosSVC,
    "MLP": MLP,
}


def _build(spec: ModelSpec, seed: int):
    p = spec.params
    family = spec.family
    if family == "LDA":
        return LinearDiscriminant(solver=p["solver"], shrinkage=p["shrinkage"])
    if family == "QDA":
        return QuadraticDiscriminant()
    if family == "KNN":
        return KNeighbors(k=p["k"])
    if family == "GNB":
        return GaussianNB()
    if family == "DT":
        return DecisionTree(
            criterion=p["criterion"],
            splitter=p["splitter"],
            max_depth=p["max_depth"],
            seed=seed,
        )
    if family == "AdaBoost":
        return AdaBoost(estimators=p["estimators"], base_depth=p["base_depth"], seed=seed)
    if family == "RF":
        return RandomForest(trees=p["trees"], criterion=p["criterion"], seed=seed)
    if family == "ET":
        return ExtraTrees(trees=p["trees"], criterion=p["criterion"], seed=seed)
    if family == "GB":
        return GradientBoosting(
            booster=p["booster"],
            learning_rate=p["learning_rate"],
            estimators=p["estimators"],
            max_depth=p.get("max_depth", 3),
            reg_lambda=p.get("reg_lambda", 1.0),
            reg_alpha=p.get("reg_alpha", 0.0),
            seed=seed,
        )
    if family == "SVC":
        return PegasosSVC(
            kernel=p["kernel"],
            degree=p["degree"],
            C=p["C"],
            coef0=p.get("coef0", 0.0),
            budget=p.get("budget", 1024),
            iterations=p.get("iterations"),
            seed=seed,
        )
    if family == "MLP":
        return MLP(
            hidden=p["hidden"],
            activation=p["activation"],
            optimizer=p["optimizer"],
            learning_rate=p.get("learning_rate"),
            batch_size=p.get("batch_size", 32),
            max_epochs=p.get("max_epochs", 200),
            patience=p.get("patience", 20),
            tol=p.get("tol", 1e-6),
            seed=seed,
        )
    raise ModelError(f"unknown family {family!r}")


def train_model(spec: ModelSpec, X, y, seed: int = 0) -> TrainedModel:
    """Fit one classifier. Both classes must be present in ``y``."""
    X = as_float_matrix(X)
    if len(np.unique(np.asarray(y))) < 2:
        raise ModelError("training data must contain both classes")
    impl = _build(spec, derive_seed(seed, "model", spec.key()))
    impl.fit(X, y)
    return TrainedModel(spec, impl, X.shape[1])


__all__ = [
    "FAMILIES",
    "UNSUPPORTED_GRID_VALUES",
    "ModelError",
    "ModelSpec",
    "TrainedModel",
    "train_model",
    "default_params",
    "default_grid",
    "gini",
    "entropy",
    "node_impurity",
    "split_quality",
    "DecisionTree",
]
