import numpy as np
import pytest

from imbapipe.classifiers import (
    FAMILIES,
    UNSUPPORTED_GRID_VALUES,
    ModelError,
    ModelSpec,
    TrainedModel,
    default_grid,
    default_params,
    entropy,
    gini,
    node_impurity,
    split_quality,
    train_model,
)
from imbapipe.classifiers.ensemble import RandomForest
from imbapipe.classifiers.mlp import init_params, loss_and_grads
from imbapipe.classifiers.tree import DecisionTree
from imbapipe.utils import rng_for


def mirrored_blobs(n_per_class=40, d=4, seed=0, gap=3.0):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(-gap / 2, 1.0, size=(n_per_class, d))
    X1 = rng.normal(gap / 2, 1.0, size=(n_per_class, d))
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(n_per_class, dtype=np.int64), np.ones(n_per_class, dtype=np.int64)])
    return X, y


# ---------------------------------------------------------------------------
# spec plumbing


def test_model_spec_fills_in_family_defaults():
    spec = ModelSpec("KNN", {"k": 3})
    assert spec.params == {"k": 3}
    assert ModelSpec("DT").params == default_params("DT")


def test_model_spec_rejects_unknown_family_and_param():
    with pytest.raises(ModelError):
        ModelSpec("XGBeast")
    with pytest.raises(ModelError):
        ModelSpec("KNN", {"kernel": "rbf"})


def test_model_spec_key_is_order_insensitive():
    a = ModelSpec("GB", {"learning_rate": 0.01, "estimators": 10})
    b = ModelSpec("GB", {"estimators": 10, "learning_rate": 0.01})
    assert a.key() == b.key()


def test_grid_sizes_are_frozen():
    want = {
        "LDA": 6,
        "QDA": 1,
        "KNN": 4,
        "GNB": 1,
        "DT": 4,
        "AdaBoost": 4,
        "RF": 8,
        "ET": 8,
        "GB": 24,
        "SVC": 36,
        "MLP": 24,
    }
    assert {f: len(default_grid(f)) for f in FAMILIES} == want


def test_grids_never_contain_unsupported_values():
    for family, axes in UNSUPPORTED_GRID_VALUES.items():
        for name, values in axes.items():
            gridded = {spec.params[name] for spec in default_grid(family)}
            assert gridded.isdisjoint(values), (family, name)


def test_default_params_appear_in_each_multi_point_grid():
    # The untuned configuration should be reachable by the search, except
    # for single-spec families where they trivially coincide.
    for family in FAMILIES:
        grid = default_grid(family)
        keys = {spec.key() for spec in grid}
        assert ModelSpec(family).key() in keys, family


# ---------------------------------------------------------------------------
# impurity helpers


def test_impurity_of_pure_and_even_nodes():
    assert gini([10, 0]) == 0.0
    assert entropy([0, 7]) == 0.0
    assert gini([5, 5]) == pytest.approx(0.5)
    assert entropy([5, 5]) == pytest.approx(1.0)
    assert node_impurity("gini", [3, 1]) == pytest.approx(1.0 - (0.75**2 + 0.25**2))
    with pytest.raises(ValueError):
        node_impurity("twoing", [1, 1])


def test_split_quality_rewards_pure_children():
    assert split_quality("gini", [5, 0], [0, 5]) == 0.0
    assert split_quality("entropy", [5, 0], [0, 5]) == 0.0
    # A useless split reproduces the parent impurity.
    assert split_quality("gini", [5, 5], [5, 5]) == pytest.approx(0.5)
    assert split_quality("entropy", [5, 5], [5, 5]) == pytest.approx(1.0)
    # Weighted average: 8 pure rows, 2 even rows.
    assert split_quality("gini", [8, 0], [1, 1]) == pytest.approx(0.2 * 0.5)


# ---------------------------------------------------------------------------
# hand-checkable single models


def test_knn_k1_memorizes_training_rows():
    X, y = mirrored_blobs(seed=1)
    model = train_model(ModelSpec("KNN", {"k": 1}), X, y, seed=0)
    assert np.array_equal(model.predict_many(X), y)


def test_gnb_midpoint_of_symmetric_classes_scores_half():
    X = np.array([[-1.5], [-1.0], [-0.5], [0.5], [1.0], [1.5]])
    y = np.array([0, 0, 0, 1, 1, 1])
    model = train_model(ModelSpec("GNB"), X, y)
    assert model.predict_score([0.0]) == pytest.approx(0.5, abs=1e-12)
    assert model.predict_score([1.0]) > 0.5
    assert model.predict_score([-1.0]) < 0.5
    assert model.predict([0.0]) == 0  # ties go to class 0


def test_lda_separates_mirrored_blobs():
    X, y = mirrored_blobs(seed=2, gap=4.0)
    model = train_model(ModelSpec("LDA"), X, y)
    assert (model.predict_many(X) == y).mean() >= 0.95


def test_tree_on_constant_features_scores_the_positive_fraction():
    X = np.zeros((8, 3))
    y = np.array([1, 1, 1, 1, 1, 1, 0, 0])
    model = train_model(ModelSpec("DT"), X, y)
    scores = model.score_many(np.zeros((4, 3)))
    assert np.allclose(scores, 0.75)
    assert np.all(model.predict_many(np.zeros((4, 3))) == 1)


def test_tree_finds_the_single_separating_threshold():
    X = np.array([[0.0], [1.0], [2.0], [3.0], [10.0], [11.0], [12.0]])
    y = np.array([0, 0, 0, 0, 1, 1, 1])
    model = train_model(ModelSpec("DT"), X, y)
    root = model.impl.nodes[0]
    assert root[0] == 0  # splits on the only feature
    assert root[1] == pytest.approx(6.5)  # midpoint of 3 and 10
    assert np.array_equal(model.predict_many(X), y)
    assert model.predict([5.0]) == 0 and model.predict([8.0]) == 1


def test_tree_depth_cap_stops_growth():
    X, y = mirrored_blobs(seed=3, gap=0.5)
    stump = train_model(ModelSpec("DT", {"max_depth": 1}), X, y)
    assert len(stump.impl.nodes) <= 3


def test_forest_score_is_the_member_vote_fraction():
    always = lambda label: DecisionTree().fit(np.array([[0.0], [1.0]]), np.array([label, label]))
    forest = RandomForest(trees=3, seed=0)
    forest.members_ = [always(1), always(1), always(0)]
    probe = np.array([[0.5], [2.0]])
    votes = forest.member_predictions(probe)
    assert votes.shape == (3, 2)
    assert np.allclose(forest.score_many(probe), 2.0 / 3.0)


def test_mlp_gradients_match_central_differences_spot_check():
    rng = rng_for(0, "mlp-spot")
    X = rng.normal(size=(12, 5))
    y = (rng.random(12) > 0.5).astype(np.int64)
    params = init_params(5, 4, rng)
    _, grads = loss_and_grads(params, X, y, "tanh")
    h = 1e-6
    for name in ("W1", "b1", "W2", "b2"):
        flat = params[name].reshape(-1)
        i = rng.integers(flat.size)
        orig = flat[i]
        flat[i] = orig + h
        up, _ = loss_and_grads(params, X, y, "tanh")
        flat[i] = orig - h
        down, _ = loss_and_grads(params, X, y, "tanh")
        flat[i] = orig
        numeric = (up - down) / (2 * h)
        assert grads[name].reshape(-1)[i] == pytest.approx(numeric, rel=1e-5, abs=1e-9)


# ---------------------------------------------------------------------------
# cross-family contracts


@pytest.mark.parametrize("family", FAMILIES)
def test_every_family_scores_in_unit_interval(family):
    X, y = mirrored_blobs(n_per_class=30, seed=4)
    spec = ModelSpec(family, {"max_epochs": 20} if family == "MLP" else {})
    model = train_model(spec, X, y, seed=0)
    scores = model.score_many(X)
    assert scores.shape == (60,)
    assert np.all(scores >= 0.0) and np.all(scores <= 1.0)
    assert (model.predict_many(X) == y).mean() >= 0.8, family


@pytest.mark.parametrize("family", FAMILIES)
def test_every_family_round_trips_through_dict(family):
    X, y = mirrored_blobs(n_per_class=20, seed=5)
    spec = ModelSpec(family, {"max_epochs": 10} if family == "MLP" else {})
    model = train_model(spec, X, y, seed=3)
    clone = TrainedModel.from_dict(model.to_dict())
    assert clone.spec == model.spec
    assert np.array_equal(clone.score_many(X), model.score_many(X))


def test_training_is_deterministic_per_seed():
    X, y = mirrored_blobs(n_per_class=25, seed=6)
    spec = ModelSpec("RF", {"trees": 10})
    a = train_model(spec, X, y, seed=9).score_many(X)
    b = train_model(spec, X, y, seed=9).score_many(X)
    assert np.array_equal(a, b)


def test_single_class_training_is_rejected():
    X = np.zeros((5, 2))
    with pytest.raises(ModelError):
        train_model(ModelSpec("GNB"), X, np.ones(5, dtype=np.int64))


def test_predict_score_validates_vector_shape():
    X, y = mirrored_blobs(n_per_class=10, seed=7)
    model = train_model(ModelSpec("KNN"), X, y)
    with pytest.raises(ModelError):
        model.predict_score([1.0, 2.0])
