import pytest

from imbapipe.classifiers import ModelSpec
from imbapipe.config import (
    DEFAULTS,
    ConfigError,
    load_config,
    make_config,
    resolve_config,
)


def test_defaults_validate_cleanly():
    config = make_config()
    assert config.folds == 10
    assert config.seed == 0
    assert config.label_column == "label"
    assert config.positive_classes == ("Candidate",)
    assert not config.per_fold_normalize
    assert [r.kind for r in config.roster] == list(
        DEFAULTS["resamplers"]["roster"]
    )
    assert config.top_resamplers == 3
    assert config.k_min == 5
    assert config.importance_permutations == 100


def test_overrides_merge_into_nested_sections():
    config = make_config({"cv": {"folds": 5}, "seed": 7})
    assert config.folds == 5 and config.seed == 7
    # untouched siblings keep their defaults
    assert config.label_column == "label"


def test_unknown_keys_are_rejected_with_their_path():
    with pytest.raises(ConfigError, match="cv.fodls"):
        make_config({"cv": {"fodls": 5}})
    with pytest.raises(ConfigError, match="colour"):
        make_config({"colour": "red"})


def test_grid_overrides_accept_any_family_key():
    config = make_config(
        {"models": {"grids": {"KNN": [{"k": 1}, {"k": 3}]}}}
    )
    grid = config.grid_for("KNN")
    assert [spec.params["k"] for spec in grid] == [1, 3]
    # families without an override fall back to the built-in grid
    assert config.grid_for("GNB") == [ModelSpec("GNB")]


def test_grid_overrides_are_validated():
    with pytest.raises(ConfigError, match="unknown family"):
        make_config({"models": {"grids": {"XGBeast": [{}]}}})
    with pytest.raises(ConfigError, match="non-empty list"):
        make_config({"models": {"grids": {"KNN": []}}})
    with pytest.raises(Exception):
        make_config({"models": {"grids": {"KNN": [{"kernel": "rbf"}]}}})


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"dataset": {"normalization": "minmax"}}, "normalization"),
        ({"dataset": {"positive_classes": []}}, "positive_classes"),
        ({"cv": {"folds": 1}}, "folds"),
        ({"seed": "now"}, "seed"),
        ({"resamplers": {"roster": ["smote", "rose"]}}, "unknown resampler"),
        ({"resamplers": {"top": 9}}, "top"),
        ({"models": {"families": ["GNB", "CatBoost"]}}, "unknown model family"),
        ({"selection": {"k_min": 0}}, "k_min"),
        ({"compare": {"repetitions": 1}}, "repetitions"),
        ({"compare": {"pipelines": 1}}, "pipelines"),
        ({"compare": {"cd_formula": "tukey"}}, "cd_formula"),
        ({"compare": {"basis": "per-run"}}, "basis"),
        ({"importance": {"permutations": 0}}, "permutations"),
        ({"ablation": {"resamplers": ["rose"]}}, "unknown ablation resampler"),
        ({"ablation": {"families": ["CatBoost"]}}, "unknown ablation family"),
    ],
)
def test_validation_failures(overrides, message):
    with pytest.raises(ConfigError, match=message):
        make_config(overrides)


def test_ablation_sections_fall_back_to_main_lists():
    config = make_config(
        {
            "models": {"families": ["GNB", "KNN"]},
            "resamplers": {"roster": ["smote", "adasyn"], "top": 1},
        }
    )
    assert config.ablation_families == ["GNB", "KNN"]
    assert [r.kind for r in config.ablation_roster] == ["smote", "adasyn"]
    narrowed = make_config({"ablation": {"families": ["DT"], "resamplers": ["smote"]}})
    assert narrowed.ablation_families == ["DT"]
    assert [r.kind for r in narrowed.ablation_roster] == ["smote"]


def test_config_hash_tracks_content_not_key_order():
    a = make_config({"cv": {"folds": 5}, "seed": 3})
    b = make_config({"seed": 3, "cv": {"folds": 5}})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != make_config({"cv": {"folds": 5}}).config_hash()
    assert len(a.config_hash()) == 16


def test_yaml_round_trip_through_a_file(tmp_path):
    original = make_config({"cv": {"folds": 4}, "dataset": {"label_column": "Class"}})
    path = tmp_path / "experiment.yaml"
    path.write_text(original.to_yaml())
    loaded = load_config(str(path))
    assert loaded.raw == original.raw
    assert loaded.config_hash() == original.config_hash()


def test_load_config_failure_modes(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "absent.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("cv: [unclosed")
    with pytest.raises(ConfigError, match="valid YAML"):
        load_config(str(bad))
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(str(scalar))
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config(str(empty)).raw == make_config().raw


def test_resolve_config_accepts_the_default_token(tmp_path):
    assert resolve_config("default").raw == make_config().raw
    assert resolve_config(None).raw == make_config().raw
    path = tmp_path / "exp.yaml"
    path.write_text("cv:\n  folds: 6\n")
    resolved = resolve_config(str(path), {"seed": 11})
    assert resolved.folds == 6 and resolved.seed == 11
