import json
import os

import pytest
from click.testing import CliRunner

from imbapipe.cli import main
from imbapipe.dataset import write_csv


@pytest.fixture()
def runner():
    return CliRunner()


def write_experiment(tmp_path, signal, **tweaks):
    """Drop a small dataset and a cheap experiment config into tmp_path."""
    data_path = tmp_path / "signal.csv"
    write_csv(signal, str(data_path))
    lines = [
        "dataset:",
        f"  path: {data_path}",
        "cv:",
        "  folds: 3",
        "resamplers:",
        "  roster: [smote]",
        "  top: 1",
        "models:",
        "  families: [GNB, KNN]",
        "  grids:",
        "    KNN:",
        "      - {k: 3}",
        "selection:",
        "  k_min: 18",
        "compare:",
        "  pipelines: 2",
        "  repetitions: 2",
        "importance:",
        "  permutations: 3",
    ]
    for key, value in tweaks.items():
        lines.append(f"{key}: {value}")
    config_path = tmp_path / "experiment.yaml"
    config_path.write_text("\n".join(lines) + "\n")
    return str(config_path), str(data_path)


def stage_args(config, out, *rest, jobs="2"):
    return ["--config", config, "--out", out, "--jobs", jobs, *rest]


def err_text(result):
    return (result.stderr or "") + result.output


# ---------------------------------------------------------------------------
# cheap commands


def test_version_and_help(runner):
    assert runner.invoke(main, ["--version"]).exit_code == 0
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for command in (
        "describe", "fixture", "resample-bench", "model-select", "feature-select",
        "compare", "importance", "ablation", "train", "run", "predict", "serve",
    ):
        assert command in result.output


def test_describe_prints_config_and_counts(runner, tmp_path, signal):
    config, _ = write_experiment(tmp_path, signal)
    result = runner.invoke(main, ["--config", config, "describe"])
    assert result.exit_code == 0
    assert "Resolved configuration:" in result.output
    assert "config hash:" in result.output
    assert "400" in result.output


def test_describe_defaults_note_the_fixture_fallback(runner):
    result = runner.invoke(main, ["describe"])
    assert result.exit_code == 0
    assert "degotalls-like fixture" in result.output


def test_fixture_command_writes_a_dataset(runner, tmp_path):
    out = str(tmp_path / "fx")
    result = runner.invoke(main, ["--out", out, "fixture", "degotalls-like"])
    assert result.exit_code == 0
    assert "6004 rows, 37 features, 65 positives / 5939 negatives" in result.output
    assert os.path.exists(os.path.join(out, "degotalls-like.csv"))


def test_seed_and_positive_class_flags_reach_the_config(runner, tmp_path, signal):
    config, _ = write_experiment(tmp_path, signal)
    result = runner.invoke(
        main,
        ["--config", config, "--seed", "9", "--positive-class", "Unknow", "describe"],
    )
    assert result.exit_code == 0
    assert "seed: 9" in result.output
    assert "Unknow" in result.output
    # flipping the positive class flips the counts
    assert "300" in result.output


# ---------------------------------------------------------------------------
# exit codes


def test_missing_config_file_is_a_config_error(runner):
    result = runner.invoke(main, ["--config", "/nope/absent.yaml", "describe"])
    assert result.exit_code == 2
    assert "error:" in err_text(result)


def test_bad_config_key_is_a_config_error(runner, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("cv:\n  fodls: 3\n")
    result = runner.invoke(main, ["--config", str(bad), "describe"])
    assert result.exit_code == 2
    assert "fodls" in err_text(result)


def test_unreadable_dataset_is_a_data_error(runner, tmp_path):
    data = tmp_path / "broken.csv"
    data.write_text("a,b,label\n1.0,oops,Candidate\n2.0,3.0,Unknow\n")
    config = tmp_path / "cfg.yaml"
    config.write_text(f"dataset:\n  path: {data}\n")
    result = runner.invoke(main, ["--config", str(config), "describe"])
    assert result.exit_code == 3
    assert "error:" in err_text(result)


def test_running_stages_out_of_order_is_a_runtime_failure(runner, tmp_path, signal):
    config, _ = write_experiment(tmp_path, signal)
    result = runner.invoke(main, stage_args(config, str(tmp_path / "out"), "model-select"))
    assert result.exit_code == 4
    assert "run the resample-bench stage first" in err_text(result)


def test_stale_artifacts_are_refused(runner, tmp_path, signal):
    config, _ = write_experiment(tmp_path, signal)
    out = str(tmp_path / "out")
    assert runner.invoke(main, stage_args(config, out, "resample-bench")).exit_code == 0
    # the --seed override changes the config hash, so the artifact is stale
    result = runner.invoke(
        main, ["--config", config, "--seed", "99", "--out", out, "model-select"]
    )
    assert result.exit_code == 4
    assert "re-run" in err_text(result)


def test_jobs_must_be_positive(runner):
    result = runner.invoke(main, ["--jobs", "0", "describe"])
    assert result.exit_code == 2


# ---------------------------------------------------------------------------
# the full chain on a small dataset


@pytest.fixture(scope="module")
def chain(request, tmp_path_factory):
    signal = request.getfixturevalue("signal")
    tmp_path = tmp_path_factory.mktemp("chain")
    config, data_path = write_experiment(tmp_path, signal)
    out = str(tmp_path / "out")
    runner = CliRunner()
    results = {}
    for command in (
        "resample-bench", "model-select", "feature-select",
        "compare", "importance", "ablation", "train",
    ):
        results[command] = runner.invoke(main, stage_args(config, out, command))
    return tmp_path, config, data_path, out, results


def test_every_stage_succeeds_in_order(chain):
    _, _, _, _, results = chain
    for command, result in results.items():
        assert result.exit_code == 0, (command, err_text(result))


def test_stage_outputs_land_in_the_out_directory(chain):
    _, _, _, out, _ = chain
    for stage in ("resample_bench", "model_select", "feature_select", "compare", "importance", "ablation"):
        for ext in (".json", ".csv", ".txt"):
            assert os.path.exists(os.path.join(out, stage + ext)), stage + ext
    assert os.path.exists(os.path.join(out, "cd_diagram.svg"))
    assert os.path.exists(os.path.join(out, "importance.svg"))
    assert os.path.exists(os.path.join(out, "model_bundle.json"))
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert set(manifest["stages"]) >= {"resample_bench", "model_select", "feature_select", "compare"}


def test_compare_output_names_a_winner(chain):
    _, _, _, out, results = chain
    assert "Winner:" in results["compare"].output
    payload = json.load(open(os.path.join(out, "compare.json")))["payload"]
    assert payload["winner"] in payload["names"]


def test_predict_writes_full_precision_scores(chain):
    tmp_path, config, data_path, out, _ = chain
    runner = CliRunner()
    predictions = str(tmp_path / "predictions.csv")
    result = runner.invoke(
        main,
        stage_args(config, out, "predict", data_path, "-o", predictions),
    )
    assert result.exit_code == 0, err_text(result)
    lines = open(predictions).read().splitlines()
    assert lines[0] == "label,score"
    assert len(lines) == 401
    scores = [line.split(",")[1] for line in lines[1:]]
    # full repr precision, parseable and in range
    assert all(0.0 <= float(s) <= 1.0 for s in scores)
    stdout = runner.invoke(main, stage_args(config, out, "predict", data_path))
    assert stdout.exit_code == 0
    assert stdout.output.splitlines()[: len(lines)] == lines


def test_predict_requires_the_bundle_features(chain, tmp_path):
    _, config, _, out, _ = chain
    sparse = tmp_path / "sparse.csv"
    sparse.write_text("f0,f1\n1.0,2.0\n")
    runner = CliRunner()
    result = runner.invoke(main, stage_args(config, out, "predict", str(sparse)))
    assert result.exit_code == 3
    assert "lacks bundle features" in err_text(result)


def test_train_rejects_an_unknown_pipeline_id(chain):
    _, config, _, out, _ = chain
    runner = CliRunner()
    result = runner.invoke(
        main, stage_args(config, out, "train", "--pipeline", "NOPE-1")
    )
    assert result.exit_code == 4
    assert "not in the comparison" in err_text(result)


def test_run_reproduces_the_stagewise_outputs(chain):
    tmp_path, config, _, out, _ = chain
    out2 = str(tmp_path / "out2")
    runner = CliRunner()
    result = runner.invoke(main, stage_args(config, out2, "run"))
    assert result.exit_code == 0, err_text(result)
    for name in ("resample_bench.csv", "model_select.csv", "feature_select.csv", "compare.csv", "cd_diagram.svg"):
        a = open(os.path.join(out, name)).read()
        b = open(os.path.join(out2, name)).read()
        assert a == b, f"{name} differs between stagewise and chained runs"
    assert os.path.exists(os.path.join(out2, "model_bundle.json"))
