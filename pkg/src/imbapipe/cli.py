"""Command-line entry point.

Stage commands mirror the experiment sequence: resample-bench feeds
model-select feeds feature-select feeds compare; importance and train
consume the comparison winner; ablation stands alone.  `run` chains the
whole sequence.  Every stage writes its JSON artifact plus CSV/text (and
SVG where there is a diagram) into the --out directory.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
failure.
"""

from __future__ import annotations

import csv
import os
import sys

import click

from . import __version__
from .bundle import BundleError, BundleInputError, load_bundle, save_bundle, train_final
from .config import ConfigError, resolve_config
from .dataset import DataError, encode_labels, write_csv
from .evaluation import PipelineSpec
from .fixtures import FIXTURES
from . import orchestrator as orch


class _Invocation:
    """Global flags, resolved lazily so --help never touches the config."""

    def __init__(self, config_path, seed, out_dir, jobs, label_column, positive_classes):
        self.config_path = config_path
        self.out_dir = out_dir
        self.jobs = jobs
        overrides: dict = {}
        dataset: dict = {}
        if label_column is not None:
            dataset["label_column"] = label_column
        if positive_classes:
            dataset["positive_classes"] = list(positive_classes)
        if dataset:
            overrides["dataset"] = dataset
        if seed is not None:
            overrides["seed"] = seed
        self.overrides = overrides
        self._config = None
        self._data = None

    @property
    def config(self):
        if self._config is None:
            self._config = resolve_config(self.config_path, self.overrides)
        return self._config

    @property
    def data(self):
        if self._data is None:
            self._data = orch.prepare(self.config)
        return self._data


def _fail(code: int, exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _guarded(fn):
    try:
        fn()
    except ConfigError as exc:
        _fail(2, exc)
    except (DataError, BundleInputError) as exc:
        _fail(3, exc)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _fail(4, exc)


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", default=None, metavar="PATH",
              help="YAML config file; 'default' (or omitted) uses built-in defaults.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--out", "out_dir", default="runs", show_default=True, metavar="DIR",
              help="Directory for artifacts and reports.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker threads for independent cross-validation units.")
@click.option("--label-column", default=None, metavar="NAME",
              help="Override dataset.label_column.")
@click.option("--positive-class", "positive_classes", multiple=True, metavar="NAME",
              help="Override dataset.positive_classes (repeatable).")
@click.pass_context
def main(ctx, config_path, seed, out_dir, jobs, label_column, positive_classes):
    """Imbalanced-classification pipeline experiments and detection service."""
    if jobs < 1:
        raise click.BadParameter("--jobs must be >= 1")
    ctx.obj = _Invocation(config_path, seed, out_dir, jobs, label_column, positive_classes)


@main.command()
@click.pass_obj
def describe(inv):
    """Print the resolved configuration and dataset summary."""
    _guarded(lambda: click.echo(orch.describe(inv.config), nl=False))


@main.command()
@click.argument("name", type=click.Choice(sorted(FIXTURES)))
@click.option("--path", default=None, metavar="FILE",
              help="Output CSV path (default <out>/<name>.csv).")
@click.pass_obj
def fixture(inv, name, path):
    """Write a seeded synthetic dataset shaped like the study inventories."""

    def go():
        dataset = FIXTURES[name](seed=inv.config.seed)
        target = path or os.path.join(inv.out_dir, f"{name}.csv")
        os.makedirs(os.path.dirname(target) or ".", exist_ok=True)
        write_csv(dataset, target)
        neg, pos = encode_labels(dataset, inv.config.positive_classes).class_counts()
        click.echo(
            f"wrote {target}: {dataset.n_rows} rows, "
            f"{dataset.n_features} features, {pos} positives / {neg} negatives"
        )

    _guarded(go)


def _emit(inv, stage: str, payload: dict, rendered) -> None:
    orch.write_artifact(inv.out_dir, stage, inv.config, payload)
    names = (f"{stage}.csv", f"{stage}.txt", f"{stage}.svg")
    for name, content in zip(names, rendered):
        orch.write_report(inv.out_dir, name, content)
    click.echo(rendered[1], nl=False)


def _resample_bench(inv) -> dict:
    payload = orch.run_resampler_benchmark(inv.config, inv.data, jobs=inv.jobs)
    _emit(inv, "resample_bench", payload, orch.render_resampler_benchmark(payload))
    return payload


def _model_select(inv, top) -> dict:
    payload = orch.run_model_selection(inv.config, inv.data, top, jobs=inv.jobs)
    _emit(inv, "model_select", payload, orch.render_model_selection(payload))
    return payload


def _feature_select(inv, model_rows) -> dict:
    payload = orch.run_feature_selection(inv.config, inv.data, model_rows, jobs=inv.jobs)
    _emit(inv, "feature_select", payload, orch.render_feature_selection(payload))
    return payload


def _compare(inv, fs_rows) -> dict:
    payload = orch.run_pipeline_comparison(inv.config, inv.data, fs_rows, jobs=inv.jobs)
    csv_out, txt, svg = orch.render_comparison(payload)
    orch.write_artifact(inv.out_dir, "compare", inv.config, payload)
    orch.write_report(inv.out_dir, "compare.csv", csv_out)
    orch.write_report(inv.out_dir, "compare.txt", txt)
    orch.write_report(inv.out_dir, "cd_diagram.svg", svg)
    click.echo(txt, nl=False)
    return payload


def _pipeline_from_compare(inv, pipeline_id: str | None) -> PipelineSpec:
    payload = orch.read_artifact(inv.out_dir, "compare", inv.config)
    if pipeline_id is None:
        return PipelineSpec.from_dict(payload["pipelines"][payload["winner_index"]])
    for name, doc in zip(payload["names"], payload["pipelines"]):
        if name == pipeline_id:
            return PipelineSpec.from_dict(doc)
    raise orch.OrchestrationError(
        f"pipeline {pipeline_id!r} is not in the comparison (have: {payload['names']})"
    )


def _importance(inv, pipeline: PipelineSpec) -> dict:
    payload = orch.run_importance(inv.config, inv.data, pipeline, jobs=inv.jobs)
    csv_out, txt, svg = orch.render_importance(payload)
    orch.write_artifact(inv.out_dir, "importance", inv.config, payload)
    orch.write_report(inv.out_dir, "importance.csv", csv_out)
    orch.write_report(inv.out_dir, "importance.txt", txt)
    orch.write_report(inv.out_dir, "importance.svg", svg)
    click.echo(txt, nl=False)
    return payload


def _ablation(inv) -> dict:
    payload = orch.run_ablation(inv.config, inv.data, jobs=inv.jobs)
    _emit(inv, "ablation", payload, orch.render_ablation(payload))
    return payload


def _train(inv, pipeline: PipelineSpec, bundle_path: str | None) -> str:
    bundle = train_final(inv.data.dataset, pipeline, inv.config.seed)
    target = bundle_path or os.path.join(inv.out_dir, "model_bundle.json")
    os.makedirs(os.path.dirname(target) or ".", exist_ok=True)
    save_bundle(bundle, target)
    click.echo(f"wrote {target} ({bundle.pipeline_id})")
    return target


@main.command("resample-bench")
@click.pass_obj
def resample_bench(inv):
    """Benchmark the resampler roster against every default-parameter family."""
    _guarded(lambda: _resample_bench(inv))


@main.command("model-select")
@click.pass_obj
def model_select(inv):
    """Grid-search each family over the benchmark's selected resamplers."""

    def go():
        bench = orch.read_artifact(inv.out_dir, "resample_bench", inv.config)
        _model_select(inv, bench["top"])

    _guarded(go)


@main.command("feature-select")
@click.pass_obj
def feature_select(inv):
    """Sweep the selected-feature count for the leading pipelines."""

    def go():
        ms = orch.read_artifact(inv.out_dir, "model_select", inv.config)
        _feature_select(inv, ms["rows"])

    _guarded(go)


@main.command()
@click.pass_obj
def compare(inv):
    """Rank the finalized pipelines over repeated cross-validation."""

    def go():
        fs = orch.read_artifact(inv.out_dir, "feature_select", inv.config)
        _compare(inv, fs["rows"])

    _guarded(go)


@main.command()
@click.option("--pipeline", "pipeline_id", default=None, metavar="ID",
              help="Pipeline identifier from the comparison (default: the winner).")
@click.pass_obj
def importance(inv, pipeline_id):
    """Permutation importance of the comparison winner's features."""
    _guarded(lambda: _importance(inv, _pipeline_from_compare(inv, pipeline_id)))


@main.command()
@click.pass_obj
def ablation(inv):
    """Score the pipeline stages cumulatively: baseline through feature selection."""
    _guarded(lambda: _ablation(inv))


@main.command()
@click.option("--pipeline", "pipeline_id", default=None, metavar="ID",
              help="Pipeline identifier from the comparison (default: the winner).")
@click.option("--bundle", "bundle_path", default=None, metavar="FILE",
              help="Bundle output path (default <out>/model_bundle.json).")
@click.pass_obj
def train(inv, pipeline_id, bundle_path):
    """Fit the winning pipeline on the full dataset and write the bundle."""
    _guarded(lambda: _train(inv, _pipeline_from_compare(inv, pipeline_id), bundle_path))


@main.command()
@click.pass_obj
def run(inv):
    """Run the whole stage sequence and train the final bundle."""

    def go():
        bench = _resample_bench(inv)
        click.echo("")
        ms = _model_select(inv, bench["top"])
        click.echo("")
        fs = _feature_select(inv, ms["rows"])
        click.echo("")
        cp = _compare(inv, fs["rows"])
        click.echo("")
        winner = PipelineSpec.from_dict(cp["pipelines"][cp["winner_index"]])
        _importance(inv, winner)
        click.echo("")
        _ablation(inv)
        click.echo("")
        _train(inv, winner, None)

    _guarded(go)


@main.command()
@click.argument("rows_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--bundle", "bundle_path", default=None, metavar="FILE",
              help="Bundle to predict with (default <out>/model_bundle.json).")
@click.option("--output", "-o", "output_path", default=None, metavar="FILE",
              help="Write predictions here instead of stdout.")
@click.pass_obj
def predict(inv, rows_csv, bundle_path, output_path):
    """Predict every row of a CSV with a trained bundle.

    The CSV must carry the bundle's feature names in its header; other
    columns are ignored.  Scores print at full precision so they compare
    bit-for-bit with service responses.
    """

    def go():
        bundle = load_bundle(bundle_path or os.path.join(inv.out_dir, "model_bundle.json"))
        with open(rows_csv, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [n for n in bundle.feature_names if n not in header]
            if missing:
                raise DataError(f"{rows_csv} lacks bundle features: {missing}")
            rows = list(reader)
        out = sys.stdout if output_path is None else open(output_path, "w", newline="")
        try:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["label", "score"])
            for row in rows:
                label, score = bundle.predict_row(
                    {name: row[name] for name in bundle.feature_names}
                )
                writer.writerow([label, repr(score)])
        finally:
            if output_path is not None:
                out.close()
                click.echo(f"wrote {output_path} ({len(rows)} rows)")

    _guarded(go)


@main.command()
@click.option("--bundle", "bundle_path", required=True, metavar="FILE",
              help="Trained model bundle to serve.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--bind", default="127.0.0.1", show_default=True, metavar="ADDR")
@click.pass_obj
def serve(inv, bundle_path, port, bind):
    """Serve the detection API for a trained bundle."""

    def go():
        import uvicorn

        from .service import create_app

        app = create_app(load_bundle(bundle_path))
        uvicorn.run(app, host=bind, port=port, log_level="warning")

    _guarded(go)


if __name__ == "__main__":
    main()
