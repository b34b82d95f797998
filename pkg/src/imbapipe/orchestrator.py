"""Stage runners behind the CLI: benchmark, select, compare, explain, ablate.

Each stage reads the dataset and the artifacts of earlier stages, computes
its piece of the protocol, and emits a JSON artifact plus human-facing
reports (CSV, aligned text, SVG where a diagram exists).  Artifacts are
stamped with the config hash; a later stage refuses to run against
intermediates produced under a different configuration.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .classifiers import FAMILIES, ModelSpec, UNSUPPORTED_GRID_VALUES
from .config import ExperimentConfig
from .dataset import Dataset, encode_labels, fit_normalizer, load_csv, normalize_matrix
from .evaluation import (
    CvCache,
    PipelineSpec,
    PipelineScore,
    _pick_best,
    _score_fold,
    cross_validate,
    feature_grid_search,
    grid_search,
    stratified_kfold,
)
from .importance import permutation_importance
from .reports import cd_diagram_svg, csv_text, fmt, importance_svg, text_table
from .resampling import KIND_DISPLAY, ResamplerSpec
from .statcompare import compare_pipelines
from .utils import parallel_map


class OrchestrationError(Exception):
    pass


class StaleArtifact(OrchestrationError):
    pass


ABLATION_ROWS = ("Baseline", "+Resampling", "+Model Parameterization", "+Feature Selection")


# ---------------------------------------------------------------------------
# Artifact plumbing


def artifact_path(out_dir: str, stage: str) -> str:
    return os.path.join(out_dir, f"{stage}.json")


def write_artifact(out_dir: str, stage: str, config: ExperimentConfig, payload: dict) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = artifact_path(out_dir, stage)
    doc = {"stage": stage, "config_hash": config.config_hash(), "payload": payload}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _update_manifest(out_dir, stage, config)
    return path


def read_artifact(out_dir: str, stage: str, config: ExperimentConfig) -> dict:
    path = artifact_path(out_dir, stage)
    if not os.path.exists(path):
        raise OrchestrationError(
            f"missing artifact {path}; run the {stage.replace('_', '-')} stage first"
        )
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("config_hash") != config.config_hash():
        raise StaleArtifact(
            f"{path} was produced under config hash {doc.get('config_hash')}, "
            f"current is {config.config_hash()}; re-run that stage"
        )
    return doc["payload"]


def _update_manifest(out_dir: str, stage: str, config: ExperimentConfig) -> None:
    path = os.path.join(out_dir, "manifest.json")
    manifest = {"config_hash": config.config_hash(), "stages": {}}
    if os.path.exists(path):
        with open(path) as fh:
            old = json.load(fh)
        if old.get("config_hash") == config.config_hash():
            manifest = old
    manifest["stages"][stage] = {"artifact": f"{stage}.json"}
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report(out_dir: str, name: str, content: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(content)
    return path


# ---------------------------------------------------------------------------
# Dataset preparation


@dataclass(frozen=True)
class PreparedData:
    dataset: Dataset
    matrix: np.ndarray
    per_fold_normalize: bool

    @property
    def target(self) -> np.ndarray:
        return self.dataset.target


def prepare(config: ExperimentConfig, dataset: Dataset | None = None) -> PreparedData:
    """Load, encode, and (in global mode) normalize the experiment dataset.

    With no dataset.path configured the seeded degotalls-like fixture
    stands in, so a default config exercises the whole stage sequence
    without any external data.
    """
    if dataset is None:
        if config.dataset_path:
            dataset = load_csv(config.dataset_path, label_column=config.label_column)
        else:
            from .fixtures import make_degotalls_like

            dataset = make_degotalls_like(seed=config.seed)
    if dataset.target is None:
        dataset = encode_labels(dataset, config.positive_classes)
    if config.per_fold_normalize:
        return PreparedData(dataset, dataset.features, True)
    norm = fit_normalizer(dataset)
    return PreparedData(dataset, normalize_matrix(dataset.features, norm.mean, norm.std), False)


def _fresh_cache(config: ExperimentConfig, data: PreparedData) -> CvCache:
    splits = stratified_kfold(data.target, config.folds, config.seed)
    return CvCache(data.matrix, data.target, splits, config.seed, data.per_fold_normalize)


# ---------------------------------------------------------------------------
# Stage: resampler benchmark


def run_resampler_benchmark(config: ExperimentConfig, data: PreparedData, jobs: int = 1) -> dict:
    """Cross-validate every (resampler, default model family) pair.

    The table ranks resamplers by their score averaged over all families;
    the best ``resamplers.top`` feed the model-selection stage.
    """
    roster = [ResamplerSpec("none")] + [r for r in config.roster if r.kind != "none"]
    cache = _fresh_cache(config, data)
    folds = len(cache.splits)
    cache.warm([(f, r, None) for r in roster for f in range(folds)], jobs=jobs)

    pairs = [
        PipelineSpec(r, ModelSpec(family)) for r in roster for family in config.families
    ]
    units = [(pi, f) for pi in range(len(pairs)) for f in range(folds)]
    results = parallel_map(lambda u: _score_fold(pairs[u[0]], cache, u[1]), units, jobs)
    scores = [
        PipelineScore(pairs[pi], tuple(results[pi * folds + f] for f in range(folds)))
        for pi in range(len(pairs))
    ]

    n_fam = len(config.families)
    rows = []
    for ri, spec in enumerate(roster):
        family_scores = scores[ri * n_fam : (ri + 1) * n_fam]
        rows.append(
            {
                "kind": spec.kind,
                "display": KIND_DISPLAY[spec.kind],
                "mean": float(np.mean([s.mean for s in family_scores])),
                "error_pct": float(np.mean([s.error_pct for s in family_scores])),
            }
        )
    order = sorted(
        range(len(rows)), key=lambda i: (-rows[i]["mean"], rows[i]["error_pct"], i)
    )
    top = [rows[i]["kind"] for i in order[: config.top_resamplers]]
    for i, row in enumerate(rows):
        row["selected"] = row["kind"] in top
    return {
        "rows": [rows[i] for i in order],
        "top": top,
        "per_pair": [
            {
                "resampler": p.resampler.kind,
                "family": p.model.family,
                "mean": s.mean,
                "error_pct": s.error_pct,
            }
            for p, s in zip(pairs, scores)
        ],
    }


def render_resampler_benchmark(payload: dict) -> tuple[str, str]:
    headers = ("Resampler", "Acc_b", "Error %", "Selected")
    rows = [
        (r["display"], r["mean"], r["error_pct"], "*" if r["selected"] else "")
        for r in payload["rows"]
    ]
    return csv_text(headers, rows), text_table(headers, rows)


# ---------------------------------------------------------------------------
# Stage: model selection


def run_model_selection(
    config: ExperimentConfig, data: PreparedData, top_kinds: list[str], jobs: int = 1
) -> dict:
    """Grid-search every family over each of the selected resamplers."""
    cache = _fresh_cache(config, data)
    rows = []
    for kind in top_kinds:
        resampler = ResamplerSpec(kind)
        for family in config.families:
            result = grid_search(
                family,
                resampler,
                data.matrix,
                data.target,
                seed=config.seed,
                jobs=jobs,
                grid=config.grid_for(family),
                cache=cache,
            )
            best = result.best
            rows.append(
                {
                    "family": family,
                    "resampler": kind,
                    "pipeline_id": best.pipeline.identifier(),
                    "params": dict(best.pipeline.model.params),
                    "mean": best.mean,
                    "error_pct": best.error_pct,
                    "grid_size": len(result.scores),
                }
            )
    rows.sort(key=lambda r: (-r["mean"], r["error_pct"], r["pipeline_id"]))
    skipped = [
        {"family": family, "param": param, "values": values}
        for family, params in UNSUPPORTED_GRID_VALUES.items()
        for param, values in params.items()
        if family in config.families
    ]
    return {"rows": rows, "skipped": skipped}


def render_model_selection(payload: dict) -> tuple[str, str]:
    headers = ("Pipeline", "Acc_b", "Error %", "Parameters")
    rows = [
        (
            r["pipeline_id"],
            r["mean"],
            r["error_pct"],
            json.dumps(r["params"], sort_keys=True),
        )
        for r in payload["rows"]
    ]
    csv_out = csv_text(headers, rows)
    txt = text_table(headers, rows)
    if payload["skipped"]:
        notes = [
            f'note: {s["family"]} {s["param"]} in {s["values"]} is unsupported; '
            "those grid points were skipped"
            for s in payload["skipped"]
        ]
        txt += "\n" + "\n".join(notes) + "\n"
    return csv_out, txt


# ---------------------------------------------------------------------------
# Stage: feature selection


def run_feature_selection(
    config: ExperimentConfig, data: PreparedData, model_rows: list[dict], jobs: int = 1
) -> dict:
    """Sweep the MI-selected feature count for the leading pipelines."""
    keep = model_rows[: config.compare["pipelines"]]
    cache = _fresh_cache(config, data)
    d = data.matrix.shape[1]
    rows = []
    for row in keep:
        resampler = ResamplerSpec(row["resampler"])
        model = ModelSpec(row["family"], row["params"])
        result = feature_grid_search(
            resampler,
            model,
            data.matrix,
            data.target,
            k_min=min(config.k_min, d),
            seed=config.seed,
            jobs=jobs,
            cache=cache,
        )
        best = result.best
        rows.append(
            {
                "pipeline": best.pipeline.to_dict(),
                "pipeline_id": best.pipeline.identifier(),
                "mean": best.mean,
                "error_pct": best.error_pct,
                "k": result.best_k,
            }
        )
    rows.sort(key=lambda r: (-r["mean"], r["error_pct"], r["pipeline_id"]))
    return {"rows": rows}


def render_feature_selection(payload: dict) -> tuple[str, str]:
    headers = ("Pipeline", "Acc_b", "Error %", "Features")
    rows = [(r["pipeline_id"], r["mean"], r["error_pct"], r["k"]) for r in payload["rows"]]
    return csv_text(headers, rows), text_table(headers, rows)


# ---------------------------------------------------------------------------
# Stage: pipeline comparison


def run_pipeline_comparison(
    config: ExperimentConfig, data: PreparedData, fs_rows: list[dict], jobs: int = 1
) -> dict:
    pipelines = [PipelineSpec.from_dict(r["pipeline"]) for r in fs_rows]
    cmp_cfg = config.compare
    result = compare_pipelines(
        pipelines,
        data.matrix,
        data.target,
        folds=config.folds,
        repetitions=cmp_cfg["repetitions"],
        seed=config.seed,
        jobs=jobs,
        alpha=cmp_cfg["alpha"],
        formula=cmp_cfg["cd_formula"],
        basis=cmp_cfg["basis"],
    )
    payload = result.to_dict()
    payload["winner_index"] = result.winner_index
    payload["diagram"] = result.diagram_data()
    return payload


def render_comparison(payload: dict) -> tuple[str, str, str]:
    headers = ("Pipeline", "Average rank", "Mean Acc_b")
    means = np.asarray(payload["score_matrix"], dtype=np.float64).mean(axis=0)
    ranks = payload["friedman"]["average_ranks"]
    order = sorted(range(len(ranks)), key=lambda i: (ranks[i], i))
    rows = [(payload["names"][i], ranks[i], float(means[i])) for i in order]
    csv_out = csv_text(headers, rows)
    lines = [text_table(headers, rows)]
    fr = payload["friedman"]
    lines.append(
        f"Friedman chi-square = {fmt(fr['statistic'])} over {fr['blocks']} blocks, "
        f"p = {fr['p_value']:.4g}"
    )
    lines.append(
        f"Critical distance = {fmt(payload['cd'], 3)} "
        f"({payload['formula']} formula, alpha = {payload['alpha']})"
    )
    lines.append(f"Winner: {payload['winner']}")
    subtitle = (
        f"Nemenyi critical distance ({payload['formula']} formula, "
        f"alpha = {payload['alpha']}, {fr['blocks']} blocks)"
    )
    svg = cd_diagram_svg(payload["diagram"], subtitle)
    return csv_out, "\n".join(lines) + "\n", svg


# ---------------------------------------------------------------------------
# Stage: importance


def run_importance(
    config: ExperimentConfig,
    data: PreparedData,
    pipeline: PipelineSpec,
    jobs: int = 1,
) -> dict:
    result = permutation_importance(
        pipeline,
        data.matrix,
        data.target,
        feature_names=data.dataset.feature_names,
        folds=config.folds,
        seed=config.seed,
        permutations=config.importance_permutations,
        jobs=jobs,
        cache=_fresh_cache(config, data),
    )
    return result.to_dict()


def render_importance(payload: dict) -> tuple[str, str, str]:
    feats = payload["features"]
    order = sorted(range(len(feats)), key=lambda i: (-feats[i]["percent"], i))
    headers = ("Feature", "Importance %", "Group")
    rows = [(feats[i]["name"], feats[i]["percent"], feats[i]["group"]) for i in order]
    bar_rows = [
        (feats[i]["name"], feats[i]["drop"], feats[i]["percent"], feats[i]["group"])
        for i in order
    ]
    subtitle = f'Permutation importance of {payload["pipeline"]["model"]["family"]} pipeline'
    return (
        csv_text(headers, rows),
        text_table(headers, rows),
        importance_svg(bar_rows, subtitle),
    )


# ---------------------------------------------------------------------------
# Stage: ablation


def _base_spec(config: ExperimentConfig, family: str) -> ModelSpec:
    """Default parameters for the ablation's first rows.

    With a grid override the family default may not be a grid member, in
    which case the override's first entry stands in, keeping the later
    grid-search row a superset of this one.
    """
    grid = config.grid_for(family)
    default = ModelSpec(family)
    if any(spec.key() == default.key() for spec in grid):
        return default
    return grid[0]


def run_ablation(config: ExperimentConfig, data: PreparedData, jobs: int = 1) -> dict:
    """Add the pipeline stages one at a time and score each cumulative step.

    Per family the winning choice of each row carries into the next, and
    every row's candidate set contains the previous row's winner, so each
    family's score (and hence the mean and best columns) never decreases.
    """
    families = config.ablation_families
    roster = [r for r in config.ablation_roster if r.kind != "none"]
    cache = _fresh_cache(config, data)
    folds = len(cache.splits)
    d = data.matrix.shape[1]
    none = ResamplerSpec("none")

    def cv(pipeline: PipelineSpec) -> PipelineScore:
        scores = parallel_map(
            lambda f: _score_fold(pipeline, cache, f), list(range(folds)), jobs
        )
        return PipelineScore(pipeline, tuple(scores))

    choices: dict[str, dict] = {family: {} for family in families}
    per_family: dict[str, list[PipelineScore]] = {}

    # Row 1: defaults, no resampling, all features
    baseline = {f: cv(PipelineSpec(none, _base_spec(config, f))) for f in families}

    # Row 2: add resampling (keeping "none" in the running)
    cache.warm([(f, r, None) for r in roster for f in range(folds)], jobs=jobs)
    resampled = {}
    for family in families:
        candidates = [baseline[family]] + [
            cv(PipelineSpec(r, _base_spec(config, family))) for r in roster
        ]
        best = candidates[_pick_best(candidates)]
        resampled[family] = best
        choices[family]["resampler"] = best.pipeline.resampler.kind

    # Row 3: add the hyperparameter grid over each family's chosen resampler
    tuned = {}
    for family in families:
        resampler = resampled[family].pipeline.resampler
        result = grid_search(
            family,
            resampler,
            data.matrix,
            data.target,
            seed=config.seed,
            jobs=jobs,
            grid=config.grid_for(family),
            cache=cache,
        )
        tuned[family] = result.best
        choices[family]["params"] = dict(result.best.pipeline.model.params)

    # Row 4: add the feature-count sweep (k = d reproduces "all features")
    selected = {}
    for family in families:
        spec = tuned[family].pipeline
        result = feature_grid_search(
            spec.resampler,
            spec.model,
            data.matrix,
            data.target,
            k_min=min(config.k_min, d),
            seed=config.seed,
            jobs=jobs,
            cache=cache,
        )
        selected[family] = result.best
        choices[family]["features"] = result.best_k

    rows = []
    for name, stage_scores in zip(
        ABLATION_ROWS, (baseline, resampled, tuned, selected)
    ):
        means = [stage_scores[f].mean for f in families]
        errors = [stage_scores[f].error_pct for f in families]
        rows.append(
            {
                "stage": name,
                "mean": float(np.mean(means)),
                "error_pct": float(np.mean(errors)),
                "best": float(np.max(means)),
            }
        )
    return {"rows": rows, "choices": choices, "families": list(families)}


def render_ablation(payload: dict) -> tuple[str, str]:
    headers = ("Stage", "Mean Acc_b", "Error %", "Best Acc_b")
    rows = [(r["stage"], r["mean"], r["error_pct"], r["best"]) for r in payload["rows"]]
    return csv_text(headers, rows), text_table(headers, rows)


# ---------------------------------------------------------------------------
# Stage: describe


def describe(config: ExperimentConfig, dataset: Dataset | None = None) -> str:
    lines = ["Resolved configuration:", ""]
    lines.append(config.to_yaml().rstrip())
    lines.append(f"\nconfig hash: {config.config_hash()}")
    if not config.dataset_path:
        lines.append("dataset: seeded degotalls-like fixture (no dataset.path configured)")
    if dataset is None:
        dataset = prepare(config).dataset
    elif dataset.target is None:
        dataset = encode_labels(dataset, config.positive_classes)
    neg, pos = dataset.class_counts()
    lines.append("")
    lines.append(
        text_table(
            ("Rows", "Features", "Positives", "Negatives"),
            [(dataset.n_rows, dataset.n_features, pos, neg)],
        ).rstrip()
    )
    return "\n".join(lines) + "\n"
