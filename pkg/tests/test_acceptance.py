"""Release acceptance checks.

One test per gating property, numbered in report order.  Every check derives
its expected values from an oracle implemented inside this module (exhaustive
search, closed-form fractions, finite differences, or a seeded Monte Carlo
draw) rather than from the code under test, and each prints a single
PASS/FAIL line with the measured margin.

Run with ``pytest tests/test_acceptance.py -v``.  The slowest check is the
ablation trend (a few minutes on the 6004-row fixture); everything else is
seconds.
"""

import csv
import itertools
import math
import socket
import subprocess
import time
from fractions import Fraction

import numpy as np
import pytest
from click.testing import CliRunner

from imbapipe import orchestrator as orch
from imbapipe.bundle import save_bundle, train_final
from imbapipe.classifiers import ModelSpec
from imbapipe.classifiers.mlp import ACTIVATIONS, init_params, loss_and_grads
from imbapipe.cli import main
from imbapipe.config import make_config
from imbapipe.dataset import Dataset, encode_labels, fit_normalizer, normalize_matrix, write_csv
from imbapipe.evaluation import PipelineSpec, balanced_accuracy_score, stratified_kfold
from imbapipe.fixtures import POSITIVE_LABEL, make_signal_fixture
from imbapipe.importance import permutation_importance
from imbapipe.resampling import ResamplerSpec, _smote, resample, tomek_links
from imbapipe.statcompare import Q_ALPHA, critical_difference, friedman_test
from imbapipe.utils import rng_for


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {number:02d} {title} ({detail})"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 01: balanced accuracy equals the per-class recall average, exactly


def test_01_balanced_accuracy_matches_exact_fractions():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        tn, fp, fn, tp = (int(v) for v in rng.integers(0, 400, size=4))
        tn += tn + fp == 0
        tp += fn + tp == 0
        y_true = np.repeat([0, 0, 1, 1], [tn, fp, fn, tp])
        y_pred = np.repeat([0, 1, 0, 1], [tn, fp, fn, tp])
        got = balanced_accuracy_score(y_true, y_pred)
        want = float((Fraction(tp, tp + fn) + Fraction(tn, tn + fp)) / 2)
        worst = max(worst, abs(got - want))
    elapsed = time.perf_counter() - start
    report(
        1, "balanced accuracy oracle",
        worst <= 1e-12 and elapsed < 5.0,
        f"10000 matrices, max abs err {worst:.2e}, {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 02: the normalizer centers and scales every non-constant feature


def test_02_normalizer_centers_and_unit_scales():
    rng = np.random.default_rng(202)
    worst_mean = 0.0
    worst_std = 0.0
    for i in range(100):
        n = int(rng.integers(2, 150))
        d = int(rng.integers(1, 30))
        X = rng.normal(0.0, 1.0, size=(n, d))
        X = X * rng.uniform(0.5, 20.0, size=d) + rng.uniform(-50.0, 50.0, size=d)
        if i % 3 == 0:
            X[:, int(rng.integers(0, d))] = float(rng.normal())
        ds = Dataset(features=X, feature_names=tuple(f"f{j}" for j in range(d)))
        params = fit_normalizer(ds)
        Z = normalize_matrix(ds.features, params.mean, params.std)
        # constant means value-constant; the float std of such a column can
        # land a few ulp above zero, and those columns are out of scope here
        live = ~np.all(ds.features == ds.features[0], axis=0)
        if live.any():
            worst_mean = max(worst_mean, float(np.abs(Z[:, live].mean(axis=0)).max()))
            worst_std = max(worst_std, float(np.abs(Z[:, live].std(axis=0) - 1.0).max()))
    report(
        2, "normalizer invariant",
        worst_mean < 1e-9 and worst_std <= 1e-9,
        f"100 matrices, max |mean| {worst_mean:.2e}, max |std-1| {worst_std:.2e}",
    )


# ---------------------------------------------------------------------------
# 03: Tomek links match an O(n^3) witness scan


def cubic_tomek(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Every cross-class pair with no third point strictly closer to either
    endpoint, found by scanning all n candidates per pair."""
    n = len(X)
    diffs = X[:, None, :] - X[None, :, :]
    d2 = (diffs * diffs).sum(axis=2).tolist()
    labels = y.tolist()
    links = []
    for i in range(n):
        di = d2[i]
        for j in range(i + 1, n):
            if labels[i] == labels[j]:
                continue
            dij = di[j]
            dj = d2[j]
            for k in range(n):
                if k != i and k != j and (di[k] < dij or dj[k] < dij):
                    break
            else:
                links.append((i, j))
    if not links:
        return np.empty((0, 2), dtype=np.int64)
    return np.array(sorted(links), dtype=np.int64)


def test_03_tomek_links_equal_cubic_brute_force():
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    checked = 0
    total_links = 0
    for case in range(50):
        d = int(rng.integers(2, 7))
        gap = float(rng.uniform(0.0, 3.0))
        n_pos = int(rng.integers(30, 170))
        X = rng.normal(0.0, 1.0, size=(200, d))
        X[:n_pos] += gap
        y = np.zeros(200, dtype=np.int64)
        y[:n_pos] = 1
        got = tomek_links(X, y)
        want = cubic_tomek(X, y)
        assert np.array_equal(got, want), f"case {case}: {got.tolist()} vs {want.tolist()}"
        checked += 1
        total_links += len(want)
    elapsed = time.perf_counter() - start
    report(
        3, "tomek link brute force",
        checked == 50 and elapsed < 30.0,
        f"50 datasets, {total_links} links, exact match, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 04: every resampler balances the classes; synthetics sit on minority segments


def uncovered_synthetics(synthetic: np.ndarray, minority: np.ndarray, tol: float = 1e-9) -> int:
    """Synthetic rows NOT on any segment between two minority originals."""
    remaining = np.arange(len(synthetic))
    m = len(minority)
    for a_i in range(m):
        a = minority[a_i]
        for b_i in range(a_i + 1, m):
            if remaining.size == 0:
                return 0
            v = minority[b_i] - a
            vv = float(v @ v)
            if vv == 0.0:
                continue
            T = synthetic[remaining]
            u = (T - a) @ v / vv
            resid = np.abs(T - a - u[:, None] * v).max(axis=1)
            on = (resid <= tol) & (u >= -tol) & (u <= 1.0 + tol)
            remaining = remaining[~on]
    return int(remaining.size)


def test_04_resamplers_balance_and_interpolate(degotalls):
    X, y = degotalls.features, degotalls.target
    minority = X[y == 1]
    seed = 0
    failures = []

    balanced = {}
    for kind in ("cluster_centroids", "cluster_representatives", "smote", "adasyn", "prowsyn"):
        rs = resample(ResamplerSpec(kind), X, y, seed)
        balanced[kind] = rs
        neg, pos = rs.class_counts()
        if neg != pos:
            failures.append(f"{kind}: {neg} vs {pos}")
    # the hybrids clean after balancing; check their pre-cleaning stage
    for kind in ("smote_tomek", "smote_ipf"):
        spec = ResamplerSpec(kind)
        rs = _smote(X, y, spec, rng_for(seed, "resample", spec.key()))
        balanced[kind] = rs
        neg, pos = rs.class_counts()
        if neg != pos:
            failures.append(f"{kind} pre-cleaning: {neg} vs {pos}")

    stray = 0
    for kind in ("smote", "adasyn", "prowsyn", "smote_tomek", "smote_ipf"):
        rs = balanced[kind]
        syn = rs.features[rs.synthetic]
        miss = uncovered_synthetics(syn, minority)
        stray += miss
        if miss:
            failures.append(f"{kind}: {miss} synthetics off-segment")

    report(
        4, "resampler balance and segments",
        not failures,
        failures[0] if failures else "7 kinds balanced, 0 off-segment synthetics",
    )


# ---------------------------------------------------------------------------
# 05: stratification splits 65 positives into 10 folds as 5x7 + 5x6


def test_05_stratified_fold_counts(degotalls):
    y = degotalls.target
    splits = stratified_kfold(y, 10, seed=0)
    counts = sorted(int(y[test].sum()) for _, test in splits)
    shape_ok = counts == [6] * 5 + [7] * 5

    partition_ok = True
    for seed in range(100):
        splits = stratified_kfold(y, 10, seed=seed)
        seen = np.sort(np.concatenate([test for _, test in splits]))
        if not np.array_equal(seen, np.arange(len(y))):
            partition_ok = False
            break
    report(
        5, "stratification",
        shape_ok and partition_ok,
        f"fold positives {counts}, partition held for 100 seeds",
    )


# ---------------------------------------------------------------------------
# 06: critical distance values and the studentized-range quantile


def test_06_critical_difference_values():
    cd_paper = critical_difference(2, 10, alpha=0.05, formula="paper")
    cd_demsar = critical_difference(2, 10, alpha=0.05, formula="demsar")
    q_table = Q_ALPHA[0.05][2]

    # Monte Carlo studentized range for two groups: the 95th percentile of
    # max-min over pairs of standard normals.
    rng = np.random.default_rng(606)
    pairs = rng.standard_normal(size=(2, 6_000_000))
    q_mc = float(np.quantile(np.abs(pairs[0] - pairs[1]), 0.95))

    ok = (
        abs(cd_paper - 0.3578) <= 1e-3
        and abs(cd_demsar - 0.6198) <= 1e-3
        and abs(q_table / math.sqrt(2.0) - 1.960) <= 1e-3
        and abs(q_mc - q_table) <= 4e-3
    )
    report(
        6, "critical distance",
        ok,
        f"CD paper {cd_paper:.4f}, demsar {cd_demsar:.4f}, "
        f"q table {q_table:.4f} vs MC {q_mc:.4f}",
    )


# ---------------------------------------------------------------------------
# 07: Friedman statistic on the unanimous table, with a Monte Carlo p-value


def test_07_friedman_unanimous_table():
    ranks = np.tile(np.array([1.0, 2.0, 3.0]), (4, 1))
    result = friedman_test(ranks)

    # under the null every within-block ordering is equally likely
    rng = np.random.default_rng(707)
    draws = rng.permuted(np.tile(np.array([1.0, 2.0, 3.0]), (20_000, 4, 1)), axis=2)
    avg = draws.mean(axis=1)
    stats = 12.0 * 4 / (3 * 4) * ((avg - 2.0) ** 2).sum(axis=1)
    p_mc = float(np.mean(stats >= result.statistic - 1e-9))

    ok = result.statistic == 8.0 and abs(result.p_value - p_mc) <= 0.03
    report(
        7, "friedman test",
        ok,
        f"statistic {result.statistic}, p {result.p_value:.4f} vs MC {p_mc:.4f}",
    )


# ---------------------------------------------------------------------------
# 08: analytic MLP gradients agree with central differences


def numeric_grads(params, X, y, activation, h=1e-6):
    out = {}
    for key, arr in params.items():
        grad = np.zeros_like(arr)
        flat, gflat = arr.ravel(), grad.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up, _ = loss_and_grads(params, X, y, activation)
            flat[idx] = orig - h
            down, _ = loss_and_grads(params, X, y, activation)
            flat[idx] = orig
            gflat[idx] = (up - down) / (2.0 * h)
        out[key] = grad
    return out


def test_08_mlp_gradient_check():
    worst = 0.0
    for case in range(20):
        rng = np.random.default_rng(800 + case)
        d = int(rng.integers(2, 6))
        hidden = int(rng.integers(2, 9))
        n = int(rng.integers(8, 24))
        activation = ACTIVATIONS[case % len(ACTIVATIONS)]
        params = init_params(d, hidden, rng)
        X = rng.normal(0.0, 1.0, size=(n, d))
        y = rng.integers(0, 2, size=n).astype(np.float64)
        _, analytic = loss_and_grads(params, X, y, activation)
        numeric = numeric_grads(params, X, y, activation)
        ga = np.concatenate([analytic[k].ravel() for k in sorted(params)])
        gn = np.concatenate([numeric[k].ravel() for k in sorted(params)])
        denom = max(float(np.linalg.norm(ga)), float(np.linalg.norm(gn)), 1e-12)
        worst = max(worst, float(np.linalg.norm(ga - gn)) / denom)
    report(
        8, "mlp gradient check",
        worst < 1e-4,
        f"20 networks, worst relative error {worst:.2e}",
    )


# ---------------------------------------------------------------------------
# 09: the ablation table improves monotonically and resampling pays


GBLINEAR_GRID = [
    {"booster": "gblinear", "learning_rate": lr, "estimators": e}
    for lr in (0.1, 0.01, 0.001, 0.0001)
    for e in (10, 50, 100)
]


def test_09_ablation_trend():
    config = make_config(
        {
            "cv": {"folds": 5},
            "models": {
                "families": ["KNN", "GNB", "DT", "GB"],
                "grids": {"GB": GBLINEAR_GRID},
            },
            "selection": {"k_min": 30},
            "ablation": {
                "families": ["KNN", "GNB", "DT", "GB"],
                "resamplers": ["smote", "adasyn", "cluster_centroids"],
            },
        }
    )
    data = orch.prepare(config)
    start = time.perf_counter()
    payload = orch.run_ablation(config, data, jobs=4)
    elapsed = time.perf_counter() - start

    rows = payload["rows"]
    bests = [r["best"] for r in rows]
    monotone = all(b2 >= b1 - 1e-12 for b1, b2 in zip(bests, bests[1:]))
    lift = rows[1]["mean"] - rows[0]["mean"]
    report(
        9, "ablation trend",
        monotone and lift >= 0.05 and elapsed < 600.0,
        f"bests {[f'{b:.3f}' for b in bests]}, resampling lift {lift:+.3f}, {elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 10: permutation importance recovers the generative features


def test_10_importance_recovers_generative_features():
    pipeline = PipelineSpec(ResamplerSpec("smote"), ModelSpec("GNB"))
    hits = 0
    for rep in range(100):
        ds = encode_labels(make_signal_fixture(seed=1000 + rep), [POSITIVE_LABEL])
        params = fit_normalizer(ds)
        X = normalize_matrix(ds.features, params.mean, params.std)
        result = permutation_importance(
            pipeline, X, ds.target,
            feature_names=ds.feature_names,
            folds=5, seed=rep, permutations=20,
        )
        top3 = {name for name, _, _, _ in result.ordered()[:3]}
        hits += top3 == {"f0", "f1", "f2"}
    report(
        10, "importance recovery",
        hits >= 95,
        f"generative trio in the top 3 for {hits}/100 repetitions",
    )


# ---------------------------------------------------------------------------
# 11: reruns are byte-identical at any --jobs setting


def write_cli_experiment(tmp_path):
    ds = make_signal_fixture(seed=5)
    data_path = tmp_path / "rows.csv"
    write_csv(ds, data_path)
    config_path = tmp_path / "experiment.yaml"
    config_path.write_text(
        "\n".join(
            [
                "dataset:",
                f"  path: {data_path}",
                "cv:",
                "  folds: 3",
                "resamplers:",
                "  roster: [smote, cluster_centroids]",
                "  top: 2",
                "models:",
                "  families: [GNB, KNN]",
                "  grids:",
                "    KNN:",
                "      - {k: 1}",
                "      - {k: 3}",
                "selection:",
                "  k_min: 18",
                "compare:",
                "  pipelines: 2",
                "  repetitions: 2",
                "importance:",
                "  permutations: 3",
            ]
        )
        + "\n"
    )
    return str(config_path), str(data_path)


STAGES = ("resample-bench", "model-select", "feature-select", "compare")
COMPARED_FILES = (
    "resample_bench.csv",
    "model_select.csv",
    "feature_select.csv",
    "compare.csv",
    "cd_diagram.svg",
)


def run_stages(config_path, out_dir, jobs):
    runner = CliRunner()
    for stage in STAGES:
        result = runner.invoke(
            main, ["--config", config_path, "--out", out_dir, "--jobs", str(jobs), stage]
        )
        assert result.exit_code == 0, (stage, result.output, result.stderr)


def test_11_reruns_are_byte_identical(tmp_path):
    config_path, _ = write_cli_experiment(tmp_path)
    outs = {1: str(tmp_path / "jobs1"), 4: str(tmp_path / "jobs4"), "again": str(tmp_path / "rerun")}
    run_stages(config_path, outs[1], jobs=1)
    run_stages(config_path, outs[4], jobs=4)
    run_stages(config_path, outs["again"], jobs=4)

    mismatched = []
    for name in COMPARED_FILES:
        blobs = {
            key: open(f"{out}/{name}", "rb").read() for key, out in outs.items()
        }
        if len(set(blobs.values())) != 1:
            mismatched.append(name)
    report(
        11, "byte-identical reruns",
        not mismatched,
        "jobs 1 vs 4 vs repeat: " + (f"differs: {mismatched}" if mismatched else
                                      f"{len(COMPARED_FILES)} files identical"),
    )


# ---------------------------------------------------------------------------
# 12: the HTTP service and the CLI agree bit-for-bit


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_12_service_parity(tmp_path, signal):
    import httpx

    bundle = train_final(
        signal,
        PipelineSpec(ResamplerSpec("smote"), ModelSpec("GNB"), features=3),
        seed=0,
        created_at="2026-01-01T00:00:00Z",
    )
    bundle_path = str(tmp_path / "bundle.json")
    save_bundle(bundle, bundle_path)

    rows_ds = make_signal_fixture(n=1000, seed=911)
    rows_path = str(tmp_path / "rows.csv")
    write_csv(rows_ds, rows_path)
    with open(rows_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1000

    pred_path = str(tmp_path / "predictions.csv")
    result = CliRunner().invoke(
        main, ["predict", rows_path, "--bundle", bundle_path, "-o", pred_path]
    )
    assert result.exit_code == 0, result.output
    with open(pred_path, newline="") as fh:
        cli_rows = list(csv.reader(fh))[1:]
    cli_pred = [(label, float(score)) for label, score in cli_rows]

    port = free_port()
    proc = subprocess.Popen(
        ["imbapipe", "serve", "--bundle", bundle_path, "--port", str(port)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        base = f"http://127.0.0.1:{port}"
        with httpx.Client(base_url=base, timeout=5.0) as client:
            deadline = time.time() + 20.0
            while True:
                try:
                    if client.get("/health").status_code == 200:
                        break
                except httpx.TransportError:
                    pass
                if time.time() > deadline:
                    pytest.fail("service did not come up within 20s")
                time.sleep(0.1)

            mismatches = 0
            times = []
            for row, (cli_label, cli_score) in zip(rows, cli_pred):
                features = {name: float(row[name]) for name in bundle.feature_names}
                t0 = time.perf_counter()
                resp = client.post("/api/predict", json={"features": features})
                times.append(time.perf_counter() - t0)
                assert resp.status_code == 200, resp.text
                body = resp.json()
                if body["label"] != cli_label or body["score"] != cli_score:
                    mismatches += 1
    finally:
        proc.terminate()
        proc.wait(timeout=10)

    mean_ms = 1000.0 * float(np.mean(times))
    report(
        12, "service parity",
        mismatches == 0 and mean_ms < 50.0,
        f"1000 rows, {mismatches} mismatches, mean round trip {mean_ms:.1f}ms",
    )
