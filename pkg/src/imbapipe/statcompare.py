"""Rank-based comparison of pipelines: Friedman test, Nemenyi distances.

The protocol repeats stratified cross-validation several times, ranks the
pipelines within each repetition (rank 1 = best), and tests whether the
average ranks could be a chance ordering.  When the Friedman test rejects,
pairs of pipelines further apart than the critical distance differ
significantly; everything a report needs to draw the usual critical
distance diagram comes out of :func:`cd_diagram_data`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import chi2, rankdata

from .evaluation import CvCache, PipelineSpec, _score_fold, stratified_kfold
from .qalpha_table import Q_ALPHA
from .utils import as_float_matrix, as_label_vector, derive_seed, parallel_map


class StatError(ValueError):
    pass


CD_FORMULAS = ("demsar", "paper")


def rank_pipelines(scores) -> np.ndarray:
    """Per-row ranks, 1 = highest score; ties share the average rank.

    Rows are blocks (repetitions, or individual folds), columns pipelines.
    Every row of the result sums to m(m+1)/2.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2:
        raise StatError("scores must be 2-dimensional (blocks x pipelines)")
    if scores.shape[1] < 2:
        raise StatError("need at least 2 pipelines to rank")
    if not np.isfinite(scores).all():
        raise StatError("scores contain NaN or infinity; drop failed blocks first")
    return np.vstack([rankdata(-row, method="average") for row in scores])


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    p_value: float
    blocks: int
    groups: int
    average_ranks: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "blocks": self.blocks,
            "groups": self.groups,
            "average_ranks": list(self.average_ranks),
        }


def friedman_test(ranks) -> FriedmanResult:
    """Friedman chi-square over a rank table (blocks x groups).

    A table with no rank variation at all (every column tied everywhere)
    degenerates to statistic 0 with p-value 1.
    """
    ranks = np.asarray(ranks, dtype=np.float64)
    if ranks.ndim != 2 or ranks.shape[0] < 2 or ranks.shape[1] < 2:
        raise StatError("rank table needs at least 2 blocks and 2 groups")
    n, m = ranks.shape
    avg = ranks.mean(axis=0)
    stat = 12.0 * n / (m * (m + 1)) * float(np.sum((avg - (m + 1) / 2.0) ** 2))
    p = float(chi2.sf(stat, m - 1)) if stat > 0 else 1.0
    return FriedmanResult(
        statistic=float(stat),
        p_value=p,
        blocks=n,
        groups=m,
        average_ranks=tuple(float(v) for v in avg),
    )


def critical_difference(groups: int, blocks: int, alpha: float = 0.05, formula: str = "demsar") -> float:
    """Nemenyi critical distance between average ranks.

    ``demsar`` uses q_alpha/sqrt(2) * sqrt(m(m+1)/(6n)); ``paper`` swaps in
    m(m-1) under the root.  Reports must state which formula produced a
    diagram, so both stay available.
    """
    if formula not in CD_FORMULAS:
        raise StatError(f"formula must be one of {CD_FORMULAS}")
    table = Q_ALPHA.get(alpha)
    if table is None:
        raise StatError(f"alpha must be one of {sorted(Q_ALPHA)}")
    if groups not in table:
        raise StatError(f"groups must be in 2..{max(table)}")
    if blocks < 1:
        raise StatError("blocks must be >= 1")
    q = table[groups] / math.sqrt(2.0)
    inner = groups * (groups - 1) if formula == "paper" else groups * (groups + 1)
    return q * math.sqrt(inner / (6.0 * blocks))


def nemenyi_compare(average_ranks, blocks: int, alpha: float = 0.05, formula: str = "demsar") -> np.ndarray:
    """Boolean matrix: True where two pipelines' ranks differ significantly."""
    avg = np.asarray(average_ranks, dtype=np.float64)
    cd = critical_difference(len(avg), blocks, alpha, formula)
    return np.abs(avg[:, None] - avg[None, :]) >= cd


def cd_diagram_data(names: Sequence[str], average_ranks, cd: float) -> dict:
    """Geometry for a critical distance diagram, best pipeline first.

    ``groups`` lists the maximal runs of consecutive sorted entries whose
    rank spread stays below the critical distance (the bars that tie
    pipelines together); each run is a (first, last) index pair into
    ``entries``.
    """
    avg = np.asarray(average_ranks, dtype=np.float64)
    if len(names) != len(avg):
        raise StatError("names and ranks differ in length")
    m = len(avg)
    order = np.argsort(avg, kind="stable")
    entries = [{"name": names[i], "rank": float(avg[i])} for i in order]
    ranks = [e["rank"] for e in entries]
    groups: list[tuple[int, int]] = []
    for i in range(m):
        j = i
        while j + 1 < m and ranks[j + 1] - ranks[i] < cd:
            j += 1
        if j > i and not (groups and groups[-1][0] <= i and j <= groups[-1][1]):
            groups.append((i, j))
    return {
        "axis": {"low": 1.0, "high": float(m)},
        "cd": float(cd),
        "entries": entries,
        "groups": groups,
    }


@dataclass(frozen=True)
class ComparisonResult:
    names: tuple[str, ...]
    pipelines: tuple[PipelineSpec, ...]
    score_matrix: np.ndarray
    rank_matrix: np.ndarray
    friedman: FriedmanResult
    alpha: float
    formula: str
    cd: float
    significant: np.ndarray
    basis: str

    @property
    def average_ranks(self) -> tuple[float, ...]:
        return self.friedman.average_ranks

    @property
    def winner_index(self) -> int:
        avg = self.friedman.average_ranks
        return int(np.argmin(avg))

    @property
    def winner(self) -> PipelineSpec:
        return self.pipelines[self.winner_index]

    def diagram_data(self) -> dict:
        return cd_diagram_data(list(self.names), self.friedman.average_ranks, self.cd)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "pipelines": [p.to_dict() for p in self.pipelines],
            "score_matrix": self.score_matrix.tolist(),
            "rank_matrix": self.rank_matrix.tolist(),
            "friedman": self.friedman.to_dict(),
            "alpha": self.alpha,
            "formula": self.formula,
            "cd": self.cd,
            "significant": self.significant.tolist(),
            "basis": self.basis,
            "winner": self.names[self.winner_index],
        }


def compare_pipelines(
    pipelines: Sequence[PipelineSpec],
    X,
    y,
    folds: int = 10,
    repetitions: int = 10,
    seed: int = 0,
    jobs: int = 1,
    alpha: float = 0.05,
    formula: str = "demsar",
    basis: str = "run-mean",
    per_fold_normalize: bool = False,
    names: Sequence[str] | None = None,
) -> ComparisonResult:
    """Repeated cross-validation ranking of several pipelines.

    Each repetition draws fresh stratified folds from its own derived seed.
    With basis ``run-mean`` one rank block is a repetition (ranked on the
    repetition's mean score); with ``per-fold`` every fold is its own block.
    """
    if basis not in ("run-mean", "per-fold"):
        raise StatError("basis must be 'run-mean' or 'per-fold'")
    if len(pipelines) < 2:
        raise StatError("need at least 2 pipelines to compare")
    X = as_float_matrix(X)
    y = as_label_vector(y, X.shape[0])
    if names is None:
        names = [p.identifier() for p in pipelines]
    elif len(names) != len(pipelines):
        raise StatError("names and pipelines differ in length")

    blocks: list[list[float]] = []
    for rep in range(repetitions):
        rep_seed = derive_seed(seed, "rep", rep)
        cache = CvCache(
            X, y, stratified_kfold(y, folds, rep_seed), rep_seed, per_fold_normalize
        )
        cache.warm([(f, p.resampler, p.features) for p in pipelines for f in range(folds)], jobs=jobs)
        units = [(pi, f) for pi in range(len(pipelines)) for f in range(folds)]
        results = parallel_map(
            lambda unit: _score_fold(pipelines[unit[0]], cache, unit[1]), units, jobs
        )
        table = np.array(results, dtype=np.float64).reshape(len(pipelines), folds)
        if basis == "per-fold":
            blocks.extend(table.T.tolist())
        else:
            blocks.append([float(np.nanmean(row)) for row in table])

    score_matrix = np.array(blocks, dtype=np.float64)
    rank_matrix = rank_pipelines(score_matrix)
    friedman = friedman_test(rank_matrix)
    cd = critical_difference(len(pipelines), score_matrix.shape[0], alpha, formula)
    significant = nemenyi_compare(friedman.average_ranks, score_matrix.shape[0], alpha, formula)
    return ComparisonResult(
        names=tuple(names),
        pipelines=tuple(pipelines),
        score_matrix=score_matrix,
        rank_matrix=rank_matrix,
        friedman=friedman,
        alpha=alpha,
        formula=formula,
        cd=cd,
        significant=significant,
        basis=basis,
    )
