"""Cross-validated comparison of oversamplers.

Per fold: min-max scaling is fitted on the training rows, the training rows
are oversampled to equal class counts, every classifier configuration is
trained on the result and scored on the untouched validation fold. Scores are
averaged over folds per grid point, the best grid point is kept per
(classifier, metric), and repeats are averaged afterwards.
"""

from __future__ import annotations

import hashlib
import itertools
import zlib
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import gammaincc
from scipy.stats import rankdata

from .classifiers import predict_grid
from .dataset import Dataset, apply_minmax, fit_minmax
from .oversampling import oversample

METRICS = ("f_measure", "g_mean", "auc")
SIGNIFICANCE = 0.05


class EvaluationError(ValueError):
    pass


# -- seeding --------------------------------------------------------------------

def seed_sequence(root: int, *parts) -> np.random.SeedSequence:
    """Independent stream keyed by ``parts`` (names and integers).

    String parts are hashed with CRC-32 so keys are stable across processes
    and Python versions.
    """
    key = tuple(zlib.crc32(str(part).encode()) for part in parts)
    return np.random.SeedSequence(entropy=int(root), spawn_key=key)


def make_rng(root: int, *parts) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root, *parts))


# -- folds ----------------------------------------------------------------------

def stratified_kfold(labels, n_folds: int, seed) -> np.ndarray:
    """Fold id (0..n_folds-1) for every row.

    Each class is shuffled and dealt round-robin; the next class continues
    where the previous one stopped so fold sizes stay within one row of each
    other too.
    """
    labels = np.asarray(labels)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    folds = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < n_folds:
            raise EvaluationError(
                f"class {cls!r} has {len(idx)} members, fewer than {n_folds} folds"
            )
        idx = rng.permutation(idx)
        folds[idx] = (offset + np.arange(len(idx))) % n_folds
        offset = (offset + len(idx)) % n_folds
    return folds


# -- metrics --------------------------------------------------------------------

def auc_pairwise(y_true, scores) -> float:
    """Fraction of (positive, negative) pairs ranked correctly; ties count half."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    pos = scores[y_true == 1]
    neg = scores[y_true == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise EvaluationError("AUC needs both classes")
    diff = pos[:, None] - neg[None, :]
    return float(((diff > 0).sum() + 0.5 * (diff == 0).sum()) / diff.size)


def auc_trapezoid(y_true, scores) -> float:
    """Trapezoidal area under the ROC curve, one vertex per distinct score."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    n_pos = int((y_true == 1).sum())
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvaluationError("AUC needs both classes")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = y_true[order] == 1
    last_of_group = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tp = np.r_[0, np.cumsum(t)[last_of_group]]
    fp = np.r_[0, np.cumsum(~t)[last_of_group]]
    area = np.sum((fp[1:] - fp[:-1]) * (tp[1:] + tp[:-1])) / 2.0
    return float(area / (n_pos * n_neg))


def metrics(y_true, scores, threshold: float = 0.5) -> dict:
    """F-measure, G-mean and AUC with class 1 as the positive class.

    A row is predicted positive when its score is >= ``threshold``.
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    if len(np.unique(y_true)) != 2:
        raise EvaluationError("metrics need both classes in y_true")
    pred = scores >= threshold
    pos = y_true == 1
    tp = int(np.sum(pred & pos))
    fp = int(np.sum(pred & ~pos))
    fn = int(np.sum(~pred & pos))
    tn = int(np.sum(~pred & ~pos))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn)
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    specificity = tn / (tn + fp)
    return {
        "f_measure": f,
        "g_mean": float(np.sqrt(recall * specificity)),
        "auc": auc_trapezoid(y_true, scores),
    }


# -- ranking and the Friedman test --------------------------------------------------

def rank_row(scores, higher_better: bool = True) -> np.ndarray:
    """Rank 1 for the best score; tied scores share the average rank."""
    scores = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(scores)):
        raise EvaluationError("cannot rank non-finite scores")
    return rankdata(-scores if higher_better else scores, method="average")


def friedman(ranks) -> tuple[float, float]:
    """Friedman chi-square statistic and p-value for an N x K rank matrix.

    ``12 / (N K (K+1)) * sum_j R_j^2 - 3 N (K+1)`` with ``R_j`` the column
    rank sums; the p-value is the chi-square(K-1) upper tail.
    """
    R = np.asarray(ranks, dtype=float)
    if R.ndim != 2:
        raise EvaluationError("rank matrix must be 2-D")
    N, K = R.shape
    if N < 2 or K < 2:
        raise EvaluationError(f"need at least 2 rows and 2 columns, got {N} x {K}")
    if not np.allclose(R.sum(axis=1), K * (K + 1) / 2) or R.min() < 1 or R.max() > K:
        raise EvaluationError("rows are not rank vectors over 1..K")
    col = R.sum(axis=0)
    stat = 12.0 / (N * K * (K + 1)) * np.sum(col ** 2) - 3.0 * N * (K + 1)
    stat = max(float(stat), 0.0)
    return stat, float(gammaincc((K - 1) / 2.0, stat / 2.0))


@dataclass
class RankTable:
    ranks: pd.DataFrame        # (classifier, metric, dataset) x method
    mean_ranks: pd.DataFrame   # (classifier, metric) x method
    friedman: pd.DataFrame     # classifier, metric, n_datasets, statistic, p_value, significant


def rank_table(table: pd.DataFrame, methods) -> RankTable:
    """Rank methods within every (classifier, metric, dataset) row of a wide score table."""
    methods = list(methods)
    rank_values = np.vstack([rank_row(row) for row in table[methods].to_numpy()])
    ranks = table[["dataset", "classifier", "metric"]].copy()
    ranks[methods] = rank_values
    mean_ranks = (ranks.groupby(["classifier", "metric"], sort=False)[methods]
                  .mean().reset_index())
    rows = []
    for (clf, metric), grp in ranks.groupby(["classifier", "metric"], sort=False):
        if len(grp) >= 2 and len(methods) >= 2:
            stat, p = friedman(grp[methods].to_numpy())
        else:
            stat, p = float("nan"), float("nan")
        rows.append({"classifier": clf, "metric": metric, "n_datasets": len(grp),
                     "statistic": stat, "p_value": p,
                     "significant": bool(p < SIGNIFICANCE) if p == p else False})
    return RankTable(ranks, mean_ranks, pd.DataFrame(rows))


# -- the cross-validation protocol ------------------------------------------------

def expand_grid(grid: dict | None) -> list[dict]:
    """Cartesian product of a ``{name: [values]}`` mapping, in declaration order."""
    if not grid:
        return [{}]
    names = list(grid)
    values = [v if isinstance(v, (list, tuple)) else [v] for v in grid.values()]
    return [dict(zip(names, combo)) for combo in itertools.product(*values)]


@dataclass(frozen=True)
class MethodGrid:
    """An oversampler or classifier id with its hyper-parameter grid."""

    method: str
    grid: tuple = ({},)

    @classmethod
    def from_mapping(cls, method: str, grid: dict | None) -> "MethodGrid":
        return cls(method, tuple(expand_grid(grid)))


@dataclass(frozen=True)
class CvCellResult:
    dataset: str
    classifier: str
    oversampler: str
    metric: str
    score: float
    oversampler_params: dict = field(default_factory=dict)
    classifier_params: dict = field(default_factory=dict)
    repeat: int = 0


@dataclass
class RepeatOutcome:
    results: list
    fallbacks: list


def evaluate_repeat(dataset: Dataset, oversampler: MethodGrid, classifiers, n_folds: int,
                    repeat: int, seed: int, trace=None) -> RepeatOutcome:
    """One repeat of n-fold CV for one oversampler and its whole grid.

    ``trace``, if given, is called as ``trace(stage, fold, row_ids)`` with
    stage in {"scale_fit", "oversample", "train", "validate"}; ``row_ids``
    index the dataset and synthetic rows appear as -1.
    """
    X, y = dataset.features, dataset.y
    folds = stratified_kfold(y, n_folds, make_rng(seed, dataset.name, "cv", repeat))
    o_grid = oversampler.grid
    # scores[o, classifier][c, metric, fold]
    scores = {(o, clf.method): np.empty((len(clf.grid), len(METRICS), n_folds))
              for o in range(len(o_grid)) for clf in classifiers}
    fallbacks = []

    for fold in range(n_folds):
        train = np.flatnonzero(folds != fold)
        val = np.flatnonzero(folds == fold)
        if trace:
            trace("scale_fit", fold, train)
        scaler = fit_minmax(X[train])
        X_tr, X_va = apply_minmax(scaler, X[train]), apply_minmax(scaler, X[val])
        y_tr, y_va = y[train], y[val]
        S_min, S_maj = X_tr[y_tr == 1], X_tr[y_tr == 0]
        n_new = len(S_maj) - len(S_min)
        if trace:
            trace("validate", fold, val)
            trace("oversample", fold, train)

        cache = {}
        for o, params in enumerate(o_grid):
            rng = make_rng(seed, dataset.name, oversampler.method, fold, repeat)
            batch = oversample(oversampler.method, S_maj, S_min, n_new, rng, **params)
            if batch.fallback:
                fallbacks.append({"dataset": dataset.name, "oversampler": oversampler.method,
                                  "params": dict(params), "repeat": repeat, "fold": fold,
                                  "event": batch.fallback})
            X_aug = np.vstack([X_tr, batch.samples])
            y_aug = np.r_[y_tr, np.ones(len(batch), dtype=y_tr.dtype)]
            if trace:
                trace("train", fold, np.r_[train, np.full(len(batch), -1)])
            # identical synthetic sets (e.g. parameters the method ignores) share classifier fits
            key = hashlib.sha1(np.ascontiguousarray(batch.samples).tobytes()).hexdigest()
            if key not in cache:
                cache[key] = {}
                for clf in classifiers:
                    probas = predict_grid(clf.method, list(clf.grid), X_aug, y_aug, X_va)
                    cache[key][clf.method] = np.array(
                        [[metrics(y_va, pr)[m] for m in METRICS] for pr in probas])
            for clf in classifiers:
                scores[o, clf.method][:, :, fold] = cache[key][clf.method]

    results = []
    for clf in classifiers:
        # (oversampler config, classifier config, metric), averaged over folds
        cube = np.stack([scores[o, clf.method].mean(axis=2) for o in range(len(o_grid))])
        for mi, metric in enumerate(METRICS):
            flat = cube[:, :, mi]
            o, c = np.unravel_index(int(np.argmax(flat)), flat.shape)
            results.append(CvCellResult(dataset.name, clf.method, oversampler.method, metric,
                                        float(flat[o, c]), dict(o_grid[o]), dict(clf.grid[c]),
                                        repeat))
    return RepeatOutcome(results, fallbacks)


def run_cell(dataset: Dataset, oversampler: MethodGrid, classifiers, n_folds: int = 5,
             repeats: int = 5, seed: int = 0, trace=None) -> list[CvCellResult]:
    """All repeats for one (dataset, oversampler); one result per
    (classifier, metric, repeat). Use :func:`average_repeats` for the reported score."""
    out = []
    for r in range(repeats):
        out.extend(evaluate_repeat(dataset, oversampler, classifiers, n_folds, r, seed,
                                   trace).results)
    return out


def average_repeats(results) -> pd.DataFrame:
    """Mean score over repeats per (dataset, classifier, oversampler, metric)."""
    df = results_frame(results)
    return (df.groupby(["dataset", "classifier", "oversampler", "metric"], sort=False)["score"]
            .mean().reset_index())


def results_frame(results) -> pd.DataFrame:
    return pd.DataFrame([
        {"dataset": r.dataset, "classifier": r.classifier, "oversampler": r.oversampler,
         "metric": r.metric, "repeat": r.repeat, "score": r.score,
         "oversampler_params": r.oversampler_params, "classifier_params": r.classifier_params}
        for r in results
    ])


def score_table(results, datasets, classifiers, methods) -> pd.DataFrame:
    """Wide table: one row per (dataset, classifier, metric), one column per method,
    values averaged over repeats. Row order follows the given orders."""
    avg = average_repeats(results)
    wide = avg.pivot_table(index=["dataset", "classifier", "metric"], columns="oversampler",
                           values="score", sort=False)
    index = [(d, c, m) for d in datasets for c in classifiers for m in METRICS]
    wide = wide.reindex(index)[list(methods)]
    wide.columns.name = None
    return wide.reset_index()
