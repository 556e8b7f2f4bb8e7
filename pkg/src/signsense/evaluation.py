"""Cross-validation protocol, metric suite, grid search, feature selection.

Two-stage protocol: stage 1 tunes hyperparameters with group-aware folds
(whole tales never straddle a fold boundary), stage 2 estimates final
performance with plain stratified K-fold plus a top-N feature sweep.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import boost
from ._util import substream
from .aggregate import read_feature_matrix
from .labeling import read_gold_csv

logger = logging.getLogger(__name__)

DEFAULT_TOP_N = (16, 32, 64, 96, 128, 160)

METRIC_COLUMNS = (
    "accuracy",
    "balanced_accuracy",
    "macro_precision",
    "macro_recall",
    "macro_f1",
    "weighted_precision",
    "weighted_recall",
    "weighted_f1",
    "recall_negative",
    "recall_neutral",
    "recall_positive",
    "pearson_rho",
)


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray  # fold id per sample
    k: int
    grouping: str | None = None

    def split(self, fold: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.flatnonzero(self.fold_of == fold)
        train = np.flatnonzero(self.fold_of != fold)
        return train, test


def sgkf_split(
    labels: np.ndarray, groups: list[str], k: int, seed: int = 0
) -> FoldAssignment:
    """Stratified group K-fold via greedy assignment.

    Groups are shuffled (seeded), stable-sorted by size descending, and
    each is placed on the fold minimizing the squared deviation of
    per-class fold counts from the ideal equal share total_c / K. Ties go
    to the currently smaller fold, then the lower fold id. A group is
    never split across folds.
    """
    labels = np.asarray(labels, dtype=int)
    group_names = sorted(set(groups))
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > len(group_names):
        raise ValueError(f"k={k} exceeds the number of groups ({len(group_names)})")

    n_classes = boost.N_CLASSES
    counts: dict[str, np.ndarray] = {
        g: np.zeros(n_classes, dtype=float) for g in group_names
    }
    for y, g in zip(labels, groups):
        counts[g][y] += 1.0

    rng = substream(seed, "split")
    order = list(rng.permutation(len(group_names)))
    shuffled = [group_names[i] for i in order]
    shuffled.sort(key=lambda g: -counts[g].sum())  # stable: keeps shuffle on ties

    ideal = labels_class_counts(labels) / k
    fold_counts = np.zeros((k, n_classes))
    assignment: dict[str, int] = {}
    for g in shuffled:
        gc = counts[g]
        deltas = np.empty(k)
        for f in range(k):
            after = fold_counts[f] + gc
            deltas[f] = float(((after - ideal) ** 2).sum() - ((fold_counts[f] - ideal) ** 2).sum())
        sizes = fold_counts.sum(axis=1)
        best = min(range(k), key=lambda f: (deltas[f], sizes[f], f))
        assignment[g] = best
        fold_counts[best] += gc

    fold_of = np.array([assignment[g] for g in groups], dtype=int)
    return FoldAssignment(fold_of, k, grouping="tale")


def labels_class_counts(labels: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(labels, dtype=int), minlength=boost.N_CLASSES).astype(float)


def stratified_kfold(labels: np.ndarray, k: int, seed: int = 0) -> FoldAssignment:
    """Per-class round-robin after a seeded shuffle; sizes differ by <=1 per class."""
    labels = np.asarray(labels, dtype=int)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = substream(seed, "split")
    fold_of = np.empty(len(labels), dtype=int)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < k:
            logger.warning("class %d has only %d members for %d folds", c, len(idx), k)
        idx = rng.permutation(idx)
        fold_of[idx] = np.arange(len(idx)) % k
    return FoldAssignment(fold_of, k)


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    balanced_accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    recall_per_class: tuple[float, float, float]
    pearson_rho: float
    confusion: np.ndarray  # 3x3, rows = true class

    def as_row(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "balanced_accuracy": self.balanced_accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "recall_negative": self.recall_per_class[0],
            "recall_neutral": self.recall_per_class[1],
            "recall_positive": self.recall_per_class[2],
            "pearson_rho": self.pearson_rho,
        }


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> MetricReport:
    """Full metric suite over the fixed 3-class set.

    Macro averages always run over all three classes; a class absent from
    y_true contributes recall 0 (with a warning) so folds stay comparable.
    Pearson rho is computed on the ordinal mapping {-1, 0, +1} and is NaN
    when either side has zero variance.
    """
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("y_true and y_pred must be equal-length, non-empty")

    n_classes = boost.N_CLASSES
    confusion = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(confusion, (y_true, y_pred), 1)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    diag = np.diag(confusion)
    total = confusion.sum()

    absent = np.flatnonzero(support == 0)
    if absent.size:
        logger.warning("classes %s absent from y_true; their recall counts as 0",
                       absent.tolist())

    recall = np.where(support > 0, diag / np.maximum(support, 1), 0.0)
    precision = np.where(predicted > 0, diag / np.maximum(predicted, 1), 0.0)
    pr_sum = precision + recall
    f1 = np.where(pr_sum > 0, 2 * precision * recall / np.where(pr_sum > 0, pr_sum, 1), 0.0)
    weights = support / total

    t = y_true - 1.0
    p = y_pred - 1.0
    if t.var() == 0.0 or p.var() == 0.0:
        logger.warning("zero variance in ordinal labels; pearson_rho undefined (NaN)")
        rho = math.nan
    else:
        rho = float(np.mean((t - t.mean()) * (p - p.mean())) / (t.std() * p.std()))

    accuracy = float(diag.sum() / total)
    return MetricReport(
        accuracy=accuracy,
        balanced_accuracy=float(recall.mean()),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        weighted_precision=float((weights * precision).sum()),
        # Support-weighted recall telescopes to accuracy; use the identity
        # so the equality holds exactly, not just to rounding.
        weighted_recall=accuracy,
        weighted_f1=float((weights * f1).sum()),
        recall_per_class=(float(recall[0]), float(recall[1]), float(recall[2])),
        pearson_rho=rho,
        confusion=confusion,
    )


def _early_stop_split(
    y_train: np.ndarray, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified 20% carve-out of the training portion for early stopping."""
    inner = stratified_kfold(y_train, 5, seed)
    valid_local = np.flatnonzero(inner.fold_of == 0)
    fit_local = np.flatnonzero(inner.fold_of != 0)
    return fit_local, valid_local


def fit_with_early_stop(
    X: np.ndarray,
    y: np.ndarray,
    hp: boost.HyperParams,
    seed: int,
    feature_names: list[str] | None = None,
) -> boost.GbdtModel:
    # Route the run seed into the model so subsampling randomness also
    # flows from the single config seed.
    hp = replace(hp, seed=seed)
    fit_idx, valid_idx = _early_stop_split(y, seed)
    if len(np.unique(y[fit_idx])) < 2 or valid_idx.size == 0:
        return boost.fit(X, y, hp, feature_names=feature_names)
    return boost.fit(
        X[fit_idx],
        y[fit_idx],
        hp,
        valid=(X[valid_idx], y[valid_idx]),
        feature_names=feature_names,
    )


def cross_validate(
    X: np.ndarray,
    y: np.ndarray,
    hp: boost.HyperParams,
    assignment: FoldAssignment,
    seed: int,
    feature_names: list[str] | None = None,
) -> tuple[list[MetricReport], list[dict[str, float]]]:
    """Per-fold metric reports and gain importances for one feature set."""
    reports: list[MetricReport] = []
    importances: list[dict[str, float]] = []
    for fold in range(assignment.k):
        train_idx, test_idx = assignment.split(fold)
        if test_idx.size == 0:
            raise ValueError(f"fold {fold} has no test samples")
        model = fit_with_early_stop(
            X[train_idx], y[train_idx], hp, seed + fold, feature_names
        )
        y_pred = boost.predict(model, X[test_idx])
        reports.append(compute_metrics(y[test_idx], y_pred))
        importances.append(boost.feature_importance(model))
    return reports, importances


def mean_metrics(reports: list[MetricReport]) -> dict[str, float]:
    """Simple (unpooled) mean of fold metrics, one value per column."""
    return {
        col: float(np.mean([r.as_row()[col] for r in reports]))
        for col in METRIC_COLUMNS
    }


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    groups: list[str],
    grid: dict[str, list],
    hp_base: boost.HyperParams,
    k: int = 5,
    seed: int = 0,
) -> tuple[boost.HyperParams, list[tuple[dict, float]]]:
    """Score every lattice point by mean macro-F1 under group-aware CV.

    Ties keep the earlier lattice point, so the search is deterministic
    for a fixed grid ordering.
    """
    if not grid:
        raise ValueError("empty grid lattice")
    names = list(grid)
    assignment = sgkf_split(y, groups, k, seed)
    best_hp = hp_base
    best_score = -np.inf
    scored: list[tuple[dict, float]] = []
    for values in itertools.product(*(grid[name] for name in names)):
        point = dict(zip(names, values))
        hp = replace(hp_base, **point)
        reports, _ = cross_validate(X, y, hp, assignment, seed)
        score = float(np.mean([r.macro_f1 for r in reports]))
        scored.append((point, score))
        if score > best_score:
            best_score = score
            best_hp = hp
    return best_hp, scored


def select_top_features(
    fold_importances: list[dict[str, float]],
    n: int,
    feature_names: list[str],
) -> list[int]:
    """Indices of the top-N features by mean importance across folds.

    Descending importance with a stable tie-break on the feature name.
    """
    if n > len(feature_names):
        raise ValueError(f"n={n} exceeds feature count {len(feature_names)}")
    means = {
        name: float(np.mean([imp.get(name, 0.0) for imp in fold_importances]))
        for name in feature_names
    }
    ranked = sorted(feature_names, key=lambda name: (-means[name], name))
    index_of = {name: i for i, name in enumerate(feature_names)}
    return [index_of[name] for name in ranked[:n]]


def importance_ranking(
    fold_importances: list[dict[str, float]], feature_names: list[str]
) -> list[tuple[str, float, float]]:
    """(name, mean, std) across folds, sorted like select_top_features."""
    rows = []
    for name in feature_names:
        vals = np.array([imp.get(name, 0.0) for imp in fold_importances])
        rows.append((name, float(vals.mean()), float(vals.std())))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows


@dataclass
class RunConfig:
    """Everything run_experiment needs; fully serialized for provenance."""

    seed: int = 0
    k_stage1: int = 5
    k_eval: int = 5
    top_n: tuple[int, ...] = DEFAULT_TOP_N
    grid: dict[str, list] = field(default_factory=dict)
    hp: boost.HyperParams = boost.HyperParams()

    def lines(self) -> list[str]:
        out = [
            f"seed = {self.seed}",
            f"k_stage1 = {self.k_stage1}",
            f"k = {self.k_eval}",
            "top_n = " + ",".join(str(n) for n in self.top_n),
        ]
        for name, values in self.grid.items():
            out.append(f"grid.{name} = " + ",".join(str(v) for v in values))
        for name, value in vars(self.hp).items():
            out.append(f"hp.{name} = {value}")
        return out


@dataclass
class EvalReport:
    hp: boost.HyperParams
    n_feature_rows: int
    n_gold_rows: int
    n_joined: int
    best_n: int
    fold_reports: list[MetricReport]
    mean: dict[str, float]
    ranking: list[tuple[str, float, float]]
    sweep: list[tuple[int, dict[str, float]]]
    grid_scores: list[tuple[dict, float]]
    trajectories: dict[str, tuple[list[int], list[float]]]  # tale -> (ordinals, rolling)


def rolling_mean(values: list[float] | np.ndarray, window: int = 7) -> list[float]:
    """Centered moving average; the window shrinks at the boundaries."""
    half = window // 2
    v = np.asarray(values, dtype=float)
    return [
        float(v[max(0, i - half) : i + half + 1].mean()) for i in range(len(v))
    ]


def join_dataset(
    features_file, gold_file
) -> tuple[np.ndarray, np.ndarray, list[str], list[str], list[str]]:
    """Inner-join features and gold labels on segment_id.

    Returns (X, y, tale_ids, segment_ids, feature_names) for the joined
    rows; segments missing on either side are dropped and counted by the
    caller.
    """
    names, segment_ids, tale_ids, X = read_feature_matrix(features_file)
    gold = read_gold_csv(gold_file)
    keep = [i for i, seg in enumerate(segment_ids) if seg in gold]
    if not keep:
        raise ValueError("feature matrix and gold labels share no segment ids")
    y = np.array([int(gold[segment_ids[i]]) for i in keep], dtype=int)
    return (
        X[keep],
        y,
        [tale_ids[i] for i in keep],
        [segment_ids[i] for i in keep],
        names,
    )


def run_experiment(
    features_file,
    gold_file,
    config: RunConfig,
    run_grid: bool = True,
) -> EvalReport:
    """Stage-1 grid search, stage-2 CV with top-N sweep, report assembly."""
    if config.k_eval < 2 or config.k_stage1 < 2:
        raise ValueError("cross-validation needs K >= 2")
    X, y, tales, segments, feature_names = join_dataset(features_file, gold_file)
    _, seg_all, _, _ = read_feature_matrix(features_file)
    gold = read_gold_csv(gold_file)

    hp = config.hp
    grid_scores: list[tuple[dict, float]] = []
    if run_grid and config.grid:
        hp, grid_scores = grid_search(
            X, y, tales, config.grid, hp, k=config.k_stage1, seed=config.seed
        )

    assignment = stratified_kfold(y, config.k_eval, config.seed)
    full_reports, fold_importances = cross_validate(
        X, y, hp, assignment, config.seed, feature_names
    )
    ranking = importance_ranking(fold_importances, feature_names)

    sweep: list[tuple[int, dict[str, float]]] = []
    best_n = len(feature_names)
    best_reports = full_reports
    best_score = mean_metrics(full_reports)["macro_f1"]
    for n in config.top_n:
        if n > len(feature_names):
            logger.warning("skipping top-%d: only %d features", n, len(feature_names))
            continue
        idx = select_top_features(fold_importances, n, feature_names)
        sub_names = [feature_names[i] for i in idx]
        reports, _ = cross_validate(
            X[:, idx], y, hp, assignment, config.seed, sub_names
        )
        stats = mean_metrics(reports)
        sweep.append((n, stats))
        if stats["macro_f1"] > best_score:
            best_score = stats["macro_f1"]
            best_n = n
            best_reports = reports

    trajectories: dict[str, tuple[list[int], list[float]]] = {}
    for tale in sorted(set(tales)):
        ordered = sorted(
            (seg, int(y[i]) - 1) for i, seg in enumerate(segments) if tales[i] == tale
        )
        ordinals = [v for _, v in ordered]
        trajectories[tale] = (ordinals, rolling_mean(ordinals))

    return EvalReport(
        hp=hp,
        n_feature_rows=len(seg_all),
        n_gold_rows=len(gold),
        n_joined=len(segments),
        best_n=best_n,
        fold_reports=best_reports,
        mean=mean_metrics(best_reports),
        ranking=ranking,
        sweep=sweep,
        grid_scores=grid_scores,
        trajectories=trajectories,
    )
