"""Report artifacts: delimited outputs plus rendered figures.

Everything lands in one output directory: report.csv in the per-fold
metric layout, per-fold confusion matrices, the importance ranking,
plotdata_*.csv files, and (optionally) PNG renderings of the same data.
"""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from ._util import atomic_path
from .evaluation import METRIC_COLUMNS, EvalReport, RunConfig
from .labeling import LABEL_NAMES

logger = logging.getLogger(__name__)

_BAR_METRICS = ("accuracy", "balanced_accuracy", "macro_f1", "weighted_f1")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_report_csv(report: EvalReport, path: Path) -> None:
    with atomic_path(path) as tmp, open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write("fold," + ",".join(METRIC_COLUMNS) + "\n")
        for i, fold in enumerate(report.fold_reports, start=1):
            row = fold.as_row()
            fh.write(f"{i}," + ",".join(_fmt(row[c]) for c in METRIC_COLUMNS) + "\n")
        fh.write("mean," + ",".join(_fmt(report.mean[c]) for c in METRIC_COLUMNS) + "\n")


def write_confusions(report: EvalReport, out_dir: Path) -> None:
    for i, fold in enumerate(report.fold_reports, start=1):
        with atomic_path(out_dir / f"confusion_fold{i}.csv") as tmp, open(
            tmp, "w", encoding="utf-8", newline=""
        ) as fh:
            fh.write("true\\pred," + ",".join(LABEL_NAMES) + "\n")
            for c, name in enumerate(LABEL_NAMES):
                cells = ",".join(str(int(v)) for v in fold.confusion[c])
                fh.write(f"{name},{cells}\n")


def write_importance_csv(report: EvalReport, path: Path) -> None:
    with atomic_path(path) as tmp, open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write("feature,importance\n")
        for name, mean, _std in report.ranking:
            fh.write(f"{name},{_fmt(mean)}\n")


def write_plotdata(report: EvalReport, out_dir: Path) -> None:
    with atomic_path(out_dir / "plotdata_metrics_per_fold.csv") as tmp, open(
        tmp, "w", encoding="utf-8", newline=""
    ) as fh:
        fh.write("fold,metric,value\n")
        for i, fold in enumerate(report.fold_reports, start=1):
            row = fold.as_row()
            for metric in _BAR_METRICS:
                fh.write(f"{i},{metric},{_fmt(row[metric])}\n")

    with atomic_path(out_dir / "plotdata_top_importances.csv") as tmp, open(
        tmp, "w", encoding="utf-8", newline=""
    ) as fh:
        fh.write("feature,importance_mean,importance_std\n")
        for name, mean, std in report.ranking[:30]:
            fh.write(f"{name},{_fmt(mean)},{_fmt(std)}\n")

    with atomic_path(out_dir / "plotdata_topn_sweep.csv") as tmp, open(
        tmp, "w", encoding="utf-8", newline=""
    ) as fh:
        fh.write("top_n,balanced_accuracy,macro_f1\n")
        for n, stats in report.sweep:
            fh.write(f"{n},{_fmt(stats['balanced_accuracy'])},{_fmt(stats['macro_f1'])}\n")

    with atomic_path(out_dir / "plotdata_trajectory.csv") as tmp, open(
        tmp, "w", encoding="utf-8", newline=""
    ) as fh:
        fh.write("tale,position,sentiment,rolling_mean\n")
        for tale, (ordinals, rolling) in report.trajectories.items():
            for i, (v, r) in enumerate(zip(ordinals, rolling)):
                fh.write(f"{tale},{i},{v},{_fmt(r)}\n")


def render_figures(report: EvalReport, out_dir: Path) -> None:
    """PNG renderings of the report next to the delimited files."""
    folds = np.arange(1, len(report.fold_reports) + 1)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / len(_BAR_METRICS)
    for j, metric in enumerate(_BAR_METRICS):
        vals = [fold.as_row()[metric] for fold in report.fold_reports]
        ax.bar(folds + (j - 1.5) * width, vals, width, label=metric.replace("_", " "))
    ax.set_xlabel("fold")
    ax.set_ylabel("score")
    ax.set_xticks(folds)
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    ax.set_title("test metrics per fold")
    _save(fig, out_dir / "metrics_per_fold.png")

    for i, fold in enumerate(report.fold_reports, start=1):
        fig, ax = plt.subplots(figsize=(4.5, 4))
        ax.imshow(fold.confusion, cmap="Blues")
        for r in range(fold.confusion.shape[0]):
            for c in range(fold.confusion.shape[1]):
                ax.text(c, r, str(int(fold.confusion[r, c])), ha="center", va="center")
        ax.set_xticks(range(3), LABEL_NAMES)
        ax.set_yticks(range(3), LABEL_NAMES)
        ax.set_xlabel("predicted")
        ax.set_ylabel("true")
        ax.set_title(f"confusion matrix, fold {i}")
        _save(fig, out_dir / f"confusion_fold{i}.png")

    top = report.ranking[:30]
    fig, ax = plt.subplots(figsize=(7, 0.28 * len(top) + 1.2))
    names = [name for name, _, _ in top]
    means = [mean for _, mean, _ in top]
    stds = [std for _, _, std in top]
    pos = np.arange(len(top))
    ax.barh(pos, means, xerr=stds, color="tab:blue")
    ax.set_yticks(pos, names, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("mean importance across folds")
    ax.set_title("top features")
    _save(fig, out_dir / "top_features.png")

    if report.trajectories:
        n_tales = len(report.trajectories)
        cols = min(4, n_tales)
        rows = (n_tales + cols - 1) // cols
        fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 2.6 * rows), squeeze=False)
        for ax in axes.flat[n_tales:]:
            ax.set_visible(False)
        for ax, (tale, (ordinals, rolling)) in zip(axes.flat, report.trajectories.items()):
            x = np.arange(len(ordinals))
            ax.plot(x, ordinals, ".", markersize=3, color="tab:gray")
            ax.plot(x, rolling, "--", color="tab:red")
            ax.set_ylim(-1.2, 1.2)
            ax.set_title(tale, fontsize=9)
        fig.suptitle("sentiment over narrative position (dashed: rolling mean)")
        _save(fig, out_dir / "trajectories.png")


def _save(fig, path: Path) -> None:
    with atomic_path(path) as tmp:
        fig.savefig(tmp, format="png", dpi=120, bbox_inches="tight")
    plt.close(fig)


def write_run_config(config: RunConfig, extra: dict[str, str], out_dir: Path) -> None:
    with atomic_path(out_dir / "run_config.txt") as tmp, open(
        tmp, "w", encoding="utf-8", newline=""
    ) as fh:
        for key, value in extra.items():
            fh.write(f"{key} = {value}\n")
        for line in config.lines():
            fh.write(line + "\n")


def write_all(
    report: EvalReport,
    config: RunConfig,
    out_dir: str | Path,
    extra: dict[str, str] | None = None,
    figures: bool = True,
) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report_csv(report, out_dir / "report.csv")
    write_confusions(report, out_dir)
    write_importance_csv(report, out_dir / "importance.csv")
    write_plotdata(report, out_dir)
    write_run_config(config, extra or {}, out_dir)
    if figures:
        render_figures(report, out_dir)
