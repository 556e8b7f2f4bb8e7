"""Command-line entry point exposing the pipeline stages as subcommands.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Verbosity comes from the SIGNSENSE_LOG environment variable (DEBUG, INFO,
WARNING, ...).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from . import aggregate, boost, catalog, evaluation, ingest, kinematics, labeling, report
from ._util import atomic_path

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class ConfigError(Exception):
    pass


def _parse_config_file(path: Path) -> dict[str, str]:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_HP_FIELDS = {f.name: f.type for f in dataclasses.fields(boost.HyperParams)}
_HP_INT_FIELDS = {"max_depth", "num_rounds_max", "early_stop_patience", "seed"}


def _hp_value(name: str, raw: str):
    return int(raw) if name in _HP_INT_FIELDS else float(raw)


def _build_config(args) -> tuple[evaluation.RunConfig, dict[str, str]]:
    raw = _parse_config_file(Path(args.config)) if args.config else {}
    paths = {k: raw[k] for k in ("features", "gold", "out", "model") if k in raw}

    hp_kwargs = {}
    grid: dict[str, list] = {}
    for key, value in raw.items():
        if key.startswith("hp."):
            name = key[3:]
            if name not in _HP_FIELDS:
                raise ConfigError(f"unknown hyperparameter {name!r}")
            hp_kwargs[name] = _hp_value(name, value)
        elif key.startswith("grid."):
            name = key[5:]
            if name not in _HP_FIELDS:
                raise ConfigError(f"unknown grid hyperparameter {name!r}")
            grid[name] = [_hp_value(name, v) for v in value.split(",") if v.strip()]

    seed = int(raw.get("seed", 0))
    if args.seed is not None:
        seed = args.seed
    top_n = raw.get("top_n", "")
    if getattr(args, "top_n", None):
        top_n = args.top_n
    top_list = tuple(int(v) for v in top_n.split(",") if v.strip()) or evaluation.DEFAULT_TOP_N
    k_eval = int(raw.get("k", 5))
    if getattr(args, "k", None):
        k_eval = args.k
    k_stage1 = int(raw.get("k_stage1", 5))
    if args.out:
        paths["out"] = args.out

    try:
        config = evaluation.RunConfig(
            seed=seed,
            k_stage1=k_stage1,
            k_eval=k_eval,
            top_n=top_list,
            grid=grid,
            hp=boost.HyperParams(**hp_kwargs),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    if config.k_eval < 2 or config.k_stage1 < 2:
        raise ConfigError("cross-validation needs k >= 2")
    return config, paths


def _require(paths: dict[str, str], key: str) -> Path:
    if key not in paths:
        raise ConfigError(f"config is missing the {key!r} path")
    path = Path(paths[key])
    if key != "out" and key != "model" and not path.exists():
        raise ConfigError(f"{key} file not found: {path}")
    return path


def cmd_extract(args) -> int:
    landmark_dir = Path(args.landmarks)
    if not landmark_dir.is_dir():
        raise ConfigError(f"not a directory: {landmark_dir}")
    files = sorted(landmark_dir.glob("*.csv"))
    if not files:
        raise ConfigError(f"no landmark CSVs in {landmark_dir}")
    vectors = []
    degeneracy_lines: list[str] = []
    failures = []
    for path in files:
        try:
            series = ingest.parse_landmark_file(path)
            degeneracy_lines.extend(ingest.validate_series(series).lines())
            repaired = ingest.interpolate_gaps(series)
            derived = kinematics.derive_all(repaired)
            vectors.append(aggregate.assemble_vector(repaired, derived))
        except Exception as exc:  # keep going; one bad file must not kill the batch
            failures.append((path, exc))
            logger.error("skipping %s: %s", path, exc)
    if not vectors:
        logger.error("no landmark file could be processed")
        return RUNTIME_ERROR
    out = Path(args.out)
    with atomic_path(out) as tmp:
        aggregate.write_feature_matrix(vectors, tmp)
    report_path = Path(args.report) if args.report else out.with_suffix(".degeneracy.txt")
    with atomic_path(report_path) as tmp, open(tmp, "w", encoding="utf-8") as fh:
        for line in degeneracy_lines:
            fh.write(line + "\n")
    print(f"wrote {len(vectors)} feature rows to {out} "
          f"({len(failures)} failed, {len(degeneracy_lines)} degeneracy findings)")
    return 0


def _collect_vote_files(paths: list[str]) -> dict[str, dict[str, Path]]:
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.glob("*.csv")))
        elif path.exists():
            files.append(path)
        else:
            raise ConfigError(f"vote path not found: {path}")
    by_tale: dict[str, dict[str, Path]] = {}
    for path in files:
        stem = path.stem
        if "__" not in stem:
            raise ConfigError(
                f"vote file {path.name!r} must be named <tale>__<annotator>.csv"
            )
        tale, _, annotator = stem.rpartition("__")
        by_tale.setdefault(tale, {})[annotator] = path
    return by_tale


def cmd_labels(args) -> int:
    by_tale = _collect_vote_files(args.votes)
    if not by_tale:
        raise ConfigError("no vote files found")
    tables = []
    for tale in sorted(by_tale):
        annotators = by_tale[tale]
        if not 2 <= len(annotators) <= 4:
            raise ConfigError(
                f"tale {tale!r} has {len(annotators)} annotator files, expected 2-4"
            )
        tables.append(labeling.build_vote_table(annotators, tale))
    table = labeling.merge_tables(tables)
    gold = labeling.gold_labels(table)
    agreement = labeling.agreement_report(table)

    out = Path(args.out)
    with atomic_path(out) as tmp:
        labeling.write_gold_csv(gold, tmp)
    base = Path(args.report) if args.report else out.with_suffix(".agreement")
    report_txt = base.parent / (base.name + ".txt")
    report_csv = base.parent / (base.name + ".csv")
    with atomic_path(report_txt) as tmp, open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"segments total: {agreement.total_count}\n")
        fh.write(f"segments kept by majority filter: {agreement.kept_count}\n")
        fh.write(f"alpha raw votes: {agreement.alpha_raw:.6f}\n")
        fh.write(f"alpha after majority filter: {agreement.alpha_filtered:.6f}\n")
        for name, count in agreement.distribution.items():
            fh.write(f"kept {name}: {count}\n")
    with atomic_path(report_csv) as tmp, open(tmp, "w", encoding="utf-8") as fh:
        fh.write("measure,value\n")
        fh.write(f"total,{agreement.total_count}\n")
        fh.write(f"kept,{agreement.kept_count}\n")
        fh.write(f"alpha_raw,{agreement.alpha_raw!r}\n")
        fh.write(f"alpha_filtered,{agreement.alpha_filtered!r}\n")
        for name, count in agreement.distribution.items():
            fh.write(f"kept_{name},{count}\n")
    print(f"kept {agreement.kept_count}/{agreement.total_count} segments; "
          f"alpha {agreement.alpha_raw:.3f} -> {agreement.alpha_filtered:.3f}")
    return 0


def cmd_train(args) -> int:
    config, paths = _build_config(args)
    features = _require(paths, "features")
    gold = _require(paths, "gold")
    out_dir = _require(paths, "out")
    out_dir.mkdir(parents=True, exist_ok=True)

    X, y, tales, _segments, feature_names = evaluation.join_dataset(features, gold)
    hp = config.hp
    grid_scores = []
    if config.grid:
        hp, grid_scores = evaluation.grid_search(
            X, y, tales, config.grid, hp, k=config.k_stage1, seed=config.seed
        )
    model = evaluation.fit_with_early_stop(X, y, hp, config.seed, feature_names)
    model_path = Path(paths.get("model", out_dir / "model.json"))
    with atomic_path(model_path) as tmp:
        boost.save_model(model, tmp)
    if grid_scores:
        with atomic_path(out_dir / "grid_scores.csv") as tmp, open(
            tmp, "w", encoding="utf-8"
        ) as fh:
            fh.write("params,macro_f1\n")
            for point, score in grid_scores:
                desc = ";".join(f"{k}={v}" for k, v in point.items())
                fh.write(f"{desc},{score!r}\n")
    report.write_run_config(
        evaluation.RunConfig(
            seed=config.seed, k_stage1=config.k_stage1, k_eval=config.k_eval,
            top_n=config.top_n, grid=config.grid, hp=hp,
        ),
        {"features": str(features), "gold": str(gold)},
        out_dir,
    )
    print(f"trained {len(model.rounds)} rounds on {len(y)} segments; model at {model_path}")
    return 0


def _run_report(args, figures: bool) -> int:
    config, paths = _build_config(args)
    features = _require(paths, "features")
    gold = _require(paths, "gold")
    out_dir = _require(paths, "out")
    result = evaluation.run_experiment(features, gold, config)
    report.write_all(
        result,
        config,
        out_dir,
        extra={"features": str(features), "gold": str(gold)},
        figures=figures,
    )
    print(
        f"joined {result.n_joined} segments "
        f"({result.n_feature_rows} feature rows, {result.n_gold_rows} gold labels); "
        f"best top-N = {result.best_n}; "
        f"mean balanced accuracy = {result.mean['balanced_accuracy']:.3f}; "
        f"report in {out_dir}"
    )
    return 0


def cmd_evaluate(args) -> int:
    return _run_report(args, figures=False)


def cmd_report(args) -> int:
    return _run_report(args, figures=True)


def cmd_schema(args) -> int:
    if args.raw:
        text = catalog.raw_header() + "\n"
    else:
        lines = [
            f"version={catalog.CATALOG_VERSION}",
            f"hash={catalog.schema_hash()}",
            f"features={catalog.FEATURE_COUNT}",
            f"reference={catalog.REFERENCE_FEATURE_COUNT}",
            f"delta={catalog.FEATURE_COUNT - catalog.REFERENCE_FEATURE_COUNT:+d}",
        ]
        lines.extend(catalog.FEATURE_NAMES)
        text = "\n".join(lines) + "\n"
    if args.out:
        with atomic_path(Path(args.out)) as tmp:
            tmp.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signsense",
        description="Sign-language motion features, vote fusion, and sentiment model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="landmark CSV directory -> feature matrix")
    p.add_argument("--landmarks", required=True, help="directory of landmark CSVs")
    p.add_argument("--out", required=True, help="feature matrix CSV to write")
    p.add_argument("--report", help="degeneracy report path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("labels", help="annotator vote CSVs -> gold labels")
    p.add_argument("--votes", required=True, nargs="+",
                   help="vote files (<tale>__<annotator>.csv) or directories")
    p.add_argument("--out", required=True, help="gold label CSV to write")
    p.add_argument("--report", help="agreement report base path")
    p.set_defaults(func=cmd_labels)

    for name, func, help_text in (
        ("train", cmd_train, "grid search and fit the final model"),
        ("evaluate", cmd_evaluate, "cross-validated metrics and reports"),
        ("report", cmd_report, "evaluate plus rendered figures"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--top-n", dest="top_n", help="comma-separated top-N list")
        p.add_argument("--k", type=int, help="override the evaluation fold count")
        p.set_defaults(func=func)

    p = sub.add_parser("schema", help="print the versioned feature schema")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.add_argument("--raw", action="store_true",
                   help="print only the raw landmark CSV header")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("SIGNSENSE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        print(f"signsense: config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:
        logger.error("run failed: %s", exc)
        print(f"signsense: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
