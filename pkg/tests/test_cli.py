import numpy as np
import pytest

from signsense import catalog, synth
from signsense.aggregate import assemble_vector, read_feature_matrix
from signsense.cli import main
from signsense.ingest import write_landmark_file
from signsense.kinematics import derive_all
from signsense.labeling import SentimentLabel, read_gold_csv, write_votes


@pytest.fixture()
def landmark_dir(tmp_path):
    d = tmp_path / "landmarks"
    d.mkdir()
    for i, pattern in enumerate(("still", "ramp", "sinusoid")):
        series = synth.gen_motion(
            pattern, fps=25, duration_s=1.0,
            segment_id=f"tale0__seg{i:03d}", tale_id="tale0",
        )
        write_landmark_file(series, d / f"tale0__seg{i:03d}.csv")
    return d


class TestExtract:
    def test_three_fixtures_three_rows(self, landmark_dir, tmp_path, capsys):
        out = tmp_path / "features.csv"
        assert main(["extract", "--landmarks", str(landmark_dir), "--out", str(out)]) == 0
        names, segs, tales, X = read_feature_matrix(out)
        assert len(segs) == 3
        assert names == list(catalog.FEATURE_NAMES)
        assert tales == ["tale0"] * 3
        assert out.with_suffix(".degeneracy.txt").exists()
        assert "3 feature rows" in capsys.readouterr().out

    def test_empty_directory_is_config_error(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        out = tmp_path / "features.csv"
        assert main(["extract", "--landmarks", str(empty), "--out", str(out)]) == 2

    def test_unreadable_file_listed_run_continues(self, landmark_dir, tmp_path):
        (landmark_dir / "tale0__seg999.csv").write_text("not a landmark file\n")
        out = tmp_path / "features.csv"
        assert main(["extract", "--landmarks", str(landmark_dir), "--out", str(out)]) == 0
        _, segs, _, _ = read_feature_matrix(out)
        assert len(segs) == 3

    def test_values_match_direct_pipeline(self, landmark_dir, tmp_path):
        out = tmp_path / "features.csv"
        main(["extract", "--landmarks", str(landmark_dir), "--out", str(out)])
        _, segs, _, X = read_feature_matrix(out)
        series = synth.gen_motion("ramp", fps=25, duration_s=1.0,
                                  segment_id="tale0__seg001", tale_id="tale0")
        vec = assemble_vector(series, derive_all(series))
        row = X[segs.index("tale0__seg001")]
        np.testing.assert_allclose(
            row, [vec.values[n] for n in catalog.FEATURE_NAMES], rtol=0, atol=1e-12
        )


class TestLabels:
    def test_gold_and_agreement_written(self, tmp_path, capsys):
        votes_dir = tmp_path / "votes"
        votes_dir.mkdir()
        write_votes(synth.gen_votes("unanimous", n_segments=6), votes_dir, "tale0")
        out = tmp_path / "gold.csv"
        code = main(["labels", "--votes", str(votes_dir), "--out", str(out)])
        assert code == 0
        gold = read_gold_csv(out)
        assert len(gold) == 6
        assert out.with_suffix(".agreement.txt").exists()
        assert out.with_suffix(".agreement.csv").exists()
        assert "alpha 1.000 -> 1.000" in capsys.readouterr().out

    def test_tie_votes_keep_nothing(self, tmp_path):
        votes_dir = tmp_path / "votes"
        votes_dir.mkdir()
        write_votes(synth.gen_votes("tie", n_segments=4), votes_dir, "tale0")
        out = tmp_path / "gold.csv"
        assert main(["labels", "--votes", str(votes_dir), "--out", str(out)]) == 0
        assert read_gold_csv(out) == {}

    def test_single_annotator_rejected(self, tmp_path):
        votes_dir = tmp_path / "votes"
        votes_dir.mkdir()
        paths = write_votes(synth.gen_votes("unanimous", n_segments=3), votes_dir, "t")
        for p in paths[1:]:
            p.unlink()
        out = tmp_path / "gold.csv"
        assert main(["labels", "--votes", str(votes_dir), "--out", str(out)]) == 2

    def test_misaligned_row_counts_rejected(self, tmp_path):
        votes_dir = tmp_path / "votes"
        votes_dir.mkdir()
        write_votes(synth.gen_votes("unanimous", n_segments=3), votes_dir, "t")
        short = votes_dir / "t__annotator0.csv"
        lines = short.read_text().splitlines()
        short.write_text("\n".join(lines[:-1]) + "\n")
        out = tmp_path / "gold.csv"
        assert main(["labels", "--votes", str(votes_dir), "--out", str(out)]) == 1


def make_dataset(tmp_path, n=60, d=5, n_tales=5, seed=0):
    X, y = synth.gen_classification(n, d, noise_sd=0.1, seed=seed)
    features = tmp_path / "features.csv"
    with open(features, "w") as fh:
        fh.write("segment_id,tale_id," + ",".join(f"f{i}" for i in range(d)) + "\n")
        for i in range(n):
            seg = f"tale{i % n_tales}__seg{i:03d}"
            fh.write(",".join([seg, f"tale{i % n_tales}"]
                              + [repr(float(v)) for v in X[i]]) + "\n")
    gold = tmp_path / "gold.csv"
    with open(gold, "w") as fh:
        fh.write("segment_id,label\n")
        for i in range(n):
            fh.write(f"tale{i % n_tales}__seg{i:03d},{SentimentLabel(y[i])}\n")
    return features, gold


def write_config(tmp_path, features, gold, out_dir, extra=""):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"features = {features}\n"
        f"gold = {gold}\n"
        f"out = {out_dir}\n"
        "seed = 3\n"
        "k = 3\n"
        "k_stage1 = 3\n"
        "top_n = 3\n"
        "hp.num_rounds_max = 8\n"
        "hp.early_stop_patience = 8\n"
        "hp.max_depth = 3\n"
        "hp.eta = 0.3\n"
        "hp.min_child_weight = 0.0\n"
        "hp.gamma = 0.0\n"
        "hp.reg_alpha = 0.0\n"
        "hp.subsample = 1.0\n"
        "hp.colsample_bytree = 1.0\n"
        + extra
    )
    return cfg


class TestTrainEvaluateReport:
    def test_train_writes_model(self, tmp_path, capsys):
        features, gold = make_dataset(tmp_path)
        out_dir = tmp_path / "run"
        cfg = write_config(tmp_path, features, gold, out_dir, "grid.max_depth = 2,3\n")
        assert main(["train", "--config", str(cfg)]) == 0
        assert (out_dir / "model.json").exists()
        assert (out_dir / "grid_scores.csv").exists()
        assert (out_dir / "run_config.txt").exists()
        assert "trained" in capsys.readouterr().out

    def test_evaluate_writes_report_files(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        out_dir = tmp_path / "run"
        cfg = write_config(tmp_path, features, gold, out_dir)
        assert main(["evaluate", "--config", str(cfg)]) == 0
        for name in (
            "report.csv", "importance.csv", "plotdata_metrics_per_fold.csv",
            "plotdata_top_importances.csv", "plotdata_topn_sweep.csv",
            "plotdata_trajectory.csv", "confusion_fold1.csv", "run_config.txt",
        ):
            assert (out_dir / name).exists(), name
        report_lines = (out_dir / "report.csv").read_text().splitlines()
        assert len(report_lines) == 1 + 3 + 1  # header, 3 folds, mean
        assert report_lines[-1].startswith("mean,")
        assert not (out_dir / "metrics_per_fold.png").exists()

    def test_report_renders_figures(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        out_dir = tmp_path / "run"
        cfg = write_config(tmp_path, features, gold, out_dir)
        assert main(["report", "--config", str(cfg)]) == 0
        for name in (
            "metrics_per_fold.png", "confusion_fold1.png",
            "top_features.png", "trajectories.png",
        ):
            assert (out_dir / name).exists(), name

    def test_rerun_same_seed_byte_identical_report(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        cfg = write_config(tmp_path, features, gold, out1)
        assert main(["evaluate", "--config", str(cfg)]) == 0
        assert main(["evaluate", "--config", str(cfg), "--out", str(out2)]) == 0
        for name in ("report.csv", "importance.csv", "plotdata_trajectory.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_missing_gold_file_is_usage_error(self, tmp_path):
        features, _ = make_dataset(tmp_path)
        cfg = write_config(tmp_path, features, tmp_path / "absent.csv", tmp_path / "o")
        assert main(["evaluate", "--config", str(cfg)]) == 2

    def test_k1_is_usage_error(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        cfg = write_config(tmp_path, features, gold, tmp_path / "o")
        assert main(["evaluate", "--config", str(cfg), "--k", "1"]) == 2

    def test_top_n_flag_overrides_config(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        out_dir = tmp_path / "run"
        cfg = write_config(tmp_path, features, gold, out_dir)
        assert main(["evaluate", "--config", str(cfg), "--top-n", "2,4"]) == 0
        sweep = (out_dir / "plotdata_topn_sweep.csv").read_text().splitlines()
        assert [line.split(",")[0] for line in sweep[1:]] == ["2", "4"]

    def test_seed_flag_overrides_config(self, tmp_path):
        features, gold = make_dataset(tmp_path)
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        cfg = write_config(tmp_path, features, gold, out1)
        assert main(["evaluate", "--config", str(cfg)]) == 0
        assert main(["evaluate", "--config", str(cfg), "--out", str(out2),
                     "--seed", "99"]) == 0
        assert (out1 / "report.csv").read_bytes() != (out2 / "report.csv").read_bytes()


class TestFullPipeline:
    """landmarks + votes in, report out, entirely through the CLI.

    Segment ids must line up between the landmark files (metadata line)
    and the vote files (row order), otherwise the join silently shrinks.
    """

    def test_extract_labels_evaluate_chain(self, tmp_path):
        n_per_tale, tales = 6, ("talea", "taleb")
        land = tmp_path / "landmarks"
        land.mkdir()
        for tale in tales:
            for i in range(n_per_tale):
                seg = f"{tale}__seg{i:03d}"
                series = synth.gen_motion(
                    ("still", "ramp", "sinusoid")[i % 3], fps=25, duration_s=0.6,
                    segment_id=seg, tale_id=tale,
                )
                write_landmark_file(series, land / f"{seg}.csv")
        votes_dir = tmp_path / "votes"
        votes_dir.mkdir()
        for tale in tales:
            write_votes(
                synth.gen_votes("unanimous", n_segments=n_per_tale), votes_dir, tale
            )

        features = tmp_path / "features.csv"
        gold = tmp_path / "gold.csv"
        out_dir = tmp_path / "run"
        assert main(["extract", "--landmarks", str(land), "--out", str(features)]) == 0
        assert main(["labels", "--votes", str(votes_dir), "--out", str(gold)]) == 0
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"features = {features}\ngold = {gold}\nout = {out_dir}\n"
            "seed = 1\nk = 2\nk_stage1 = 2\ntop_n = 4\n"
            "hp.num_rounds_max = 4\nhp.early_stop_patience = 4\n"
            "hp.max_depth = 2\nhp.min_child_weight = 0.0\n"
        )
        assert main(["evaluate", "--config", str(cfg)]) == 0
        report_lines = (out_dir / "report.csv").read_text().splitlines()
        assert len(report_lines) == 1 + 2 + 1
        trajectory = (out_dir / "plotdata_trajectory.csv").read_text()
        # All 12 segments joined: both tales appear in the trajectory dump.
        assert trajectory.count("talea,") == n_per_tale
        assert trajectory.count("taleb,") == n_per_tale

    def test_degeneracy_report_lists_all_missing_channel(self, tmp_path):
        land = tmp_path / "landmarks"
        land.mkdir()
        series = synth.gen_motion("still", fps=25, duration_s=0.4,
                                  segment_id="t__seg000", tale_id="t")
        holed = series.valid.copy()
        holed[:, catalog.RAW_INDEX["browDownLeft"]] = False
        from signsense.ingest import FrameSeries

        write_landmark_file(
            FrameSeries("t__seg000", "t", 25.0, series.frames, holed),
            land / "t__seg000.csv",
        )
        out = tmp_path / "features.csv"
        assert main(["extract", "--landmarks", str(land), "--out", str(out)]) == 0
        report = out.with_suffix(".degeneracy.txt").read_text()
        assert "t__seg000,browDownLeft,all-missing" in report


class TestSchema:
    def test_count_and_hash(self, capsys):
        assert main(["schema"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == f"version={catalog.CATALOG_VERSION}"
        assert lines[1] == f"hash={catalog.schema_hash()}"
        assert lines[2] == f"features={catalog.FEATURE_COUNT}"
        assert lines[3] == "reference=396"
        assert lines[4] == f"delta={catalog.FEATURE_COUNT - 396:+d}"
        assert lines[5:] == list(catalog.FEATURE_NAMES)

    def test_raw_header_section(self, capsys):
        assert main(["schema", "--raw"]) == 0
        out = capsys.readouterr().out
        assert out == catalog.raw_header() + "\n"

    def test_stable_across_runs(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(["schema", "--out", str(a)]) == 0
        assert main(["schema", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
