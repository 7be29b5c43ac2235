import csv
import json

import numpy as np
import pytest

from neurochaos.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def trials_dir(tmp_path):
    out = tmp_path / "trials"
    code = run(
        [
            "generate", "--system", "tent", "--eta", "0.3", "--trials", "6",
            "--length", "300", "--transient", "50", "--seed", "1",
            "--out", out,
        ]
    )
    assert code == 0
    return out


@pytest.fixture
def neuro_config(tmp_path):
    path = tmp_path / "neuro.json"
    path.write_text(json.dumps({"q": 0.56, "b": 0.499, "epsilon": 0.171,
                                "max_iter": 2000}))
    return path


class TestGenerate:
    def test_writes_trials_and_manifest(self, trials_dir):
        files = sorted(trials_dir.glob("trial_*.csv"))
        assert len(files) == 6
        with open(files[0], newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["index", "master", "slave"]
        assert len(rows) == 1 + 300
        vals = np.array([[float(r[1]), float(r[2])] for r in rows[1:]])
        assert np.all((vals >= 0.0) & (vals <= 1.0))
        manifest = json.loads((trials_dir / "manifest.json").read_text())
        assert manifest["n_trials"] == 6
        assert manifest["system"]["eta"] == 0.3

    def test_ar_system(self, tmp_path):
        out = tmp_path / "ar"
        assert run(
            ["generate", "--system", "ar", "--eta", "0.5", "--trials", "2",
             "--length", "200", "--transient", "20", "--out", out]
        ) == 0
        assert len(list(out.glob("trial_*.csv"))) == 2


class TestFeatures:
    def test_feature_csvs(self, tmp_path, trials_dir, neuro_config):
        out = tmp_path / "feats"
        assert run(
            ["features", "--config", neuro_config, "--in", trials_dir,
             "--out", out]
        ) == 0
        files = sorted(out.glob("*.csv"))
        assert len(files) == 12
        with open(files[0], newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["idx", "firing_time", "firing_rate", "energy", "entropy"]
        assert len(rows) == 1 + 300

    def test_missing_q_rejected(self, tmp_path, trials_dir):
        cfg = tmp_path / "incomplete.json"
        cfg.write_text(json.dumps({"b": 0.499}))
        with pytest.raises(SystemExit):
            run(["features", "--config", cfg, "--in", trials_dir,
                 "--out", tmp_path / "x"])


class TestClassifierRoundTrip:
    def test_train_then_evaluate(self, tmp_path, trials_dir, neuro_config, capsys):
        model = tmp_path / "model.npz"
        assert run(
            ["train", "--config", neuro_config, "--train", trials_dir,
             "--model", model]
        ) == 0
        assert model.exists()
        report = tmp_path / "report.csv"
        assert run(
            ["evaluate", "--model", model, "--test", trials_dir,
             "--report", report]
        ) == 0
        out = capsys.readouterr().out
        assert "macro F1" in out
        with open(report, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[-1]["class"] == "macro"
        macro = float(rows[-1]["f1"])
        assert 0.0 <= macro <= 1.0
        assert (tmp_path / "report.csv.manifest.json").exists()


class TestMlpRoundTrip:
    def test_train_eval_activations(self, tmp_path, trials_dir, capsys):
        cfg = tmp_path / "mlp.json"
        cfg.write_text(
            json.dumps(
                {
                    "layer_sizes": [300, 12, 8, 6, 4, 2],
                    "activations": ["sigmoid", "relu", "relu", "relu", "softmax"],
                    "learning_rate": 1e-3,
                    "batch_size": 8,
                    "n_epochs": 3,
                    "seed": 0,
                }
            )
        )
        model = tmp_path / "mlp.npz"
        assert run(
            ["mlp-train", "--config", cfg, "--train", trials_dir,
             "--model", model]
        ) == 0
        report = tmp_path / "mlp_report.csv"
        assert run(
            ["mlp-eval", "--model", model, "--test", trials_dir,
             "--report", report]
        ) == 0
        assert "macro F1" in capsys.readouterr().out

        acts = tmp_path / "acts"
        assert run(
            ["mlp-activations", "--model", model, "--in", trials_dir,
             "--layer", "4", "--out", acts]
        ) == 0
        files = sorted(acts.glob("*.csv"))
        assert len(files) == 12
        with open(files[0], newline="") as fh:
            rows = list(csv.reader(fh))
        # layer 4 of the tiny override has width 4
        assert len(rows) == 1 + 4


class TestCausalityCommands:
    def test_gc_rows(self, tmp_path, trials_dir):
        out = tmp_path / "gc.csv"
        assert run(
            ["gc", "--dir", trials_dir, "--max-order", "5", "--out", out]
        ) == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 12
        assert {r["direction"] for r in rows} == {"master->slave", "slave->master"}
        assert all(np.isfinite(float(r["statistic"])) for r in rows)
        assert all(float(r["eta"]) == 0.3 for r in rows)

    def test_ccc_rows(self, tmp_path, trials_dir):
        out = tmp_path / "ccc.csv"
        assert run(
            ["ccc", "--dir", trials_dir, "--L", "60", "--w", "15",
             "--delta", "30", "--B", "4", "--out", out]
        ) == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 12
        assert all(np.isfinite(float(r["statistic"])) for r in rows)

    def test_gc_firing_time_feature(self, tmp_path, trials_dir):
        out = tmp_path / "gc_ft.csv"
        assert run(
            ["gc", "--dir", trials_dir, "--max-order", "4",
             "--feature", "chaosfex_firing_time", "--out", out]
        ) == 0
        with open(out, newline="") as fh:
            assert len(list(csv.DictReader(fh))) == 12


class TestSweepCommand:
    def test_small_sweep(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert run(
            ["sweep", "--method", "chaosnet", "--system", "tent",
             "--etas", "0.1,0.3", "--trials", "12", "--length", "300",
             "--transient", "50", "--out", out]
        ) == 0
        printed = capsys.readouterr().out
        assert "eta=0.10" in printed
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["eta"] for r in rows] == ["0.1", "0.3"]
        assert (tmp_path / "sweep.csv.manifest.json").exists()


class TestTransferCommand:
    def test_single_case(self, tmp_path):
        out = tmp_path / "transfer.csv"
        assert run(
            ["transfer", "--cases", "III", "--methods", "chaosnet",
             "--etas", "0.2", "--trials", "10", "--length", "300",
             "--transient", "50", "--out", out]
        ) == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0]["case"] == "III"


class TestPreyPredatorCommand:
    def test_synthetic_field_data(self, tmp_path, capsys):
        csv_path = tmp_path / "field.csv"
        rng = np.random.default_rng(2)
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("time", "prey", "predator"))
            for i in range(71):
                writer.writerow([1900 + i, rng.uniform(10, 80), rng.uniform(5, 60)])
        out = tmp_path / "field_ccc.csv"
        assert run(
            ["prey-predator", "--csv", csv_path, "--L", "20", "--w", "10",
             "--delta", "4", "--out", out]
        ) == 0
        printed = capsys.readouterr().out
        assert "predator->prey" in printed
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        assert {r["source"] for r in rows} == {"raw", "firing_time"}


class TestErrorPaths:
    def test_bad_trial_header(self, tmp_path):
        bad = tmp_path / "bad"
        bad.mkdir()
        with open(bad / "trial_0000.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("index", "left", "right"))
            writer.writerow((0, 0.5, 0.5))
        with pytest.raises(SystemExit):
            run(["gc", "--dir", bad, "--out", tmp_path / "x.csv"])

    def test_empty_trials_dir(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(SystemExit):
            run(["ccc", "--dir", empty, "--out", tmp_path / "y.csv"])

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            run(["frobnicate"])
