import os

import numpy as np
import pytest

from ordrank import cli, data, network


@pytest.fixture
def runs(tmp_path, monkeypatch):
    root = tmp_path / "runs"
    monkeypatch.setenv("ORDRANK_RUNS", str(root))
    return root


@pytest.fixture
def toy_csv(tmp_path):
    """Three features, a metric target in column 3 that depends on the first feature only."""
    g = np.random.default_rng(2)
    X = g.uniform(-1, 1, size=(60, 3))
    y = 10 * X[:, 0] + 20
    path = tmp_path / "toy.csv"
    data.write_table(str(path), X, last_column=y)
    return str(path)


def run(*argv):
    return cli.main([str(a) for a in argv])


def train_toy(toy_csv, tmp_path, name="m", *extra):
    out = tmp_path / name
    code = run("train", "--data", toy_csv, "--target-col", 3, "--k", 5, "--hidden", 4, "--epochs", 300,
               "--lr", 0.2, "--seed", 7, "--out-dir", out, *extra)
    assert code == 0
    return out


class TestTrain:
    def test_writes_model_log_and_config(self, toy_csv, tmp_path):
        out = train_toy(toy_csv, tmp_path)
        model = network.load_model(str(out / "model.txt"))
        assert (model.mode, model.d, model.K, model.H) == ("rank", 3, 5, 4)
        lines = (out / "train.log").read_text().splitlines()
        assert len(lines) == 1 + 300
        config = (out / "config.txt").read_text()
        assert "seed=7" in config and "hidden=4" in config and "command=train" in config

    def test_class_mode(self, toy_csv, tmp_path):
        out = train_toy(toy_csv, tmp_path, "c", "--mode", "class")
        assert network.load_model(str(out / "model.txt")).mode == "class"

    def test_ensemble_and_plot(self, toy_csv, tmp_path):
        out = train_toy(toy_csv, tmp_path, "e", "--ensemble", 3, "--plot")
        assert len(network.load_models(str(out / "model.txt"))) == 3
        for j in range(3):
            assert (out / f"train-{j}.log").exists() and (out / f"training-{j}.png").exists()

    def test_reproducible(self, toy_csv, tmp_path):
        a = train_toy(toy_csv, tmp_path, "a")
        b = train_toy(toy_csv, tmp_path, "b")
        assert (a / "model.txt").read_bytes() == (b / "model.txt").read_bytes()
        assert (a / "train.log").read_bytes() == (b / "train.log").read_bytes()

    def test_missing_data_is_usage_error(self, runs):
        with pytest.raises(SystemExit) as exc:
            run("train", "--k", 5)
        assert exc.value.code == cli.EXIT_USAGE

    def test_bad_value_is_usage_error(self, toy_csv, runs, capsys):
        assert run("train", "--data", toy_csv, "--epochs", 0) == cli.EXIT_USAGE
        assert "epochs" in capsys.readouterr().err

    def test_bad_row_is_data_error(self, tmp_path, runs, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("1,2,3\n4,oops,6\n")
        assert run("train", "--data", p) == cli.EXIT_DATA
        assert "row 2, column 2" in capsys.readouterr().err

    def test_missing_file_is_data_error(self, tmp_path, runs):
        assert run("train", "--data", tmp_path / "nope.csv") == cli.EXIT_DATA

    def test_runs_root_from_environment(self, toy_csv, runs):
        assert run("train", "--data", toy_csv, "--epochs", 5, "--run-name", "first") == 0
        assert (runs / "first" / "model.txt").exists()


class TestPredict:
    def test_round_trip_labels(self, toy_csv, tmp_path, capsys):
        out = train_toy(toy_csv, tmp_path)
        capsys.readouterr()
        assert run("predict", "--model", out / "model.txt", "--data", toy_csv, "--target-col", 3,
                   "--out-dir", tmp_path / "p") == 0
        printed = [int(v) for v in capsys.readouterr().out.split()]
        truth = data.discretize_equal_interval(data.load_csv(toy_csv, 3), 5).labels
        assert np.mean(np.array(printed) == truth) >= 0.95
        assert (tmp_path / "p" / "predictions.txt").read_text().split() == [str(v) for v in printed]

    def test_perfect_toy_model_recovers_labels(self, tmp_path, runs, capsys):
        X = np.linspace(-1, 1, 40)[:, None]
        y = np.where(X[:, 0] > 0.05, 2, 1)
        path = tmp_path / "lab.csv"
        data.write_table(str(path), X, last_column=y)
        assert run("train", "--data", path, "--labels", "--k", 2, "--hidden", 2, "--epochs", 500,
                   "--out-dir", tmp_path / "m") == 0
        feats = tmp_path / "feats.csv"
        data.write_table(str(feats), X)
        capsys.readouterr()
        assert run("predict", "--model", tmp_path / "m" / "model.txt", "--data", feats) == 0
        assert [int(v) for v in capsys.readouterr().out.split()] == y.tolist()

    def test_emit_probs(self, toy_csv, tmp_path, capsys):
        out = train_toy(toy_csv, tmp_path)
        capsys.readouterr()
        run("predict", "--model", out / "model.txt", "--data", toy_csv, "--target-col", 3, "--emit-probs",
            "--out", tmp_path / "pred.txt", "--out-dir", tmp_path / "p")
        assert capsys.readouterr().out == ""
        rows = [r.split(",") for r in (tmp_path / "pred.txt").read_text().splitlines()]
        assert len(rows) == 60
        for r in rows:
            assert len(r) == 1 + 5 + 1
            probs = [float(v) for v in r[1:6]]
            assert all(0 < p < 1 for p in probs)
            assert float(r[6]) == pytest.approx(sum(probs), abs=1e-5)
            assert int(r[0]) == network.predict_category(np.array(probs))

    def test_wrong_width(self, toy_csv, tmp_path, capsys):
        out = train_toy(toy_csv, tmp_path)
        narrow = tmp_path / "narrow.csv"
        narrow.write_text("1,2\n3,4\n")
        assert run("predict", "--model", out / "model.txt", "--data", narrow) == cli.EXIT_DATA
        assert "d=3" in capsys.readouterr().err

    def test_corrupt_model(self, toy_csv, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a model\n")
        assert run("predict", "--model", bad, "--data", toy_csv, "--target-col", 3,
                   "--out-dir", tmp_path / "p") == cli.EXIT_DATA


class TestEvaluate:
    def test_metrics_file(self, toy_csv, tmp_path):
        out = train_toy(toy_csv, tmp_path)
        run("discretize", "--data", toy_csv, "--target-col", 3, "--k", 5, "--out-dir", tmp_path / "d")
        assert run("evaluate", "--model", out / "model.txt", "--data", tmp_path / "d" / "ordinal.csv",
                   "--out-dir", tmp_path / "ev") == 0
        values = dict(line.split("=") for line in (tmp_path / "ev" / "evaluation.txt").read_text().split())
        assert values["n"] == "60"
        assert 0 <= float(values["zero_one"]) <= float(values["mae"]) <= 0.1


class TestDataCommands:
    def test_discretize(self, toy_csv, tmp_path, capsys):
        assert run("discretize", "--data", toy_csv, "--target-col", 3, "--k", 4, "--out-dir", tmp_path / "d") == 0
        ds = data.load_ordinal_csv(str(tmp_path / "d" / "ordinal.csv"), -1, 4)
        assert ds.n == 60 and set(ds.labels) <= {1, 2, 3, 4}
        assert len((tmp_path / "d" / "edges.txt").read_text().split()) == 5
        assert "counts per category" in capsys.readouterr().out

    def test_split(self, tmp_path):
        assert run("split", "--n", 10, "--train-count", 6, "--trials", 3, "--seed", 0, "--out-dir", tmp_path / "s") == 0
        lines = (tmp_path / "s" / "splits.txt").read_text().splitlines()
        assert len(lines) == 6
        tr = [int(v) for v in lines[0].split("\t")[2].split(",")]
        te = [int(v) for v in lines[1].split("\t")[2].split(",")]
        assert tr + te == [0, 1, 3, 5, 6, 7, 2, 4, 8, 9]

    def test_split_bad_count(self, tmp_path):
        assert run("split", "--n", 10, "--train-count", 10, "--out-dir", tmp_path / "s") == cli.EXIT_DATA


class TestGridsearch:
    def test_table_and_best(self, toy_csv, tmp_path, capsys):
        code = run("gridsearch", "--data", toy_csv, "--target-col", 3, "--hidden-choices", "2,4",
                   "--epoch-choices", "20,50", "--lr-choices", "0.1", "--patience-choices", "40",
                   "--folds", 3, "--out-dir", tmp_path / "g")
        assert code == 0
        rows = (tmp_path / "g" / "grid.tsv").read_text().splitlines()
        assert len(rows) == 1 + 4
        best = dict(line.split("=") for line in (tmp_path / "g" / "best_config.txt").read_text().split())
        assert best["hidden_units"] in ("2", "4")
        assert "best:" in capsys.readouterr().out


def bench_manifest(tmp_path, flat=False):
    g = np.random.default_rng(0)
    X = g.normal(size=(40, 2))
    data.write_table(str(tmp_path / "good.csv"), X, last_column=X[:, 0] - X[:, 1])
    (tmp_path / "good.manifest").write_text("name=good\npath=good.csv\ntarget_column=-1\ntrain_count=25\n")
    if flat:
        data.write_table(str(tmp_path / "flat.csv"), X, last_column=np.zeros(40))
        (tmp_path / "flat.manifest").write_text("name=flat\npath=flat.csv\ntarget_column=-1\ntrain_count=25\n")
    return tmp_path


SMALL_GRID = ("--hidden-choices", "2", "--epoch-choices", "10,20", "--lr-choices", "0.1",
              "--patience-choices", "40", "--folds", "3", "--trials", "2", "--ensemble", "2")


class TestBenchmark:
    def test_outputs_and_rerun(self, tmp_path):
        man = bench_manifest(tmp_path)
        for name in ("r1", "r2"):
            assert run("benchmark", "--manifest", man, "--seed", 11, "--no-plot", *SMALL_GRID,
                       "--out-dir", tmp_path / name) == 0
        a = (tmp_path / "r1" / "summary.txt").read_bytes()
        assert a == (tmp_path / "r2" / "summary.txt").read_bytes()
        rows = (tmp_path / "r1" / "report.tsv").read_text().splitlines()
        assert [r.split("\t")[:2] for r in rows[1:]] == [["good", "class"], ["good", "rank"]]
        assert not (tmp_path / "r1" / "benchmark.png").exists()

    def test_partial_failure_exit_code(self, tmp_path, capsys):
        man = bench_manifest(tmp_path, flat=True)
        code = run("benchmark", "--manifest", man, "--modes", "rank", *SMALL_GRID, "--out-dir", tmp_path / "o")
        assert code == cli.EXIT_PARTIAL
        out = capsys.readouterr().out
        assert "flat" in out and "FAILED" in out and "good" in out
        assert os.path.exists(tmp_path / "o" / "benchmark.png")

    def test_unknown_dataset(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run("benchmark", "--manifest", bench_manifest(tmp_path), "--datasets", "nope", "--out-dir", tmp_path / "o")
        assert exc.value.code == cli.EXIT_USAGE
