import csv
import json

import numpy as np
import pytest

from vqc_transfer import trainer
from vqc_transfer.cli import crossover_epoch, main
from vqc_transfer.dataset import Dataset
from vqc_transfer.datagen import write_csv
from vqc_transfer.model import model_for_axes, save_model


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def small(tmp_path, capsys):
    src, tgt = tmp_path / "src.csv", tmp_path / "tgt.csv"
    code, _ = run(capsys, "gen-data", "--n", 200, "--seed", 3, "--out", src, "--target-out", tgt)
    assert code == 0
    return tmp_path, src, tgt


def test_gen_data(tmp_path, capsys):
    out = tmp_path / "src.csv"
    code, doc = run(capsys, "gen-data", "--n", 2000, "--noise", 0.15, "--seed", 42, "--out", out)
    assert code == 0 and doc["rows"] == 2000 and doc["source"]["seed"] == 42
    rows = out.read_text().splitlines()
    assert rows[0] == "x1,x2,y" and len(rows) == 2001
    same = tmp_path / "same.csv"
    assert run(capsys, "gen-data", "--base", out, "--rotate-deg", 0, "--out", same)[0] == 0
    assert same.read_bytes() == out.read_bytes()


def test_flag_errors_exit_64(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["gen-data", "--n", "10"])
    assert info.value.code == 64
    with pytest.raises(SystemExit) as info:
        main(["pretrain", "--data", "x.csv", "--out", "m.json", "--epochs", "0"])
    assert info.value.code == 64
    with pytest.raises(SystemExit) as info:
        main(["adapt", "sgd", "--model", "m", "--target", "t", "--out", "o"])
    assert info.value.code == 64


def test_io_and_data_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "gen-data", "--n", 10, "--out", tmp_path / "missing" / "dir" / "x.csv")[0] == 2
    assert run(capsys, "gen-data", "--n", 11, "--out", tmp_path / "x.csv")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2,y\n0,0,0.5\n")
    assert run(capsys, "pretrain", "--data", bad, "--out", tmp_path / "m.json")[0] == 2


def test_pretrain_is_deterministic(small, capsys):
    tmp, src, _ = small
    args = ["pretrain", "--data", src, "--epochs", 5, "--seed", 11]
    code, doc = run(capsys, *args, "--out", tmp / "a.json")
    assert code == 0 and 0 <= doc["accuracy"] <= 1 and doc["epochs"] == 5
    run(capsys, *args, "--out", tmp / "b.json")
    assert (tmp / "a.json").read_bytes() == (tmp / "b.json").read_bytes()
    assert (tmp / "a.curve.csv").read_bytes() == (tmp / "b.curve.csv").read_bytes()
    assert (tmp / "a.curve.csv").read_text().startswith("epoch,loss,accuracy\n")


def test_pretrain_custom_circuit(small, capsys):
    tmp, src, _ = small
    spec = tmp / "circuit.json"
    spec.write_text(json.dumps({"encoding_axes": [2, 1], "variational_axes": [1, 2]}))
    code, _ = run(capsys, "pretrain", "--data", src, "--epochs", 2, "--circuit", spec, "--out", tmp / "m.json")
    assert code == 0
    assert json.loads((tmp / "m.json").read_text())["encoding_axes"] == [2, 1]


def test_eval_and_adapt(small, capsys):
    tmp, src, tgt = small
    run(capsys, "pretrain", "--data", src, "--epochs", 10, "--out", tmp / "m.json")
    code, metrics = run(capsys, "eval", "--model", tmp / "m.json", "--data", src)
    assert code == 0 and metrics["accuracy"] + metrics["error_rate"] == 1.0
    code, doc = run(capsys, "adapt", "qva", "--model", tmp / "m.json", "--source", src, "--target", tgt,
                    "--out", tmp / "qva.json", "--report", tmp / "report.json")
    assert code == 0
    report = json.loads((tmp / "report.json").read_text())
    assert set(report) == {"delta_theta", "residual_norm", "rank", "q_norm", "transition_histogram",
                           "accuracy_before", "accuracy_after"}
    assert doc["accuracy_after"] == report["accuracy_after"]
    assert sum(report["transition_histogram"].values()) == 200
    code, doc = run(capsys, "adapt", "gd", "--model", tmp / "m.json", "--target", tgt, "--epochs", 30,
                    "--out", tmp / "gd.json", "--curve", tmp / "gd.csv")
    assert code == 0
    rows = list(csv.DictReader((tmp / "gd.csv").open()))
    assert len(rows) == 30 and doc["accuracy_after"] == float(rows[-1]["accuracy"])
    assert run(capsys, "adapt", "qva", "--model", tmp / "m.json", "--target", tgt, "--out", tmp / "x.json")[0] == 2


def test_adapt_qva_type1_gives_zero_update(tmp_path, capsys):
    m = model_for_axes([2, 3], [3, 2], [0.3, 0.0])
    save_model(m, tmp_path / "m.json")
    data = Dataset([[0.0, 0.2], [np.pi, -1.0], [0.0, 2.0], [np.pi, 0.5]], [1, -1, 1, -1])
    write_csv(tmp_path / "d.csv", data)
    code, _ = run(capsys, "adapt", "qva", "--model", tmp_path / "m.json", "--source", tmp_path / "d.csv",
                  "--target", tmp_path / "d.csv", "--out", tmp_path / "o.json", "--report", tmp_path / "r.json")
    assert code == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert np.linalg.norm(report["delta_theta"]) <= 1e-8
    assert report["transition_histogram"]["Type1"] == 4


def test_dimension_mismatch_exit_2(small, capsys):
    tmp, src, tgt = small
    save_model(model_for_axes([1, 2, 3], [2], [0.1]), tmp / "m3.json")
    assert run(capsys, "eval", "--model", tmp / "m3.json", "--data", src)[0] == 2
    assert run(capsys, "adapt", "gd", "--model", tmp / "m3.json", "--target", tgt, "--out", tmp / "o.json")[0] == 2


def test_divergence_exit_3_saves_last_state(small, capsys, monkeypatch):
    tmp, src, _ = small
    monkeypatch.setattr(trainer, "batch_gradient", lambda *a, **k: np.full(3, np.nan))
    code, _ = run(capsys, "pretrain", "--data", src, "--epochs", 3, "--out", tmp / "m.json")
    assert code == 3
    saved = json.loads((tmp / "m.json").read_text())
    assert all(np.isfinite(saved["theta"]))


def test_compare_outputs(small, capsys):
    tmp, src, tgt = small
    args = ["compare", "--source", src, "--target", tgt, "--epochs", 10, "--ft-epochs", 12,
            "--out-csv", tmp / "c.csv", "--summary", tmp / "s.json"]
    code, report = run(capsys, *args)
    assert code == 0
    assert set(report["timings"]) == {"data", "pretrain", "qva", "gd"}
    rows = list(csv.DictReader((tmp / "c.csv").open()))
    assert list(rows[0]) == ["epoch", "gd_loss", "gd_accuracy", "qva_accuracy"]
    assert len(rows) == 12 and len({r["qva_accuracy"] for r in rows}) == 1
    summary = json.loads((tmp / "s.json").read_text())
    gd = [float(r["gd_accuracy"]) for r in rows]
    assert summary["crossover_epoch"] == (crossover_epoch(gd, summary["qva_target_acc"]) or "none")
    first = [(tmp / n).read_bytes() for n in ("c.csv", "s.json")]
    run(capsys, *args)
    assert [(tmp / n).read_bytes() for n in ("c.csv", "s.json")] == first


def test_crossover_definition():
    assert crossover_epoch([0.5, 0.6, 0.8], 0.7) == 3
    assert crossover_epoch([0.5, 0.6], 0.7) is None
    assert crossover_epoch([0.9], 0.7) == 1
