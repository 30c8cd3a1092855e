import json

import pytest

from toxicspans.checkpoint import load_checkpoint
from toxicspans.cli import PredictionRecord, main, read_predictions, write_predictions
from toxicspans.corpus import Comment, parse_tsd_csv, write_tsd_csv
from toxicspans.synthetic import planted_lexicon_corpus

INCONSISTENT_ROWS = 'spans,text\n"[10, 11, 12, 13, 14, 15]",You are an idiot\n[4],You are an idiot\n"[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]",You are an idiot\n'


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_clean(workdir, capsys):
    (workdir / "raw.csv").write_text(INCONSISTENT_ROWS)
    assert main(["clean", "--in", "raw.csv", "--out", "clean.csv"]) == 0
    cleaned = parse_tsd_csv("clean.csv")
    assert [c.toxic_offsets for c in cleaned] == [tuple(range(11, 16)), (), tuple(range(16))]
    assert "dropped_singletons=1" in capsys.readouterr().out

    assert main(["clean", "--in", "clean.csv", "--out", "again.csv"]) == 0
    assert (workdir / "again.csv").read_bytes() == (workdir / "clean.csv").read_bytes()
    assert "trimmed_whitespace=0 dropped_singletons=0 expanded_left=0 expanded_right=0" in capsys.readouterr().out


def test_clean_empty_corpus(workdir, capsys):
    (workdir / "e.csv").write_text("spans,text\n")
    assert main(["clean", "--in", "e.csv", "--out", "o.csv"]) == 0
    assert parse_tsd_csv("o.csv") == []
    assert "trimmed_whitespace=0 dropped_singletons=0" in capsys.readouterr().out


def test_clean_reports_bad_row(workdir, capsys):
    (workdir / "bad.csv").write_text('spans,text\n"[]",ok\n"[99]",hi\n')
    assert main(["clean", "--in", "bad.csv", "--out", "o.csv"]) == 1
    assert "row 1" in capsys.readouterr().err


def test_prediction_file_round_trip(tmp_path):
    records = [PredictionRecord(0, ()), PredictionRecord(1, (3, 4))]
    write_predictions(tmp_path / "p.tsv", records)
    assert (tmp_path / "p.tsv").read_text() == "0\t[]\n1\t[3, 4]\n"
    assert read_predictions(tmp_path / "p.tsv") == records


def test_eval(workdir, capsys):
    write_tsd_csv("gold.csv", [Comment(0, "abc def", (0, 1, 2)), Comment(1, "xyz", ())])
    write_predictions("same.tsv", [PredictionRecord(0, (0, 1, 2)), PredictionRecord(1, ())])
    assert main(["eval", "--gold", "gold.csv", "--pred", "same.tsv"]) == 0
    assert capsys.readouterr().out.strip() == "1.0000"

    assert main(["eval", "--gold", "gold.csv", "--pred", "gold.csv"]) == 0
    assert capsys.readouterr().out.strip() == "1.0000"

    write_predictions("half.tsv", [PredictionRecord(0, (0, 1, 2)), PredictionRecord(1, (1,))])
    assert main(["eval", "--gold", "gold.csv", "--pred", "half.tsv", "--per-comment", "pc.tsv"]) == 0
    assert capsys.readouterr().out.strip() == "0.5000"
    assert (workdir / "pc.tsv").read_text() == "id\tf1\n0\t1.000000\n1\t0.000000\n"


def test_eval_all_empty(workdir, capsys):
    write_tsd_csv("gold.csv", [Comment(0, "fine", ()), Comment(1, "also fine", ())])
    write_predictions("p.tsv", [PredictionRecord(0, ()), PredictionRecord(1, ())])
    assert main(["eval", "--gold", "gold.csv", "--pred", "p.tsv"]) == 0
    assert capsys.readouterr().out.strip() == "1.0000"


def test_eval_id_mismatch(workdir, capsys):
    write_tsd_csv("gold.csv", [Comment(0, "a", ()), Comment(1, "b", ()), Comment(2, "c", ())])
    write_predictions("p.tsv", [PredictionRecord(0, ()), PredictionRecord(5, ())])
    assert main(["eval", "--gold", "gold.csv", "--pred", "p.tsv"]) == 1
    err = capsys.readouterr().err
    assert "missing ids [1, 2]" in err and "unexpected ids [5]" in err


def test_ensemble(workdir, capsys):
    write_predictions("a.tsv", [PredictionRecord(0, (1, 2)), PredictionRecord(1, ())])
    write_predictions("b.tsv", [PredictionRecord(0, (2, 3)), PredictionRecord(1, (5,))])
    write_predictions("c.tsv", [PredictionRecord(0, (2, 4)), PredictionRecord(1, (5,))])
    assert main(["ensemble", "--pred", "a.tsv", "b.tsv", "c.tsv", "--out", "e.tsv"]) == 0
    assert (workdir / "e.tsv").read_text() == "0\t[2]\n1\t[5]\n"
    assert main(["ensemble", "--pred", "a.tsv"]) == 0
    assert capsys.readouterr().out == "0\t[1, 2]\n1\t[]\n"


def test_highlight(workdir, capsys):
    write_tsd_csv("gold.csv", [Comment(0, "you idiot", range(4, 9))])
    write_predictions("p.tsv", [PredictionRecord(0, tuple(range(4, 9)))])
    assert main(["highlight", "--gold", "gold.csv", "--pred", "p.tsv"]) == 0
    assert capsys.readouterr().out == "0\tyou \x1b[4;31midiot\x1b[0m\n"
    assert main(["highlight", "--gold", "gold.csv", "--pred", "p.tsv", "--format", "html", "--out", "h.html"]) == 0
    assert '<u class="gold"><span class="pred">idiot</span></u>' in (workdir / "h.html").read_text()


def _setup_training(workdir, epochs):
    corpus = planted_lexicon_corpus(32, seed=0)
    write_tsd_csv("train.csv", corpus)
    assert main(["build-vocab", "--corpus", "train.csv", "--min-count", "1", "--out", "vocab.txt"]) == 0
    config = {
        "paths": {"train": "train.csv", "trial": "train.csv", "vocab": "vocab.txt",
                  "checkpoint": "model.ckpt", "log": "train.log"},
        "encoder": {"hidden_dim": 32, "num_blocks": 3, "num_heads": 4, "max_len": 32, "last_n": 3},
        "training": {"learning_rate": 1e-3, "num_epochs": epochs, "seed": 0},
    }
    (workdir / "config.json").write_text(json.dumps(config))


def test_train_one_epoch_and_predict(workdir, capsys):
    _setup_training(workdir, epochs=5)
    assert main(["train", "--config", "config.json", "--epochs", "1"]) == 0
    assert (workdir / "train.log").read_text().count("epoch=") == 1
    assert main(["predict", "--checkpoint", "model.ckpt", "--vocab", "vocab.txt",
                 "--corpus", "train.csv", "--out", "p1.tsv"]) == 0
    assert main(["predict", "--checkpoint", "model.ckpt", "--vocab", "vocab.txt",
                 "--corpus", "train.csv", "--out", "p2.tsv"]) == 0
    assert (workdir / "p1.tsv").read_bytes() == (workdir / "p2.tsv").read_bytes()
    assert len(read_predictions("p1.tsv")) == 32


def test_train_config_errors_listed_up_front(workdir, capsys):
    _setup_training(workdir, epochs=1)
    assert main(["train", "--config", "config.json", "--vocab", "missing.txt", "--epsilon", "2"]) == 1
    err = capsys.readouterr().err
    assert "paths.vocab: missing.txt does not exist" in err and "epsilon" in err
    assert not (workdir / "model.ckpt").exists()


def test_predict_vocab_mismatch(workdir, capsys):
    _setup_training(workdir, epochs=1)
    assert main(["train", "--config", "config.json"]) == 0
    (workdir / "other.txt").write_text("[PAD]\n[UNK]\na\n")
    assert main(["predict", "--checkpoint", "model.ckpt", "--vocab", "other.txt", "--corpus", "train.csv"]) == 1
    assert "different vocabulary" in capsys.readouterr().err


def test_seed_env_override(workdir, monkeypatch):
    _setup_training(workdir, epochs=1)
    monkeypatch.setenv("TOXICSPANS_SEED", "11")
    assert main(["train", "--config", "config.json"]) == 0
    assert load_checkpoint("model.ckpt").train_config.seed == 11
    assert main(["train", "--config", "config.json", "--seed", "4"]) == 0
    assert load_checkpoint("model.ckpt").train_config.seed == 4
