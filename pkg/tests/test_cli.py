import json
import os

import pytest

from senti17 import config as C
from senti17.cli import main
from senti17.ensemble import agreement, load_manifest
from senti17.labels import LABELS
from senti17.model import forward, predict_label
from senti17.persist import load_model, read_header
from senti17.embeddings import encode, load_embeddings
from senti17.text import load_unlabeled

from oracles import metrics_plain

FAST = ["--max_epochs", "2"]


def base_args(corpus, out):
    return ["--preset", "desk", "--embeddings", corpus["embeddings"], "--train", corpus["train"],
            "--dev", corpus["dev"], "--output_dir", str(out)]


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# --- prep -----------------------------------------------------------------

def test_prep_counts(tmp_path, capsys):
    data = write(tmp_path / "d.tsv", "1\tpositive\tgood :)\n2\tpositive\tnice\n3\tnegative\tbad bad\n")
    assert main(["prep", data]) == 0
    out = capsys.readouterr().out
    assert "examples: 3" in out
    assert "label_positive: 2" in out and "label_negative: 1" in out and "label_neutral: 0" in out
    assert "vocabulary: 4" in out


def test_prep_max_length_and_oov(tmp_path):
    words = " ".join(f"w{i}" for i in range(17))
    data = write(tmp_path / "d.tsv", f"1\tneutral\t{words}\n2\tneutral\tw1 w2\n")
    emb = write(tmp_path / "e.txt", "17 2\n" + "".join(f"w{i} 0.1 0.2\n" for i in range(17)))
    report = tmp_path / "r.txt"
    assert main(["prep", data, "--embeddings", emb, "--report", str(report)]) == 0
    text = report.read_text()
    assert "max_length: 17" in text
    assert "oov_type_rate: 0.0000" in text and "oov_token_rate: 0.0000" in text


def test_prep_bad_label_is_data_error(tmp_path, capsys):
    data = write(tmp_path / "d.tsv", "1\thappy\ttext\n")
    assert main(["prep", data]) == 2
    assert "unknown label 'happy' at line 1" in capsys.readouterr().err


# --- train ----------------------------------------------------------------

def test_train_produces_loadable_model(desk_corpus, tmp_path):
    out = tmp_path / "run"
    assert main(["train"] + base_args(desk_corpus, out) + FAST) == 0
    params, hyper = load_model(out / "model.svt")
    assert (hyper.d, hyper.maxl, hyper.f) == (10, 12, 4)
    header = read_header(out / "model.svt")
    assert set(header["config"]) == set(C.KEYS)
    history = (out / "history.tsv").read_text()
    assert history.count("\n") >= 2 and "best_epoch" in history


def test_train_byte_identical(desk_corpus, tmp_path):
    out = tmp_path / "run"
    assert main(["train"] + base_args(desk_corpus, out) + FAST) == 0
    first = (out / "model.svt").read_bytes()
    assert main(["train"] + base_args(desk_corpus, out) + FAST) == 0
    assert (out / "model.svt").read_bytes() == first


def test_train_missing_embeddings(desk_corpus, tmp_path, capsys):
    args = base_args(desk_corpus, tmp_path / "run")
    args[args.index("--embeddings") + 1] = str(tmp_path / "nope.txt")
    assert main(["train"] + args + FAST) == 2
    assert "nope.txt" in capsys.readouterr().err


def test_train_dimension_mismatch(desk_corpus, tmp_path, capsys):
    assert main(["train"] + base_args(desk_corpus, tmp_path) + ["--d", "7"] + FAST) == 2
    assert "dimension" in capsys.readouterr().err


@pytest.mark.parametrize("extra", [["--bogus", "1"], ["--max_epochs"], ["--trainable_embeddings", "true"],
                                   ["--lr", "fast"], ["stray"]])
def test_train_usage_errors(desk_corpus, tmp_path, extra):
    assert main(["train"] + base_args(desk_corpus, tmp_path) + extra) == 1


def test_missing_required_key(tmp_path):
    assert main(["train", "--preset", "desk"]) == 1


def test_no_command_is_usage_error():
    assert main([]) == 1
    assert main(["frobnicate"]) == 1


def test_config_file(desk_corpus, tmp_path):
    cfg_path = write(tmp_path / "run.conf",
                     f"# desk run\nembeddings = {desk_corpus['embeddings']}\ntrain = {desk_corpus['train']}\n"
                     f"dev = {desk_corpus['dev']}\nmax_epochs = 1\nfilter_sizes = 1, 2\n")
    out = tmp_path / "o"
    assert main(["train", "--preset", "desk", "--config", cfg_path, "--output_dir", str(out)]) == 0
    _, hyper = load_model(out / "model.svt")
    assert hyper.filter_sizes == (1, 2)


def test_config_defaults_match_paper():
    cfg = C.defaults()
    assert (cfg["d"], cfg["maxl"], cfg["f"], cfg["dropout_p"], cfg["batch_size"]) == (200, 99, 50, 0.3, 50)
    assert cfg["filter_sizes"] == (1, 2, 3, 4, 5, 2, 3, 4)
    assert (cfg["k"], cfg["threshold"], cfg["n_candidates"]) == (10, 0.95, 100)


def test_config_dump_round_trip(tmp_path):
    cfg = C.defaults("desk")
    path = write(tmp_path / "c.conf", C.dump(cfg))
    assert C.read_config_file(path, C.defaults()) == cfg


def test_shipped_desk_config_parses():
    here = os.path.dirname(__file__)
    cfg = C.read_config_file(os.path.join(here, "..", "configs", "desk.conf"), C.defaults())
    assert cfg["k"] == 3 and cfg["n_candidates"] == 6


# --- select / predict -----------------------------------------------------

@pytest.fixture(scope="module")
def selected(tmp_path_factory, desk_corpus):
    out = tmp_path_factory.mktemp("sel")
    assert main(["select"] + base_args(desk_corpus, out) + FAST) == 0
    return out


def test_select_manifest_diverse(selected):
    manifest = load_manifest(selected / "manifest.json")
    assert manifest.k == 3
    cands = (selected / "candidates.tsv").read_text().splitlines()
    assert sum(1 for line in cands if not line.startswith("#")) == 7
    preds = {}
    for m in manifest.members:
        params, hyper = load_model(selected / m.model_path)
        preds[m.init_seed] = params
    # pairwise agreement recomputed from the saved models on the dev set
    from senti17.text import load_dataset
    from senti17.train import encode_corpus, evaluate_params
    cfg = manifest.config
    table = load_embeddings(cfg["embeddings"])
    dev = encode_corpus(load_dataset(cfg["dev"]), table, int(cfg["maxl"]))
    labels = [evaluate_params(p, dev)[0].tolist() for p in preds.values()]
    for i in range(len(labels)):
        for j in range(i):
            assert agreement(labels[i], labels[j]) <= manifest.threshold


def test_select_k1_n1(desk_corpus, tmp_path):
    assert main(["select"] + base_args(desk_corpus, tmp_path) + FAST + ["--k", "1", "--n_candidates", "1"]) == 0
    manifest = load_manifest(tmp_path / "manifest.json")
    assert manifest.k == 1 and manifest.members[0].init_seed == 0


def test_select_threshold_one_is_top_k(desk_corpus, tmp_path):
    assert main(["select"] + base_args(desk_corpus, tmp_path) + FAST + ["--threshold", "1.0"]) == 0
    manifest = load_manifest(tmp_path / "manifest.json")
    ranked = [line.split("\t") for line in (tmp_path / "candidates.tsv").read_text().splitlines()
              if not line.startswith("#") and not line.startswith("rank")]
    assert [m.init_seed for m in manifest.members] == [int(r[1]) for r in ranked[:3]]


def test_select_insufficient_candidates(desk_corpus, tmp_path, capsys):
    args = base_args(desk_corpus, tmp_path) + FAST + ["--threshold", "0.0", "--n_candidates", "2"]
    assert main(["select"] + args) == 2
    assert "selectable" in capsys.readouterr().err


def test_predict_and_evaluate(selected, desk_corpus, tmp_path, capsys):
    pred = tmp_path / "pred.tsv"
    assert main(["predict", str(selected / "manifest.json"), desk_corpus["test"], str(pred)]) == 0
    lines = [line for line in pred.read_text().splitlines() if not line.startswith("#")]
    gold = [line.split("\t") for line in open(desk_corpus["test"], encoding="utf-8").read().splitlines()]
    assert [line.split("\t")[0] for line in lines] == [g[0] for g in gold]
    for line in lines:
        _, label, votes = line.split("\t")
        counts = [int(v) for v in votes.split(",")]
        assert sum(counts) == 3 and label in LABELS
        assert counts[LABELS.index(label)] == max(counts)
    assert main(["evaluate", desk_corpus["test"], str(pred)]) == 0
    report = capsys.readouterr().out
    ref = metrics_plain([g[1] for g in gold], [line.split("\t")[1] for line in lines])
    assert f"avg_recall: {ref['avg_recall']:.4f}" in report
    assert f"f1_pn: {ref['f1_pn']:.4f}" in report


def test_predict_single_member_is_argmax(selected, desk_corpus, tmp_path):
    manifest = json.loads((selected / "manifest.json").read_text())
    manifest["members"] = manifest["members"][:1]
    manifest["k"] = 1
    single = selected / "single.json"
    single.write_text(json.dumps(manifest))
    pred = tmp_path / "p.tsv"
    assert main(["predict", str(single), desk_corpus["test"], str(pred)]) == 0
    params, hyper = load_model(selected / manifest["members"][0]["model_path"])
    rows = load_unlabeled(desk_corpus["test"])
    table = load_embeddings(desk_corpus["embeddings"])
    expected = [predict_label(forward(params, x)[0]) for x in encode(table, [t for _, t in rows], hyper.maxl)]
    got = [line.split("\t")[1] for line in pred.read_text().splitlines() if not line.startswith("#")]
    assert got == expected


def test_predict_empty_input(selected, tmp_path):
    empty = write(tmp_path / "empty.tsv", "")
    pred = tmp_path / "p.tsv"
    assert main(["predict", str(selected / "manifest.json"), empty, str(pred)]) == 0
    assert [l for l in pred.read_text().splitlines() if not l.startswith("#")] == []


def test_predict_unlabeled_input(selected, tmp_path):
    data = write(tmp_path / "u.tsv", "a\tpos0 w1 :)\nb\t\n")
    pred = tmp_path / "p.tsv"
    assert main(["predict", str(selected / "manifest.json"), data, str(pred)]) == 0
    ids = [l.split("\t")[0] for l in pred.read_text().splitlines() if not l.startswith("#")]
    assert ids == ["a", "b"]


def test_predict_unreadable_member(selected, tmp_path, capsys):
    manifest = json.loads((selected / "manifest.json").read_text())
    manifest["members"][0]["model_path"] = str(tmp_path / "missing.svt")
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest))
    assert main(["predict", str(path), write(tmp_path / "i.tsv", "1\thi\n"), str(tmp_path / "o")]) == 2
    assert "missing.svt" in capsys.readouterr().err


def test_predict_corrupt_member(selected, tmp_path):
    bad = tmp_path / "bad.svt"
    bad.write_bytes(b"garbage")
    manifest = json.loads((selected / "manifest.json").read_text())
    manifest["members"][0]["model_path"] = str(bad)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(manifest))
    assert main(["predict", str(path), write(tmp_path / "i.tsv", "1\thi\n"), str(tmp_path / "o")]) == 2


# --- evaluate -------------------------------------------------------------

def test_evaluate_perfect(tmp_path, capsys):
    gold = write(tmp_path / "g.tsv", "1\tpositive\ta\n2\tnegative\tb\n3\tneutral\tc\n")
    assert main(["evaluate", gold, gold]) == 0
    assert "avg_recall: 1.0000" in capsys.readouterr().out


def test_evaluate_constant_neutral(tmp_path, capsys):
    gold = write(tmp_path / "g.tsv", "".join(f"{i}\t{LABELS[i % 3]}\tx\n" for i in range(9)))
    pred = write(tmp_path / "p.tsv", "".join(f"{i}\tneutral\t0,1,0\n" for i in range(9)))
    assert main(["evaluate", gold, pred]) == 0
    assert "avg_recall: 0.3333" in capsys.readouterr().out


def test_evaluate_random_against_oracle(tmp_path, rng):
    gold_l = [LABELS[i] for i in rng.integers(3, size=60)]
    pred_l = [LABELS[i] for i in rng.integers(3, size=60)]
    gold = write(tmp_path / "g.tsv", "".join(f"{i}\t{l}\tt\n" for i, l in enumerate(gold_l)))
    pred = write(tmp_path / "p.tsv", "".join(f"{i}\t{l}\t0,0,0\n" for i, l in enumerate(pred_l)))
    report = tmp_path / "r.txt"
    assert main(["evaluate", gold, pred, "--report", str(report)]) == 0
    text = report.read_text()
    ref = metrics_plain(gold_l, pred_l)
    for key in ("avg_recall", "accuracy", "macro_f1", "f1_pn"):
        assert f"{key}: {ref[key]:.4f}" in text


def test_evaluate_id_mismatch(tmp_path, capsys):
    gold = write(tmp_path / "g.tsv", "1\tpositive\ta\n2\tnegative\tb\n")
    pred = write(tmp_path / "p.tsv", "1\tpositive\t\nX\tnegative\t\n")
    assert main(["evaluate", gold, pred]) == 2
    assert "'X'" in capsys.readouterr().err


def test_evaluate_length_mismatch(tmp_path, capsys):
    gold = write(tmp_path / "g.tsv", "1\tpositive\ta\n2\tnegative\tb\n")
    pred = write(tmp_path / "p.tsv", "1\tpositive\t\n")
    assert main(["evaluate", gold, pred]) == 2
    assert "'2'" in capsys.readouterr().err
