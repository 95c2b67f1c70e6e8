"""``senti17`` command line: prep, train, select, predict, evaluate.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

import argparse
import logging
import os
import sys
from collections import Counter

from . import config as C
from . import metrics
from .embeddings import encode, load_embeddings
from .ensemble import (generate_candidates, load_manifest, save_manifest, select_members,
                       vote_models, load_members)
from .errors import DataError, SelectionError, Senti17Error
from .labels import LABELS
from .persist import save_model
from .text import load_dataset, load_unlabeled
from .train import encode_corpus, train_network

log = logging.getLogger("senti17")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="senti17", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", help="corpus statistics")
    p.add_argument("dataset")
    p.add_argument("--embeddings", help="embedding file for the OOV rate")
    p.add_argument("--report", help="write the report here instead of stdout")

    for name, text in (("train", "train one network"),
                       ("select", "train candidates and select the ensemble")):
        p = sub.add_parser(name, help=text,
                           epilog="Any config key may be overridden with --KEY VALUE.")
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--preset", default="paper", choices=sorted(C.PRESETS))

    p = sub.add_parser("predict", help="label tweets with an ensemble")
    p.add_argument("manifest")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--embeddings", help="override the manifest's embedding file")

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--report", help="write the report here instead of stdout")
    return parser


def _run_config(args, extra):
    cfg = C.defaults(args.preset)
    if args.config:
        C.read_config_file(args.config, cfg)
    if len(extra) % 2:
        raise UsageError(f"override {extra[-1]!r} has no value")
    for flag, value in zip(extra[::2], extra[1::2]):
        if not flag.startswith("--"):
            raise UsageError(f"unexpected argument {flag!r}")
        C.set_value(cfg, flag[2:].replace("-", "_"), value)
    if cfg["trainable_embeddings"]:
        raise UsageError("trainable_embeddings is not supported; embeddings stay frozen")
    for key in ("embeddings", "train", "dev"):
        if not cfg[key]:
            raise UsageError(f"config key {key!r} is required")
    return cfg


def _load_inputs(cfg):
    hyper = C.hyperparams(cfg)
    table = load_embeddings(cfg["embeddings"], cfg["oov_seed"])
    if table.dim != hyper.d:
        raise DataError(f"{cfg['embeddings']}: dimension {table.dim} but config d={hyper.d}")
    train = load_dataset(cfg["train"])
    dev = load_dataset(cfg["dev"])
    if not len(train) or not len(dev):
        raise DataError("training and dev sets must be non-empty")
    return hyper, encode_corpus(train, table, hyper.maxl), encode_corpus(dev, table, hyper.maxl)


def _write(path, text):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_prep(args):
    corpus = load_dataset(args.dataset)
    counts = Counter(ex.label for ex in corpus)
    vocab = Counter(tok for ex in corpus for tok in ex.tokens)
    lengths = [len(ex.tokens) for ex in corpus]
    lines = [
        f"dataset: {args.dataset}",
        f"examples: {len(corpus)}",
        f"skipped_empty: {corpus.skipped_empty}",
    ]
    lines += [f"label_{name}: {counts.get(name, 0)}" for name in LABELS]
    lines.append(f"vocabulary: {len(vocab)}")
    lines.append(f"max_length: {max(lengths, default=0)}")
    if args.embeddings:
        table = load_embeddings(args.embeddings)
        oov_types = sum(1 for t in vocab if t not in table)
        oov_tokens = sum(n for t, n in vocab.items() if t not in table)
        total = sum(vocab.values())
        lines.append(f"embeddings: {args.embeddings}")
        lines.append(f"oov_type_rate: {oov_types / len(vocab) if vocab else 0.0:.4f}")
        lines.append(f"oov_token_rate: {oov_tokens / total if total else 0.0:.4f}")
    _write(args.report, "\n".join(lines) + "\n")
    return {"examples": len(corpus), "labels": dict(counts), "max_length": max(lengths, default=0)}


def cmd_train(cfg):
    hyper, train, dev = _load_inputs(cfg)
    params, history = train_network(hyper, train, dev, cfg["init_seed"], C.train_config(cfg),
                                     C.nadam_config(cfg))
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    model_path = os.path.join(out, "model.svt")
    save_model(params, hyper, model_path, config=C.echo(cfg))
    lines = [f"# {k} = {v}" for k, v in C.echo(cfg).items()]
    lines.append("epoch\ttrain_loss\tdev_avg_recall\tdev_accuracy")
    for r in history.records:
        lines.append(f"{r.epoch}\t{r.train_loss:.4f}\t{r.dev_avg_recall:.4f}\t{r.dev_accuracy:.4f}")
    lines.append(f"# best_epoch = {history.best_epoch}")
    _write(os.path.join(out, "history.tsv"), "\n".join(lines) + "\n")
    log.info("best dev avg_recall %.4f at epoch %d -> %s",
             history.best_dev_recall, history.best_epoch, model_path)
    return model_path


def cmd_select(cfg):
    hyper, train, dev = _load_inputs(cfg)
    out = cfg["output_dir"]
    cand_dir = os.path.join(out, "candidates")
    echo = C.echo(cfg)
    candidates = generate_candidates(hyper, train, dev, cfg["n_candidates"], cfg["seed_base"],
                                     cand_dir, C.train_config(cfg), C.nadam_config(cfg),
                                     jobs=cfg["jobs"], config_echo=echo)
    lines = [f"# {k} = {v}" for k, v in echo.items()]
    lines.append("rank\tinit_seed\tdev_avg_recall\tmodel")
    for rank, c in enumerate(candidates):
        c.model_path = os.path.relpath(c.model_path, out)
        lines.append(f"{rank}\t{c.init_seed}\t{c.dev_recall:.4f}\t{c.model_path}")
        log.info("candidate seed %d dev avg_recall %.4f", c.init_seed, c.dev_recall)
    _write(os.path.join(out, "candidates.tsv"), "\n".join(lines) + "\n")
    manifest = select_members(candidates, cfg["k"], cfg["threshold"])
    manifest.config = echo
    path = os.path.join(out, "manifest.json")
    save_manifest(manifest, path)
    return path


def cmd_predict(args):
    manifest = load_manifest(args.manifest)
    base = os.path.dirname(os.path.abspath(args.manifest))
    emb = args.embeddings or manifest.config.get("embeddings")
    if not emb:
        raise UsageError("manifest names no embedding file; pass --embeddings")
    models = load_members(manifest, base)
    hyper = models[0][1]
    table = load_embeddings(emb, int(manifest.config.get("oov_seed", 0)))
    if table.dim != hyper.d:
        raise DataError(f"{emb}: dimension {table.dim} but models expect d={hyper.d}")
    rows = load_unlabeled(args.input)
    labels, tallies = vote_models(models, encode(table, [tokens for _, tokens in rows], hyper.maxl))
    lines = [f"# {k} = {v}" for k, v in sorted(manifest.config.items())]
    for (ex_id, _), label, tally in zip(rows, labels, tallies):
        lines.append(f"{ex_id}\t{label}\t{','.join(str(c) for c in tally)}")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("".join(line + "\n" for line in lines))
    return labels


def read_id_labels(path):
    """``(id, label)`` pairs from the first two fields of every data line."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise DataError(f"{path}: expected id<TAB>label at line {lineno}")
            if fields[1] not in LABELS:
                raise DataError(f"{path}: unknown label {fields[1]!r} at line {lineno}")
            rows.append((fields[0], fields[1]))
    return rows


def cmd_evaluate(args):
    gold = read_id_labels(args.gold)
    pred = read_id_labels(args.predictions)
    for (gid, _), (pid, _) in zip(gold, pred):
        if gid != pid:
            raise DataError(f"id mismatch: gold {gid!r} vs prediction {pid!r}")
    if len(gold) != len(pred):
        longer = gold if len(gold) > len(pred) else pred
        raise DataError(f"id mismatch: {longer[min(len(gold), len(pred))][0]!r} has no counterpart")
    result = metrics.evaluate([g for _, g in gold], [p for _, p in pred])
    _write(args.report, metrics.format_report(result, [f"gold = {args.gold}",
                                                       f"predictions = {args.predictions}"]))
    return result


def main(argv=None):
    parser = _build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command in ("train", "select"):
            cfg = _run_config(args, extra)
            (cmd_train if args.command == "train" else cmd_select)(cfg)
        else:
            if extra:
                raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
            {"prep": cmd_prep, "predict": cmd_predict, "evaluate": cmd_evaluate}[args.command](args)
    except (UsageError, C.ConfigError) as exc:
        print(f"senti17: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SelectionError as exc:
        print(f"senti17: {exc} (selectable: {exc.selectable})", file=sys.stderr)
        return EXIT_DATA
    except (DataError, OSError) as exc:
        print(f"senti17: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Senti17Error as exc:
        print(f"senti17: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"senti17: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
