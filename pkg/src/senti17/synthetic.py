"""Toy corpora and embedding tables for desk-scale runs.

Each class owns a small set of cue words; every tweet mixes cue words of its
class with shared filler words, so the classes are separable from the
embeddings alone.
"""

import os

import numpy as np

from .embeddings import EmbeddingTable, save_embeddings
from .labels import LABELS


def make_vocabulary(cues_per_class=5, fillers=10):
    cues = {label: [f"{label[:3]}{i}" for i in range(cues_per_class)] for label in LABELS}
    filler = [f"w{i}" for i in range(fillers)]
    return cues, filler


def make_table(dim, seed=0, cues_per_class=5, fillers=10):
    rng = np.random.default_rng(seed)
    cues, filler = make_vocabulary(cues_per_class, fillers)
    table = EmbeddingTable(dim)
    for words in list(cues.values()) + [filler]:
        for w in words:
            table[w] = rng.normal(0.0, 0.5, size=dim)
    # emoticons and placeholders that the preprocessing emits
    for w in (":)", ":(", "url", "uuser"):
        table[w] = rng.normal(0.0, 0.5, size=dim)
    return table


def make_tweets(n, seed=0, min_len=3, max_len=10, cues_per_class=5, fillers=10):
    """``n`` (id, label, text) rows, labels cycling so every class is present."""
    rng = np.random.default_rng(seed)
    cues, filler = make_vocabulary(cues_per_class, fillers)
    rows = []
    for i in range(n):
        label = LABELS[i % len(LABELS)]
        length = int(rng.integers(min_len, max_len + 1))
        words = [str(rng.choice(filler)) for _ in range(length)]
        n_cues = int(rng.integers(1, 3))
        for pos in rng.choice(length, size=n_cues, replace=False):
            words[pos] = str(rng.choice(cues[label]))
        rows.append((str(1000 + i), label, " ".join(words)))
    return rows


def write_dataset(rows, path, with_labels=True):
    with open(path, "w", encoding="utf-8") as fh:
        for ex_id, label, text in rows:
            fh.write(f"{ex_id}\t{label}\t{text}\n" if with_labels else f"{ex_id}\t{text}\n")


def write_desk_corpus(directory, dim=10, n_train=150, n_dev=45, n_test=60, seed=0):
    """Write embeddings, train, dev and test files; returns their paths."""
    os.makedirs(directory, exist_ok=True)
    paths = {name: os.path.join(directory, f"{name}.tsv") for name in ("train", "dev", "test")}
    paths["embeddings"] = os.path.join(directory, "embeddings.txt")
    save_embeddings(make_table(dim, seed), paths["embeddings"])
    for offset, name, n in ((1, "train", n_train), (2, "dev", n_dev), (3, "test", n_test)):
        write_dataset(make_tweets(n, seed=seed * 10 + offset), paths[name])
    return paths


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "desk_data"
    for name, path in write_desk_corpus(target).items():
        print(f"{name}: {path}")
