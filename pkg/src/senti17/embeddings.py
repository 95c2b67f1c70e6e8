"""Pre-trained word vectors and the fixed-size tweet input matrix."""

import hashlib
import logging
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

OOV_RANGE = 0.25


class EmbeddingTable:
    """Token -> vector mapping with a seeded, cached out-of-vocabulary policy.

    Unknown tokens get a vector drawn uniformly from [-0.25, 0.25] by a
    generator keyed on ``(oov_seed, token)``, so the result does not depend
    on lookup order. Generated vectors are cached under a lock.
    """

    def __init__(self, dim, entries=None, oov_seed=0):
        if dim < 1:
            raise ValueError("embedding dimension must be positive")
        self.dim = int(dim)
        self.oov_seed = int(oov_seed)
        self.entries = {}
        self._oov = {}
        self.duplicates = 0
        self._lock = threading.Lock()
        for token, vec in (entries or {}).items():
            self[token] = vec

    def __setitem__(self, token, vec):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DataError(f"vector for {token!r} has shape {vec.shape}, expected ({self.dim},)")
        self.entries[token] = vec

    def __contains__(self, token):
        return token in self.entries

    def __len__(self):
        return len(self.entries)

    def oov_vector(self, token):
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=16).digest()
        key = [self.oov_seed & 0xFFFFFFFF, *np.frombuffer(digest, dtype="<u4").tolist()]
        rng = np.random.default_rng(key)
        return rng.uniform(-OOV_RANGE, OOV_RANGE, size=self.dim)

    def lookup(self, token):
        vec = self.entries.get(token)
        if vec is not None:
            return vec
        vec = self._oov.get(token)
        if vec is None:
            with self._lock:
                vec = self._oov.setdefault(token, self.oov_vector(token))
        return vec


def load_embeddings(path, oov_seed=0):
    """Read a text embedding file: a ``V D`` header then ``token c1 .. cD`` rows."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataError(f"{path}: header must be 'V D' at line 1")
        try:
            _, dim = int(header[0]), int(header[1])
        except ValueError:
            raise DataError(f"{path}: non-integer header at line 1") from None
        table = EmbeddingTable(dim, oov_seed=oov_seed)
        duplicates = 0
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\r\n").split(" ")
            if not line.strip():
                continue
            token, comps = parts[0], parts[1:]
            if len(comps) != dim:
                raise DataError(f"expected {dim} components at line {lineno}")
            try:
                vec = np.array([float(c) for c in comps])
            except ValueError:
                raise DataError(f"non-numeric component at line {lineno}") from None
            if token in table.entries:
                duplicates += 1
                log.warning("%s: duplicate token %r at line %d, keeping the last", path, token, lineno)
            table.entries[token] = vec
    table.duplicates = duplicates
    return table


def save_embeddings(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.entries)} {table.dim}\n")
        for token, vec in table.entries.items():
            fh.write(token + " " + " ".join(repr(float(c)) for c in vec) + "\n")


@dataclass
class InputMatrix:
    values: np.ndarray  # (d, maxl)
    length: int


def build_input_matrix(table, tokens, maxl):
    """Stack token vectors as columns; truncate at ``maxl``, zero-pad the rest."""
    if maxl < 1:
        raise ValueError("maxl must be >= 1")
    if not tokens:
        raise DataError("cannot build an input matrix from an empty token sequence")
    length = min(len(tokens), maxl)
    values = np.zeros((table.dim, maxl))
    for j in range(length):
        values[:, j] = table.lookup(tokens[j])
    return InputMatrix(values, length)


def encode(table, token_seqs, maxl):
    """Build a ``(n, d, maxl)`` batch. Empty sequences yield all-zero inputs."""
    out = np.zeros((len(token_seqs), table.dim, maxl))
    for i, tokens in enumerate(token_seqs):
        if tokens:
            out[i] = build_input_matrix(table, tokens, maxl).values
    return out
