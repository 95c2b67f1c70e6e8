"""Versioned binary model files.

Layout (all integers little-endian):

    b"SVT1"                      magic
    u32                          format version
    u32 + UTF-8 JSON             header: hyperparameters, class order, init seed,
                                 tensor count, optional config echo
    per tensor: u32 rank, rank x u64 dims, float32 values (row-major)
"""

import json
import struct

import numpy as np

from .errors import NotAModelFileError, TruncatedModelError, UnsupportedVersionError
from .labels import LABELS
from .model import Hyperparams, NetworkParams

MAGIC = b"SVT1"
VERSION = 1


def encode_model(params, hyper, config=None):
    tensors = params.tensors()
    header = {
        "hyperparams": hyper.to_dict(),
        "class_order": list(LABELS),
        "init_seed": int(params.init_seed),
        "tensor_count": len(tensors),
    }
    if config:
        header["config"] = {k: config[k] for k in sorted(config)}
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    chunks = [MAGIC, struct.pack("<I", VERSION), struct.pack("<I", len(head)), head]
    for t in tensors:
        chunks.append(struct.pack("<I", t.ndim))
        chunks.append(struct.pack(f"<{t.ndim}Q", *t.shape))
        chunks.append(np.ascontiguousarray(t, dtype="<f4").tobytes())
    return b"".join(chunks)


def save_model(params, hyper, path, config=None):
    with open(path, "wb") as fh:
        fh.write(encode_model(params, hyper, config))


class _Reader:
    def __init__(self, buf):
        self.buf = buf
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.buf):
            raise TruncatedModelError("truncated model file")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_model(buf):
    """Return ``(params, hyper, header)``; parameters are widened to float64."""
    if buf[:4] != MAGIC:
        raise NotAModelFileError("not a model file")
    r = _Reader(buf)
    r.take(4)
    (version,) = r.unpack("<I")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version} (this build reads {VERSION})")
    (head_len,) = r.unpack("<I")
    try:
        header = json.loads(r.take(head_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise NotAModelFileError("not a model file: unreadable header") from None
    if header.get("class_order") != list(LABELS):
        raise NotAModelFileError(f"unexpected class order {header.get('class_order')}")
    tensors = []
    for _ in range(header["tensor_count"]):
        (rank,) = r.unpack("<I")
        dims = r.unpack(f"<{rank}Q")
        count = int(np.prod(dims, dtype=np.int64))
        values = np.frombuffer(r.take(4 * count), dtype="<f4")
        tensors.append(values.reshape(dims).astype(np.float64))
    if r.pos != len(buf):
        raise NotAModelFileError("trailing bytes after the last tensor")
    hyper = Hyperparams.from_dict(header["hyperparams"])
    return NetworkParams.from_tensors(tensors, header["init_seed"]), hyper, header


def load_model(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    params, hyper, _ = decode_model(buf)
    return params, hyper


def read_header(path):
    with open(path, "rb") as fh:
        return decode_model(fh.read())[2]
