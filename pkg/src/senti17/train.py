"""Mini-batch Nadam training with per-epoch shuffling and dev-recall checkpointing."""

import logging
from dataclasses import dataclass

import numpy as np

from . import metrics
from .embeddings import encode
from .errors import DataError
from .labels import LABEL_INDEX, LABELS, NUM_CLASSES
from .model import backward, forward, init_params, predict_label
from .nadam import NadamConfig, NadamState, nadam_step

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 50
    max_epochs: int = 20
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass
class EncodedSet:
    """Input matrices ``(n, d, maxl)`` with integer class indices ``(n,)``."""

    inputs: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return len(self.labels)


def encode_corpus(corpus, table, maxl):
    inputs = encode(table, [ex.tokens for ex in corpus], maxl)
    labels = np.array([LABEL_INDEX[ex.label] for ex in corpus], dtype=int)
    return EncodedSet(inputs, labels)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_avg_recall: float
    dev_accuracy: float


@dataclass
class TrainHistory:
    records: list
    best_epoch: int

    @property
    def best_dev_recall(self):
        return self.records[self.best_epoch].dev_avg_recall

    def __len__(self):
        return len(self.records)


def make_epoch_batches(n, batch_size, epoch_index, shuffle_seed):
    """Permutation of ``range(n)`` keyed by ``(shuffle_seed, epoch_index)``, chunked."""
    if n < 1:
        raise ValueError("need at least one example")
    perm = np.random.default_rng([shuffle_seed, epoch_index]).permutation(n)
    return [perm[i:i + batch_size] for i in range(0, n, batch_size)]


def predict_indices(params, inputs):
    return np.array([LABEL_INDEX[predict_label(forward(params, x)[0])] for x in inputs], dtype=int)


def evaluate_params(params, data):
    """Inference-mode predictions and metrics on an :class:`EncodedSet`."""
    pred = predict_indices(params, data.inputs)
    cm = metrics.confusion(data.labels, pred)
    recall = float(metrics.recall_per_class(cm).mean())
    return pred, recall, metrics.accuracy(cm)


def mean_loss(params, data):
    total = 0.0
    for x, y in zip(data.inputs, data.labels):
        probs, _ = forward(params, x)
        total += -np.log(probs[y] + 1e-12)
    return total / len(data)


def train_network(hyper, train_data, dev_data, init_seed, train_config=TrainConfig(),
                  nadam_config=NadamConfig(), on_epoch=None):
    """Train one network; return ``(best_params, TrainHistory)``.

    The returned snapshot is the one with the highest dev macro-average
    recall, the earliest epoch winning ties. ``on_epoch(epoch, params)`` is
    called after each epoch with the live parameters.
    """
    if len(train_data) == 0 or len(dev_data) == 0:
        raise DataError("training and dev sets must be non-empty")
    if train_data.inputs.shape[1:] != (hyper.d, hyper.maxl):
        raise DataError(f"train inputs have shape {train_data.inputs.shape[1:]}, "
                        f"expected {(hyper.d, hyper.maxl)}")
    missing = [LABELS[c] for c in range(NUM_CLASSES) if not np.any(dev_data.labels == c)]
    if missing:
        log.warning("dev set has no examples of %s; their recall counts as 0", ", ".join(missing))

    params = init_params(hyper, init_seed)
    tensors = params.tensors()
    state = NadamState.zeros(tensors)
    dropout_rng = np.random.default_rng([init_seed, train_config.shuffle_seed])

    records = []
    best, best_recall = None, -1.0
    for epoch in range(train_config.max_epochs):
        loss_sum = 0.0
        for batch in make_epoch_batches(len(train_data), train_config.batch_size, epoch,
                                        train_config.shuffle_seed):
            acc = [np.zeros_like(t) for t in tensors]
            for i in batch:
                _, cache = forward(params, train_data.inputs[i], train_mode=True,
                                   rng=dropout_rng, dropout_p=hyper.dropout_p)
                grads = backward(params, cache, train_data.labels[i])
                loss_sum += grads.loss
                for a, g in zip(acc, grads.tensors()):
                    a += g
            for a in acc:
                a /= len(batch)
            nadam_step(nadam_config, state, tensors, acc)
        _, recall, acc_dev = evaluate_params(params, dev_data)
        records.append(EpochRecord(epoch, loss_sum / len(train_data), recall, acc_dev))
        log.info("seed %d epoch %d: loss %.4f dev avg_recall %.4f accuracy %.4f",
                 init_seed, epoch, records[-1].train_loss, recall, acc_dev)
        if recall > best_recall:
            best, best_recall = params.copy(), recall
            best_epoch = epoch
        if on_epoch is not None:
            on_epoch(epoch, params)
    return best, TrainHistory(records, best_epoch)
