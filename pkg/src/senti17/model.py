"""The convolutional sentiment network.

Parallel filter banks -> ReLU -> global max pool -> concatenate -> dropout ->
dense + ReLU -> dense -> softmax.
"""

from dataclasses import dataclass, fields

import numpy as np

from . import layers as L
from .errors import ShapeError
from .labels import LABELS, NEUTRAL, NUM_CLASSES

PAPER_FILTER_SIZES = (1, 2, 3, 4, 5, 2, 3, 4)


@dataclass(frozen=True)
class Hyperparams:
    d: int = 200
    maxl: int = 99
    filter_sizes: tuple = PAPER_FILTER_SIZES
    f: int = 50
    dropout_p: float = 0.3
    fc_units: int = 64
    classes: int = NUM_CLASSES

    def __post_init__(self):
        object.__setattr__(self, "filter_sizes", tuple(int(m) for m in self.filter_sizes))
        for name in ("d", "maxl", "f", "fc_units"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.filter_sizes or any(m < 1 or m > self.maxl for m in self.filter_sizes):
            raise ValueError(f"filter sizes {self.filter_sizes} must lie in [1, maxl={self.maxl}]")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError("dropout_p must be in [0, 1)")
        if self.classes != NUM_CLASSES:
            raise ValueError("the network has exactly 3 output classes")

    @property
    def pooled_width(self):
        return self.f * len(self.filter_sizes)

    def conv_widths(self):
        return tuple(self.maxl - m + 1 for m in self.filter_sizes)

    def to_dict(self):
        out = {f_.name: getattr(self, f_.name) for f_ in fields(self)}
        out["filter_sizes"] = list(self.filter_sizes)
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(**{f_.name: data[f_.name] for f_ in fields(cls) if f_.name in data})


@dataclass
class NetworkParams:
    banks: list
    fc: L.DenseLayer
    out: L.DenseLayer
    init_seed: int = 0

    def tensors(self):
        """All learnable arrays in canonical order (also the file order)."""
        ts = []
        for bank in self.banks:
            ts += [bank.weights, bank.biases]
        ts += [self.fc.weights, self.fc.biases, self.out.weights, self.out.biases]
        return ts

    @classmethod
    def from_tensors(cls, tensors, init_seed=0):
        tensors = list(tensors)
        n_banks = (len(tensors) - 4) // 2
        banks = [L.ConvFilterBank(tensors[2 * i], tensors[2 * i + 1]) for i in range(n_banks)]
        fc = L.DenseLayer(tensors[-4], tensors[-3])
        out = L.DenseLayer(tensors[-2], tensors[-1])
        return cls(banks, fc, out, init_seed)

    def copy(self):
        return NetworkParams.from_tensors([t.copy() for t in self.tensors()], self.init_seed)

    def zeros_like(self):
        return NetworkParams.from_tensors([np.zeros_like(t) for t in self.tensors()], self.init_seed)


def _uniform(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_params(hyper, seed):
    """Glorot-uniform weights and zero biases, fully determined by ``seed``."""
    rng = np.random.default_rng(seed)
    banks = []
    for m in hyper.filter_sizes:
        # receptive field m*d in, f maps of m*d out (Keras conv convention)
        w = _uniform(rng, (hyper.f, m, hyper.d), m * hyper.d, hyper.f * m * hyper.d)
        banks.append(L.ConvFilterBank(w, np.zeros(hyper.f)))
    fc = L.DenseLayer(_uniform(rng, (hyper.fc_units, hyper.pooled_width),
                               hyper.pooled_width, hyper.fc_units),
                      np.zeros(hyper.fc_units))
    out = L.DenseLayer(_uniform(rng, (hyper.classes, hyper.fc_units),
                                hyper.fc_units, hyper.classes),
                       np.zeros(hyper.classes))
    return NetworkParams(banks, fc, out, seed)


def init_limits(hyper):
    """Uniform half-widths used by :func:`init_params`, per tensor in canonical order."""
    limits = []
    for m in hyper.filter_sizes:
        limits += [np.sqrt(6.0 / (m * hyper.d + hyper.f * m * hyper.d)), 0.0]
    limits += [np.sqrt(6.0 / (hyper.pooled_width + hyper.fc_units)), 0.0]
    limits += [np.sqrt(6.0 / (hyper.fc_units + hyper.classes)), 0.0]
    return limits


@dataclass
class ForwardCache:
    x: np.ndarray
    conv_pre: list
    argmax: list
    pooled: np.ndarray
    dropped: np.ndarray
    mask: np.ndarray
    fc_pre: np.ndarray
    hidden: np.ndarray
    logits: np.ndarray
    probs: np.ndarray
    dropout: L.DropoutSpec = None
    train_mode: bool = False


def forward(params, x, train_mode=False, rng=None, dropout_p=0.0):
    """Run one example ``x`` of shape ``(d, maxl)``; returns ``(probs, cache)``.

    ``rng`` is required when ``train_mode`` is set and ``dropout_p > 0``.
    """
    if hasattr(x, "values"):
        x = x.values
    conv_pre, argmaxes, pooled = [], [], []
    for bank in params.banks:
        z = L.conv_forward(bank, x)
        vals, idx = L.global_max_pool(L.relu(z))
        conv_pre.append(z)
        argmaxes.append(idx)
        pooled.append(vals)
    pooled = np.concatenate(pooled)
    if pooled.shape[0] != params.fc.in_dim:
        raise ShapeError(f"pooled width {pooled.shape[0]} != dense input {params.fc.in_dim}")
    spec = L.DropoutSpec(dropout_p, rng)
    dropped, mask = L.dropout_apply(spec, pooled, train_mode)
    fc_pre = L.dense_forward(params.fc, dropped)
    hidden = L.relu(fc_pre)
    logits = L.dense_forward(params.out, hidden)
    probs = L.softmax(logits)
    cache = ForwardCache(x, conv_pre, argmaxes, pooled, dropped, mask, fc_pre,
                         hidden, logits, probs, spec, train_mode)
    return probs, cache


def backward(params, cache, gold, input_grad=False):
    """Cross-entropy gradients for every parameter, as a :class:`NetworkParams`.

    With ``input_grad`` the gradient w.r.t. the input matrix is stored in
    ``grads.input_grad``; frozen embeddings never request it.
    """
    if len(cache.conv_pre) != len(params.banks):
        raise ShapeError("cache does not match the network")
    loss, dlogits = L.cross_entropy_loss(cache.probs, gold)
    g_out_w, g_out_b, dhidden = L.dense_backward(params.out, cache.hidden, dlogits)
    dfc_pre = L.relu_backward(cache.fc_pre, dhidden)
    g_fc_w, g_fc_b, ddropped = L.dense_backward(params.fc, cache.dropped, dfc_pre)
    dpooled = L.dropout_backward(cache.dropout, cache.mask, ddropped, cache.train_mode)
    grad_tensors = []
    input_g = np.zeros_like(cache.x) if input_grad else None
    offset = 0
    for bank, z, idx in zip(params.banks, cache.conv_pre, cache.argmax):
        dpool = L.pool_backward(idx, dpooled[offset:offset + bank.f], z.shape[1])
        offset += bank.f
        dz = L.relu_backward(z, dpool)
        gw, gb, gx = L.conv_backward(bank, cache.x, dz, input_grad=input_grad)
        grad_tensors += [gw, gb]
        if input_grad:
            input_g += gx
    grad_tensors += [g_fc_w, g_fc_b, g_out_w, g_out_b]
    grads = NetworkParams.from_tensors(grad_tensors, params.init_seed)
    grads.loss = loss
    grads.input_grad = input_g
    return grads


def predict_label(probs):
    """Argmax label; ties go to neutral, then negative before positive."""
    best = np.max(probs)
    tied = [i for i in range(len(probs)) if probs[i] == best]
    if NEUTRAL in tied:
        return LABELS[NEUTRAL]
    return LABELS[tied[0]]


def predict_proba(params, inputs):
    """Inference-mode class probabilities for a ``(n, d, maxl)`` batch."""
    return np.array([forward(params, x)[0] for x in inputs]).reshape(len(inputs), NUM_CLASSES)

