"""Layer kernels with hand-written gradients.

All kernels work on a single example in float64 and are pure functions of
their arguments; dropout draws from an explicitly passed generator.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeError

LOSS_EPS = 1e-12


@dataclass
class ConvFilterBank:
    """``f`` filters of width ``m`` spanning the full embedding depth ``d``."""

    weights: np.ndarray  # (f, m, d)
    biases: np.ndarray   # (f,)

    @property
    def f(self):
        return self.weights.shape[0]

    @property
    def m(self):
        return self.weights.shape[1]

    @property
    def d(self):
        return self.weights.shape[2]


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out_dim, in_dim)
    biases: np.ndarray   # (out_dim,)

    @property
    def in_dim(self):
        return self.weights.shape[1]

    @property
    def out_dim(self):
        return self.weights.shape[0]


@dataclass
class DropoutSpec:
    p: float
    rng: np.random.Generator

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"dropout fraction must be in [0, 1), got {self.p}")


def _windows(bank, x):
    if x.ndim != 2 or x.shape[0] != bank.d:
        raise ShapeError(f"input of shape {x.shape} does not match filter depth {bank.d}")
    if bank.m > x.shape[1]:
        raise ShapeError("filter wider than input")
    # (L, d, m): window j covers columns j .. j+m-1
    return sliding_window_view(x, bank.m, axis=1).transpose(1, 0, 2)


def conv_forward(bank, x):
    """Valid convolution along the token axis; returns ``(f, maxl - m + 1)``."""
    win = _windows(bank, x)
    out = np.tensordot(bank.weights, win, axes=([1, 2], [2, 1]))
    return out + bank.biases[:, None]


def conv_backward(bank, x, upstream, input_grad=True):
    """Return ``(grad_weights, grad_biases, grad_input)`` for :func:`conv_forward`.

    ``grad_input`` is None when ``input_grad`` is false.
    """
    win = _windows(bank, x)
    length = win.shape[0]
    if upstream.shape != (bank.f, length):
        raise ShapeError(f"upstream gradient shape {upstream.shape}, expected {(bank.f, length)}")
    grad_w = np.tensordot(upstream, win, axes=([1], [0])).transpose(0, 2, 1)
    grad_b = upstream.sum(axis=1)
    grad_x = None
    if input_grad:
        grad_x = np.zeros_like(x)
        for a in range(bank.m):
            # column j+a receives sum_k upstream[k, j] * W[k, a, :]
            grad_x[:, a:a + length] += bank.weights[:, a, :].T @ upstream
    return grad_w, grad_b, grad_x


def relu(x):
    return np.maximum(x, 0.0)


def relu_backward(x, upstream):
    return np.where(x > 0, upstream, 0.0)


def global_max_pool(rows):
    """Max over each row; ties resolve to the smallest index."""
    if rows.shape[-1] < 1:
        raise ShapeError("cannot pool an empty row")
    argmax = np.argmax(rows, axis=1)
    return rows[np.arange(rows.shape[0]), argmax], argmax


def pool_backward(argmax, upstream, length):
    grad = np.zeros((len(argmax), length))
    grad[np.arange(len(argmax)), argmax] = upstream
    return grad


def dropout_apply(spec, x, train_mode):
    """Inverted dropout. Returns ``(output, mask)``; inference is the identity."""
    if not train_mode or spec.p == 0.0:
        return x, np.ones(x.shape, dtype=bool)
    mask = spec.rng.random(x.shape) >= spec.p
    return x * mask / (1.0 - spec.p), mask


def dropout_backward(spec, mask, upstream, train_mode=True):
    if not train_mode or spec.p == 0.0:
        return upstream
    return upstream * mask / (1.0 - spec.p)


def dense_forward(layer, x):
    if x.shape != (layer.in_dim,):
        raise ShapeError(f"dense input of shape {x.shape}, expected ({layer.in_dim},)")
    return layer.weights @ x + layer.biases


def dense_backward(layer, x, upstream):
    """Return ``(grad_weights, grad_biases, grad_input)``."""
    if upstream.shape != (layer.out_dim,):
        raise ShapeError(f"upstream gradient shape {upstream.shape}, expected ({layer.out_dim},)")
    return np.outer(upstream, x), upstream.copy(), layer.weights.T @ upstream


def softmax(z):
    e = np.exp(z - np.max(z))
    return e / e.sum()


def cross_entropy_loss(probs, gold):
    """Loss ``-log(p[gold] + eps)`` and its gradient w.r.t. the pre-softmax logits."""
    loss = -np.log(probs[gold] + LOSS_EPS)
    grad = probs.copy()
    grad[gold] -= 1.0
    return float(loss), grad
