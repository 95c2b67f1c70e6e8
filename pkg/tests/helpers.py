"""Shared builders for tests that need the package (kept apart from oracles.py)."""

import numpy as np

from senti17.model import Hyperparams, backward, forward, init_params
from senti17.synthetic import make_table, make_tweets
from senti17.text import Corpus, LabeledExample, preprocess
from senti17.train import encode_corpus

from oracles import max_rel_error, numeric_grad

TINY = Hyperparams(d=2, maxl=4, filter_sizes=(1, 2), f=1, dropout_p=0.0, fc_units=2)
KINK_MARGIN = 1e-3
DESK = Hyperparams(d=10, maxl=12, f=4, fc_units=16)


def synthetic_set(n, seed, hyper=DESK):
    table = make_table(hyper.d, seed=0)
    corpus = Corpus([LabeledExample(i, l, tuple(preprocess(t))) for i, l, t in make_tweets(n, seed=seed)])
    return encode_corpus(corpus, table, hyper.maxl)


def near_kink(cache):
    """True when a finite-difference step could cross a ReLU or pooling kink."""
    for z in cache.conv_pre:
        if np.any(np.abs(z) < KINK_MARGIN):
            return True
        act = np.maximum(z, 0)
        for row in act:
            top = np.sort(row)[::-1]
            if len(top) > 1 and top[0] - top[1] < KINK_MARGIN and top[0] > 0:
                return True
    return bool(np.any(np.abs(cache.fc_pre) < KINK_MARGIN))


def random_tiny_instance(rng, hyper=TINY, scale=1.0):
    """Random params/input/gold away from non-differentiable points."""
    while True:
        params = init_params(hyper, int(rng.integers(1 << 31)))
        for t in params.tensors():
            t[...] = rng.normal(size=t.shape) * scale
        x = rng.normal(size=(hyper.d, hyper.maxl))
        gold = int(rng.integers(3))
        _, cache = forward(params, x, train_mode=True, rng=rng, dropout_p=0.0)
        if not near_kink(cache):
            return params, x, gold


def network_loss(params, x, gold):
    """Exact cross-entropy from the logits (log-sum-exp, no epsilon guard)."""
    _, cache = forward(params, x)
    z = cache.logits
    top = z.max()
    return float(top + np.log(np.exp(z - top).sum()) - z[gold])


def gradient_check(params, x, gold, step=1e-5):
    """Max relative error of backward() over all parameters."""
    _, cache = forward(params, x, train_mode=True, rng=None, dropout_p=0.0)
    grads = backward(params, cache, gold)
    worst = 0.0
    for t, g in zip(params.tensors(), grads.tensors()):
        num = numeric_grad(lambda: network_loss(params, x, gold), t, step)
        worst = max(worst, max_rel_error(g, num))
    return worst


def plain_params(params):
    banks = [(b.weights.tolist(), b.biases.tolist()) for b in params.banks]
    return (banks, params.fc.weights.tolist(), params.fc.biases.tolist(),
            params.out.weights.tolist(), params.out.biases.tolist())
