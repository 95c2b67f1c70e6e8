"""Nadam: Adam with Nesterov momentum and a warm-up momentum schedule."""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError


@dataclass(frozen=True)
class NadamConfig:
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    schedule_decay: float = 0.004
    # False: constant momentum beta1 and no look-ahead term, i.e. plain Adam.
    nesterov: bool = True

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def momentum(self, t):
        if not self.nesterov:
            return self.beta1
        return self.beta1 * (1.0 - 0.5 * 0.96 ** (t * self.schedule_decay))


@dataclass
class NadamState:
    m: list
    v: list
    t: int = 0
    mu_product: float = 1.0

    @classmethod
    def zeros(cls, params):
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def nadam_step(config, state, params, grads):
    """Update ``params`` (a list of arrays) in place and advance ``state``."""
    if len(grads) != len(params) or len(state.m) != len(params):
        raise ShapeError("gradients, moments and parameters must line up")
    state.t += 1
    t = state.t
    mu_t = config.momentum(t)
    mu_next = config.momentum(t + 1)
    state.mu_product *= mu_t
    mu_prod = state.mu_product
    mu_prod_next = mu_prod * mu_next
    bias2 = 1.0 - config.beta2 ** t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m *= config.beta1
        m += (1.0 - config.beta1) * g
        v *= config.beta2
        v += (1.0 - config.beta2) * g * g
        v_hat = v / bias2
        if config.nesterov:
            g_hat = g / (1.0 - mu_prod)
            m_hat = m / (1.0 - mu_prod_next)
            m_bar = (1.0 - mu_t) * g_hat + mu_next * m_hat
        else:
            m_bar = m / (1.0 - mu_prod)
        p -= config.lr * m_bar / (np.sqrt(v_hat) + config.eps)
    return state, params
