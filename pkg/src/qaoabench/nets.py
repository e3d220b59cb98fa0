"""Minimal dense networks with hand-rolled backprop.

Two-hidden-layer tanh MLPs are all the policy needs, so this stays a few
dozen lines of numpy instead of pulling in a deep-learning framework.
Backward passes return gradients in the same (weights, biases) layout the
optimizer consumes; correctness is pinned by finite-difference tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

HEADS = ("linear", "scaled_tanh")


@dataclass
class Mlp:
    """Fully connected net: tanh hidden layers, configurable head."""

    weights: list    # W_k of shape (n_in_k, n_out_k)
    biases: list     # b_k of shape (n_out_k,)
    head: str = "linear"
    scale: float = 1.0

    def __post_init__(self):
        if self.head not in HEADS:
            raise DomainError(f"unknown head {self.head!r}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise DomainError("weights/biases layer count mismatch")

    @property
    def sizes(self) -> list:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def parameters(self) -> list:
        """Flat list of parameter arrays (shared references, not copies)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "Mlp":
        return Mlp(weights=[w.copy() for w in self.weights],
                   biases=[b.copy() for b in self.biases],
                   head=self.head, scale=self.scale)

    def forward(self, x: np.ndarray):
        """Returns (output, cache); accepts (D,) or (B, D) inputs."""
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        h = x.reshape(1, -1) if squeeze else x
        if h.shape[1] != self.weights[0].shape[0]:
            raise DomainError(
                f"input dimension {h.shape[1]} != expected "
                f"{self.weights[0].shape[0]}")
        acts = [h]
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            last = k == len(self.weights) - 1
            if not last:
                h = np.tanh(z)
            elif self.head == "scaled_tanh":
                h = self.scale * np.tanh(z)
            else:
                h = z
            acts.append(h)
        out = h[0] if squeeze else h
        return out, (acts, squeeze)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, cache, dout: np.ndarray):
        """Gradients of sum(dout * output) w.r.t. every parameter.

        Returns (grads, dx) with grads ordered like parameters().
        """
        acts, squeeze = cache
        g = np.asarray(dout, dtype=np.float64)
        if squeeze:
            g = g.reshape(1, -1)
        grads = [None] * (2 * len(self.weights))
        for k in range(len(self.weights) - 1, -1, -1):
            h_out = acts[k + 1]
            last = k == len(self.weights) - 1
            if not last:
                g = g * (1.0 - h_out**2)          # d tanh(z) = 1 - tanh^2
            elif self.head == "scaled_tanh":
                t = h_out / self.scale
                g = g * self.scale * (1.0 - t**2)
            grads[2 * k] = acts[k].T @ g
            grads[2 * k + 1] = g.sum(axis=0)
            if k:
                g = g @ self.weights[k].T
        dx = g @ self.weights[0].T if not squeeze else (g @ self.weights[0].T)[0]
        return grads, dx


def init_mlp(sizes, head: str, scale: float, rng) -> Mlp:
    """Glorot-uniform weights, zero biases."""
    if len(sizes) < 2:
        raise DomainError("need at least input and output sizes")
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (n_in + n_out))
        weights.append(rng.uniform(-limit, limit, size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return Mlp(weights=weights, biases=biases, head=head, scale=scale)


class Adam:
    """Adaptive moment estimation over a list of parameter arrays."""

    def __init__(self, params: list, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list) -> None:
        if len(grads) != len(self.params):
            raise DomainError("gradient list does not match parameter list")
        self.t += 1
        b1t = 1.0 - self.beta1**self.t
        b2t = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)
