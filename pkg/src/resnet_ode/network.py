"""Fully connected ReLU network N(x; theta) and the residual map x + N(x; theta)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Architecture:
    input_dim: int
    hidden_layers: int
    hidden_width: int
    output_dim: int | None = None

    def __post_init__(self):
        if self.output_dim is None:
            object.__setattr__(self, "output_dim", self.input_dim)
        if self.output_dim != self.input_dim:
            raise ValueError("a flow map needs output_dim == input_dim")
        if min(self.input_dim, self.hidden_layers, self.hidden_width) < 1:
            raise ValueError("dimensions, depth and width must be positive")

    @property
    def widths(self) -> list[int]:
        return [self.input_dim] + [self.hidden_width] * self.hidden_layers + [self.output_dim]

    @property
    def shapes(self) -> list[tuple[int, int]]:
        w = self.widths
        return [(w[i + 1], w[i]) for i in range(len(w) - 1)]

    @property
    def n_params(self) -> int:
        return sum(r * c + r for r, c in self.shapes)


@dataclass
class NetParams:
    """Weight matrices W_i (fan_out, fan_in) and bias vectors b_i, input to output.

    Also used to carry gradients, which share the same structure.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or len(self.weights) < 2:
            raise ValueError("need matching weight/bias lists with at least one hidden layer")
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.shape != (W.shape[0],):
                raise ValueError(f"layer {i}: bias shape {b.shape} does not match W {W.shape}")
            if i and W.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f"layer {i}: fan-in {W.shape[1]} breaks the shape chain")

    @property
    def architecture(self) -> Architecture:
        W = self.weights
        widths = {w.shape[0] for w in W[:-1]}
        if len(widths) != 1:
            raise ValueError("hidden layers have unequal widths")
        return Architecture(W[0].shape[1], len(W) - 1, W[0].shape[0], W[-1].shape[0])

    def copy(self) -> "NetParams":
        return NetParams([W.copy() for W in self.weights], [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.weights + self.biases)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for pair in zip(self.weights, self.biases) for a in pair])

    def to_dict(self) -> dict:
        arch = self.architecture
        return {
            "format_version": FORMAT_VERSION,
            "architecture": {
                "input_dim": arch.input_dim,
                "hidden_layers": arch.hidden_layers,
                "hidden_width": arch.hidden_width,
                "output_dim": arch.output_dim,
            },
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetParams":
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported params format {d.get('format_version')!r}")
        p = cls([np.array(W, dtype=float) for W in d["weights"]],
                [np.array(b, dtype=float) for b in d["biases"]])
        if p.architecture != Architecture(**d["architecture"]):
            raise ValueError("architecture block disagrees with array shapes")
        return p

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict()) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "NetParams":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class ForwardCache:
    # activations[0] is the input; pre_activations[i] feeds activations[i + 1]
    activations: list[np.ndarray]
    pre_activations: list[np.ndarray]


def init_params(arch: Architecture, seed: int, bias_std: float = 0.01) -> NetParams:
    """Normal init: weight std 1/sqrt(fan_in), bias std ``bias_std``."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for rows, cols in arch.shapes:
        weights.append(rng.normal(0.0, 1.0 / np.sqrt(cols), size=(rows, cols)))
        biases.append(rng.normal(0.0, bias_std, size=rows))
    return NetParams(weights, biases)


def zero_params(arch: Architecture) -> NetParams:
    return NetParams([np.zeros(s) for s in arch.shapes], [np.zeros(s[0]) for s in arch.shapes])


def forward(params: NetParams, x):
    """Evaluate N(x); ``x`` is (n,) or a batch (B, n).  Returns (output, cache)."""
    a = np.asarray(x, dtype=float)
    if a.shape[-1] != params.weights[0].shape[1]:
        raise ValueError(f"input has dimension {a.shape[-1]}, network expects "
                         f"{params.weights[0].shape[1]}")
    acts, pres = [a], []
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        a = z if i == last else np.maximum(z, 0.0)
        pres.append(z)
        acts.append(a)
    return a, ForwardCache(acts, pres)


def resnet_forward(params: NetParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out, _ = forward(params, x)
    return x + out


def _check_cache(params: NetParams, cache: ForwardCache):
    if len(cache.pre_activations) != len(params.weights):
        raise ValueError("cache depth does not match the parameters")
    for W, z in zip(params.weights, cache.pre_activations):
        if z.shape[-1] != W.shape[0]:
            raise ValueError("cache shapes do not match the parameters")


def backward(params: NetParams, cache: ForwardCache, output_residual) -> NetParams:
    """Gradients of the loss w.r.t. every W_i and b_i.

    ``output_residual`` is dL/d(output), e.g. 2 (p_out - y2) for the squared
    loss.  Batched caches give gradients summed over the batch.
    """
    _check_cache(params, cache)
    delta = np.asarray(output_residual, dtype=float)
    n = len(params.weights)
    gW, gb = [None] * n, [None] * n
    for i in range(n - 1, -1, -1):
        a_in = cache.activations[i]
        if delta.ndim == 1:
            gW[i] = np.outer(delta, a_in)
            gb[i] = delta.copy()
        else:
            gW[i] = delta.T @ a_in
            gb[i] = delta.sum(axis=0)
        if i:
            delta = (delta @ params.weights[i]) * (cache.pre_activations[i - 1] > 0)
    return NetParams(gW, gb)


def resnet_input_gradient(params: NetParams, cache: ForwardCache, output_residual) -> np.ndarray:
    """dL/dx through x + N(x): the skip path passes ``output_residual`` straight through."""
    _check_cache(params, cache)
    r = np.asarray(output_residual, dtype=float)
    delta = r
    for i in range(len(params.weights) - 1, 0, -1):
        delta = (delta @ params.weights[i]) * (cache.pre_activations[i - 1] > 0)
    return r + delta @ params.weights[0]


def sgd_update(params: NetParams, grads: NetParams, learning_rate: float) -> NetParams:
    if not learning_rate >= 0:
        raise ValueError("learning rate must be non-negative")
    if not grads.all_finite():
        raise FloatingPointError("non-finite gradient")
    return NetParams(
        [W - learning_rate * g for W, g in zip(params.weights, grads.weights)],
        [b - learning_rate * g for b, g in zip(params.biases, grads.biases)],
    )
