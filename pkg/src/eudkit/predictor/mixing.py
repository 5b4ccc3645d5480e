"""Input embeddings: scalar mix over language-model layers and subword averaging."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LayerStack:
    """Per-layer token embeddings, shape ``(L, n, d)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.shape[0] < 1:
            raise ValueError(f"layer stack must have shape (L, n, d) with L >= 1, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("layer stack contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def layers(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


@dataclass
class ScalarMixParams:
    gamma: float
    s_raw: np.ndarray

    def weights(self) -> np.ndarray:
        return softmax(np.asarray(self.s_raw, dtype=np.float64))


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    z = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def scalar_mix(stack: LayerStack, p: ScalarMixParams) -> np.ndarray:
    """``gamma * sum_j softmax(s_raw)_j * stack[j]``, shape ``(n, d)``."""
    s_raw = np.asarray(p.s_raw, dtype=np.float64)
    if s_raw.shape != (stack.layers,):
        raise ValueError(f"{s_raw.shape[0] if s_raw.ndim else 0} mixing weights for {stack.layers} layers")
    w = softmax(s_raw)
    return float(p.gamma) * np.tensordot(w, stack.values, axes=1)


def scalar_mix_backward(stack: LayerStack, p: ScalarMixParams, grad_out: np.ndarray):
    """Gradients of a loss w.r.t. ``(gamma, s_raw)`` given ``dloss/dmix``."""
    w = softmax(np.asarray(p.s_raw, dtype=np.float64))
    mixed = np.tensordot(w, stack.values, axes=1)
    d_gamma = float(np.sum(grad_out * mixed))
    d_w = float(p.gamma) * np.tensordot(stack.values, grad_out, axes=([1, 2], [0, 1]))
    d_s = w * (d_w - np.dot(w, d_w))
    return d_gamma, d_s


def average_subwords(subword_vectors: np.ndarray, alignment: Sequence[range | tuple[int, int]]) -> np.ndarray:
    """Average the rows of each word's subword span.

    ``alignment`` holds one ``range`` (or ``(start, stop)`` pair) per word;
    the spans must tile ``0..m-1`` in order.
    """
    x = np.asarray(subword_vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("subword vectors must be a 2-d array")
    spans = [(r.start, r.stop) if isinstance(r, range) else tuple(r) for r in alignment]
    pos = 0
    for start, stop in spans:
        if start != pos or stop <= start:
            raise ValueError(f"alignment does not partition 0..{x.shape[0] - 1} at span ({start}, {stop})")
        pos = stop
    if pos != x.shape[0]:
        raise ValueError(f"alignment covers {pos} of {x.shape[0]} subwords")
    if not spans:
        return np.zeros((0, x.shape[1]))
    return np.stack([x[a:b].mean(axis=0) for a, b in spans])
