"""Central finite-difference check of the analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mixing import LayerStack
from .model import PredictorParams, init_params, loss_and_grads

FD_STEP = 1e-5
# gradients smaller than this are compared in absolute rather than relative terms
GRAD_FLOOR = 1e-7


@dataclass(frozen=True)
class ToyDims:
    tokens: int = 3
    width: int = 4
    layers: int = 2
    hidden: int = 5
    arc_size: int = 4
    label_size: int = 3
    n_labels: int = 4
    window: int = 1


def toy_problem(dims: ToyDims, seed: int, zero: bool = False):
    """Random parameters, layer stack and gold graph of the given size."""
    rng = np.random.default_rng(seed)
    labels = tuple(f"l{k}" for k in range(dims.n_labels))
    params = init_params(
        labels, dims.layers, dims.width, dims.hidden, dims.arc_size, dims.label_size, dims.window, rng, zero=zero
    )
    if not zero:
        params.gamma[:] = rng.uniform(0.5, 1.5)
        params.s_raw[:] = rng.normal(size=dims.layers)
        params.enc_b[:] = rng.normal(scale=0.1, size=dims.hidden)
        params.out_b[:] = rng.normal(scale=0.1, size=dims.n_labels)
    stack = LayerStack(rng.normal(size=(dims.layers, dims.tokens, dims.width)))
    cells = []
    for i in range(1, dims.tokens + 1):
        heads = [j for j in range(dims.tokens + 1) if j != i]
        for j in rng.choice(heads, size=rng.integers(1, 3), replace=False):
            cells.append((i, int(j), int(rng.integers(dims.n_labels))))
    return params, stack, cells


def relative_errors(params: PredictorParams, stack: LayerStack, cells, weights=(0.2, 0.8)) -> dict[str, np.ndarray]:
    _, analytic = loss_and_grads(params, stack, cells, weights)
    out = {}
    for name, array in params.arrays().items():
        numeric = np.zeros_like(array)
        flat = array.reshape(-1)
        for k in range(flat.size):
            keep = flat[k]
            flat[k] = keep + FD_STEP
            up = loss_and_grads(params, stack, cells, weights)[0]
            flat[k] = keep - FD_STEP
            down = loss_and_grads(params, stack, cells, weights)[0]
            flat[k] = keep
            numeric.reshape(-1)[k] = (up - down) / (2 * FD_STEP)
        a = analytic[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(numeric)), GRAD_FLOOR)
        out[name] = np.abs(a - numeric) / denom
    return out


def grad_check(dims: ToyDims = ToyDims(), seed: int = 1, zero: bool = False) -> float:
    """Max relative error between analytic and central-difference gradients."""
    params, stack, cells = toy_problem(dims, seed, zero)
    if params.num_parameters() > 1000:
        raise ValueError("toy problem too large for finite differences")
    return float(max(err.max() for err in relative_errors(params, stack, cells).values()))
