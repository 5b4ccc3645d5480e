"""Binary parameter checkpoints and layer-stack files.

Checkpoint layout (all little-endian)::

    b"EUDP1"
    int32 x 7   L, d, d_h, d_a, d_l, |labels|, w
    |labels| x (int32 byte length, UTF-8 bytes)
    float64 arrays, row-major, in ARRAY_NAMES order

Layer-stack files use magic ``b"EUDL1"``, an ``int32 x 3`` header
``L, n, d`` and the ``L*n*d`` float64 values.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO

import numpy as np

from .mixing import LayerStack
from .model import ARRAY_NAMES, PredictorParams

MAGIC = b"EUDP1"
STACK_MAGIC = b"EUDL1"


def _read_exact(f: BinaryIO, size: int) -> bytes:
    data = f.read(size)
    if len(data) != size:
        raise ValueError("truncated file")
    return data


def dump_params(params: PredictorParams) -> bytes:
    out = [MAGIC, struct.pack("<7i", *params.dims)]
    for label in params.labels:
        raw = label.encode("utf-8")
        out.append(struct.pack("<i", len(raw)))
        out.append(raw)
    for name in ARRAY_NAMES:
        out.append(np.ascontiguousarray(getattr(params, name), dtype="<f8").tobytes())
    return b"".join(out)


def load_params_bytes(data: bytes) -> PredictorParams:
    f = io.BytesIO(data)
    if _read_exact(f, len(MAGIC)) != MAGIC:
        raise ValueError("not an EUDP1 checkpoint")
    L, d, dh, da, dl, k, w = struct.unpack("<7i", _read_exact(f, 28))
    labels = []
    for _ in range(k):
        (size,) = struct.unpack("<i", _read_exact(f, 4))
        labels.append(_read_exact(f, size).decode("utf-8"))
    shapes = {
        "gamma": (1,),
        "s_raw": (L,),
        "enc_W": ((2 * w + 1) * d, dh),
        "enc_b": (dh,),
        "arc_head": (dh, da),
        "arc_dep": (dh, da),
        "label_head": (dh, dl),
        "label_dep": (dh, dl),
        "out_W": (2 * dl, k),
        "out_b": (k,),
        "root": (dh,),
    }
    arrays = {}
    for name in ARRAY_NAMES:
        shape = shapes[name]
        count = int(np.prod(shape))
        arrays[name] = np.frombuffer(_read_exact(f, 8 * count), dtype="<f8").reshape(shape).astype(np.float64)
    if f.read(1):
        raise ValueError("trailing bytes after checkpoint")
    return PredictorParams(tuple(labels), w, **arrays)


def save_params(path, params: PredictorParams) -> None:
    with open(path, "wb") as f:
        f.write(dump_params(params))


def load_params(path) -> PredictorParams:
    with open(path, "rb") as f:
        return load_params_bytes(f.read())


def save_layer_stack(path, stack: LayerStack) -> None:
    L, n, d = stack.values.shape
    with open(path, "wb") as f:
        f.write(STACK_MAGIC + struct.pack("<3i", L, n, d))
        f.write(np.ascontiguousarray(stack.values, dtype="<f8").tobytes())


def load_layer_stack(path) -> LayerStack:
    with open(path, "rb") as f:
        if _read_exact(f, len(STACK_MAGIC)) != STACK_MAGIC:
            raise ValueError("not an EUDL1 layer-stack file")
        L, n, d = struct.unpack("<3i", _read_exact(f, 12))
        values = np.frombuffer(_read_exact(f, 8 * L * n * d), dtype="<f8").reshape(L, n, d)
        if f.read(1):
            raise ValueError("trailing bytes after layer stack")
    return LayerStack(values.astype(np.float64))
