"""Deterministic stand-in for contextual language-model layers.

Each word is split into character trigram "subwords"; every subword and
every UPOS tag owns a fixed pseudo-random ``(L, d)`` block seeded from its
CRC-32. Subword blocks are averaged per word, the way multi-piece words are
handled for a real encoder, and the tag block is added.
"""

from __future__ import annotations

import zlib
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .mixing import LayerStack, average_subwords


def subword_pieces(form: str, size: int = 3) -> list[str]:
    text = f"<{form.lower()}>"
    if len(text) <= size:
        return [text]
    return [text[i : i + size] for i in range(len(text) - size + 1)]


@lru_cache(maxsize=65536)
def _block(key: str, layers: int, width: int) -> np.ndarray:
    rng = np.random.default_rng(zlib.crc32(key.encode("utf-8")))
    block = rng.standard_normal((layers, width)) / np.sqrt(width)
    block.setflags(write=False)
    return block


def pseudo_layer_stack(
    forms: Sequence[str],
    upos: Optional[Sequence[str]] = None,
    layers: int = 3,
    width: int = 16,
) -> LayerStack:
    pieces, spans = [], []
    for form in forms:
        word_pieces = subword_pieces(form)
        spans.append(range(len(pieces), len(pieces) + len(word_pieces)))
        pieces.extend(word_pieces)
    n = len(forms)
    values = np.zeros((layers, n, width))
    if n:
        sub = np.stack([_block("piece:" + p, layers, width) for p in pieces], axis=1)
        for j in range(layers):
            values[j] = average_subwords(sub[j], spans)
    if upos is not None:
        for i, tag in enumerate(upos):
            values[:, i, :] += _block("upos:" + (tag or "_"), layers, width)
    return LayerStack(values)
