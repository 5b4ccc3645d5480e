"""Enhanced arc and label scorer with analytic gradients.

Token vectors come from a scalar mix of language-model layers passed through
a windowed fully connected encoder (``tanh``). Row 0 of the hidden matrix is
a learned root vector. Arcs are scored as ``sigmoid(dep_i . head_j)`` over
an ``(n+1) x (n+1)`` matrix (rows: dependents, columns: heads); labels by a
softmax layer over ``[dep_i ; head_j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ..conllu import NodeId
from ..graph import Edge, EnhancedGraph
from .mixing import LayerStack, softmax

UNK_LABEL = "<unk>"
PROB_CLIP = 1e-9

# model sizes from the original training setup; toy runs scale these down
FULL_ARC_PROJECTION = 512
FULL_LABEL_PROJECTION = 128
FULL_HIDDEN_SIZE = 512

ARRAY_NAMES = (
    "gamma",
    "s_raw",
    "enc_W",
    "enc_b",
    "arc_head",
    "arc_dep",
    "label_head",
    "label_dep",
    "out_W",
    "out_b",
    "root",
)


@dataclass
class PredictorParams:
    labels: tuple[str, ...]
    window: int
    gamma: np.ndarray
    s_raw: np.ndarray
    enc_W: np.ndarray
    enc_b: np.ndarray
    arc_head: np.ndarray
    arc_dep: np.ndarray
    label_head: np.ndarray
    label_dep: np.ndarray
    out_W: np.ndarray
    out_b: np.ndarray
    root: np.ndarray

    def __post_init__(self):
        self.labels = tuple(self.labels)
        if not self.labels or len(set(self.labels)) != len(self.labels):
            raise ValueError("label vocabulary must be non-empty and duplicate-free")
        for name in ARRAY_NAMES:
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        L, d, dh, da, dl, k, w = self.dims
        expected = {
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
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def dims(self) -> tuple[int, int, int, int, int, int, int]:
        """``(L, d, d_h, d_a, d_l, |labels|, w)``."""
        w = self.window
        dh = self.enc_b.shape[0]
        return (
            self.s_raw.shape[0],
            self.enc_W.shape[0] // (2 * w + 1),
            dh,
            self.arc_head.shape[1],
            self.label_head.shape[1],
            len(self.labels),
            w,
        )

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in ARRAY_NAMES}

    def copy(self) -> "PredictorParams":
        return PredictorParams(self.labels, self.window, **{k: v.copy() for k, v in self.arrays().items()})

    def num_parameters(self) -> int:
        return sum(a.size for a in self.arrays().values())

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            if UNK_LABEL in self.labels:
                return self.labels.index(UNK_LABEL)
            raise


def init_params(
    labels: Sequence[str],
    layers: int,
    width: int,
    hidden: int,
    arc_size: int,
    label_size: int,
    window: int = 1,
    rng: Optional[np.random.Generator] = None,
    zero: bool = False,
) -> PredictorParams:
    """Glorot-uniform weights, zero biases, ``gamma = 1`` and uniform layer weights."""
    rng = rng or np.random.default_rng(0)
    k = len(labels)

    def glorot(rows, cols):
        if zero:
            return np.zeros((rows, cols))
        limit = np.sqrt(6.0 / (rows + cols))
        return rng.uniform(-limit, limit, size=(rows, cols))

    return PredictorParams(
        labels=tuple(labels),
        window=window,
        gamma=np.zeros(1) if zero else np.ones(1),
        s_raw=np.zeros(layers),
        enc_W=glorot((2 * window + 1) * width, hidden),
        enc_b=np.zeros(hidden),
        arc_head=glorot(hidden, arc_size),
        arc_dep=glorot(hidden, arc_size),
        label_head=glorot(hidden, label_size),
        label_dep=glorot(hidden, label_size),
        out_W=glorot(2 * label_size, k),
        out_b=np.zeros(k),
        root=np.zeros(hidden) if zero else rng.uniform(-0.1, 0.1, size=hidden),
    )


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class AdjacencyScores:
    """``probs[i, j]``: probability that head ``j`` governs dependent ``i``; 0 is the root."""

    logits: np.ndarray
    probs: np.ndarray
    mask: np.ndarray

    @classmethod
    def from_logits(cls, logits: np.ndarray) -> "AdjacencyScores":
        logits = np.asarray(logits, dtype=np.float64)
        size = logits.shape[0]
        if logits.shape != (size, size) or size < 1:
            raise ValueError(f"score matrix must be square, got {logits.shape}")
        mask = arc_mask(size - 1)
        p = np.clip(sigmoid(logits), np.finfo(float).tiny, np.nextafter(1.0, 0.0))
        return cls(logits, np.where(mask, p, 0.0), mask)

    @classmethod
    def from_probs(cls, probs: np.ndarray) -> "AdjacencyScores":
        probs = np.asarray(probs, dtype=np.float64)
        with np.errstate(divide="ignore"):
            logits = np.log(probs) - np.log1p(-probs)
        mask = arc_mask(probs.shape[0] - 1)
        return cls(logits, np.where(mask, probs, 0.0), mask)

    @property
    def n(self) -> int:
        return self.probs.shape[0] - 1


def arc_mask(n: int) -> np.ndarray:
    """Valid cells: dependent row >= 1, head column != dependent."""
    mask = ~np.eye(n + 1, dtype=bool)
    mask[0, :] = False
    return mask


@dataclass(frozen=True)
class LabelScores:
    pairs: tuple[tuple[int, int], ...]
    logits: np.ndarray
    probs: np.ndarray
    labels: tuple[str, ...]

    def index(self, dep: int, head: int) -> int:
        return self.pairs.index((dep, head))

    def distribution(self, dep: int, head: int) -> np.ndarray:
        return self.probs[self.index(dep, head)]

    def predicted(self) -> dict[tuple[int, int], str]:
        best = np.argmax(self.logits, axis=1) if len(self.pairs) else []
        return {pair: self.labels[int(k)] for pair, k in zip(self.pairs, best)}


# ---------------------------------------------------------------------------
# forward pieces


def _windows(mixed: np.ndarray, w: int) -> np.ndarray:
    n, d = mixed.shape
    padded = np.zeros((n + 2 * w, d))
    padded[w : w + n] = mixed
    return np.concatenate([padded[k : k + n] for k in range(2 * w + 1)], axis=1)


def _windows_backward(d_z: np.ndarray, n: int, d: int, w: int) -> np.ndarray:
    padded = np.zeros((n + 2 * w, d))
    for k in range(2 * w + 1):
        padded[k : k + n] += d_z[:, k * d : (k + 1) * d]
    return padded[w : w + n]


def encode(stack: LayerStack, params: PredictorParams) -> np.ndarray:
    """Hidden token matrix ``(n+1, d_h)`` with the root vector in row 0."""
    return _encode(stack, params)[0]


def _encode(stack: LayerStack, params: PredictorParams):
    L, d, *_ = params.dims
    if stack.layers != L or stack.width != d:
        raise ValueError(f"layer stack is {stack.layers}x{stack.width}, model expects {L}x{d}")
    mix_w = softmax(params.s_raw)
    mixed_bar = np.tensordot(mix_w, stack.values, axes=1)
    mixed = params.gamma[0] * mixed_bar
    z = _windows(mixed, params.window)
    enc = np.tanh(z @ params.enc_W + params.enc_b)
    hidden = np.vstack([params.root[None, :], enc])
    return hidden, (mix_w, mixed_bar, z, enc)


def arc_scores(hidden: np.ndarray, params: PredictorParams) -> AdjacencyScores:
    hidden = np.asarray(hidden, dtype=np.float64)
    if hidden.ndim != 2 or hidden.shape[1] != params.arc_head.shape[0]:
        raise ValueError(f"hidden matrix has shape {hidden.shape}")
    logits = (hidden @ params.arc_dep) @ (hidden @ params.arc_head).T
    return AdjacencyScores.from_logits(logits)


def _pair_features(hidden, params, pairs, order):
    dep_part = (hidden @ params.label_dep)[[i for i, _ in pairs]]
    head_part = (hidden @ params.label_head)[[j for _, j in pairs]]
    if order == "dep-head":
        return np.concatenate([dep_part, head_part], axis=1)
    if order == "head-dep":
        return np.concatenate([head_part, dep_part], axis=1)
    raise ValueError(f"unknown concatenation order {order!r}")


def label_scores(
    hidden: np.ndarray,
    params: PredictorParams,
    pairs: Iterable[tuple[int, int]],
    order: str = "dep-head",
) -> LabelScores:
    """Label distribution for each ``(dep, head)`` pair."""
    hidden = np.asarray(hidden, dtype=np.float64)
    pairs = tuple((int(i), int(j)) for i, j in pairs)
    size = hidden.shape[0]
    for i, j in pairs:
        if not (0 <= i < size and 0 <= j < size):
            raise IndexError(f"pair ({i}, {j}) outside a sentence of {size - 1} tokens")
    if not pairs:
        empty = np.zeros((0, len(params.labels)))
        return LabelScores(pairs, empty, empty, params.labels)
    logits = _pair_features(hidden, params, pairs, order) @ params.out_W + params.out_b
    return LabelScores(pairs, logits, softmax(logits, axis=1), params.labels)


# ---------------------------------------------------------------------------
# loss


def _gold_cells(gold, n: int) -> list[tuple[int, int, str]]:
    """Gold edges as ``(dep, head, label)`` index triples."""
    if isinstance(gold, EnhancedGraph):
        items = [(e.dep, e.head, e.label) for e in gold.edges()]
    else:
        items = list(gold)
    cells = []
    for dep, head, label in items:
        i = dep.index if isinstance(dep, NodeId) else int(dep)
        j = head.index if isinstance(head, NodeId) else int(head)
        if isinstance(dep, NodeId) and not dep.is_surface:
            raise ValueError(f"gold dependent {dep} is not a surface token")
        if isinstance(head, NodeId) and not (head.is_surface or head.is_root):
            raise ValueError(f"gold head {head} is not a surface token or the root")
        if not (1 <= i <= n and 0 <= j <= n) or i == j:
            raise ValueError(f"gold edge {j}->{i} falls on a masked cell")
        cells.append((i, j, label))
    return cells


def arc_targets(n: int, cells) -> np.ndarray:
    y = np.zeros((n + 1, n + 1))
    for i, j, _ in cells:
        y[i, j] = 1.0
    return y


def loss(
    scores: AdjacencyScores,
    labels: LabelScores,
    gold,
    weights: tuple[float, float] = (0.2, 0.8),
) -> float:
    """``w_arc * mean BCE over unmasked cells + w_label * mean CE over gold pairs``."""
    cells = _gold_cells(gold, scores.n)
    y = arc_targets(scores.n, cells)
    p = np.clip(sigmoid(scores.logits[scores.mask]), PROB_CLIP, 1 - PROB_CLIP)
    t = y[scores.mask]
    arc = float(np.mean(-(t * np.log(p) + (1 - t) * np.log(1 - p)))) if p.size else 0.0
    label = 0.0
    if cells:
        ce = []
        vocab = labels.labels
        unk = vocab.index(UNK_LABEL) if UNK_LABEL in vocab else None
        for i, j, lab in cells:
            k = vocab.index(lab) if lab in vocab else unk
            if k is None:
                raise ValueError(f"label {lab!r} not in vocabulary")
            q = np.clip(labels.distribution(i, j)[k], PROB_CLIP, 1 - PROB_CLIP)
            ce.append(-np.log(q))
        label = float(np.mean(ce))
    w_arc, w_label = weights
    return w_arc * arc + w_label * label


def loss_and_grads(
    params: PredictorParams,
    stack: LayerStack,
    gold_cells: Sequence[tuple[int, int, int]],
    weights: tuple[float, float] = (0.2, 0.8),
    order: str = "dep-head",
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss and its gradient w.r.t. every array of ``params``.

    ``gold_cells`` holds ``(dep, head, label_id)`` triples.
    """
    w_arc, w_label = weights
    n = stack.length
    hidden, (mix_w, mixed_bar, z, enc) = _encode(stack, params)

    # arcs
    a_dep = hidden @ params.arc_dep
    a_head = hidden @ params.arc_head
    logits = a_dep @ a_head.T
    p = sigmoid(logits)
    mask = arc_mask(n)
    y = np.zeros_like(p)
    for i, j, _ in gold_cells:
        y[i, j] = 1.0
    count = mask.sum()
    pc = np.clip(p, PROB_CLIP, 1 - PROB_CLIP)
    bce = -(y * np.log(pc) + (1 - y) * np.log(1 - pc))
    arc = float(bce[mask].sum() / count) if count else 0.0
    live = mask & (p > PROB_CLIP) & (p < 1 - PROB_CLIP)
    d_logits = np.where(live, (p - y) * (w_arc / count), 0.0) if count else np.zeros_like(p)

    d_hidden = d_logits @ a_head @ params.arc_dep.T + d_logits.T @ a_dep @ params.arc_head.T
    grads = {
        "arc_dep": hidden.T @ (d_logits @ a_head),
        "arc_head": hidden.T @ (d_logits.T @ a_dep),
    }

    # labels
    label = 0.0
    dl = params.label_head.shape[1]
    g_out_W = np.zeros_like(params.out_W)
    g_out_b = np.zeros_like(params.out_b)
    g_label_dep = np.zeros_like(params.label_dep)
    g_label_head = np.zeros_like(params.label_head)
    if gold_cells:
        deps = np.array([i for i, _, _ in gold_cells])
        heads = np.array([j for _, j, _ in gold_cells])
        targets = np.array([k for _, _, k in gold_cells])
        l_dep = hidden @ params.label_dep
        l_head = hidden @ params.label_head
        if order == "dep-head":
            feats = np.concatenate([l_dep[deps], l_head[heads]], axis=1)
        else:
            feats = np.concatenate([l_head[heads], l_dep[deps]], axis=1)
        out = feats @ params.out_W + params.out_b
        q = softmax(out, axis=1)
        rows = np.arange(len(gold_cells))
        qt = q[rows, targets]
        label = float(np.mean(-np.log(np.clip(qt, PROB_CLIP, 1 - PROB_CLIP))))
        onehot = np.zeros_like(q)
        onehot[rows, targets] = 1.0
        live_t = (qt > PROB_CLIP) & (qt < 1 - PROB_CLIP)
        d_out = (q - onehot) * (live_t[:, None] * (w_label / len(gold_cells)))
        g_out_W = feats.T @ d_out
        g_out_b = d_out.sum(axis=0)
        d_feats = d_out @ params.out_W.T
        if order == "dep-head":
            d_dep_rows, d_head_rows = d_feats[:, :dl], d_feats[:, dl:]
        else:
            d_head_rows, d_dep_rows = d_feats[:, :dl], d_feats[:, dl:]
        d_l_dep = np.zeros_like(l_dep)
        d_l_head = np.zeros_like(l_head)
        np.add.at(d_l_dep, deps, d_dep_rows)
        np.add.at(d_l_head, heads, d_head_rows)
        g_label_dep = hidden.T @ d_l_dep
        g_label_head = hidden.T @ d_l_head
        d_hidden += d_l_dep @ params.label_dep.T + d_l_head @ params.label_head.T

    grads.update(out_W=g_out_W, out_b=g_out_b, label_dep=g_label_dep, label_head=g_label_head)

    # encoder and scalar mix
    grads["root"] = d_hidden[0]
    d_pre = d_hidden[1:] * (1.0 - enc**2)
    grads["enc_W"] = z.T @ d_pre
    grads["enc_b"] = d_pre.sum(axis=0)
    d_z = d_pre @ params.enc_W.T
    L, d, *_ = params.dims
    d_mixed = _windows_backward(d_z, n, d, params.window)
    grads["gamma"] = np.array([np.sum(d_mixed * mixed_bar)])
    d_w = params.gamma[0] * np.tensordot(stack.values, d_mixed, axes=([1, 2], [0, 1]))
    grads["s_raw"] = mix_w * (d_w - np.dot(mix_w, d_w))

    return w_arc * arc + w_label * label, grads


# ---------------------------------------------------------------------------
# decoding


def decode_arcs(scores: AdjacencyScores, threshold: float = 0.5) -> list[tuple[int, int]]:
    """``(dep, head)`` pairs at or above ``threshold``; a dependent with none
    gets its single best head."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    pairs = []
    for i in range(1, scores.n + 1):
        row = np.where(scores.mask[i], scores.probs[i], -np.inf)
        heads = [int(j) for j in np.flatnonzero(row >= threshold)]
        if not heads:
            heads = [int(np.argmax(row))]
        pairs.extend((i, j) for j in heads)
    return pairs


def decode_graph(scores: AdjacencyScores, labels: LabelScores, threshold: float = 0.5) -> EnhancedGraph:
    """Thresholded multi-head graph labelled by the argmax of ``labels``."""
    names = labels.predicted()
    edges = []
    for i, j in decode_arcs(scores, threshold):
        if (i, j) not in names:
            raise KeyError(f"no label distribution for pair ({i}, {j})")
        edges.append(Edge(NodeId(j), NodeId(i), names[(i, j)]))
    return EnhancedGraph([NodeId(i) for i in range(1, scores.n + 1)], edges)
