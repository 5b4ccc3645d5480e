"""Toy training loop (per-sentence Adam), prediction and held-out scoring."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from typing import Mapping, Optional, Sequence

import numpy as np

from ..conllu import Document, NodeId, Sentence
from ..errors import EUDError
from ..graph import EnhancedGraph, apply_graph, expand_empty_nodes, graph_of
from .features import pseudo_layer_stack
from .mixing import LayerStack
from .model import (
    UNK_LABEL,
    PredictorParams,
    arc_scores,
    decode_arcs,
    decode_graph,
    encode,
    init_params,
    label_scores,
    loss_and_grads,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyper:
    # optimiser settings of the original setup: Adam, lr 0.002, beta1 = beta2 = 0.9, 400 epochs
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.9
    eps: float = 1e-8
    epochs: int = 400
    # dimensions scaled down from 512 (arc) / 128 (label) / 512 (hidden)
    layers: int = 3
    width: int = 16
    hidden: int = 48
    arc_size: int = 32
    label_size: int = 16
    window: int = 1
    w_arc: float = 0.2
    w_label: float = 0.8
    threshold: float = 0.5
    seed: int = 0

    @classmethod
    def from_mapping(cls, values: Mapping) -> "Hyper":
        names = {f.name for f in fields(cls)}
        unknown = set(values) - names
        if unknown:
            raise ValueError(f"unknown hyperparameters: {sorted(unknown)}")
        return cls(**values)


class Adam:
    def __init__(self, params: PredictorParams, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.arrays().items()}
        self.v = {k: np.zeros_like(v) for k, v in params.arrays().items()}
        self.t = 0

    def step(self, params: PredictorParams, grads: Mapping[str, np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for name, g in grads.items():
            m, v = self.m[name], self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p = getattr(params, name)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class Example:
    stack: LayerStack
    cells: list[tuple[int, int, int]]


@dataclass
class TrainResult:
    params: PredictorParams
    losses: list[float] = field(default_factory=list)


def sentence_stack(s: Sentence, params_or_hyper) -> LayerStack:
    if isinstance(params_or_hyper, PredictorParams):
        layers, width = params_or_hyper.dims[:2]
    else:
        layers, width = params_or_hyper.layers, params_or_hyper.width
    words = s.words
    return pseudo_layer_stack([t.form for t in words], [t.upos for t in words], layers, width)


def label_vocabulary(corpus: Document) -> tuple[str, ...]:
    labels = {label for s in corpus for t in s.tokens for _, label in t.deps}
    return (UNK_LABEL,) + tuple(sorted(labels))


def gold_cells(s: Sentence, params: PredictorParams) -> list[tuple[int, int, int]]:
    if s.empty_nodes:
        raise EUDError("EMPTY_NODES_PRESENT", "training sentences must be collapsed", node=s.empty_nodes[0].id)
    return [(e.dep.index, e.head.index, params.label_index(e.label)) for e in graph_of(s).edges()]


def _examples(corpus: Document, params: PredictorParams) -> list[Example]:
    out = []
    for k, s in enumerate(corpus, start=1):
        try:
            out.append(Example(sentence_stack(s, params), gold_cells(s, params)))
        except EUDError as exc:
            raise exc.located(sentence=k) from None
    return out


def train_toy(corpus: Document, hyper: Hyper = Hyper(), params: Optional[PredictorParams] = None) -> TrainResult:
    """Train on ``corpus`` (gold DEPS, no empty nodes), one Adam step per sentence.

    The per-epoch loss log holds the mean sentence loss of each epoch.
    """
    if not corpus.sentences:
        raise EUDError("EMPTY_CORPUS", "no training sentences")
    rng = np.random.default_rng(hyper.seed)
    if params is None:
        params = init_params(
            label_vocabulary(corpus),
            hyper.layers,
            hyper.width,
            hyper.hidden,
            hyper.arc_size,
            hyper.label_size,
            hyper.window,
            rng,
        )
    else:
        params = params.copy()
    examples = _examples(corpus, params)
    opt = Adam(params, hyper.lr, hyper.beta1, hyper.beta2, hyper.eps)
    weights = (hyper.w_arc, hyper.w_label)
    result = TrainResult(params)
    for epoch in range(hyper.epochs):
        total = 0.0
        for idx in rng.permutation(len(examples)):
            ex = examples[idx]
            value, grads = loss_and_grads(params, ex.stack, ex.cells, weights)
            opt.step(params, grads)
            total += value
        result.losses.append(total / len(examples))
        logger.debug("epoch %d loss %.6f", epoch + 1, result.losses[-1])
    return result


def predict_graph(params: PredictorParams, s: Sentence, threshold: float = 0.5) -> EnhancedGraph:
    words = [t for t in s.tokens if t.id.is_surface]
    hidden = encode(sentence_stack(s, params), params)
    scores = arc_scores(hidden, params)
    labels = label_scores(hidden, params, decode_arcs(scores, threshold))
    g = decode_graph(scores, labels, threshold)
    return EnhancedGraph([t.id for t in words], g.edges())


def predict_sentence(params: PredictorParams, s: Sentence, threshold: float = 0.5) -> Sentence:
    """Replace DEPS with predicted edges; collapsed ``A>B`` labels are expanded."""
    base = Sentence(s.comments, tuple(t for t in s.tokens if not t.id.is_empty))
    return expand_empty_nodes(apply_graph(base, predict_graph(params, base, threshold)))


def predict_document(params: PredictorParams, doc: Document, threshold: float = 0.5) -> Document:
    return Document(tuple(predict_sentence(params, s, threshold) for s in doc))


@dataclass(frozen=True)
class ToyReport:
    arc_precision: float
    arc_recall: float
    arc_f1: float
    labeled_f1: float
    label_accuracy_gold: float
    label_accuracy_predicted: float


def _f1(correct, system, gold):
    p = correct / system if system else 1.0
    r = correct / gold if gold else 1.0
    return p, r, (0.0 if p + r == 0 else 2 * p * r / (p + r))


def evaluate_toy(params: PredictorParams, corpus: Document, threshold: float = 0.5) -> ToyReport:
    """Unlabelled/labelled arc scores plus label accuracy on gold and on predicted arcs."""
    arc_ok = lab_ok = sys_n = gold_n = 0
    gold_lab_ok = gold_lab_n = 0
    for s in corpus:
        gold = {(e.dep.index, e.head.index): e.label for e in graph_of(s).edges()}
        hidden = encode(sentence_stack(s, params), params)
        scores = arc_scores(hidden, params)
        pred_pairs = decode_arcs(scores, threshold)
        pred = label_scores(hidden, params, pred_pairs).predicted()
        on_gold = label_scores(hidden, params, list(gold)).predicted()
        sys_n += len(pred)
        gold_n += len(gold)
        for pair, label in pred.items():
            if pair in gold:
                arc_ok += 1
                lab_ok += label == gold[pair]
        for pair, label in gold.items():
            gold_lab_n += 1
            gold_lab_ok += on_gold[pair] == label
    p, r, f = _f1(arc_ok, sys_n, gold_n)
    return ToyReport(
        arc_precision=p,
        arc_recall=r,
        arc_f1=f,
        labeled_f1=_f1(lab_ok, sys_n, gold_n)[2],
        label_accuracy_gold=gold_lab_ok / gold_lab_n if gold_lab_n else 1.0,
        label_accuracy_predicted=lab_ok / arc_ok if arc_ok else 1.0,
    )
