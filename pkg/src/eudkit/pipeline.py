"""Document-level composition: collapse -> merge -> rules -> expand."""

from __future__ import annotations

from typing import Iterable

from .conllu import Document, Sentence
from .errors import EUDError
from .graph import apply_graph, collapse_empty_nodes, expand_empty_nodes, graph_of, tree_of
from .merge import MergeOptions, merge
from .metrics import check_alignment
from .rules import RuleConfig, expand_case_labels, prune_function_word_edges

RULE_NAMES = ("case", "funcword")


def _each(doc: Document, fn) -> Document:
    out = []
    for k, s in enumerate(doc.sentences, start=1):
        try:
            out.append(fn(s))
        except EUDError as exc:
            raise exc.located(sentence=k) from None
    return Document(tuple(out))


def collapse_document(doc: Document) -> Document:
    return _each(doc, collapse_empty_nodes)


def expand_document(doc: Document) -> Document:
    return _each(doc, expand_empty_nodes)


def merge_sentence(tree_sent: Sentence, graph_sent: Sentence, options: MergeOptions = MergeOptions()) -> Sentence:
    """Merge the tree of ``tree_sent`` with the DEPS of ``graph_sent``.

    The result is ``tree_sent`` (all empty nodes removed) with the merged
    graph in DEPS.
    """
    graph_sent = collapse_empty_nodes(graph_sent)
    base = Sentence(tree_sent.comments, tuple(t for t in tree_sent.tokens if not t.id.is_empty))
    merged = merge(tree_of(base), graph_of(graph_sent), options)
    return apply_graph(base, merged)


def merge_documents(trees: Document, graphs: Document, options: MergeOptions = MergeOptions()) -> Document:
    check_alignment(trees, graphs)
    out = []
    for k, (ts, gs) in enumerate(zip(trees.sentences, graphs.sentences), start=1):
        try:
            out.append(merge_sentence(ts, gs, options))
        except EUDError as exc:
            raise exc.located(sentence=k) from None
    return Document(tuple(out))


def postprocess_sentence(s: Sentence, cfg: RuleConfig, rules: Iterable[str] = RULE_NAMES) -> Sentence:
    """Apply Rule 1 then Rule 2, whatever order ``rules`` lists them in."""
    rules = set(rules)
    unknown = rules - set(RULE_NAMES)
    if unknown:
        raise ValueError(f"unknown rules: {sorted(unknown)}")
    g = graph_of(s)
    if "case" in rules:
        g = expand_case_labels(s, g, cfg)
    if "funcword" in rules:
        g = prune_function_word_edges(s, g, cfg)
    return apply_graph(s, g)


def postprocess_document(
    doc: Document,
    cfg: RuleConfig,
    rules: Iterable[str] = RULE_NAMES,
    expand_first: bool = False,
) -> Document:
    rules = tuple(rules)

    def step(s: Sentence) -> Sentence:
        if expand_first:
            s = expand_empty_nodes(s)
        return postprocess_sentence(s, cfg, rules)

    return _each(doc, step)


def run_pipeline(
    trees: Document,
    graphs: Document,
    cfg: RuleConfig,
    options: MergeOptions = MergeOptions(),
    rules: Iterable[str] = RULE_NAMES,
) -> Document:
    """merge -> Rule 1 -> Rule 2 -> expand, the full post-processing path."""
    merged = merge_documents(trees, graphs, options)
    return expand_document(postprocess_document(merged, cfg, rules))
