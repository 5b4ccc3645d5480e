"""Tree and enhanced-graph views of a sentence, and empty-node collapsing."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Iterator, Optional

from .conllu import ROOT, Diagnostic, NodeId, Sentence, Token
from .errors import EUDError

logger = logging.getLogger(__name__)

COLLAPSE_SEPARATOR = ">"


@dataclass(frozen=True)
class Edge:
    head: NodeId
    dep: NodeId
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError(f"edge {self.head}->{self.dep} has an empty label")
        if self.head == self.dep:
            raise ValueError(f"self-loop on {self.dep}")
        if self.dep.is_root:
            raise ValueError("the root cannot be a dependent")

    @property
    def pair(self) -> tuple[NodeId, NodeId]:
        return (self.head, self.dep)

    def sort_key(self):
        return (self.dep.sort_key(), self.head.sort_key(), self.label)

    def __repr__(self):
        return f"Edge({self.head}, {self.dep}, {self.label!r})"


def edge_order(edges: Iterable[Edge]) -> list[Edge]:
    """Canonical order: by dependent, then head, then label."""
    return sorted(edges, key=Edge.sort_key)


@dataclass(frozen=True)
class DependencyTree:
    node_count: int
    edges: frozenset[Edge]

    @cached_property
    def _by_dep(self) -> dict[NodeId, Edge]:
        return {e.dep: e for e in self.edges}

    def head_edge(self, dep: NodeId) -> Optional[Edge]:
        return self._by_dep.get(dep)

    @property
    def nodes(self) -> list[NodeId]:
        return [NodeId(i) for i in range(1, self.node_count + 1)]


class EnhancedGraph:
    """Multi-headed labelled graph with at most one edge per (head, dep).

    ``nodes`` lists the sentence's nodes (words and empty nodes); the root is
    implicit and may only appear as a head.
    """

    def __init__(self, nodes: Iterable[NodeId], edges: Iterable[Edge] = ()):
        self.nodes = tuple(sorted(set(nodes)))
        self._labels: dict[tuple[NodeId, NodeId], str] = {}
        self._in: dict[NodeId, list[Edge]] = defaultdict(list)
        self._out: dict[NodeId, list[Edge]] = defaultdict(list)
        for e in edge_order(edges):
            if e.pair in self._labels:
                raise ValueError(f"two edges for pair {e.head}->{e.dep}")
            self._labels[e.pair] = e.label
            self._in[e.dep].append(e)
            self._out[e.head].append(e)

    @classmethod
    def from_pairs(cls, nodes, labels: dict[tuple[NodeId, NodeId], str]) -> "EnhancedGraph":
        return cls(nodes, (Edge(h, d, lab) for (h, d), lab in labels.items()))

    def edges(self) -> list[Edge]:
        return edge_order(Edge(h, d, lab) for (h, d), lab in self._labels.items())

    def label(self, head: NodeId, dep: NodeId) -> Optional[str]:
        return self._labels.get((head, dep))

    def has_pair(self, head: NodeId, dep: NodeId) -> bool:
        return (head, dep) in self._labels

    def pairs(self) -> set[tuple[NodeId, NodeId]]:
        return set(self._labels)

    def incoming(self, dep: NodeId) -> list[Edge]:
        return list(self._in.get(dep, ()))

    def outgoing(self, head: NodeId) -> list[Edge]:
        return list(self._out.get(head, ()))

    def with_edges(self, edges: Iterable[Edge]) -> "EnhancedGraph":
        return EnhancedGraph(self.nodes, edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges())

    def __len__(self):
        return len(self._labels)

    def __eq__(self, other):
        if not isinstance(other, EnhancedGraph):
            return NotImplemented
        return self.nodes == other.nodes and self._labels == other._labels

    def __repr__(self):
        body = ", ".join(f"{e.head}->{e.dep}:{e.label}" for e in self.edges())
        return f"EnhancedGraph([{body}])"


# ---------------------------------------------------------------------------
# sentence <-> structures


def tree_of(s: Sentence) -> DependencyTree:
    edges = []
    for tok in s.words:
        if tok.head is None or not tok.deprel:
            raise EUDError("MISSING_HEAD", "word without HEAD/DEPREL", node=tok.id)
        edges.append(Edge(tok.head, tok.id, tok.deprel))
    roots = [e for e in edges if e.head.is_root]
    if len(roots) > 1:
        raise EUDError("MULTIPLE_ROOTS", f"{len(roots)} words attached to 0", node=roots[1].dep)
    heads = {e.dep: e.head for e in edges}
    for start in heads:
        seen = set()
        node = start
        while not node.is_root:
            if node in seen:
                raise EUDError("CYCLE_IN_TREE", "HEAD column contains a cycle", node=node)
            seen.add(node)
            node = heads[node]
    return DependencyTree(s.word_count, frozenset(edges))


def graph_of(s: Sentence, diagnostics: Optional[list[Diagnostic]] = None) -> EnhancedGraph:
    """Read the DEPS column.

    CoNLL-U allows two relations between the same pair of nodes; the graph
    keeps only the lexicographically smallest label and reports the rest.
    """
    labels: dict[tuple[NodeId, NodeId], str] = {}
    for tok in s.tokens:
        for head, label in tok.deps:
            key = (head, tok.id)
            if key in labels:
                kept = min(labels[key], label)
                _report(diagnostics, "DUPLICATE_PAIR", tok.id, f"{head}->{tok.id}: kept {kept!r} of {labels[key]!r}, {label!r}")
                labels[key] = kept
            else:
                labels[key] = label
    return EnhancedGraph.from_pairs(s.node_ids(), labels)


def apply_graph(s: Sentence, g: EnhancedGraph) -> Sentence:
    """Return a copy of ``s`` whose DEPS columns encode ``g``."""
    known = set(s.node_ids())
    for node in g.nodes:
        if node not in known:
            raise EUDError("UNKNOWN_NODE", "graph node missing from sentence", node=node)
    deps: dict[NodeId, list[tuple[NodeId, str]]] = defaultdict(list)
    for e in g.edges():
        if e.dep not in known:
            raise EUDError("UNKNOWN_NODE", "edge dependent missing from sentence", node=e.dep)
        if not e.head.is_root and e.head not in known:
            raise EUDError("UNKNOWN_NODE", "edge head missing from sentence", node=e.head)
        deps[e.dep].append((e.head, e.label))
    tokens = [t if t.id.is_range else t.with_deps(deps.get(t.id, ())) for t in s.tokens]
    return Sentence(s.comments, tuple(tokens))


# ---------------------------------------------------------------------------
# cycles


def would_cycle(edges: Iterable[Edge], e: Edge) -> bool:
    """True iff adding ``e`` closes a directed cycle, i.e. ``e.dep`` reaches ``e.head``."""
    if e.head == e.dep:
        return True
    if e.head.is_root:
        return False
    children: dict[NodeId, list[NodeId]] = defaultdict(list)
    for x in edges:
        children[x.head].append(x.dep)
    stack = [e.dep]
    seen = {e.dep}
    while stack:
        node = stack.pop()
        for child in children.get(node, ()):
            if child == e.head:
                return True
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return False


# ---------------------------------------------------------------------------
# empty nodes


def _report(diagnostics, code, node, message):
    logger.debug("%s at %s: %s", code, node, message)
    if diagnostics is not None:
        diagnostics.append(Diagnostic(code, node, message))


def collapse_empty_nodes(
    s: Sentence,
    diagnostics: Optional[list[Diagnostic]] = None,
    strict: bool = True,
) -> Sentence:
    """Replace every path ``h -L1-> E -L2-> d`` through empty nodes by ``h -L1>L2-> d``.

    Chains of empty nodes collapse transitively. Empty-node tokens are
    dropped; HEAD/DEPREL columns are left untouched.

    With ``strict=False`` orphan empty nodes and cycles among empty nodes
    are reported as diagnostics instead of raised: dead ends contribute no
    edge and only simple paths are followed.
    """
    empties = [t.id for t in s.empty_nodes]
    if not empties:
        return s
    g = graph_of(s, diagnostics)
    empty_set = set(empties)

    def fail(code, node, message):
        if strict:
            raise EUDError(code, message, node=node)
        _report(diagnostics, code, node, message)

    order = TopologicalSorter()
    for node in empties:
        incoming = g.incoming(node)
        outgoing = g.outgoing(node)
        if not incoming or not outgoing:
            side = "incoming" if not incoming else "outgoing"
            fail("ORPHAN_EMPTY_NODE", node, f"empty node has no {side} enhanced edge")
        order.add(node, *(e.head for e in incoming if e.head in empty_set))
    try:
        topo = list(order.static_order())
    except CycleError as exc:
        fail("EMPTY_NODE_CYCLE", exc.args[1][0], "cycle among empty nodes")
        topo = sorted(empties)

    def paths_into(node, visited):
        # label paths reaching ``node`` from a non-empty head along simple paths
        out = []
        for e in g.incoming(node):
            if e.head not in empty_set:
                out.append((e.head, e.label))
            elif e.head not in visited:
                out.extend((h, p + COLLAPSE_SEPARATOR + e.label) for h, p in paths_into(e.head, visited | {e.head}))
        return out

    labels: dict[tuple[NodeId, NodeId], str] = {}

    def put(head, dep, label):
        if head == dep:
            _report(diagnostics, "COLLAPSED_SELF_LOOP", dep, f"dropped {label!r}")
            return
        key = (head, dep)
        if key in labels and labels[key] != label:
            kept = min(labels[key], label)
            _report(diagnostics, "DUPLICATE_PAIR", dep, f"{head}->{dep}: kept {kept!r} of {labels[key]!r}, {label!r}")
            labels[key] = kept
        else:
            labels[key] = label

    for e in g.edges():
        if e.head not in empty_set and e.dep not in empty_set:
            put(e.head, e.dep, e.label)
    for node in topo:
        for e in g.outgoing(node):
            if e.dep in empty_set:
                continue
            for head, path in paths_into(node, {node}):
                put(head, e.dep, path + COLLAPSE_SEPARATOR + e.label)

    kept_tokens = tuple(t for t in s.tokens if not t.id.is_empty)
    reduced = Sentence(s.comments, kept_tokens)
    return apply_graph(reduced, EnhancedGraph.from_pairs(reduced.node_ids(), labels))


def expand_empty_nodes(s: Sentence) -> Sentence:
    """Rewrite ``A>B>C`` labels as chains through fresh empty nodes ``n.1, n.2, ...``.

    Edges that share a head and a label prefix share the empty nodes on that
    prefix, so the dependents of one elided predicate hang off one node.
    """
    g = graph_of(s)
    if not any(COLLAPSE_SEPARATOR in e.label for e in g.edges()):
        return s
    n = s.word_count
    used = {t.id.sub for t in s.empty_nodes if t.id.index == n}
    next_sub = 1
    created: dict[tuple[NodeId, tuple[str, ...]], NodeId] = {}
    new_tokens: list[Token] = []
    edges: list[Edge] = []

    def fresh() -> NodeId:
        nonlocal next_sub
        while next_sub in used:
            next_sub += 1
        node = NodeId(n, next_sub)
        used.add(next_sub)
        new_tokens.append(Token(id=node))
        return node

    for e in g.edges():
        parts = e.label.split(COLLAPSE_SEPARATOR)
        if len(parts) == 1:
            edges.append(e)
            continue
        if any(not p for p in parts):
            raise EUDError("BAD_LABEL", f"empty segment in {e.label!r}", node=e.dep)
        current = e.head
        for j in range(len(parts) - 1):
            key = (e.head, tuple(parts[: j + 1]))
            if key not in created:
                created[key] = fresh()
                edges.append(Edge(current, created[key], parts[j]))
            current = created[key]
        edges.append(Edge(current, e.dep, parts[-1]))

    grown = s.with_tokens(list(s.tokens) + new_tokens)
    return apply_graph(grown, EnhancedGraph(grown.node_ids(), edges))
