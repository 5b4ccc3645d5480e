"""Fusing a predicted dependency tree with a predicted enhanced graph."""

from __future__ import annotations

from dataclasses import dataclass

from .conllu import NodeId
from .errors import EUDError
from .graph import DependencyTree, Edge, EnhancedGraph, edge_order, would_cycle


@dataclass(frozen=True)
class MergeOptions:
    """``prefer_graph_label``: on a (head, dep) pair predicted by both the
    tree and the graph, keep the graph's label (e.g. a collapsed ``conj>obj``)
    instead of the tree's."""

    acl_relcl_label: str = "acl:relcl"
    prefer_graph_label: bool = False

    def __post_init__(self):
        if not self.acl_relcl_label:
            raise ValueError("acl_relcl_label must be non-empty")


def merge_stages(tree: DependencyTree, graph: EnhancedGraph, options: MergeOptions = MergeOptions()):
    """Run the three merge steps and return the edge dict after each one.

    Each stage maps ``(head, dep)`` to a label. The last stage is the result.
    """
    tree_nodes = set(tree.nodes)
    for node in graph.nodes:
        if node not in tree_nodes:
            raise EUDError("NODE_SET_MISMATCH", "graph node not present in tree", node=node)
    for e in tree.edges:
        if e.dep not in tree_nodes or not (e.head.is_root or e.head in tree_nodes):
            raise EUDError("NODE_SET_MISMATCH", "tree edge outside its node set", node=e.dep)

    relcl = options.acl_relcl_label
    tree_edges = edge_order(tree.edges)

    # step 1: the tree without relative-clause edges
    labels: dict[tuple[NodeId, NodeId], str] = {
        e.pair: e.label for e in tree_edges if e.label != relcl
    }
    step1 = dict(labels)

    # step 2: graph edges that are new pairs and keep the set acyclic
    current = [Edge(h, d, lab) for (h, d), lab in labels.items()]
    for e in graph.edges():
        if e.pair in labels:
            if options.prefer_graph_label and e.pair in step1:
                labels[e.pair] = e.label
            continue
        if would_cycle(current, e):
            continue
        labels[e.pair] = e.label
        current.append(e)
    step2 = dict(labels)

    # step 3: relative-clause tree edges, cycles allowed
    for e in tree_edges:
        if e.label != relcl:
            continue
        if e.pair in labels and options.prefer_graph_label:
            continue
        labels[e.pair] = e.label
    return step1, step2, EnhancedGraph.from_pairs(tree.nodes, labels)


def merge(tree: DependencyTree, graph: EnhancedGraph, options: MergeOptions = MergeOptions()) -> EnhancedGraph:
    return merge_stages(tree, graph, options)[2]
