import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eudkit import data
from eudkit.conllu import NodeId, read_conllu
from eudkit.errors import EUDError
from eudkit.graph import DependencyTree, Edge, EnhancedGraph, graph_of, tree_of
from eudkit.merge import MergeOptions, merge, merge_stages

from merge_oracle import as_ints, oracle_merge, random_instance, to_objects

N = NodeId


def load(fig):
    paths = data.fixture_paths(fig)
    return tree_of(read_conllu(paths["tree"]).sentences[0]), graph_of(read_conllu(paths["graph"]).sentences[0])


def triples(g):
    return {(e.head.index, e.dep.index, e.label) for e in g.edges()}


def test_fig1_adds_propagated_edges():
    tree, graph = load("fig1")
    out = merge(tree, graph)
    assert len(out) == 9
    assert {(5, 2, "nsubj"), (5, 6, "obj")} <= triples(out)


def test_fig4_keeps_cycle_and_tree_obj():
    tree, graph = load("fig4")
    out = triples(merge(tree, graph))
    assert {(2, 3, "ref"), (5, 2, "obj"), (2, 5, "acl:relcl"), (5, 3, "obj")} <= out


def test_empty_graph_gives_tree():
    tree, _ = load("fig1")
    out = merge(tree, EnhancedGraph(tree.nodes))
    assert triples(out) == {(e.head.index, e.dep.index, e.label) for e in tree.edges}


def test_prefer_graph_label_overwrites_tree_label():
    tree = DependencyTree(2, (Edge(N(0), N(1), "root"), Edge(N(1), N(2), "obj")))
    graph = EnhancedGraph([N(1), N(2)], [Edge(N(1), N(2), "conj>obj")])
    assert merge(tree, graph).label(N(1), N(2)) == "obj"
    assert merge(tree, graph, MergeOptions(prefer_graph_label=True)).label(N(1), N(2)) == "conj>obj"


def test_custom_relcl_label():
    tree = DependencyTree(2, (Edge(N(0), N(1), "root"), Edge(N(1), N(2), "rel")))
    graph = EnhancedGraph([N(1), N(2)], [Edge(N(2), N(1), "obj")])
    default = merge(tree, graph)
    assert default.label(N(2), N(1)) is None
    custom = merge(tree, graph, MergeOptions(acl_relcl_label="rel"))
    assert custom.label(N(2), N(1)) == "obj" and custom.label(N(1), N(2)) == "rel"


def test_node_set_mismatch():
    tree = DependencyTree(1, (Edge(N(0), N(1), "root"),))
    graph = EnhancedGraph([N(1), N(2)], [Edge(N(1), N(2), "obj")])
    with pytest.raises(EUDError) as exc:
        merge(tree, graph)
    assert exc.value.code == "NODE_SET_MISMATCH"


def test_options_validation():
    with pytest.raises(ValueError):
        MergeOptions(acl_relcl_label="")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_merge_equals_literal_oracle(seed, prefer):
    n, tree, graph = random_instance(random.Random(seed))
    t, g = to_objects(n, tree, graph)
    _, step2, final = merge_stages(t, g, MergeOptions(prefer_graph_label=prefer))
    want2, want = oracle_merge(tree, graph, prefer_graph_label=prefer)
    assert as_ints(step2) == want2
    assert {(e.head.index, e.dep.index): e.label for e in final.edges()} == want


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_merge_structural_properties(seed):
    n, tree, graph = random_instance(random.Random(seed))
    t, g = to_objects(n, tree, graph)
    _, step2, final = merge_stages(t, g)
    assert nx.is_directed_acyclic_graph(nx.DiGraph(list(as_ints(step2))))
    dg = nx.DiGraph()
    for e in final.edges():
        dg.add_edge(e.head.index, e.dep.index, label=e.label)
    for cycle in nx.simple_cycles(dg):
        labels = [dg.edges[cycle[k], cycle[(k + 1) % len(cycle)]]["label"] for k in range(len(cycle))]
        assert "acl:relcl" in labels
    pairs = [e.pair for e in final.edges()]
    assert len(pairs) == len(set(pairs))
    assert all(final.incoming(node) for node in t.nodes)
    assert merge(t, g) == final
