import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eudkit import data
from eudkit.conllu import NodeId, Sentence, Token, read_conllu
from eudkit.graph import Edge, EnhancedGraph, graph_of, tree_of
from eudkit.merge import merge
from eudkit.metrics import universal_part
from eudkit.rules import (
    RuleConfig,
    case_marker_of,
    expand_case_labels,
    function_label,
    load_rule_config,
    prune_function_word_edges,
    rule_config,
)

from helpers import random_sentence

N = NodeId
EN = RuleConfig("en")


def first(name) -> Sentence:
    return read_conllu(data.path(name)).sentences[0]


def merged(fig):
    paths = data.fixture_paths(fig)
    tree_sent = read_conllu(paths["tree"]).sentences[0]
    g = merge(tree_of(tree_sent), graph_of(read_conllu(paths["graph"]).sentences[0]))
    return tree_sent, g


def triples(g):
    return {(e.head.index, e.dep.index, e.label) for e in g.edges()}


def word(i, form, head, deprel, lemma=None, feats=()):
    return Token(N(i), form, lemma or form.lower(), "X", feats=feats, head=N(head), deprel=deprel)


def test_case_marker_fig5_nearest():
    s, g = merged("fig5")
    assert case_marker_of(s, N(4), {"case", "mark"}, g) == "about"
    # tree-only view: "about" hangs off "On", so only "On" is a case child
    assert case_marker_of(s, N(4), {"case", "mark"}) == "on"


def test_case_marker_choices():
    s, g = merged("fig5")
    assert case_marker_of(s, N(4), {"case"}, g, choice="first") == "on"
    assert case_marker_of(s, N(4), {"case"}, g, choice="last") == "about"


def test_case_marker_absent():
    s, g = merged("fig5")
    assert case_marker_of(s, N(8), {"case", "mark"}, g) is None


def test_case_marker_fixed_expression():
    s = read_conllu(data.path("roundtrip.conllu")).sentences[1]
    assert case_marker_of(s, N(3), {"case", "mark"}) == "because_of"


def test_case_marker_tie_goes_to_later_token():
    s = Sentence(
        (),
        (
            word(1, "in", 2, "case"),
            word(2, "box", 0, "root"),
            word(3, "of", 2, "case"),
        ),
    )
    assert case_marker_of(s, N(2), {"case"}) == "of"


def test_rule1_fig5():
    s, g = merged("fig5")
    out = triples(expand_case_labels(s, g, EN))
    assert (1, 3, "conj:or") in out
    assert (8, 4, "obl:about") in out


def test_rule1_no_marker_no_case_unchanged():
    s = Sentence((), (word(1, "runs", 0, "root"), word(2, "fast", 1, "obl")))
    g = EnhancedGraph(s.node_ids(), [Edge(N(0), N(1), "root"), Edge(N(1), N(2), "obl")])
    assert expand_case_labels(s, g, RuleConfig("cs")) == g


def test_rule1_case_feature():
    s = Sentence((), (word(1, "dům", 0, "root"), word(2, "otce", 1, "nmod", feats=(("Case", "Gen"),))))
    g = EnhancedGraph(s.node_ids(), [Edge(N(0), N(1), "root"), Edge(N(1), N(2), "nmod")])
    cfg = RuleConfig("cs")
    assert cfg.use_case_feature
    assert expand_case_labels(s, g, cfg).label(N(1), N(2)) == "nmod:gen"
    assert expand_case_labels(s, g, RuleConfig("en")).label(N(1), N(2)) == "nmod"
    assert expand_case_labels(s, g, RuleConfig("en", use_case_feature=True)).label(N(1), N(2)) == "nmod:gen"


def test_rule1_adposition_wins_over_case_unless_combined():
    s = Sentence(
        (),
        (
            word(1, "stojí", 0, "root"),
            word(2, "pod", 3, "case"),
            word(3, "stolem", 1, "obl", feats=(("Case", "Ins"),)),
        ),
    )
    g = EnhancedGraph(s.node_ids(), [Edge(N(0), N(1), "root"), Edge(N(3), N(2), "case"), Edge(N(1), N(3), "obl")])
    assert expand_case_labels(s, g, RuleConfig("cs")).label(N(1), N(3)) == "obl:pod"
    combined = RuleConfig("cs", combine_case_feature=True)
    assert expand_case_labels(s, g, combined).label(N(1), N(3)) == "obl:pod:ins"


def test_rule1_skips_sublabelled_and_collapsed():
    s = Sentence(
        (),
        (word(1, "in", 2, "case"), word(2, "box", 0, "root"), word(3, "x", 2, "nmod")),
    )
    g = EnhancedGraph(
        s.node_ids(),
        [Edge(N(0), N(2), "root"), Edge(N(2), N(1), "case"), Edge(N(0), N(1), "obl:on"), Edge(N(1), N(2), "conj>obl")],
    )
    assert expand_case_labels(s, g, EN) == g


def test_rule1_conj_language_gate():
    s, g = merged("fig5")
    assert (1, 3, "conj") in triples(expand_case_labels(s, g, RuleConfig("de")))


def test_rule2_function_word_drops_foreign_edge():
    s = Sentence(
        (),
        (
            word(1, "we", 3, "nsubj"),
            word(2, "sing", 3, "conj"),
            word(3, "dance", 0, "root"),
            word(4, "and", 6, "cc"),
            word(5, "they", 6, "nsubj"),
            word(6, "stay", 3, "conj"),
        ),
    )
    g = EnhancedGraph(
        s.node_ids(),
        [
            Edge(N(3), N(1), "nsubj"),
            Edge(N(3), N(2), "conj"),
            Edge(N(0), N(3), "root"),
            Edge(N(6), N(4), "cc"),
            Edge(N(5), N(4), "nsubj"),
            Edge(N(6), N(5), "nsubj"),
            Edge(N(3), N(6), "conj"),
        ],
    )
    out = prune_function_word_edges(s, g, EN)
    assert triples(out) == triples(g) - {(5, 4, "nsubj")}


def test_rule2_fig4_reaches_gold():
    s, g = merged("fig4")
    out = prune_function_word_edges(s, expand_case_labels(s, g, EN), EN)
    gold = graph_of(first("fig4_gold.conllu"))
    assert (5, 3, "obj") not in triples(out)
    assert out == gold


def test_rule2_deprel_reading_of_root():
    s, g = merged("fig4")
    cfg = RuleConfig("en", root_as_node=False)
    assert function_label(s, g, N(2), cfg) == "root"
    assert (5, 2, "obj") not in triples(prune_function_word_edges(s, g, cfg))
    assert function_label(s, g, N(2), EN) is None


def test_rule2_identity_without_violations():
    s = first("fig1_gold.conllu")
    g = graph_of(s)
    assert prune_function_word_edges(s, g, EN) is g


def test_rule2_reinserts_tree_edge():
    s = Sentence((), (word(1, "the", 2, "det"), word(2, "cat", 0, "root")))
    g = EnhancedGraph(s.node_ids(), [Edge(N(0), N(2), "root"), Edge(N(2), N(1), "amod")])
    out = prune_function_word_edges(s, g, EN)
    assert triples(out) == {(0, 2, "root"), (2, 1, "det")}


def test_rule2_sublabels_do_not_shield():
    s = Sentence((), (word(1, "of", 2, "case"), word(2, "cat", 0, "root"), word(3, "x", 1, "dep")))
    g = EnhancedGraph(
        s.node_ids(),
        [Edge(N(0), N(2), "root"), Edge(N(2), N(1), "case"), Edge(N(3), N(1), "nmod:gen"), Edge(N(1), N(3), "dep")],
    )
    assert (3, 1, "nmod:gen") not in triples(prune_function_word_edges(s, g, EN))


def test_rule2_ref_from_incoming_edge():
    s, g = merged("fig4")
    assert function_label(s, g, N(3), EN) == "ref"


def test_config_from_table_and_file(tmp_path):
    table = {"*": {"marker_choice": "first"}, "cs": {"conj_languages": ["cs"], "use_case_feature": False}}
    cfg = rule_config("cs", table)
    assert cfg.marker_choice == "first"
    assert cfg.conj_languages == frozenset({"cs"})
    assert cfg.use_case_feature is False
    assert rule_config("en", table).conj_languages == EN.conj_languages
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rules": table}))
    assert load_rule_config(path, "cs") == cfg
    with pytest.raises(ValueError):
        rule_config("en", {"*": {"bogus": 1}})


@pytest.mark.parametrize(
    "kwargs",
    [{"conj_languages": []}, {"conj_languages": ["xx"]}, {"function_labels": []}, {"marker_choice": "middle"}],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        RuleConfig("en", **kwargs)


LANGS = ["en", "cs", "fi", "it", "de"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(LANGS))
def test_rule1_structure_invariance_and_idempotence(seed, lang):
    s = random_sentence(random.Random(seed))
    cfg = RuleConfig(lang)
    g = graph_of(s)
    once = expand_case_labels(s, g, cfg)
    assert once.pairs() == g.pairs()
    assert {(e.pair, universal_part(e.label)) for e in once} == {(e.pair, universal_part(e.label)) for e in g}
    assert expand_case_labels(s, once, cfg) == once


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_rule2_subset_and_idempotence(seed, root_as_node):
    s = random_sentence(random.Random(seed))
    cfg = RuleConfig("en", root_as_node=root_as_node)
    g = graph_of(s)
    once = prune_function_word_edges(s, g, cfg)
    tree_edges = {(e.head, e.dep, e.label) for e in tree_of(s).edges}
    assert {(e.head, e.dep, e.label) for e in once} <= {(e.head, e.dep, e.label) for e in g} | tree_edges
    assert all(once.incoming(t.id) for t in s.words if g.incoming(t.id))
    assert prune_function_word_edges(s, once, cfg) == once
