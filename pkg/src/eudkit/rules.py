"""Post-processing of merged graphs.

Rule 1 appends case information to modifier (and, for some languages,
conjunct) labels. Rule 2 strips enhanced edges entering function words
that carry a relation other than the word's own function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Mapping, Optional

from .conllu import NodeId, Sentence
from .graph import COLLAPSE_SEPARATOR, Edge, EnhancedGraph
from .metrics import universal_part

KNOWN_LANGUAGES = frozenset(
    {"ar", "bg", "cs", "en", "et", "fi", "fr", "it", "lt", "lv", "nl", "pl", "ru", "sk", "sv", "ta", "uk"}
)
# languages whose enhanced modifiers carry morphological case (obl:gen, nmod:ins, ...)
CASE_FEATURE_LANGUAGES = frozenset({"ar", "bg", "cs", "et", "fi", "lt", "lv", "pl", "ru", "sk", "ta", "uk"})

MARKER_CHOICES = ("nearest", "first", "last")


@dataclass(frozen=True)
class RuleConfig:
    language: str = "en"
    conj_languages: frozenset = frozenset({"en", "it", "nl", "sv"})
    modifier_relations: frozenset = frozenset({"nmod", "obl", "acl", "advcl"})
    adposition_relations: frozenset = frozenset({"case", "mark"})
    use_case_feature: Optional[bool] = None
    function_labels: frozenset = frozenset({"mark", "punct", "root", "case", "det", "cc", "cop", "aux", "ref"})
    marker_choice: str = "nearest"
    combine_case_feature: bool = False
    # "root" in function_labels names the root node, not the deprel of the
    # sentence's head word (which legitimately gets more enhanced heads)
    root_as_node: bool = True

    def __post_init__(self):
        for name in ("conj_languages", "modifier_relations", "adposition_relations", "function_labels"):
            value = frozenset(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must be non-empty")
            object.__setattr__(self, name, value)
        unknown = self.conj_languages - KNOWN_LANGUAGES
        if unknown:
            raise ValueError(f"unknown conj languages: {sorted(unknown)}")
        if self.marker_choice not in MARKER_CHOICES:
            raise ValueError(f"marker_choice must be one of {MARKER_CHOICES}")
        if self.use_case_feature is None:
            object.__setattr__(self, "use_case_feature", self.language in CASE_FEATURE_LANGUAGES)


_SET_FIELDS = {"conj_languages", "modifier_relations", "adposition_relations", "function_labels"}


def rule_config(language: str, overrides: Optional[Mapping] = None) -> RuleConfig:
    """Build a RuleConfig for ``language`` from a JSON-style ``rules`` table.

    ``overrides`` maps ``"*"`` and language codes to partial field dicts;
    the language entry wins over ``"*"``.
    """
    values: dict = {"language": language}
    names = {f.name for f in fields(RuleConfig)}
    for key in ("*", language):
        for name, value in dict((overrides or {}).get(key, {})).items():
            if name not in names:
                raise ValueError(f"unknown rule option {name!r}")
            values[name] = frozenset(value) if name in _SET_FIELDS else value
    return RuleConfig(**values)


def load_rule_config(path, language: str) -> RuleConfig:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    return rule_config(language, data.get("rules", {}))


def _lemma(s: Sentence, node: NodeId) -> str:
    tok = s.get(node)
    return (tok.lemma or tok.form).lower()


def case_marker_of(
    s: Sentence,
    node: NodeId,
    relations: Iterable[str],
    graph: Optional[EnhancedGraph] = None,
    choice: str = "nearest",
) -> Optional[str]:
    """Lemma of the case/mark/cc dependent of ``node`` that supplies a sublabel.

    Dependents come from the tree columns and, if given, from ``graph`` (a
    propagated conjunct such as "about" in "On or about" is attached to the
    nominal only there). ``nearest`` picks the closest dependent, ties going
    to the later one. Lemmas of ``fixed`` dependents are appended with ``_``.
    """
    relations = set(relations)
    candidates: set[NodeId] = set()
    for tok in s.words:
        if tok.head == node and universal_part(tok.deprel) in relations:
            candidates.add(tok.id)
    if graph is not None:
        for e in graph.outgoing(node):
            if e.dep.is_surface and universal_part(e.label) in relations:
                candidates.add(e.dep)
    if not candidates:
        return None
    if choice == "first":
        chosen = min(candidates)
    elif choice == "last":
        chosen = max(candidates)
    else:
        chosen = min(candidates, key=lambda c: (abs(c.index - node.index), -c.index))
    parts = [_lemma(s, chosen)]
    parts += [_lemma(s, t.id) for t in s.words if t.head == chosen and universal_part(t.deprel) == "fixed"]
    return "_".join(parts)


def _case_feature(s: Sentence, node: NodeId) -> Optional[str]:
    value = s.get(node).feat("Case")
    return value.lower() if value else None


def expand_case_labels(s: Sentence, g: EnhancedGraph, cfg: RuleConfig) -> EnhancedGraph:
    """Rule 1: extend bare modifier/conjunct labels with case information."""
    out = []
    for e in g.edges():
        label = e.label
        if e.dep.is_surface and ":" not in label and COLLAPSE_SEPARATOR not in label:
            sub = None
            if label in cfg.modifier_relations:
                marker = case_marker_of(s, e.dep, cfg.adposition_relations, g, cfg.marker_choice)
                case = _case_feature(s, e.dep) if cfg.use_case_feature else None
                if marker and case and cfg.combine_case_feature:
                    sub = f"{marker}:{case}"
                else:
                    sub = marker or case
            elif label == "conj" and cfg.language in cfg.conj_languages:
                sub = case_marker_of(s, e.dep, {"cc"}, g, cfg.marker_choice)
            if sub:
                label = f"{label}:{sub}"
        out.append(Edge(e.head, e.dep, label) if label != e.label else e)
    return g.with_edges(out)


def _relation(label: str) -> str:
    # the relation entering the dependent itself: last segment of a collapsed path
    return universal_part(label.split(COLLAPSE_SEPARATOR)[-1])


def function_label(s: Sentence, g: EnhancedGraph, node: NodeId, cfg: RuleConfig) -> Optional[str]:
    tok = s.get(node)
    rel = universal_part(tok.deprel) if tok.deprel else ""
    if rel in cfg.function_labels and not (rel == "root" and cfg.root_as_node):
        return rel
    if "ref" in cfg.function_labels and any(_relation(e.label) == "ref" for e in g.incoming(node)):
        return "ref"
    return None


def prune_function_word_edges(s: Sentence, g: EnhancedGraph, cfg: RuleConfig) -> EnhancedGraph:
    """Rule 2: a function word keeps only incoming edges with its own relation."""
    removed: set[tuple[NodeId, NodeId]] = set()
    restored: list[Edge] = []
    for tok in s.words:
        func = function_label(s, g, tok.id, cfg)
        if func is None:
            continue
        incoming = g.incoming(tok.id)
        drop = [e for e in incoming if _relation(e.label) != func]
        if not drop:
            continue
        removed.update(e.pair for e in drop)
        if len(drop) == len(incoming) and tok.head is not None and tok.deprel:
            restored.append(Edge(tok.head, tok.id, tok.deprel))
    if not removed:
        return g
    kept = [e for e in g.edges() if e.pair not in removed]
    return g.with_edges(kept + restored)
