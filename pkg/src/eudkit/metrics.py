"""LAS, EULAS and ELAS between documents with identical tokenisation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .conllu import Document, Sentence
from .errors import EUDError
from .graph import COLLAPSE_SEPARATOR, collapse_empty_nodes


class Metric(str, Enum):
    LAS = "LAS"
    EULAS = "EULAS"
    ELAS = "ELAS"

    @classmethod
    def parse(cls, name) -> "Metric":
        if isinstance(name, Metric):
            return name
        try:
            return cls(str(name).upper())
        except ValueError:
            raise ValueError(f"unknown metric {name!r}") from None


def universal_part(label: str) -> str:
    """Strip sublabels: ``conj:or>obj:into`` -> ``conj>obj``."""
    return COLLAPSE_SEPARATOR.join(seg.split(":", 1)[0] for seg in label.split(COLLAPSE_SEPARATOR))


def _ratio(num: int, den: int) -> float:
    if den == 0:
        return 1.0 if num == 0 else 0.0
    return num / den


@dataclass(frozen=True)
class Score:
    correct: int
    system_total: int
    gold_total: int

    def __post_init__(self):
        if self.correct > min(self.system_total, self.gold_total):
            raise ValueError("correct count exceeds a total")

    @property
    def precision(self) -> float:
        return _ratio(self.correct, self.system_total)

    @property
    def recall(self) -> float:
        return _ratio(self.correct, self.gold_total)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    def __add__(self, other: "Score") -> "Score":
        return Score(
            self.correct + other.correct,
            self.system_total + other.system_total,
            self.gold_total + other.gold_total,
        )


def _tree_triples(s: Sentence) -> set[tuple]:
    return {(t.id, t.head, t.deprel) for t in s.words if t.head is not None}


def _enhanced_triples(s: Sentence, universal: bool) -> set[tuple]:
    s = collapse_empty_nodes(s, strict=False)
    out = set()
    for t in s.tokens:
        for head, label in t.deps:
            out.add((t.id, head, universal_part(label) if universal else label))
    return out


def sentence_score(gold: Sentence, system: Sentence, metric) -> Score:
    metric = Metric.parse(metric)
    if metric is Metric.LAS:
        g, s = _tree_triples(gold), _tree_triples(system)
    else:
        universal = metric is Metric.EULAS
        g, s = _enhanced_triples(gold, universal), _enhanced_triples(system, universal)
    return Score(len(g & s), len(s), len(g))


def check_alignment(gold: Document, system: Document) -> None:
    if len(gold.sentences) != len(system.sentences):
        raise EUDError(
            "SENTENCE_COUNT_MISMATCH",
            f"gold has {len(gold.sentences)} sentences, system has {len(system.sentences)}",
        )
    for k, (gs, ss) in enumerate(zip(gold.sentences, system.sentences), start=1):
        gf = [t.form for t in gs.words]
        sf = [t.form for t in ss.words]
        if gf != sf:
            raise EUDError("TOKENIZATION_MISMATCH", "word FORM sequences differ", sentence=k)


def evaluate(gold: Document, system: Document, metric) -> Score:
    """Micro-averaged score of ``system`` against ``gold``."""
    check_alignment(gold, system)
    total = Score(0, 0, 0)
    for k, (gs, ss) in enumerate(zip(gold.sentences, system.sentences), start=1):
        try:
            total = total + sentence_score(gs, ss, metric)
        except EUDError as exc:
            raise exc.located(sentence=k) from None
    return total


def format_report(scores: Iterable[tuple[Metric, Score]]) -> str:
    """One line per metric: ``METRIC precision recall f1``, as percentages."""
    lines = []
    for metric, score in scores:
        lines.append(
            f"{Metric.parse(metric).value} {100 * score.precision:.2f} {100 * score.recall:.2f} {100 * score.f1:.2f}"
        )
    return "\n".join(lines) + "\n"
