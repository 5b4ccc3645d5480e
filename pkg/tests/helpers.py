"""Random CoNLL-U sentence builders shared by the property tests."""

from __future__ import annotations

import random

from eudkit.conllu import ROOT, NodeId, Sentence, Token, sort_deps

TREE_LABELS = ["nsubj", "obj", "obl", "nmod", "conj", "cc", "case", "det", "amod", "acl:relcl", "advmod", "mark"]
GRAPH_LABELS = TREE_LABELS + ["nsubj:xsubj", "obl:in", "conj:and", "ref", "nmod:poss", "conj>obj"]
FORMS = ["the", "cat", "in", "of", "and", "or", "dog", "sat", "on", "mat", "big", "who", "runs"]
LEMMAS = {"in": "in", "of": "of", "and": "and", "or": "or", "on": "on"}
CASES = ["Nom", "Acc", "Gen", "Ins", None]


def random_heads(rng: random.Random, n: int) -> dict[int, int]:
    """A random rooted tree over 1..n: dep -> head (0 is the root)."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = {order[0]: 0}
    for k, node in enumerate(order[1:], start=1):
        heads[node] = order[rng.randrange(k)]
    return heads


def random_extra_edges(rng: random.Random, n: int, count: int, labels=GRAPH_LABELS) -> dict[tuple[int, int], str]:
    """Up to ``count`` random (head, dep) pairs with labels; cycles allowed."""
    out = {}
    for _ in range(count):
        dep = rng.randint(1, n)
        head = rng.randint(0, n)
        if head != dep:
            out[(head, dep)] = rng.choice(labels)
    return out


def random_sentence(
    rng: random.Random,
    n: int | None = None,
    extra: int | None = None,
    labels=GRAPH_LABELS,
    tree_labels=TREE_LABELS,
    sent_id: str = "r",
) -> Sentence:
    """Tree in HEAD/DEPREL plus tree-and-extra edges in DEPS; no empty nodes."""
    n = n if n is not None else rng.randint(1, 8)
    heads = random_heads(rng, n)
    deprels = {d: ("root" if h == 0 else rng.choice(tree_labels)) for d, h in heads.items()}
    pairs = {(h, d): deprels[d] for d, h in heads.items()}
    for pair, lab in random_extra_edges(rng, n, extra if extra is not None else rng.randint(0, n), labels).items():
        pairs.setdefault(pair, lab)
    tokens = []
    for i in range(1, n + 1):
        form = rng.choice(FORMS)
        case = rng.choice(CASES)
        feats = (("Case", case),) if case else ()
        deps = sort_deps((NodeId(h), lab) for (h, d), lab in pairs.items() if d == i)
        tokens.append(
            Token(
                id=NodeId(i),
                form=form,
                lemma=LEMMAS.get(form, form),
                upos="X",
                feats=feats,
                head=NodeId(heads[i]),
                deprel=deprels[i],
                deps=deps,
            )
        )
    return Sentence((f"# sent_id = {sent_id}",), tuple(tokens))


def random_empty_sentence(rng: random.Random, n: int | None = None, k: int | None = None) -> Sentence:
    """A sentence with ``k`` empty nodes that collapse cleanly.

    Empty nodes are created in a fixed order and only point forward in that
    order, so there is no cycle among them. Each has at least one incoming
    edge and at least one outgoing edge to a surface word.
    """
    base = random_sentence(rng, n, extra=rng.randint(0, 3), labels=TREE_LABELS)
    n = base.word_count
    k = k if k is not None else rng.randint(1, 3)
    empties = [NodeId(rng.randint(0, n), sub) for sub in range(1, k + 1)]
    # ids must be unique: renumber per base index
    seen: dict[int, int] = {}
    fixed = []
    for e in empties:
        seen[e.index] = seen.get(e.index, 0) + 1
        fixed.append(NodeId(e.index, seen[e.index]))
    empties = fixed
    deps: dict[NodeId, dict[NodeId, str]] = {t.id: dict(t.deps) for t in base.tokens}
    for e in empties:
        deps[e] = {}
    surface = [t.id for t in base.words]
    for pos, e in enumerate(empties):
        # incoming from root/surface or an earlier empty node
        sources = [ROOT] + surface + empties[:pos]
        for _ in range(rng.randint(1, 2)):
            deps[e][rng.choice(sources)] = rng.choice(TREE_LABELS)
        # outgoing to surface words (at least one) and maybe a later empty node
        for _ in range(rng.randint(1, 3)):
            deps[rng.choice(surface)][e] = rng.choice(TREE_LABELS)
        if pos + 1 < len(empties) and rng.random() < 0.5:
            later = rng.choice(empties[pos + 1 :])
            deps[later][e] = rng.choice(TREE_LABELS)
    tokens = [t.with_deps(deps[t.id].items()) for t in base.tokens]
    tokens += [Token(id=e, deps=sort_deps(deps[e].items())) for e in empties]
    return base.with_tokens(tokens)
