"""Synthetic conjunct-propagation treebank for toy training.

Sentences follow ``[Det] Subj V1 [, V2] (and|or) Vk [Det] Obj .`` (or a
single verb). Coordinated verbs share subject and object, so every
non-first verb receives propagated ``nsubj`` and ``obj`` enhanced edges, and
conjuncts carry ``conj:<coordinator>``.
"""

from __future__ import annotations

import random

from ..conllu import Document, NodeId, Sentence, Token, sort_deps

NOUNS = ["store", "shop", "company", "farmer", "baker", "teacher", "student", "child", "woman", "neighbour", "library", "bakery"]
NAMES = ["John", "Mary", "Anna", "Peter", "Timothy", "Laura", "Oscar", "Nina"]
VERBS = ["buys", "sells", "makes", "likes", "wants", "needs", "finds", "keeps", "repairs", "paints", "orders", "cleans"]
OBJECTS = ["cameras", "books", "apples", "bread", "toys", "shoes", "chairs", "bikes", "lamps", "cakes", "maps", "cups"]
DETERMINERS = ["the", "a", "this", "every"]
OBJECT_DETERMINERS = ["the", "these", "some", "those"]
COORDINATORS = ["and", "or"]


class _Builder:
    def __init__(self):
        self.rows = []  # [form, lemma, upos, xpos, feats]
        self.tree = {}  # index -> (head, deprel)
        self.extra = []  # (head, dep, label)

    def add(self, form, lemma, upos, xpos, feats=()):
        self.rows.append((form, lemma, upos, xpos, tuple(feats)))
        return len(self.rows)


def _sentence(rng: random.Random, ordinal: int, prefix: str) -> Sentence:
    b = _Builder()
    if rng.random() < 0.3:
        subj = b.add(rng.choice(NAMES), None, "PROPN", "NNP", [("Number", "Sing")])
        subj_det = None
    else:
        det = rng.choice(DETERMINERS)
        subj_det = b.add(det, det.lower(), "DET", "DT")
        noun = rng.choice(NOUNS)
        subj = b.add(noun, noun, "NOUN", "NN", [("Number", "Sing")])
    n_verbs = rng.choice([1, 2, 2, 3])
    verb_forms = rng.sample(VERBS, n_verbs)
    verb_feats = [("Mood", "Ind"), ("Number", "Sing"), ("Person", "3"), ("Tense", "Pres"), ("VerbForm", "Fin")]
    verbs, comma, cc = [], None, None
    coord = rng.choice(COORDINATORS)
    for k, form in enumerate(verb_forms):
        if n_verbs == 3 and k == 1:
            comma = b.add(",", ",", "PUNCT", ",")
        if k == n_verbs - 1 and n_verbs > 1:
            cc = b.add(coord, coord, "CCONJ", "CC")
        verbs.append(b.add(form, form[:-1], "VERB", "VBZ", verb_feats))
    obj_det = None
    if rng.random() < 0.6:
        det = rng.choice(OBJECT_DETERMINERS)
        obj_det = b.add(det, det, "DET", "DT")
    noun = rng.choice(OBJECTS)
    obj = b.add(noun, noun.rstrip("s") or noun, "NOUN", "NNS", [("Number", "Plur")])
    stop = b.add(".", ".", "PUNCT", ".")

    first = verbs[0]
    tree = {first: (0, "root"), subj: (first, "nsubj"), obj: (first, "obj"), stop: (first, "punct")}
    if subj_det:
        tree[subj_det] = (subj, "det")
    if obj_det:
        tree[obj_det] = (obj, "det")
    for v in verbs[1:]:
        tree[v] = (first, "conj")
    if comma:
        tree[comma] = (verbs[1], "punct")
    if cc:
        tree[cc] = (verbs[-1], "cc")

    enhanced = {i: [(h, rel)] for i, (h, rel) in tree.items()}
    for v in verbs[1:]:
        enhanced[v] = [(first, f"conj:{coord}")]
        enhanced[subj].append((v, "nsubj"))
        enhanced[obj].append((v, "obj"))

    tokens = []
    words = []
    for i, (form, lemma, upos, xpos, feats) in enumerate(b.rows, start=1):
        head, rel = tree[i]
        deps = sort_deps((NodeId(h), lab) for h, lab in enhanced[i])
        misc = "SpaceAfter=No" if i + 1 <= len(b.rows) and b.rows[i][0] in {",", "."} else ""
        tokens.append(Token(NodeId(i), form, lemma or form, upos, xpos, feats, NodeId(head), rel, deps, misc))
        words.append(form + ("" if misc else " "))
    text = "".join(words).strip()
    comments = (f"# sent_id = {prefix}-{ordinal}", f"# text = {text}")
    return Sentence(comments, tuple(tokens))


def generate_corpus(size: int, seed: int, prefix: str = "toy", exclude: set | None = None) -> Document:
    """``size`` distinct sentences; texts listed in ``exclude`` are skipped."""
    rng = random.Random(seed)
    seen = set(exclude or ())
    out = []
    while len(out) < size:
        s = _sentence(rng, len(out) + 1, prefix)
        if s.text in seen:
            continue
        seen.add(s.text)
        out.append(s)
    return Document(tuple(out))


def toy_corpora(train_size: int = 200, heldout_size: int = 50, seed: int = 13) -> tuple[Document, Document]:
    train = generate_corpus(train_size, seed, "train")
    heldout = generate_corpus(heldout_size, seed + 1, "heldout", exclude={s.text for s in train})
    return train, heldout
