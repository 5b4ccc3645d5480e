from dataclasses import replace

import numpy as np
import pytest

from eudkit import data
from eudkit.conllu import Document, read_conllu, serialize_conllu, validate_sentence
from eudkit.errors import EUDError
from eudkit.graph import collapse_empty_nodes, graph_of
from eudkit.predictor.model import UNK_LABEL, init_params
from eudkit.predictor.synthetic import toy_corpora
from eudkit.predictor.train import (
    Adam,
    Hyper,
    gold_cells,
    label_vocabulary,
    predict_document,
    train_toy,
)

TRAIN = read_conllu(data.path("toy_train.conllu"))
HELDOUT = read_conllu(data.path("toy_heldout.conllu"))
SMALL = replace(Hyper(), layers=2, width=6, hidden=10, arc_size=6, label_size=4)


def test_default_hyperparameters():
    h = Hyper()
    assert (h.lr, h.beta1, h.beta2, h.epochs) == (0.002, 0.9, 0.9, 400)
    assert (h.w_arc, h.w_label) == (0.2, 0.8)
    assert Hyper.from_mapping({"lr": 0.01}).lr == 0.01
    with pytest.raises(ValueError):
        Hyper.from_mapping({"momentum": 0.5})


def test_bundled_corpus_matches_generator():
    train, heldout = toy_corpora(200, 50, seed=13)
    assert serialize_conllu(train) == data.path("toy_train.conllu").read_text()
    assert serialize_conllu(heldout) == data.path("toy_heldout.conllu").read_text()
    assert not {s.text for s in train} & {s.text for s in heldout}


def test_synthetic_sentences_are_valid_and_propagate():
    for s in TRAIN.sentences[:50]:
        assert validate_sentence(s) == []
        g = graph_of(s)
        conj = [e for e in g.edges() if e.label.startswith("conj:")]
        verbs = {e.dep for e in conj}
        for v in verbs:
            labels = {e.label for e in g.outgoing(v)}
            assert {"nsubj", "obj"} <= labels


def test_label_vocabulary_reserves_unk():
    vocab = label_vocabulary(TRAIN)
    assert vocab[0] == UNK_LABEL
    assert {"conj:and", "conj:or", "nsubj", "obj"} <= set(vocab)
    params = init_params(vocab, 2, 4, 5, 4, 3)
    assert params.label_index("never-seen") == 0


def test_gold_cells_require_collapsed_input():
    s = read_conllu(data.path("fig2_gold_placed.conllu")).sentences[0]
    params = init_params((UNK_LABEL, "x"), 2, 4, 5, 4, 3)
    with pytest.raises(EUDError) as exc:
        gold_cells(s, params)
    assert exc.value.code == "EMPTY_NODES_PRESENT"
    assert gold_cells(collapse_empty_nodes(s), params)


def test_empty_corpus():
    with pytest.raises(EUDError) as exc:
        train_toy(Document(), SMALL)
    assert exc.value.code == "EMPTY_CORPUS"


def test_adam_first_step_moves_by_lr_times_sign():
    params = init_params(("a", "b"), 2, 4, 5, 4, 3, rng=np.random.default_rng(0))
    before = params.copy()
    grads = {k: np.random.default_rng(1).normal(size=v.shape) for k, v in params.arrays().items()}
    Adam(params, 0.002, 0.9, 0.9, 1e-8).step(params, grads)
    for name, g in grads.items():
        delta = getattr(params, name) - getattr(before, name)
        np.testing.assert_allclose(delta, -0.002 * g / (np.abs(g) + 1e-8), rtol=1e-6, atol=1e-12)


def test_single_sentence_overfits_monotonically():
    one = Document(TRAIN.sentences[:1])
    losses = train_toy(one, replace(SMALL, epochs=80)).losses
    tail = losses[5:]
    assert all(b < a for a, b in zip(tail, tail[1:]))
    assert losses[-1] < 0.5 * losses[0]


def test_same_seed_same_run():
    corpus = Document(TRAIN.sentences[:15])
    a = train_toy(corpus, replace(SMALL, epochs=4, seed=3))
    b = train_toy(corpus, replace(SMALL, epochs=4, seed=3))
    c = train_toy(corpus, replace(SMALL, epochs=4, seed=4))
    assert a.losses == b.losses
    for name in a.params.arrays():
        assert np.array_equal(getattr(a.params, name), getattr(b.params, name))
    assert a.losses != c.losses


def test_training_does_not_mutate_given_params():
    corpus = Document(TRAIN.sentences[:5])
    start = init_params(label_vocabulary(corpus), 2, 6, 10, 6, 4, rng=np.random.default_rng(0))
    snapshot = start.copy()
    train_toy(corpus, replace(SMALL, epochs=2), params=start)
    assert all(np.array_equal(getattr(start, k), getattr(snapshot, k)) for k in start.arrays())


def test_trained_model_predictions(toy_run):
    params = toy_run["result"].params
    doc = Document(HELDOUT.sentences[:10])
    predicted = predict_document(params, doc)
    assert len(predicted) == 10
    for gold, pred in zip(doc, predicted):
        assert validate_sentence(pred) == []
        assert [t.form for t in pred.words] == [t.form for t in gold.words]
        assert all(t.deps for t in pred.words)


def test_prediction_strips_existing_empty_nodes(toy_run):
    s = read_conllu(data.path("fig2_gold_placed.conllu"))
    out = predict_document(toy_run["result"].params, s)
    assert validate_sentence(out.sentences[0]) == []
    assert all(t.id.index == 7 for t in out.sentences[0].empty_nodes)
