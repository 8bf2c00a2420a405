import json

import numpy as np
import pytest

from codeorigin.classifier import (
    LINEAR_DEFAULTS,
    Hyperparams,
    persist,
    predict,
    predict_batch,
    restore,
    train,
)
from codeorigin.classifier.linear import lr_at
from codeorigin.corpus import Corpus, Provenance, split
from codeorigin.errors import ArtifactError, ArtifactVersionError, InputError, TrainingError
from codeorigin.extractor import preset
from codeorigin.snippet import Origin, Snippet
from codeorigin.synthetic import synthetic_paired_corpus

C1 = preset("C1")
FAST = LINEAR_DEFAULTS.replace(epochs=8)


def toy_corpus(n=40):
    """Human snippets declare a package, generated ones do not."""
    snippets = []
    for i in range(n):
        body = f"class A{i} {{ int f() {{ return {i}; }} }}\n"
        snippets.append(Snippet(f"h{i:03d}", Origin.HUMAN, f"package org.site{i % 3};\n{body}"))
        snippets.append(Snippet(f"g{i:03d}", Origin.CHATGPT, body))
    return Corpus(tuple(snippets), Provenance.UNPAIRED_U, "toy")


@pytest.fixture(scope="module")
def toy():
    corpus = toy_corpus()
    return corpus, split(corpus, seed=1)


@pytest.fixture(scope="module")
def toy_model(toy):
    corpus, sp = toy
    return train("linear", sp, corpus, C1, FAST)


def test_schedule():
    assert lr_at(0, 100, 1.0, 0.1) == pytest.approx(0.1)
    assert lr_at(9, 100, 1.0, 0.1) == pytest.approx(1.0)
    assert lr_at(10, 100, 1.0, 0.1) == pytest.approx(1.0)
    assert lr_at(99, 100, 1.0, 0.1) == pytest.approx(1 / 90)
    assert lr_at(0, 10, 2.0, 0.0) == pytest.approx(2.0)


def test_hyperparams_validation():
    with pytest.raises(InputError):
        Hyperparams(epochs=0)
    with pytest.raises(InputError):
        Hyperparams(warmup_fraction=1.5)
    hp = Hyperparams().replace(epochs=3, lr=None)
    assert hp.epochs == 3 and Hyperparams.from_dict(hp.to_dict()) == hp


def test_separable_toy_fits_training_set(toy, toy_model):
    corpus, sp = toy
    train_snips = corpus.subset(sp.train)
    preds = predict_batch(toy_model, train_snips)
    assert all(p.label is s.origin for p, s in zip(preds, train_snips))
    test_snips = corpus.subset(sp.test)
    assert all(p.label is s.origin for p, s in zip(predict_batch(toy_model, test_snips), test_snips))


def test_history_marks_one_selected_epoch(toy_model):
    history = toy_model.training_config["history"]
    assert len(history) == FAST.epochs
    assert sum(h["selected"] for h in history) == 1
    best = max(h["val_accuracy"] for h in history)
    chosen = next(h for h in history if h["selected"])
    assert chosen["val_accuracy"] == best
    assert chosen is next(h for h in history if h["val_accuracy"] == best)


def test_empty_or_single_class_training_rejected(toy):
    corpus, sp = toy
    empty = type(sp)((), sp.validation, sp.test, sp.ratios, sp.seed, sp.stratified)
    with pytest.raises(TrainingError):
        train("linear", empty, corpus, C1, FAST)
    humans = tuple(i for i in sp.train if i.startswith("h"))
    with pytest.raises(TrainingError):
        train("linear", type(sp)(humans, (), (), sp.ratios, sp.seed, True), corpus, C1, FAST)
    with pytest.raises(InputError):
        train("svm", sp, corpus, C1, FAST)


def test_same_seed_same_weights(toy, toy_model):
    corpus, sp = toy
    again = train("linear", sp, corpus, C1, FAST)
    assert np.array_equal(again.impl.weights, toy_model.impl.weights)
    assert again.impl.bias == toy_model.impl.bias


def test_input_order_does_not_matter(toy, toy_model):
    corpus, sp = toy
    shuffled = Corpus(tuple(reversed(corpus.snippets)), corpus.provenance, corpus.name)
    sp2 = type(sp)(tuple(reversed(sp.train)), sp.validation[::-1], sp.test, sp.ratios, sp.seed, sp.stratified)
    again = train("linear", sp2, shuffled, C1, FAST)
    assert np.array_equal(again.impl.weights, toy_model.impl.weights)


def test_label_flip_negates_model(toy, toy_model):
    corpus, sp = toy
    flipped = corpus.replace_snippets(
        Snippet(s.id, s.origin.other, s.text, s.pairing_key) for s in corpus.snippets
    )
    model = train("linear", sp, flipped, C1, FAST)
    assert np.array_equal(model.impl.weights, -toy_model.impl.weights)
    assert model.impl.bias == -toy_model.impl.bias
    snips = corpus.subset(sp.test)
    p1 = toy_model.predict_proba([s.text for s in snips])
    p2 = model.predict_proba([s.text for s in snips])
    assert np.array_equal(p1, p2[:, ::-1])


def test_predictions_well_formed(toy, toy_model):
    corpus, _ = toy
    snips = list(corpus)
    texts = [s.text for s in snips]
    probs = toy_model.predict_proba(texts)
    assert probs.shape == (len(snips), 2)
    assert np.allclose(probs.sum(axis=1), 1.0)
    preds = predict_batch(toy_model, snips)
    assert [p.snippet_id for p in preds] == [s.id for s in snips]
    assert all(0.5 <= p.score <= 1.0 for p in preds)
    assert predict(toy_model, snips[3]) == preds[3]
    assert predict_batch(toy_model, []) == []


def test_batch_size_invariance(toy, toy_model):
    corpus, _ = toy
    snips = list(corpus)
    whole = predict_batch(toy_model, snips, batch_size=len(snips))
    pieces = [p for i in range(0, len(snips), 3) for p in predict_batch(toy_model, snips[i : i + 3], batch_size=1)]
    assert whole == pieces


def test_persist_restore_round_trip(tmp_path):
    corpus = synthetic_paired_corpus(25, seed=3)
    sp = split(corpus, seed=3)
    model = train("linear", sp, corpus, preset("C4"), FAST)
    out = persist(model, tmp_path / "m")
    meta = json.loads((out / "meta.json").read_text())
    assert meta["class_order"] == ["human", "chatgpt"]
    assert meta["preprocess_config"]["name"] == "C4"
    assert meta["tokenizer"].startswith("reference:")
    back = restore(out)
    snips = list(corpus)
    assert len(snips) == 50
    assert predict_batch(back, snips) == predict_batch(model, snips)
    # overwriting an existing artifact swaps it in whole
    persist(model, out)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["m"]


def test_restore_errors(tmp_path, toy_model):
    with pytest.raises(ArtifactError):
        restore(tmp_path / "nothing")
    out = persist(toy_model, tmp_path / "m")
    meta = json.loads((out / "meta.json").read_text())
    meta["version"] = "99"
    (out / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(ArtifactVersionError):
        restore(out)
    meta["version"] = "1"
    meta["class_order"] = ["chatgpt", "human"]
    (out / "meta.json").write_text(json.dumps(meta))
    with pytest.raises(ArtifactError):
        restore(out)
