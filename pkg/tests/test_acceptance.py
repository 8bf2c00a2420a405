"""One test per acceptance criterion, each checked at its stated tolerance and time limit.

A pass/fail line per criterion is printed in the terminal summary.
Criterion 8 needs a user-supplied paired corpus and a pre-trained encoder:
set CODEORIGIN_STRETCH_MANIFEST (and optionally CODEORIGIN_STRETCH_CHECKPOINT)
to run it.
"""

import contextlib
import os
import random
import time
from fractions import Fraction

import numpy as np
import pytest

import javagen
from conftest import ACCEPTANCE_LINES, GOLDEN_DIR, load_java_fixtures
from corpora import paired_corpus
from codeorigin.baselines import map_verdict, score_fixture, write_fixture
from codeorigin.classifier import LINEAR_DEFAULTS, Hyperparams
from codeorigin.corpus import split
from codeorigin.experiments import run_experiment_grid
from codeorigin.extractor import PRESETS, ClassRename, apply_config, lex_java, read_rename_map
from codeorigin.extractor.rules import strip_all_imports, strip_comments, strip_self_imports
from codeorigin.metrics import confusion, evaluate
from codeorigin.snippet import Origin, Snippet
from codeorigin.stats import holm_adjust, mcnemar_exact, odds_ratio

H, G = Origin.HUMAN, Origin.CHATGPT


@contextlib.contextmanager
def criterion(number, title, limit_s=None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if limit_s is not None:
            assert elapsed < limit_s, f"took {elapsed:.1f}s, limit {limit_s}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        status = "SKIP" if isinstance(exc, pytest.skip.Exception) else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {number} {status}: {title} ({elapsed:.2f}s)")
        raise
    limit = f", limit {limit_s}s" if limit_s else ""
    ACCEPTANCE_LINES.append(f"criterion {number} PASS: {title} ({elapsed:.2f}s{limit})")


def test_criterion_1_configuration_goldens():
    with criterion(1, "golden files for 12 fixtures x 8 configurations", 5):
        fixtures = load_java_fixtures()
        assert len(fixtures) == 12
        fx = GOLDEN_DIR.parent
        maps = {
            ClassRename.COUNTERPART_NAME: read_rename_map(fx / "rename_counterpart.tsv", ClassRename.COUNTERPART_NAME),
            ClassRename.HUMAN_CHOSEN_NAME: read_rename_map(fx / "rename_human.tsv"),
        }
        for s in fixtures:
            out = {}
            for name, cfg in PRESETS.items():
                rmap = maps.get(cfg.class_rename)
                out[name] = apply_config(s, cfg, rmap).text
                golden = (GOLDEN_DIR / s.id / f"{name}.java").read_bytes().decode("utf-8")
                assert out[name] == golden, (s.id, name)
                again = Snippet(s.id, s.origin, out[name], s.pairing_key)
                assert apply_config(again, cfg, rmap).text == out[name], (s.id, name, "idempotence")
            assert out["C1"] == s.text
            for chain in (("C1", "C2", "C3", "C4"), ("C6", "C7", "C8")):
                sizes = [len(out[c]) for c in chain]
                assert sizes == sorted(sizes, reverse=True), (s.id, chain, sizes)


def _literals(text):
    return [t.lexeme for t in lex_java(text) if t.is_literal]


def test_criterion_2_lexer_safety():
    with criterion(2, "lexer round trip and literal safety on 1000 random snippets", 30):
        texts = javagen.corpus(1000, seed=2024)
        assert sum(any(m in t for m in ("//", "/*")) for t in texts) > 900
        with_literals = 0
        for text in texts:
            assert "".join(t.lexeme for t in lex_java(text)) == text
            lits = _literals(text)
            with_literals += bool(lits)
            for stripped in (strip_comments(text), strip_all_imports(text), strip_self_imports(text, ["ch_17"])):
                assert _literals(stripped) == lits
        assert with_literals > 900


def _brute_force(truth, pred):
    out = {}
    for cls in (H, G):
        tp = sum(1 for t, p in zip(truth, pred) if t is cls and p is cls)
        pp = sum(1 for p in pred if p is cls)
        ap = sum(1 for t in truth if t is cls)
        prec = Fraction(tp, pp) if pp else Fraction(0)
        rec = Fraction(tp, ap) if ap else Fraction(0)
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else Fraction(0)
        out[cls.value] = (prec, rec, f1, ap)
    acc = Fraction(sum(1 for t, p in zip(truth, pred) if t is p), len(truth))
    macro = [sum(out[c][i] for c in out) / 2 for i in range(3)]
    weighted = [sum(out[c][i] * out[c][3] for c in out) / len(truth) for i in range(3)]
    return out, acc, macro, weighted


def test_criterion_3_metrics_oracle():
    with criterion(3, "reconstructed confusion table values and 500-vector brute-force oracle", 10):
        truth = [G] * 120 + [H] * 120
        pred = [G] * 120 + [G] * 90 + [H] * 30
        c = confusion(truth, pred, G)
        assert (c.tp, c.fp, c.fn, c.tn) == (120, 90, 0, 30)
        r = evaluate(truth, pred)
        f = lambda x: f"{x:.2f}"  # noqa: E731
        g, h = r.per_class["chatgpt"], r.per_class["human"]
        assert [f(g.precision), f(h.precision)] == ["0.57", "1.00"]
        assert [f(g.recall), f(h.recall)] == ["1.00", "0.25"]
        assert [f(g.f1), f(h.f1)] == ["0.73", "0.40"]
        assert f(r.accuracy) == "0.62"
        assert [f(r.macro_avg.precision), f(r.macro_avg.recall), f(r.macro_avg.f1)] == ["0.79", "0.62", "0.56"]

        rng = random.Random(3)
        for _ in range(500):
            n = rng.randint(1, 60)
            truth = [rng.choice((H, G)) for _ in range(n)]
            pred = [rng.choice((H, G)) for _ in range(n)]
            per, acc, macro, weighted = _brute_force(truth, pred)
            r = evaluate(truth, pred)
            for cls, (p, rc, f1, sup) in per.items():
                m = r.per_class[cls]
                assert (m.precision, m.recall, m.f1, m.support) == (float(p), float(rc), float(f1), sup)
            assert r.accuracy == float(acc)
            assert (r.macro_avg.precision, r.macro_avg.recall, r.macro_avg.f1) == tuple(float(x) for x in macro)
            assert (r.weighted_avg.precision, r.weighted_avg.recall, r.weighted_avg.f1) == tuple(float(x) for x in weighted)


def test_criterion_4_statistics_oracle():
    with criterion(4, "exact McNemar, Holm and odds-ratio oracles with simulation", 30):
        assert abs(mcnemar_exact(5, 1) - 0.21875) <= 1e-12
        assert mcnemar_exact(36, 1) < 2e-9
        for b in range(12):
            for c in range(12):
                assert mcnemar_exact(b, c) == mcnemar_exact(c, b)
                assert 0.0 < mcnemar_exact(b, c) <= 1.0
        # under the null each discordant item goes either way with probability 1/2
        rng = np.random.default_rng(7)
        for b, c in ((5, 1), (9, 3), (4, 4)):
            n = b + c
            draws = rng.binomial(n, 0.5, size=100_000)
            extreme = np.minimum(draws, n - draws) <= min(b, c)
            mc = extreme.mean()
            se = np.sqrt(mc * (1 - mc) / draws.size)
            assert abs(mc - mcnemar_exact(b, c)) < 5 * se + 1e-12
        assert holm_adjust([0.03, 0.01, 0.04]) == [0.06, 0.03, 0.06]
        assert odds_ratio(38, 0) == 77.0


ANSWERS = {
    "gptzero": [
        ("Your text is likely to be written entirely by a human", H),
        ("Your text is most likely human written but there are some sentences with low perplexities", H),
        ("Your text is likely to be written entirely by AI", G),
        ("Your text may include parts written by AI", G),
    ],
    "openai_classifier": [
        ("The classifier considers the text to be unclear if it is AI-generated", H),
        ("The classifier considers the text to be unlikely AI-generated", H),
        ("The classifier considers the text to be likely AI-generated", G),
        ("The classifier considers the text to be possibly AI-generated", G),
    ],
}


def test_criterion_5_verdicts_and_fixture_scoring(tmp_path):
    with criterion(5, "eight verdict strings and 64/100 fixture scoring"):
        for baseline, rows in ANSWERS.items():
            for answer, label in rows:
                assert map_verdict(baseline, answer) is label
        truth, rows = {}, []
        for i in range(100):
            origin = H if i % 2 else G
            truth[f"s{i:03d}"] = origin
            answers = ANSWERS["gptzero"]
            right = answers[0][0] if origin is H else answers[2][0]
            wrong = answers[2][0] if origin is H else answers[0][0]
            rows.append((f"s{i:03d}", right if i < 64 else wrong))
        write_fixture(rows, tmp_path / "fixture.csv")
        score = score_fixture("gptzero", tmp_path / "fixture.csv", truth)
        assert score.total == 100 and score.correct == 64
        assert score.accuracy == 0.64


def test_criterion_6_marker_discrimination():
    from codeorigin.synthetic import synthetic_paired_corpus

    with criterion(6, "synthetic 200-pair corpus: C1 >= 0.95, C4 in 0.5 +- 0.15, deterministic", 120):
        corpus = synthetic_paired_corpus(200, seed=42)
        assert len(corpus) == 400
        runs = []
        for _ in range(2):
            cells = run_experiment_grid({"synthetic": corpus}, ["C1", "C4"], "linear", LINEAR_DEFAULTS, seed=42)
            assert all(c.ok for c in cells), [c.error for c in cells]
            runs.append([c.predictions for c in cells])
        c1, c4 = cells
        assert c1.report.accuracy >= 0.95, c1.report.accuracy
        assert abs(c4.report.accuracy - 0.5) <= 0.15, c4.report.accuracy
        assert runs[0] == runs[1]


def test_criterion_7_split_invariants():
    with criterion(7, "1210-snippet paired split: 968/121/121, disjoint, stratified, pair-aware", 5):
        corpus = paired_corpus(601, 609)
        assert len(corpus) == 1210
        sp = split(corpus, (80, 10, 10), seed=42)
        parts = (sp.train, sp.validation, sp.test)
        assert tuple(len(p) for p in parts) == (968, 121, 121)
        ids = [i for p in parts for i in p]
        assert len(set(ids)) == len(ids) and set(ids) == set(corpus.ids)
        by_id = corpus.by_id()
        for origin in (H, G):
            total = sum(1 for s in corpus if s.origin is origin)
            for ratio, part in zip((80, 10, 10), parts):
                got = sum(1 for i in part if by_id[i].origin is origin)
                assert abs(got - Fraction(ratio * total, 100)) <= 1
        where = {}
        for name, part in zip(("train", "validation", "test"), parts):
            for i in part:
                key = by_id[i].pairing_key
                assert where.setdefault(key, name) == name


@pytest.mark.encoder
def test_criterion_8_stretch_encoder():
    with criterion(8, "stretch: pre-trained encoder at C1 on a user corpus of >= 500 pairs"):
        manifest = os.environ.get("CODEORIGIN_STRETCH_MANIFEST")
        if not manifest:
            pytest.skip("set CODEORIGIN_STRETCH_MANIFEST to a paired corpus manifest to run the stretch check")
        from codeorigin.cli import load_corpus
        from codeorigin.corpus import pair_snippets

        corpus = load_corpus(manifest, provenance="paired_Dbeta")
        assert len(pair_snippets(corpus, drop_unmatched=True)) >= 500
        checkpoint = os.environ.get("CODEORIGIN_STRETCH_CHECKPOINT")
        cells = run_experiment_grid({"dbeta": corpus}, ["C1"], "encoder", Hyperparams(), checkpoint=checkpoint)
        assert cells[0].ok, cells[0].error
        assert cells[0].report.accuracy >= 0.95
