import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from tlakit.annotator import TermExpectation
from tlakit.corpus import InputError
from tlakit.evaluate import (
    BleuConfig,
    JudgmentMatrix,
    corpus_bleu,
    free_marginal_kappa,
    novel_wordforms,
    paired_bootstrap,
    parse_judgments,
    term_accuracy,
)
from tlakit.evaluate.bleu import score_from_stats

from conftest import write
from oracles import contains_brute, direct_kappa, naive_bleu


def random_corpus(rng, n, vocab="abcdefgh"):
    return [[rng.choice(vocab) for _ in range(rng.randint(0, 12))] for _ in range(n)]


# ---------------------------------------------------------------- BLEU


def test_bleu_identity():
    refs = [["the", "cat", "sat", "on", "the", "mat"], ["a", "b", "c", "d", "e"]]
    s = corpus_bleu(refs, refs)
    assert s.score == 1.0 and s.brevity_penalty == 1.0 and s.precisions == (1.0, 1.0, 1.0, 1.0)


def test_bleu_clipping_example():
    s = corpus_bleu([["the", "the", "the"]], [["the", "cat"]])
    assert s.precisions[0] == pytest.approx(1 / 3, abs=1e-15)
    assert s.precisions[1:] == (0.0, 0.0, 0.0)
    assert s.score == 0.0


def test_bleu_brevity_penalty():
    s = corpus_bleu([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e", "f", "g", "h"]])
    assert s.brevity_penalty == pytest.approx(math.exp(1 - 8 / 4), abs=1e-15)
    assert s.score == pytest.approx(s.brevity_penalty, abs=1e-15)


def test_bleu_epsilon_smoothing_and_lowercase():
    s = corpus_bleu([["The", "the", "the"]], [["the", "cat"]], BleuConfig(smoothing="epsilon", lowercase=True))
    assert 0 < s.score < 1e-6
    assert s.precisions[0] == pytest.approx(1 / 3, abs=1e-15)


def test_bleu_errors_and_empty_hypothesis():
    with pytest.raises(ValueError):
        corpus_bleu([["a"]], [])
    assert corpus_bleu([[]], [["a"]]).score == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_bleu_matches_naive_oracle(seed):
    rng = random.Random(seed)
    refs = random_corpus(rng, 50)
    hyps = [[t if rng.random() < 0.7 else rng.choice("abcdefghij") for t in r] for r in refs]
    assert corpus_bleu(hyps, refs).score == pytest.approx(naive_bleu(hyps, refs), abs=1e-9)


@given(st.randoms(use_true_random=False))
def test_bleu_permutation_invariant(rnd):
    refs = random_corpus(rnd, 15, "abc")
    hyps = random_corpus(rnd, 15, "abc")
    order = list(range(15))
    rnd.shuffle(order)
    assert corpus_bleu(hyps, refs).score == corpus_bleu([hyps[k] for k in order], [refs[k] for k in order]).score


@given(st.integers(1, 200), st.integers(1, 200))
def test_brevity_penalty_monotone_in_length(c, r):
    cfg = BleuConfig()
    stats = [5, 4, 3, 2, 10, 9, 8, 7]
    bp1 = score_from_stats(stats + [c, r], cfg).brevity_penalty
    bp2 = score_from_stats(stats + [c + 1, r], cfg).brevity_penalty
    assert 0 < bp1 <= bp2 <= 1


# ----------------------------------------------------------- bootstrap


def _system_pair(seed=0, n=200):
    rng = random.Random(seed)
    refs = random_corpus(rng, n, "abcdefghijklmnop")
    a = [[t if rng.random() < 0.9 else "zz" for t in r] for r in refs]
    b = [[t for t in s if rng.random() >= 0.3] for s in a]
    return a, b, refs


def test_bootstrap_self_comparison():
    a, _, refs = _system_pair()
    r = paired_bootstrap(a, a, refs, replicates=200, seed=3)
    assert r.p_value == 1.0 and r.ties == 1.0
    assert r.wins_a + r.wins_b + r.ties == pytest.approx(1.0, abs=1e-12)


def test_bootstrap_detects_degradation():
    a, b, refs = _system_pair()
    r = paired_bootstrap(a, b, refs, replicates=1000, seed=1)
    assert r.bleu_a > r.bleu_b and r.p_value <= 0.01
    r_rev = paired_bootstrap(b, a, refs, replicates=1000, seed=1)
    assert r_rev.p_value == r.p_value and r_rev.wins_b == r.wins_a


def test_bootstrap_determinism_across_workers():
    a, b, refs = _system_pair(4, 60)
    one = paired_bootstrap(a, b, refs, replicates=300, seed=9, workers=1)
    assert one == paired_bootstrap(a, b, refs, replicates=300, seed=9, workers=4)
    assert one != paired_bootstrap(a, b, refs, replicates=300, seed=10)


def test_bootstrap_rejects_mismatch():
    with pytest.raises(ValueError):
        paired_bootstrap([["a"]], [["a"], ["b"]], [["a"]])


# ------------------------------------------------------- term accuracy


def test_term_accuracy_example():
    r = term_accuracy([["atteice", "dzinējs", "vai"]], [TermExpectation(0, ("dzinējs",), "engine")])
    assert r.matched == 1 and r.accuracy == 100.0


def test_term_accuracy_arithmetic_and_contiguity():
    hyps = [["pārnesumu", "X", "kārba"], ["Pārnesumu", "kārba"]]
    exps = [TermExpectation(0, ("pārnesumu", "kārba"), "gear box"), TermExpectation(1, ("pārnesumu", "kārba"), "gb")]
    r = term_accuracy(hyps, exps)
    assert [d.matched for d in r.details] == [False, True]
    assert term_accuracy(hyps, exps, case_insensitive=False).matched == 0
    assert term_accuracy(hyps, []).accuracy is None
    with pytest.raises(ValueError):
        term_accuracy(hyps, [TermExpectation(5, ("x",), "x")])


def test_term_accuracy_gapped_and_dedupe():
    hyps = [["pārnesumu", "X", "kārba"], ["kārba", "pārnesumu"]]
    gear = ("pārnesumu", "kārba")
    exps = [TermExpectation(0, gear, ""), TermExpectation(0, gear, ""), TermExpectation(1, gear, "")]
    assert term_accuracy(hyps, exps).total == 3
    assert term_accuracy(hyps, exps).matched == 0
    gapped = term_accuracy(hyps, exps, contiguous=False)
    assert [d.matched for d in gapped.details] == [True, True, False]
    once = term_accuracy(hyps, exps, contiguous=False, per_occurrence=False)
    assert (once.total, once.matched) == (2, 1)


@given(
    st.lists(st.lists(st.sampled_from("abc"), max_size=30), min_size=1, max_size=5),
    st.lists(st.tuples(st.integers(0, 4), st.lists(st.sampled_from("abc"), min_size=1, max_size=3)), max_size=10),
)
def test_term_matching_equals_brute_force(hyps, raw):
    exps = [TermExpectation(i % len(hyps), tuple(l), "") for i, l in raw]
    r = term_accuracy(hyps, exps)
    assert [d.matched for d in r.details] == [contains_brute(hyps[x.sentence_index], x.lemmas) for x in exps]


# --------------------------------------------------------------- kappa


def test_kappa_examples():
    cats4 = ("Correct", "WrongLexeme", "WrongInflection", "Other")
    unanimous = JudgmentMatrix(tuple((c,) * 4 for c in cats4 * 3), cats4)
    assert free_marginal_kappa(unanimous) == 1.0
    rows = [("y", "y")] * 7 + [("y", "n")] * 3
    assert free_marginal_kappa(JudgmentMatrix(tuple(rows), ("y", "n"))) == pytest.approx(0.4, abs=1e-12)
    rows = [("y", "y")] * 5 + [("n", "y")] * 5
    assert free_marginal_kappa(JudgmentMatrix(tuple(rows), ("y", "n"))) == pytest.approx(0.0, abs=1e-12)


def test_kappa_validation():
    with pytest.raises(ValueError):
        JudgmentMatrix((("a",),), ("a", "b"))
    with pytest.raises(ValueError):
        JudgmentMatrix((("a", "a"),), ("a",))
    with pytest.raises(ValueError):
        JudgmentMatrix((("a", "c"),), ("a", "b"))


def test_parse_judgments():
    m = parse_judgments(["#categories: Correct,WrongLexeme,WrongInflection,Other", "Correct\tCorrect", "Other\tCorrect"])
    assert len(m.categories) == 4 and m.n_raters == 2
    with pytest.raises(InputError):
        parse_judgments(["a\tb"])


@st.composite
def judgment_matrices(draw):
    k = draw(st.integers(2, 5))
    cats = tuple(f"c{i}" for i in range(k))
    n = draw(st.integers(2, 6))
    rows = draw(st.lists(st.tuples(*[st.sampled_from(cats)] * n), min_size=1, max_size=15))
    return JudgmentMatrix(tuple(rows), cats)


@given(judgment_matrices(), st.randoms(use_true_random=False))
def test_kappa_properties(m, rnd):
    kappa = free_marginal_kappa(m)
    assert kappa == pytest.approx(direct_kappa(m.labels, m.categories), abs=1e-12)
    perm = list(m.categories)
    rnd.shuffle(perm)
    relabel = dict(zip(m.categories, perm))
    relabeled = JudgmentMatrix(tuple(tuple(relabel[x] for x in row) for row in m.labels), m.categories)
    assert free_marginal_kappa(relabeled) == pytest.approx(kappa, abs=1e-12)
    unanimous = all(len(set(row)) == 1 for row in m.labels)
    assert (kappa == pytest.approx(1.0, abs=1e-12)) == unanimous
    assert -1 / (len(m.categories) - 1) - 1e-12 <= kappa <= 1 + 1e-12


# ------------------------------------------------------------- novelty


def test_novelty_set_difference(tmp_path):
    src, tgt = write(tmp_path / "s", "a b\nc\n"), write(tmp_path / "t", "x y\n")
    r = novel_wordforms([["a", "q", "x", "r"]], src, tgt)
    assert [f.form for f in r.forms] == ["q", "r"]
    assert len(novel_wordforms([["a", "x"]], src, tgt)) == 0
    with pytest.raises(InputError):
        novel_wordforms([["a"]], tmp_path / "missing", tgt)


def test_novelty_planted_forms(tmp_path):
    rng = random.Random(0)
    vocab = [f"w{k}" for k in range(100)]
    src = write(tmp_path / "s", "\n".join(" ".join(rng.sample(vocab[:50], 5)) for _ in range(50)) + "\n")
    tgt = write(tmp_path / "t", "\n".join(" ".join(rng.sample(vocab[50:], 5)) for _ in range(50)) + "\n")
    known = set(src.read_text().split()) | set(tgt.read_text().split())
    hyps = [rng.sample(sorted(known), 6) for _ in range(40)]
    planted = {"novA": 3, "novB": 1, "novC": 5}
    where = {}
    for form, count in planted.items():
        for _ in range(count):
            k = rng.randrange(40)
            hyps[k].append(form)
            where.setdefault(form, []).append(k)
    r = novel_wordforms(hyps, src, tgt)
    assert {f.form: f.frequency for f in r.forms} == planted
    assert not {f.form for f in r.forms} & known
    for f in r.forms:
        assert list(f.examples) == sorted(set(where[f.form]))[:3]


def test_novelty_lowercase(tmp_path):
    src, tgt = write(tmp_path / "s", "Engine\n"), write(tmp_path / "t", "x\n")
    assert len(novel_wordforms([["engine"]], src, tgt)) == 1
    assert len(novel_wordforms([["engine"]], src, tgt, lowercase=True)) == 0
