"""Synthetic corpora with known answers, for tests and experiment scripts.

``bijective_bitext`` yields word-for-word translations in identical order,
so the gold alignment is the identity. ``write_fixture`` builds a small
inflecting toy language pair with a target CoNLL-U layer, a glossary, a
test set, two system outputs and a judgment file.
"""

from __future__ import annotations

import random
from pathlib import Path

from .corpus import MorphLayer, MorphToken, format_conllu, write_sentences


def bijective_bitext(vocab: int = 50, n_sentences: int = 2000, min_len: int = 3, max_len: int = 10, seed: int = 0):
    """(bitext, gold) where bitext[k] = (e_tokens, f_tokens) and gold[k] the identity links."""
    rng = random.Random(seed)
    bitext, gold = [], []
    for _ in range(n_sentences):
        n = rng.randint(min_len, max_len)
        ids = [rng.randrange(vocab) for _ in range(n)]
        bitext.append((tuple(f"e{i}" for i in ids), tuple(f"f{i}" for i in ids)))
        gold.append(frozenset((k, k) for k in range(n)))
    return bitext, gold


_CONSONANTS = "bdgkmnprstvz"
_VOWELS = "aeiou"
NOUN_ENDINGS = ("s", "a", "am", "u", "ā", "i")
VERB_ENDINGS = ("t", "u", "a", "am", "ja")
FUNCTION_WORDS = ("the", "a", "of", "to")


def _stem(rng: random.Random, seen: set) -> str:
    while True:
        s = "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(rng.randint(2, 3)))
        if s not in seen:
            seen.add(s)
            return s


class ToyLanguage:
    """Source words with one target lexeme each; nouns and verbs inflect, adjectives do not."""

    def __init__(self, seed: int = 0, n_nouns: int = 40, n_verbs: int = 20, n_adjs: int = 15):
        rng = random.Random(seed)
        seen: set[str] = set()
        self.entries = {}
        for k in range(n_nouns):
            self.entries[f"noun{k}"] = ("NOUN", _stem(rng, seen), NOUN_ENDINGS)
        for k in range(n_verbs):
            self.entries[f"verb{k}"] = ("VERB", _stem(rng, seen), VERB_ENDINGS)
        for k in range(n_adjs):
            self.entries[f"adj{k}"] = ("ADJ", _stem(rng, seen) + "ns", ("",))
        self.nouns = [w for w, e in self.entries.items() if e[0] == "NOUN"]
        self.verbs = [w for w, e in self.entries.items() if e[0] == "VERB"]
        self.adjs = [w for w, e in self.entries.items() if e[0] == "ADJ"]

    def lemma(self, word: str) -> str:
        upos, stem, endings = self.entries[word]
        return stem + endings[0]

    def sentence(self, rng: random.Random) -> tuple[list[str], list[MorphToken]]:
        src: list[str] = []
        tgt: list[MorphToken] = []
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.5:
                src.append(rng.choice(FUNCTION_WORDS))
            phrase = []
            if rng.random() < 0.4:
                phrase.append(rng.choice(self.adjs))
            phrase.append(rng.choice(self.nouns))
            if rng.random() < 0.7:
                phrase.append(rng.choice(self.verbs))
            src.extend(phrase)
            for w in phrase:
                upos, stem, endings = self.entries[w]
                tgt.append(MorphToken(stem + rng.choice(endings), self.lemma(w), upos))
        return src, tgt


def write_fixture(out_dir: str | Path, n_train: int = 500, n_test: int = 40, seed: int = 0) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    lang = ToyLanguage(seed)

    train = [lang.sentence(rng) for _ in range(n_train)]
    test = [lang.sentence(rng) for _ in range(n_test)]
    paths = {name: out / name for name in (
        "train.src", "train.tgt", "train.tgt.conllu", "glossary.tsv",
        "test.src", "test.ref", "test.ref.conllu", "hyp_a.txt", "hyp_b.txt", "judgments.tsv",
    )}
    write_sentences(paths["train.src"], [s for s, _ in train])
    write_sentences(paths["train.tgt"], [[m.form for m in t] for _, t in train])
    paths["train.tgt.conllu"].write_text(format_conllu(MorphLayer(tuple(tuple(t) for _, t in train))), encoding="utf-8")

    terms = lang.nouns[:10] + lang.verbs[:5]
    with open(paths["glossary.tsv"], "w", encoding="utf-8", newline="\n") as fh:
        for w in terms:
            fh.write(f"{w}\t{lang.lemma(w)}\t{lang.entries[w][0]}\n")

    write_sentences(paths["test.src"], [s for s, _ in test])
    refs = [[m.form for m in t] for _, t in test]
    write_sentences(paths["test.ref"], refs)
    paths["test.ref.conllu"].write_text(format_conllu(MorphLayer(tuple(tuple(t) for _, t in test))), encoding="utf-8")

    # system A mostly reproduces the reference; system B additionally loses words
    hyp_a, hyp_b = [], []
    for ref in refs:
        a = [tok if rng.random() > 0.1 else tok + "x" for tok in ref]
        b = [tok for tok in a if rng.random() > 0.3] or a[:1]
        hyp_a.append(a)
        hyp_b.append(b)
    write_sentences(paths["hyp_a.txt"], hyp_a)
    write_sentences(paths["hyp_b.txt"], hyp_b)

    cats = ("Correct", "WrongLexeme", "WrongInflection", "Other")
    with open(paths["judgments.tsv"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#categories: " + ",".join(cats) + "\n")
        for _ in range(30):
            base = rng.choice(cats)
            fh.write("\t".join(base if rng.random() < 0.85 else rng.choice(cats) for _ in range(4)) + "\n")
    return paths
