"""Parallel corpora, morphology layers, glossaries and alignment files.

Everything here is pre-tokenized: a sentence is a line of whitespace
separated tokens and no tokenization is ever attempted.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

UPOS_TAGS = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
    }
)

Tokens = tuple[str, ...]
Links = frozenset[tuple[int, int]]


class InputError(ValueError):
    """An input file or argument violates its format contract."""


def check_token(tok: str) -> str:
    if not tok:
        raise InputError("empty token")
    if any(ch.isspace() for ch in tok):
        raise InputError(f"token contains whitespace: {tok!r}")
    return tok


@dataclass(frozen=True)
class SentencePair:
    index: int
    source: Tokens
    target: Tokens

    def __post_init__(self):
        if not self.source or not self.target:
            raise InputError(f"sentence pair {self.index} has an empty side")


@dataclass(frozen=True)
class ParallelCorpus:
    """Sentence pairs plus the number of lines read from the files.

    ``pairs[k].index`` is the 0-based line the pair came from; lines that
    were empty on either side are absent, so indices may have gaps.
    """

    pairs: tuple[SentencePair, ...]
    n_lines: int = -1

    def __post_init__(self):
        if self.n_lines < 0:
            object.__setattr__(self, "n_lines", len(self.pairs))
        seen = set()
        for p in self.pairs:
            if p.index in seen:
                raise InputError(f"duplicate sentence index {p.index}")
            seen.add(p.index)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)

    def __getitem__(self, k: int) -> SentencePair:
        return self.pairs[k]

    @property
    def sources(self) -> list[Tokens]:
        return [p.source for p in self.pairs]

    @property
    def targets(self) -> list[Tokens]:
        return [p.target for p in self.pairs]

    @classmethod
    def from_token_lists(cls, pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> ParallelCorpus:
        return cls(tuple(SentencePair(i, tuple(s), tuple(t)) for i, (s, t) in enumerate(pairs)))


@dataclass(frozen=True)
class MorphToken:
    form: str
    lemma: str
    upos: str = "X"

    def __post_init__(self):
        if not self.lemma:
            object.__setattr__(self, "lemma", self.form)
        if self.upos not in UPOS_TAGS:
            raise InputError(f"unknown UPOS tag {self.upos!r}")


@dataclass(frozen=True)
class MorphLayer:
    sentences: tuple[tuple[MorphToken, ...], ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def __getitem__(self, k: int) -> tuple[MorphToken, ...]:
        return self.sentences[k]


@dataclass(frozen=True)
class AnnotatedCorpus:
    """A corpus with optional morphology layers aligned pair-by-pair."""

    corpus: ParallelCorpus
    source_morph: MorphLayer | None = None
    target_morph: MorphLayer | None = None

    def __len__(self) -> int:
        return len(self.corpus)


@dataclass(frozen=True)
class TermEntry:
    source_tokens: Tokens
    target_lemma_tokens: Tokens
    upos: str | None = None

    def __post_init__(self):
        if not self.source_tokens or not self.target_lemma_tokens:
            raise InputError("glossary entry with an empty side")

    @property
    def source_text(self) -> str:
        return " ".join(self.source_tokens)


@dataclass(frozen=True)
class Match:
    start: int
    end: int
    entry: TermEntry


@dataclass(frozen=True)
class Glossary:
    """Ordered term entries, indexed by their first source token."""

    entries: tuple[TermEntry, ...] = ()
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        keys = set()
        for e in self.entries:
            key = (e.source_tokens, e.target_lemma_tokens)
            if key in keys:
                raise InputError(f"duplicate glossary entry {e.source_text!r}")
            keys.add(key)

    def __len__(self) -> int:
        return len(self.entries)

    def _by_first(self, fold: bool) -> dict[str, list[tuple[Tokens, TermEntry]]]:
        idx = self._index.get(fold)
        if idx is None:
            idx = {}
            for e in self.entries:
                src = tuple(t.casefold() for t in e.source_tokens) if fold else e.source_tokens
                idx.setdefault(src[0], []).append((src, e))
            self._index[fold] = idx
        return idx

    def find_all(self, tokens: Sequence[str], case_insensitive: bool = False) -> list[Match]:
        """Every (span, entry) whose source side equals the span, overlaps included.

        Sorted by start, then longest span first, then glossary order.
        """
        toks = [t.casefold() for t in tokens] if case_insensitive else list(tokens)
        idx = self._by_first(case_insensitive)
        found = []
        for i, tok in enumerate(toks):
            for order, (src, entry) in enumerate(idx.get(tok, ())):
                j = i + len(src)
                if j <= len(toks) and tuple(toks[i:j]) == src:
                    found.append((i, -j, order, Match(i, j, entry)))
        found.sort(key=lambda x: x[:3])
        return [m for *_, m in found]


# ---------------------------------------------------------------- reading


def _read_lines(path: str | Path) -> list[str]:
    out = []
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid UTF-8 ({exc.reason})") from None
            out.append(line.rstrip("\r\n"))
    return out


def read_sentences(path: str | Path) -> list[Tokens]:
    """One token tuple per line; empty lines give empty tuples."""
    return [tuple(line.split()) for line in _read_lines(path)]


def load_parallel_corpus(src_path: str | Path, tgt_path: str | Path) -> ParallelCorpus:
    src = read_sentences(src_path)
    tgt = read_sentences(tgt_path)
    if len(src) != len(tgt):
        raise InputError(
            f"line count mismatch: {src_path} has {len(src)} lines, {tgt_path} has {len(tgt)}"
        )
    pairs = []
    for i, (s, t) in enumerate(zip(src, tgt)):
        if not s or not t:
            logger.warning("dropping sentence pair %d: empty %s side", i, "source" if not s else "target")
            continue
        pairs.append(SentencePair(i, s, t))
    return ParallelCorpus(tuple(pairs), n_lines=len(src))


def format_sentences(sentences: Iterable[Sequence[str]]) -> str:
    return "".join(" ".join(s) + "\n" for s in sentences)


def write_sentences(path: str | Path, sentences: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_sentences(sentences))


def load_conllu_morph(path: str | Path) -> MorphLayer:
    sentences: list[tuple[MorphToken, ...]] = []
    current: list[MorphToken] = []
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            if current:
                sentences.append(tuple(current))
                current = []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            # multiword ranges and empty nodes carry no surface token of their own
            continue
        if not tok_id.isdigit():
            raise InputError(f"{path}:{lineno}: non-integer token id {tok_id!r}")
        if len(cols) < 2 or not cols[1] or cols[1] == "_":
            raise InputError(f"{path}:{lineno}: missing FORM column")
        form = cols[1]
        lemma = cols[2] if len(cols) > 2 and cols[2] not in ("", "_") else form
        upos = cols[3] if len(cols) > 3 and cols[3] not in ("", "_") else "X"
        if upos not in UPOS_TAGS:
            raise InputError(f"{path}:{lineno}: unknown UPOS tag {upos!r}")
        try:
            current.append(MorphToken(check_token(form), check_token(lemma), upos))
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    if current:
        sentences.append(tuple(current))
    return MorphLayer(tuple(sentences))


def format_conllu(layer: MorphLayer) -> str:
    parts = []
    for sent in layer.sentences:
        for k, m in enumerate(sent, 1):
            parts.append(f"{k}\t{m.form}\t{m.lemma}\t{m.upos}\t_\t_\t_\t_\t_\t_\n")
        parts.append("\n")
    return "".join(parts)


def attach_morph(corpus: ParallelCorpus | AnnotatedCorpus, layer: MorphLayer, side: str) -> AnnotatedCorpus:
    """Pair a morphology layer with one side of the corpus.

    Forms must equal the corpus tokens exactly, sentence by sentence.
    """
    if side not in ("source", "target"):
        raise ValueError(f"side must be 'source' or 'target', not {side!r}")
    ac = corpus if isinstance(corpus, AnnotatedCorpus) else AnnotatedCorpus(corpus)
    pairs = ac.corpus.pairs
    if len(layer) != len(pairs):
        raise InputError(f"morph layer has {len(layer)} sentences, corpus has {len(pairs)} pairs")
    for pair, morph in zip(pairs, layer.sentences):
        toks = pair.source if side == "source" else pair.target
        forms = tuple(m.form for m in morph)
        if forms != toks:
            raise InputError(
                f"{side} morph mismatch in sentence {pair.index}: "
                f"corpus {' '.join(toks)!r} vs layer {' '.join(forms)!r}"
            )
    if side == "source":
        return AnnotatedCorpus(ac.corpus, layer, ac.target_morph)
    return AnnotatedCorpus(ac.corpus, ac.source_morph, layer)


def load_glossary(path: str | Path) -> Glossary:
    entries: list[TermEntry] = []
    seen = set()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            raise InputError(f"{path}:{lineno}: expected source<TAB>target, got {line!r}")
        src, tgt = tuple(cols[0].split()), tuple(cols[1].split())
        if not src or not tgt:
            raise InputError(f"{path}:{lineno}: empty term")
        upos = cols[2].strip() if len(cols) > 2 and cols[2].strip() else None
        if upos is not None and upos not in UPOS_TAGS:
            raise InputError(f"{path}:{lineno}: unknown UPOS tag {upos!r}")
        if (src, tgt) in seen:
            logger.warning("%s:%d: duplicate glossary entry %r collapsed", path, lineno, " ".join(src))
            continue
        seen.add((src, tgt))
        entries.append(TermEntry(src, tgt, upos))
    return Glossary(tuple(entries))


def parse_links(line: str) -> Links:
    links = set()
    for item in line.split():
        i, sep, j = item.partition("-")
        if not sep or not i.isdigit() or not j.isdigit():
            raise InputError(f"malformed alignment pair {item!r}")
        links.add((int(i), int(j)))
    return frozenset(links)


def format_links(links: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(links))


def load_alignments(path: str | Path) -> list[Links]:
    out = []
    for lineno, line in enumerate(_read_lines(path), 1):
        try:
            out.append(parse_links(line))
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    return out


def write_alignments(path: str | Path, links: Iterable[Iterable[tuple[int, int]]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ls in links:
            fh.write(format_links(ls) + "\n")
