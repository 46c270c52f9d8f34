"""Deterministic lookup lemmatizer built from already-tagged data."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .corpus import UPOS_TAGS, InputError, MorphToken, _read_lines, load_conllu_morph


@dataclass(frozen=True)
class LookupLemmatizer:
    table: dict[str, tuple[str, str]]
    lowercase: bool = False

    def __len__(self) -> int:
        return len(self.table)

    def lookup(self, form: str) -> MorphToken:
        key = form.casefold() if self.lowercase else form
        hit = self.table.get(key)
        if hit is None:
            return MorphToken(form, form, "X")
        return MorphToken(form, hit[0], hit[1])

    def lemmatize(self, tokens: Sequence[str]) -> tuple[MorphToken, ...]:
        return tuple(self.lookup(t) for t in tokens)

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for form in sorted(self.table):
                lemma, upos = self.table[form]
                fh.write(f"{form}\t{lemma}\t{upos}\n")


def lemmatize(lemmatizer: LookupLemmatizer, tokens: Sequence[str]) -> tuple[MorphToken, ...]:
    return lemmatizer.lemmatize(tokens)


def _tsv_rows(path: str | Path) -> Iterable[tuple[str, str, str]]:
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 2 or not cols[0] or not cols[1]:
            raise InputError(f"{path}:{lineno}: expected form<TAB>lemma[<TAB>upos]")
        upos = cols[2].strip() if len(cols) > 2 and cols[2].strip() not in ("", "_") else "X"
        if upos not in UPOS_TAGS:
            raise InputError(f"{path}:{lineno}: unknown UPOS tag {upos!r}")
        yield cols[0], cols[1], upos


def count_rows(rows: Iterable[tuple[str, str, str]], lowercase: bool = False) -> LookupLemmatizer:
    """Majority (lemma, upos) per form; count ties go to the smaller (lemma, upos)."""
    counts: dict[str, Counter] = {}
    for form, lemma, upos in rows:
        key = form.casefold() if lowercase else form
        counts.setdefault(key, Counter())[(lemma, upos)] += 1
    if not counts:
        raise InputError("no lemma rows found")
    table = {}
    for form, c in counts.items():
        table[form] = min(c.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return LookupLemmatizer(table, lowercase)


def build_lookup(paths: Sequence[str | Path], lowercase: bool = False) -> LookupLemmatizer:
    """Build from CoNLL-U files (``.conllu``) and/or form/lemma/upos TSV files."""
    if not paths:
        raise InputError("build_lookup needs at least one file")

    def rows():
        for p in paths:
            if str(p).endswith(".conllu"):
                for sent in load_conllu_morph(p).sentences:
                    for m in sent:
                        yield m.form, m.lemma, m.upos
            else:
                yield from _tsv_rows(p)

    return count_rows(rows(), lowercase)
