"""Lemmatized term exact-match accuracy."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ..annotator import TermExpectation


@dataclass(frozen=True)
class TermResult:
    sentence_index: int
    lemmas: tuple[str, ...]
    matched: bool


@dataclass(frozen=True)
class TermAccuracyReport:
    total: int
    matched: int
    details: tuple[TermResult, ...]

    @property
    def accuracy(self) -> float | None:
        """Percentage of matched occurrences; None when there are no terms."""
        return 100.0 * self.matched / self.total if self.total else None

    def as_dict(self) -> dict:
        return {"total": self.total, "matched": self.matched, "accuracy": self.accuracy}


def contains_run(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    k = len(needle)
    return any(list(haystack[j:j + k]) == list(needle) for j in range(len(haystack) - k + 1))


def contains_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    it = iter(haystack)
    return all(any(t == n for t in it) for n in needle)


def term_accuracy(
    hypothesis_lemmas: Sequence[Sequence[str]],
    expectations: Sequence[TermExpectation],
    case_insensitive: bool = True,
    contiguous: bool = True,
    per_occurrence: bool = True,
) -> TermAccuracyReport:
    """Share of expected term occurrences whose lemmas appear contiguously in the hypothesis.

    Every expectation is judged on its own, so a term expected twice in a
    sentence counts twice. ``contiguous=False`` only asks for the lemmas in
    order with gaps allowed; ``per_occurrence=False`` counts each
    (sentence, lemmas) pair once.
    """
    fold = str.casefold if case_insensitive else (lambda s: s)
    folded = [[fold(t) for t in sent] for sent in hypothesis_lemmas]
    details = []
    seen = set()
    for x in expectations:
        if not 0 <= x.sentence_index < len(folded):
            raise ValueError(f"expectation for sentence {x.sentence_index}, hypotheses have {len(folded)}")
        needle = [fold(t) for t in x.lemmas]
        if not per_occurrence:
            key = (x.sentence_index, tuple(needle))
            if key in seen:
                continue
            seen.add(key)
        sent = folded[x.sentence_index]
        hit = contains_run(sent, needle) if contiguous else contains_subsequence(sent, needle)
        details.append(TermResult(x.sentence_index, x.lemmas, hit))
    return TermAccuracyReport(len(details), sum(d.matched for d in details), tuple(details))
