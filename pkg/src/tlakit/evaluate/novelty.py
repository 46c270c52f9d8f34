"""Hypothesis wordforms that never occur in the training data."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

from ..corpus import InputError

MAX_EXAMPLES = 3


@dataclass(frozen=True)
class NovelForm:
    form: str
    frequency: int
    examples: tuple[int, ...]


@dataclass(frozen=True)
class NoveltyReport:
    forms: tuple[NovelForm, ...]
    hypothesis_types: int

    def __len__(self) -> int:
        return len(self.forms)

    def as_dict(self) -> dict:
        return {
            "novel_types": len(self.forms),
            "hypothesis_types": self.hypothesis_types,
            "forms": [
                {"form": f.form, "frequency": f.frequency, "examples": list(f.examples)} for f in self.forms
            ],
        }


def vocabulary(path: str | Path, lowercase: bool = False) -> set[str]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"training file not found: {path}")
    vocab = set()
    with open(path, encoding="utf-8", errors="strict") as fh:
        for line in fh:
            vocab.update(line.lower().split() if lowercase else line.split())
    return vocab


def novel_wordforms(
    hypotheses: Sequence[Sequence[str]],
    training_src_path: str | Path,
    training_tgt_path: str | Path,
    lowercase: bool = False,
) -> NoveltyReport:
    """Hypothesis token types absent from both training sides, most frequent first."""
    known = vocabulary(training_src_path, lowercase) | vocabulary(training_tgt_path, lowercase)
    freq: dict[str, int] = {}
    examples: dict[str, list[int]] = {}
    for k, sent in enumerate(hypotheses):
        for tok in sent:
            form = tok.lower() if lowercase else tok
            if form in known:
                continue
            freq[form] = freq.get(form, 0) + 1
            ex = examples.setdefault(form, [])
            if len(ex) < MAX_EXAMPLES and (not ex or ex[-1] != k):
                ex.append(k)
    types = {(t.lower() if lowercase else t) for s in hypotheses for t in s}
    forms = sorted(freq, key=lambda f: (-freq[f], f))
    return NoveltyReport(tuple(NovelForm(f, freq[f], tuple(examples[f])) for f in forms), len(types))
