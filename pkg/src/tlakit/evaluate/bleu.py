"""Corpus-level BLEU over pre-tokenized, single-reference input."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BleuConfig:
    max_n: int = 4
    smoothing: str = "none"  # or "epsilon"
    epsilon: float = 1e-9
    lowercase: bool = False

    def __post_init__(self):
        if self.max_n < 1:
            raise ValueError("max_n must be >= 1")
        if self.smoothing not in ("none", "epsilon"):
            raise ValueError(f"unknown smoothing {self.smoothing!r}")


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int

    def as_dict(self) -> dict:
        return {
            "bleu": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_len": self.hyp_len,
            "ref_len": self.ref_len,
        }


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[k:k + n]) for k in range(len(tokens) - n + 1))


def sentence_stats(hyp: Sequence[str], ref: Sequence[str], max_n: int = 4) -> list[int]:
    """[matches_1..matches_N, totals_1..totals_N, hyp_len, ref_len] with clipped matches."""
    matches, totals = [], []
    for n in range(1, max_n + 1):
        h, r = _ngrams(hyp, n), _ngrams(ref, n)
        matches.append(sum(min(c, r[g]) for g, c in h.items()))
        totals.append(max(len(hyp) - n + 1, 0))
    return matches + totals + [len(hyp), len(ref)]


def corpus_stats(hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]], config: BleuConfig) -> np.ndarray:
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if config.lowercase:
        hyps = [[t.lower() for t in h] for h in hyps]
        refs = [[t.lower() for t in r] for r in refs]
    rows = [sentence_stats(h, r, config.max_n) for h, r in zip(hyps, refs)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), 2 * config.max_n + 2)


def score_from_stats(stats: Sequence[int], config: BleuConfig = BleuConfig()) -> BleuScore:
    n = config.max_n
    matches = [int(x) for x in stats[:n]]
    totals = [int(x) for x in stats[n:2 * n]]
    c, r = int(stats[2 * n]), int(stats[2 * n + 1])
    precisions = []
    for m, t in zip(matches, totals):
        p = m / t if t else 0.0
        if p == 0.0 and config.smoothing == "epsilon":
            p = config.epsilon / t if t else config.epsilon
        precisions.append(p)
    if c == 0:
        bp = 0.0
    elif c < r:
        bp = math.exp(1.0 - r / c)
    else:
        bp = 1.0
    if bp == 0.0 or min(precisions) <= 0.0:
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / n)
    return BleuScore(score, tuple(precisions), bp, c, r)


def corpus_bleu(
    hypotheses: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    config: BleuConfig = BleuConfig(),
) -> BleuScore:
    stats = corpus_stats(hypotheses, references, config)
    return score_from_stats(stats.sum(axis=0), config)
