"""Paired bootstrap resampling for comparing two systems' BLEU."""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bleu import BleuConfig, corpus_stats, score_from_stats

CHUNK = 50


@dataclass(frozen=True)
class SignificanceReport:
    replicates: int
    seed: int
    bleu_a: float
    bleu_b: float
    wins_a: float
    wins_b: float
    ties: float
    p_value: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _replicate_diffs(stats_a, stats_b, seed: int, start: int, stop: int, config: BleuConfig) -> np.ndarray:
    n = len(stats_a)
    out = np.empty(stop - start)
    for k, r in enumerate(range(start, stop)):
        idx = np.random.default_rng([seed, r]).integers(0, n, n)
        a = score_from_stats(stats_a[idx].sum(axis=0), config).score
        b = score_from_stats(stats_b[idx].sum(axis=0), config).score
        out[k] = a - b
    return out


def paired_bootstrap(
    hyps_a: Sequence[Sequence[str]],
    hyps_b: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    replicates: int = 1000,
    seed: int = 0,
    config: BleuConfig = BleuConfig(),
    workers: int = 1,
) -> SignificanceReport:
    """One-sided test that the full-corpus BLEU ordering of A and B holds up.

    Replicate r resamples sentence indices with a generator seeded by
    (seed, r). The p-value is the share of replicates whose difference does
    not have the full-corpus sign; ties count against significance, so a
    zero full-corpus difference gives p = 1.
    """
    if not len(hyps_a) == len(hyps_b) == len(references):
        raise ValueError(f"corpus sizes differ: {len(hyps_a)}, {len(hyps_b)}, {len(references)}")
    if not references:
        raise ValueError("empty test corpus")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    stats_a = corpus_stats(hyps_a, references, config)
    stats_b = corpus_stats(hyps_b, references, config)
    full_a = score_from_stats(stats_a.sum(axis=0), config).score
    full_b = score_from_stats(stats_b.sum(axis=0), config).score
    observed = np.sign(full_a - full_b)

    chunks = [(s, min(s + CHUNK, replicates)) for s in range(0, replicates, CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda c: _replicate_diffs(stats_a, stats_b, seed, *c, config), chunks))
    else:
        parts = [_replicate_diffs(stats_a, stats_b, seed, *c, config) for c in chunks]
    diffs = np.concatenate(parts)

    wins_a = int((diffs > 0).sum())
    wins_b = int((diffs < 0).sum())
    ties = replicates - wins_a - wins_b
    if observed == 0:
        failures = replicates
    else:
        failures = int((np.sign(diffs) != observed).sum())
    return SignificanceReport(
        replicates=replicates,
        seed=seed,
        bleu_a=full_a,
        bleu_b=full_b,
        wins_a=wins_a / replicates,
        wins_b=wins_b / replicates,
        ties=ties / replicates,
        p_value=failures / replicates,
    )
