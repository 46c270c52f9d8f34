"""Word alignment: IBM Model 1 plus a diagonal-favouring reparameterized Model 2.

The output side ``f`` (by default: target lemmas) is generated word by word
from the conditioning side ``e`` (by default: source forms) or from NULL.
For output position i of m and conditioning position j of n the link prior is

    delta(0 | i, m, n) = p0
    delta(j | i, m, n) = (1 - p0) * exp(lam * h(i, j, m, n)) / Z(i, m, n)
    h(i, j, m, n)      = -|i/m - j/n|

with positions counted from 1.  EM re-estimates t(f|e); after every
iteration ``lam`` is refit by bisection on the derivative of the expected
complete-data log-likelihood, which is concave in ``lam``.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import InputError, Links, MorphLayer, ParallelCorpus, SentencePair, Tokens, _read_lines

NULL = ""  # never a valid token
OOV_FLOOR = 1e-9
SHARD_SIZE = 256
DIRECTIONS = ("source-to-target", "target-to-source")

Bitext = list[tuple[Tokens, Tokens]]  # (conditioning e, output f) per sentence


def make_bitext(
    corpus: ParallelCorpus,
    target_morph: MorphLayer | None = None,
    direction: str = "source-to-target",
) -> Bitext:
    """Pairs of (conditioning, output) token tuples.

    With a target morphology layer the target side is replaced by its
    lemmas. ``source-to-target`` conditions on the source side, so each
    target token gets at most one source link.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    out = []
    for k, pair in enumerate(corpus):
        tgt = pair.target if target_morph is None else tuple(m.lemma for m in target_morph[k])
        out.append((pair.source, tgt) if direction == "source-to-target" else (tgt, pair.source))
    return out


class TranslationTable:
    """Conditional probabilities t(f|e); NULL is the empty string."""

    def __init__(self, probs: dict[tuple[str, str], float]):
        self.probs = probs
        self.output_vocab = frozenset(f for _, f in probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, key: tuple[str, str]) -> float:
        return self.probs.get(key, 0.0)

    def prob(self, f: str, e: str) -> float:
        return self.probs.get((e, f), 0.0)

    def totals(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for (e, _), p in self.probs.items():
            out[e] = out.get(e, 0.0) + p
        return out


def _estimate(counts: dict[tuple[str, str], float], alpha: float) -> TranslationTable:
    totals: dict[str, float] = {}
    sizes: dict[str, int] = {}
    for (e, _), c in counts.items():
        totals[e] = totals.get(e, 0.0) + c
        sizes[e] = sizes.get(e, 0) + 1
    return TranslationTable(
        {(e, f): (c + alpha) / (totals[e] + alpha * sizes[e]) for (e, f), c in counts.items()}
    )


def _merge(parts: Sequence[dict], into: dict) -> dict:
    for part in parts:
        for k, v in part.items():
            into[k] = into.get(k, 0.0) + v
    return into


def _shards(bitext: Bitext) -> list[Bitext]:
    # shard boundaries depend only on the data, so float sums are
    # reduced in the same order whatever the worker count
    return [bitext[k:k + SHARD_SIZE] for k in range(0, len(bitext), SHARD_SIZE)]


_shared = None


def _init_worker(shared):
    global _shared
    _shared = shared


def _call_shared(args):
    fn, shard = args
    return fn(_shared, shard)


def _map_shards(fn: Callable, shared, shards: list[Bitext], workers: int) -> list:
    if workers <= 1 or len(shards) <= 1:
        return [fn(shared, s) for s in shards]
    with ProcessPoolExecutor(min(workers, len(shards)), initializer=_init_worker, initargs=(shared,)) as ex:
        return list(ex.map(_call_shared, [(fn, s) for s in shards]))


# ------------------------------------------------------------------ Model 1


def _model1_estep(t: TranslationTable | None, shard: Bitext):
    counts: dict[tuple[str, str], float] = {}
    ll = 0.0
    for e_toks, f_toks in shard:
        es = (NULL,) + e_toks
        for f in f_toks:
            ps = [1.0 if t is None else t.probs.get((e, f), 0.0) for e in es]
            z = sum(ps)
            ll += math.log(z / len(es))
            for e, p in zip(es, ps):
                counts[(e, f)] = counts.get((e, f), 0.0) + p / z
    return counts, ll


def iter_model1(bitext: Bitext, iterations: int, workers: int = 1) -> Iterator[tuple[float, TranslationTable]]:
    """Yield (log-likelihood before the step, table after the step) per EM iteration.

    Starts from a uniform table; the likelihood omits the constant length term.
    The uniform start scales every t(f|e) equally, so it is represented by
    ``None`` and contributes a constant factor that cancels in the posteriors.
    """
    if not bitext:
        raise InputError("cannot train on an empty corpus")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    shards = _shards(bitext)
    n_f = len({f for _, fs in bitext for f in fs})
    table = None
    for _ in range(iterations):
        parts = _map_shards(_model1_estep, table, shards, workers)
        counts = _merge([c for c, _ in parts], {})
        ll = sum(x for _, x in parts)
        if table is None:
            ll -= sum(len(fs) for _, fs in bitext) * math.log(n_f)
        table = _estimate(counts, 0.0)
        yield ll, table


def train_model1(bitext: Bitext, iterations: int = 5, workers: int = 1) -> TranslationTable:
    table = None
    for _, table in iter_model1(bitext, iterations, workers):
        pass
    return table


# ------------------------------------------------------- diagonal Model 2


def _feature(i: int, j: int, m: int, n: int) -> float:
    return -abs(i / m - j / n)


def distortion(i: int, m: int, n: int, tension: float, null_prob: float) -> list[float]:
    """delta(j | i, m, n) for j = 0 (NULL) .. n, positions counted from 1."""
    ws = [math.exp(tension * _feature(i, j, m, n)) for j in range(1, n + 1)]
    z = sum(ws)
    return [null_prob] + [(1.0 - null_prob) * w / z for w in ws]


def _expected_feature(i: int, m: int, n: int, tension: float) -> float:
    hs = [_feature(i, j, m, n) for j in range(1, n + 1)]
    ws = [math.exp(tension * h) for h in hs]
    return sum(w * h for w, h in zip(ws, hs)) / sum(ws)


@dataclass(frozen=True)
class DiagonalConfig:
    iterations: int = 5
    initial_tension: float = 4.0
    null_prob: float = 0.08
    tension_steps: int = 8
    smoothing_alpha: float = 0.01
    tension_min: float = 0.1
    tension_max: float = 14.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.null_prob < 1.0:
            raise ValueError("null_prob must lie in [0, 1)")
        if self.initial_tension < 0 or self.smoothing_alpha < 0 or self.tension_steps < 0:
            raise ValueError("tension, smoothing and tension_steps must be non-negative")


@dataclass(frozen=True)
class DiagonalAlignmentModel:
    table: TranslationTable
    tension: float
    null_prob: float
    direction: str = "source-to-target"

    def distortion(self, i: int, m: int, n: int) -> list[float]:
        return distortion(i, m, n, self.tension, self.null_prob)


def _diag_estep(params, shard: Bitext):
    t, tension, p0 = params
    uniform = t is None
    counts: dict[tuple[str, str], float] = {}
    feat_weights: dict[tuple[int, int, int], float] = {}
    emp_feat = 0.0
    ll = 0.0
    cache: dict[tuple[int, int], list[list[float]]] = {}
    for e_toks, f_toks in shard:
        m, n = len(f_toks), len(e_toks)
        deltas = cache.get((m, n))
        if deltas is None:
            deltas = cache[(m, n)] = [distortion(i, m, n, tension, p0) for i in range(1, m + 1)]
        es = (NULL,) + e_toks
        for i, f in enumerate(f_toks, 1):
            d = deltas[i - 1]
            if uniform:
                ps = d[:]
            else:
                probs = t.probs
                ps = [dj * probs.get((e, f), 0.0) for dj, e in zip(d, es)]
            z = sum(ps)
            if z <= 0.0:
                continue
            ll += math.log(z)
            for j, (e, p) in enumerate(zip(es, ps)):
                post = p / z
                counts[(e, f)] = counts.get((e, f), 0.0) + post
                if j:
                    emp_feat += post * _feature(i, j, m, n)
            key = (i, m, n)
            feat_weights[key] = feat_weights.get(key, 0.0) + (1.0 - ps[0] / z)
    return counts, ll, emp_feat, feat_weights


def _fit_tension(emp_feat: float, weights: dict[tuple[int, int, int], float], cfg: DiagonalConfig) -> float:
    def slope(lam: float) -> float:
        return emp_feat - sum(w * _expected_feature(i, m, n, lam) for (i, m, n), w in sorted(weights.items()))

    lo, hi = cfg.tension_min, cfg.tension_max
    for _ in range(cfg.tension_steps):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def iter_diagonal(
    bitext: Bitext,
    config: DiagonalConfig = DiagonalConfig(),
    init: TranslationTable | None = None,
    direction: str = "source-to-target",
    workers: int = 1,
) -> Iterator[tuple[float, DiagonalAlignmentModel]]:
    """Yield (log-likelihood before the step, model after the step) per EM iteration.

    With ``tension_steps=0`` the tension stays at its initial value.
    """
    if not bitext:
        raise InputError("cannot train on an empty corpus")
    shards = _shards(bitext)
    table, tension = init, config.initial_tension
    for _ in range(config.iterations):
        parts = _map_shards(_diag_estep, (table, tension, config.null_prob), shards, workers)
        counts = _merge([p[0] for p in parts], {})
        ll = sum(p[1] for p in parts)
        if table is None:
            n_f = len({f for _, fs in bitext for f in fs})
            ll -= sum(len(fs) for _, fs in bitext) * math.log(n_f)
        emp = sum(p[2] for p in parts)
        weights = _merge([p[3] for p in parts], {})
        table = _estimate(counts, config.smoothing_alpha)
        if config.tension_steps:
            tension = _fit_tension(emp, weights, config)
        yield ll, DiagonalAlignmentModel(table, tension, config.null_prob, direction)


def train_diagonal(
    bitext: Bitext,
    config: DiagonalConfig = DiagonalConfig(),
    init: TranslationTable | None = None,
    direction: str = "source-to-target",
    workers: int = 1,
) -> DiagonalAlignmentModel:
    model = None
    for _, model in iter_diagonal(bitext, config, init, direction, workers):
        pass
    return model


def corpus_loglikelihood(model: DiagonalAlignmentModel, bitext: Bitext, floor: float = 0.0) -> float:
    """Sum over sentences of log p(f | e), marginalizing over alignments.

    Unseen pairs count as ``floor``; with the default of 0 a token no
    conditioning word can explain makes the result ``-inf``.
    """
    probs = model.table.probs
    ll = 0.0
    for e_toks, f_toks in bitext:
        m, n = len(f_toks), len(e_toks)
        es = (NULL,) + tuple(e_toks)
        for i, f in enumerate(f_toks, 1):
            d = model.distortion(i, m, n)
            z = sum(dj * probs.get((e, f), floor) for dj, e in zip(d, es))
            if z <= 0.0:
                return -math.inf
            ll += math.log(z)
    return ll


def viterbi_links(model: DiagonalAlignmentModel, e_toks: Sequence[str], f_toks: Sequence[str]) -> list[tuple[int, int]]:
    """Best (e index, f index) per output token, 0-based; NULL choices are omitted.

    An output type never seen in training always goes to NULL. Otherwise
    unseen pairs score ``OOV_FLOOR``; ties prefer NULL, then the position
    closest to the diagonal, then the smaller index.
    """
    probs = model.table.probs
    vocab = model.table.output_vocab
    m, n = len(f_toks), len(e_toks)
    links = []
    for i, f in enumerate(f_toks, 1):
        if f not in vocab:
            continue
        d = model.distortion(i, m, n)
        best_j = 0
        best = d[0] * probs.get((NULL, f), OOV_FLOOR)
        best_dist = math.inf
        for j, e in enumerate(e_toks, 1):
            s = d[j] * probs.get((e, f), OOV_FLOOR)
            dist = -_feature(i, j, m, n)
            if s > best or (s == best and best_j and dist < best_dist):
                best, best_j, best_dist = s, j, dist
        if best_j:
            links.append((best_j - 1, i - 1))
    return links


def viterbi_align(
    model: DiagonalAlignmentModel,
    pair: SentencePair,
    target_lemmas: Sequence[str] | None = None,
) -> Links:
    """Viterbi links for one pair as (source index, target index).

    ``target_lemmas`` substitutes the target tokens, e.g. with their lemmas.
    """
    tgt = tuple(target_lemmas) if target_lemmas is not None else pair.target
    if len(tgt) != len(pair.target):
        raise InputError(f"sentence {pair.index}: lemma count differs from target token count")
    if model.direction == "source-to-target":
        return frozenset(viterbi_links(model, pair.source, tgt))
    return frozenset((s, t) for t, s in viterbi_links(model, tgt, pair.source))


def align_corpus(
    model: DiagonalAlignmentModel, corpus: ParallelCorpus, target_morph: MorphLayer | None = None
) -> list[Links]:
    out = []
    for k, pair in enumerate(corpus):
        lemmas = None if target_morph is None else [m.lemma for m in target_morph[k]]
        out.append(viterbi_align(model, pair, lemmas))
    return out


# ------------------------------------------------------------ symmetrize

_NEIGHBOURS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


def symmetrize(forward: Links, reverse: Links, heuristic: str = "grow-diag-final-and") -> Links:
    """Combine two directional link sets given in the same (source, target) coordinates."""
    fwd, rev = set(forward), set(reverse)
    if heuristic == "intersection":
        return frozenset(fwd & rev)
    if heuristic == "union":
        return frozenset(fwd | rev)
    if heuristic != "grow-diag-final-and":
        raise ValueError(f"unknown symmetrization heuristic {heuristic!r}")

    union = fwd | rev
    links = fwd & rev
    src_done = {s for s, _ in links}
    tgt_done = {t for _, t in links}

    def add(p):
        links.add(p)
        src_done.add(p[0])
        tgt_done.add(p[1])

    grown = True
    while grown:
        grown = False
        for s, t in sorted(links):
            for ds, dt in _NEIGHBOURS:
                cand = (s + ds, t + dt)
                if cand in union and cand not in links and (cand[0] not in src_done or cand[1] not in tgt_done):
                    add(cand)
                    grown = True
    for directional in (fwd, rev):
        for p in sorted(directional):
            if p not in links and p[0] not in src_done and p[1] not in tgt_done:
                add(p)
    return frozenset(links)


# ----------------------------------------------------------- checkpoints

_HEADER = "#tlakit-diagonal-model\tversion=1"


def format_model(model: DiagonalAlignmentModel) -> str:
    lines = [
        f"{_HEADER}\ttension={model.tension!r}\tnull_prob={model.null_prob!r}\tdirection={model.direction}"
    ]
    for (e, f), p in sorted(model.table.probs.items()):
        lines.append(f"{e}\t{f}\t{p!r}")
    return "\n".join(lines) + "\n"


def save_model(model: DiagonalAlignmentModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_model(model))


def load_model(path: str | Path) -> DiagonalAlignmentModel:
    lines = _read_lines(path)
    if not lines or not lines[0].startswith(_HEADER):
        raise InputError(f"{path}: not a model checkpoint")
    meta = dict(kv.split("=", 1) for kv in lines[0].split("\t")[1:])
    probs = {}
    for lineno, line in enumerate(lines[1:], 2):
        cols = line.split("\t")
        if len(cols) != 3:
            raise InputError(f"{path}:{lineno}: expected e<TAB>f<TAB>prob")
        probs[(cols[0], cols[1])] = float(cols[2])
    return DiagonalAlignmentModel(
        TranslationTable(probs), float(meta["tension"]), float(meta["null_prob"]), meta["direction"]
    )


def with_tension(model: DiagonalAlignmentModel, tension: float) -> DiagonalAlignmentModel:
    return replace(model, tension=tension)
