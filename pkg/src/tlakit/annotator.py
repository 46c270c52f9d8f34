"""Factored source annotation: TLA/ETA training data and glossary-driven inference input.

An annotated source word is marked ``s`` and immediately followed by its
target-language annotation tokens marked ``t``; all other words are ``w``.
TLA annotates with target lemmas, ETA with the exact target surface forms.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    AnnotatedCorpus,
    Glossary,
    InputError,
    Links,
    MorphToken,
    SentencePair,
    Tokens,
    check_token,
)

logger = logging.getLogger(__name__)

PIPE_ESCAPE = "&#124;"


class Factor(str, enum.Enum):
    W = "w"
    S = "s"
    T = "t"


@dataclass(frozen=True)
class FactoredToken:
    token: str
    factor: Factor

    def __post_init__(self):
        check_token(self.token)
        object.__setattr__(self, "factor", Factor(self.factor))


@dataclass(frozen=True)
class FactoredSentence:
    tokens: tuple[FactoredToken, ...]

    def __post_init__(self):
        prev = None
        for k, ft in enumerate(self.tokens):
            f = ft.factor
            if f is Factor.T and prev not in (Factor.S, Factor.T):
                raise ValueError(f"annotation token {k} ({ft.token!r}) does not follow a marked span")
            if prev is Factor.S and f is Factor.W:
                raise ValueError(f"marked span ending at token {k - 1} has no annotation")
            prev = f
        if prev is Factor.S:
            raise ValueError("marked span at sentence end has no annotation")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str | Factor]]) -> FactoredSentence:
        return cls(tuple(FactoredToken(t, Factor(f)) for t, f in pairs))

    @classmethod
    def plain(cls, tokens: Sequence[str]) -> FactoredSentence:
        return cls(tuple(FactoredToken(t, Factor.W) for t in tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> Tokens:
        return tuple(ft.token for ft in self.tokens)

    @property
    def factors(self) -> tuple[Factor, ...]:
        return tuple(ft.factor for ft in self.tokens)

    def strip(self) -> Tokens:
        """The source sentence with annotation tokens removed."""
        return tuple(ft.token for ft in self.tokens if ft.factor is not Factor.T)


@dataclass(frozen=True)
class AnnotationEvent:
    sentence_index: int
    start: int
    end: int
    annotation: Tokens
    provenance: str = "alignment-sampled"

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad span [{self.start},{self.end})")
        if not self.annotation:
            raise ValueError("empty annotation")


@dataclass(frozen=True)
class SamplingPolicy:
    seed: int = 0
    lo: float = 0.6
    hi: float = 1.0
    eligible: frozenset[str] = frozenset({"NOUN", "VERB"})

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"threshold interval [{self.lo}, {self.hi}) is not within [0, 1]")
        if not self.eligible:
            raise ValueError("eligible UPOS set is empty")
        object.__setattr__(self, "eligible", frozenset(self.eligible))


@dataclass(frozen=True)
class TermExpectation:
    sentence_index: int
    lemmas: Tokens
    source_term: str

    def __post_init__(self):
        if not self.lemmas:
            raise ValueError("expectation without lemma tokens")


# -------------------------------------------------------------- training


def select_candidates(
    pair: SentencePair,
    links: Links,
    target_morph: Sequence[MorphToken],
    policy: SamplingPolicy,
    exact_forms: bool = False,
) -> list[AnnotationEvent]:
    """One candidate per source word linked one-to-one to an eligible target word.

    The annotation is the target lemma, or the target surface form when
    ``exact_forms`` is set (ETA).
    """
    n_src, n_tgt = len(pair.source), len(pair.target)
    if len(target_morph) != n_tgt:
        raise InputError(f"sentence {pair.index}: morphology covers {len(target_morph)} of {n_tgt} target tokens")
    src_deg: dict[int, int] = {}
    tgt_deg: dict[int, int] = {}
    for s, t in links:
        if not (0 <= s < n_src and 0 <= t < n_tgt):
            raise InputError(f"sentence {pair.index}: link {s}-{t} out of range ({n_src}x{n_tgt})")
        src_deg[s] = src_deg.get(s, 0) + 1
        tgt_deg[t] = tgt_deg.get(t, 0) + 1
    out = []
    for s, t in sorted(links):
        if src_deg[s] != 1 or tgt_deg[t] != 1:
            continue
        m = target_morph[t]
        if m.upos not in policy.eligible:
            continue
        ann = m.form if exact_forms else m.lemma
        out.append(AnnotationEvent(pair.index, s, s + 1, (ann,)))
    return out


def select_tla_candidates(pair, links, target_morph, policy) -> list[AnnotationEvent]:
    return select_candidates(pair, links, target_morph, policy, exact_forms=False)


def sentence_rng(seed: int, sentence_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, sentence_index])


def sample_annotations(
    candidates: Sequence[AnnotationEvent], sentence_index: int, policy: SamplingPolicy
) -> list[AnnotationEvent]:
    """Keep each candidate whose uniform draw exceeds a per-sentence threshold.

    The threshold comes from U[lo, hi) and the per-candidate draws from
    U[0, 1), all from one stream seeded by (seed, sentence index).
    """
    rng = sentence_rng(policy.seed, sentence_index)
    threshold = rng.uniform(policy.lo, policy.hi)
    draws = rng.random(len(candidates))
    return [c for c, u in zip(candidates, draws) if u > threshold]


def apply_annotations(source: Sequence[str], events: Iterable[AnnotationEvent]) -> FactoredSentence:
    events = sorted(events, key=lambda e: e.start)
    for a, b in zip(events, events[1:]):
        if b.start < a.end:
            raise ValueError(f"overlapping annotation spans [{a.start},{a.end}) and [{b.start},{b.end})")
    if events and events[-1].end > len(source):
        raise ValueError(f"annotation span ends at {events[-1].end}, sentence has {len(source)} tokens")
    out: list[FactoredToken] = []
    pos = 0
    for ev in events:
        out.extend(FactoredToken(t, Factor.W) for t in source[pos:ev.start])
        out.extend(FactoredToken(t, Factor.S) for t in source[ev.start:ev.end])
        out.extend(FactoredToken(t, Factor.T) for t in ev.annotation)
        pos = ev.end
    out.extend(FactoredToken(t, Factor.W) for t in source[pos:])
    return FactoredSentence(tuple(out))


@dataclass
class TrainingSet:
    """Original pairs (all ``w``) followed by their annotated copies."""

    source: list[FactoredSentence] = field(default_factory=list)
    target: list[Tokens] = field(default_factory=list)
    events: list[list[AnnotationEvent]] = field(default_factory=list)
    n_original: int = 0
    n_dropped: int = 0

    def __len__(self) -> int:
        return len(self.source)

    @property
    def n_events(self) -> int:
        return sum(len(e) for e in self.events)


def _corpus_links(corpus: AnnotatedCorpus, alignments: Sequence[Links]) -> list[Links]:
    pairs = corpus.corpus.pairs
    if len(alignments) == len(pairs):
        return list(alignments)
    if len(alignments) == corpus.corpus.n_lines:
        return [alignments[p.index] for p in pairs]
    raise InputError(
        f"{len(alignments)} alignment lines for {len(pairs)} sentence pairs "
        f"({corpus.corpus.n_lines} input lines)"
    )


def build_training_set(
    corpus: AnnotatedCorpus,
    alignments: Sequence[Links],
    policy: SamplingPolicy,
    mode: str = "tla",
    drop_unannotated: bool = False,
) -> TrainingSet:
    if mode not in ("tla", "eta"):
        raise ValueError(f"mode must be 'tla' or 'eta', not {mode!r}")
    if corpus.target_morph is None:
        raise InputError("target morphology layer required")
    links = _corpus_links(corpus, alignments)
    out = TrainingSet(n_original=len(corpus))
    for pair in corpus.corpus:
        out.source.append(FactoredSentence.plain(pair.source))
        out.target.append(pair.target)
    for k, pair in enumerate(corpus.corpus):
        cands = select_candidates(pair, links[k], corpus.target_morph[k], policy, exact_forms=mode == "eta")
        chosen = sample_annotations(cands, pair.index, policy)
        if not chosen and drop_unannotated:
            out.n_dropped += 1
            continue
        out.source.append(apply_annotations(pair.source, chosen))
        out.target.append(pair.target)
        out.events.append(chosen)
    return out


def build_tla_training_set(corpus, alignments, policy, drop_unannotated=False) -> TrainingSet:
    return build_training_set(corpus, alignments, policy, "tla", drop_unannotated)


def build_eta_training_set(corpus, alignments, policy, drop_unannotated=False) -> TrainingSet:
    return build_training_set(corpus, alignments, policy, "eta", drop_unannotated)


def glossary_training_events(
    pair: SentencePair,
    glossary: Glossary,
    target_morph: Sequence[MorphToken],
    mode: str = "eta",
    case_insensitive: bool = True,
) -> list[AnnotationEvent]:
    """Term-driven annotation: a glossary match whose target lemmas also occur in the target.

    The annotation is the entry's lemmas (TLA) or the surface forms of the
    first matching target span (ETA). No sampling is applied.
    """
    fold = (lambda s: s.casefold()) if case_insensitive else (lambda s: s)
    tgt_lemmas = [fold(m.lemma) for m in target_morph]
    out = []
    for ev in match_glossary(pair.source, glossary, case_insensitive=case_insensitive, sentence_index=pair.index):
        want = [fold(t) for t in ev.annotation]
        k = len(want)
        for j in range(len(tgt_lemmas) - k + 1):
            if tgt_lemmas[j:j + k] == want:
                ann = tuple(m.form for m in target_morph[j:j + k]) if mode == "eta" else ev.annotation
                out.append(AnnotationEvent(pair.index, ev.start, ev.end, ann, "glossary-matched"))
                break
    return out



def build_glossary_training_set(
    corpus: AnnotatedCorpus,
    glossary: Glossary,
    mode: str = "eta",
    drop_unannotated: bool = False,
    case_insensitive: bool = True,
) -> TrainingSet:
    """Like ``build_training_set`` but annotating every glossary term found on both sides."""
    if mode not in ("tla", "eta"):
        raise ValueError(f"mode must be 'tla' or 'eta', not {mode!r}")
    if corpus.target_morph is None:
        raise InputError("target morphology layer required")
    out = TrainingSet(n_original=len(corpus))
    for pair in corpus.corpus:
        out.source.append(FactoredSentence.plain(pair.source))
        out.target.append(pair.target)
    for k, pair in enumerate(corpus.corpus):
        events = glossary_training_events(pair, glossary, corpus.target_morph[k], mode, case_insensitive)
        if not events and drop_unannotated:
            out.n_dropped += 1
            continue
        out.source.append(apply_annotations(pair.source, events))
        out.target.append(pair.target)
        out.events.append(events)
    return out

# ------------------------------------------------------------- inference


def match_glossary(
    sentence: Sequence[str],
    glossary: Glossary,
    source_morph: Sequence[MorphToken] | None = None,
    case_insensitive: bool = True,
    lemma_match: bool = False,
    sentence_index: int = 0,
) -> list[AnnotationEvent]:
    """Left-to-right, longest-first, non-overlapping glossary matches.

    With ``lemma_match`` and a morphology row, entries are matched against
    the source lemmas instead of the surface tokens. When several entries
    share a source side the first in glossary order wins.
    """
    keys = sentence
    if lemma_match and source_morph is not None:
        if len(source_morph) != len(sentence):
            raise InputError(f"sentence {sentence_index}: morphology row length differs from sentence")
        keys = [m.lemma for m in source_morph]
    events = []
    covered_until = 0
    for match in glossary.find_all(keys, case_insensitive):
        if match.start < covered_until:
            continue
        events.append(
            AnnotationEvent(sentence_index, match.start, match.end, match.entry.target_lemma_tokens, "glossary-matched")
        )
        covered_until = match.end
    return events


def annotate_inference_input(
    sentence: Sequence[str],
    glossary: Glossary,
    source_morph: Sequence[MorphToken] | None = None,
    case_insensitive: bool = True,
    lemma_match: bool = False,
    sentence_index: int = 0,
) -> tuple[FactoredSentence, list[TermExpectation]]:
    events = match_glossary(sentence, glossary, source_morph, case_insensitive, lemma_match, sentence_index)
    expectations = [
        TermExpectation(sentence_index, ev.annotation, " ".join(sentence[ev.start:ev.end])) for ev in events
    ]
    return apply_annotations(sentence, events), expectations


def format_expectations(expectations: Iterable[TermExpectation]) -> str:
    return "".join(f"{x.sentence_index}\t{' '.join(x.lemmas)}\t{x.source_term}\n" for x in expectations)


def parse_expectations(lines: Iterable[str]) -> list[TermExpectation]:
    out = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 2 or not cols[0].strip().isdigit() or not cols[1].split():
            raise InputError(f"expectations line {lineno}: expected index<TAB>lemmas<TAB>term")
        out.append(TermExpectation(int(cols[0]), tuple(cols[1].split()), cols[2] if len(cols) > 2 else ""))
    return out


# --------------------------------------------------------- serialization


def _escape(tok: str) -> str:
    if PIPE_ESCAPE in tok:
        raise ValueError(f"token {tok!r} contains the reserved escape {PIPE_ESCAPE!r}")
    return tok.replace("|", PIPE_ESCAPE)


def serialize_factored(fs: FactoredSentence, fmt: str = "inline") -> str | tuple[str, str]:
    """``inline`` gives one ``tok|f`` line; ``parallel`` a (tokens, factors) line pair."""
    if fmt == "inline":
        return " ".join(f"{_escape(ft.token)}|{ft.factor.value}" for ft in fs.tokens)
    if fmt == "parallel":
        return " ".join(fs.words), " ".join(f.value for f in fs.factors)
    raise ValueError(f"unknown factored format {fmt!r}")


def parse_factored(text: str | tuple[str, str], fmt: str = "inline") -> FactoredSentence:
    if fmt == "inline":
        pairs = []
        for k, item in enumerate(text.split()):
            tok, sep, fac = item.rpartition("|")
            if not sep or not tok:
                raise InputError(f"token {k} ({item!r}): missing factor separator")
            if fac not in ("w", "s", "t"):
                raise InputError(f"token {k} ({item!r}): unknown factor {fac}")
            pairs.append((tok.replace(PIPE_ESCAPE, "|"), fac))
    elif fmt == "parallel":
        tokens_line, factors_line = text
        toks, facs = tokens_line.split(), factors_line.split()
        if len(toks) != len(facs):
            raise InputError(f"{len(toks)} tokens but {len(facs)} factors")
        for k, fac in enumerate(facs):
            if fac not in ("w", "s", "t"):
                raise InputError(f"factor {k}: unknown factor {fac}")
        pairs = list(zip(toks, facs))
    else:
        raise ValueError(f"unknown factored format {fmt!r}")
    try:
        return FactoredSentence.from_pairs(pairs)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def propagate_factors_to_subwords(
    fs: FactoredSentence, segmentation: Sequence[Sequence[str]], joiner: str = "@@"
) -> FactoredSentence:
    """Give every subword unit its parent token's factor.

    ``segmentation[k]`` are the units of token k; units carrying the
    ``joiner`` suffix continue into the next unit.
    """
    if len(segmentation) != len(fs.tokens):
        raise ValueError(f"segmentation has {len(segmentation)} entries for {len(fs.tokens)} tokens")
    out = []
    for k, (ft, units) in enumerate(zip(fs.tokens, segmentation)):
        joined = "".join(u[: -len(joiner)] if joiner and u.endswith(joiner) else u for u in units)
        if not units or joined != ft.token:
            raise ValueError(f"units {list(units)} do not spell token {k} ({ft.token!r})")
        out.extend(FactoredToken(u, ft.factor) for u in units)
    return FactoredSentence(tuple(out))

