"""tlakit: alignment, TLA/ETA annotation and evaluation for terminology-aware MT.

Every option can also come from a ``--config`` file of ``key=value`` lines
or from an environment variable ``TLAKIT_<OPTION>`` (dashes as
underscores). Precedence: flags, then environment, then config file, then
defaults. Exit status is 0 on success, 2 when an input violates its
contract and 1 on internal errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import __version__, report
from .aligner import (
    DiagonalConfig,
    align_corpus,
    make_bitext,
    save_model,
    symmetrize,
    train_diagonal,
    train_model1,
)
from .annotator import (
    FactoredSentence,
    SamplingPolicy,
    annotate_inference_input,
    build_glossary_training_set,
    build_training_set,
    format_expectations,
    parse_expectations,
    serialize_factored,
)
from .corpus import (
    InputError,
    attach_morph,
    load_alignments,
    load_conllu_morph,
    load_glossary,
    load_parallel_corpus,
    read_sentences,
    write_alignments,
    _read_lines,
)
from .evaluate import (
    BleuConfig,
    corpus_bleu,
    free_marginal_kappa,
    load_judgments,
    novel_wordforms,
    paired_bootstrap,
    term_accuracy,
)
from .lemmas import build_lookup

logger = logging.getLogger("tlakit")

ENV_PREFIX = "TLAKIT_"


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _seed(value) -> int | str:
    if str(value) == "auto":
        return "auto"
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _positive(value) -> int:
    n = int(value)
    if n < 1:
        raise ValueError(f"must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class Opt:
    flag: str
    type: Callable[[Any], Any] = str
    default: Any = None
    help: str = ""
    required: bool = False
    choices: tuple | None = None

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")

    @property
    def is_flag(self) -> bool:
        return self.type is _bool


COMMON = [
    Opt("--workers", _positive, 1, "worker processes/threads; never changes results"),
    Opt("--json", _bool, False, "emit a JSON report"),
]

COMMANDS: dict[str, list[Opt]] = {
    "align": [
        Opt("--src", required=True, help="source sentences, one per line"),
        Opt("--tgt", required=True, help="target sentences, one per line"),
        Opt("--tgt-conllu", help="target CoNLL-U; align its lemmas instead of the forms"),
        Opt("--iters-m1", _positive, 5, "Model 1 EM iterations"),
        Opt("--iters-diag", _positive, 5, "diagonal model EM iterations"),
        Opt("--tension", float, 4.0, "initial diagonal tension"),
        Opt("--p0", float, 0.08, "null link probability"),
        Opt("--alpha", float, 0.01, "add-alpha smoothing of translation counts"),
        Opt("--tension-steps", int, 8, "bisection steps for the tension per iteration"),
        Opt("--symmetrize", str, "none", "also align in reverse and combine",
            choices=("none", "intersection", "union", "grow-diag-final-and")),
        Opt("--out-links", required=True, help="Pharaoh output, one line per input line"),
        Opt("--out-model", help="TSV model checkpoint"),
    ],
    "annotate-train": [
        Opt("--mode", str, "tla", "tla: target lemmas, eta: exact target forms", choices=("tla", "eta")),
        Opt("--src", required=True),
        Opt("--tgt", required=True),
        Opt("--tgt-conllu", required=True, help="target morphology (lemma + UPOS)"),
        Opt("--links", help="Pharaoh alignments; required unless --glossary is given"),
        Opt("--glossary", help="annotate glossary matches found on both sides instead of sampling"),
        Opt("--seed", _seed, None, "master seed, or 'auto'"),
        Opt("--lo", float, 0.6, "lower end of the sentence threshold interval"),
        Opt("--hi", float, 1.0, "upper end of the sentence threshold interval"),
        Opt("--pos", str, "NOUN,VERB", "eligible target UPOS tags"),
        Opt("--drop-unannotated", _bool, False, "omit annotated copies without any annotation"),
        Opt("--format", str, "inline", choices=("inline", "parallel")),
        Opt("--out-prefix", required=True),
    ],
    "annotate-input": [
        Opt("--src", required=True),
        Opt("--glossary", required=True),
        Opt("--src-conllu", help="source morphology for --lemma-match"),
        Opt("--lemma-match", _bool, False, "match glossary entries against source lemmas"),
        Opt("--case-sensitive", _bool, False),
        Opt("--format", str, "inline", choices=("inline", "parallel")),
        Opt("--out", required=True, help="factored output (parallel: tokens here, factors in OUT.factors)"),
        Opt("--expectations-out", help="term expectation TSV for 'eval terms'"),
    ],
    "eval bleu": [
        Opt("--hyp", required=True),
        Opt("--ref", required=True),
        Opt("--lowercase", _bool, False),
        Opt("--smoothing", str, "none", choices=("none", "epsilon")),
    ],
    "eval bootstrap": [
        Opt("--hyp-a", required=True),
        Opt("--hyp-b", required=True),
        Opt("--ref", required=True),
        Opt("--replicates", _positive, 1000),
        Opt("--seed", _seed, None, "master seed, or 'auto'"),
        Opt("--lowercase", _bool, False),
    ],
    "eval terms": [
        Opt("--expectations", required=True, help="TSV from annotate-input"),
        Opt("--hyp-conllu", help="lemmatized hypotheses as CoNLL-U"),
        Opt("--hyp", help="plain hypotheses; lemmatized with --lemma-table if given"),
        Opt("--lemma-table", help="comma-separated CoNLL-U/TSV files for the lookup lemmatizer"),
        Opt("--case-sensitive", _bool, False),
        Opt("--gapped", _bool, False, "allow other lemmas between the lemmas of a multiword term"),
        Opt("--dedupe", _bool, False, "count a term repeated within one sentence once"),
    ],
    "eval kappa": [
        Opt("--judgments", required=True, help="TSV, one item per row, one rater per column"),
    ],
    "eval novelty": [
        Opt("--hyp", required=True),
        Opt("--train-src", required=True),
        Opt("--train-tgt", required=True),
        Opt("--lowercase", _bool, False),
    ],
}

SEEDED = {"annotate-train", "eval bootstrap"}


def _add_opts(p: argparse.ArgumentParser, opts: list[Opt]) -> None:
    for o in opts:
        kw: dict[str, Any] = {"dest": o.dest, "help": o.help or None}
        if o.is_flag:
            p.add_argument(o.flag, action="store_const", const=True, **kw)
        else:
            if o.choices:
                kw["choices"] = o.choices
            p.add_argument(o.flag, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlakit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    evals = None
    for name, opts in COMMANDS.items():
        if name.startswith("eval "):
            if evals is None:
                ev = sub.add_parser("eval", help="evaluate system output")
                evals = ev.add_subparsers(dest="metric", required=True)
            p = evals.add_parser(name.split()[1], argument_default=argparse.SUPPRESS)
        else:
            p = sub.add_parser(name, argument_default=argparse.SUPPRESS)
        _add_opts(p, opts + COMMON)
    return parser


def read_config_file(path: str | Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(_read_lines(path), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected key=value")
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def resolve(command: str, flags: dict[str, Any], config: dict[str, str], env: dict[str, str]) -> dict[str, Any]:
    """Merge defaults < config file < environment < flags and convert types."""
    resolved: dict[str, Any] = {}
    for o in COMMANDS[command] + COMMON:
        if o.dest in flags:
            raw, origin = flags[o.dest], "flag"
        elif ENV_PREFIX + o.dest.upper() in env:
            raw, origin = env[ENV_PREFIX + o.dest.upper()], "environment"
        elif o.dest in config:
            raw, origin = config[o.dest], "config file"
        else:
            resolved[o.dest] = o.default
            continue
        try:
            value = o.type(raw)
        except (TypeError, ValueError) as exc:
            raise InputError(f"{o.flag} (from {origin}): {exc}") from None
        if o.choices and value not in o.choices:
            raise InputError(f"{o.flag} (from {origin}): {value!r} not one of {', '.join(o.choices)}")
        resolved[o.dest] = value
    missing = [o.flag for o in COMMANDS[command] if o.required and resolved[o.dest] is None]
    if missing:
        raise InputError(f"missing required option(s): {', '.join(missing)}")
    if command in SEEDED:
        if resolved.get("seed") is None:
            raise InputError("--seed is required (an integer, or 'auto' to draw and log one)")
        if resolved["seed"] == "auto":
            resolved["seed"] = secrets.randbits(63)
            logger.warning("using seed %d", resolved["seed"])
    return resolved


def _echo(cfg: dict[str, Any]) -> dict[str, Any]:
    # worker count must not leak into outputs
    return {k: v for k, v in cfg.items() if k not in ("workers", "json")}


def _emit(command: str, cfg: dict, result: dict, text: str) -> None:
    if cfg["json"]:
        payload = {"schema_version": report.SCHEMA_VERSION, "command": command, "config": _echo(cfg), "result": result}
        sys.stdout.write(report.dumps(payload))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ----------------------------------------------------------------- commands


def cmd_align(cfg: dict) -> None:
    corpus = load_parallel_corpus(cfg["src"], cfg["tgt"])
    if not len(corpus):
        raise InputError("no sentence pairs to align")
    morph = None
    if cfg["tgt_conllu"]:
        morph = load_conllu_morph(cfg["tgt_conllu"])
        attach_morph(corpus, morph, "target")
    diag = DiagonalConfig(
        iterations=cfg["iters_diag"],
        initial_tension=cfg["tension"],
        null_prob=cfg["p0"],
        tension_steps=cfg["tension_steps"],
        smoothing_alpha=cfg["alpha"],
    )

    def train(direction):
        bitext = make_bitext(corpus, morph, direction)
        init = train_model1(bitext, cfg["iters_m1"], cfg["workers"])
        return train_diagonal(bitext, diag, init, direction, cfg["workers"])

    model = train("source-to-target")
    links = align_corpus(model, corpus, morph)
    if cfg["symmetrize"] != "none":
        reverse = align_corpus(train("target-to-source"), corpus, morph)
        links = [symmetrize(f, r, cfg["symmetrize"]) for f, r in zip(links, reverse)]
    by_line = [frozenset()] * corpus.n_lines
    for pair, ls in zip(corpus, links):
        by_line[pair.index] = ls
    write_alignments(cfg["out_links"], by_line)
    if cfg["out_model"]:
        save_model(model, cfg["out_model"])
    n_links = sum(len(x) for x in links)
    _emit(
        "align",
        cfg,
        {"sentences": len(corpus), "links": n_links, "tension": model.tension},
        f"aligned {len(corpus)} sentence pairs, {n_links} links, final tension {model.tension:.4f}",
    )


def _write_factored(prefix: str, sentences: list[FactoredSentence], fmt: str) -> list[str]:
    if fmt == "inline":
        _write_text(prefix, "".join(serialize_factored(s, "inline") + "\n" for s in sentences))
        return [prefix]
    lines = [serialize_factored(s, "parallel") for s in sentences]
    _write_text(prefix, "".join(t + "\n" for t, _ in lines))
    _write_text(prefix + ".factors", "".join(f + "\n" for _, f in lines))
    return [prefix, prefix + ".factors"]


def cmd_annotate_train(cfg: dict) -> None:
    corpus = load_parallel_corpus(cfg["src"], cfg["tgt"])
    ac = attach_morph(corpus, load_conllu_morph(cfg["tgt_conllu"]), "target")
    policy = SamplingPolicy(
        seed=cfg["seed"], lo=cfg["lo"], hi=cfg["hi"],
        eligible=frozenset(p.strip() for p in cfg["pos"].split(",") if p.strip()),
    )
    if cfg["glossary"]:
        ts = build_glossary_training_set(ac, load_glossary(cfg["glossary"]), cfg["mode"], cfg["drop_unannotated"])
    elif cfg["links"]:
        ts = build_training_set(ac, load_alignments(cfg["links"]), policy, cfg["mode"], cfg["drop_unannotated"])
    else:
        raise InputError("annotate-train needs --links or --glossary")
    prefix = cfg["out_prefix"]
    files = _write_factored(prefix + ".src", ts.source, cfg["format"])
    _write_text(prefix + ".tgt", "".join(" ".join(t) + "\n" for t in ts.target))
    result = {
        "original_pairs": ts.n_original,
        "output_pairs": len(ts),
        "annotated_copies_dropped": ts.n_dropped,
        "annotation_events": ts.n_events,
        "files": files + [prefix + ".tgt"],
    }
    _emit(
        "annotate-train",
        cfg,
        result,
        f"wrote {len(ts)} pairs ({ts.n_original} original, {len(ts) - ts.n_original} annotated, "
        f"{ts.n_dropped} dropped), {ts.n_events} annotations",
    )


def cmd_annotate_input(cfg: dict) -> None:
    sentences = read_sentences(cfg["src"])
    glossary = load_glossary(cfg["glossary"])
    morph_rows = None
    if cfg["src_conllu"]:
        layer = load_conllu_morph(cfg["src_conllu"])
        nonempty = [k for k, s in enumerate(sentences) if s]
        if len(layer) != len(nonempty):
            raise InputError(f"{cfg['src_conllu']}: {len(layer)} sentences for {len(nonempty)} non-empty input lines")
        morph_rows = dict(zip(nonempty, layer.sentences))
        for k in nonempty:
            if tuple(m.form for m in morph_rows[k]) != sentences[k]:
                raise InputError(f"{cfg['src_conllu']}: forms differ from input sentence {k}")
    out, expectations = [], []
    for k, sent in enumerate(sentences):
        fs, exp = annotate_inference_input(
            sent,
            glossary,
            morph_rows.get(k) if morph_rows else None,
            case_insensitive=not cfg["case_sensitive"],
            lemma_match=cfg["lemma_match"],
            sentence_index=k,
        )
        out.append(fs)
        expectations.extend(exp)
    files = _write_factored(cfg["out"], out, cfg["format"])
    if cfg["expectations_out"]:
        _write_text(cfg["expectations_out"], format_expectations(expectations))
        files.append(cfg["expectations_out"])
    _emit(
        "annotate-input",
        cfg,
        {"sentences": len(out), "annotations": len(expectations), "files": files},
        f"annotated {len(expectations)} term occurrences in {len(out)} sentences",
    )


def cmd_eval(metric: str, cfg: dict) -> None:
    command = f"eval {metric}"
    if metric == "bleu":
        bc = BleuConfig(smoothing=cfg["smoothing"], lowercase=cfg["lowercase"])
        s = corpus_bleu(read_sentences(cfg["hyp"]), read_sentences(cfg["ref"]), bc)
        text = (
            f"BLEU = {100 * s.score:.2f} "
            + "/".join(f"{100 * p:.1f}" for p in s.precisions)
            + f" (BP = {s.brevity_penalty:.3f} hyp_len = {s.hyp_len} ref_len = {s.ref_len})"
        )
        _emit(command, cfg, s.as_dict(), text)
    elif metric == "bootstrap":
        r = paired_bootstrap(
            read_sentences(cfg["hyp_a"]),
            read_sentences(cfg["hyp_b"]),
            read_sentences(cfg["ref"]),
            replicates=cfg["replicates"],
            seed=cfg["seed"],
            config=BleuConfig(lowercase=cfg["lowercase"]),
            workers=cfg["workers"],
        )
        text = (
            f"BLEU A = {100 * r.bleu_a:.2f}, BLEU B = {100 * r.bleu_b:.2f}\n"
            f"{r.replicates} replicates: A wins {r.wins_a:.3f}, B wins {r.wins_b:.3f}, ties {r.ties:.3f}\n"
            f"p = {r.p_value:.4f}"
        )
        _emit(command, cfg, r.as_dict(), text)
    elif metric == "terms":
        expectations = parse_expectations(_read_lines(cfg["expectations"]))
        if cfg["hyp_conllu"]:
            lemmas = [[m.lemma for m in s] for s in load_conllu_morph(cfg["hyp_conllu"]).sentences]
        elif cfg["hyp"]:
            sents = read_sentences(cfg["hyp"])
            if cfg["lemma_table"]:
                lem = build_lookup([p for p in cfg["lemma_table"].split(",") if p])
                lemmas = [[m.lemma for m in lem.lemmatize(s)] for s in sents]
            else:
                lemmas = [list(s) for s in sents]
        else:
            raise InputError("eval terms needs --hyp-conllu or --hyp")
        r = term_accuracy(
            lemmas,
            expectations,
            case_insensitive=not cfg["case_sensitive"],
            contiguous=not cfg["gapped"],
            per_occurrence=not cfg["dedupe"],
        )
        acc = "undefined" if r.accuracy is None else f"{r.accuracy:.1f}%"
        _emit(command, cfg, r.as_dict(), f"term accuracy {acc} ({r.matched}/{r.total})")
    elif metric == "kappa":
        m = load_judgments(cfg["judgments"])
        kappa = free_marginal_kappa(m)
        _emit(
            command,
            cfg,
            {"kappa_free": kappa, "items": len(m.labels), "raters": m.n_raters, "categories": list(m.categories)},
            f"free-marginal kappa = {kappa:.4f} ({len(m.labels)} items, {m.n_raters} raters, k = {len(m.categories)})",
        )
    elif metric == "novelty":
        r = novel_wordforms(read_sentences(cfg["hyp"]), cfg["train_src"], cfg["train_tgt"], cfg["lowercase"])
        lines = [f"{len(r)} novel wordforms among {r.hypothesis_types} hypothesis types"]
        lines += [f"{f.form}\t{f.frequency}\t{','.join(map(str, f.examples))}" for f in r.forms]
        _emit(command, cfg, r.as_dict(), "\n".join(lines))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    command = args.command if args.command != "eval" else f"eval {args.metric}"
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "metric", "config", "verbose")}
    try:
        config = read_config_file(args.config) if args.config else {}
        cfg = resolve(command, flags, config, dict(os.environ))
        if command == "align":
            cmd_align(cfg)
        elif command == "annotate-train":
            cmd_annotate_train(cfg)
        elif command == "annotate-input":
            cmd_annotate_input(cfg)
        else:
            cmd_eval(args.metric, cfg)
    except (InputError, ValueError, OSError) as exc:
        print(f"tlakit: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception("internal error")
        print(f"tlakit: internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
