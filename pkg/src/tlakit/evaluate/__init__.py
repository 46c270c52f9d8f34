from .agreement import JudgmentMatrix, free_marginal_kappa, load_judgments, parse_judgments
from .bleu import BleuConfig, BleuScore, corpus_bleu
from .novelty import NoveltyReport, novel_wordforms
from .significance import SignificanceReport, paired_bootstrap
from .terms import TermAccuracyReport, term_accuracy

__all__ = [
    "BleuConfig",
    "BleuScore",
    "JudgmentMatrix",
    "NoveltyReport",
    "SignificanceReport",
    "TermAccuracyReport",
    "corpus_bleu",
    "free_marginal_kappa",
    "load_judgments",
    "novel_wordforms",
    "paired_bootstrap",
    "parse_judgments",
    "term_accuracy",
]
