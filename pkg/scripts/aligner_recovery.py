#!/usr/bin/env python3
"""Train both aligner stages on a bijective toy corpus and report F1 per stage."""

import argparse
import time

from tlakit.aligner import DiagonalConfig, iter_diagonal, iter_model1, viterbi_links
from tlakit.synthetic import bijective_bitext


def f1(model, bitext, gold):
    tp = n_pred = n_gold = 0
    for (e, f), g in zip(bitext, gold):
        pred = set(viterbi_links(model, e, f))
        tp += len(pred & g)
        n_pred += len(pred)
        n_gold += len(g)
    return 2 * tp / (n_pred + n_gold)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--vocab", type=int, default=50)
    ap.add_argument("--sentences", type=int, default=2000)
    ap.add_argument("--model1-iterations", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bitext, gold = bijective_bitext(args.vocab, args.sentences, seed=args.seed)
    t0 = time.perf_counter()
    table = None
    for it, (ll, table) in enumerate(iter_model1(bitext, args.model1_iterations, args.workers), 1):
        print(f"model1 iter={it} ll_before={ll:.4f}")
    config = DiagonalConfig(iterations=args.iterations)
    model = None
    for it, (ll, model) in enumerate(iter_diagonal(bitext, config, table, workers=args.workers), 1):
        print(f"diagonal iter={it} ll_before={ll:.4f} tension={model.tension:.4f}")
    print(f"F1={f1(model, bitext, gold):.4f} time={time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
