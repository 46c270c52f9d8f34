#!/usr/bin/env python3
"""Empirical annotation rate of the threshold sampler versus E[1 - tau]."""

import argparse

from tlakit.annotator import AnnotationEvent, SamplingPolicy, sample_annotations


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--candidates", type=int, default=1_000_000)
    ap.add_argument("--per-sentence", type=int, default=10)
    ap.add_argument("--lo", type=float, default=0.6)
    ap.add_argument("--hi", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    policy = SamplingPolicy(seed=args.seed, lo=args.lo, hi=args.hi)
    cands = [AnnotationEvent(0, k, k + 1, ("x",)) for k in range(args.per_sentence)]
    n_sent = args.candidates // args.per_sentence
    kept = sum(len(sample_annotations(cands, i, policy)) for i in range(n_sent))
    total = n_sent * args.per_sentence
    expected = 1 - (args.lo + args.hi) / 2
    print(f"candidates={total} kept={kept} rate={kept / total:.5f} expected={expected:.5f}")


if __name__ == "__main__":
    main()
