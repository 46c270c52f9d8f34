#!/usr/bin/env python3
"""Run the full command-line pipeline on a freshly written fixture."""

import argparse
import sys
import time
from pathlib import Path

from tlakit import cli
from tlakit.synthetic import write_fixture


def run(argv):
    print("$ tlakit " + " ".join(argv), file=sys.stderr)
    code = cli.main(argv)
    if code:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("work_dir")
    ap.add_argument("--n-train", type=int, default=500)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--mode", choices=["tla", "eta"], default="tla")
    args = ap.parse_args()

    work = Path(args.work_dir)
    work.mkdir(parents=True, exist_ok=True)
    p = {k: str(v) for k, v in write_fixture(work / "data", n_train=args.n_train).items()}
    out = lambda name: str(work / name)
    seed = str(args.seed)
    t0 = time.perf_counter()
    run(["align", "--src", p["train.src"], "--tgt", p["train.tgt"], "--tgt-conllu", p["train.tgt.conllu"],
         "--out-links", out("links.txt"), "--out-model", out("model.tsv")])
    run(["annotate-train", "--mode", args.mode, "--src", p["train.src"], "--tgt", p["train.tgt"],
         "--tgt-conllu", p["train.tgt.conllu"], "--links", out("links.txt"), "--seed", seed,
         "--out-prefix", out("train")])
    run(["annotate-input", "--src", p["test.src"], "--glossary", p["glossary.tsv"], "--out", out("test.fact"),
         "--expectations-out", out("test.exp")])
    run(["eval", "bleu", "--hyp", p["hyp_a.txt"], "--ref", p["test.ref"]])
    run(["eval", "bootstrap", "--hyp-a", p["hyp_a.txt"], "--hyp-b", p["hyp_b.txt"], "--ref", p["test.ref"],
         "--seed", seed])
    run(["eval", "terms", "--expectations", out("test.exp"), "--hyp-conllu", p["test.ref.conllu"]])
    run(["eval", "kappa", "--judgments", p["judgments.tsv"]])
    run(["eval", "novelty", "--hyp", p["hyp_a.txt"], "--train-src", p["train.src"], "--train-tgt", p["train.tgt"]])
    print(f"done in {time.perf_counter() - t0:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
