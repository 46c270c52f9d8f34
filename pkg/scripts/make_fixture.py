#!/usr/bin/env python3
"""Write the synthetic toy-language fixture used by the smoke test."""

import argparse

from tlakit.synthetic import write_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir")
    ap.add_argument("--n-train", type=int, default=500)
    ap.add_argument("--n-test", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    paths = write_fixture(args.out_dir, args.n_train, args.n_test, args.seed)
    for name, path in sorted(paths.items()):
        print(f"{name}\t{path}")


if __name__ == "__main__":
    main()
