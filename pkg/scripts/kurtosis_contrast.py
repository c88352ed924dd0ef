#!/usr/bin/env python3
"""Variance of the root count on [0, pi] for several coefficient laws.

Prints Var/n per ensemble and the differences against the Gaussian law
together with the fourth-moment prediction (E xi^4 - 3)/30.

    python3 scripts/kurtosis_contrast.py --n 500 --trials 50000
"""
import argparse
import json

from trigroots.ensembles import EnsembleSpec
from trigroots.stats import collect, kurtosis_contrast, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--ensembles", default="rademacher,uniform,truncated_gaussian(1.5)")
    args = ap.parse_args()

    def records(label):
        return collect(label, args.n, args.trials, seed=args.seed, domain="half", threads=args.threads)

    base = records("gaussian")
    sm = summarize(base)
    print(json.dumps({"ensemble": "gaussian", "var_over_n": sm.variance / args.n}))
    for label in args.ensembles.split(","):
        spec = EnsembleSpec.parse(label)
        recs = records(spec)
        diff, se = kurtosis_contrast(recs, base)
        print(json.dumps({
            "ensemble": spec.label,
            "var_over_n": summarize(recs).variance / args.n,
            "diff_vs_gaussian": diff,
            "stderr": se,
            "predicted": (spec.fourth_moment - 3.0) / 30.0,
        }))


if __name__ == "__main__":
    main()
