#!/usr/bin/env python3
"""Var(N)/n and mean/n across degrees for one ensemble.

    python3 scripts/variance_slope.py --ensemble rademacher --n-list 100,200,400,800
"""
import argparse
import json

from trigroots.stats import collect, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ensemble", default="gaussian")
    ap.add_argument("--n-list", default="100,200,400")
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--domain", default="torus", choices=["torus", "half"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for n in (int(v) for v in args.n_list.split(",")):
        sm = summarize(collect(args.ensemble, n, args.trials, seed=args.seed, domain=args.domain))
        print(json.dumps({"n": n, "mean_over_n": sm.mean / n, "var_over_n": sm.variance / n,
                          "var_over_n_se": sm.variance_se / n, "ks": sm.ks}))


if __name__ == "__main__":
    main()
