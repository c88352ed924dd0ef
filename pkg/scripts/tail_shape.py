#!/usr/bin/env python3
"""Deviation tails P(|N - mean| >= eps n) across degrees.

Writes one CSV row per (n, eps) with the empirical tail, its standard error,
a one-sided 95% bound and -log(tail)/n.

    python3 scripts/tail_shape.py --n-list 50,100,200 --trials 100000 > tails.csv
"""
import argparse
import csv
import math
import sys

from trigroots.stats import collect, tail_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-list", default="50,100,200")
    ap.add_argument("--eps-list", default="0.05,0.1,0.15,0.2")
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--ensemble", default="gaussian")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "eps", "tail", "stderr", "upper95", "neglog_tail_over_n"])
    eps = [float(e) for e in args.eps_list.split(",")]
    for n in (int(v) for v in args.n_list.split(",")):
        recs = collect(args.ensemble, n, args.trials, seed=args.seed)
        for e, (p, se, ub) in tail_curve(recs, eps).items():
            w.writerow([n, e, p, se, ub, -math.log(p) / n if p > 0 else ""])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
