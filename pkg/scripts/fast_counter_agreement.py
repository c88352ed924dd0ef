#!/usr/bin/env python3
"""Agreement of plain grid sign counting with exact torus counts.

For each grid factor K/n the fraction of trials where the sign changes on a
K-point grid equal the certified count.

    python3 scripts/fast_counter_agreement.py --n 256 --trials 2000
"""
import argparse
import json

import numpy as np

from trigroots.ensembles import sample_coeffs
from trigroots.rootcount import _sign_changes, screened_counts
from trigroots.trigpoly import batch_eval_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--factors", default="8,16,32,64,128")
    ap.add_argument("--ensemble", default="gaussian")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.n
    factors = [int(f) for f in args.factors.split(",")]
    agree = dict.fromkeys(factors, 0)
    used = 0
    for start in range(0, args.trials, 250):
        rows = sample_coeffs(args.ensemble, n, args.seed, range(start, min(start + 250, args.trials)))
        a, b = rows[:, :n], rows[:, n:]
        exact, ok = screened_counts(a, b)
        used += int(ok.sum())
        for f in factors:
            agree[f] += int(np.sum((_sign_changes(batch_eval_grid(a[ok], b[ok], f * n)) == exact[ok])))
    print(json.dumps({"n": n, "trials": used, "agreement": {f"{f}n": agree[f] / used for f in factors}}, indent=2))


if __name__ == "__main__":
    main()
