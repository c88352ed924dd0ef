#!/usr/bin/env python3
"""How often is a random polynomial exceptional under the eps schedule?

For each trial the R/n windows are classified and the number of unstable
windows is compared with delta n.  Prints a JSON line per trial (with
--verbose) and a summary at the end.

    python3 scripts/geometry_rarity.py --n 256 --trials 200 --eps 0.2
"""
import argparse
import json

import numpy as np

from trigroots.ensembles import sample_coeffs
from trigroots.geometry import ParameterSchedule, classify, is_exceptional, unstable_root_mass
from trigroots.trigpoly import TrigPoly


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--c0", type=float, default=1.0)
    ap.add_argument("--R", type=float, default=None)
    ap.add_argument("--ensemble", default="gaussian")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args()

    sched = ParameterSchedule(args.eps, args.c0, args.R)
    part = sched.partition(args.n)
    n = args.n
    unstable, exceptional, heavy = [], 0, 0
    for t in range(args.trials):
        row = sample_coeffs(args.ensemble, n, args.seed, [t])[0]
        p = TrigPoly(row[:n], row[n:])
        cls = classify(p, part, sched.alpha, sched.beta)
        exc = is_exceptional(cls, sched.delta)
        exceptional += exc
        mass = None
        if not exc:
            mass = unstable_root_mass(p, cls)
            heavy += mass[0] > sched.eps * n / 2
        unstable.append(cls.n_unstable + cls.n_undecided)
        if args.verbose:
            print(json.dumps({"trial": t, "unstable": cls.n_unstable, "undecided": cls.n_undecided,
                              "exceptional": exc, "root_mass": mass}))
    u = np.array(unstable)
    print(json.dumps({
        "n": n, "trials": args.trials, "windows": part.size, "delta_n": sched.delta * n,
        "alpha": sched.alpha, "beta": sched.beta, "R": sched.R,
        "exceptional": exceptional, "nonexceptional_heavy": heavy,
        "unstable_min": int(u.min()), "unstable_median": float(np.median(u)), "unstable_max": int(u.max()),
        "unstable_fraction_median": float(np.median(u)) / part.size,
    }, indent=2))


if __name__ == "__main__":
    main()
