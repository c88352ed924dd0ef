"""Randomized verification suites for the deterministic inequalities.

Each suite draws ``trials`` random instances from the counter-based stream of
``seed`` and checks one inequality on each.  Instances whose hypotheses cannot
be certified are counted as skipped, never as violations.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ensembles import STREAM_AUX, trial_generator
from .inequalities import (
    HypothesisError,
    bernstein_l2,
    interpolation_bound,
    large_sieve,
    level_set_cover,
    perturbation_root_transport,
    separation_intervals,
)
from .repulsion import rademacher_char_product
from .rootcount import count_certified
from .trigpoly import TrigPoly, coefficient_bound, evaluate, l2_norm_sq


@dataclass
class SuiteResult:
    suite: str
    trials: int
    checked: int = 0
    skipped: int = 0
    violations: int = 0
    worst_ratio: float = 0.0  # max lhs/rhs over checked instances
    examples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, ok: bool, ratio: float = 0.0, info=None):
        self.checked += 1
        self.worst_ratio = max(self.worst_ratio, ratio)
        if not ok:
            self.violations += 1
            if len(self.examples) < 5:
                self.examples.append(info)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("examples")
        d["status"] = "pass" if self.passed else "FAIL"
        return d


def _random_poly(gen, n: int) -> TrigPoly:
    x = gen.standard_normal(2 * n)
    return TrigPoly(x[:n], x[n:])


def _ratio(rep) -> float:
    return rep.lhs / rep.rhs if rep.rhs > 0 else (0.0 if rep.lhs == 0 else math.inf)


def suite_bernstein(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("bernstein", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(1, 65))
        p = _random_poly(g, n)
        c = float(g.standard_normal()) if g.random() < 0.5 else 0.0
        rep = bernstein_l2(p, c)
        res.record(rep.holds, _ratio(rep), (i, n))
    return res


def suite_sieve(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("sieve", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(1, 65))
        p = _random_poly(g, n)
        M = int(g.integers(1, 4 * n + 1))
        pts = np.unique(g.uniform(-math.pi, math.pi, M))
        rep = large_sieve(p, pts)
        res.record(rep.holds, _ratio(rep), (i, n, M))
    return res


def suite_cover(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("cover", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(1, 33))
        p = _random_poly(g, n)
        tau = math.sqrt(l2_norm_sq(p))
        lam = float(g.uniform(0.2, 2.0))
        delta = float(g.uniform(0.5, 4.0)) / n
        M, wit = level_set_cover(p, tau, lam, delta)
        res.record(len(wit) <= 2 * M, len(wit) / max(2 * M, 1), (i, n))
    return res


def suite_interpolation(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("interpolation", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(2, 33))
        p = _random_poly(g, n)
        lo = float(g.uniform(-math.pi, math.pi))
        hi = lo + float(g.uniform(0.1, 2.5))
        cc = count_certified(p, (lo, hi))
        if not cc.certified or cc.count == 0:
            res.skipped += 1
            continue
        m = int(g.integers(1, cc.count + 1))
        try:
            rf, rfp = interpolation_bound(p, (lo, hi), m)
        except HypothesisError:
            res.skipped += 1
            continue
        res.record(rf.holds and rfp.holds, max(_ratio(rf), _ratio(rfp)), (i, n, m))
    return res


def _check_separation(f: TrigPoly, lo: float, hi: float, mu: float, nu: float, intervals) -> bool:
    reach = mu / nu
    ok = True
    prev_hi = -math.inf
    for a, b in intervals:
        fa, fb = evaluate(f, a), evaluate(f, b)
        ok &= a < b and a > prev_hi
        ok &= (fa > 0) != (fb > 0)
        ok &= abs(abs(fa) - mu) <= 1e-9 * max(1.0, mu) and abs(abs(fb) - mu) <= 1e-9 * max(1.0, mu)
        cc = count_certified(f, (a, b))
        ok &= cc.certified and cc.count == 1
        if cc.roots:
            x = 0.5 * sum(cc.roots[0])
            ok &= (x - reach < a) and (b < x + reach)
        prev_hi = b
    return bool(ok)


def suite_separation(trials: int, seed: int) -> SuiteResult:
    """Separation intervals and root transport under a small perturbation."""
    res = SuiteResult("separation", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(2, 25))
        f = _random_poly(g, n)
        mu = float(g.uniform(0.02, 0.2))
        nu = float(g.uniform(0.05, 0.3)) * n
        lo = float(g.uniform(-math.pi, math.pi))
        span = 2.5 * mu / nu  # at most 5 < 2 pi
        hi = lo + float(g.uniform(span, max(span, 3.0)))
        pert = _random_poly(g, int(g.integers(1, n + 1)))
        pert_scale = float(g.uniform(0.1, 0.9)) * mu / coefficient_bound(pert)
        pert = TrigPoly(pert.cos_coeffs * pert_scale, pert.sin_coeffs * pert_scale)
        try:
            ivs = separation_intervals(f, (lo, hi), mu, nu)
            pairs = perturbation_root_transport(f, pert, (lo, hi), mu, nu)
        except HypothesisError:
            res.skipped += 1
            continue
        ok = _check_separation(f, lo, hi, mu, nu, ivs)
        ok &= len(pairs) == len(ivs)
        moved = [abs(xp - x) for x, xp in pairs]
        ok &= all(d < mu / nu for d in moved)
        ok &= len({xp for _, xp in pairs}) == len(pairs)
        ratio = max(moved, default=0.0) / (mu / nu)
        res.record(bool(ok), ratio, (i, n))
    return res


def suite_charproduct(trials: int, seed: int) -> SuiteResult:
    res = SuiteResult("charproduct", trials)
    for i in range(trials):
        g = trial_generator(seed, i, STREAM_AUX)
        n = int(g.integers(1, 257))
        t = float(g.uniform(0.0, math.pi))
        r = math.exp(float(g.uniform(math.log(1e-3), math.log(1e3))))
        th = float(g.uniform(0.0, 2.0 * math.pi))
        try:
            cp = rademacher_char_product(t, n, (r * math.cos(th), r * math.sin(th)))
        except ArithmeticError:
            res.record(False, math.inf, (i, n, t, r, th))
            continue
        res.record(cp.holds, cp.product / cp.bound if cp.bound > 0 else 0.0, (i, n))
    return res


SUITES = {
    "bernstein": suite_bernstein,
    "sieve": suite_sieve,
    "cover": suite_cover,
    "interpolation": suite_interpolation,
    "separation": suite_separation,
    "charproduct": suite_charproduct,
}


def run_suite(name: str, trials: int, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return SUITES[name](int(trials), int(seed))
