"""Executable checks of the deterministic inequalities for trigonometric
polynomials: L2 Bernstein, the large sieve, the level-set cover, the
Hermite-interpolation bound, and the separation / root-transport lemmas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rootcount import (
    CLEAR,
    MIN_WIDTH,
    UNKNOWN,
    SmallSetScanner,
    count_certified,
    refine_root,
)
from .trigpoly import (
    TWO_PI,
    TrigPoly,
    coefficient_bound,
    derivative,
    evaluate,
    evaluate_derivatives,
    l2_norm_sq,
)

REL_TOL = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + REL_TOL)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


class HypothesisError(ValueError):
    """The hypothesis of a lemma fails (or cannot be certified) on the input."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


def bernstein_l2(p: TrigPoly, constant: float = 0.0) -> InequalityReport:
    """int (f')^2 <= n^2 int f^2 for f = constant + p, both sides by Parseval."""
    n = p.degree
    k2 = np.arange(1, n + 1, dtype=np.float64) ** 2
    lhs = math.pi / n * math.fsum(k2 * (p.cos_coeffs**2 + p.sin_coeffs**2))
    rhs = n * n * (l2_norm_sq(p) + TWO_PI * constant * constant)
    return InequalityReport(lhs, rhs)


def _torus_sorted(points) -> np.ndarray:
    x = np.mod(np.asarray(points, dtype=np.float64) + math.pi, TWO_PI) - math.pi
    return np.sort(x)


def min_cyclic_gap(points) -> float:
    """Smallest gap between consecutive points on the torus, in radians."""
    x = _torus_sorted(points)
    if x.size == 1:
        return TWO_PI
    gaps = np.diff(np.append(x, x[0] + TWO_PI))
    return float(gaps.min())


def large_sieve(p: TrigPoly, points) -> InequalityReport:
    """sum |p(x_i)|^2 <= (2n + 1/delta)/(2 pi) int p^2.

    delta is the minimal cyclic gap measured as a fraction of the full turn,
    i.e. gap_in_radians / (2 pi).
    """
    x = _torus_sorted(points)
    if x.size == 0:
        raise ValueError("need at least one point")
    gap = min_cyclic_gap(x)
    if gap <= 0.0:
        raise ValueError("points must be distinct on the torus")
    vals = evaluate(p, x)
    lhs = math.fsum(np.atleast_1d(vals) ** 2)
    rhs = (2 * p.degree + TWO_PI / gap) / TWO_PI * l2_norm_sq(p)
    return InequalityReport(lhs, rhs)


def _greedy_separated(candidates: np.ndarray, delta: float) -> np.ndarray:
    """Maximal delta-separated subset (cyclic) of sorted candidate angles."""
    chosen = []
    for x in candidates:
        if not chosen or x - chosen[-1] >= delta:
            chosen.append(x)
    while len(chosen) > 1 and chosen[0] + TWO_PI - chosen[-1] < delta:
        chosen.pop()
    return np.array(chosen)


def level_set_cover(p: TrigPoly, tau: float, lam: float, delta: float, grid: int | None = None):
    """Size bound and witness set for {|p| >= lam} U {|p'| >= lam n}.

    Returns (M_bound, witness) where witness is the union of two greedy maximal
    delta-separated point sets (one per family) drawn from a fine grid.
    """
    n = p.degree
    if l2_norm_sq(p) > tau * tau * (1.0 + REL_TOL):
        raise ValueError("norm precondition ||p||_2 <= tau violated")
    if lam <= 0 or delta <= 0:
        raise ValueError("lam and delta must be positive")
    M_bound = math.floor((2 * n + TWO_PI / delta) / TWO_PI * tau * tau / (lam * lam))
    K = grid or max(64 * n, int(math.ceil(8 * TWO_PI / delta)), 256)
    x = -math.pi + TWO_PI * np.arange(K) / K
    f, d = evaluate_derivatives(p, x, (0, 1))
    wf = _greedy_separated(x[np.abs(f) >= lam], delta)
    wd = _greedy_separated(x[np.abs(d) >= lam * n], delta)
    witness = np.concatenate([wf, wd])
    return M_bound, witness


def _interval_max(p, lo, hi, order, points=1024, pad=False):
    x = np.linspace(lo, hi, points)
    vals = np.abs(derivative(p, order).base(x))
    best = float(vals.max())
    if pad:
        best += coefficient_bound(p, order + 1) * (hi - lo) / (points - 1) / 2
    return best


def interpolation_bound(p: TrigPoly, interval, m: int):
    """Both inequalities of the interpolation lemma on I with m certified roots.

    Left sides are grid maxima (never above the true max); right sides are grid
    maxima of |p^(m)| plus Lipschitz padding (never below the true max), so a
    reported failure is a genuine violation.
    """
    lo, hi = (float(v) for v in interval)
    if m < 1:
        raise ValueError("m must be >= 1")
    cc = count_certified(p, (lo, hi))
    if not cc.certified or cc.count < m:
        raise HypothesisError(f"fewer than {m} certified roots in [{lo}, {hi}] (found {cc.count})")
    r = hi - lo
    top = _interval_max(p, lo, hi, m, pad=True)
    f_factor = (4 * math.e * r / m) ** m
    fp_factor = 1.0 if m == 1 else (4 * math.e * r / (m - 1)) ** (m - 1)
    report_f = InequalityReport(_interval_max(p, lo, hi, 0), f_factor * top)
    report_fp = InequalityReport(_interval_max(p, lo, hi, 1), fp_factor * top)
    return report_f, report_fp


def check_separation_hypothesis(f: TrigPoly, lo: float, hi: float, mu: float, nu: float,
                                min_width: float = MIN_WIDTH):
    """Certify |f| > mu or |f'| > nu at every point of [lo, hi]; raise otherwise."""
    scan = SmallSetScanner(f, mu, nu)
    cells_lo = np.linspace(lo, hi, 4 * f.degree + 9)
    clo, chi = cells_lo[:-1], cells_lo[1:]
    while clo.size:
        st, mid = scan.status(clo, chi)
        bad = (st != CLEAR) & (st != UNKNOWN)
        if np.any(bad):
            x = float(mid[np.argmax(bad)])
            raise HypothesisError(f"|f| <= mu and |f'| <= nu at x = {x!r}", point=x)
        keep = st == UNKNOWN
        if np.any(keep & ((chi - clo) / 2 < min_width)):
            x = float(mid[np.argmax(keep)])
            raise HypothesisError(f"could not certify the hypothesis near x = {x!r}", point=x)
        m = mid[keep]
        clo, chi = np.concatenate([clo[keep], m]), np.concatenate([m, chi[keep]])
    return True


def _level_crossing(f: TrigPoly, root: float, direction: int, mu: float, reach: float) -> float:
    """First point from ``root`` in ``direction`` where |f| reaches mu."""
    steps = 512
    xs = root + direction * reach * np.arange(1, steps + 1) / steps
    vals = np.abs(evaluate(f, xs))
    above = np.nonzero(vals >= mu)[0]
    if above.size == 0:
        raise HypothesisError(f"|f| stays below mu within {reach} of the root {root}")
    j = int(above[0])
    inside = root if j == 0 else float(xs[j - 1])
    outside = float(xs[j])
    for _ in range(200):
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if abs(evaluate(f, mid)) >= mu:
            outside = mid
        else:
            inside = mid
    return outside


def separation_intervals(f: TrigPoly, interval, mu: float, nu: float):
    """Disjoint intervals I(x_i) around the qualifying roots of f.

    For each root x_i with distance > mu/nu from both ends of I, returns
    (a', b') containing x_i with |f(a')| = |f(b')| = mu and opposite signs,
    inside (x_i - mu/nu, x_i + mu/nu).
    """
    lo, hi = (float(v) for v in interval)
    if mu <= 0 or nu <= 0:
        raise ValueError("mu and nu must be positive")
    reach = mu / nu
    if hi - lo <= 2 * reach:
        raise ValueError("interval must be longer than 2 mu/nu")
    check_separation_hypothesis(f, lo, hi, mu, nu)
    cc = count_certified(f, (lo, hi))
    if not cc.certified:
        raise HypothesisError("root count on the interval could not be certified")
    out = []
    for br in cc.roots:
        x = refine_root(f, br)
        if x - lo <= reach or hi - x <= reach:
            continue
        a = _level_crossing(f, x, -1, mu, reach)
        b = _level_crossing(f, x, +1, mu, reach)
        out.append((a, b))
    return out


def perturbation_root_transport(f: TrigPoly, g: TrigPoly | None, interval, mu: float, nu: float):
    """Roots x_i of f matched with roots x_i' of f + g, |x_i' - x_i| < mu/nu."""
    lo, hi = (float(v) for v in interval)
    if g is not None:
        pts = 4096
        x = np.linspace(lo, hi, pts)
        gmax = float(np.max(np.abs(evaluate(g, x))))
        gmax += coefficient_bound(g, 1) * (hi - lo) / (pts - 1) / 2
        if not gmax < mu:
            raise HypothesisError(f"sup |g| on the interval is not certified below mu (bound {gmax})")
    pairs = []
    for a, b in separation_intervals(f, (lo, hi), mu, nu):
        x = refine_root(f, (a, b))
        if g is None:
            pairs.append((x, x))
            continue
        h = f + g
        pairs.append((x, refine_root(h, (a, b))))
    return pairs

