"""Stable / unstable windows of length R/n, exceptional polynomials, the
parameter schedule and the Diophantine condition on evaluation points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rootcount import CLEAR, FULL, MIN_WIDTH, UNKNOWN, WITNESS, SmallSetScanner, count_certified, refine_roots
from .trigpoly import TWO_PI, TrigPoly

STABLE, UNSTABLE, UNDECIDED = 0, 1, 2
VERDICT_NAMES = ("stable", "unstable", "undecided")

DEFAULT_TAU = 1.0 / 64.0
DEFAULT_C0PRIME = 16


@dataclass(frozen=True)
class TorusPartition:
    """ceil(2 pi n / R) equal half-open windows tiling [-pi, pi)."""

    n: int
    R: float

    def __post_init__(self):
        if self.n < 1 or not self.R > 0:
            raise ValueError("need n >= 1 and R > 0")
        if self.R > TWO_PI * self.n:
            raise ValueError("R/n cannot exceed the length of the torus")

    @property
    def size(self) -> int:
        return math.ceil(TWO_PI * self.n / self.R)

    def __len__(self):
        return self.size

    @property
    def width(self) -> float:
        return TWO_PI / self.size

    @property
    def edges(self) -> np.ndarray:
        return -math.pi + TWO_PI * np.arange(self.size + 1) / self.size

    @property
    def intervals(self) -> list[tuple[float, float]]:
        e = self.edges
        return list(zip(e[:-1].tolist(), e[1:].tolist()))

    def index_of(self, x) -> np.ndarray:
        """Index of the window containing each angle (torus-wrapped)."""
        u = np.mod(np.asarray(x, dtype=np.float64) + math.pi, TWO_PI)
        return np.minimum((u / self.width).astype(np.int64), self.size - 1)


@dataclass(frozen=True)
class ParameterSchedule:
    """delta = c0 eps/log(1/eps); alpha, beta, gamma, tau are powers of delta.

    ``R`` defaults to half of the largest value allowed by delta R < eps/(1024 e).
    """

    eps: float
    c0: float = 1.0
    R: float | None = None
    delta: float = field(init=False)
    alpha: float = field(init=False)
    beta: float = field(init=False)
    gamma: float = field(init=False)
    tau: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0 / math.e:
            raise ValueError("eps must lie in (0, 1/e)")
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        delta = self.c0 * self.eps / math.log(1.0 / self.eps)
        cap = self.eps / (1024.0 * math.e)
        R = 0.5 * cap / delta if self.R is None else float(self.R)
        if not R > 0:
            raise ValueError("R must be positive")
        if not delta * R < cap:
            raise ValueError(f"delta*R = {delta * R:.3g} must be below eps/(1024 e) = {cap:.3g}")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "alpha", delta**1.5)
        object.__setattr__(self, "beta", delta**0.75)
        object.__setattr__(self, "gamma", delta**1.25)
        object.__setattr__(self, "tau", delta**2)

    def partition(self, n: int) -> TorusPartition:
        return TorusPartition(n, self.R)


@dataclass
class IntervalClassification:
    partition: TorusPartition
    verdicts: np.ndarray  # int8 per window: STABLE, UNSTABLE or UNDECIDED
    alpha: float
    beta: float
    evals_used: int = 0

    def count(self, verdict: int) -> int:
        return int(np.count_nonzero(self.verdicts == verdict))

    @property
    def n_unstable(self) -> int:
        return self.count(UNSTABLE)

    @property
    def n_undecided(self) -> int:
        return self.count(UNDECIDED)

    @property
    def unstable_fraction(self) -> float:
        return self.n_unstable / self.verdicts.size

    @property
    def decided(self) -> bool:
        return self.n_undecided == 0


def _mark_range(flags: np.ndarray, j0: np.ndarray, j1: np.ndarray):
    """flags[j0[i] .. j1[i]] = True for each i (inclusive ranges, j0 <= j1)."""
    for a, b in zip(j0.tolist(), j1.tolist()):
        flags[a : b + 1] = True


def classify(p: TrigPoly, part: TorusPartition, alpha: float, beta: float,
             min_width: float = MIN_WIDTH, budget: int | None = None) -> IntervalClassification:
    """Verdict for every window I_i of ``part``.

    Works on the bad set B = {x : |p(x)| <= alpha, |p'(x)| <= beta n}.  A window
    is unstable iff B meets 3I_i = I_{i-1} u I_i u I_{i+1}.  Cells are
    subdivided from a coarse grid; CLEAR cells are dropped, FULL cells and
    witness midpoints mark the windows they touch.  A cell is refined further
    only while it still touches an unmarked window.
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    n = p.degree
    m = part.size
    w = part.width
    budget = 10**8 if budget is None else int(budget)
    scan = SmallSetScanner(p, alpha, beta * n)
    hit = np.zeros(m, dtype=bool)
    unsure = np.zeros(m, dtype=bool)

    n0 = max(16 * n, 64)
    if m <= n0:
        edges = part.edges
    else:
        edges = -math.pi + TWO_PI * np.arange(n0 + 1) / n0
    clo, chi = edges[:-1], edges[1:]

    def window_range(lo, hi):
        j0 = part.index_of(lo)
        # hi is exclusive: the last window touched holds hi minus a hair
        j1 = np.minimum(((hi + math.pi) / w).astype(np.int64), m - 1)
        j1 = np.where(j1 * w - math.pi >= hi, j1 - 1, j1)
        return j0, np.maximum(j1, j0)

    while clo.size:
        if scan.evals + 3 * clo.size > budget:
            j0, j1 = window_range(clo, chi)
            _mark_range(unsure, j0, j1)
            break
        st, mid = scan.status(clo, chi)
        j0, j1 = window_range(clo, chi)
        full = st == FULL
        _mark_range(hit, j0[full], j1[full])
        wit = st == WITNESS
        hit[part.index_of(mid[wit])] = True
        split = (st == UNKNOWN) | wit
        # drop cells whose windows are all marked already (cheap for narrow cells)
        narrow = split & (j1 - j0 <= 1)
        done = narrow & hit[j0] & hit[j1]
        split &= ~done
        tiny = split & ((chi - clo) / 2 < min_width)
        if np.any(tiny):
            _mark_range(unsure, j0[tiny], j1[tiny])
            split &= ~tiny
        mids = mid[split]
        clo, chi = np.concatenate([clo[split], mids]), np.concatenate([mids, chi[split]])

    window_hit = hit | np.roll(hit, 1) | np.roll(hit, -1)
    window_unsure = unsure | np.roll(unsure, 1) | np.roll(unsure, -1)
    verdicts = np.full(m, STABLE, dtype=np.int8)
    verdicts[window_unsure] = UNDECIDED
    verdicts[window_hit] = UNSTABLE
    return IntervalClassification(part, verdicts, float(alpha), float(beta), scan.evals)


def is_exceptional(cls: IntervalClassification, delta: float) -> bool:
    """At least delta n windows unstable, counting undecided ones as unstable."""
    return cls.n_unstable + cls.n_undecided >= delta * cls.partition.n


def _dist_to_int(x):
    return np.abs(x - np.round(x))


def condition_t(t: float, n: int, tau: float = DEFAULT_TAU, C0prime: int = DEFAULT_C0PRIME) -> bool:
    """No 1 <= k <= C0prime with ||k t / pi|| <= n^(-1 + 8 tau)."""
    if C0prime < 1:
        raise ValueError("C0prime must be >= 1")
    k = np.arange(1, int(C0prime) + 1)
    thr = float(n) ** (-1.0 + 8.0 * tau)
    return bool(np.all(_dist_to_int(k * (t / math.pi)) > thr))


def unstable_root_mass(p: TrigPoly, cls: IntervalClassification) -> tuple[int, int]:
    """(roots in unstable windows, roots in stable windows)."""
    if not cls.decided:
        raise ValueError(f"{cls.n_undecided} undecided windows; classification incomplete")
    cc = count_certified(p)
    if not cc.certified:
        raise ValueError("torus root count could not be certified")
    if not cc.roots:
        return 0, 0
    roots = refine_roots(p, cc.roots)
    v = cls.verdicts[cls.partition.index_of(roots)]
    unstable = int(np.count_nonzero(v == UNSTABLE))
    return unstable, len(roots) - unstable


def claim_a1_sums(t: float, n: int, L: int, I_start: int, e, tau: float = DEFAULT_TAU,
                  C0prime: int = DEFAULT_C0PRIME) -> tuple[float, float]:
    """sum over i in I of <e, v_i>^2 and <e, v_i'>^2, I = {I_start, ..., I_start + L - 1}.

    v_i = (cos it, -(i/n) sin it) and v_i' = (sin it, (i/n) cos it).
    """
    e = np.asarray(e, dtype=np.float64)
    if e.shape != (2,) or abs(math.hypot(*e) - 1.0) > 1e-9:
        raise ValueError("e must be a unit vector in R^2")
    if L < n ** (1.0 - 4.0 * tau):
        raise ValueError(f"L = {L} is below n^(1-4 tau) = {n ** (1.0 - 4.0 * tau):.1f}")
    if I_start < 1:
        raise ValueError("indices start at 1")
    if not condition_t(t, n, tau, C0prime):
        raise ValueError(f"t = {t} fails the Diophantine condition")
    i = np.arange(I_start, I_start + L, dtype=np.float64)
    c, s = np.cos(i * t), np.sin(i * t)
    r = i / n
    v = e[0] * c - e[1] * r * s
    vp = e[0] * s + e[1] * r * c
    return math.fsum(v * v), math.fsum(vp * vp)
