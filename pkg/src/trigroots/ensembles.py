"""Coefficient laws (mean 0, variance 1) and reproducible sampling.

Randomness is counter based: the Philox key is a hash of the master seed and
a stream tag, and the counter's third word is the trial index.  The draws of
trial i therefore depend only on (master_seed, i), never on how trials are
batched or scheduled.
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .trigpoly import TrigPoly

MASK64 = (1 << 64) - 1

# stream tags keep independent uses of one master seed apart
STREAM_COEFFS = 0
STREAM_BLOCKS = 1
STREAM_MOMENTS = 2
STREAM_AUX = 3

NAMES = ("gaussian", "rademacher", "uniform", "bounded_two_point", "truncated_gaussian")
_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*$")


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0


@functools.lru_cache(maxsize=256)
def _philox_key(master_seed: int, stream: int) -> tuple[int, int]:
    ss = np.random.SeedSequence([master_seed & MASK64, stream])
    k = ss.generate_state(2, np.uint64)
    return int(k[0]), int(k[1])


def trial_generator(master_seed: int, trial_index: int, stream: int = STREAM_COEFFS) -> np.random.Generator:
    """Generator whose stream is a pure function of (master_seed, trial_index, stream)."""
    if not 0 <= trial_index <= MASK64:
        raise ValueError("trial_index must fit in 64 bits")
    key = np.array(_philox_key(master_seed, stream), dtype=np.uint64)
    bitgen = np.random.Philox(key=key, counter=np.array([0, 0, trial_index, 0], dtype=np.uint64))
    return np.random.Generator(bitgen)


def _truncated_variance(c: float) -> float:
    mass = special.erf(c / math.sqrt(2.0))
    phi = math.exp(-0.5 * c * c) / math.sqrt(2.0 * math.pi)
    return 1.0 - 2.0 * c * phi / mass


def _truncated_fourth(c: float) -> float:
    mass = special.erf(c / math.sqrt(2.0))
    phi = math.exp(-0.5 * c * c) / math.sqrt(2.0 * math.pi)
    m4 = 3.0 - 2.0 * phi * (c**3 + 3.0 * c) / mass
    return m4 / _truncated_variance(c) ** 2


@dataclass(frozen=True)
class EnsembleSpec:
    """A named coefficient law with its moment metadata.

    ``bound`` is C_0 for bounded laws (None otherwise); ``lsi_constant`` is the
    log-Sobolev constant when known to hold.
    """

    name: str
    param: float | None = None

    def __post_init__(self):
        if self.name not in NAMES:
            raise ValueError(f"unknown ensemble {self.name!r}; choose from {', '.join(NAMES)}")
        if self.name == "bounded_two_point":
            if self.param is None or not 0.0 < self.param < 1.0:
                raise ValueError("bounded_two_point(p) needs 0 < p < 1")
        elif self.name == "truncated_gaussian":
            if self.param is None or not self.param > 0.0:
                raise ValueError("truncated_gaussian(c) needs c > 0")
        elif self.param is not None:
            raise ValueError(f"{self.name} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "EnsembleSpec":
        """Parse ``name`` or ``name(param)``."""
        if isinstance(text, EnsembleSpec):
            return text
        m = _SPEC_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse ensemble {text!r}")
        name, param = m.group(1), m.group(2)
        return cls(name, float(param) if param else None)

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param:g})"

    def __str__(self):
        return self.label

    @property
    def fourth_moment(self) -> float:
        if self.name == "gaussian":
            return 3.0
        if self.name == "rademacher":
            return 1.0
        if self.name == "uniform":
            return 9.0 / 5.0
        if self.name == "bounded_two_point":
            p = self.param
            return ((1 - p) ** 3 + p**3) / (p * (1 - p))
        return _truncated_fourth(self.param)

    @property
    def bound(self) -> float | None:
        if self.name == "gaussian":
            return None
        if self.name == "rademacher":
            return 1.0
        if self.name == "uniform":
            return math.sqrt(3.0)
        if self.name == "bounded_two_point":
            p = self.param
            return max(math.sqrt((1 - p) / p), math.sqrt(p / (1 - p)))
        return self.param / math.sqrt(_truncated_variance(self.param))

    @property
    def is_bounded(self) -> bool:
        return self.bound is not None

    @property
    def lsi_constant(self) -> float | None:
        # Ent(f^2) <= C E|grad f|^2: C = 2 for N(0,1); uniform and the
        # truncated gaussian are log-concave on a bounded interval.
        if self.name == "gaussian":
            return 2.0
        if self.name == "uniform":
            return 2.0 * (2.0 * math.sqrt(3.0)) ** 2 / math.pi**2
        if self.name == "truncated_gaussian":
            return 2.0 / _truncated_variance(self.param)
        return None

    @property
    def satisfies_lsi(self) -> bool:
        return self.lsi_constant is not None

    def draw(self, gen: np.random.Generator, size) -> np.ndarray:
        """Draw i.i.d. copies of xi from ``gen``."""
        if self.name == "gaussian":
            return gen.standard_normal(size)
        if self.name == "rademacher":
            return gen.integers(0, 2, size=size, dtype=np.int8).astype(np.float64) * 2.0 - 1.0
        if self.name == "uniform":
            s = math.sqrt(3.0)
            return gen.uniform(-s, s, size)
        if self.name == "bounded_two_point":
            p = self.param
            hi, lo = math.sqrt((1 - p) / p), -math.sqrt(p / (1 - p))
            return np.where(gen.random(size) < p, hi, lo)
        c = self.param
        lo = special.ndtr(-c)
        u = lo + gen.random(size) * (1.0 - 2.0 * lo)
        z = special.ndtri(u)
        np.clip(z, -c, c, out=z)
        return z / math.sqrt(_truncated_variance(c))


def parse_ensemble(text) -> EnsembleSpec:
    return EnsembleSpec.parse(text)


@functools.lru_cache(maxsize=64)
def validate(spec: EnsembleSpec, T: int = 10**6, seed: int = 0) -> EnsembleSpec:
    """Empirical registration check: mean 0 and variance 1 at sample size T."""
    x = spec.draw(trial_generator(seed, 0, STREAM_MOMENTS), T)
    if abs(x.mean()) > 4.0 / math.sqrt(T) or abs(x.var() - 1.0) > 8.0 / math.sqrt(T):
        raise ValueError(f"{spec.label}: sample moments inconsistent with mean 0, variance 1")
    return spec


def sample_coeffs(spec: EnsembleSpec, n: int, master_seed: int, trials) -> np.ndarray:
    """Rows of 2n draws (a_1..a_n, b_1..b_n) for each trial index."""
    spec = EnsembleSpec.parse(spec)
    if n < 1:
        raise ValueError("degree must be >= 1")
    trials = np.atleast_1d(np.asarray(trials, dtype=np.uint64))
    out = np.empty((trials.size, 2 * n))
    for row, t in enumerate(trials):
        out[row] = spec.draw(trial_generator(master_seed, int(t)), 2 * n)
    return out


def sample_poly(spec, n: int, seed: SeedSpec | int) -> TrigPoly:
    spec = EnsembleSpec.parse(spec)
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(int(seed), 0)
    row = sample_coeffs(spec, n, seed.master_seed, [seed.trial_index])[0]
    return TrigPoly(row[:n], row[n:])


class MomentReport(NamedTuple):
    mean: float
    mean_se: float
    var: float
    var_se: float
    fourth: float
    fourth_se: float
    kurtosis: float  # excess, E xi^4 / (E xi^2)^2 - 3 from the sample


def moment_report(spec, T: int = 10**6, seed: int = 0) -> MomentReport:
    """Monte Carlo moments of xi with normal-approximation standard errors."""
    spec = EnsembleSpec.parse(spec)
    if T < 10**4:
        raise ValueError("moment_report needs T >= 10^4 draws")
    x = spec.draw(trial_generator(seed, 0, STREAM_MOMENTS), T)
    x2 = x * x
    x4 = x2 * x2
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    m4 = float(x4.mean())
    mean_se = math.sqrt(var / T)
    var_se = float(np.std((x - mean) ** 2, ddof=1)) / math.sqrt(T)
    fourth_se = float(np.std(x4, ddof=1)) / math.sqrt(T)
    kurt = float(np.mean((x - mean) ** 4)) / float(x.var()) ** 2 - 3.0
    return MomentReport(mean, mean_se, var, var_se, m4, fourth_se, kurt)
