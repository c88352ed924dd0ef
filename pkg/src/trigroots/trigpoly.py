"""Trigonometric polynomials in the normalization

    P(x) = n**-0.5 * sum_{k=1..n} a_k cos(kx) + b_k sin(kx),

together with evaluation, differentiation, norms and sup bounds.

All integrals use unnormalized Lebesgue measure on [-pi, pi), so that
Parseval reads  int P^2 = (pi/n) * sum(a_k^2 + b_k^2).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.fft

TWO_PI = 2.0 * math.pi


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Real trigonometric polynomial of degree ``n`` without constant term.

    Coefficients are stored unscaled; the factor ``1/sqrt(n)`` is applied at
    evaluation time.  Instances are immutable.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        a = _frozen(self.cos_coeffs)
        b = _frozen(self.sin_coeffs)
        if a.size == 0:
            raise ValueError("degree must be a positive integer")
        if a.shape != b.shape:
            raise ValueError(
                f"cos_coeffs and sin_coeffs must both have length n "
                f"(got {a.size} and {b.size})"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def degree(self) -> int:
        return int(self.cos_coeffs.size)

    n = degree

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(self.degree)

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return (
            self.degree == other.degree
            and np.array_equal(self.cos_coeffs, other.cos_coeffs)
            and np.array_equal(self.sin_coeffs, other.sin_coeffs)
        )

    def __hash__(self):
        return hash((self.cos_coeffs.tobytes(), self.sin_coeffs.tobytes()))

    def __repr__(self):
        return f"TrigPoly(n={self.degree})"

    @classmethod
    def harmonic(cls, n: int, k: int, kind: str = "cos", amplitude: float = 1.0) -> "TrigPoly":
        """Degree-``n`` polynomial equal to ``amplitude * cos(kx)`` (or sin)."""
        if not 1 <= k <= n:
            raise ValueError("need 1 <= k <= n")
        a = np.zeros(n)
        b = np.zeros(n)
        target = a if kind == "cos" else b
        target[k - 1] = amplitude * math.sqrt(n)
        return cls(a, b)

    def negate_sin(self) -> "TrigPoly":
        """The reflected polynomial x -> P(-x)."""
        return TrigPoly(self.cos_coeffs, -self.sin_coeffs)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        if not isinstance(other, TrigPoly):
            return NotImplemented
        n = max(self.degree, other.degree)
        a = np.zeros(n)
        b = np.zeros(n)
        for p in (self, other):
            # rescale so the sum is exact in the common 1/sqrt(n) normalization
            s = math.sqrt(n / p.degree)
            a[: p.degree] += p.cos_coeffs * s
            b[: p.degree] += p.sin_coeffs * s
        return TrigPoly(a, b)

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.degree,
            "a": [float(v) for v in self.cos_coeffs],
            "b": [float(v) for v in self.sin_coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrigPoly":
        a = d.get("a", d.get("cos_coeffs"))
        b = d.get("b", d.get("sin_coeffs"))
        p = cls(a, b)
        if "n" in d and int(d["n"]) != p.degree:
            raise ValueError("declared n does not match coefficient length")
        return p

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TrigPoly":
        return cls.from_dict(json.loads(text))

    def to_csv_row(self) -> str:
        vals = [str(self.degree)] + [repr(float(v)) for v in self.cos_coeffs]
        vals += [repr(float(v)) for v in self.sin_coeffs]
        return ",".join(vals)

    @classmethod
    def from_csv_row(cls, row: str) -> "TrigPoly":
        fields = [f.strip() for f in row.strip().split(",")]
        n = int(fields[0])
        if len(fields) != 1 + 2 * n:
            raise ValueError(f"expected {1 + 2 * n} fields, got {len(fields)}")
        vals = [float(f) for f in fields[1:]]
        return cls(vals[:n], vals[n:])


@dataclass(frozen=True)
class DerivativeRep:
    """m-th derivative of a TrigPoly, itself stored as a TrigPoly.

    ``base`` keeps the ``1/sqrt(n)`` normalization of the original degree, so
    ``evaluate(rep.base, x)`` is the m-th derivative of the original at x.
    """

    order: int
    base: TrigPoly

    def __call__(self, x):
        return evaluate(self.base, x)


def _as_poly(p) -> TrigPoly:
    return p.base if isinstance(p, DerivativeRep) else p


def derivative_coeffs(a: np.ndarray, b: np.ndarray, m: int):
    """Apply (a, b) -> (k b, -k a) m times along the last axis."""
    if m < 0:
        raise ValueError("derivative order must be non-negative")
    k = np.arange(1, a.shape[-1] + 1, dtype=np.float64)
    km = k**m
    r = m % 4
    if r == 0:
        return a * km, b * km
    if r == 1:
        return b * km, -a * km
    if r == 2:
        return -a * km, -b * km
    return -b * km, a * km


def derivative(p: TrigPoly, m: int = 1) -> DerivativeRep:
    p = _as_poly(p)
    if m < 0:
        raise ValueError("derivative order must be non-negative")
    a, b = derivative_coeffs(p.cos_coeffs, p.sin_coeffs, m)
    return DerivativeRep(order=m, base=TrigPoly(a, b))


def complex_coeffs(p: TrigPoly, m: int = 0) -> np.ndarray:
    """c_k with  p^(m)(x) = Re sum_k c_k e^{ikx}  (normalization included)."""
    a, b = derivative_coeffs(p.cos_coeffs, p.sin_coeffs, m)
    return (a - 1j * b) * p.scale


def evaluate(p, x):
    """Value of p at x (scalar or array).

    Horner's scheme in e^{ix}: one complex rotation per harmonic, no per-term
    trig calls, accumulated in extended precision.
    """
    p = _as_poly(p)
    xs = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(xs)):
        raise ValueError("x must be finite")
    xl = xs.astype(np.longdouble)
    z = np.cos(xl) + 1j * np.sin(xl)
    c = (p.cos_coeffs.astype(np.longdouble) - 1j * p.sin_coeffs.astype(np.longdouble))
    acc = np.zeros(xs.shape, dtype=np.clongdouble)
    for ck in c[::-1]:
        acc = (acc + ck) * z
    out = (acc.real / np.sqrt(np.longdouble(p.degree))).astype(np.float64)
    return float(out) if out.ndim == 0 else out


def horner_many(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Re sum_k coeffs[..., k-1] e^{ikx} for each row of ``coeffs``.

    ``coeffs`` has shape (r, n) (complex, normalization already applied) and
    ``x`` shape (M,); returns (r, M).  Double precision; used by the
    certification kernels where many points are evaluated at once.
    """
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(1j * x)
    acc = np.zeros((coeffs.shape[0], x.size), dtype=np.complex128)
    for k in range(coeffs.shape[1] - 1, -1, -1):
        acc += coeffs[:, k : k + 1]
        acc *= z
    return acc.real


def evaluate_derivatives(p: TrigPoly, x, orders: Sequence[int] = (0, 1)) -> np.ndarray:
    """Rows p^(m)(x) for m in ``orders``; shape (len(orders), len(x))."""
    p = _as_poly(p)
    coeffs = np.stack([complex_coeffs(p, m) for m in orders])
    return horner_many(coeffs, np.atleast_1d(x))


def grid_points(K: int) -> np.ndarray:
    return -math.pi + TWO_PI * np.arange(K) / K


def batch_eval_grid(a: np.ndarray, b: np.ndarray, K: int, order: int = 0) -> np.ndarray:
    """Grid values for a batch of coefficient rows.

    ``a`` and ``b`` have shape (..., n); returns (..., K) with entry j equal to
    the order-th derivative at x_j = -pi + 2 pi j / K.
    """
    n = a.shape[-1]
    if K < 2 * n + 2:
        raise ValueError(f"grid size K={K} < 2n+2={2 * n + 2} would alias")
    da, db = derivative_coeffs(a, b, order)
    k = np.arange(1, n + 1)
    phase = np.where(k % 2 == 0, 1.0, -1.0)  # e^{-ik pi}
    spec = np.zeros(a.shape[:-1] + (K // 2 + 1,), dtype=np.complex128)
    spec[..., 1 : n + 1] = (da - 1j * db) * phase
    vals = scipy.fft.irfft(spec, n=K, axis=-1)
    return vals * (K / 2.0 / math.sqrt(n))


def eval_grid(p: TrigPoly, K: int, order: int = 0) -> np.ndarray:
    """Values at x_j = -pi + 2 pi j/K, j = 0..K-1, via an inverse real FFT."""
    p = _as_poly(p)
    return batch_eval_grid(p.cos_coeffs, p.sin_coeffs, K, order)


def l2_norm_sq(p: TrigPoly) -> float:
    p = _as_poly(p)
    s = math.fsum(p.cos_coeffs**2) + math.fsum(p.sin_coeffs**2)
    return math.pi / p.degree * s


class SupBounds(NamedTuple):
    upper: float
    lower: float


def coefficient_bound(p: TrigPoly, m: int = 0) -> float:
    """n^{-1/2} sum k^m (|a_k| + |b_k|), an upper bound on sup |p^(m)|."""
    p = _as_poly(p)
    k = np.arange(1, p.degree + 1, dtype=np.float64)
    return float(np.sum(k**m * (np.abs(p.cos_coeffs) + np.abs(p.sin_coeffs)))) * p.scale


def sup_bounds(p: TrigPoly, m: int = 0) -> SupBounds:
    p = _as_poly(p)
    if m < 0:
        raise ValueError("derivative order must be non-negative")
    K = max(4 * p.degree, 2 * p.degree + 2)
    lower = float(np.max(np.abs(eval_grid(p, K, order=m))))
    return SupBounds(coefficient_bound(p, m), lower)


def sup_norm_bound(p: TrigPoly, m: int = 0, K: int | None = None) -> float:
    """Sharper rigorous bound on sup |p^(m)|.

    From grid samples with spacing h = 2 pi/K and Bernstein's sup-norm
    inequality |p'| <= n sup|p|:  sup|p| <= max_grid|p| / (1 - pi n/K).
    The result is capped by the coefficient bound.
    """
    p = _as_poly(p)
    n = p.degree
    K = K or 8 * n
    if K <= math.pi * n:
        raise ValueError("K must exceed pi*n")
    s0 = float(np.max(np.abs(eval_grid(p, K)))) / (1.0 - math.pi * n / K)
    return min(coefficient_bound(p, m), n**m * s0)
