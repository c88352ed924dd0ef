"""Independent reference computations used as test oracles.

Everything here is written from first principles with direct summation of
cos/sin terms, so it shares no code path with the FFT or Horner kernels
under test.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, stats


def naive_eval(a, b, x, m: int = 0):
    """m-th derivative of n^{-1/2} sum a_k cos kx + b_k sin kx by direct summation."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.size
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    k = np.arange(1, n + 1, dtype=np.float64)
    out = np.empty(x.size)
    for i, xi in enumerate(x):
        ph = k * xi + m * math.pi / 2.0  # d^m/dx^m cos(kx) = k^m cos(kx + m pi/2)
        terms = k**m * (a * np.cos(ph) + b * np.sin(ph))
        out[i] = math.fsum(terms) / math.sqrt(n)
    return out


def dense_grid_count(a, b, factor: int = 200, lo: float = -math.pi, hi: float = math.pi, cyclic=True):
    """Sign changes of the polynomial on factor*n points by direct summation."""
    n = len(a)
    M = factor * n
    if cyclic:
        x = lo + (hi - lo) * np.arange(M) / M
        v = naive_eval(a, b, x) >= 0
        return int(np.sum(v != np.roll(v, 1)))
    x = np.linspace(lo, hi, M + 1)
    v = naive_eval(a, b, x) >= 0
    return int(np.sum(v[1:] != v[:-1]))


def bisect_root(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if (fm >= 0) == (flo >= 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def quad_l2(a, b) -> float:
    """int_{-pi}^{pi} p^2 by adaptive quadrature on sub-panels."""
    n = len(a)
    edges = np.linspace(-math.pi, math.pi, 2 * n + 1)
    f = lambda x: naive_eval(a, b, x)[0] ** 2
    return math.fsum(integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
                     for lo, hi in zip(edges[:-1], edges[1:]))


def qualls_mean(n: int) -> float:
    return 2.0 * math.sqrt((2 * n + 1) * (n + 1) / 6.0)


def truncated_normal_kurtosis(c: float) -> float:
    """E xi^4 / (E xi^2)^2 for N(0,1) conditioned on |xi| <= c, via scipy."""
    d = stats.truncnorm(-c, c)
    return d.moment(4) / d.moment(2) ** 2


def bivariate_box(alpha: float, beta: float, sigma: float) -> float:
    """P(|X| <= alpha, |Y| <= beta) for independent N(0,1), N(0, sigma^2) by quadrature."""
    px = integrate.quad(stats.norm.pdf, -alpha, alpha)[0]
    py = integrate.quad(lambda y: stats.norm.pdf(y, scale=sigma), -beta, beta)[0]
    return px * py


def exact_is_zero(a, b, r) -> bool:
    """Whether sum a_k cos(k pi r) + b_k sin(k pi r) vanishes, in exact
    symbolic arithmetic (integer coefficients, rational r)."""
    import sympy

    x = sympy.pi * sympy.Rational(r.numerator, r.denominator)
    s = sum(int(ak) * sympy.cos(k * x) + int(bk) * sympy.sin(k * x)
            for k, (ak, bk) in enumerate(zip(a, b), start=1))
    return sympy.nsimplify(sympy.expand(s)) == 0
