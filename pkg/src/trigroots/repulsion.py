"""Small-ball probabilities of (P(t), P'(t)/n) and the characteristic
function of the Rademacher random walk behind them.

Writing P(t) = n^{-1/2} sum_i a_i v_i[0] + b_i v_i'[0] and
P'(t)/n = n^{-1/2} sum_i a_i v_i[1] + b_i v_i'[1] with

    v_i = (cos it, -(i/n) sin it),   v_i' = (sin it, (i/n) cos it),

the pair is a normalized sum of independent vectors in R^2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .ensembles import STREAM_BLOCKS, EnsembleSpec, trial_generator
from .geometry import DEFAULT_C0PRIME, DEFAULT_TAU, condition_t

BLOCK_VALUES = 1 << 22  # coefficient draws per Monte Carlo block


class ConditionWarning(UserWarning):
    """The evaluation angle fails the Diophantine condition."""


@dataclass(frozen=True)
class JointLaw2:
    t: float
    n: int
    cov: tuple[tuple[float, float], tuple[float, float]]

    @property
    def sigma(self) -> float:
        return math.sqrt(self.cov[1][1])


def walk_vectors(t: float, n: int):
    """(v, v') as arrays of shape (n, 2)."""
    i = np.arange(1, n + 1, dtype=np.float64)
    c, s = np.cos(i * t), np.sin(i * t)
    r = i / n
    return np.stack([c, -r * s], axis=1), np.stack([s, r * c], axis=1)


def joint_covariance(t: float, n: int) -> JointLaw2:
    """Covariance of (P(t), P'(t)/n) for unit-variance coefficients."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v, vp = walk_vectors(t, n)
    c00 = math.fsum(np.concatenate([v[:, 0] ** 2, vp[:, 0] ** 2])) / n
    c01 = math.fsum(np.concatenate([v[:, 0] * v[:, 1], vp[:, 0] * vp[:, 1]])) / n
    c11 = math.fsum(np.concatenate([v[:, 1] ** 2, vp[:, 1] ** 2])) / n
    closed = (n + 1) * (2 * n + 1) / (6.0 * n * n)
    if abs(c00 - 1.0) > 1e-12 or abs(c01) > 1e-12 or abs(c11 - closed) > 1e-12:
        raise ArithmeticError(
            f"covariance identities violated at t={t}, n={n}: ({c00}, {c01}, {c11})"
        )
    return JointLaw2(float(t), int(n), ((c00, c01), (c01, c11)))


def gaussian_smallball(t: float, n: int, alpha: float, beta: float) -> float:
    """P(|P(t)| <= alpha, |P'(t)| <= beta n) for Gaussian coefficients."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("alpha and beta must be positive")
    law = joint_covariance(t, n)
    s2 = math.sqrt(2.0)
    return float(special.erf(alpha / s2) * special.erf(beta / (law.sigma * s2)))


def _rows_per_block(n: int) -> int:
    return max(1, BLOCK_VALUES // (2 * n))


def smallball_blocks(spec: EnsembleSpec, t: float, n: int, trials: int, seed: int):
    """Yield arrays (|P(t)|, |P'(t)|/n) block by block.

    Block b draws its coefficients from the counter-based stream
    (seed, b); the block size depends on n only.
    """
    v, vp = walk_vectors(t, n)
    W = np.concatenate([v, vp], axis=0) / math.sqrt(n)  # (2n, 2)
    rows = _rows_per_block(n)
    done, block = 0, 0
    while done < trials:
        m = min(rows, trials - done)
        X = spec.draw(trial_generator(seed, block, STREAM_BLOCKS), (m, 2 * n))
        yield np.abs(X @ W)
        done += m
        block += 1


def smallball_grid(spec, t: float, n: int, alphas, betas, trials: int, seed: int = 0,
                   tau: float = DEFAULT_TAU, C0prime: int = DEFAULT_C0PRIME):
    """Estimates and binomial SEs for each pair (alphas[j], betas[j]) from one sample."""
    spec = EnsembleSpec.parse(spec)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not condition_t(t, n, tau, C0prime):
        warnings.warn(f"t = {t} fails the Diophantine condition at n = {n}", ConditionWarning,
                      stacklevel=2)
    alphas = np.atleast_1d(np.asarray(alphas, dtype=np.float64))
    betas = np.atleast_1d(np.asarray(betas, dtype=np.float64))
    if alphas.shape != betas.shape:
        raise ValueError("alphas and betas must have equal length")
    hits = np.zeros(alphas.size, dtype=np.int64)
    for vals in smallball_blocks(spec, t, n, trials, seed):
        for j, (a, b) in enumerate(zip(alphas, betas)):
            hits[j] += np.count_nonzero((vals[:, 0] <= a) & (vals[:, 1] <= b))
    est = hits / trials
    se = np.sqrt(est * (1.0 - est) / trials)
    return est, se


def empirical_smallball(spec, t: float, n: int, alpha: float, beta: float, trials: int,
                        seed: int = 0, tau: float = DEFAULT_TAU,
                        C0prime: int = DEFAULT_C0PRIME) -> tuple[float, float]:
    """Monte Carlo frequency of {|P(t)| <= alpha, |P'(t)| <= beta n} with its SE."""
    if trials <= 0:
        raise ValueError("trials must be >= 1")
    est, se = smallball_grid(spec, t, n, [alpha], [beta], trials, seed, tau, C0prime)
    return float(est[0]), float(se[0])


def in_regime(n: int, alpha: float, beta: float) -> bool:
    """Whether alpha, beta > 1/n, the range where an O(alpha beta) bound is claimed."""
    return alpha > 1.0 / n and beta > 1.0 / n


def _torus_dist(x):
    return np.abs(x - np.round(x))


@dataclass(frozen=True)
class CharProduct:
    product: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.product <= self.bound + 1e-12


def rademacher_char_product(t: float, n: int, x) -> CharProduct:
    """|prod_i cos<v_i, x> cos<v_i', x>| and its xi-norm exponential bound.

    For +-1 coefficients ||w||_xi^2 = ||2w||_{R/Z}^2 / 2, and the bound reads
    exp(-sum_i (||<v_i, x/2pi>||_xi^2 + ||<v_i', x/2pi>||_xi^2) / 2).
    Both are accumulated in log space.
    """
    x = np.asarray(x, dtype=np.float64).reshape(2)
    v, vp = walk_vectors(t, n)
    theta = np.concatenate([v @ x, vp @ x])
    with np.errstate(divide="ignore"):
        log_prod = float(np.sum(np.log(np.abs(np.cos(theta)))))
    w = theta / (2.0 * math.pi)
    xi_norm_sq = _torus_dist(2.0 * w) ** 2 / 2.0
    log_bound = -math.fsum(xi_norm_sq) / 2.0
    product = math.exp(log_prod) if log_prod > -745.0 else 0.0
    result = CharProduct(product, math.exp(log_bound))
    if not result.holds:
        raise ArithmeticError(f"characteristic-function bound violated at x = {x.tolist()}")
    return result
