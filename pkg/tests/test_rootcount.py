import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_grid_count, exact_is_zero
from trigroots.ensembles import EnsembleSpec, sample_coeffs, sample_poly
from trigroots.rootcount import (
    _sign_changes,
    count_certified,
    count_fast,
    count_screened,
    refine_root,
    refine_roots,
    rational_zeros,
    screened_counts,
)
from trigroots.trigpoly import TrigPoly, batch_eval_grid, evaluate, sup_bounds

GAUSS = EnsembleSpec("gaussian")


def test_cos_torus_count():
    p = TrigPoly([1.0], [0.0])
    cc = count_certified(p)
    assert cc.count == 2 and cc.certified and not cc.ambiguous
    roots = sorted(refine_root(p, br) for br in cc.roots)
    np.testing.assert_allclose(roots, [-math.pi / 2, math.pi / 2], atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 16, 50])
def test_sin_nx_has_2n_roots(n):
    p = TrigPoly.harmonic(n, n, "sin")
    cc = count_certified(p)
    assert cc.certified and cc.count == 2 * n
    assert count_fast(p) == 2 * n
    assert count_screened(p) == (2 * n, True)


def test_certified_count_invariants():
    p = sample_poly(GAUSS, 40, 11)
    cc = count_certified(p)
    assert cc.certified and cc.count == len(cc.roots)
    for (lo, hi), (lo2, _) in zip(cc.roots, cc.roots[1:]):
        assert hi <= lo2
    for lo, hi in cc.roots:
        assert (evaluate(p, lo) >= 0) != (evaluate(p, hi) >= 0)
    d = cc.to_dict()
    assert d["count"] == cc.count and d["certified"] is True


def test_budget_errors_and_exhaustion():
    p = sample_poly(GAUSS, 30, 1)
    with pytest.raises(ValueError):
        count_certified(p, budget=10)
    cc = count_certified(p, budget=16 * 30)
    assert not cc.certified and cc.ambiguous


def test_tangency_lands_in_ambiguous():
    # cos x - cos 2x = 3x^2/2 + O(x^4) touches zero at 0 without a sign change
    r2 = math.sqrt(2.0)
    p = TrigPoly([r2, -r2], [0.0, 0.0])
    cc = count_certified(p, domain=(-1.0, 1.0))
    assert not cc.certified
    assert any(lo <= 0.0 <= hi for lo, hi in cc.ambiguous)
    assert cc.count == 0


def test_domain_parsing():
    p = sample_poly(GAUSS, 10, 2)
    with pytest.raises(ValueError):
        count_certified(p, (1.0, 1.0))
    with pytest.raises(ValueError):
        count_certified(p, (0.0, 7.0))


@pytest.mark.parametrize("n", [1, 3, 8, 20, 64])
def test_certified_matches_dense_grid_oracle(n):
    for s in range(8):
        p = sample_poly(GAUSS, n, 100 * n + s)
        cc = count_certified(p)
        assert cc.certified
        assert cc.count == dense_grid_count(p.cos_coeffs, p.sin_coeffs)


def test_count_fast_examples():
    assert count_fast(TrigPoly([1.0], [0.0]), 64) == 2
    with pytest.raises(ValueError):
        count_fast(sample_poly(GAUSS, 10, 1), 79)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 48), st.integers(0, 10**9))
def test_fast_is_lower_bound_and_monotone_under_refinement(n, seed):
    p = sample_poly(GAUSS, n, seed)
    K = 8 * n
    c1, c2, c4 = count_fast(p, K), count_fast(p, 2 * K), count_fast(p, 4 * K)
    assert c1 <= c2 <= c4
    cc = count_certified(p)
    if cc.certified:
        assert c4 <= cc.count
        assert cc.count % 2 == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10**9))
def test_reflection_symmetry(n, seed):
    p = sample_poly(GAUSS, n, seed)
    a, b = count_certified(p), count_certified(p.negate_sin())
    assert a.certified and b.certified and a.count == b.count


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 60), st.integers(0, 10**9))
def test_domain_additivity(n, seed):
    p = sample_poly(GAUSS, n, seed)
    full, pos, neg = count_certified(p), count_certified(p, "half"), count_certified(p, "negative")
    assert full.certified and pos.certified and neg.certified
    assert pos.count + neg.count == full.count


def test_refine_root_examples():
    cos1 = TrigPoly([1.0], [0.0])
    assert abs(refine_root(cos1, (1.0, 2.0)) - math.pi / 2) <= 1e-12
    neg = TrigPoly([-1.0], [0.0])
    assert abs(refine_root(neg, (1.0, 2.0)) - math.pi / 2) <= 1e-12
    with pytest.raises(ValueError):
        refine_root(cos1, (0.0, 1.0))
    with pytest.raises(ValueError):
        refine_root(cos1, (2.0, 1.0))


def test_refine_root_residual_bound():
    p = sample_poly(GAUSS, 25, 9)
    L1 = sup_bounds(p, 1).upper
    cc = count_certified(p)
    xs = refine_roots(p, cc.roots)
    for br, xv in zip(cc.roots, xs):
        x = refine_root(p, br)
        assert br[0] <= x <= br[1]
        assert abs(evaluate(p, x)) <= L1 * 1e-12
        assert abs(x - xv) <= 1e-11


@pytest.mark.parametrize("n", [1, 5, 33, 128, 300])
def test_screened_counts_match_certified(n):
    rows = sample_coeffs(GAUSS, n, 7, range(40))
    for dom in (None, "half", "negative"):
        counts, ok = screened_counts(rows[:, :n], rows[:, n:], domain=dom)
        for j in range(0, 40, 4):
            cc = count_certified(TrigPoly(rows[j, :n], rows[j, n:]), dom)
            if ok[j] and cc.certified:
                assert counts[j] == cc.count


def test_screened_rejects_small_grid():
    with pytest.raises(ValueError):
        screened_counts(np.ones((1, 10)), np.ones((1, 10)), K=30)


@pytest.mark.xfail(strict=True, reason=(
    "An 8n-point grid misses close root pairs far more often than 0.1% of the time: "
    "measured agreement with the certified count at n=256 is about 36% over 10^4 Gaussian trials"
))
def test_fast_agreement_rate_at_8n():
    n, T = 256, 10_000
    agree = 0
    for start in range(0, T, 500):
        rows = sample_coeffs(GAUSS, n, 0, range(start, start + 500))
        a, b = rows[:, :n], rows[:, n:]
        exact, ok = screened_counts(a, b)
        assert ok.all()
        fast = _sign_changes(batch_eval_grid(a, b, 8 * n))
        agree += int(np.sum(fast == exact))
    assert agree / T >= 0.999


def test_rational_zeros_examples():
    # cos 3x vanishes at pi/6 and pi/2; sin 4x at every multiple of pi/4
    z = rational_zeros([0, 0, 1, 0], [0, 0, 0, 0], [Fraction(1, 6), Fraction(1, 2), Fraction(1, 3)])
    assert z.tolist() == [[True, True, False]]
    z = rational_zeros([0, 0, 0, 0], [0, 0, 0, 1], [Fraction(k, 4) for k in range(-4, 4)])
    assert z.all()
    with pytest.raises(ValueError):
        rational_zeros([1], [1], [Fraction(1, 5)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=2, max_size=16), st.integers(-11, 11),
       st.sampled_from([4, 6]))
def test_rational_zeros_against_symbolic(coef, num, den):
    n = len(coef) // 2
    a, b = coef[:n], coef[n:2 * n]
    r = Fraction(num, den)
    assert rational_zeros(a, b, [r])[0, 0] == exact_is_zero(a, b, r)


def test_rademacher_exact_zeros_do_not_inflate_counts():
    # +-1 coefficients vanish exactly at 0, pi and pi/6-type angles with
    # positive probability; counts must stay physical and consistent
    n, T = 20, 400
    rows = sample_coeffs("rademacher", n, 0, range(T))
    full, okf = screened_counts(rows[:, :n], rows[:, n:])
    half, okh = screened_counts(rows[:, :n], rows[:, n:], domain="half")
    neg, okn = screened_counts(rows[:, :n], rows[:, n:], domain="negative")
    assert full.max() <= 2 * n and okf.mean() > 0.97
    both = okf & okh & okn
    np.testing.assert_array_equal(half[both] + neg[both], full[both])
    assert np.all(full[okf] % 2 == 0)
    for j in np.nonzero(okf)[0][::10]:
        cc = count_certified(TrigPoly(rows[j, :n], rows[j, n:]))
        assert not cc.certified or cc.count == full[j]


def test_rademacher_tangency_at_zero_is_ambiguous():
    n = 20
    row = sample_coeffs("rademacher", n, 0, [38])[0]
    a, b = row[:n], row[n:]
    assert a.sum() == 0 and (np.arange(1, n + 1) * b).sum() == 0  # p(0) = p'(0) = 0
    cc = count_certified(TrigPoly(a, b))
    assert not cc.certified and cc.count <= 2 * n
    assert any(lo <= 0.0 <= hi for lo, hi in cc.ambiguous)
