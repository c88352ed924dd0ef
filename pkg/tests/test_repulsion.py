import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bivariate_box
from trigroots.geometry import condition_t
from trigroots.repulsion import (
    CharProduct,
    ConditionWarning,
    empirical_smallball,
    gaussian_smallball,
    in_regime,
    joint_covariance,
    rademacher_char_product,
    smallball_grid,
    walk_vectors,
)


def test_covariance_n3():
    law = joint_covariance(0.7, 3)
    assert law.cov[1][1] == pytest.approx(14 / 27, abs=1e-15)
    assert law.cov[0][0] == pytest.approx(1.0, abs=1e-15)
    assert abs(law.cov[0][1]) <= 1e-15


def test_covariance_limit():
    for n in (10, 100, 1000, 10_000):
        assert abs(joint_covariance(1.3, n).cov[1][1] - 1 / 3) <= 1.0 / n


@settings(max_examples=100, deadline=None)
@given(st.floats(-20, 20), st.integers(1, 3000))
def test_covariance_identities_random(t, n):
    law = joint_covariance(t, n)
    assert law.cov[0][1] == law.cov[1][0]


def test_walk_vectors_against_definition():
    v, vp = walk_vectors(0.4, 5)
    i = 3
    np.testing.assert_allclose(v[i - 1], [math.cos(i * 0.4), -(i / 5) * math.sin(i * 0.4)])
    np.testing.assert_allclose(vp[i - 1], [math.sin(i * 0.4), (i / 5) * math.cos(i * 0.4)])


def test_gaussian_smallball_limits():
    assert gaussian_smallball(1.0, 50, 40.0, 40.0) == pytest.approx(1.0, abs=1e-12)
    n = 10**6
    ratio = gaussian_smallball(1.0, n, 1e-4, 1e-4) / 1e-8
    assert ratio == pytest.approx(2 * math.sqrt(3) / math.pi, rel=1e-5)
    with pytest.raises(ValueError):
        gaussian_smallball(1.0, 5, 0.0, 0.1)


def test_gaussian_smallball_matches_box_oracle():
    n = 100
    sigma = math.sqrt((n + 1) * (2 * n + 1) / (6 * n * n))
    for a, b in [(0.1, 0.1), (0.5, 0.02), (1.5, 2.0)]:
        want = bivariate_box(a, b, sigma)
        assert gaussian_smallball(1.0, n, a, b) == pytest.approx(want, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.001, 3), st.floats(0.001, 3), st.floats(1.0, 3.0))
def test_gaussian_smallball_monotone(a, b, f):
    p = gaussian_smallball(1.0, 40, a, b)
    assert gaussian_smallball(1.0, 40, a * f, b) >= p
    assert gaussian_smallball(1.0, 40, a, b * f) >= p


def test_empirical_matches_oracle():
    est, se = empirical_smallball("gaussian", 1.0, 100, 0.3, 0.3, 200_000, seed=5)
    assert abs(est - gaussian_smallball(1.0, 100, 0.3, 0.3)) <= 3 * se


def test_empirical_zero_alpha_and_errors():
    est, se = empirical_smallball("rademacher", 1.0, 50, 0.0, 0.1, 20_000, seed=1)
    assert est == 0.0 and se == 0.0
    with pytest.raises(ValueError):
        empirical_smallball("gaussian", 1.0, 10, 0.1, 0.1, 0)


def test_stderr_scales_with_trials():
    _, s1 = empirical_smallball("gaussian", 1.0, 60, 0.3, 0.3, 50_000, seed=2)
    _, s2 = empirical_smallball("gaussian", 1.0, 60, 0.3, 0.3, 100_000, seed=3)
    _, s4 = empirical_smallball("gaussian", 1.0, 60, 0.3, 0.3, 200_000, seed=4)
    assert s2 / s1 == pytest.approx(1 / math.sqrt(2), rel=0.2)
    assert s4 / s1 == pytest.approx(0.5, rel=0.2)


@pytest.mark.filterwarnings("ignore::trigroots.repulsion.ConditionWarning")
def test_gaussian_ratio_independent_of_t():
    n, a = 80, 0.2
    ests, ses = [], []
    for t in np.linspace(0.3, 2.9, 10):
        e, s = empirical_smallball("gaussian", float(t), n, a, a, 60_000, seed=int(100 * t))
        ests.append(e / a**2)
        ses.append(s / a**2)
    for i in range(10):
        for j in range(i + 1, 10):
            assert abs(ests[i] - ests[j]) <= 3 * math.hypot(ses[i], ses[j])


def test_rademacher_ratio_bounded():
    assert condition_t(1.0, 500)
    est, _ = smallball_grid("rademacher", 1.0, 500, [0.1], [0.1], 100_000, seed=9)
    assert est[0] / 0.01 <= 3.0


def test_rational_t_warns():
    with pytest.warns(ConditionWarning):
        empirical_smallball("rademacher", math.pi / 2, 40, 0.2, 0.2, 1000)


@pytest.mark.filterwarnings("ignore::trigroots.repulsion.ConditionWarning")
def test_grid_is_deterministic_and_shape_checked():
    a = smallball_grid("uniform", 0.9, 30, [0.1, 0.2], [0.1, 0.2], 5000, seed=3)
    b = smallball_grid("uniform", 0.9, 30, [0.1, 0.2], [0.1, 0.2], 5000, seed=3)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[0][0] <= a[0][1]
    with pytest.raises(ValueError):
        smallball_grid("uniform", 0.9, 30, [0.1, 0.2], [0.1], 100)


def test_regime_flag():
    assert in_regime(100, 0.02, 0.02)
    assert not in_regime(100, 0.005, 0.5)


def test_char_product_origin():
    r = rademacher_char_product(1.0, 20, (0.0, 0.0))
    assert r.product == 1.0 and r.bound == 1.0 and r.holds


def test_char_product_direct():
    t, n, x = 0.8, 7, np.array([0.3, -1.1])
    v, vp = walk_vectors(t, n)
    want = abs(np.prod(np.cos(v @ x)) * np.prod(np.cos(vp @ x)))
    assert rademacher_char_product(t, n, x).product == pytest.approx(want, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(-math.pi, math.pi), st.integers(1, 400), st.floats(-50, 50), st.floats(-50, 50))
def test_char_product_bound_random(t, n, x0, x1):
    assert rademacher_char_product(t, n, (x0, x1)).holds


def test_char_product_flags_violation():
    assert not CharProduct(0.5, 0.4).holds


def test_char_product_decay_random_x():
    n, tau = 10**4, 1 / 64
    assert condition_t(1.0, n, tau)
    lo, hi = n ** (5 * tau - 0.5), n ** (1 - 8 * tau)
    rng = np.random.default_rng(2024)
    target = math.exp(-(n**tau))
    for _ in range(100):
        r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        phi = rng.uniform(0, 2 * math.pi)
        res = rademacher_char_product(1.0, n, (r * math.cos(phi), r * math.sin(phi)))
        assert res.product <= target
