import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synturb.kraichnan import (
    KraichnanOracle, diffusion_matrix, gamma1, gamma1_closed, longitudinal_diffusivity,
    simulate_limit_pairs, two_point_diffusion, two_point_moment,
)
from synturb.pairdisp import msd
from synturb.params import ParameterError, make_params
from synturb.statkit import fit_power_law


@pytest.fixture(scope="module")
def p():
    return make_params(1.2, 0.45)


def _rotation(theta, dim, axis_seed=0):
    if dim == 2:
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, -s], [s, c]])
    q, _ = np.linalg.qr(np.random.default_rng(axis_seed).standard_normal((3, 3)))
    return q


@pytest.mark.parametrize("dim", [2, 3])
def test_quadrature_matches_closed_form(dim):
    q = make_params(1.3, 0.4, dim=dim)
    o = KraichnanOracle(q)
    for r in np.geomspace(0.1, 10.0, 4):
        x = r * np.eye(dim)[0]
        a = gamma1(o, x, x)
        b = gamma1_closed(q, x)
        assert np.max(np.abs(a - b)) / np.abs(b).max() < 1e-3


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_closed_form_scale_covariance(p, lam):
    x = np.array([0.3, -0.7])
    eta = float(p.alpha + p.beta) - 1
    assert np.allclose(gamma1_closed(p, lam * x), lam ** (2 * eta) * gamma1_closed(p, x), rtol=1e-13, atol=0)


@given(st.floats(0, 2 * math.pi), st.floats(0.01, 100.0), st.integers(0, 100))
def test_closed_form_isotropy(theta, r, seed):
    for dim in (2, 3):
        q = make_params(1.2, 0.45, dim=dim)
        R = _rotation(theta, dim, seed)
        x = r * np.random.default_rng(seed).standard_normal(dim)
        g = gamma1_closed(q, x)
        assert np.allclose(gamma1_closed(q, R @ x), R @ g @ R.T, rtol=0, atol=1e-12 * np.abs(g).max())


@given(st.lists(st.floats(-50, 50), min_size=4, max_size=4), st.floats(0.0, 1.0))
def test_diffusion_matrices_psd(v, kappa0):
    o = KraichnanOracle(make_params(1.2, 0.45), kappa0)
    x1, x2 = np.array(v[:2]), np.array(v[2:])
    for m in (diffusion_matrix(o, x1), two_point_diffusion(o, x1, x2)):
        assert np.min(np.linalg.eigvalsh(m)) >= -1e-12 * max(1.0, np.trace(m))


def test_two_point_difference_matches_pair_generator(p):
    o = KraichnanOracle(p, 0.3)
    x1, x2 = np.array([1.0, 0.5]), np.array([-0.2, 0.4])
    m = two_point_diffusion(o, x1, x2)
    P = np.hstack([np.eye(2), -np.eye(2)])
    assert np.allclose(P @ m @ P.T, diffusion_matrix(o, x1 - x2), rtol=1e-12)


def test_difference_block_vanishes_at_coincidence(p):
    o = KraichnanOracle(p, 0.0)
    x = np.array([0.7, -0.3])
    P = np.hstack([np.eye(2), -np.eye(2)])
    m = two_point_diffusion(o, x, x)
    assert np.max(np.abs(P @ m @ P.T)) <= 1e-12 * np.abs(m).max()


def test_longitudinal_diffusivity(p):
    o = KraichnanOracle(p, 0.0)
    a = longitudinal_diffusivity(o, [1.0, 0.0])
    b = longitudinal_diffusivity(o, [2.0, 0.0])
    assert b / a == pytest.approx(2 ** (2 * 0.65), rel=1e-12)
    assert longitudinal_diffusivity(KraichnanOracle(p, 0.4), [0.0, 0.0]) == 0.2


def test_finite_band_approaches_infinite(p):
    x = np.array([1.0, 0.0])
    big = gamma1(KraichnanOracle(p, L=1e4), x, x)
    assert np.allclose(big, gamma1_closed(p, x), rtol=1e-2)


def test_oracle_errors(p):
    with pytest.raises(ParameterError):
        KraichnanOracle(make_params(1.6, 0.5))
    with pytest.raises(ParameterError):
        KraichnanOracle(p, -1.0)
    with pytest.raises(ParameterError):
        KraichnanOracle(p, K=10.0)
    with pytest.raises(ParameterError):
        KraichnanOracle(p, L=1.0, K=0.5)


def test_zero_field_limit_is_brownian(p):
    o = KraichnanOracle(p.replace(e0=0.0), 0.5)
    e = simulate_limit_pairs(o, [1.0, 0.0], 4.0, n_pairs=3000, seed=1, times=[1.0, 4.0])
    m = msd(e)
    assert np.all(np.abs(m.mean - (1 + 2 * 0.5 * m.t)) <= 3 * m.stderr)


def test_limit_pairs_deterministic_across_threads(p):
    o = KraichnanOracle(p)
    kw = dict(n_pairs=2100, seed=3, times=[0.5, 1.0])
    a = simulate_limit_pairs(o, [1.0, 0.0], 1.0, threads=1, **kw)
    b = simulate_limit_pairs(o, [1.0, 0.0], 1.0, threads=3, **kw)
    assert np.array_equal(a.traj, b.traj)


def test_limit_msd_exponent_three_dimensions():
    q = make_params(1.3, 0.35, dim=3)
    e = simulate_limit_pairs(KraichnanOracle(q), [1.0, 0.0, 0.0], 300.0, n_pairs=2000, seed=5,
                             times=np.geomspace(0.1, 300.0, 40))
    m = msd(e)
    fit = fit_power_law(m.t, m.mean, m.stderr, (30.0, 300.0))
    assert abs(fit.exponent - 1 / 0.35) / (1 / 0.35) < 0.1


def test_two_point_moment_basics(p):
    o = KraichnanOracle(p, 0.0)
    pts = np.array([[[1.0, 0.0], [0.0, 1.0]], [[0.5, 0.5], [0.5, 0.5]]])
    one = lambda a, b: np.ones(len(a))
    est, se = two_point_moment(o, one, pts, 0.5, n_paths=50)
    assert np.all(est == 1.0) and np.all(se == 0.0)
    sep = lambda a, b: np.sum((a - b) ** 2, axis=1)
    est0, _ = two_point_moment(o, sep, pts, 0.0)
    assert np.allclose(est0, [2.0, 0.0])
    est, _ = two_point_moment(o, sep, pts, 0.5, n_paths=200)
    # coincident points stay together
    assert est[1] == 0.0
    assert est[0] > 2.0


def test_two_point_moment_monotone(p):
    o = KraichnanOracle(p, 0.1)
    pts = np.array([[[1.0, 0.0], [0.0, 1.0]]])
    lo = lambda a, b: np.sum(a * a, axis=1)
    hi = lambda a, b: np.sum(a * a, axis=1) + np.sum(b * b, axis=1)
    e1, s1 = two_point_moment(o, lo, pts, 0.3, n_paths=400, seed=2)
    e2, s2 = two_point_moment(o, hi, pts, 0.3, n_paths=400, seed=2)
    assert np.all(e2 >= e1)


def test_two_point_difference_law(p):
    # pure molecular noise: the difference diffuses like a single pair separation
    o = KraichnanOracle(p.replace(e0=0.0), 0.5)
    pts = np.array([[[1.0, 0.0], [0.0, 0.0]]])
    sep = lambda a, b: np.sum((a - b) ** 2, axis=1)
    est, se = two_point_moment(o, sep, pts, 2.0, n_paths=4000, dt=0.5)
    assert abs(est[0] - (1 + 2 * 0.5 * 2.0)) <= 3 * se[0]
