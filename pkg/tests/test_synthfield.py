import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synturb.params import make_params
from synturb.rng import stream
from synturb.synthfield import (
    advance, build_modes, eval_increment, ou_coefficients, structure_function_estimate,
    structure_function_exact, synthesize,
)

# brute-force trapezoid over (log k, angle); tests/oracles/make_oracles.py
S_DENSE = np.array([[0.7320740472239768, -0.1363782519515157],
                    [-0.1363782519515157, 0.6525200669189257]])


@pytest.fixture(scope="module")
def p():
    return make_params(1.2, 0.45, ell1=0.01)


def test_exact_matches_dense_grid(p):
    s = structure_function_exact(p, [0.3, 0.4], 0.0, rtol=1e-9)
    assert np.max(np.abs(s - S_DENSE)) / np.abs(S_DENSE).max() < 1e-5


def test_exact_symmetric_psd_and_decaying(p):
    r = np.array([0.2, -0.1])
    s0 = structure_function_exact(p, r)
    s1 = structure_function_exact(p, r, tau=0.5)
    assert np.allclose(s0, s0.T)
    assert np.all(np.linalg.eigvalsh(s0) > 0)
    assert np.trace(s1) < np.trace(s0)


def test_synthesize_is_deterministic(p):
    a = synthesize(p, 64, seed=5, n_real=3)
    b = synthesize(p, 64, seed=5, n_real=3)
    c = synthesize(p, 64, seed=6, n_real=3)
    assert np.array_equal(a.amp, b.amp)
    assert np.array_equal(a.modes.wavevectors, b.modes.wavevectors)
    assert not np.array_equal(a.amp, c.amp)
    advance(a, 0.1)
    advance(b, 0.1)
    assert np.array_equal(a.amp, b.amp)


@pytest.mark.parametrize("dim", [2, 3])
def test_incompressible(dim):
    q = make_params(1.3, 0.4, ell1=0.01, dim=dim)
    f = synthesize(q, 128, seed=1, n_real=4)
    for _ in range(3):
        k = f.modes.wavevectors
        dot = np.abs(np.einsum("rmd,rmd->rm", k, f.amp))
        nrm = np.linalg.norm(k, axis=2) * np.linalg.norm(f.amp, axis=2)
        assert np.max(dot / nrm) < 1e-12
        advance(f, 0.3)


def test_increment_vanishes_at_origin(p):
    f = synthesize(p, 64, seed=2)
    assert np.array_equal(eval_increment(f, [0.0, 0.0]), np.zeros(2))


def test_increment_real_and_per_realization(p):
    f = synthesize(p, 64, seed=3, n_real=4)
    x = np.full((4, 2), 0.25)
    w = eval_increment(f, x)
    for r in range(4):
        assert np.allclose(eval_increment(f, x[:1], realization=r)[0], w[r])
    with pytest.raises(ValueError):
        eval_increment(f, np.zeros((3, 2)))


@given(st.floats(1e-4, 1e3), st.floats(1e-4, 10.0))
def test_ou_coefficients_stationary(rate, dt):
    decay, inject = ou_coefficients(np.array([rate]), dt)
    # variance is preserved: decay^2 + inject = 1
    assert abs(decay[0] ** 2 + inject[0] - 1) < 1e-12
    d2, _ = ou_coefficients(np.array([rate]), 2 * dt)
    assert abs(d2[0] - decay[0] ** 2) < 1e-12 * max(1.0, d2[0])


def test_ou_coefficients_infinite_lag():
    decay, inject = ou_coefficients(np.array([1.0, 2.0]), math.inf)
    assert np.all(decay == 0) and np.all(inject == 1)


def test_advance_zero_and_negative(p):
    f = synthesize(p, 32, seed=4, n_dir=16)
    a0 = f.amp.copy()
    advance(f, 0.0)
    assert np.array_equal(f.amp, a0)
    with pytest.raises(ValueError):
        advance(f, -1.0)


def test_build_modes_errors(p):
    rng = stream(0, "t")
    with pytest.raises(ValueError, match="multiple"):
        build_modes(p, 30, rng=rng, n_dir=16)
    with pytest.raises(ValueError, match="band"):
        build_modes(p, 32, band=(2.0, 1.0), rng=rng)
    with pytest.raises(ValueError, match="rng"):
        build_modes(p, 32)


def test_mode_variance_reproduces_energy(p):
    # deterministic placement: single-point variance of the real field
    m = build_modes(p, 4096, jitter=False, n_dir=16)
    total = 0.5 * float(np.sum(m.std ** 2)) * (p.dim - 1)
    lo, hi = p.band
    s = float(p.alpha)
    # (2 pi)^-2 int e0 |k|^(1-2s) |k|^-1 d^2k over the annulus
    exact = p.e0 * (hi ** (2 - 2 * s) - lo ** (2 - 2 * s)) / (2 - 2 * s) / (2 * math.pi)
    assert total == pytest.approx(exact, rel=1e-4)


def test_estimate_within_three_sigma_small(p):
    f = synthesize(p, 256, seed=11, n_real=2000)
    r = np.array([0.08, 0.06])
    est, se = structure_function_estimate(f, r, 0.0)
    ex = structure_function_exact(p, r)
    assert np.all(np.abs(est - ex) <= 4 * se)
