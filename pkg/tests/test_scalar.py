import math

import numpy as np
import pytest

from synturb.params import make_params
from synturb.scalar import (
    ColoredFlow, GaussianBump, Indicator, MaxPrincipleError, ScalarProbe, TableProfile,
    WhiteNoiseFlow, energy_report, evaluate_scalar, function_of_scalar_check,
    gaussian_bump_energy, gaussian_bump_heat, max_principle_check, measure_preservation_check,
)

BAND = (0.1, 2.0)
BUMP = GaussianBump((0.0, 0.0), 1.0)


@pytest.fixture(scope="module")
def p():
    return make_params(1.2, 0.45, ell1=0.001)


@pytest.fixture(scope="module")
def flow(p):
    return ColoredFlow(p, band=BAND, n_modes=64, seed=3, dt=0.025)


def _axes(n, half=6.0):
    ax = np.linspace(-half, half, n)
    return (ax, ax)


class _Affine:
    """a * f + b * g with its range."""

    def __init__(self, f, g, a, b):
        self.f, self.g, self.a, self.b = f, g, a, b

    def __call__(self, x):
        return self.a * self.f(x) + self.b * self.g(x)

    @property
    def bounds(self):
        return (0.0, self.a + self.b)


def test_time_zero_returns_profile(flow):
    pr = ScalarProbe(BUMP, axes=_axes(11), kappa_tilde=0.1, n_paths=8, n_batches=4)
    r = evaluate_scalar(flow, pr, 0.0)
    assert np.array_equal(r.values, BUMP(pr.points))
    assert np.all(r.stderr == 0)
    e = energy_report(r)
    assert e.dissipation == 0.0


def test_zero_field_is_heat_kernel(p):
    fl = ColoredFlow(p.replace(e0=0.0), band=BAND, n_modes=16, seed=1, dt=0.05)
    pts = np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 1.0], [-1.5, 0.5]])
    pr = ScalarProbe(BUMP, points=pts, kappa_tilde=0.2, n_paths=4000, n_batches=8)
    r = evaluate_scalar(fl, pr, 2.0, seed=4)
    exact = gaussian_bump_heat(BUMP, pts, 0.2, 2.0)
    assert np.all(np.abs(r.values - exact) <= 3 * r.stderr)


def test_zero_field_energy(p):
    fl = ColoredFlow(p.replace(e0=0.0), band=BAND, n_modes=16, seed=1, dt=0.05)
    pr = ScalarProbe(BUMP, axes=_axes(41), kappa_tilde=0.2, n_paths=64, n_batches=8)
    e = energy_report(evaluate_scalar(fl, pr, 1.0, seed=2))
    exact = gaussian_bump_energy(BUMP, 2, 0.2, 1.0)
    assert abs(e.l2 - exact) <= 3 * math.hypot(e.l2_stderr, e.quadrature_error)
    assert e.initial_l2 == pytest.approx(gaussian_bump_energy(BUMP, 2), rel=1e-6)
    assert e.configuration == "positive-dissipation"


def test_max_principle_and_negative_control(flow):
    pr = ScalarProbe(BUMP, axes=_axes(21), kappa_tilde=0.05, n_paths=8, n_batches=4)
    r = evaluate_scalar(flow, pr, 1.0, seed=1)
    assert max_principle_check(r, pr).passed
    broken = evaluate_scalar(flow, pr, 1.0, seed=1, _estimator_hook=lambda s: 1.5 * s)
    with pytest.raises(MaxPrincipleError):
        max_principle_check(broken, pr)
    assert not max_principle_check(broken, pr, strict=False).passed


def test_max_principle_white_noise(p):
    fl = WhiteNoiseFlow(p, band=BAND, n_modes=64, seed=2, dt=0.05)
    pr = ScalarProbe(Indicator((-1.0, -1.0), (1.0, 1.0)), axes=_axes(15), kappa_tilde=0.05,
                     n_paths=4, n_batches=2)
    r = evaluate_scalar(fl, pr, 0.5)
    assert max_principle_check(r, pr).passed


@pytest.mark.parametrize("phi", [
    lambda v: v ** 2,
    lambda v: np.clip(v, 0.2, 0.6),
    lambda v: (v > 0.5).astype(float),
])
def test_function_of_scalar_commutes(flow, phi):
    pr = ScalarProbe(BUMP, axes=_axes(21))
    c = function_of_scalar_check(flow, pr, phi, 1.0, seed=5)
    assert c.passed and c.max_abs_diff <= 1e-10


def test_function_check_needs_conservative(flow):
    pr = ScalarProbe(BUMP, axes=_axes(5), kappa_tilde=0.1, n_paths=2, n_batches=1)
    with pytest.raises(ValueError):
        function_of_scalar_check(flow, pr, lambda v: v, 1.0)


def test_linearity_on_shared_paths(flow):
    other = GaussianBump((1.0, -0.5), 0.7)
    pr = ScalarProbe(BUMP, axes=_axes(15), kappa_tilde=0.05, n_paths=8, n_batches=4)
    ra = evaluate_scalar(flow, pr, 1.0, seed=8)
    rb = evaluate_scalar(flow, pr.with_profile(other), 1.0, seed=8)
    rc = evaluate_scalar(flow, pr.with_profile(_Affine(BUMP, other, 2.0, 3.0)), 1.0, seed=8)
    assert np.allclose(rc.values, 2 * ra.values + 3 * rb.values, rtol=1e-12, atol=1e-14)


def test_conservative_run_preserves_measure_and_energy(flow):
    pr = ScalarProbe(BUMP, axes=_axes(101))
    r = evaluate_scalar(flow, pr, 1.0)
    assert measure_preservation_check(r, pr).passed
    e = energy_report(r, coarse=evaluate_scalar(flow.coarsened(), pr, 1.0))
    assert abs(e.dissipation) <= 3 * e.dissipation_stderr
    assert e.configuration == "conservative"


def test_diffusive_run_dissipates(flow):
    pr = ScalarProbe(BUMP, axes=_axes(41), kappa_tilde=0.2, n_paths=16, n_batches=8)
    r = evaluate_scalar(flow, pr, 1.0, seed=3)
    e = energy_report(r)
    assert e.dissipation > 3 * e.dissipation_stderr


def test_table_profile_and_probe_errors():
    ax = np.linspace(-1, 1, 5)
    tp = TableProfile((ax, ax), np.ones((5, 5)))
    assert tp(np.array([[0.3, 0.2], [3.0, 0.0]])).tolist() == [1.0, 0.0]
    assert tp.bounds == (0.0, 1.0)
    with pytest.raises(ValueError):
        ScalarProbe(BUMP, axes=_axes(5), kappa_tilde=-1.0)
    with pytest.raises(ValueError):
        ScalarProbe(BUMP)
    with pytest.raises(ValueError):
        ScalarProbe(BUMP, axes=_axes(5), kappa_tilde=0.1, n_paths=5, n_batches=2)
    assert ScalarProbe(BUMP, axes=_axes(5), n_paths=10, n_batches=5).n_paths == 1


def test_time_must_fit_grid(flow):
    pr = ScalarProbe(BUMP, axes=_axes(5))
    with pytest.raises(ValueError):
        evaluate_scalar(flow, pr, 0.03)
    with pytest.raises(ValueError):
        evaluate_scalar(flow, pr, -1.0)
