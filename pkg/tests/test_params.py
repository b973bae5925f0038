import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from synturb.params import (
    ParameterError, SpectrumParams, c_alpha, classify_regime, energy_spectrum, exponents,
    lanczos_gamma, make_params, reynolds_ratio,
)

# mpmath at 40 digits, C(4/3, 3); see tests/oracles/make_oracles.py
C_FOUR_THIRDS_3D = 15.009489352181831187


def test_gamma_matches_mpmath_on_twenty_points():
    xs = np.linspace(0.5, 5.0, 20)
    for x in xs:
        ref = float(mpmath.gamma(mpmath.mpf(float(x))))
        assert abs(lanczos_gamma(float(x)) / ref - 1) < 1e-12


def test_gamma_reflection_and_poles():
    assert abs(lanczos_gamma(0.25) / float(mpmath.gamma(0.25)) - 1) < 1e-12
    assert abs(lanczos_gamma(-1.5) / float(mpmath.gamma(-1.5)) - 1) < 1e-12
    with pytest.raises(ParameterError):
        lanczos_gamma(0.0)
    with pytest.raises(ParameterError):
        lanczos_gamma(-2.0)


def test_c_alpha_three_halves_in_3d_is_8pi():
    assert abs(c_alpha(1.5, 3) / (8 * math.pi) - 1) < 1e-12


def test_c_alpha_regression_constant():
    assert abs(c_alpha(4 / 3, 3) / C_FOUR_THIRDS_3D - 1) < 1e-12


def test_c_alpha_vanishes_at_one():
    assert c_alpha(1 + 1e-12, 3) < 1e-10


def test_c_alpha_pole():
    with pytest.raises(ParameterError):
        c_alpha(2.0, 3)


@given(st.floats(1.001, 1.999), st.sampled_from([2, 3]))
def test_c_alpha_positive(alpha, dim):
    assert c_alpha(alpha, dim) > 0


def test_c_alpha_continuous():
    # no jumps away from the pole at alpha = 2
    a = np.linspace(1.05, 1.95, 500)
    for d in (2, 3):
        v = np.array([c_alpha(x, d) for x in a])
        assert np.all(np.abs(np.diff(np.log(v))) < 0.05)


def test_make_params_unit_scales():
    p = make_params(1.2, 0.45, u0=1.0, c0=1.0, ell0=1.0)
    assert p.e0 == pytest.approx(c_alpha(1.2, 2), rel=1e-15)
    assert p.a == 1.0


def test_make_params_scaling():
    p = make_params(1.2, 0.45, u0=2.0, c0=3.0, ell0=10.0, ell1=0.1)
    assert p.e0 == pytest.approx(c_alpha(1.2, 2) * 4 * 10 ** (2 - 2.4))
    assert p.a == pytest.approx(3.0 * 10 ** (0.9 - 1) * 2.0)


@pytest.mark.parametrize("kw,msg", [
    (dict(alpha=2.5, beta=0.4), "alpha"),
    (dict(alpha=1.0, beta=0.4), "alpha"),
    (dict(alpha=1.2, beta=0.0), "beta"),
    (dict(alpha=1.2, beta=0.4, ell1=2.0), "empty inertial band"),
])
def test_make_params_errors(kw, msg):
    with pytest.raises(ParameterError, match=msg):
        make_params(**kw)


def test_direct_construction_errors():
    with pytest.raises(ParameterError, match="dim"):
        SpectrumParams(1.2, 0.4, 1.0, 1.0, 1.0, 0.1, dim=4)
    with pytest.raises(ParameterError, match="a="):
        SpectrumParams(1.2, 0.4, 1.0, 0.0, 1.0, 0.1)


def test_exponents_kolmogorov_point():
    p = make_params(Fraction(4, 3), Fraction(1, 3))
    ex = exponents(p)
    assert ex.p == 3
    assert 2 * ex.eta == Fraction(4, 3)


def test_exponents_regime_v():
    ex = exponents(make_params(1.2, 0.45))
    assert ex.q == pytest.approx(0.35, abs=1e-15)
    assert ex.p == pytest.approx(1 / 0.35, rel=1e-14)
    assert ex.eta == pytest.approx(0.65, abs=1e-15)
    assert ex.regime == "white-noise"


def test_exponents_boundary():
    ex = exponents(make_params(1.5, 0.25))
    assert ex.q == pytest.approx(0.25)
    assert ex.regime == "boundary"
    assert exponents(make_params(1.5, 0.1)).q == pytest.approx(0.25)


@given(st.fractions(Fraction(101, 100), Fraction(199, 100)), st.fractions(Fraction(1, 100), Fraction(2)))
def test_exponent_identities(alpha, beta):
    if not (alpha + beta < 2 < alpha + 2 * beta):
        return
    ex = exponents(make_params(alpha, beta))
    assert ex.p * ex.q == 1
    assert ex.p == 1 / (1 - ex.eta)
    assert 0 < ex.q < 1 and ex.p > 2 and Fraction(1, 2) < ex.eta < 1


@pytest.mark.parametrize("alpha,beta,regime", [
    (1.2, 0.45, "v"), (1.5, 1.5, "i"), (1.5, 0.25, "boundary"), (1.5, 0.1, "frozen"),
    (1.2, 1.4, "ii"), (1.2, 1.2, "iii"), (1.2, 0.9, "iv"),
])
def test_classify_regime(alpha, beta, regime):
    assert classify_regime(make_params(alpha, beta)).regime == regime


def test_kolmogorov_flag():
    assert classify_regime(make_params(4 / 3, 1 / 3)).kolmogorov
    assert not classify_regime(make_params(1.2, 0.45)).kolmogorov


def test_regime_v_constraints():
    rep = classify_regime(make_params(1.2, 0.45))
    names = [m.name for m in rep.constraints]
    assert names == ["kappa*eps^2*K^1.9", "eps*K^0.9"]
    rep2 = classify_regime(make_params(1.2, 0.45), l_infinite=True)
    assert rep2.constraints[-1].name == "L^0.2*eps"
    rows = rep.audit(0.1, 0.9486832980505138, kappa=0.02)
    assert all(r["ok"] for r in rows)


@given(st.floats(1.01, 1.99), st.floats(0.01, 3.0))
def test_classification_is_a_partition(alpha, beta):
    rep = classify_regime(make_params(alpha, beta))
    s = alpha + 2 * beta
    expect = "boundary" if abs(s - 2) <= 1e-12 else ("frozen" if s < 2 else None)
    if expect:
        assert rep.regime == expect
    else:
        assert rep.regime in {"i", "ii", "iii", "iv", "v"}


def test_reynolds_ratio():
    assert reynolds_ratio(1.3, 1.0) == 1.0
    assert reynolds_ratio(4 / 3, 2 ** (4 / 3)) == pytest.approx(2.0, rel=1e-14)
    assert reynolds_ratio(1.5, 1e6) == pytest.approx(1e6, rel=1e-12)
    with pytest.raises(ParameterError):
        reynolds_ratio(2.0, 10.0)


def test_energy_spectrum_examples():
    p = make_params(1.2, 0.45, ell1=0.01)
    assert np.all(energy_spectrum(p, [200.0, 0.0]) == 0)
    k = 7.0
    s = energy_spectrum(p, [k, 0.0])
    assert np.allclose(s, p.e0 * k ** (1 - 2.4) * np.diag([0.0, 1.0]), rtol=1e-14, atol=0)
    with pytest.raises(ParameterError):
        energy_spectrum(p, [0.0, 0.0])


@given(st.floats(0, 2 * math.pi), st.floats(1.5, 40.0), st.floats(0.5, 2.0))
def test_energy_spectrum_properties(theta, k, lam):
    p = make_params(1.3, 0.4, ell1=0.01)
    kv = k * np.array([math.cos(theta), math.sin(theta)])
    s = energy_spectrum(p, kv)
    assert np.allclose(s, s.T)
    assert np.min(np.linalg.eigvalsh(s)) >= -1e-14 * np.max(np.abs(s))
    assert np.allclose(s @ kv, 0, atol=1e-12 * np.abs(s).max() * k)
    if 1.0 < lam * k < 100.0:
        s2 = energy_spectrum(p, lam * kv)
        ref = lam ** (1 - 2.6) * s
        assert np.allclose(s2, ref, rtol=1e-12, atol=1e-14 * np.abs(ref).max())
