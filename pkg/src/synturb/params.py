"""Model constants, scaling exponents and regime classification.

Every formula downstream reads its constants from a :class:`SpectrumParams`
instance.  Exponent arithmetic is written so that ``fractions.Fraction``
inputs stay exact (useful for the Kolmogorov point alpha=4/3, beta=1/3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ParameterError",
    "SpectrumParams",
    "ScalingExponents",
    "Monomial",
    "RegimeReport",
    "lanczos_gamma",
    "c_alpha",
    "make_params",
    "exponents",
    "classify_regime",
    "reynolds_ratio",
    "energy_spectrum",
]

_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when a parameter lies outside its admissible domain."""


# Lanczos approximation, g = 7, n = 9 (Godfrey coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(x: float) -> float:
    """Gamma function via the Lanczos series.

    Relative accuracy is better than 1e-13 on (0.5, 5); arguments below 1/2
    go through the reflection formula.  Non-positive integers are poles.
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise ParameterError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * lanczos_gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def c_alpha(alpha: float, dim: int) -> float:
    """Normalisation constant linking E0 to the rms longitudinal increment.

    ``(4 pi)^{d/2} 2^{2a-3} (2a-2) Gamma(a+d/2) / ((d-1) Gamma(2-a))``.
    Also used with ``alpha + beta`` in place of ``alpha`` for the limit
    covariance.
    """
    a = float(alpha)
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    if a >= 2.0:
        raise ParameterError(f"alpha={a}: Gamma(2 - alpha) has a pole at alpha = 2")
    if a <= 1.0:
        raise ParameterError(f"alpha={a} must exceed 1")
    num = (4.0 * math.pi) ** (dim / 2.0) * 2.0 ** (2 * a - 3) * (2 * a - 2)
    return num * lanczos_gamma(a + dim / 2.0) / ((dim - 1) * lanczos_gamma(2.0 - a))


@dataclass(frozen=True)
class SpectrumParams:
    """Constants of the synthetic velocity model.

    Parameters
    ----------
    alpha : spectral exponent, 1 < alpha < 2
    beta : correlation-time exponent, beta > 0
    e0 : spectral amplitude
    a : decorrelation rate coefficient, mode k decorrelates at ``a |k|^(2 beta)``
    ell0, ell1 : integral and viscous scales, ``0 < ell1 < ell0``
    dim : spatial dimension, 2 or 3
    """

    alpha: float
    beta: float
    e0: float
    a: float
    ell0: float
    ell1: float
    dim: int = 2

    def __post_init__(self):
        if not 1 < self.alpha < 2:
            raise ParameterError(f"alpha={self.alpha} violates 1 < alpha < 2")
        if not self.beta > 0:
            raise ParameterError(f"beta={self.beta} violates beta > 0")
        if self.dim not in (2, 3):
            raise ParameterError(f"dim={self.dim} must be 2 or 3")
        if not self.e0 >= 0:
            # e0 = 0 is allowed as a zero-field control
            raise ParameterError(f"e0={self.e0} violates e0 >= 0")
        if not self.a > 0:
            raise ParameterError(f"a={self.a} violates a > 0")
        if not self.ell1 > 0:
            raise ParameterError(f"ell1={self.ell1} violates ell1 > 0")
        if not self.ell1 < self.ell0:
            raise ParameterError(
                f"empty inertial band: ell1={self.ell1} must be below ell0={self.ell0}"
            )

    @property
    def band(self) -> tuple[float, float]:
        """Wavenumber band ``(1/ell0, 1/ell1)``."""
        return (1.0 / self.ell0, 1.0 / self.ell1)

    @property
    def c_alpha(self) -> float:
        return c_alpha(self.alpha, self.dim)

    def replace(self, **changes) -> "SpectrumParams":
        d = dict(
            alpha=self.alpha, beta=self.beta, e0=self.e0, a=self.a,
            ell0=self.ell0, ell1=self.ell1, dim=self.dim,
        )
        d.update(changes)
        return SpectrumParams(**d)

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.alpha), "beta": float(self.beta),
            "e0": float(self.e0), "a": float(self.a),
            "ell0": float(self.ell0), "ell1": float(self.ell1), "dim": int(self.dim),
        }


def make_params(alpha, beta, u0=1.0, c0=1.0, ell0=1.0, ell1=1e-3, dim=2) -> SpectrumParams:
    """Build parameters from the rms longitudinal increment ``u0`` at ``ell0``.

    ``e0 = C_alpha u0^2 ell0^(2-2 alpha)`` and ``a = c0 ell0^(2 beta - 1) u0``.
    The asymptotic (infinite band) relation is used as is.
    """
    if not 1 < alpha < 2:
        raise ParameterError(f"alpha={alpha} violates 1 < alpha < 2")
    if not u0 > 0:
        raise ParameterError(f"u0={u0} violates u0 > 0")
    if not c0 > 0:
        raise ParameterError(f"c0={c0} violates c0 > 0")
    if not ell0 > 0:
        raise ParameterError(f"ell0={ell0} violates ell0 > 0")
    alpha_f = float(alpha)
    e0 = c_alpha(alpha_f, dim) * u0**2 * ell0 ** (2 - 2 * alpha_f)
    a = c0 * ell0 ** (2 * float(beta) - 1) * u0
    return SpectrumParams(alpha, beta, e0, a, ell0, ell1, dim)


@dataclass(frozen=True)
class ScalingExponents:
    q: float
    p: float
    eta: float
    nu: float
    gamma: tuple  # (kappa0 == 0, kappa0 > 0)
    regime: str = "white-noise"


def _sum_class(s) -> str:
    if abs(float(s) - 2.0) <= _TOL:
        return "boundary"
    return "frozen" if s < 2 else "white-noise"


def exponents(params: SpectrumParams) -> ScalingExponents:
    """Time-rescaling, dispersion and limit exponents.

    White-noise branch (alpha + 2 beta > 2): ``q = 2 - alpha - beta``.
    Boundary (alpha + 2 beta = 2) and frozen (< 2) branches: ``q = 1 - alpha/2``.
    In all branches ``p = 1/q`` and ``eta = 1 - q``.
    """
    al, be = params.alpha, params.beta
    s = al + 2 * be
    branch = _sum_class(s)
    if branch == "white-noise":
        q = 2 - al - be
    else:
        q = 1 - al / 2
    p = 1 / q if q != 0 else math.inf
    eta = 1 - q
    m = 3 - s
    nu = (4 - s) / m if m != 0 else math.inf
    g0 = m / (4 - s) if (4 - s) != 0 else math.nan
    g1 = (4 - s) / (6 - s) if (6 - s) != 0 else math.nan
    return ScalingExponents(q=q, p=p, eta=eta, nu=nu, gamma=(g0, g1), regime=branch)


@dataclass(frozen=True)
class Monomial:
    """Rate expression ``eps^e K^k L^l kappa^c (log K)^g`` that must vanish."""

    name: str
    eps: float = 0.0
    K: float = 0.0
    L: float = 0.0
    kappa: float = 0.0
    logK: float = 0.0

    def value(self, eps, K, L=1.0, kappa=1.0) -> float:
        v = eps**self.eps * K**self.K * L**self.L
        if self.kappa:
            v *= kappa**self.kappa
        if self.logK:
            v *= math.log(K) ** self.logK
        return float(v)


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    constraints: tuple = ()
    kolmogorov: bool = False
    alpha_plus_2beta: float = 0.0
    alpha_plus_beta: float = 0.0
    notes: tuple = ()

    def audit(self, eps, K, L=1.0, kappa=1.0, threshold=0.1) -> list[dict]:
        """Evaluate every constraint monomial at one point of an eps-sweep."""
        rows = []
        for m in self.constraints:
            v = m.value(eps, K, L, kappa)
            rows.append({"name": m.name, "value": v, "ok": bool(v < threshold)})
        return rows


def classify_regime(
    params: SpectrumParams,
    kappa0_positive: bool = True,
    *,
    l_infinite: bool = False,
    kappa_zero: bool = False,
) -> RegimeReport:
    """Assign the scaling-limit class of ``(alpha, beta)`` and list its constraints.

    ``l_infinite`` selects the simultaneous ``L -> infinity`` limit (extra
    ``L^{2(alpha+2beta-2)} eps`` constraint); ``kappa_zero`` selects the
    vanishing-molecular-diffusivity transport limit.
    """
    al, be = float(params.alpha), float(params.beta)
    s = al + 2 * be
    kolm = abs(s - 2) <= _TOL and abs(al - be - 1) <= _TOL
    notes = []
    cons: list[Monomial] = []
    if abs(s - 2) <= _TOL:
        regime = "boundary"
        notes.append("q = 1 - alpha/2; no restriction on the vanishing rate of ell1")
    elif s < 2:
        regime = "frozen"
        notes.append("q = 1 - alpha/2; field time slowed down as eps -> 0")
    else:
        if s > 4 + _TOL:
            regime = "i"
        elif abs(s - 4) <= _TOL:
            regime = "ii"
        elif s > 3 + _TOL:
            regime = "iii"
        elif abs(s - 3) <= _TOL:
            regime = "iv"
        else:
            regime = "v"
        kk = "kappa*eps^2"
        if kappa_zero:
            if s > 3 + _TOL:
                pass
            elif abs(s - 3) <= _TOL:
                cons.append(Monomial("eps*sqrt(log K)", eps=1, logK=0.5))
            else:
                cons.append(Monomial(f"eps*K^{3 - s:.6g}", eps=1, K=3 - s))
        elif regime == "ii":
            cons.append(Monomial(f"{kk}*sqrt(log K)", eps=2, kappa=1, logK=0.5))
        elif regime == "iii":
            cons.append(Monomial(f"{kk}*K^{4 - s:.6g}", eps=2, K=4 - s, kappa=1))
        elif regime == "iv":
            cons.append(Monomial(f"{kk}*K", eps=2, K=1, kappa=1))
            cons.append(Monomial("eps*sqrt(log K)", eps=1, logK=0.5))
        elif regime == "v":
            cons.append(Monomial(f"{kk}*K^{4 - s:.6g}", eps=2, K=4 - s, kappa=1))
            cons.append(Monomial(f"eps*K^{3 - s:.6g}", eps=1, K=3 - s))
        if l_infinite:
            if not al + be < 2:
                notes.append("L -> infinity requires alpha + beta < 2")
            cons.append(Monomial(f"L^{2 * (s - 2):.6g}*eps", eps=1, L=2 * (s - 2)))
        if not kappa0_positive:
            notes.append("kappa0 = 0: no positive dissipation in the limit")
    return RegimeReport(
        regime=regime, constraints=tuple(cons), kolmogorov=kolm,
        alpha_plus_2beta=s, alpha_plus_beta=al + be, notes=tuple(notes),
    )


def reynolds_ratio(alpha: float, re: float) -> float:
    """Scale separation ``ell0/ell1 ~ Re^(1/(4 - 2 alpha))``."""
    if alpha >= 2:
        raise ParameterError(f"alpha={alpha}: exponent 1/(4 - 2 alpha) undefined at alpha >= 2")
    if re < 1:
        raise ParameterError(f"re={re} must be >= 1")
    return float(re) ** (1.0 / (4.0 - 2.0 * float(alpha)))


def energy_spectrum(params: SpectrumParams, k, band: Optional[Sequence[float]] = None) -> np.ndarray:
    """Spectral tensor ``E0 (I - k k/|k|^2) |k|^(1 - 2 alpha)`` on the band, 0 outside."""
    k = np.asarray(k, dtype=float)
    kn = float(np.linalg.norm(k))
    if kn == 0.0:
        raise ParameterError("energy_spectrum is undefined at k = 0")
    lo, hi = band if band is not None else params.band
    d = k.shape[0]
    if not lo < kn < hi:
        return np.zeros((d, d))
    kh = k / kn
    return params.e0 * (np.eye(d) - np.outer(kh, kh)) * kn ** (1 - 2 * float(params.alpha))
