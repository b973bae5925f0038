"""Radial quadrature of isotropic, incompressible spectral integrals.

All covariance kernels in the package reduce to

    G(r) = (2 pi)^-d  int 2 [1 - cos(k.r)] e^{-a |k|^{2 beta} tau} E0 P(k) |k|^{1 - 2 s} |k|^{1-d} dk

over a band of |k|, with ``P = I - k k/|k|^2``.  By isotropy ``G`` is
``G_LL r^ r^ + G_NN (I - r^ r^)``; the angular integrals are done in closed
form with Bessel functions, leaving a one-dimensional integral over ``log k``.
The ``(2 pi)^-d`` normalisation makes the longitudinal component equal
``E0 |r|^{2 s - 2} / C_s`` in the infinite band.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate, special

__all__ = ["QuadratureError", "angular_kernels", "radial_components", "assemble_tensor"]

_SERIES_Z = 1.0
_N_SERIES = 20
_TAIL_Z_LO = 0.05
_TAIL_Z_HI = 1e4
_EXP_CUT = 80.0


_TWO_PI = 2 * math.pi
_j0 = special.j0
_j1 = special.j1


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _dfact_ratio(n):
    # (2n-1)!! / (2n)!!
    out = 1.0
    for j in range(1, n + 1):
        out *= (2 * j - 1) / (2 * j)
    return out


@lru_cache(maxsize=None)
def _series_coefficients(dim):
    ll = np.empty(_N_SERIES)
    nn = np.empty(_N_SERIES)
    for i in range(_N_SERIES):
        n = i + 1
        pref = 2.0 * (-1) ** (n + 1) / math.factorial(2 * n)
        if dim == 2:
            c_n = 2 * math.pi * _dfact_ratio(n)
            c_n1 = 2 * math.pi * _dfact_ratio(n + 1)
            ll[i] = pref * (c_n - c_n1)
            nn[i] = pref * c_n1
        else:
            ll[i] = pref * 2 * math.pi * (2 / (2 * n + 1) - 2 / (2 * n + 3))
            nn[i] = pref * 2 * math.pi * (1 / (2 * n + 1) + 1 / (2 * n + 3))
    return ll, nn


def angular_kernels(z, dim):
    """Angular integrals of ``2 [1 - cos(z mu)]`` against the projector.

    Returns ``(LL, NN)``, the components along and across the separation.
    """
    z = np.asarray(z, dtype=float)
    small = z < _SERIES_Z
    ll = np.empty_like(z)
    nn = np.empty_like(z)
    if np.any(small):
        zs = z[small] ** 2
        cl, cn = _series_coefficients(dim)
        pw = np.ones_like(zs)
        sl = np.zeros_like(zs)
        sn = np.zeros_like(zs)
        for i in range(_N_SERIES):
            pw = pw * zs
            sl += cl[i] * pw
            sn += cn[i] * pw
        ll[small] = sl
        nn[small] = sn
    big = ~small
    if np.any(big):
        zb = z[big]
        if dim == 2:
            j1z = 2.0 * special.j1(zb) / zb
            ll[big] = 2 * math.pi * (1.0 - j1z)
            nn[big] = 2 * math.pi * (1.0 - 2.0 * special.j0(zb) + j1z)
        else:
            j0 = np.sin(zb) / zb
            j1z = (np.sin(zb) / zb - np.cos(zb)) / zb**2
            ll[big] = 4 * math.pi * (4.0 / 3.0 - 4.0 * j1z)
            nn[big] = 2 * math.pi * (8.0 / 3.0 - 4.0 * j0 + 4.0 * j1z)
    return ll, nn


def _kernel_scalar(z, dim, which, coef_l, coef_n):
    if z < _SERIES_Z:
        zs = z * z
        coef = coef_l if which == 0 else coef_n
        acc = 0.0
        pw = 1.0
        for c in coef:
            pw *= zs
            acc += c * pw
        return acc
    if dim == 2:
        j1z = 2.0 * _j1(z) / z
        if which == 0:
            return _TWO_PI * (1.0 - j1z)
        return _TWO_PI * (1.0 - 2.0 * _j0(z) + j1z)
    sz = math.sin(z)
    j1z = (sz / z - math.cos(z)) / (z * z)
    if which == 0:
        return 4 * math.pi * (4.0 / 3.0 - 4.0 * j1z)
    return _TWO_PI * (8.0 / 3.0 - 4.0 * sz / z + 4.0 * j1z)


def radial_components(r, exponent, e0, dim, band, tau=0.0, a=1.0, beta=0.0, rtol=1e-6):
    """Longitudinal and transverse components ``(G_LL, G_NN)`` at distance ``r``.

    ``band = (lo, hi)`` may use ``lo = 0`` and/or ``hi = inf``.  Raises
    :class:`QuadratureError` when the estimated relative error exceeds ``rtol``.
    """
    r = float(r)
    if r == 0.0 or e0 == 0.0:
        return 0.0, 0.0
    lo, hi = band
    if not 0 <= lo < hi:
        raise ValueError(f"empty band {band}")
    pw = 2.0 - 2.0 * float(exponent)
    tau = float(tau)

    asym = 2 * math.pi if dim == 2 else 16 * math.pi / 3

    def weight(u):
        w = math.exp(pw * u)
        if tau > 0.0:
            w *= math.exp(-a * math.exp(2 * beta * u) * tau)
        return w

    coef_l, coef_n = (c.tolist() for c in _series_coefficients(dim))

    def integrand(u, which, shift):
        return weight(u) * (_kernel_scalar(math.exp(u) * r, dim, which, coef_l, coef_n) - shift)

    uc = -math.log(r)
    if lo > 0:
        ulo = math.log(lo)
    elif tau > 0.0:
        ulo = uc + math.log(_TAIL_Z_LO) - 12.0
    else:
        ulo = uc + math.log(_TAIL_Z_LO)
    lo_tail = lo == 0
    if math.isinf(hi):
        if tau > 0.0 and beta > 0.0:
            uhi = max(math.log(_EXP_CUT / (a * tau)) / (2 * beta), ulo + 1.0)
        else:
            uhi = math.inf
    else:
        uhi = math.log(hi)
    if ulo >= uhi:
        return 0.0, 0.0
    u_osc = uc + 4.0  # beyond z = e^4 the kernel is asym + O(z^-3/2) oscillation
    cuts = [ulo]
    if ulo < uc - 4.0 < uhi:
        cuts.append(uc - 4.0)
    near_end = min(uhi, u_osc)
    if near_end > cuts[-1]:
        cuts.append(near_end)
    out = []
    cl, cn = _series_coefficients(dim)
    for which in (0, 1):
        total = 0.0
        err = 0.0
        for s0, s1 in zip(cuts[:-1], cuts[1:]):
            v, e = integrate.quad(integrand, s0, s1, args=(which, 0.0), epsabs=0.0,
                                  epsrel=1e-10, limit=400)
            total += v
            err += e
        if uhi > u_osc:
            # oscillating remainder, truncated where it is below 1e-6 relative
            u_stop = min(uhi, uc + math.log(_TAIL_Z_HI))
            if u_stop > u_osc:
                v, e = integrate.quad(integrand, u_osc, u_stop, args=(which, asym),
                                      epsabs=0.0, epsrel=1e-8, limit=1000)
                total += v
                err += e
            if tau == 0.0:
                top = 0.0 if math.isinf(uhi) else math.exp(pw * uhi)
                total += asym * (math.exp(pw * u_osc) - top) / (-pw)
            else:
                v, e = integrate.quad(weight, u_osc, uhi, epsabs=0.0, epsrel=1e-10, limit=400)
                total += asym * v
                err += asym * e
        if lo_tail:
            coef = cl if which == 0 else cn
            for i in range(_N_SERIES):
                rate = pw + 2 * (i + 1)
                total += coef[i] * r ** (2 * (i + 1)) * math.exp(rate * ulo) / rate
        if total != 0.0 and err > rtol * abs(total):
            raise QuadratureError(
                f"quadrature reached relative error {err / abs(total):.3g} > {rtol:g}"
            )
        out.append(total * e0 / (2 * math.pi) ** dim)
    return out[0], out[1]


def assemble_tensor(x, g_ll, g_nn):
    """``G_LL x^ x^ + G_NN (I - x^ x^)`` for a separation vector ``x``."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    n = np.linalg.norm(x)
    if n == 0.0:
        return np.zeros((d, d))
    xh = x / n
    proj = np.outer(xh, xh)
    return g_ll * proj + g_nn * (np.eye(d) - proj)
