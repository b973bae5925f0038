"""Regenerate the frozen oracle constants used by the tests.

Independent of the package: arbitrary-precision Gamma via mpmath and a
brute-force trapezoid over (log k, angle) for the two-dimensional
structure tensor.  Run: python3 tests/oracles/make_oracles.py
"""
import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def c_alpha_mp(alpha, d):
    alpha = mp.mpf(alpha)
    return (4 * mp.pi) ** (mp.mpf(d) / 2) * 2 ** (2 * alpha - 3) * (2 * alpha - 2) * mp.gamma(alpha + mp.mpf(d) / 2) / (
        (d - 1) * mp.gamma(2 - alpha))


def structure_2d(r_vec, alpha, e0, band, n_u=200001, n_t=2049):
    """Dense trapezoid of (2 pi)^-2 int 2(1 - cos k.r) e0 P(k) |k|^(1-2 alpha) |k|^(-1) d^2k."""
    u = np.linspace(math.log(band[0]), math.log(band[1]), n_u)
    th = np.linspace(0.0, 2 * math.pi, n_t)
    out = np.zeros((2, 2))
    k = np.exp(u)
    # d^2k = k dk dth = k^2 du dth ; integrand carries k^(1-2a) k^-1
    radial = e0 * k ** (2 - 2 * alpha)
    for comp in [(0, 0), (0, 1), (1, 1)]:
        acc = np.zeros_like(u)
        for j, t in enumerate(th):
            c, s = math.cos(t), math.sin(t)
            kh = (c, s)
            proj = (1.0 if comp[0] == comp[1] else 0.0) - kh[comp[0]] * kh[comp[1]]
            w = 0.5 if j in (0, n_t - 1) else 1.0
            acc += w * proj * 2 * (1 - np.cos(k * (c * r_vec[0] + s * r_vec[1])))
        acc *= th[1] - th[0]
        f = radial * acc
        val = np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(u)) / (2 * math.pi) ** 2
        out[comp] = out[comp[::-1]] = val
    return out


if __name__ == "__main__":
    print("C(4/3, 3) =", mp.nstr(c_alpha_mp(mp.mpf(4) / 3, 3), 20))
    print("C(4/3, 2) =", mp.nstr(c_alpha_mp(mp.mpf(4) / 3, 2), 20))
    print("C(1.65, 2) =", mp.nstr(c_alpha_mp(mp.mpf("1.65"), 2), 20))
    ca = float(c_alpha_mp(mp.mpf("1.2"), 2))
    S = structure_2d((0.3, 0.4), 1.2, ca, (1.0, 100.0))
    print("S((0.3,0.4)) =", repr(S.tolist()))
