"""White-noise (Kraichnan) limit: covariance kernels and limit diffusions.

The limiting Brownian field has spectral exponent ``alpha + beta`` and the
relative-velocity covariance

    Gamma(x, y) = int [e^{ik.x} - 1][e^{-ik.y} - 1] E(alpha+beta, k) |k|^{1-d} dk

so that a pair separation diffuses with ``D(x) = kappa0 I + (2/a) Gamma(x, x)``.
This is the Ito generator ``kappa0/2 Laplacian + (1/a) Gamma(x, x) : grad grad``;
no Stratonovich correction is added on top of it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .pairdisp import PairEnsemble
from .params import ParameterError, SpectrumParams, c_alpha
from .rng import stream
from .spectral import assemble_tensor, radial_components

__all__ = [
    "KraichnanOracle",
    "gamma1",
    "gamma1_closed",
    "longitudinal_diffusivity",
    "b_bar",
    "diffusion_matrix",
    "two_point_diffusion",
    "simulate_limit_pairs",
    "two_point_moment",
    "FactorizationError",
]


# pairs per keyed stream block; fixed so results do not depend on threads
LIMIT_BLOCK = 1024


class FactorizationError(RuntimeError):
    pass


@dataclass
class KraichnanOracle:
    """Limit model built from ``params``.

    ``L=None`` selects the infinite-band closed form (needs alpha + beta < 2);
    a finite ``L`` uses the band ``(1/L, K)`` through a tabulated quadrature.
    ``K`` defaults to infinity; a finite value mirrors the cutoff of a
    colored field and is mainly useful for validation.
    """

    params: SpectrumParams
    kappa0: float = 0.0
    L: Optional[float] = None
    K: Optional[float] = None
    n_table: int = 321
    _table: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if self.L is None and not self.exponent < 2:
            raise ParameterError(
                f"alpha + beta = {self.exponent} >= 2: the L = infinity covariance diverges"
            )
        if self.kappa0 < 0:
            raise ParameterError("kappa0 must be >= 0")
        if self.K is not None and self.L is None:
            raise ParameterError("an upper cutoff K needs a finite L")
        if self.K is not None and not self.K * self.L > 1:
            raise ParameterError("empty band: need K > 1/L")

    @property
    def exponent(self) -> float:
        return float(self.params.alpha) + float(self.params.beta)

    @property
    def eta(self) -> float:
        return self.exponent - 1.0

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def band(self):
        return (0.0 if self.L is None else 1.0 / self.L,
                math.inf if self.K is None else float(self.K))

    @property
    def c_sum(self) -> float:
        return c_alpha(self.exponent, self.dim)

    @property
    def transverse_ratio(self) -> float:
        return 1.0 + 2.0 * self.eta / (self.dim - 1)

    def radial(self, r):
        """``(Gamma_LL, Gamma_NN)`` of ``Gamma(x, x)`` at ``|x| = r``."""
        r = float(r)
        if self.L is None:
            ll = self.params.e0 * r ** (2 * self.eta) / self.c_sum
            return ll, self.transverse_ratio * ll
        return radial_components(r, self.exponent, self.params.e0, self.dim, self.band)

    def table(self):
        """Log-spaced radial table ``(r, LL, NN)`` of the finite-L kernel."""
        if self._table is None:
            if self.L is None:
                r = np.logspace(-8, 8, 17)
            else:
                r = self.L * np.logspace(-6, 4, self.n_table)
                if self.K is not None:
                    # below 1/K the kernel is quadratic; cover the walk anyway
                    r = np.unique(np.concatenate([r, np.logspace(-8, 0, 33) / self.K]))
            vals = np.array([self.radial(x) for x in r])
            self._table = (r, vals[:, 0].copy(), vals[:, 1].copy())
        return self._table


def _g(oracle, v):
    v = np.asarray(v, dtype=float)
    ll, nn = oracle.radial(np.linalg.norm(v))
    return assemble_tensor(v, ll, nn)


def gamma1(oracle: KraichnanOracle, x, y) -> np.ndarray:
    """``Gamma(x, y)`` by quadrature (``L = inf`` also integrates numerically).

    Uses ``Gamma(x, y) = [G(x) + G(y) - G(x - y)] / 2`` with ``G(v) = Gamma(v, v)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if oracle.L is None and not oracle.exponent < 2:
        raise ParameterError("divergent covariance for alpha + beta >= 2")

    def g(v):
        n = float(np.linalg.norm(v))
        ll, nn = radial_components(n, oracle.exponent, oracle.params.e0, oracle.dim, oracle.band)
        return assemble_tensor(v, ll, nn)

    if not np.any(x) or not np.any(y):
        return np.zeros((x.shape[0], x.shape[0]))
    if np.array_equal(x, y):
        return g(x)
    return 0.5 * (g(x) + g(y) - g(x - y))


def gamma1_closed(params: SpectrumParams, x) -> np.ndarray:
    """Infinite-band ``Gamma(x, x)``: ``E0 |x|^(2 eta) / C_{alpha+beta}`` times
    ``(1 + 2 eta/(d-1)) I - (2 eta/(d-1)) x^ x^``."""
    s = float(params.alpha) + float(params.beta)
    if not 1 < s < 2:
        raise ParameterError(f"alpha + beta = {s} outside (1, 2)")
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    n = float(np.linalg.norm(x))
    if n == 0.0:
        return np.zeros((d, d))
    eta = s - 1.0
    c = 2.0 * eta / (d - 1)
    xh = x / n
    amp = params.e0 * n ** (2 * eta) / c_alpha(s, d)
    return amp * ((1 + c) * np.eye(d) - c * np.outer(xh, xh))


def b_bar(oracle: KraichnanOracle, x) -> np.ndarray:
    """Second-derivative coefficients of the limit generator, ``Gamma(x, x)``."""
    return gamma1(oracle, x, x)


def longitudinal_diffusivity(oracle: KraichnanOracle, x) -> float:
    """``kappa0/2 + x^ . Gamma(x, x) . x^ / a``."""
    x = np.asarray(x, dtype=float)
    n = float(np.linalg.norm(x))
    if n == 0.0:
        return 0.5 * oracle.kappa0
    ll, _ = oracle.radial(n)
    return 0.5 * oracle.kappa0 + ll / oracle.params.a


def diffusion_matrix(oracle: KraichnanOracle, x) -> np.ndarray:
    """``D(x) = kappa0 I + (2/a) Gamma(x, x)`` for the pair separation."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    return oracle.kappa0 * np.eye(d) + (2.0 / oracle.params.a) * _g(oracle, x)


def _molecular(d):
    # both coordinates are separations from one reference particle
    return np.kron(np.array([[1.0, 0.5], [0.5, 1.0]]), np.eye(d))


def two_point_diffusion(oracle: KraichnanOracle, x1, x2) -> np.ndarray:
    """``2d x 2d`` diffusion matrix of the two-point motion."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    d = x1.shape[0]
    g11 = _g(oracle, x1)
    g22 = _g(oracle, x2)
    g12 = 0.5 * (g11 + g22 - _g(oracle, x1 - x2))
    blk = np.block([[g11, g12], [g12.T, g22]])
    return oracle.kappa0 * _molecular(d) + (2.0 / oracle.params.a) * blk


def _adaptive_dt(oracle, r, c, cap):
    coef = (2.0 / oracle.params.a) * oracle.radial(1.0)[0] if oracle.L is None else None
    if oracle.L is None:
        rate = oracle.kappa0 + coef * r ** (2 * oracle.eta)
    else:
        rt, ll, _ = oracle.table()
        lli = np.exp(np.interp(np.log(np.maximum(r, rt[0])), np.log(rt), np.log(ll)))
        rate = oracle.kappa0 + (2.0 / oracle.params.a) * lli
    with np.errstate(divide="ignore"):
        dt = np.where(rate > 0, c * r**2 / rate, cap)
    return np.minimum(dt, cap)


def _limit_block(b, n_in, *, oracle, x0, rec_t, t_end, c, cap, seed, r_absorb, random_direction):
    d = oracle.dim
    rng = stream(seed, "limit", b)
    if random_direction:
        r0 = float(np.linalg.norm(x0))
        g = stream(seed, "x0", b).standard_normal((n_in, d))
        x = r0 * g / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        x = np.repeat(np.asarray(x0, dtype=float)[None, :], n_in, axis=0)
    x = np.ascontiguousarray(x)
    out = np.empty((n_in, len(rec_t), d))
    t = np.zeros(n_in)
    nxt = np.zeros(n_in, dtype=np.int64)
    absorbed = np.zeros(n_in, dtype=bool)
    a = oracle.params.a
    if oracle.L is None:
        r_tab = ll_tab = nn_tab = np.ones(2)
        coef = (2.0 / a) * oracle.params.e0 / oracle.c_sum
        closed = 1
    else:
        r_tab, ll, nn = oracle.table()
        ll_tab = np.ascontiguousarray((2.0 / a) * ll)
        nn_tab = np.ascontiguousarray((2.0 / a) * nn)
        coef = 0.0
        closed = 0
    # record t = 0 entries
    hit = rec_t[nxt] <= 0.0
    while np.any(hit):
        out[hit, nxt[hit]] = x[hit]
        nxt[hit] += 1
        hit = (nxt < len(rec_t)) & (rec_t[np.minimum(nxt, len(rec_t) - 1)] <= t)
    n_rec = len(rec_t)
    while True:
        active = nxt < n_rec
        if not np.any(active):
            break
        r = np.linalg.norm(x, axis=1)
        target = rec_t[np.minimum(nxt, n_rec - 1)]
        dt = _adaptive_dt(oracle, r, c, cap)
        dt = np.minimum(dt, target - t)
        dt = np.where(active & ~absorbed, dt, 0.0)
        noise = rng.standard_normal((n_in, d))
        kernels.limit_step(x, np.ascontiguousarray(dt), noise, r_tab, ll_tab, nn_tab, coef,
                           2 * oracle.eta, oracle.kappa0, oracle.transverse_ratio, closed, 1e-14)
        # absorbed trajectories jump straight to their next record time
        t = np.where(absorbed & active, target, t + dt)
        if r_absorb > 0:
            absorbed |= np.linalg.norm(x, axis=1) < r_absorb
        hit = active & (t >= target * (1 - 1e-13))
        while np.any(hit):
            t = np.where(hit, np.maximum(t, target), t)
            out[hit, nxt[hit]] = x[hit]
            nxt[hit] += 1
            target = rec_t[np.minimum(nxt, n_rec - 1)]
            hit = (nxt < n_rec) & (t >= target * (1 - 1e-13))
    return out, absorbed


def simulate_limit_pairs(
    oracle: KraichnanOracle,
    x0,
    t_end: float,
    dt: Optional[float] = None,
    n_pairs: int = 1000,
    seed: int = 0,
    *,
    times: Optional[Sequence[float]] = None,
    c: float = 0.01,
    absorb: float = 1e-6,
    threads: int = 1,
) -> PairEnsemble:
    """Ito limit diffusion ``dx = sqrt(D(x)) dW`` with scale-free adaptive steps.

    The step is ``c |x|^2 / D_LL(|x|)`` (``c |x|^(2-2 eta)`` up to constants
    when ``kappa0 = 0``), capped by ``t_end/1000`` and by ``dt`` when given.
    ``D`` has ``x^`` as an eigenvector, so its square root is taken in that
    eigenbasis with a ``1e-14 tr D`` jitter floor.  Trajectories closer than
    ``absorb |x0|`` to the origin are frozen.
    """
    if x0 is None:
        raise ValueError("x0 is required")
    x0 = np.asarray(x0, dtype=float)
    if not np.any(x0):
        raise ValueError("x0 must be non-zero")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    cap = t_end / 1000.0
    if dt is not None:
        if dt <= 0:
            raise ValueError("dt must be positive")
        cap = min(cap, dt)
    if times is None:
        rec_t = np.linspace(0.0, t_end, 201)
    else:
        rec_t = np.asarray(times, dtype=float)
        if np.any(np.diff(rec_t) <= 0) or rec_t[0] < 0 or rec_t[-1] > t_end * (1 + 1e-12):
            raise ValueError("times must be increasing within [0, t_end]")
    blocks = [(b, min(LIMIT_BLOCK, n_pairs - b * LIMIT_BLOCK))
              for b in range((n_pairs + LIMIT_BLOCK - 1) // LIMIT_BLOCK)]
    kw = dict(oracle=oracle, x0=x0, rec_t=rec_t, t_end=t_end, c=c, cap=cap, seed=seed,
              r_absorb=absorb * float(np.linalg.norm(x0)), random_direction=False)
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda bn: _limit_block(*bn, **kw), blocks))
    else:
        parts = [_limit_block(b, n, **kw) for b, n in blocks]
    traj = np.concatenate([p[0] for p in parts], axis=0)
    n_abs = int(sum(p[1].sum() for p in parts))
    return PairEnsemble(times=rec_t.copy(), traj=traj, x0=x0, seed=seed, model="kraichnan",
                        params=oracle.params, kappa=oracle.kappa0,
                        meta={"c": c, "cap": cap, "absorbed": n_abs,
                              "L": oracle.L, "kappa0": oracle.kappa0})


def _sqrt_psd(m, jitter=1e-14):
    w, v = np.linalg.eigh(m)
    tr = np.trace(m, axis1=-2, axis2=-1)
    if np.any(w < -1e-10 * np.maximum(tr, 1e-300)[..., None]):
        bad = np.argwhere(w < -1e-10 * np.maximum(tr, 1e-300)[..., None])
        raise FactorizationError(f"diffusion matrix not PSD at sample {bad[0][0]}")
    w = np.maximum(w, jitter * tr[..., None])
    return np.einsum("...ij,...j,...kj->...ik", v, np.sqrt(w), v)


def _batch_two_point(oracle, x1, x2):
    """Vectorized ``two_point_diffusion`` for arrays of shape (N, d)."""
    d = x1.shape[1]

    def gt(v):
        r = np.linalg.norm(v, axis=1)
        out = np.zeros((len(v), d, d))
        if oracle.L is None:
            ll = oracle.params.e0 * r ** (2 * oracle.eta) / oracle.c_sum
            nn = oracle.transverse_ratio * ll
        else:
            rt, llt, nnt = oracle.table()
            lr = np.log(np.maximum(r, rt[0]))
            ll = np.exp(np.interp(lr, np.log(rt), np.log(llt)))
            nn = np.exp(np.interp(lr, np.log(rt), np.log(nnt)))
            ll = np.where(r > 0, ll, 0.0)
            nn = np.where(r > 0, nn, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            vh = np.where(r[:, None] > 0, v / r[:, None], 0.0)
        proj = vh[:, :, None] * vh[:, None, :]
        out = ll[:, None, None] * proj + nn[:, None, None] * (np.eye(d) - proj)
        return out

    g11, g22, gd = gt(x1), gt(x2), gt(x1 - x2)
    g12 = 0.5 * (g11 + g22 - gd)
    top = np.concatenate([g11, g12], axis=2)
    bot = np.concatenate([np.swapaxes(g12, 1, 2), g22], axis=2)
    blk = np.concatenate([top, bot], axis=1)
    return oracle.kappa0 * _molecular(d) + (2.0 / oracle.params.a) * blk


def two_point_moment(
    oracle: KraichnanOracle,
    phi: Callable,
    points,
    t: float,
    *,
    n_paths: int = 1000,
    dt: Optional[float] = None,
    seed: int = 0,
):
    """Feynman-Kac estimate of ``E[phi(X1(t), X2(t))]`` for the two-point motion.

    ``points`` has shape ``(N, 2, d)``; returns ``(estimate, stderr)`` of
    shape ``(N,)``.  With ``kappa0 = 0`` coincident points stay merged.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 2:
        pts = pts[None]
    N, two, d = pts.shape
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        v = np.asarray(phi(pts[:, 0], pts[:, 1]), dtype=float)
        return v, np.zeros_like(v)
    if dt is None:
        dt = t / 200.0
    n_steps = max(1, int(math.ceil(t / dt - 1e-9)))
    h = t / n_steps
    rng = stream(seed, "two-point")
    x = np.repeat(pts.reshape(N, 2 * d), n_paths, axis=0)
    for _ in range(n_steps):
        # with kappa0 = 0 coincident points share one path; the jitter floor
        # would otherwise seed a spurious separation
        merged = (oracle.kappa0 == 0) & np.all(x[:, :d] == x[:, d:], axis=1)
        dmat = _batch_two_point(oracle, x[:, :d], x[:, d:])
        s = _sqrt_psd(dmat * h)
        x = x + np.einsum("nij,nj->ni", s, rng.standard_normal((len(x), 2 * d)))
        x[merged, d:] = x[merged, :d]
    vals = np.asarray(phi(x[:, :d], x[:, d:]), dtype=float).reshape(N, n_paths)
    est = vals.mean(axis=1)
    se = vals.std(axis=1, ddof=1) / math.sqrt(n_paths) if n_paths > 1 else np.zeros(N)
    return est, se
