"""Pair-separation ensembles in the synthetic colored-noise field.

Physical variables integrate ``dx = U(t, x) dt + sqrt(kappa) dw``; the
rescaled family integrates ``dx = eps^(2q+alpha-2) V(eps^(2(q-beta)) t, x) dt
+ sqrt(kappa~) dw`` with ``V`` supported on the band ``(1/L, K)``.  Both use
Euler-Maruyama steps with an exact OU advance of the field.

Pairs are processed in fixed-size blocks.  Each block draws from its own
keyed streams, so trajectories do not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .params import SpectrumParams, exponents
from .rng import stream
from .synthfield import advance, build_modes, synthesize

__all__ = [
    "StepSizeError",
    "RescaleSpec",
    "PairEnsemble",
    "MsdSeries",
    "DiffusivityTable",
    "simulate_pairs",
    "simulate_rescaled",
    "msd",
    "relative_diffusivity",
    "default_x0",
    "record_indices",
    "bracketed_times",
]

BLOCK = 64


class StepSizeError(ValueError):
    """Time step too large to resolve the fastest OU mode."""


@dataclass(frozen=True)
class RescaleSpec:
    """Scaling-limit family member: ``x -> eps x``, ``t -> eps^(2q) t``."""

    epsilon: float
    q: float
    kappa_tilde: float
    band: tuple
    alpha: float
    beta: float
    drift_exponent: float
    time_exponent: float

    @classmethod
    def white_noise(cls, params: SpectrumParams, epsilon, kappa_tilde, K, L=None):
        """``q = 2 - alpha - beta``; drift and time-speed exponents coincide."""
        al, be = params.alpha, params.beta
        q = 2 - al - be
        drift = 2 * q + al - 2
        timex = q - be
        lo = 1.0 / L if L is not None else params.band[0]
        return cls(float(epsilon), q, float(kappa_tilde), (lo, float(K)), al, be, drift, timex)

    @classmethod
    def for_regime(cls, params: SpectrumParams, epsilon, kappa_tilde, K, L=None):
        """``q`` from :func:`exponents` (white-noise, boundary or frozen branch)."""
        ex = exponents(params)
        al, be = params.alpha, params.beta
        q = ex.q
        lo = 1.0 / L if L is not None else params.band[0]
        return cls(float(epsilon), q, float(kappa_tilde), (lo, float(K)), al, be,
                   2 * q + al - 2, q - be)

    @property
    def drift_prefactor(self) -> float:
        return float(self.epsilon) ** float(self.drift_exponent)

    @property
    def time_speed(self) -> float:
        return float(self.epsilon) ** (2 * float(self.time_exponent))

    @property
    def kappa(self) -> float:
        """Physical molecular diffusivity ``eps^(2 - 2q) kappa~``."""
        return float(self.epsilon) ** (2 - 2 * float(self.q)) * self.kappa_tilde

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon, "q": float(self.q), "kappa_tilde": self.kappa_tilde,
            "band": list(self.band), "drift_prefactor": self.drift_prefactor,
            "time_speed": self.time_speed,
        }


@dataclass
class PairEnsemble:
    """Separation trajectories ``traj[pair, time, component]``."""

    times: np.ndarray
    traj: np.ndarray
    x0: np.ndarray
    seed: int
    model: str = "colored"
    params: Optional[SpectrumParams] = None
    rescale: Optional[RescaleSpec] = None
    kappa: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def n_pairs(self) -> int:
        return self.traj.shape[0]

    @property
    def dim(self) -> int:
        return self.traj.shape[2]


@dataclass
class MsdSeries:
    t: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray


@dataclass
class DiffusivityTable:
    r_lo: np.ndarray
    r_hi: np.ndarray
    r_mid: np.ndarray  # geometric bin centre
    value: np.ndarray  # nan where missing
    stderr: np.ndarray
    count: np.ndarray
    missing: np.ndarray  # bool


def default_x0(band, dim, rng=None):
    """Geometric mean of the band scales, along e1 or in a random direction."""
    r = 1.0 / math.sqrt(band[0] * band[1])
    if rng is None:
        v = np.zeros(dim)
        v[0] = 1.0
    else:
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
    return r * v


def record_indices(times, dt):
    """Step indices for requested output times; they must lie on the dt grid."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("output times must be strictly increasing")
    idx = np.rint(times / dt).astype(np.int64)
    if np.any(np.abs(idx * dt - times) > 1e-9 * np.maximum(1.0, np.abs(times))):
        raise ValueError("output times must be multiples of dt")
    return idx


def bracketed_times(base, rel_lags=(0.002, 0.004)):
    """Each base time followed by ``t (1 + r)`` for every relative lag ``r``.

    Short lags next to every base time are what :func:`relative_diffusivity`
    regresses on; the base times serve the MSD fit.
    """
    base = np.asarray(base, dtype=float)
    cols = [base] + [base * (1.0 + r) for r in rel_lags]
    out = np.unique(np.concatenate(cols))
    return out


def _check_step(params, band, dt, time_speed, c_dt):
    if params.e0 == 0:
        return
    fastest = params.a * band[1] ** (2 * float(params.beta)) * time_speed
    bound = c_dt / fastest
    if dt > bound * (1 + 1e-12):
        raise StepSizeError(
            f"dt={dt:g} exceeds the stability bound {bound:.6g} "
            f"(c_dt={c_dt} / fastest OU rate {fastest:.6g})"
        )


def _run_block(b, n_in_block, *, params, band, drift_scale, time_speed, kappa, x0,
               dt, rec, n_steps, seed, n_modes, n_dir, quenched, random_direction):
    d = params.dim
    if quenched:
        fld = synthesize(params, n_modes, band, rng=stream(seed, "field", 0),
                         n_real=1, n_dir=n_dir)
        fidx = np.zeros(n_in_block, dtype=np.int64)
    else:
        fld = synthesize(params, n_modes, band, rng=stream(seed, "field", b),
                         n_real=n_in_block, n_dir=n_dir)
        fidx = np.arange(n_in_block, dtype=np.int64)
    bm = stream(seed, "brownian", b)
    if random_direction:
        r0 = float(np.linalg.norm(x0))
        g = stream(seed, "x0", b).standard_normal((n_in_block, d))
        x = r0 * g / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        x = np.repeat(np.asarray(x0, dtype=float)[None, :], n_in_block, axis=0)
    x = np.ascontiguousarray(x)
    out = np.empty((n_in_block, len(rec), d))
    ri = 0
    if rec[0] == 0:
        out[:, 0] = x
        ri = 1
    sq = math.sqrt(kappa * dt)
    ddt = drift_scale * dt if params.e0 != 0 else 0.0
    k = fld.modes.wavevectors
    for step in range(1, n_steps + 1):
        noise = bm.standard_normal((n_in_block, d))
        kernels.euler_step(x, fidx, k, fld.amp.real, fld.amp.imag, ddt, noise, sq)
        if ddt != 0.0:
            advance(fld, dt * time_speed)
        if ri < len(rec) and rec[ri] == step:
            out[:, ri] = x
            ri += 1
    return out


def _integrate(params, band, drift_scale, time_speed, kappa, x0, t_end, dt, n_pairs,
               seed, *, n_modes, n_dir, times, threads, c_dt, quenched):
    if dt <= 0 or t_end < dt:
        raise ValueError("need dt > 0 and t_end >= dt")
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    _check_step(params, band, dt, time_speed, c_dt)
    n_steps = int(round(t_end / dt))
    if times is None:
        n_rec = min(n_steps, 200)
        rec = np.unique(np.rint(np.linspace(0, n_steps, n_rec + 1)).astype(np.int64))
    else:
        rec = record_indices(times, dt)
        if rec[-1] > n_steps:
            raise ValueError("output time beyond t_end")
    random_direction = x0 is None
    if x0 is None:
        x0 = default_x0(band, params.dim)
    x0 = np.asarray(x0, dtype=float)
    blocks = [(b, min(BLOCK, n_pairs - b * BLOCK)) for b in range((n_pairs + BLOCK - 1) // BLOCK)]
    kw = dict(params=params, band=band, drift_scale=drift_scale, time_speed=time_speed,
              kappa=kappa, x0=x0, dt=dt, rec=rec, n_steps=n_steps, seed=seed,
              n_modes=n_modes, n_dir=n_dir, quenched=quenched,
              random_direction=random_direction)
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda bn: _run_block(*bn, **kw), blocks))
    else:
        parts = [_run_block(b, n, **kw) for b, n in blocks]
    traj = np.concatenate(parts, axis=0)
    return rec * dt, traj, x0


def simulate_pairs(
    params: SpectrumParams,
    x0,
    kappa: float,
    t_end: float,
    dt: float,
    n_pairs: int,
    seed: int,
    *,
    n_modes: int = 256,
    n_dir: Optional[int] = None,
    times: Optional[Sequence[float]] = None,
    threads: int = 1,
    c_dt: float = 0.1,
    quenched: bool = False,
) -> PairEnsemble:
    """Pair separations in physical variables on the band ``params.band``.

    ``x0=None`` starts every pair at the geometric-mean band scale in a random
    direction.  Annealed by default (one field per pair); ``quenched`` shares a
    single field realization.
    """
    t, traj, x0v = _integrate(
        params, params.band, 1.0, 1.0, kappa, x0, t_end, dt, n_pairs, seed,
        n_modes=n_modes, n_dir=n_dir, times=times, threads=threads, c_dt=c_dt,
        quenched=quenched,
    )
    return PairEnsemble(times=t, traj=traj, x0=x0v, seed=seed, model="colored",
                        params=params, kappa=kappa,
                        meta={"dt": dt, "n_modes": n_modes, "quenched": quenched,
                              "band": list(params.band)})


def simulate_rescaled(
    params: SpectrumParams,
    rescale: RescaleSpec,
    x0,
    t_end: float,
    dt: float,
    n_pairs: int,
    seed: int,
    *,
    n_modes: int = 256,
    n_dir: Optional[int] = None,
    times: Optional[Sequence[float]] = None,
    threads: int = 1,
    c_dt: float = 0.1,
    quenched: bool = False,
) -> PairEnsemble:
    """Pair separations under the rescaled dynamics of one family member."""
    t, traj, x0v = _integrate(
        params, tuple(rescale.band), rescale.drift_prefactor, rescale.time_speed,
        rescale.kappa_tilde, x0, t_end, dt, n_pairs, seed,
        n_modes=n_modes, n_dir=n_dir, times=times, threads=threads, c_dt=c_dt,
        quenched=quenched,
    )
    return PairEnsemble(times=t, traj=traj, x0=x0v, seed=seed, model="colored-rescaled",
                        params=params, rescale=rescale, kappa=rescale.kappa_tilde,
                        meta={"dt": dt, "n_modes": n_modes, "quenched": quenched,
                              "band": list(rescale.band)})


def msd(ensemble: PairEnsemble) -> MsdSeries:
    """Mean square separation with jackknife standard errors."""
    r2 = np.sum(ensemble.traj**2, axis=2)  # (P, T)
    n = r2.shape[0]
    if n == 0:
        raise ValueError("empty ensemble")
    mean = r2.mean(axis=0)
    if n < 2:
        return MsdSeries(ensemble.times.copy(), mean, np.zeros_like(mean))
    loo = (r2.sum(axis=0)[None, :] - r2) / (n - 1)
    se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    return MsdSeries(ensemble.times.copy(), mean, se)


def relative_diffusivity(
    ensemble: PairEnsemble,
    separation_bins,
    *,
    lags: Sequence[int] = (1, 2, 3),
    max_rel_lag: float = 0.05,
    min_count: int = 200,
    n_groups: int = 20,
) -> DiffusivityTable:
    """Longitudinal relative diffusivity conditioned on separation.

    For every recorded time and lag the squared longitudinal displacement
    ``(x^ . dx)^2`` is regressed on ``h`` and ``h^2`` within each ``|x|`` bin;
    half the linear coefficient is the diffusivity.  Increments whose lag
    exceeds ``max_rel_lag`` times their start time are skipped (lags from
    ``t = 0`` always count).  Standard errors come
    from a grouped jackknife over pairs.  Bins with fewer than ``min_count``
    samples are reported as missing.
    """
    edges = np.asarray(separation_bins, dtype=float)
    nb = len(edges) - 1
    traj, t = ensemble.traj, ensemble.times
    P, T, d = traj.shape
    grp = np.arange(P) * n_groups // max(P, 1)
    # sufficient statistics per (group, bin): S_h2, S_h3, S_h4, S_hy, S_h2y, count
    stats = np.zeros((n_groups, nb, 6))
    for lag in lags:
        if lag >= T:
            continue
        x = traj[:, :-lag]
        dx = traj[:, lag:] - x
        h = (t[lag:] - t[:-lag])[None, :]
        r = np.linalg.norm(x, axis=2)
        with np.errstate(invalid="ignore", divide="ignore"):
            y = (np.einsum("ptd,ptd->pt", x, dx) / r) ** 2
        b = np.searchsorted(edges, r, side="right") - 1
        ok = (b >= 0) & (b < nb) & (r > 0)
        short = h <= max_rel_lag * np.where(t[:-lag] > 0, t[:-lag], np.inf)[None, :]
        ok &= np.broadcast_to(short, r.shape)
        hh = np.broadcast_to(h, r.shape)
        g = np.broadcast_to(grp[:, None], r.shape)
        flat = (g[ok] * nb + b[ok])
        hv, yv = hh[ok], y[ok]
        for j, vals in enumerate((hv**2, hv**3, hv**4, hv * yv, hv**2 * yv, np.ones_like(hv))):
            stats[:, :, j] += np.bincount(flat, weights=vals, minlength=n_groups * nb).reshape(n_groups, nb)

    def solve(s):
        a11, a12, a22, b1, b2 = s[..., 0], s[..., 1], s[..., 2], s[..., 3], s[..., 4]
        det = a11 * a22 - a12 * a12
        with np.errstate(invalid="ignore", divide="ignore"):
            return (a22 * b1 - a12 * b2) / det

    total = stats.sum(axis=0)
    count = total[:, 5].astype(np.int64)
    value = 0.5 * solve(total)
    loo = 0.5 * solve(total[None] - stats)
    se = np.sqrt((n_groups - 1) / n_groups * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    missing = count < min_count
    value = np.where(missing, np.nan, value)
    se = np.where(missing, np.nan, se)
    return DiffusivityTable(
        r_lo=edges[:-1], r_hi=edges[1:], r_mid=np.sqrt(edges[:-1] * edges[1:]),
        value=value, stderr=se, count=count, missing=missing,
    )
