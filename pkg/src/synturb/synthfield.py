"""Finite-mode Gaussian velocity fields with per-mode OU time correlation.

A field is a batch of ``R`` independent realizations, each a sum over ``M``
Fourier modes::

    U(t, x) - U(t, 0) = sum_m Re[(exp(i k_m . x) - 1) A_m(t)]

with complex amplitudes ``A_m`` transverse to ``k_m``.  Mode placement is
stratified: ``n_shell`` log-spaced magnitude shells times ``n_dir``
directions.  With ``jitter=True`` (default) every realization draws its own
point inside each cell and a random rotation of the direction set, so the
ensemble second moments equal the continuum spectral integral exactly rather
than a fixed quadrature of it.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .params import SpectrumParams
from .rng import stream
from .spectral import assemble_tensor, radial_components

__all__ = [
    "ModeSet",
    "SpectralField",
    "build_modes",
    "synthesize",
    "advance",
    "ou_coefficients",
    "eval_increment",
    "structure_function_exact",
    "structure_function_estimate",
    "default_n_dir",
]


def default_n_dir(dim: int) -> int:
    return 16 if dim == 2 else 32


@dataclass
class ModeSet:
    """Wavevectors and per-mode constants for ``R`` realizations.

    ``weights`` are defined so that the stationary covariance of mode m is
    ``weights * E0 * |k|^(1 - 2 s) * (I - k^ k^)``; ``std`` is its square root
    per transverse direction and ``basis`` spans the transverse plane.
    """

    wavevectors: np.ndarray  # (R, M, d)
    weights: np.ndarray  # (R, M)
    ou_rates: np.ndarray  # (R, M)
    std: np.ndarray  # (R, M)
    basis: np.ndarray  # (R, M, d-1, d)
    band: tuple

    @property
    def n_real(self) -> int:
        return self.wavevectors.shape[0]

    @property
    def n_modes(self) -> int:
        return self.wavevectors.shape[1]

    @property
    def dim(self) -> int:
        return self.wavevectors.shape[2]


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z * z)
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def _random_rotations(rng, n):
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
        np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
        np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
    ], axis=1)


def _transverse_basis(khat):
    d = khat.shape[-1]
    if d == 2:
        e = np.stack([-khat[..., 1], khat[..., 0]], axis=-1)
        return e[..., None, :]
    # pick the axis least aligned with k, Gram-Schmidt, then cross product
    ref = np.zeros_like(khat)
    idx = np.argmin(np.abs(khat), axis=-1)
    np.put_along_axis(ref, idx[..., None], 1.0, axis=-1)
    e1 = ref - np.sum(ref * khat, axis=-1, keepdims=True) * khat
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(khat, e1)
    return np.stack([e1, e2], axis=-2)


def build_modes(
    params: SpectrumParams,
    n_modes: int,
    band: Optional[Sequence[float]] = None,
    rng: Optional[np.random.Generator] = None,
    *,
    n_real: int = 1,
    jitter: bool = True,
    n_dir: Optional[int] = None,
    exponent: Optional[float] = None,
) -> ModeSet:
    """Stratified mode placement over ``band`` (default ``params.band``).

    ``exponent`` overrides the spectral exponent (the limit model uses
    ``alpha + beta``).  ``n_modes`` must be a multiple of ``n_dir``.
    """
    d = params.dim
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    lo, hi = band if band is not None else params.band
    if not (0 < lo < hi < math.inf):
        raise ValueError(f"empty or unbounded band ({lo}, {hi})")
    if n_dir is None:
        n_dir = min(default_n_dir(d), n_modes)
    if n_modes % n_dir:
        raise ValueError(f"n_modes={n_modes} is not a multiple of n_dir={n_dir}")
    n_shell = n_modes // n_dir
    s = float(params.alpha if exponent is None else exponent)
    if jitter and rng is None:
        raise ValueError("jittered placement needs an rng")

    edges = np.linspace(math.log(lo), math.log(hi), n_shell + 1)
    dlog = edges[1] - edges[0]
    if jitter:
        u = edges[:-1][None, :] + dlog * rng.random((n_real, n_shell))
    else:
        u = np.broadcast_to(0.5 * (edges[:-1] + edges[1:]), (n_real, n_shell))
    kmag = np.exp(u)  # (R, n_shell)

    if d == 2:
        # antipodal directions give identical cosines; cover half the circle
        if jitter:
            th0 = rng.random((n_real, 1)) * (math.pi / n_dir)
        else:
            th0 = np.zeros((n_real, 1))
        th = th0 + np.arange(n_dir)[None, :] * (math.pi / n_dir)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)  # (R, n_dir, 2)
        d_omega = 2 * math.pi / n_dir
    else:
        base = _fibonacci_sphere(n_dir)
        if jitter:
            rot = _random_rotations(rng, n_real)
            dirs = np.einsum("rij,nj->rni", rot, base)
        else:
            dirs = np.broadcast_to(base, (n_real, n_dir, 3))
        d_omega = 4 * math.pi / n_dir

    k = kmag[:, :, None, None] * dirs[:, None, :, :]  # (R, n_shell, n_dir, d)
    k = k.reshape(n_real, n_modes, d)
    kn = np.repeat(kmag, n_dir, axis=1)
    weights = 2.0 * (2 * math.pi) ** (-d) * kn * dlog * d_omega
    var = weights * params.e0 * kn ** (1 - 2 * s)
    rates = params.a * kn ** (2 * float(params.beta))
    basis = _transverse_basis(k / kn[..., None])
    return ModeSet(
        wavevectors=np.ascontiguousarray(k),
        weights=weights,
        ou_rates=rates,
        std=np.sqrt(var),
        basis=basis,
        band=(lo, hi),
    )


@dataclass
class SpectralField:
    """Batch of field realizations with OU-evolving amplitudes."""

    params: SpectrumParams
    modes: ModeSet
    amp: np.ndarray  # complex (R, M, d)
    time: float
    rng: np.random.Generator
    seed: Optional[int] = None

    @property
    def n_real(self) -> int:
        return self.modes.n_real

    def copy(self) -> "SpectralField":
        return copy.deepcopy(self)


def _transverse_noise(modes: ModeSet, rng) -> np.ndarray:
    """Stationary-law complex Gaussian amplitudes, one per mode."""
    R, M, d = modes.wavevectors.shape
    nb = d - 1
    xi = rng.standard_normal((R, M, nb, 2))
    c = (xi[..., 0] + 1j * xi[..., 1]) * (modes.std[..., None] / math.sqrt(2.0))
    return np.einsum("rmb,rmbd->rmd", c, modes.basis)


def synthesize(
    params: SpectrumParams,
    n_modes: Optional[int] = None,
    band_override: Optional[Sequence[float]] = None,
    seed: int = 0,
    *,
    n_real: int = 1,
    jitter: bool = True,
    n_dir: Optional[int] = None,
    exponent: Optional[float] = None,
    modes: Optional[ModeSet] = None,
    rng: Optional[np.random.Generator] = None,
) -> SpectralField:
    """Draw ``n_real`` stationary field realizations.

    Deterministic given ``seed`` (or the supplied generator).  Defaults to
    64 shells times :func:`default_n_dir` directions.
    """
    if rng is None:
        rng = stream(seed, "field")
    if modes is None:
        if n_modes is None:
            n_modes = 64 * default_n_dir(params.dim)
        modes = build_modes(
            params, n_modes, band_override, rng, n_real=n_real, jitter=jitter,
            n_dir=n_dir, exponent=exponent,
        )
    amp = _transverse_noise(modes, rng)
    return SpectralField(params=params, modes=modes, amp=amp, time=0.0, rng=rng, seed=seed)


def ou_coefficients(rates, dt):
    """Decay factor and injected-variance fraction of the exact OU update."""
    rates = np.asarray(rates, dtype=float)
    if np.isinf(dt):
        return np.zeros_like(rates), np.ones_like(rates)
    decay = np.exp(-rates * dt)
    inject = -np.expm1(-2.0 * rates * dt)
    return decay, inject


def advance(field: SpectralField, dt: float) -> SpectralField:
    """Exact OU update of every mode over ``dt`` (in place; returns ``field``)."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return field
    decay, inject = ou_coefficients(field.modes.ou_rates, dt)
    fresh = _transverse_noise(field.modes, field.rng)
    field.amp = decay[..., None] * field.amp + np.sqrt(inject)[..., None] * fresh
    field.time += dt
    return field


def eval_increment(field: SpectralField, x, realization=None) -> np.ndarray:
    """Velocity increment ``U(t, x) - U(t, 0)``.

    ``x`` of shape ``(d,)`` or ``(N, d)``.  For a single-realization field all
    points share it; otherwise ``N`` must equal ``n_real`` (one point per
    realization) unless an explicit ``realization`` index array is given.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.ascontiguousarray(np.atleast_2d(x))
    n = pts.shape[0]
    if realization is not None:
        fidx = np.ascontiguousarray(np.broadcast_to(np.asarray(realization, dtype=np.int64), (n,)))
    elif field.n_real == 1:
        fidx = np.zeros(n, dtype=np.int64)
    elif n == field.n_real:
        fidx = np.arange(n, dtype=np.int64)
    else:
        raise ValueError("point count does not match realization count")
    out = np.empty_like(pts)
    kernels.increment_sum(pts, fidx, field.modes.wavevectors, field.amp.real, field.amp.imag, 1.0, out)
    return out[0] if single else out


def structure_function_exact(
    params: SpectrumParams,
    r,
    tau: float = 0.0,
    band: Optional[Sequence[float]] = None,
    *,
    exponent: Optional[float] = None,
    rtol: float = 1e-6,
) -> np.ndarray:
    """Two-time structure tensor of the continuum model by adaptive quadrature."""
    r = np.asarray(r, dtype=float)
    lo, hi = band if band is not None else params.band
    if not 0 <= lo < hi:
        raise ValueError(f"empty band ({lo}, {hi})")
    s = params.alpha if exponent is None else exponent
    g_ll, g_nn = radial_components(
        float(np.linalg.norm(r)), s, params.e0, params.dim, (lo, hi),
        tau=tau, a=params.a, beta=float(params.beta), rtol=rtol,
    )
    return assemble_tensor(r, g_ll, g_nn)


def structure_function_estimate(field: SpectralField, r, tau: float = 0.0):
    """Sample mean and standard error of ``dU(t, r) (x) dU(t + tau, r)``.

    Each realization in ``field`` contributes one sample; the input field is
    not modified.
    """
    n = field.n_real
    if n < 2:
        raise ValueError("need at least two realizations")
    r = np.asarray(r, dtype=float)
    pts = np.broadcast_to(r, (n, r.shape[0]))
    w1 = eval_increment(field, pts)
    if tau > 0:
        f2 = advance(field.copy(), tau)
        w2 = eval_increment(f2, pts)
    else:
        w2 = w1
    prod = w1[:, :, None] * w2[:, None, :]
    mean = prod.mean(axis=0)
    stderr = prod.std(axis=0, ddof=1) / math.sqrt(n)
    return mean, stderr
