"""Passive scalar by the backward Lagrangian representation.

``T(t, x)`` is the molecular-noise average of ``T0(Phi)``, where ``Phi`` runs
the characteristic ``dPhi = -V ds + sqrt(kappa~) dw`` from time ``t`` back to
0 inside one velocity realization.  Every evaluation returns the raw per-path
``T0`` samples grouped into batches; norms and the dissipation residual are
built from batch means so that ``||T||^2`` is estimated without the
``Var/n_paths`` bias of squaring a noisy mean.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .pairdisp import RescaleSpec, _check_step
from .params import SpectrumParams
from .rng import stream
from .synthfield import advance, synthesize

__all__ = [
    "GaussianBump",
    "Indicator",
    "TableProfile",
    "ScalarProbe",
    "ColoredFlow",
    "WhiteNoiseFlow",
    "ScalarResult",
    "EnergyReport",
    "MaxPrincipleError",
    "MaxPrincipleResult",
    "FunctionCheck",
    "evaluate_scalar",
    "energy_report",
    "max_principle_check",
    "function_of_scalar_check",
    "gaussian_bump_heat",
    "gaussian_bump_energy",
    "measure_preservation_check",
]


# profiles ---------------------------------------------------------------


@dataclass(frozen=True)
class GaussianBump:
    center: tuple
    width: float
    amplitude: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.center, dtype=float)
        r2 = np.sum((x - c) ** 2, axis=-1)
        return self.amplitude * np.exp(-0.5 * r2 / self.width**2)

    @property
    def bounds(self):
        return (min(0.0, self.amplitude), max(0.0, self.amplitude))

    def support_radius(self, tol=1e-12):
        return self.width * math.sqrt(2.0 * math.log(1.0 / tol))


@dataclass(frozen=True)
class Indicator:
    """Indicator of the box ``[lo, hi)`` (component-wise)."""

    lo: tuple
    hi: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.all((x >= np.asarray(self.lo)) & (x < np.asarray(self.hi)), axis=-1)
        return inside.astype(float)

    @property
    def bounds(self):
        return (0.0, 1.0)

    def support_radius(self, tol=1e-12):
        return float(np.max(np.maximum(np.abs(self.lo), np.abs(self.hi)))) * math.sqrt(len(self.lo))


@dataclass(frozen=True)
class TableProfile:
    """Multilinear interpolation of tabulated values, zero outside the table."""

    axes: tuple
    values: np.ndarray

    def __call__(self, x):
        from scipy.interpolate import RegularGridInterpolator

        f = RegularGridInterpolator(self.axes, self.values, bounds_error=False, fill_value=0.0)
        x = np.asarray(x, dtype=float)
        return f(x.reshape(-1, x.shape[-1])).reshape(x.shape[:-1])

    @property
    def bounds(self):
        v = np.asarray(self.values)
        return (min(0.0, float(v.min())), max(0.0, float(v.max())))

    def support_radius(self, tol=1e-12):
        return float(max(max(abs(a[0]), abs(a[-1])) for a in self.axes)) * math.sqrt(len(self.axes))


def gaussian_bump_heat(bump: GaussianBump, x, kappa_tilde: float, t: float):
    """Exact heat-kernel evolution ``E[T0(x + sqrt(kappa~) w_t)]`` of a bump."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    s2 = bump.width**2 + kappa_tilde * t
    c = np.asarray(bump.center, dtype=float)
    r2 = np.sum((x - c) ** 2, axis=-1)
    return bump.amplitude * (bump.width**2 / s2) ** (d / 2) * np.exp(-0.5 * r2 / s2)


def gaussian_bump_energy(bump: GaussianBump, dim: int, kappa_tilde: float = 0.0, t: float = 0.0):
    """``||T_t||_2^2`` for the heat-kernel evolution of a bump."""
    s2 = bump.width**2 + kappa_tilde * t
    return bump.amplitude**2 * (bump.width**2 / s2) ** dim * (math.pi * s2) ** (dim / 2)


# probe ------------------------------------------------------------------


@dataclass
class ScalarProbe:
    """Initial profile, evaluation grid and molecular diffusivity.

    ``axes`` describes a regular grid (needed for norms); ``points`` may be
    given instead for pointwise evaluation only.
    """

    profile: object
    axes: Optional[tuple] = None
    points: Optional[np.ndarray] = None
    kappa_tilde: float = 0.0
    n_paths: int = 1
    n_batches: int = 1

    def __post_init__(self):
        if self.kappa_tilde < 0:
            raise ValueError("kappa_tilde must be >= 0")
        if self.axes is None and self.points is None:
            raise ValueError("give axes or points")
        if self.axes is not None:
            self.axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
            mesh = np.meshgrid(*self.axes, indexing="ij")
            self.points = np.stack([m.ravel() for m in mesh], axis=-1)
        else:
            self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.kappa_tilde == 0:
            self.n_paths, self.n_batches = 1, 1
        if self.n_paths % self.n_batches:
            raise ValueError("n_paths must be a multiple of n_batches")
        lo, hi = self.profile.bounds
        self.sup = max(abs(lo), abs(hi))

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes) if self.axes is not None else (len(self.points),)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def with_profile(self, profile) -> "ScalarProbe":
        return ScalarProbe(profile, axes=self.axes, points=None if self.axes is not None else self.points,
                           kappa_tilde=self.kappa_tilde, n_paths=self.n_paths,
                           n_batches=self.n_batches)


# flows ------------------------------------------------------------------


def _n_steps(t, dt):
    n = int(round(t / dt))
    if abs(n * dt - t) > 1e-9 * max(1.0, t):
        raise ValueError(f"t={t} is not a multiple of dt={dt}")
    return n


class ColoredFlow:
    """One realization of the colored field, replayable from its seed.

    The field history is generated forward on the ``dt`` grid and cached, so
    evaluations at several times share one realization.
    """

    def __init__(self, params: SpectrumParams, *, band=None, n_modes: int = 256,
                 seed: int = 0, dt: float, rescale: Optional[RescaleSpec] = None,
                 c_dt: float = 0.1):
        self.params = params
        self.rescale = rescale
        if rescale is not None:
            band = tuple(rescale.band)
            self.drift_scale = rescale.drift_prefactor
            self.time_speed = rescale.time_speed
        else:
            band = tuple(band) if band is not None else params.band
            self.drift_scale = 1.0
            self.time_speed = 1.0
        _check_step(params, band, dt, self.time_speed, c_dt)
        self.band = band
        self.dt = float(dt)
        self.seed = seed
        self.n_modes = n_modes
        self._field = synthesize(params, n_modes, band, rng=stream(seed, "scalar-field"), n_real=1)
        self._hist = [self._field.amp[0].copy()]
        self._base_dt = self.dt
        self._stride = 1

    @property
    def wavevectors(self):
        return self._field.modes.wavevectors

    def amplitude(self, j: int) -> np.ndarray:
        """Amplitudes (M, d) at time ``j * dt``."""
        j = j * self._stride
        while len(self._hist) <= j:
            advance(self._field, self._base_dt * self.time_speed)
            self._hist.append(self._field.amp[0].copy())
        return self._hist[j]

    def coarsened(self, factor: int = 2) -> "ColoredFlow":
        """Same realization stepped at ``factor * dt`` (shares the history)."""
        other = copy.copy(self)
        other.dt = self.dt * factor
        other._stride = self._stride * factor
        return other

    def n_steps(self, t: float) -> int:
        return _n_steps(t, self.dt)

    def backward(self, x, t, kappa_tilde, rng, hook=None):
        n = self.n_steps(t)
        k = np.ascontiguousarray(self.wavevectors)
        fidx = np.zeros(len(x), dtype=np.int64)
        sq = math.sqrt(kappa_tilde * self.dt)
        ddt = -self.drift_scale * self.dt
        zero = np.zeros_like(x)
        if self.params.e0 == 0:
            if sq > 0:
                for _ in range(n):
                    x += sq * rng.standard_normal(x.shape)
            return x
        for j in range(n, 0, -1):
            a = self.amplitude(j)[None]
            noise = rng.standard_normal(x.shape) if sq > 0 else zero
            kernels.euler_step(x, fidx, k, np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag),
                               ddt, noise, sq)
        return x


class WhiteNoiseFlow:
    """Kraichnan transport: a fresh field draw per step, midpoint evaluation.

    The increment over ``dt`` is ``sqrt(2 dt / a)`` times a field with
    spectral exponent ``alpha + beta``; its covariance is then
    ``(2/a) Gamma dt``, the limit generator's diffusion.
    """

    def __init__(self, params: SpectrumParams, *, band=None, n_modes: int = 256,
                 seed: int = 0, dt: float):
        self.params = params
        self.band = tuple(band) if band is not None else params.band
        self.dt = float(dt)
        self.seed = seed
        self.n_modes = n_modes
        self.exponent = float(params.alpha) + float(params.beta)

    def n_steps(self, t: float) -> int:
        return _n_steps(t, self.dt)

    def draw(self, j: int):
        f = synthesize(self.params, self.n_modes, self.band, rng=stream(self.seed, "white", j),
                       n_real=1, exponent=self.exponent)
        return f.modes.wavevectors, f.amp

    def backward(self, x, t, kappa_tilde, rng, hook=None):
        n = self.n_steps(t)
        fidx = np.zeros(len(x), dtype=np.int64)
        sq = math.sqrt(kappa_tilde * self.dt)
        scale = math.sqrt(2.0 * self.dt / self.params.a)
        zero = np.zeros_like(x)
        for j in range(n, 0, -1):
            k, a = self.draw(j)
            are, aim = np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag)
            half = x.copy()
            kernels.euler_step(half, fidx, k, are, aim, -0.5 * scale, zero, 0.0)
            v = np.empty_like(x)
            kernels.increment_sum(half, fidx, k, are, aim, 1.0, v)
            x -= scale * v
            if sq > 0:
                x += sq * rng.standard_normal(x.shape)
        return x


# evaluation -------------------------------------------------------------


@dataclass
class ScalarResult:
    t: float
    values: np.ndarray  # (N,)
    stderr: np.ndarray  # (N,)
    batch_means: np.ndarray  # (N, B)
    probe: ScalarProbe = field(repr=False)
    endpoints: Optional[np.ndarray] = field(default=None, repr=False)

    def grid_values(self):
        return self.values.reshape(self.probe.shape)


def evaluate_scalar(flow, probe: ScalarProbe, t: float, seed: int = 0, *,
                    keep_endpoints: bool = False,
                    _estimator_hook: Optional[Callable] = None) -> ScalarResult:
    """``T(t, x)`` on the probe grid along one flow realization.

    ``_estimator_hook`` maps the per-path ``T0`` samples before averaging and
    exists only so tests can inject a broken estimator.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    pts = probe.points
    N, d = pts.shape
    P, B = probe.n_paths, probe.n_batches
    if t == 0:
        samples = np.repeat(probe.profile(pts)[:, None], P, axis=1)
        ends = np.repeat(pts[:, None, :], P, axis=1)
    else:
        x = np.ascontiguousarray(np.repeat(pts, P, axis=0))
        rng = stream(seed, "scalar-brownian")
        x = flow.backward(x, t, probe.kappa_tilde, rng)
        ends = x.reshape(N, P, d)
        samples = probe.profile(ends)
    if _estimator_hook is not None:
        samples = _estimator_hook(samples)
    bm = samples.reshape(N, B, P // B).mean(axis=2)
    vals = samples.mean(axis=1)
    se = samples.std(axis=1, ddof=1) / math.sqrt(P) if P > 1 else np.zeros(N)
    return ScalarResult(float(t), vals, se, bm, probe, ends if keep_endpoints else None)


@dataclass
class MaxPrincipleResult:
    passed: bool
    margin: float
    lo: float
    hi: float


class MaxPrincipleError(AssertionError):
    pass


def max_principle_check(values, probe: ScalarProbe, *, strict: bool = True) -> MaxPrincipleResult:
    """Every estimate must lie in ``[inf T0, sup T0]``.

    The margin is the smallest distance to either bound (negative when
    violated).  With ``strict`` a violation raises.
    """
    v = np.asarray(values.values if isinstance(values, ScalarResult) else values, dtype=float)
    lo, hi = probe.profile.bounds
    margin = float(min(np.min(v - lo), np.min(hi - v)))
    res = MaxPrincipleResult(margin >= 0, margin, lo, hi)
    if strict and not res.passed:
        raise MaxPrincipleError(f"estimate leaves [{lo}, {hi}] by {-margin:.3g}")
    return res


def measure_preservation_check(result: ScalarResult, probe: Optional[ScalarProbe] = None, *,
                               level: float = 1e-3, n_perm: int = 200, seed: int = 0):
    """Two-sample test of grid values of ``T_t`` against ``T0`` above a level.

    An incompressible flow rearranges ``T0``, so the super-level sets
    ``{T > c}`` keep their area.  Only levels above ``level * sup|T0|`` are
    compared: their sets stay inside the box, while the near-zero tail is
    distorted by the box boundary.
    """
    from .statkit import two_sample_match

    probe = probe or result.probe
    c = level * probe.sup
    a = result.values[np.abs(result.values) > c]
    b = probe.profile(probe.points)
    b = b[np.abs(b) > c]
    return two_sample_match(a, b, n_perm=n_perm, seed=seed)


@dataclass
class FunctionCheck:
    max_abs_diff: float
    passed: bool
    tol: float


def function_of_scalar_check(flow, probe: ScalarProbe, phi: Callable, t: float, seed: int = 0,
                             tol: float = 1e-10) -> FunctionCheck:
    """Compare ``phi(T_t)`` with the transport of ``phi(T0)`` on the same paths."""
    if probe.kappa_tilde != 0:
        raise ValueError("the commutation check needs kappa_tilde = 0")
    r1 = evaluate_scalar(flow, probe, t, seed)
    prof = probe.profile
    composed = _Composed(prof, phi)
    r2 = evaluate_scalar(flow, probe.with_profile(composed), t, seed)
    diff = float(np.max(np.abs(np.asarray(phi(r1.values), float) - r2.values)))
    return FunctionCheck(diff, diff <= tol, tol)


@dataclass(frozen=True)
class _Composed:
    inner: object
    phi: Callable

    def __call__(self, x):
        return np.asarray(self.phi(self.inner(x)), dtype=float)

    @property
    def bounds(self):
        lo, hi = self.inner.bounds
        s = np.linspace(lo, hi, 1001)
        v = np.asarray(self.phi(s), dtype=float)
        return (float(v.min()), float(v.max()))


# energy -----------------------------------------------------------------


@dataclass
class EnergyReport:
    t: float
    l2: float  # ||T_t||^2
    l2_stderr: float
    linf: float
    initial_l2: float
    dissipation: float  # ||T0||^2 - ||T_t||^2
    dissipation_stderr: float
    quadrature_error: float
    flow_error: float
    tail_fraction: float
    configuration: str
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "t": self.t, "l2": self.l2, "l2_stderr": self.l2_stderr, "linf": self.linf,
            "initial_l2": self.initial_l2, "dissipation": self.dissipation,
            "dissipation_stderr": self.dissipation_stderr,
            "quadrature_error": self.quadrature_error, "flow_error": self.flow_error,
            "tail_fraction": self.tail_fraction, "configuration": self.configuration,
            "warnings": list(self.warnings),
        }


def _cell_volume(axes):
    vol = 1.0
    for a in axes:
        h = np.diff(a)
        if not np.allclose(h, h[0], rtol=1e-9):
            raise ValueError("norms need uniformly spaced axes")
        vol *= h[0]
    return vol


def _quad(grid2, axes):
    """Riemann sum on the grid and on the every-other-point subgrid."""
    vol = _cell_volume(axes)
    fine = float(grid2.sum() * vol)
    sub = grid2[tuple(slice(None, None, 2) for _ in axes)]
    coarse = float(sub.sum() * vol * 2 ** len(axes))
    return fine, abs(fine - coarse)


def _unbiased_square(bm):
    B = bm.shape[1]
    if B == 1:
        return bm[:, 0] ** 2
    s = bm.sum(axis=1)
    return (s**2 - np.sum(bm**2, axis=1)) / (B * (B - 1))


def energy_report(result: ScalarResult, probe: Optional[ScalarProbe] = None, t: Optional[float] = None,
                  *, coarse: Optional[ScalarResult] = None, tail_tol: float = 1e-6) -> EnergyReport:
    """Quadrature of ``||T_t||^2`` with the dissipation residual.

    ``||T_t||^2`` uses the unbiased product of distinct batch means; its
    standard error is a jackknife over batches.  ``coarse`` (the same run at
    twice the step) adds a flow-discretization error.  The tail fraction is
    the share of the squared norm on the outer ring of grid points.
    """
    probe = probe or result.probe
    t = result.t if t is None else t
    if probe.axes is None:
        raise ValueError("energy needs a regular grid")
    shape = probe.shape
    bm = result.batch_means
    B = bm.shape[1]
    sq = _unbiased_square(bm)
    l2, qerr = _quad(sq.reshape(shape), probe.axes)
    if B > 2:
        loo = []
        for j in range(B):
            keep = np.delete(bm, j, axis=1)
            loo.append(_quad(_unbiased_square(keep).reshape(shape), probe.axes)[0])
        loo = np.asarray(loo)
        se = float(math.sqrt((B - 1) / B * np.sum((loo - loo.mean()) ** 2)))
    else:
        se = 0.0
    t0 = probe.profile(probe.points) ** 2
    init, qerr0 = _quad(t0.reshape(shape), probe.axes)
    flow_err = 0.0
    if coarse is not None:
        flow_err = abs(l2 - _quad(_unbiased_square(coarse.batch_means).reshape(shape), probe.axes)[0])
    g = sq.reshape(shape)
    inner = g[tuple(slice(1, -1) for _ in shape)]
    tail = float((g.sum() - inner.sum()) / g.sum()) if g.sum() > 0 else 0.0
    warns = []
    if tail > tail_tol:
        warns.append(f"truncation tail {tail:.3g} above {tail_tol:g}")
    if t == 0:
        l2, se, qerr, flow_err = init, 0.0, qerr0, 0.0
    diss = init - l2
    diss_se = math.sqrt(se**2 + qerr**2 + qerr0**2 + flow_err**2)
    return EnergyReport(
        t=float(t), l2=l2, l2_stderr=se, linf=float(np.max(np.abs(result.values))),
        initial_l2=init, dissipation=diss, dissipation_stderr=diss_se,
        quadrature_error=math.hypot(qerr, qerr0), flow_error=flow_err, tail_fraction=tail,
        configuration="positive-dissipation" if probe.kappa_tilde > 0 else "conservative",
        warnings=warns,
    )
