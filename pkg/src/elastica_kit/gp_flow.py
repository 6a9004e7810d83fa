"""Pseudo-spectral isometric flows of closed curves.

Curvature lives on ``N = 2^k`` equispaced nodes of one period ``[0, L)``.
Derivatives are Fourier multipliers; ``antiderivative_periodic`` returns the
zero-mean antiderivative.  The recursion operator is

    Omega v = v'' + (kappa * (d^{-1}(kappa v) + const))'

where ``const`` is the antiderivative's integration constant (zero-mean gauge
by default).  The mKdV hierarchy is ``kappa_t = Omega^i kappa_s``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve_core import CurvatureProfile, PlanarCurve, reconstruct_curve

MIN_NODES = 32
MEAN_TOL = 1e-10
BLOWUP_FACTOR = 1e3
MAX_HIERARCHY = 2


class FlowDivergence(RuntimeError):
    """The time stepper blew up; ``diagnostics`` holds step, time and amplitude."""

    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class FlowState:
    kappa: np.ndarray
    L: float
    t: float = 0.0

    def __post_init__(self):
        k = np.array(self.kappa, dtype=float)
        n = k.size
        if k.ndim != 1 or n < MIN_NODES or n & (n - 1):
            raise ValueError(f"need N >= {MIN_NODES} nodes with N a power of two, got {n}")
        if not np.all(np.isfinite(k)):
            raise ValueError("curvature must be finite")
        if not self.L > 0:
            raise ValueError("period L must be positive")
        k.setflags(write=False)
        object.__setattr__(self, "kappa", k)

    @property
    def n(self) -> int:
        return self.kappa.size

    @property
    def ds(self) -> float:
        return self.L / self.n

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(self.n)


@dataclass(frozen=True)
class DeformationFields:
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        if np.shape(self.u1) != np.shape(self.u2):
            raise ValueError("u1 and u2 must share the grid")


def wavenumbers(n: int, L: float) -> np.ndarray:
    """Angular wavenumbers of the real FFT, ``2 pi m / L`` for m = 0..n/2."""
    return 2 * np.pi / L * np.arange(n // 2 + 1)


def _multiplier(n, L, power):
    ik = (1j * wavenumbers(n, L)) ** power
    if power % 2:
        ik[-1] = 0.0  # the Nyquist mode has no odd derivative on a real grid
    return ik


def derivative(f, L: float, order: int = 1) -> np.ndarray:
    f = np.asarray(f, float)
    return np.fft.irfft(np.fft.rfft(f) * _multiplier(f.size, L, order), n=f.size)


def _mean_check(f, what):
    m = float(np.mean(f))
    scale = max(1.0, float(np.max(np.abs(f))))
    if abs(m) > MEAN_TOL * scale:
        raise ValueError(f"{what} has nonzero mean {m!r}; no periodic antiderivative")


def antiderivative_periodic(f, L: float) -> np.ndarray:
    """Zero-mean periodic antiderivative; rejects inputs with nonzero mean."""
    f = np.asarray(f, float)
    _mean_check(f, "input")
    fh = np.fft.rfft(f)
    k = wavenumbers(f.size, L)
    out = np.zeros_like(fh)
    out[1:-1] = fh[1:-1] / (1j * k[1:-1])
    return np.fft.irfft(out, n=f.size)


def dealias_mask(n: int) -> np.ndarray:
    """Two-thirds rule: keep modes ``|m| <= n/3``."""
    return np.arange(n // 2 + 1) <= n // 3


def _filter(f):
    fh = np.fft.rfft(f)
    fh[~dealias_mask(f.size)] = 0.0
    return np.fft.irfft(fh, n=f.size)


def retained_wavenumber(n: int, L: float, dealias: bool = True) -> float:
    m = n // 3 if dealias else n // 2
    return 2 * np.pi / L * m


def omega_apply(kappa, v, L: float, integration_constant: float = 0.0) -> np.ndarray:
    """``Omega v = v'' + (kappa (d^{-1}(kappa v) + c))'``.  Requires ``mean(kappa v) = 0``."""
    kappa = np.asarray(kappa, float)
    v = np.asarray(v, float)
    inner = antiderivative_periodic(kappa * v, L) + integration_constant
    return derivative(v, L, 2) + derivative(kappa * inner, L, 1)


def omega_tilde_apply(kappa, u1, L: float) -> np.ndarray:
    """``((1/kappa) u1')'' + (kappa u1)'``; needs ``kappa`` bounded away from zero."""
    kappa = np.asarray(kappa, float)
    u1 = np.asarray(u1, float)
    kmax = np.max(np.abs(kappa))
    if not np.min(np.abs(kappa)) > 1e-6 * kmax:
        raise ValueError("curvature vanishes on the grid; inflectional profiles unsupported")
    return derivative(derivative(u1, L) / kappa, L, 2) + derivative(kappa * u1, L)


def mkdv_rhs(kappa, L: float, dealias: bool = False) -> np.ndarray:
    """``(kappa^3)'/2 + kappa'''``; the cubic term is 2/3-filtered when ``dealias``."""
    kappa = np.asarray(kappa, float)
    if dealias:
        kf = _filter(kappa)
        return _filter(0.5 * derivative(kf**3, L) + derivative(kf, L, 3))
    return 0.5 * derivative(kappa**3, L) + derivative(kappa, L, 3)


def hierarchy_gauge(kappa, L: float, index: int) -> float:
    """Integration constant making ``Omega`` produce the local hierarchy member.

    ``kappa * kappa_s = (kappa^2/2)'`` and
    ``kappa * mkdv = (kappa kappa'' - kappa'^2/2 + 3 kappa^4/8)'``, so the local
    antiderivatives differ from the zero-mean ones by these means.
    """
    kappa = np.asarray(kappa, float)
    if index == 1:
        return 0.5 * float(np.mean(kappa**2))
    if index == 2:
        d1, d2 = derivative(kappa, L), derivative(kappa, L, 2)
        return float(np.mean(kappa * d2 - 0.5 * d1**2 + 0.375 * kappa**4))
    raise ValueError("gauge defined for index 1 and 2")


def hierarchy_rhs(kappa, L: float, index: int, dealias: bool = True) -> np.ndarray:
    """``Omega^i kappa_s`` for ``i`` in 0, 1, 2."""
    if index == 0:
        return derivative(kappa, L)
    if index == 1:
        return mkdv_rhs(kappa, L, dealias=dealias)
    if index == 2:
        kf = _filter(kappa) if dealias else np.asarray(kappa, float)
        v = mkdv_rhs(kf, L, dealias=dealias)
        out = omega_apply(kf, v, L, hierarchy_gauge(kf, L, 2))
        return _filter(out) if dealias else out
    raise ValueError(f"hierarchy index must be 0..{MAX_HIERARCHY}")


def stability_limit(n: int, L: float, index: int, dealias: bool = True) -> float:
    """``dt <= 1 / k_max^(2i+1)``: the order of the leading linear operator."""
    k = retained_wavenumber(n, L, dealias)
    return 1.0 / k ** (2 * index + 1)


def rk4_step(kappa, L, index, dt, dealias=True):
    f = lambda k: hierarchy_rhs(k, L, index, dealias)  # noqa: E731
    k1 = f(kappa)
    k2 = f(kappa + 0.5 * dt * k1)
    k3 = f(kappa + 0.5 * dt * k2)
    k4 = f(kappa + dt * k3)
    return kappa + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(state: FlowState, hierarchy_index: int, dt: float, steps: int,
           dealias: bool = True, callback=None, callback_every: int = 1) -> FlowState:
    """RK4 in time.  ``callback(step, state)`` is called every ``callback_every`` steps
    (and for the initial state)."""
    if hierarchy_index not in range(MAX_HIERARCHY + 1):
        raise ValueError(f"hierarchy index must be 0..{MAX_HIERARCHY}")
    limit = stability_limit(state.n, state.L, hierarchy_index, dealias)
    if not 0 < dt <= limit:
        raise ValueError(f"dt = {dt!r} violates the stability bound dt <= {limit!r}")
    kappa = np.array(state.kappa)
    start = max(float(np.max(np.abs(kappa))), 1e-300)
    if callback is not None:
        callback(0, state)
    for step in range(1, steps + 1):
        kappa = rk4_step(kappa, state.L, hierarchy_index, dt, dealias)
        amp = float(np.max(np.abs(kappa)))
        if not np.isfinite(amp) or amp > BLOWUP_FACTOR * max(start, 1.0):
            diag = {"step": step, "t": state.t + step * dt, "max_abs_kappa": amp,
                    "initial_max_abs_kappa": start, "dt": dt, "limit": limit}
            raise FlowDivergence(f"flow diverged at step {step}", diag)
        if callback is not None and step % callback_every == 0:
            callback(step, FlowState(kappa, state.L, state.t + step * dt))
    return FlowState(kappa, state.L, state.t + steps * dt)


def total_curvature(state: FlowState) -> float:
    return float(np.sum(state.kappa) * state.ds)


def bending(state: FlowState) -> float:
    return float(np.sum(state.kappa**2) * state.ds)


def turning_number(state: FlowState) -> float:
    return total_curvature(state) / (2 * np.pi)


def spectral_shift(f, L: float, shift: float) -> np.ndarray:
    """``f(s - shift)`` by Fourier interpolation."""
    f = np.asarray(f, float)
    phase = np.exp(-1j * wavenumbers(f.size, L) * shift)
    # irfft keeps only the real part of the Nyquist term, i.e. its cosine shift
    return np.fft.irfft(np.fft.rfft(f) * phase, n=f.size)


def best_shift(f, g, L: float, guess: float | None = None):
    """Shift ``c`` minimizing ``max |f(s - c) - g(s)|``; returns ``(c, deviation)``."""
    from scipy.optimize import minimize_scalar

    f = np.asarray(f, float)
    g = np.asarray(g, float)
    if guess is None:
        corr = np.fft.irfft(np.conj(np.fft.rfft(f)) * np.fft.rfft(g), n=f.size)
        guess = L * np.argmax(corr) / f.size
    ds = L / f.size
    cost = lambda c: float(np.sum((spectral_shift(f, L, c) - g) ** 2))  # noqa: E731
    res = minimize_scalar(cost, bracket=(guess - ds, guess, guess + ds), tol=1e-12)
    c = float(res.x)
    return c, float(np.max(np.abs(spectral_shift(f, L, c) - g)))


CLOSURE_RTOL = 1e-8


def curve_from_state(state: FlowState, x0=0.0, y0=0.0, phi0=0.0) -> PlanarCurve:
    """Curve of length exactly ``L`` integrated from the periodic curvature.

    Closed when the integrated end returns to the start (within
    ``CLOSURE_RTOL * L``), otherwise open with ``n + 1`` nodes.
    """
    kappa = np.append(state.kappa, state.kappa[0])
    open_curve = reconstruct_curve(CurvatureProfile(kappa, state.ds), x0, y0, phi0)
    gap = np.hypot(*(open_curve.points[-1] - open_curve.points[0]))
    if gap > CLOSURE_RTOL * state.L:
        return open_curve
    return reconstruct_curve(CurvatureProfile(state.kappa, state.ds, periodic=True),
                             x0, y0, phi0)


def _curve_geometry(z, L):
    zs = np.fft.ifft(np.fft.fft(z) * _complex_multiplier(z.size, L, 1))
    zss = np.fft.ifft(np.fft.fft(z) * _complex_multiplier(z.size, L, 2))
    speed = np.abs(zs)
    kappa = np.imag(np.conj(zs) * zss) / speed**3
    return zs, speed, kappa


def _complex_multiplier(n, L, power):
    k = 2 * np.pi / L * np.fft.fftfreq(n, 1.0 / n)
    m = (1j * k) ** power
    if power % 2:
        m[n // 2] = 0.0
    return m


def spectral_curvature(points, L: float) -> np.ndarray:
    """Curvature of a closed curve sampled at equal parameter steps over ``[0, L)``."""
    z = np.asarray(points, float) @ np.array([1.0, 1j])
    return _curve_geometry(z, L)[2]


def spectral_length(points, L: float) -> float:
    """``integral |z'|`` over one period (exact for band-limited curves)."""
    z = np.asarray(points, float) @ np.array([1.0, 1j])
    return float(np.sum(_curve_geometry(z, L)[1]) * L / z.size)


def deformation_fields(kappa, u2, L: float, tangential_constant: float = 0.0) -> DeformationFields:
    """``u1 = d^{-1}(kappa u2) + const`` keeps the deformation isometric."""
    kappa = np.asarray(kappa, float)
    u2 = np.asarray(u2, float)
    if kappa.shape != u2.shape:
        raise ValueError("u2 must live on the curve grid")
    u1 = antiderivative_periodic(kappa * u2, L) + tangential_constant
    return DeformationFields(u1, u2)


def deform_curve(curve: PlanarCurve, u2, dt: float, tangential_constant: float = 0.0) -> PlanarCurve:
    """One explicit Euler step of ``z_t = (u1 + i u2) z_s``."""
    if not curve.closed:
        raise ValueError("deform_curve needs a closed curve")
    L = curve.length
    z = curve.points @ np.array([1.0, 1j])
    zs, speed, kappa = _curve_geometry(z, L)
    fields = deformation_fields(kappa, u2, L, tangential_constant)
    tangent = zs / speed
    z_new = z + dt * (fields.u1 + 1j * fields.u2) * tangent
    pts = np.column_stack([z_new.real, z_new.imag])
    return PlanarCurve(pts, curve.ds, closed=True)


def profile_state(kind: str, n: int, L: float, amplitude: float = 0.5) -> FlowState:
    """Named initial curvature profiles for demos and the command line."""
    s = L * np.arange(n) / n
    base = 2 * np.pi / L
    if kind == "cos":
        k = np.cos(2 * np.pi * s / L)
    elif kind == "circle":
        k = np.full(n, base)
    elif kind == "perturbed-circle":
        k = base * (1 + amplitude * np.cos(3 * 2 * np.pi * s / L))
    else:
        raise ValueError(f"unknown profile {kind!r}")
    return FlowState(k, L)
