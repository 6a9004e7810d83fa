"""Angle-form and curvature-form ODEs of the elastica.

* static sine-Gordon (pendulum): ``phi'' + A cos(phi) + B sin(phi) = 0``
* static mKdV: ``a kappa + kappa^3/2 + kappa'' = 0``
* Lagrange's elliptic integrals in the tangent angle.

All integrators are fixed-step classical RK4 with ``n`` steps of ``L/n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve_core import CurvatureProfile, PlanarCurve, TangentAngle, rigid_align, sample_at_arclength
from .euler_chain import second_derivative
from .quadrature import ElasticaParams, gauss_legendre

MIN_STEPS = 64


class DegenerateFit(ValueError):
    """The multiplier is unidentifiable (straight line)."""


@dataclass(frozen=True)
class PendulumState:
    phi: float
    dphi: float

    def __post_init__(self):
        if not (np.isfinite(self.phi) and np.isfinite(self.dphi)):
            raise ValueError("pendulum state must be finite")


@dataclass(frozen=True)
class PendulumParams:
    """Constants in ``phi'' + A cos(phi) + B sin(phi) = 0``."""

    A: float
    B: float

    def __post_init__(self):
        if not (np.isfinite(self.A) and np.isfinite(self.B)):
            raise ValueError("A, B must be finite")

    def energy(self, phi, dphi):
        """First integral ``H = dphi^2/2 + A sin(phi) - B cos(phi)``."""
        return 0.5 * dphi * dphi + self.A * np.sin(phi) - self.B * np.cos(phi)

    @classmethod
    def from_quadrature(cls, params: ElasticaParams) -> "PendulumParams":
        """``kappa^2 = c + b sin(phi)`` with ``b = 4 gamma/|a|`` gives ``A = -b/2``."""
        return cls(-2.0 * params.gamma / abs(params.a), 0.0)


@dataclass(frozen=True)
class LagrangeParams:
    """Lagrange's constants: ``ds = K dphi / sqrt(D(phi))`` with
    ``D = M^2 c^2 / (4K^2) + P (1 - cos phi) + N sin phi``.

    ``C`` does not enter the arclength integrals and is carried only for
    completeness of the parameter set.
    """

    K: float
    C: float
    P: float
    N: float
    M: float
    c: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.K, self.C, self.P, self.N, self.M, self.c)):
            raise ValueError("Lagrange constants must be finite")
        if self.K == 0:
            raise ValueError("K must be nonzero")

    def radicand(self, phi):
        return (self.M * self.c) ** 2 / (4 * self.K**2) + self.P * (1 - np.cos(phi)) \
            + self.N * np.sin(phi)

    def to_gauss(self) -> PendulumParams:
        """``kappa^2 = D/K^2``; matching ``H`` gives ``A = -N/(2K^2)``, ``B = -P/(2K^2)``."""
        return PendulumParams(-self.N / (2 * self.K**2), -self.P / (2 * self.K**2))

    def initial_state(self, phi0: float) -> PendulumState:
        d = self.radicand(phi0)
        if d <= 0:
            raise ValueError(f"radicand nonpositive at phi = {phi0!r}")
        return PendulumState(phi0, np.sign(self.K) * np.sqrt(d) / abs(self.K))


@dataclass(frozen=True)
class SMKdVParams:
    a: float
    kappa0: float
    dkappa0: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.a, self.kappa0, self.dkappa0)):
            raise ValueError("SMKdV parameters must be finite")

    def energy(self, kappa, dkappa):
        """First integral ``dkappa^2/2 + kappa^4/8 + a kappa^2/2``."""
        return smkdv_energy(kappa, dkappa, self.a)


def smkdv_energy(kappa, dkappa, a):
    return 0.5 * dkappa * dkappa + kappa**4 / 8 + 0.5 * a * kappa * kappa


@dataclass(frozen=True)
class PendulumTrajectory(TangentAngle):
    """Tangent angle with its derivative and the integrated curve points."""

    points: np.ndarray | None = None

    @property
    def curve(self) -> PlanarCurve:
        return PlanarCurve(self.points, self.ds, phi=self.phi)


@dataclass(frozen=True)
class SMKdVProfile(CurvatureProfile):
    """Curvature profile carrying ``dkappa/ds`` from the solver."""

    dkappa: np.ndarray | None = None


def _rk4(rhs, u0, h, n):
    u = np.empty((n + 1, len(u0)))
    u[0] = u0
    for i in range(n):
        k1 = rhs(u[i])
        k2 = rhs(u[i] + 0.5 * h * k1)
        k3 = rhs(u[i] + 0.5 * h * k2)
        k4 = rhs(u[i] + h * k3)
        u[i + 1] = u[i] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def _check_steps(n):
    if int(n) != n or n < MIN_STEPS:
        raise ValueError(f"n must be an integer >= {MIN_STEPS}")
    return int(n)


def solve_static_sine_gordon(params: PendulumParams, init: PendulumState, length: float,
                             n: int, x0: float = 0.0, y0: float = 0.0) -> PendulumTrajectory:
    """Integrate the pendulum together with ``x' = cos(phi)``, ``y' = sin(phi)``."""
    n = _check_steps(n)
    h = length / n
    A, B = params.A, params.B

    def rhs(u):
        phi, w = u[0], u[1]
        c, s = np.cos(phi), np.sin(phi)
        return np.array([w, -A * c - B * s, c, s])

    u = _rk4(rhs, np.array([init.phi, init.dphi, x0, y0], float), h, n)
    return PendulumTrajectory(u[:, 0], h, u[:, 1], u[:, 2:])


def solve_smkdv(params: SMKdVParams, length: float, n: int) -> SMKdVProfile:
    """Integrate ``kappa'' = -a kappa - kappa^3/2`` from ``(kappa0, dkappa0)``."""
    n = _check_steps(n)
    h = length / n
    a = params.a
    u = _rk4(lambda u: np.array([u[1], -a * u[0] - 0.5 * u[0] ** 3]),
             np.array([params.kappa0, params.dkappa0], float), h, n)
    return SMKdVProfile(u[:, 0], h, False, u[:, 1])


def smkdv_turning_values(a: float, kappa0: float):
    """Extreme curvatures of the orbit through ``(kappa0, 0)``.

    With ``u = kappa^2`` the turning values solve ``u^2/8 + a u/2 = E``;
    one root is ``kappa0^2`` and the roots sum to ``-4a``.  Returns
    ``(low, high, other_root)``: inflectional orbits (``other_root <= 0``)
    run between ``-|kappa0|`` and ``|kappa0|``.
    """
    k0 = abs(kappa0)
    u_other = -4.0 * a - k0 * k0
    if k0 == 0 or abs(u_other - k0 * k0) <= 1e-14 * max(1.0, k0 * k0):
        raise ValueError("equilibrium: constant curvature does not oscillate")
    if u_other == 0:
        raise ValueError("separatrix orbit: infinite period")
    if u_other < 0:
        return -k0, k0, u_other
    k1 = np.sqrt(u_other)
    return min(k0, k1), max(k0, k1), u_other


def smkdv_period(a: float, kappa0: float, order: int = 128) -> float:
    """Arclength period of the SMKdV orbit through ``(kappa0, 0)``.

    ``kappa = mid + half sin(theta)`` removes both inverse-square-root
    endpoint singularities at once, leaving a smooth integrand.
    """
    lo, hi, u_other = smkdv_turning_values(a, kappa0)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    t, w = gauss_legendre(order)
    k = mid + half * np.sin(0.5 * np.pi * t)
    # potential V = E - k^4/8 - a k^2/2 divided by (hi - k)(k - lo)
    if u_other < 0:
        quotient = (k * k - u_other) / 8
    else:
        quotient = (hi + k) * (k + lo) / 8
    return float(np.pi * np.dot(w, 1.0 / np.sqrt(2 * quotient)))


def cross_check_formulations(solution: TangentAngle, params: PendulumParams | None = None):
    """Least-squares multiplier ``a`` for which ``kappa = phi'`` solves the SMKdV.

    Returns ``(a_fit, residual_norm)`` with the residual measured as the max
    of ``a kappa + kappa^3/2 + kappa''`` (``kappa''`` from differences).
    """
    kappa = solution.curvature().kappa
    return fit_smkdv_multiplier(kappa, solution.ds)


def fit_smkdv_multiplier(kappa, ds: float):
    kappa = np.asarray(kappa, float)
    if np.max(np.abs(kappa)) < 1e-12:
        raise DegenerateFit("curvature vanishes identically: a is unidentifiable")
    kpp = second_derivative(kappa, ds)
    target = kpp + 0.5 * kappa**3
    a_fit = -float(np.dot(kappa, target) / np.dot(kappa, kappa))
    residual = a_fit * kappa + target
    return a_fit, float(np.max(np.abs(residual)))


def _lagrange_panel(lp: LagrangeParams, lo, hi, order=16):
    t, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    phi = 0.5 * (hi + lo) + half * t
    d = lp.radicand(phi)
    f = abs(lp.K) / np.sqrt(d)
    return half * np.dot(w, f), half * np.dot(w, f * np.cos(phi)), half * np.dot(w, f * np.sin(phi))


def lagrange_integrals(params: LagrangeParams, phi0: float, phi1: float, n: int):
    """``(phi, s, x, y)`` sampled on a uniform tangent-angle grid."""
    phi = np.linspace(phi0, phi1, n)
    lo, hi = min(phi0, phi1), max(phi0, phi1)
    probe = np.linspace(lo, hi, 8 * n)
    d = params.radicand(probe)
    if np.any(d <= 0):
        bad = probe[np.argmin(d)]
        raise ValueError(f"radicand nonpositive at phi = {bad!r}")
    incr = np.array([_lagrange_panel(params, min(u, v), max(u, v))
                     for u, v in zip(phi[:-1], phi[1:])])
    incr = incr.reshape(-1, 3)
    s, x, y = (np.concatenate([[0.0], np.cumsum(incr[:, j])]) for j in range(3))
    return phi, s, x, y


def aligned_distance(curve: PlanarCurve, s, points) -> float:
    """Sample ``curve`` at arclengths ``s`` and Procrustes-align to ``points``."""
    sampled = sample_at_arclength(curve, np.asarray(s, float))
    _, dist = rigid_align(sampled, np.asarray(points, float))
    return dist


def rectangular_routes(n: int = 4096):
    """The rectangular elastica from quadrature, pendulum and SMKdV routes.

    The quadrature branch ``g = x^2``, ``a = 1`` runs from ``x = -1`` to
    ``x = 1`` with vertical tangents at both ends and ``kappa = 2x``.
    Returns ``(trace, pendulum_curve, smkdv_curve)``.
    """
    from .curve_core import reconstruct_curve
    from .quadrature import elastica_integrals

    params = ElasticaParams(0.0, 0.0, 1.0, 1.0)
    trace = elastica_integrals(params, -1.0, 1.0, n)
    length = trace.length
    pend = solve_static_sine_gordon(PendulumParams.from_quadrature(params),
                                    PendulumState(np.pi / 2, -2.0), length, n, -1.0, 0.0)
    prof = solve_smkdv(SMKdVParams(0.0, -2.0, 0.0), length, n)
    mk = reconstruct_curve(CurvatureProfile(prof.kappa, prof.ds), -1.0, 0.0, np.pi / 2)
    return trace, pend.curve, mk
