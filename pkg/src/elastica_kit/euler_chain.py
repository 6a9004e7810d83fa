"""Numerical certification of the graph-form derivation of the elastica.

The curve is a graph ``y(x)`` with slope ``p`` and ``q = dp/dx``.  The bending
density is ``Z = q^2 / (1+p^2)^{5/2}`` and the constrained Lagrangian is

    L(p, q) = Z - alpha sqrt(1+p^2) - beta p.

``Multipliers`` are stored in that orientation (the one of the functional).
The first integral then reads ``Z + alpha sqrt(1+p^2) + beta p = -gamma``;
renaming every constant to its negative (``Multipliers.flipped``) gives the
form ``Z = alpha sqrt(1+p^2) + beta p + gamma`` used under square roots.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .curve_core import PlanarCurve, curvature_of
from .quadrature import ShapeTrace

MIN_GRID = 16


@dataclass(frozen=True)
class SlopeState:
    p: np.ndarray | float
    q: np.ndarray | float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise ValueError("slope state must be finite")


@dataclass(frozen=True)
class Multipliers:
    alpha: float
    beta: float
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.alpha, self.beta, self.gamma, self.delta)):
            raise ValueError("multipliers must be finite")

    def flipped(self) -> "Multipliers":
        return Multipliers(-self.alpha, -self.beta, -self.gamma, -self.delta)


def coefficients_PQZ(state: SlopeState):
    """``Z`` and its partials ``P = dZ/dp``, ``Q = dZ/dq`` (``M = N = 0``)."""
    p, q = np.asarray(state.p, float), np.asarray(state.q, float)
    w = 1.0 + p * p
    Z = q * q / w**2.5
    P = -5.0 * p * q * q / w**3.5
    Q = 2.0 * q / w**2.5
    return Z, P, Q


def lagrangian_density(state: SlopeState, mult: Multipliers):
    Z, _, _ = coefficients_PQZ(state)
    p = np.asarray(state.p, float)
    return Z - mult.alpha * np.sqrt(1.0 + p * p) - mult.beta * p


def multiplier_terms(state: SlopeState, mult: Multipliers):
    """``alpha sqrt(1+p^2) + beta p + gamma``; odd under ``Multipliers.flipped``."""
    p = np.asarray(state.p, float)
    return mult.alpha * np.sqrt(1.0 + p * p) + mult.beta * p + mult.gamma


def noether_current(state: SlopeState, mult: Multipliers):
    """``q dL/dq - L = Z + alpha sqrt(1+p^2) + beta p``, equal to ``-gamma`` on solutions."""
    Z, _, _ = coefficients_PQZ(state)
    p = np.asarray(state.p, float)
    return Z + mult.alpha * np.sqrt(1.0 + p * p) + mult.beta * p


def _check_grid(p):
    p = np.asarray(p, float)
    if p.ndim != 1 or p.size < MIN_GRID:
        raise ValueError(f"need a 1-d grid of at least {MIN_GRID} samples")
    return p


def slope_derivative(p, dx):
    """Fourth-order first differences (five-point stencils, one-sided at the ends)."""
    p = _check_grid(p)
    d = np.empty_like(p)
    d[2:-2] = (p[:-4] - 8 * p[1:-3] + 8 * p[3:-1] - p[4:]) / 12
    head = [(-25, 48, -36, 16, -3), (-3, -10, 18, -6, 1)]
    for i, w in enumerate(head):
        d[i] = np.dot(w, p[:5]) / 12
        d[-1 - i] = -np.dot(w, p[::-1][:5]) / 12
    return d / dx


def second_derivative(p, dx):
    """Three-point second difference; four-point one-sided stencils at the ends."""
    p = _check_grid(p)
    out = np.empty_like(p)
    out[1:-1] = p[2:] - 2 * p[1:-1] + p[:-2]
    out[0] = 2 * p[0] - 5 * p[1] + 4 * p[2] - p[3]
    out[-1] = 2 * p[-1] - 5 * p[-2] + 4 * p[-3] - p[-4]
    return out / (dx * dx)


def euler_lagrange_residual(p, dx: float, mult: Multipliers, q=None):
    """``P - alpha p/sqrt(1+p^2) - d/dx Q - beta`` on a uniform x-grid.

    ``d/dx Q`` is expanded by the chain rule so every derivative of ``p`` is
    a second-order difference, including at the grid ends.  ``q`` may be
    passed when known exactly.
    """
    p = _check_grid(p)
    q = slope_derivative(p, dx) if q is None else np.asarray(q, float)
    dq = second_derivative(p, dx)
    w = 1.0 + p * p
    _, P, _ = coefficients_PQZ(SlopeState(p, q))
    dQ = 2.0 * dq / w**2.5 - 10.0 * p * q * q / w**3.5
    return P - mult.alpha * p / np.sqrt(w) - dQ - mult.beta


def current_derivative_defect(p, dx: float, mult: Multipliers):
    """``d/dx(q Q - L) + q * EL`` on a grid; zero for every smooth ``p``.

    This is the chain linking the Euler-Lagrange expression to conservation:
    the current is constant wherever EL vanishes.
    """
    p = _check_grid(p)
    q = slope_derivative(p, dx)
    state = SlopeState(p, q)
    current = noether_current(state, mult)
    dcur = np.gradient(current, dx, edge_order=2)
    return dcur + q * euler_lagrange_residual(p, dx, mult, q=q)


def el_rhs(p, q, mult: Multipliers):
    """``dq/dx`` from solving the Euler-Lagrange equation for ``q'``."""
    w = 1.0 + p * p
    return 2.5 * p * q * q / w - 0.5 * (mult.alpha * p * w * w + mult.beta * w**2.5)


def solve_euler_lagrange(p0: float, q0: float, mult: Multipliers, x0: float, x1: float,
                         n: int):
    """RK4 in ``x`` for the second-order graph equation.  Returns ``(x, p, q)``."""
    x = np.linspace(x0, x1, n)
    h = x[1] - x[0]
    p = np.empty(n)
    q = np.empty(n)
    p[0], q[0] = p0, q0
    for i in range(n - 1):
        a, b = p[i], q[i]
        k1p, k1q = b, el_rhs(a, b, mult)
        k2p, k2q = b + 0.5 * h * k1q, el_rhs(a + 0.5 * h * k1p, b + 0.5 * h * k1q, mult)
        k3p, k3q = b + 0.5 * h * k2q, el_rhs(a + 0.5 * h * k2p, b + 0.5 * h * k2q, mult)
        k4p, k4q = b + h * k3q, el_rhs(a + h * k3p, b + h * k3q, mult)
        p[i + 1] = a + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        q[i + 1] = b + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
    return x, p, q


def slope_equation_rhs(p, flipped: Multipliers, branch: int = 1):
    """First-order form ``dp/dx = +/- (1+p^2)^{5/4} sqrt(alpha sqrt(1+p^2) + beta p + gamma)``.

    The multipliers here are the renamed (flipped) ones.
    """
    rad = multiplier_terms(SlopeState(p, 0.0 * p), flipped)
    if np.any(rad < 0):
        raise ValueError("radicand negative: slope left the admissible range")
    return branch * (1.0 + p * p) ** 1.25 * np.sqrt(rad)


def identity_sides(p_grid, flipped: Multipliers):
    """Both sides of the exact-differential identity, as functions on the p-grid.

    Left: ``F(p) = 2 sqrt(N) / (1+p^2)^{1/4}`` with
    ``N = alpha sqrt(1+p^2) + beta p + gamma``.  Right: the integrand
    ``(beta - gamma p) / ((1+p^2)^{5/4} sqrt(N))`` which should equal ``dF/dp``.
    """
    p = _check_grid(p_grid)
    w = 1.0 + p * p
    N = multiplier_terms(SlopeState(p, 0.0 * p), flipped)
    if np.any(N <= 0):
        i = int(np.argmin(N))
        raise ValueError(f"radicand nonpositive at p = {p[i]!r}")
    # algebraically equal to 2 sqrt(N)/w^{1/4}; avoids cancellation when beta = gamma = 0
    F = 2.0 * np.sqrt(flipped.alpha + (flipped.beta * p + flipped.gamma) / np.sqrt(w))
    rhs = (flipped.beta - flipped.gamma * p) / (w**1.25 * np.sqrt(N))
    return F, rhs


def slope_identity_deviation(p_grid, flipped: Multipliers) -> float:
    """Max deviation between a second-order difference of ``F`` and the integrand."""
    p = _check_grid(p_grid)
    dp = np.diff(p)
    if np.any(dp <= 0) or np.max(np.abs(dp - dp[0])) > 1e-9 * abs(dp[0]):
        raise ValueError("p-grid must be uniform and increasing")
    F, rhs = identity_sides(p, flipped)
    dF = np.gradient(F, dp[0], edge_order=2)
    return float(np.max(np.abs(dF - rhs)))


def rotation_reduce(beta: float, gamma: float):
    """Rotation taking ``kappa = (beta x - gamma y)/2`` to ``kappa = beta' X/2``.

    With ``theta = atan2(gamma, beta)`` the new coordinates are the old ones
    rotated counterclockwise by ``theta``.
    """
    if beta == 0 and gamma == 0:
        raise ValueError("(beta, gamma) must be nonzero")
    return float(np.hypot(beta, gamma)), float(np.arctan2(gamma, beta))


def normal_form_motion(beta: float, gamma: float, delta: float = 0.0):
    """Rigid motion ``z -> exp(i theta) z + shift`` removing gamma and delta.

    Returns ``(beta_prime, theta, shift)``; the translation is along the new
    x-axis by ``delta / beta_prime``.
    """
    bp, theta = rotation_reduce(beta, gamma)
    return bp, theta, np.array([delta / bp, 0.0])


def reduced_trace(beta: float, gamma: float, delta: float, length: float, n: int,
                  x0: float = 0.0, y0: float = 0.0, phi0: float = 0.0) -> PlanarCurve:
    """Integrate ``phi' = (beta x - gamma y + delta)/2`` with unit speed (RK4)."""
    h = length / (n - 1)

    def rhs(u):
        x, y, phi = u
        return np.array([np.cos(phi), np.sin(phi), 0.5 * (beta * x - gamma * y + delta)])

    u = np.empty((n, 3))
    u[0] = (x0, y0, phi0)
    for i in range(n - 1):
        k1 = rhs(u[i])
        k2 = rhs(u[i] + 0.5 * h * k1)
        k3 = rhs(u[i] + 0.5 * h * k2)
        k4 = rhs(u[i] + h * k3)
        u[i + 1] = u[i] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return PlanarCurve(u[:, :2], h, phi=u[:, 2])


def uniform_resample(trace: ShapeTrace, n: int | None = None) -> PlanarCurve:
    """Spline ``(x(s), y(s))`` and sample at equal arclength."""
    n = len(trace.s) if n is None else n
    spline = CubicSpline(trace.s, trace.points, axis=0)
    s = np.linspace(0.0, trace.length, n)
    return PlanarCurve(spline(s), trace.length / (n - 1))


def kappa_x_relation(trace: ShapeTrace, beta: float) -> float:
    """Max ``|kappa(s) - beta x(s)/2|`` with ``kappa`` measured from the points.

    Curvature is signed counterclockwise, so a trace run toward decreasing
    x sees the opposite sign; that orientation is accounted for.
    """
    curve = uniform_resample(trace)
    kappa = curvature_of(curve).kappa
    direction = np.sign(trace.x[-1] - trace.x[0]) or 1.0
    return float(np.max(np.abs(kappa - direction * 0.5 * beta * curve.x)))


verify_identity_1_12 = slope_identity_deviation
