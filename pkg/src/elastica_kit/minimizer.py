"""Direct minimization of the bending energy over fixed-length polylines.

The unknowns are the segment angles ``theta_j`` of an ``n``-segment polyline
with uniform segment length ``h = L/n``, so the length constraint is built
in.  The endpoint constraint ``h sum exp(i theta_j) = B - A`` is kept by a
Newton retraction, and steps come from the KKT system of the Lagrangian
``E - lam . c``.  Node curvature is ``(theta_j - theta_{j-1})/h`` and the
energy is ``sum h kappa^2``; a clamped end adds the half-segment term
``2 (theta_end - angle)^2 / h``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.linalg import spsolve

from .curve_core import (
    CurveError, PlanarCurve, CurvatureProfile, curvature_of, reconstruct_curve, resample_arclength,
    rigid_align, unwrap_angles,
)
from .ode_solvers import DegenerateFit, fit_smkdv_multiplier

MIN_SEGMENTS = 64
GRADIENT_TOL = 1e-8
CONSTRAINT_TOL = 1e-13
NOETHER_TOL = 1e-8
SMKDV_TOL = 1e-4
ROUND_TRIP_TOL = 1e-3


@dataclass(frozen=True)
class BoundaryConditions:
    """Fixed ends ``start``/``end``, total length, optional clamped tangents.

    ``closed=True`` asks for a single loop of turning number one through
    ``start``; ``end`` and the tangents are then ignored.
    """

    start: tuple
    end: tuple
    length: float
    start_angle: float | None = None
    end_angle: float | None = None
    closed: bool = False

    def __post_init__(self):
        a = np.asarray(self.start, float)
        b = np.asarray(self.end, float)
        if a.shape != (2,) or b.shape != (2,) or not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("start and end must be finite points")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError("length must be positive")
        for ang in (self.start_angle, self.end_angle):
            if ang is not None and not np.isfinite(ang):
                raise ValueError("clamped angles must be finite")
        if not self.closed and self.length < self.distance * (1 - 1e-14):
            raise ValueError(f"infeasible: length {self.length!r} < endpoint distance "
                             f"{self.distance!r}")

    @classmethod
    def loop(cls, length: float, start=(0.0, 0.0)) -> "BoundaryConditions":
        return cls(tuple(start), tuple(start), length, closed=True)

    @property
    def chord(self) -> np.ndarray:
        if self.closed:
            return np.zeros(2)
        return np.asarray(self.end, float) - np.asarray(self.start, float)

    @property
    def distance(self) -> float:
        return float(np.hypot(*self.chord))

    def transformed(self, theta: float, shift=(0.0, 0.0)) -> "BoundaryConditions":
        c, s = np.cos(theta), np.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        move = lambda p: tuple(rot @ np.asarray(p, float) + np.asarray(shift, float))  # noqa: E731
        turn = lambda a: None if a is None else a + theta  # noqa: E731
        return BoundaryConditions(move(self.start), move(self.end), self.length,
                                  turn(self.start_angle), turn(self.end_angle), self.closed)


@dataclass(frozen=True)
class MinimizeReport:
    curve: PlanarCurve
    energy: float
    multiplier_estimates: tuple
    el_residual_norm: float
    noether_deviation: float
    iterations: int
    converged: bool
    gradient_norm: float = 0.0
    constraint_error: float = 0.0
    lagrange: tuple = (0.0, 0.0)
    angles: np.ndarray | None = field(default=None, repr=False)
    energy_history: tuple = field(default=(), repr=False)
    degenerate: bool = False
    message: str = ""


@dataclass(frozen=True)
class Certification:
    noether_deviation: float
    smkdv_residual: float
    smkdv_multiplier: float
    degenerate: bool
    noether_pass: bool
    smkdv_pass: bool

    @property
    def passed(self) -> bool:
        return self.noether_pass and self.smkdv_pass


class _Problem:
    """Quadratic energy ``|D theta + r|^2 / h`` plus the endpoint constraint."""

    def __init__(self, bc: BoundaryConditions, n: int):
        self.bc, self.n = bc, n
        self.h = bc.length / n
        rows, rhs = [], []
        eye = sparse.eye(n, format="csr")
        if bc.closed:
            d = sparse.diags([-np.ones(n), np.ones(n - 1)], [0, 1], shape=(n, n), format="lil")
            d[n - 1, 0] = 1.0
            rows.append(d.tocsr())
            off = np.zeros(n)
            off[-1] = 2 * np.pi  # theta_n = theta_0 + 2 pi
            rhs.append(off)
        else:
            rows.append(sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1],
                                     shape=(n - 1, n), format="csr"))
            rhs.append(np.zeros(n - 1))
            w = np.sqrt(2.0)
            if bc.start_angle is not None:
                rows.append(w * eye[:1])
                rhs.append(np.array([-w * bc.start_angle]))
            if bc.end_angle is not None:
                rows.append(w * eye[-1:])
                rhs.append(np.array([-w * bc.end_angle]))
        self.D = sparse.vstack(rows, format="csr")
        self.r = np.concatenate(rhs)
        self.hess = (2.0 / self.h) * (self.D.T @ self.D).tocsc()
        self.target = bc.chord

    def energy(self, theta):
        res = self.D @ theta + self.r
        return float(np.dot(res, res) / self.h)

    def gradient(self, theta):
        return (2.0 / self.h) * (self.D.T @ (self.D @ theta + self.r))

    def constraint(self, theta):
        return self.h * np.array([np.sum(np.cos(theta)), np.sum(np.sin(theta))]) - self.target

    def jacobian(self, theta):
        return self.h * np.vstack([-np.sin(theta), np.cos(theta)])

    def retract(self, theta, max_iter=50):
        tol = CONSTRAINT_TOL * max(1.0, self.bc.length)
        for _ in range(max_iter):
            c = self.constraint(theta)
            if np.max(np.abs(c)) < tol:
                return theta
            J = self.jacobian(theta)
            try:
                theta = theta - J.T @ np.linalg.solve(J @ J.T, c)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(theta)):
                return None
        return theta if np.max(np.abs(self.constraint(theta))) < tol else None

    def multipliers(self, theta, g):
        J = self.jacobian(theta)
        lam = np.linalg.lstsq(J.T, g, rcond=None)[0]
        return lam, g - J.T @ lam

    def kkt_step(self, theta, g, lam, metric=None):
        n = self.n
        J = self.jacobian(theta)
        if metric is None:
            curv = self.h * (lam[0] * np.cos(theta) + lam[1] * np.sin(theta))
            W = self.hess + sparse.diags(curv)
        else:
            W = metric
        cons = [J]
        if self.bc.closed:
            cons.append(np.ones((1, n)))  # rigid rotation gauge
        C = sparse.csr_matrix(np.vstack(cons))
        K = sparse.bmat([[W, C.T], [C, None]], format="csc")
        rhs = np.concatenate([-g, np.zeros(C.shape[0])])
        with np.errstate(all="ignore"):
            sol = spsolve(K, rhs)
        d = sol[:n]
        if not np.all(np.isfinite(d)):
            return None
        return d

    def points(self, theta):
        start = np.asarray(self.bc.start, float)
        steps = self.h * np.column_stack([np.cos(theta), np.sin(theta)])
        pts = np.vstack([start, start + np.cumsum(steps, axis=0)])
        if self.bc.closed:
            pts = pts[:-1]
        else:
            pts[-1] = self.bc.end  # exact to the retraction tolerance
        return pts


def _arc_angles(bc: BoundaryConditions, n: int):
    """Equal-turning seed: a circular arc of the prescribed length on the chord."""
    h = bc.length / n
    if bc.closed:
        return 2 * np.pi * (np.arange(n) + 0.5) / n
    d = bc.distance
    center = np.arctan2(bc.chord[1], bc.chord[0])
    offsets = np.arange(n) - 0.5 * (n - 1)
    if bc.length - d <= 1e-12 * bc.length:
        return np.full(n, center)

    def chord(turn):
        return h * np.sin(0.5 * n * turn) / np.sin(0.5 * turn) - d

    turn = brentq(chord, 1e-300, 2 * np.pi / n * (1 - 1e-12), xtol=1e-16, rtol=1e-15)
    return center + turn * offsets


def _seed_angles(curve: PlanarCurve, n: int):
    c = resample_arclength(curve.points, n if curve.closed else n + 1, closed=curve.closed)
    seg = np.diff(np.vstack([c.points, c.points[:1]]) if c.closed else c.points, axis=0)
    return unwrap_angles(np.arctan2(seg[:, 1], seg[:, 0]))


def node_curvature(theta, h, closed=False, start_angle=None, end_angle=None):
    """Curvature at interior nodes; clamped tangents add half-step end values."""
    if closed:
        return (theta - np.roll(theta, 1) + 2 * np.pi * (np.arange(theta.size) == 0)) / h
    k = np.diff(theta) / h
    if start_angle is not None:
        k = np.concatenate([[2 * (theta[0] - start_angle) / h], k])
    if end_angle is not None:
        k = np.concatenate([k, [2 * (end_angle - theta[-1]) / h]])
    return k


def discrete_noether_current(theta, h, lam, closed=False):
    """Per-node first integral of the discrete equilibrium.

    ``kappa^2 + lam_x cos(phi) + lam_y sin(phi)`` with ``kappa^2`` taken as the
    product of the two adjacent node curvatures, ``phi`` the segment angle
    between them, plus the ``h^2 (kappa_- kappa_+)^2 / 24`` term that cancels
    the leading discretization error.
    """
    theta = np.asarray(theta, float)
    if closed:
        k = node_curvature(theta, h, closed=True)
        km, kp, seg = k, np.roll(k, -1), theta
    else:
        k = np.diff(theta) / h
        km, kp, seg = k[:-1], k[1:], theta[1:-1]
    prod = km * kp
    return prod + lam[0] * np.cos(seg) + lam[1] * np.sin(seg) + h * h * prod * prod / 24


def _noether_deviation(theta, h, lam, closed):
    cur = discrete_noether_current(theta, h, lam, closed)
    k = node_curvature(theta, h, closed)
    scale = max(float(np.max(k * k)), 1e-300)
    if np.max(np.abs(k)) < 1e-12:
        return 0.0
    return float(np.max(np.abs(cur - np.mean(cur))) / scale)


def _straight_report(bc: BoundaryConditions, n: int) -> MinimizeReport:
    for ang in (bc.start_angle, bc.end_angle):
        center = np.arctan2(bc.chord[1], bc.chord[0])
        if ang is not None and abs((ang - center + np.pi) % (2 * np.pi) - np.pi) > 1e-12:
            raise ValueError("infeasible: length equals distance but a clamped tangent "
                             "disagrees with the chord")
    theta = _arc_angles(bc, n)
    prob = _Problem(bc, n)
    curve = PlanarCurve(prob.points(theta), prob.h, phi=np.append(theta, theta[-1]))
    return MinimizeReport(curve, 0.0, (0.0, 0.0), 0.0, 0.0, 0, True, angles=theta,
                          degenerate=True, message="straight line: multipliers unidentifiable")


def minimize_elastica(bc: BoundaryConditions, n: int, seed_curve: PlanarCurve | None = None,
                      max_iter: int = 100_000, tol: float = GRADIENT_TOL) -> MinimizeReport:
    """Minimize ``sum h kappa^2`` subject to the boundary conditions.

    Newton steps on the KKT system of the Lagrangian fall back to an
    ``H^1``-metric gradient step when the reduced Hessian is not positive.
    Every accepted step satisfies Armijo decrease, so the energy history is
    monotone.  Non-convergence is reported through ``converged`` and
    ``message``.
    """
    if int(n) != n or n < MIN_SEGMENTS:
        raise ValueError(f"n must be an integer >= {MIN_SEGMENTS}")
    n = int(n)
    if not bc.closed and bc.length - bc.distance <= 1e-12 * bc.length:
        return _straight_report(bc, n)
    prob = _Problem(bc, n)
    theta = _arc_angles(bc, n) if seed_curve is None else _seed_angles(seed_curve, n)
    theta = prob.retract(theta)
    if theta is None:
        raise ValueError("could not project the seed onto the endpoint constraint")
    metric = prob.hess + prob.h * sparse.eye(n, format="csc")
    E = prob.energy(theta)
    history = [E]
    message = "maximum iterations reached"
    converged = False
    for _ in range(max_iter):
        g = prob.gradient(theta)
        lam, pg = prob.multipliers(theta, g)
        gnorm = float(np.linalg.norm(pg))
        if gnorm < tol:
            converged, message = True, "projected gradient below tolerance"
            break
        d = prob.kkt_step(theta, g, lam)
        if d is None or np.dot(g, d) >= -1e-14 * np.linalg.norm(g) * np.linalg.norm(d):
            d = prob.kkt_step(theta, g, lam, metric)
        if d is None:
            message = "KKT system singular"
            break
        slope = float(np.dot(g, d))
        t, accepted = 1.0, False
        while t > 1e-14:
            trial = prob.retract(theta + t * d)
            if trial is not None:
                Et = prob.energy(trial)
                if Et <= E + 1e-4 * t * slope:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            # at the rounding floor the energy cannot resolve further decrease
            trial = prob.retract(theta + d)
            if trial is not None:
                Et = prob.energy(trial)
                _, pg_t = prob.multipliers(trial, prob.gradient(trial))
                if Et <= E and np.linalg.norm(pg_t) < gnorm:
                    accepted = True
        if not accepted:
            message = f"line search stalled at projected gradient {gnorm:.3e}"
            break
        assert Et <= E, "accepted step increased the energy"
        theta, E = trial, Et
        history.append(E)
    g = prob.gradient(theta)
    lam, pg = prob.multipliers(theta, g)
    gnorm = float(np.linalg.norm(pg))
    if gnorm < tol and not converged:
        converged, message = True, "projected gradient below tolerance"
    pts = prob.points(theta)
    if bc.closed:
        curve = PlanarCurve(pts, prob.h, closed=True)
    else:
        curve = PlanarCurve(pts, prob.h)
    k = node_curvature(theta, prob.h, bc.closed)
    degenerate = bool(np.max(np.abs(k)) < 1e-12)
    if degenerate:
        alpha = beta = fit_res = 0.0
    else:
        alpha, beta, fit_res = _fit_from_angles(theta, prob.h, bc.closed)
    return MinimizeReport(
        curve=curve, energy=E, multiplier_estimates=(alpha, beta), el_residual_norm=fit_res,
        noether_deviation=_noether_deviation(theta, prob.h, lam, bc.closed),
        iterations=len(history) - 1,
        converged=converged, gradient_norm=gnorm,
        constraint_error=float(np.max(np.abs(prob.constraint(theta)))),
        lagrange=(float(lam[0]), float(lam[1])), angles=theta, energy_history=tuple(history),
        degenerate=degenerate, message=message)


def _fit_from_angles(theta, h, closed):
    """Fit ``kappa^2 sin(phi) + 2 kappa' cos(phi) = alpha sin(phi) + beta``.

    This is the derivative of ``kappa^2 = alpha + beta sin(phi) + gamma cos(phi)``
    divided by ``kappa``, rearranged so the ``gamma`` terms cancel.
    """
    if closed:
        k = node_curvature(theta, h, True)
        # node j sits between segments j-1 and j
        phi = np.angle(np.exp(1j * theta) + np.exp(1j * np.roll(theta, 1)))
        dk = (np.roll(k, -1) - np.roll(k, 1)) / (2 * h)
        sel = slice(None)
    else:
        k = np.diff(theta) / h
        phi = 0.5 * (theta[1:] + theta[:-1])
        dk = np.gradient(k, h)
        sel = slice(2, -2)
    return _fit(k[sel], dk[sel], phi[sel])


def _fit(k, dk, phi):
    s, c = np.sin(phi), np.cos(phi)
    if np.std(s) < 1e-8 and np.std(k) < 1e-8 and np.max(np.abs(k)) < 1e-8:
        raise DegenerateFit("straight line: alpha and beta are unidentifiable")
    lhs = k * k * s + 2 * dk * c
    design = np.column_stack([s, np.ones_like(s)])
    if np.linalg.matrix_rank(design, tol=1e-10 * np.sqrt(s.size)) < 2:
        raise DegenerateFit("tangent angle constant: alpha and beta are unidentifiable")
    (alpha, beta), *_ = np.linalg.lstsq(design, lhs, rcond=None)
    res = lhs - design @ np.array([alpha, beta])
    return float(alpha), float(beta), float(np.max(np.abs(res)))


def estimate_multipliers(curve: PlanarCurve):
    """Least-squares ``(alpha, beta, fit_residual)`` of the arclength equilibrium.

    The model is ``kappa^2 = alpha + beta sin(phi) + gamma cos(phi)``; the
    fitted relation eliminates ``gamma`` (the x-endpoint multiplier), so only
    ``alpha`` and ``beta`` are recovered.  A circle of curvature ``c`` gives
    ``alpha = c^2``, the SMKdV multiplier being ``-alpha/2``.
    """
    prof = curvature_of(curve)
    k = prof.kappa
    if np.max(np.abs(k)) < 1e-12:
        raise DegenerateFit("straight line: alpha and beta are unidentifiable")
    seg = np.diff(np.vstack([curve.points, curve.points[:1]]) if curve.closed else curve.points,
                  axis=0)
    theta = unwrap_angles(np.arctan2(seg[:, 1], seg[:, 0]))
    phi0 = theta[-1] + 0.5 * k[0] * curve.ds if curve.closed else theta[0] - 0.5 * k[0] * curve.ds
    try:
        rebuilt = reconstruct_curve(CurvatureProfile(k, curve.ds, curve.closed),
                                    *curve.points[0], phi0)
        _, dist = rigid_align(rebuilt.points, curve.points)
    except CurveError:
        dist = np.inf
    if dist > ROUND_TRIP_TOL * curve.length:
        raise ValueError(f"curve not smooth enough: curvature round trip error {dist:.3e}")
    return _fit_from_angles(theta, curve.ds, curve.closed)


def certify_minimizer(report: MinimizeReport) -> Certification:
    """Noether-current constancy and SMKdV residual of the fitted curvature."""
    if report.degenerate:
        return Certification(0.0, 0.0, 0.0, True, True, True)
    h, theta = report.curve.ds, report.angles
    k = node_curvature(theta, h, report.curve.closed)
    if report.curve.closed:
        a_fit = -0.5 * float(np.mean(k * k))
        kpp = (np.roll(k, -1) - 2 * k + np.roll(k, 1)) / (h * h)
        res = float(np.max(np.abs(a_fit * k + 0.5 * k**3 + kpp)))
    else:
        a_fit, res = fit_smkdv_multiplier(k, h)
    return Certification(report.noether_deviation, res, a_fit, False,
                         report.noether_deviation < NOETHER_TOL, res < SMKDV_TOL)


def rectangular_boundary():
    """Boundary data of the rectangular elastica traced from ``x = -1`` to ``1``."""
    from .quadrature import ElasticaParams, elastica_integrals
    tr = elastica_integrals(ElasticaParams(0.0, 0.0, 1.0, 1.0), -1.0, 1.0, 4096)
    end = tuple(tr.points[-1])
    return BoundaryConditions((-1.0, 0.0), end, tr.length, np.pi / 2, np.pi / 2), tr
