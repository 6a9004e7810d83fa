"""Planar curves sampled uniformly in arclength.

Curvature is signed, counterclockwise turning positive.  A curve with ``n``
nodes spans ``n - 1`` segments when open and ``n`` segments when closed, so the
total length is always ``ds * n_segments``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

MIN_POINTS = 8
SPACING_RTOL = 1e-6


class CurveError(ValueError):
    """Raised when an input violates a curve invariant."""


def unwrap_angles(theta):
    """Accumulate nearest-branch differences so neighbors differ by less than pi."""
    theta = np.asarray(theta, dtype=float)
    if theta.size < 2:
        return theta.copy()
    d = np.diff(theta)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return np.concatenate([[theta[0]], theta[0] + np.cumsum(d)])


def _chords(points, closed):
    pts = np.asarray(points, dtype=float)
    if closed:
        return np.roll(pts, -1, axis=0) - pts
    return np.diff(pts, axis=0)


def _check_spacing(points, ds, closed):
    """Chords of an arclength-uniform curve never exceed ``ds`` and never fall
    below the chord of an arc with the observed turning, ``ds*cos(turn/2)``."""
    seg = _chords(points, closed)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lengths <= 0.0):
        raise CurveError("degenerate (zero-length) segment")
    tol = SPACING_RTOL * ds
    if np.any(lengths > ds + tol):
        i = int(np.argmax(lengths))
        raise CurveError(f"segment {i} has length {lengths[i]!r} > ds={ds!r}")
    ang = np.arctan2(seg[:, 1], seg[:, 0])
    turn = np.abs((np.diff(ang) + np.pi) % (2 * np.pi) - np.pi)
    if closed:
        last = abs((ang[0] - ang[-1] + np.pi) % (2 * np.pi) - np.pi)
        node = np.concatenate([[last], turn])  # node i sits before segment i
        span = node + np.roll(node, -1)
    else:
        node = np.concatenate([[0.0], turn, [0.0]])
        span = node[:-1] + node[1:]
    span = np.minimum(span, np.pi)
    floor = ds * np.cos(0.5 * span) - tol
    if np.any(lengths < floor):
        i = int(np.argmax(floor - lengths))
        raise CurveError(f"segment {i} has length {lengths[i]!r}, expected about ds={ds!r}")


@dataclass(frozen=True)
class PlanarCurve:
    """Arclength-uniform planar curve.

    ``phi`` optionally carries the exact tangent angle at the nodes when the
    constructor knows it (e.g. curves integrated from a curvature profile).
    """

    points: np.ndarray
    ds: float
    closed: bool = False
    phi: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise CurveError("points must have shape (n, 2)")
        if pts.shape[0] < MIN_POINTS:
            raise CurveError(f"need at least {MIN_POINTS} points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise CurveError("points must be finite")
        if not self.ds > 0:
            raise CurveError("ds must be positive")
        _check_spacing(pts, float(self.ds), self.closed)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ds", float(self.ds))
        if self.phi is not None:
            phi = np.array(self.phi, dtype=float)
            if phi.shape != (pts.shape[0],):
                raise CurveError("phi must match the number of points")
            object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def n_segments(self) -> int:
        return self.n if self.closed else self.n - 1

    @property
    def length(self) -> float:
        return self.ds * self.n_segments

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(self.n)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def transformed(self, theta=0.0, shift=(0.0, 0.0)) -> "PlanarCurve":
        """Rotate by ``theta`` about the origin, then translate by ``shift``."""
        c, s = np.cos(theta), np.sin(theta)
        pts = self.points @ np.array([[c, s], [-s, c]]) + np.asarray(shift, dtype=float)
        phi = None if self.phi is None else self.phi + theta
        return PlanarCurve(pts, self.ds, self.closed, phi)


@dataclass(frozen=True)
class TangentAngle:
    """Unwrapped tangent-angle samples on a uniform arclength grid."""

    phi: np.ndarray
    ds: float
    dphi: np.ndarray | None = None

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.size > 1 and np.any(np.abs(np.diff(phi)) >= np.pi):
            raise CurveError("tangent angle is not unwrapped")
        object.__setattr__(self, "phi", phi)
        if self.dphi is not None:
            object.__setattr__(self, "dphi", np.asarray(self.dphi, dtype=float))

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(self.phi.size)

    def curvature(self) -> "CurvatureProfile":
        """``dphi`` when attached (exact, from the ODE), else second-order differences."""
        if self.dphi is not None:
            return CurvatureProfile(self.dphi, self.ds, periodic=False)
        return CurvatureProfile(np.gradient(self.phi, self.ds, edge_order=2), self.ds)


@dataclass(frozen=True)
class CurvatureProfile:
    """Samples of curvature on a uniform arclength grid.

    A periodic profile of ``n`` samples covers length ``n * ds``; an open one
    covers ``(n - 1) * ds``.
    """

    kappa: np.ndarray
    ds: float
    periodic: bool = False

    def __post_init__(self):
        k = np.array(self.kappa, dtype=float)
        if k.ndim != 1 or k.size < MIN_POINTS:
            raise CurveError(f"curvature profile needs at least {MIN_POINTS} samples")
        if not np.all(np.isfinite(k)):
            raise CurveError("curvature samples must be finite")
        if not self.ds > 0:
            raise CurveError("ds must be positive")
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "ds", float(self.ds))

    @property
    def n(self) -> int:
        return self.kappa.size

    @property
    def s(self) -> np.ndarray:
        return self.ds * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.ds * (self.n if self.periodic else self.n - 1)


def curvature_of(curve: PlanarCurve) -> CurvatureProfile:
    """Curvature at the nodes from centered differences of the chord angles.

    Interior nodes use ``(theta[i+1/2] - theta[i-1/2]) / ds``, which is second
    order for arclength samples.  Open ends are extrapolated quadratically.
    """
    seg = _chords(curve.points, curve.closed)
    theta = unwrap_angles(np.arctan2(seg[:, 1], seg[:, 0]))
    if curve.closed:
        d = np.diff(theta, prepend=theta[-1])
        d = (d + np.pi) % (2 * np.pi) - np.pi
        return CurvatureProfile(d / curve.ds, curve.ds, periodic=True)
    k = np.empty(curve.n)
    k[1:-1] = np.diff(theta) / curve.ds
    k[0] = 3 * k[1] - 3 * k[2] + k[3]
    k[-1] = 3 * k[-2] - 3 * k[-3] + k[-4]
    return CurvatureProfile(k, curve.ds, periodic=False)


def _midpoint_values(k, periodic):
    """Fourth-order interpolation of samples to the segment midpoints."""
    if periodic:
        km1, kp1, kp2 = np.roll(k, 1), np.roll(k, -1), np.roll(k, -2)
        return (-km1 + 9 * k + 9 * kp1 - kp2) / 16
    n = k.size
    mid = np.empty(n - 1)
    mid[1:-1] = (-k[:-3] + 9 * k[1:-2] + 9 * k[2:-1] - k[3:]) / 16
    mid[0] = (5 * k[0] + 15 * k[1] - 5 * k[2] + k[3]) / 16
    mid[-1] = (5 * k[-1] + 15 * k[-2] - 5 * k[-3] + k[-4]) / 16
    return mid


def reconstruct_curve(profile: CurvatureProfile, x0=0.0, y0=0.0, phi0=0.0) -> PlanarCurve:
    """Integrate ``phi' = kappa``, ``z' = exp(i phi)`` with classical RK4.

    Curvature at the half steps comes from four-point interpolation.  For a
    periodic profile the returned curve is flagged closed; whether it actually
    closes is up to the profile.
    """
    k = profile.kappa
    h = profile.ds
    periodic = profile.periodic
    kn = np.append(k, k[0]) if periodic else k
    km = _midpoint_values(k, periodic)
    nseg = km.size
    phi = np.empty(nseg + 1)
    z = np.empty(nseg + 1, dtype=complex)
    phi[0] = phi0
    z[0] = complex(x0, y0)
    for i in range(nseg):
        p = phi[i]
        k1 = np.exp(1j * p)
        k2 = np.exp(1j * (p + 0.5 * h * kn[i]))
        k3 = np.exp(1j * (p + 0.5 * h * km[i]))
        k4 = np.exp(1j * (p + h * km[i]))
        z[i + 1] = z[i] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        phi[i + 1] = p + h / 6 * (kn[i] + 4 * km[i] + kn[i + 1])
    if periodic:
        z, phi = z[:-1], phi[:-1]
    pts = np.column_stack([z.real, z.imag])
    return PlanarCurve(pts, h, closed=periodic, phi=phi)


def bending_energy(curve: PlanarCurve) -> float:
    """Euler-Bernoulli energy, the integral of squared curvature."""
    k2 = curvature_of(curve).kappa ** 2
    if curve.closed:
        return float(np.sum(k2) * curve.ds)
    return float(np.trapezoid(k2, dx=curve.ds))


def polyline_length(points, closed=False) -> float:
    seg = _chords(points, closed)
    return float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))


def resample_arclength(points, n: int, closed: bool = False) -> PlanarCurve:
    """Resample a polyline to ``n`` nodes equally spaced along its arclength.

    Spacing is measured along the input polyline, so the total length is
    preserved exactly; chords straddling a corner are shorter than ``ds``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4:
        raise CurveError("need at least 4 input points")
    seg = _chords(pts, closed)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    if np.any(lengths == 0.0):
        raise CurveError("duplicate consecutive points")
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    if not total > 0:
        raise CurveError("polyline has zero length")
    verts = np.vstack([pts, pts[:1]]) if closed else pts
    nseg = n if closed else n - 1
    ds = total / nseg
    t = ds * np.arange(n)
    idx = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(lengths) - 1)
    frac = ((t - cum[idx]) / lengths[idx])[:, None]
    out = verts[idx] + frac * (verts[idx + 1] - verts[idx])
    if not closed:
        out[-1] = pts[-1]
    out[0] = pts[0]
    return PlanarCurve(out, ds, closed)


def sample_at_arclength(curve: PlanarCurve, s) -> np.ndarray:
    """Interpolate node positions at arbitrary arclengths with cubic splines."""
    s_nodes = curve.s
    pts = curve.points
    if curve.closed:
        s_nodes = np.append(s_nodes, curve.length)
        pts = np.vstack([pts, pts[:1]])
        spline = CubicSpline(s_nodes, pts, axis=0, bc_type="periodic")
        return spline(np.mod(s, curve.length))
    return CubicSpline(s_nodes, pts, axis=0)(s)


def rigid_align(source, target):
    """Least-squares rotation + translation of ``source`` onto ``target``.

    Returns ``(aligned, max_distance)``.  Reflections are excluded.
    """
    P = np.asarray(source, dtype=float)
    Q = np.asarray(target, dtype=float)
    pc, qc = P.mean(axis=0), Q.mean(axis=0)
    H = (P - pc).T @ (Q - qc)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    R = Vt.T @ np.diag([1.0, d]) @ U.T
    aligned = (P - pc) @ R.T + qc
    return aligned, float(np.max(np.hypot(*(aligned - Q).T)))
