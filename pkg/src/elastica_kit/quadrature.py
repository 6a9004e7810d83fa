"""Elliptic-integral representation of the elastica.

A shape is given by a quadratic ``g(x) = alpha + beta*x + gamma*x**2`` and a
scale ``a``; along the curve the tangent angle satisfies ``sin(phi) = g(x)/|a|``,
so that

    ds = |a| dx / sqrt(a^2 - g^2),      dy = g dx / sqrt(a^2 - g^2).

The integrands blow up like ``1/sqrt`` at turning points (roots of
``a^2 = g^2``).  Panels touching a turning point ``r`` are integrated in the
variable ``xi`` with ``x = r +/- xi^2``, where the integrand is smooth.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

GAUSS_ORDER = 20
TURNING_RTOL = 1e-12
SPECIES_TOL = 1e-8
SMALL_AMPLITUDE_K = 0.1


class DomainError(ValueError):
    """An integration interval leaves the admissible x-domain."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def _gl(f, lo, hi, order=GAUSS_ORDER):
    t, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * t
    return half * np.dot(w, f(x))


@dataclass(frozen=True)
class ElasticaParams:
    alpha: float
    beta: float
    gamma: float
    a: float

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma, self.a)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("parameters must be finite")
        if self.a == 0:
            raise ValueError("a must be nonzero")
        if not self._domain_nonempty():
            raise ValueError(
                f"admissible domain |g(x)| < |a| is empty for {self!r}")

    def _domain_nonempty(self) -> bool:
        al, be, ga, A = self.alpha, self.beta, self.gamma, abs(self.a)
        if ga == 0 and be == 0:
            return abs(al) < A
        if ga == 0:
            return True
        vertex = al - be * be / (4 * ga)
        if vertex * ga <= 0:  # g has a real root
            return True
        return abs(vertex) < A

    def g(self, x):
        return self.alpha + x * (self.beta + self.gamma * x)

    def dg(self, x):
        return self.beta + 2 * self.gamma * x

    def radicand(self, x):
        g = self.g(x)
        A = abs(self.a)
        return (A - g) * (A + g)

    def flipped(self) -> "ElasticaParams":
        """Euler's renaming of the constants to their negatives (mirror in y)."""
        return ElasticaParams(-self.alpha, -self.beta, -self.gamma, self.a)

    def scaled(self, factor: float) -> "ElasticaParams":
        """Same shape: the trace depends only on ``g/a``."""
        return ElasticaParams(self.alpha * factor, self.beta * factor,
                              self.gamma * factor, self.a * factor)


def euler_mn_to_alpha_beta(m: float, n: float, a: float):
    """Euler's alternate constants: ``alpha = 4m/a^2``, ``beta = 4n/a^2``."""
    return 4 * m / a**2, 4 * n / a**2


def euler_general_params(alpha: float, beta: float) -> ElasticaParams:
    """General-form parameters equivalent to Euler's normalized (alpha, beta).

    ``sin(phi) = (beta^2 x^2 - 4 alpha) / (4 beta)`` corresponds to
    ``g = beta^2 x^2 - 4 alpha`` with scale ``4|beta|``.
    """
    if beta == 0:
        raise ValueError("beta must be nonzero")
    return ElasticaParams(-4 * alpha, 0.0, beta * beta, 4 * abs(beta))


def normalize_params(params: ElasticaParams):
    """Shift the x-origin to the vertex of ``g`` and rename the constants.

    Returns ``(alpha, beta, shift, mirrored)`` such that the trace of
    ``params`` at ``x`` equals the Euler-normalized trace at ``x - shift``
    (reflected ``y -> -y`` when ``mirrored``).
    """
    p = params
    if p.gamma == 0:
        raise ValueError("normalization needs gamma != 0")
    mirrored = p.gamma < 0
    if mirrored:
        p = p.flipped()
    shift = -p.beta / (2 * p.gamma)
    g_min = p.g(shift)
    # (beta^2 X^2 - 4 alpha)/(4 beta) = (gamma X^2 + g_min)/|a|
    beta = 4 * p.gamma / abs(p.a)
    alpha = -g_min * beta / abs(p.a)
    return alpha, beta, shift, mirrored


def turning_points(params: ElasticaParams):
    """Sorted real roots of ``g(x) = +a`` and ``g(x) = -a``."""
    roots = []
    for rhs in (abs(params.a), -abs(params.a)):
        c0 = params.alpha - rhs
        if params.gamma == 0:
            if params.beta != 0:
                roots.append(-c0 / params.beta)
            continue
        disc = params.beta**2 - 4 * params.gamma * c0
        if disc < 0:
            continue
        if not np.isfinite(disc):
            continue
        sq = np.sqrt(disc)
        # numerically stable pair
        q = -0.5 * (params.beta + np.copysign(sq, params.beta if params.beta != 0 else 1.0))
        with np.errstate(over="ignore", divide="ignore"):
            cand = [q / params.gamma, c0 / q if q != 0 else 0.0]
        roots.extend(cand)
    roots = sorted(set(float(r) for r in roots if np.isfinite(r)))
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-14 * max(1.0, abs(r)):
            out.append(r)
    return out


def admissible_intervals(params: ElasticaParams):
    """Maximal open intervals on which ``a^2 - g^2 > 0`` (may be unbounded)."""
    edges = [-np.inf] + turning_points(params) + [np.inf]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isinf(lo) and np.isinf(hi):
            probe = 0.0
        elif np.isinf(lo):
            probe = hi - 1.0
        elif np.isinf(hi):
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        if params.radicand(probe) > 0:
            out.append((lo, hi))
    return out


@dataclass(frozen=True)
class ShapeTrace:
    """Samples ``(x, s, y)`` of one monotone-in-x branch of an elastica.

    ``slope`` and ``dslope`` are ``p = dy/dx`` and ``q = dp/dx`` evaluated
    from the quadrature integrands (infinite at turning points).
    """

    x: np.ndarray
    s: np.ndarray
    y: np.ndarray
    slope: np.ndarray | None = None
    dslope: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.x)
        if len(self.s) != n or len(self.y) != n:
            raise ValueError("x, s, y must have equal length")
        if n and (self.s[0] != 0 or self.y[0] != 0):
            raise ValueError("trace must start at s = 0, y = 0")
        if np.any(np.diff(self.s) < 0):
            raise ValueError("s must be nondecreasing")

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def length(self) -> float:
        return float(self.s[-1])


def _endpoint_kind(params, x):
    """+1/-1 if x is a turning point with g = +|a| / -|a|, else 0."""
    A = abs(params.a)
    g = params.g(x)
    if abs(A - g) <= TURNING_RTOL * A:
        return 1
    if abs(A + g) <= TURNING_RTOL * A:
        return -1
    return 0


def _sample_x(x0, x1, n, sing0, sing1, spacing):
    t = np.linspace(0.0, 1.0, n)
    d = x1 - x0
    if spacing == "uniform" or not (sing0 or sing1):
        x = x0 + d * t
    elif sing0 and sing1:
        x = x0 + d * 0.5 * (1 - np.cos(np.pi * t))
    elif sing1:
        x = x0 + d * np.sin(0.5 * np.pi * t)
    else:
        x = x0 + d * (1 - np.cos(0.5 * np.pi * t))
    x[0], x[-1] = x0, x1
    return x


def _regular_piece(params, u, v):
    A = abs(params.a)
    lo, hi = min(u, v), max(u, v)

    def fs(x):
        return A / np.sqrt(params.radicand(x))

    def fy(x):
        return params.g(x) / np.sqrt(params.radicand(x))

    return _gl(fs, lo, hi), _gl(fy, lo, hi)


def _singular_piece(params, r, kind, u, v):
    """Integrate over [u, v] (one side of turning point r) with x = r + sig*xi^2."""
    A = abs(params.a)
    sig = 1.0 if (u + v) > 2 * r else -1.0
    eps = max(0.0, A - kind * params.g(r))  # rounding mismatch of the root
    be, ga = params.beta, params.gamma

    def pieces(xi):
        x = r + sig * xi * xi
        dgr = be + ga * (2 * r + sig * xi * xi)  # (g(x) - g(r)) / (x - r)
        rate = np.abs(kind * sig * dgr)
        far = A + kind * params.g(x)
        # A - kind*g(x) = eps + rate*xi^2, so 2 xi / sqrt(near) is regular
        w = 2.0 / np.sqrt((eps / (xi * xi) + rate) * far)
        return x, w

    lo, hi = sorted((np.sqrt(abs(u - r)), np.sqrt(abs(v - r))))

    def fs(xi):
        _, w = pieces(xi)
        return A * w

    def fy(xi):
        x, w = pieces(xi)
        return params.g(x) * w

    return _gl(fs, lo, hi), _gl(fy, lo, hi)


def _check_interval(params, x0, x1, kind0, kind1):
    lo, hi = min(x0, x1), max(x0, x1)
    for x, kind in ((x0, kind0), (x1, kind1)):
        if kind == 0 and params.radicand(x) <= 0:
            raise DomainError(f"x = {x!r} lies outside the admissible domain", x)
        if kind != 0 and abs(params.dg(x)) <= 1e-10 * abs(params.a):
            raise DomainError(
                f"x = {x!r} is a double turning point (non-integrable)", x)
    for r in turning_points(params):
        if lo < r < hi and abs(r - lo) > 1e-12 * max(1, abs(r)) \
                and abs(hi - r) > 1e-12 * max(1, abs(r)):
            raise DomainError(f"interval crosses turning point x = {r!r}", r)
    if hi > lo and params.radicand(0.5 * (lo + hi)) <= 0:
        raise DomainError("interval lies outside the admissible domain", 0.5 * (lo + hi))


def elastica_integrals(params: ElasticaParams, x0: float, x1: float, n: int,
                       spacing: str = "auto") -> ShapeTrace:
    """Arclength and height along the branch running from ``x0`` to ``x1``.

    ``s`` and ``y`` accumulate ``ds = |a||dx|/sqrt(R)``, ``dy = g|dx|/sqrt(R)``,
    so the trace is traversed with increasing arclength in either direction.
    With ``spacing="auto"`` the samples cluster quadratically at endpoints
    that are turning points, which keeps the arclength spacing even.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    x0, x1 = float(x0), float(x1)
    kind0, kind1 = _endpoint_kind(params, x0), _endpoint_kind(params, x1)
    _check_interval(params, x0, x1, kind0, kind1)
    xs = _sample_x(x0, x1, n, kind0 != 0, kind1 != 0, spacing)
    if x1 == x0:
        z = np.zeros(n)
        return ShapeTrace(xs, z, z.copy())
    mid = 0.5 * (x0 + x1)
    ds = np.empty(n - 1)
    dy = np.empty(n - 1)
    for k in range(n - 1):
        u, v = xs[k], xs[k + 1]
        cuts = [u, v]
        if (u - mid) * (v - mid) < 0:
            cuts = [u, mid, v]
        acc_s = acc_y = 0.0
        for p, q in zip(cuts[:-1], cuts[1:]):
            near0 = abs(0.5 * (p + q) - x0) <= abs(0.5 * (p + q) - x1)
            if near0 and kind0:
                fs, fy = _singular_piece(params, x0, kind0, p, q)
            elif not near0 and kind1:
                fs, fy = _singular_piece(params, x1, kind1, p, q)
            else:
                fs, fy = _regular_piece(params, p, q)
            acc_s += fs
            acc_y += fy
        ds[k], dy[k] = acc_s, acc_y
    s = np.concatenate([[0.0], np.cumsum(ds)])
    y = np.concatenate([[0.0], np.cumsum(dy)])
    direction = np.sign(x1 - x0)
    R = params.radicand(xs)
    A = abs(params.a)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = direction * params.g(xs) / np.sqrt(R)
        dslope = direction * params.dg(xs) * A * A / R**1.5
    for idx, kind in ((0, kind0), (-1, kind1)):
        if kind:
            slope[idx] = direction * kind * np.inf
            dslope[idx] = np.inf * np.sign(params.dg(xs[idx])) * direction
    return ShapeTrace(xs, s, y, slope, dslope)


def bounded_interval(params: ElasticaParams, near: float = 0.0):
    """The bounded admissible interval closest to ``near``."""
    cands = [iv for iv in admissible_intervals(params) if np.all(np.isfinite(iv))]
    if not cands:
        raise DomainError("no bounded admissible interval")
    return min(cands, key=lambda iv: 0.0 if iv[0] <= near <= iv[1]
               else min(abs(near - iv[0]), abs(near - iv[1])))


def elastica_period(params: ElasticaParams, n: int, interval=None) -> ShapeTrace:
    """One period: the branch from lo to hi followed by the return branch.

    ``x`` is periodic over a period while ``y`` advances by a fixed amount.
    Both ends of the interval must be turning points.
    """
    lo, hi = interval if interval is not None else bounded_interval(params)
    fwd = elastica_integrals(params, lo, hi, n)
    back = elastica_integrals(params, hi, lo, n)
    x = np.concatenate([fwd.x, back.x[1:]])
    s = np.concatenate([fwd.s, fwd.s[-1] + back.s[1:]])
    y = np.concatenate([fwd.y, fwd.y[-1] + back.y[1:]])
    slope = np.concatenate([fwd.slope, back.slope[1:]])
    dslope = np.concatenate([fwd.dslope, back.dslope[1:]])
    return ShapeTrace(x, s, y, slope, dslope)


def curvature_along(params: ElasticaParams, trace: ShapeTrace) -> np.ndarray:
    """``kappa = g'(x)/|a|``, from differentiating ``sin(phi) = g/|a|``."""
    return params.dg(trace.x) / abs(params.a)


class NormalizedTrace(NamedTuple):
    trace: ShapeTrace
    params: ElasticaParams
    shift: float


def euler_normalized_trace(alpha: float, beta: float, x0: float, x1: float, n: int,
                           spacing: str = "auto") -> NormalizedTrace:
    """Trace of ``dy/dx = (b^2 x^2 - 4a)/sqrt((4b)^2 - (b^2 x^2 - 4a)^2)``.

    Returned alongside are the equivalent general parameters and the x-shift
    relating the two (zero here: Euler's form is already centered).
    """
    params = euler_general_params(alpha, beta)
    lo, hi = min(x0, x1), max(x0, x1)
    if not any(iv[0] <= lo and hi <= iv[1] for iv in admissible_intervals(params)):
        raise DomainError(
            f"[{lo!r}, {hi!r}] is not inside an admissible interval", lo)
    trace = elastica_integrals(params, x0, x1, n, spacing=spacing)
    _, _, shift, _ = normalize_params(params)
    return NormalizedTrace(trace, params, shift)


def lemniscatic_integral(w: float) -> float:
    """``F(w) = integral_0^w dt / sqrt(1 - t^4)`` for ``|w| <= 1``."""
    w = float(w)
    if not abs(w) <= 1.0:
        raise ValueError(f"|w| must be <= 1, got {w!r}")
    if w < 0:
        return -lemniscatic_integral(-w)
    if w <= 0.5:
        return float(_gl(lambda t: 1.0 / np.sqrt(1.0 - t**4), 0.0, w, 40))
    return _half_lemniscate() - _lemniscate_tail(w)


def _lemniscate_tail(w):
    # t = 1 - xi^2: dt/sqrt(1-t^4) = 2 dxi / sqrt((1+t)(1+t^2))
    def f(xi):
        t = 1.0 - xi * xi
        return 2.0 / np.sqrt((1.0 + t) * (1.0 + t * t))

    return float(_gl(f, 0.0, np.sqrt(1.0 - w), 40))


@lru_cache(maxsize=None)
def _half_lemniscate():
    head = _gl(lambda t: 1.0 / np.sqrt(1.0 - t**4), 0.0, 0.5, 40)
    return float(head + _lemniscate_tail(0.5))


def lemniscate_addition(u: float, z: float) -> float:
    """Euler's algebraic addition: ``F(w) = F(u) + F(z)`` for this ``w``."""
    return (z * np.sqrt(1 - u**4) + u * np.sqrt(1 - z**4)) / (1 + u * u * z * z)


def _complete_k(k):
    return _gl(lambda th: 1.0 / np.sqrt(1 - (k * np.sin(th)) ** 2), 0.0, np.pi / 2, 128)


def _complete_e(k):
    return _gl(lambda th: np.sqrt(1 - (k * np.sin(th)) ** 2), 0.0, np.pi / 2, 128)


@lru_cache(maxsize=None)
def species_thresholds():
    """Moduli of the rectangular and lemniscoid elastica, found by root-finding.

    Rectangular: tangent amplitude ``2 asin(k) = pi/2``.  Lemniscoid: zero net
    advance per period, ``2E(k) = K(k)``.
    """
    k_rect = brentq(lambda k: 2 * np.arcsin(k) - np.pi / 2, 0.1, 0.99, xtol=1e-14)
    k_lem = brentq(lambda k: 2 * _complete_e(k) - _complete_k(k), 0.5, 0.99, xtol=1e-14)
    return k_rect, k_lem


@dataclass(frozen=True)
class SpeciesLabel:
    tag: str
    modulus: float


SPECIES = ("straight-line", "sinusoidal-small-amplitude", "inflectional", "rectangular",
           "lemniscoid", "solitary", "non-inflectional", "circle")


def pendulum_modulus(params: ElasticaParams) -> float:
    """Modulus ``k`` of the pendulum ``kappa^2 = c + b sin(phi)``.

    ``c = (beta^2 - 4 alpha gamma)/a^2`` and ``b = 4 gamma/|a|``;
    ``k^2 = (c + |b|)/(2|b|)``.  Infinite for constant curvature.
    """
    if params.gamma == 0:
        return np.inf
    c = (params.beta**2 - 4 * params.alpha * params.gamma) / params.a**2
    b = abs(4 * params.gamma / params.a)
    return float(np.sqrt(max(0.0, (c + b) / (2 * b))))


def classify_species(params: ElasticaParams) -> SpeciesLabel:
    """Euler's species from the pendulum modulus.

    ``modulus`` is ``k`` for ``k <= 1`` and ``1/k`` for the non-inflectional
    (rotating) family, so it always lies in [0, 1].
    """
    if params.gamma == 0:
        return SpeciesLabel("straight-line" if params.beta == 0 else "circle", 0.0)
    k = pendulum_modulus(params)
    k_rect, k_lem = species_thresholds()
    if k < SPECIES_TOL:
        return SpeciesLabel("straight-line", 0.0)
    if abs(k - 1) < SPECIES_TOL:
        return SpeciesLabel("solitary", 1.0)
    if k > 1:
        return SpeciesLabel("non-inflectional", 1.0 / k)
    if abs(k - k_rect) < SPECIES_TOL:
        return SpeciesLabel("rectangular", k)
    if abs(k - k_lem) < SPECIES_TOL:
        return SpeciesLabel("lemniscoid", k)
    if k < SMALL_AMPLITUDE_K:
        return SpeciesLabel("sinusoidal-small-amplitude", k)
    return SpeciesLabel("inflectional", k)


def smkdv_multiplier(params: ElasticaParams) -> float:
    """Multiplier ``a`` of ``a k + k^3/2 + k'' = 0`` obeyed by this elastica."""
    return -(params.beta**2 - 4 * params.alpha * params.gamma) / (2 * params.a**2)
