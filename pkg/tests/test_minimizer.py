import numpy as np
import pytest
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from elastica_kit.curve_core import CurvatureProfile, PlanarCurve, reconstruct_curve
from elastica_kit.minimizer import (
    BoundaryConditions, certify_minimizer, estimate_multipliers, minimize_elastica,
    node_curvature, rectangular_boundary,
)
from elastica_kit.ode_solvers import DegenerateFit, aligned_distance
from elastica_kit.quadrature import ElasticaParams, curvature_along


@pytest.fixture(scope="module")
def rectangular():
    bc, tr = rectangular_boundary()
    return bc, tr, minimize_elastica(bc, 4096)


def test_rejects_infeasible():
    with pytest.raises(ValueError, match="infeasible"):
        BoundaryConditions((0, 0), (2, 0), 1.5)
    with pytest.raises(ValueError):
        minimize_elastica(BoundaryConditions((0, 0), (1, 0), 2.0), 32)
    with pytest.raises(ValueError, match="clamped"):
        minimize_elastica(BoundaryConditions((0, 0), (1, 0), 1.0, start_angle=0.3), 64)


def test_straight_line():
    r = minimize_elastica(BoundaryConditions((0, 0), (3, 4), 5.0), 64)
    assert r.energy == 0.0 and r.converged and r.degenerate
    assert np.allclose(r.curve.points[-1], (3, 4))
    assert np.max(np.abs(4 * r.curve.x - 3 * r.curve.y)) < 1e-13
    cert = certify_minimizer(r)
    assert cert.degenerate and cert.passed and cert.smkdv_residual == 0


def test_closed_loop_is_circle():
    L, n = 3.0, 256
    t = 2 * np.pi * np.arange(400) / 400
    ellipse = np.column_stack([1.3 * np.cos(t), 0.8 * np.sin(t)])
    from elastica_kit.curve_core import resample_arclength
    seed = resample_arclength(ellipse, 400, closed=True)
    r = minimize_elastica(BoundaryConditions.loop(L), n, seed_curve=seed)
    assert r.converged
    assert r.energy == pytest.approx(4 * np.pi**2 / L, rel=1e-6)
    k = node_curvature(r.angles, r.curve.ds, closed=True)
    assert np.max(np.abs(k - 2 * np.pi / L)) < 1e-6
    cert = certify_minimizer(r)
    assert cert.noether_deviation < 1e-8
    assert cert.smkdv_multiplier == pytest.approx(-0.5 * (2 * np.pi / L) ** 2, rel=1e-8)


def test_rectangular_converges(rectangular):
    bc, _, r = rectangular
    assert r.converged and r.gradient_norm < 1e-8
    assert r.constraint_error < 1e-10
    assert np.max(np.abs(r.curve.points[-1] - np.asarray(bc.end))) < 1e-10
    assert r.curve.length == pytest.approx(bc.length, rel=1e-14)
    hist = np.array(r.energy_history)
    assert np.all(np.diff(hist) <= 0)


def test_rectangular_shape_and_curvature(rectangular):
    _, tr, r = rectangular
    assert aligned_distance(r.curve, tr.s, tr.points) < 1e-4
    # node j of the polyline sits at arclength j h
    k = node_curvature(r.angles, r.curve.ds)
    s = r.curve.ds * np.arange(1, r.curve.n - 1)
    kq = CubicSpline(tr.s, curvature_along(ElasticaParams(0, 0, 1, 1), tr))(s)
    assert np.max(np.abs(k - kq)) < 1e-4


def test_rectangular_multipliers(rectangular):
    _, _, r = rectangular
    alpha, beta = r.multiplier_estimates
    # kappa^2 = 4 x^2 = 4 sin(phi): alpha = 0, beta = 4
    assert alpha == pytest.approx(0.0, abs=1e-4)
    assert beta == pytest.approx(4.0, abs=1e-4)
    assert r.el_residual_norm < 1e-4
    a, b, res = estimate_multipliers(r.curve)
    assert (a, b) == pytest.approx((0.0, 4.0), abs=1e-3)
    assert res < 1e-3


def test_rectangular_certified(rectangular):
    cert = certify_minimizer(rectangular[2])
    assert cert.noether_deviation < 1e-8
    assert cert.smkdv_residual < 1e-4
    assert cert.smkdv_multiplier == pytest.approx(0.0, abs=1e-4)
    assert cert.passed


def test_energy_converges_at_second_order():
    # continuum bending energy of the rectangular elastica is 2 pi / F(1)
    f_one = quad(lambda t: 1 / np.sqrt((1 + t) * (1 + t * t)), 0, 1, weight="alg",
                 wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-13)[0]
    exact = 2 * np.pi / f_one
    bc, _ = rectangular_boundary()
    ns = (256, 512, 1024)
    err = np.array([minimize_elastica(bc, n).energy - exact for n in ns])
    scaled = err * np.array(ns, float) ** 2
    assert np.all(np.abs(err) < 1e-4)
    # error / h^2 tends to a nonzero constant: order exactly two
    assert scaled[1] == pytest.approx(scaled[2], rel=1e-3)
    assert err[1] / err[2] == pytest.approx(4.0, rel=1e-3)
    three_level = np.log2((err[0] - err[1]) / (err[1] - err[2]))
    assert three_level == pytest.approx(2.0, abs=1e-3)


def test_rigid_motion_equivariance():
    bc, _ = rectangular_boundary()
    r0 = minimize_elastica(bc, 512)
    theta, shift = 0.7, (2.0, -1.0)
    r1 = minimize_elastica(bc.transformed(theta, shift), 512)
    assert r1.energy == pytest.approx(r0.energy, abs=1e-10)
    moved = r0.curve.transformed(theta, shift)
    assert np.max(np.hypot(*(moved.points - r1.curve.points).T)) < 1e-9


def test_unclamped_arc_stays_arc():
    # free ends: the minimizer with only endpoint and length constraints
    r = minimize_elastica(BoundaryConditions((0, 0), (1, 0), 1.2), 256)
    assert r.converged
    k = node_curvature(r.angles, r.curve.ds)
    assert np.all(np.isfinite(k))
    cert = certify_minimizer(r)
    assert cert.noether_deviation < 1e-8


def test_estimate_multipliers_circle():
    c, n = 1.5, 400
    prof = CurvatureProfile(np.full(n, c), 2 * np.pi / c / n, periodic=True)
    curve = reconstruct_curve(prof)
    alpha, beta, res = estimate_multipliers(curve)
    # the SMKdV constant branch a = -c^2/2 corresponds to alpha = -2a
    assert alpha == pytest.approx(c * c, rel=1e-4)
    assert beta == pytest.approx(0.0, abs=1e-4)
    assert res < 1e-4


def test_estimate_multipliers_straight_line():
    pts = np.column_stack([np.linspace(0, 1, 50), np.zeros(50)])
    with pytest.raises(DegenerateFit):
        estimate_multipliers(PlanarCurve(pts, 1 / 49))


def test_fit_discriminates(rectangular):
    _, _, r = rectangular
    n = r.curve.n
    s = np.linspace(0, 2.6, n)
    k = 1.5 * np.sin(2.3 * s) + 0.8 * np.cos(5.1 * s)
    curve = reconstruct_curve(CurvatureProfile(k, s[1] - s[0]))
    _, _, res = estimate_multipliers(curve)
    assert res >= 100 * r.el_residual_norm


def test_rough_curve_rejected():
    rng = np.random.default_rng(0)
    h = 0.01
    theta = np.cumsum(rng.uniform(-1.0, 1.0, size=200))
    pts = np.vstack([[0, 0], np.cumsum(h * np.column_stack([np.cos(theta), np.sin(theta)]), axis=0)])
    curve = PlanarCurve(pts, h)
    with pytest.raises(ValueError, match="smooth"):
        estimate_multipliers(curve)


def test_max_iterations_reported():
    bc, _ = rectangular_boundary()
    r = minimize_elastica(bc, 256, max_iter=1)
    assert not r.converged
    assert "maximum" in r.message
    assert r.gradient_norm > 1e-8
