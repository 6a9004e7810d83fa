import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from elastica_kit.quadrature import (
    DomainError, ElasticaParams, admissible_intervals, classify_species,
    elastica_integrals, elastica_period, euler_mn_to_alpha_beta,
    euler_normalized_trace, lemniscate_addition, lemniscatic_integral,
    normalize_params, pendulum_modulus, smkdv_multiplier, species_thresholds,
    turning_points,
)


def test_circle_trace():
    p = ElasticaParams(0.0, 1.0, 0.0, 1.0)
    tr = elastica_integrals(p, 0.0, 0.999, 500)
    c = np.mean(tr.y + np.sqrt(1 - tr.x**2))
    dev = np.abs(tr.x**2 + (tr.y - c) ** 2 - 1)
    assert np.max(dev) < 1e-8
    assert c == pytest.approx(1.0, abs=1e-12)


def test_circle_up_to_turning_point():
    p = ElasticaParams(0.0, 1.0, 0.0, 1.0)
    tr = elastica_integrals(p, 0.0, 1.0, 300)
    assert tr.s[-1] == pytest.approx(np.pi / 2, abs=1e-12)
    assert tr.y[-1] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("scale", [1.0, 1.3])
def test_rectangular_arclength_against_quad(scale):
    a2 = scale**2
    p = ElasticaParams(0.0, 0.0, 1.0, a2)
    tr = elastica_integrals(p, 0.0, scale, 200)
    for i in (50, 120, 199):
        want = quad(lambda x: a2 / np.sqrt(a2**2 - x**4), 0, tr.x[i], epsabs=1e-13)[0]
        assert tr.s[i] == pytest.approx(want, abs=1e-9)
    want_y = quad(lambda x: x * x / np.sqrt(a2**2 - x**4), 0, scale, epsabs=1e-13)[0]
    assert tr.y[-1] == pytest.approx(want_y, abs=1e-9)


def test_rectangular_length_is_lemniscate_constant():
    tr = elastica_integrals(ElasticaParams(0, 0, 1, 1), -1, 1, 400)
    assert tr.length == pytest.approx(2 * lemniscatic_integral(1.0), abs=1e-12)


def test_empty_interval():
    tr = elastica_integrals(ElasticaParams(0, 1, 0, 1), 0.3, 0.3, 10)
    assert np.all(tr.s == 0) and np.all(tr.y == 0)


def test_trace_monotone_and_slope_bounded():
    p = ElasticaParams(0.2, -0.4, 0.7, 1.1)
    lo, hi = [iv for iv in admissible_intervals(p) if np.isfinite(iv).all()][0]
    tr = elastica_integrals(p, lo, hi, 400)
    assert np.all(np.diff(tr.s) > 0)
    dyds = np.diff(tr.y) / np.diff(tr.s)
    assert np.all(np.abs(dyds) <= 1)


def test_interval_exiting_domain_rejected():
    p = ElasticaParams(0, 1, 0, 1)
    with pytest.raises(DomainError) as err:
        elastica_integrals(p, 0.0, 1.5, 10)
    assert err.value.x == 1.5
    # both ends admissible, but the gap 0.5 > x^2 lies between them
    with pytest.raises(DomainError) as err:
        elastica_integrals(ElasticaParams(-1.5, 0, 1, 1), -1.2, 1.2, 10)
    assert err.value.x == pytest.approx(-np.sqrt(0.5))
    with pytest.raises(DomainError):
        elastica_integrals(ElasticaParams(0.5, 0, -1, 1), -1.5, 1.5, 10)


def test_invalid_params():
    with pytest.raises(ValueError):
        ElasticaParams(0, 0, 0, 0)
    with pytest.raises(ValueError):
        ElasticaParams(2, 0, 1, 1)


def test_step_pythagoras_third_order():
    p = ElasticaParams(0.1, 0.3, 0.5, 1.0)
    errs = []
    for n in (200, 400):
        tr = elastica_integrals(p, -0.5, 0.5, n, spacing="uniform")
        d = np.diff(tr.s) ** 2 - np.diff(tr.x) ** 2 - np.diff(tr.y) ** 2
        errs.append(np.max(np.abs(d)))
    assert errs[0] / errs[1] > 7  # O(dx^3) per step


def test_turning_points_examples():
    assert turning_points(ElasticaParams(0, 1, 0, 1)) == pytest.approx([-1, 1])
    assert turning_points(ElasticaParams(0, 0, 1, 1)) == pytest.approx([-1, 1])
    assert turning_points(ElasticaParams(0.5, 0, 0, 1)) == []


@settings(max_examples=60, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-2, 2).filter(lambda v: v == 0 or abs(v) > 1e-3), st.floats(0.2, 2))
def test_turning_point_residuals(al, be, ga, a):
    try:
        p = ElasticaParams(al, be, ga, a)
    except ValueError:
        return
    for r in turning_points(p):
        assert abs(p.g(r) ** 2 - a * a) < 1e-10 * max(1.0, r * r)


def test_euler_trace_flat_point():
    nt = euler_normalized_trace(1.0, 2.0, 0.0, 1.5, 301, spacing="uniform")
    i = np.argmin(np.abs(nt.trace.x - 1.0))
    assert nt.trace.x[i] == pytest.approx(1.0)
    assert abs(nt.trace.slope[i]) < 1e-14


def test_euler_turning_points():
    from elastica_kit.quadrature import euler_general_params
    p = euler_general_params(1.0, 2.0)
    tps = turning_points(p)
    assert tps == pytest.approx([-np.sqrt(3), np.sqrt(3)], abs=1e-12)
    for r in tps:
        assert p.radicand(r - 1e-6) * p.radicand(r + 1e-6) < 0


def test_euler_trace_slope_consistency():
    nt = euler_normalized_trace(1.0, 2.0, 0.0, 1.5, 20001, spacing="uniform")
    tr = nt.trace
    dyds = (tr.y[2:] - tr.y[:-2]) / (tr.s[2:] - tr.s[:-2])
    p = tr.slope[1:-1]
    assert np.max(np.abs(dyds - p / np.sqrt(1 + p * p))) < 1e-8


def test_euler_trace_matches_general_after_shift():
    general = ElasticaParams(1.0, 2.0, 3.0, 20.0)
    alpha, beta, shift, mirrored = normalize_params(general)
    assert not mirrored
    x0, x1 = -1.5, 1.2
    tr = elastica_integrals(general, x0, x1, 400)
    nt = euler_normalized_trace(alpha, beta, x0 - shift, x1 - shift, 400)
    assert np.max(np.abs(nt.trace.s - tr.s)) < 1e-9
    assert np.max(np.abs(nt.trace.y - tr.y)) < 1e-9
    assert np.max(np.abs(nt.trace.x + shift - tr.x)) < 1e-12
    assert nt.shift == 0.0


def test_euler_trace_empty_domain_rejected():
    with pytest.raises(DomainError):
        euler_normalized_trace(1.0, 2.0, 1.0, 2.0, 10)


def test_mn_conversion():
    assert euler_mn_to_alpha_beta(1.0, 2.0, 2.0) == (1.0, 2.0)


def test_lemniscatic_values():
    assert lemniscatic_integral(0.0) == 0.0
    oracle = quad(lambda t: 1 / np.sqrt(1 - t**4), 0, 1, epsabs=1e-14, limit=200)[0]
    assert lemniscatic_integral(1.0) == pytest.approx(oracle, abs=1e-9)
    assert lemniscatic_integral(1.0) == pytest.approx(1.3110287771, abs=1e-9)
    with pytest.raises(ValueError):
        lemniscatic_integral(1.01)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1))
def test_lemniscatic_odd(w):
    assert lemniscatic_integral(-w) == -lemniscatic_integral(w)


def test_lemniscatic_addition_law():
    rng = np.random.default_rng(7)
    F1 = lemniscatic_integral(1.0)
    done = 0
    while done < 100:
        u, z = rng.uniform(-1, 1, 2)
        if abs(lemniscatic_integral(u) + lemniscatic_integral(z)) > F1:
            continue
        w = lemniscate_addition(u, z)
        err = lemniscatic_integral(w) - lemniscatic_integral(u) - lemniscatic_integral(z)
        assert abs(err) < 1e-10
        done += 1


def test_species_examples():
    assert classify_species(ElasticaParams(0.2, 1.0, 0.0, 1.0)).tag == "circle"
    assert classify_species(ElasticaParams(0.2, 0.0, 0.0, 1.0)).tag == "straight-line"
    rect = classify_species(ElasticaParams(0, 0, 1, 1))
    assert rect.tag == "rectangular"
    assert rect.modulus == pytest.approx(np.sqrt(0.5))
    # kappa = 2 sech(s) obeys kappa^2 = 2 + 2 sin(phi): c = |b| = 2
    sol = ElasticaParams(-1.0, 0.0, 0.5, 1.0)
    assert classify_species(sol).tag == "solitary"
    assert smkdv_multiplier(sol) == pytest.approx(-1.0)


def test_species_thresholds():
    from scipy.special import ellipe, ellipk
    k_rect, k_lem = species_thresholds()
    assert k_rect == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert 2 * ellipe(k_lem**2) == pytest.approx(ellipk(k_lem**2), abs=1e-10)


def _params_with_modulus(k):
    # gamma = 1/4, a = 1 gives b = 1 and c = 2k^2 - 1 = -4 alpha gamma
    return ElasticaParams(-(2 * k * k - 1), 0.0, 0.25, 1.0)


@pytest.mark.parametrize("k,tag", [(0.05, "sinusoidal-small-amplitude"), (0.5, "inflectional"),
                                   (0.95, "inflectional"), (1.5, "non-inflectional")])
def test_species_families(k, tag):
    lab = classify_species(_params_with_modulus(k))
    assert lab.tag == tag
    assert 0 <= lab.modulus <= 1


def test_lemniscoid():
    _, k_lem = species_thresholds()
    assert classify_species(_params_with_modulus(k_lem)).tag == "lemniscoid"


@settings(max_examples=60, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 2),
       st.floats(0.1, 10))
def test_species_stable_under_flip_and_scale(al, be, ga, a, scale):
    try:
        p = ElasticaParams(al, be, ga, a)
    except ValueError:
        return
    lab = classify_species(p)
    for q in (p.flipped(), p.scaled(scale), p.flipped().scaled(scale)):
        other = classify_species(q)
        assert other.tag == lab.tag
        assert other.modulus == pytest.approx(lab.modulus, rel=1e-9, abs=1e-12)
    assert 0 <= lab.modulus <= 1
    if ga != 0:
        assert pendulum_modulus(p) >= 0


def test_period_returns_to_start_x():
    tr = elastica_period(ElasticaParams(0, 0, 1, 1), 200)
    assert tr.x[0] == pytest.approx(tr.x[-1])
    assert tr.length == pytest.approx(4 * lemniscatic_integral(1.0), abs=1e-12)
