"""Acceptance checks, one test group per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import numpy as np
import pytest

from bpgeom import (Ball, Ellipsoid, GeodesicSpec, ZonalFunction, ZonalTable, bp_compare, classify_convexity,
                    counterexample_hyperbolic, counterexample_sphere, fourier_minkowski_power,
                    geodesic_point, parseval_pairing, positive_definiteness_report,
                    radon_fourier_consistency, scale_pair, scale_radius, section_volume,
                    section_volume_via_fourier, volume, zvavitch_inequality)
from bpgeom.errors import NegativityNotFound
from bpgeom.geometry import ConvexitySpec
from bpgeom.measures import profile_derivative_at_zero, stencil_profile
from bpgeom.core import polar_directions

PI = np.pi
criterion = pytest.mark.criterion


def axis(n):
    return np.eye(n)[0]


def rel(a, b):
    return abs(a - b) / abs(b)


# 1 -------------------------------------------------------------------------

@criterion(1, "closed-form volumes")
def test_closed_form_volumes():
    assert rel(volume(Ball(3, 1.0), "e"), 32 * PI / 3) < 1e-8
    assert abs(volume(Ball(2, 1 - 1e-9), "s") - 2 * PI) < 1e-5
    assert rel(volume(Ball(2, np.tanh(0.5)), "h"), 2 * PI * (np.cosh(1) - 1)) < 1e-8


# 2 -------------------------------------------------------------------------

@criterion(2, "closed-form sections")
def test_closed_form_sections():
    assert rel(section_volume(Ball(3, 0.5), "h", axis(3)), 4 * PI / 3) < 1e-8
    assert rel(section_volume(Ball(3, 1.0), "e", axis(3)), 4 * PI) < 1e-8


# 3 -------------------------------------------------------------------------

@criterion(3, "section-derivative Fourier oracles")
def test_fourier_oracles(M4):
    assert rel(fourier_minkowski_power(Ball(3, 1.0), 1, axis(3)), 4 * PI) < 1e-4
    assert rel(fourier_minkowski_power(Ball(4, 1.0), 2, axis(4)), 4 * PI ** 2) < 1e-4
    assert rel(fourier_minkowski_power(M4, 2, axis(4)), -8 * np.sqrt(2) * PI ** 2) < 1e-2
    a2 = profile_derivative_at_zero(stencil_profile(M4, axis(4)), 2)
    assert rel(a2, 8 * np.sqrt(2) * PI) < 1e-3


# 4 -------------------------------------------------------------------------

@criterion(4, "spherical Radon versus multiplier transform")
@pytest.mark.parametrize("n", [3, 4, 5])
def test_radon_multiplier_consistency(n):
    rng = np.random.default_rng(100 + n)
    worst = 0.0
    for _ in range(20):
        degree = 2 * int(rng.integers(0, 7))
        coeffs = rng.uniform(-1, 1, size=degree // 2 + 1)
        f = ZonalFunction(rng.normal(size=n), n, coeffs)
        worst = max(worst, radon_fourier_consistency(f))
    assert worst < 1e-6


# 5 -------------------------------------------------------------------------

@criterion(5, "direct and Fourier section volumes agree")
@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("model", ["h", "e", "s"])
def test_section_cross_path(n, model):
    bodies = [Ball(n, 0.5), Ball(n, 0.8), Ellipsoid((0.6,) + (0.35,) * (n - 1)),
              Ellipsoid((0.3,) + (0.55,) * (n - 1))]
    for body in bodies:
        for phi in (0.0, 0.6, 1.2, PI / 2):
            xi = polar_directions(axis(n), [phi])[0]
            direct = section_volume(body, model, xi)
            assert rel(section_volume_via_fourier(body, model, xi), direct) < 1e-4


# 6 -------------------------------------------------------------------------

@criterion(6, "Parseval pairing")
def test_parseval():
    lhs, rhs = parseval_pairing(Ball(3, 1.0), Ball(3, 1.0))
    assert rel(lhs, 32 * PI ** 4) < 1e-4 and rel(rhs, 32 * PI ** 4) < 1e-4
    rng = np.random.default_rng(6)
    for n in (3, 4):
        for _ in range(3):
            a, b = rng.uniform(0.3, 0.9, size=2), rng.uniform(0.3, 0.9, size=2)
            K = Ellipsoid((a[0],) + (a[1],) * (n - 1))
            L = Ellipsoid((b[0],) + (b[1],) * (n - 1))
            lhs, rhs = parseval_pairing(K, L)
            assert rel(lhs, rhs) < 5e-3


# 7 -------------------------------------------------------------------------

@criterion(7, "negative Fourier value of the auxiliary body in R^3")
def test_negativity_bound(M3):
    assert fourier_minkowski_power(M3, 1, axis(3)) <= -6.0


# 8 -------------------------------------------------------------------------

def _check_hyperbolic(rep):
    assert rep.verdict == "counterexample"
    assert rep.bp.max_section_gap <= 1e-8
    assert rep.bp.vol_K - rep.bp.vol_L >= 1e-6 * rep.bp.vol_L
    assert rep.convexity["K"].h_convex == "yes"
    assert rep.convexity["L"].h_convex == "yes"


@criterion(8, "hyperbolic counterexamples in R^3 and R^4")
@pytest.mark.slow
def test_hyperbolic_counterexamples(hyperbolic3, hyperbolic4):
    _check_hyperbolic(hyperbolic3)
    _check_hyperbolic(hyperbolic4)


@criterion(8, "hyperbolic counterexamples in R^3 and R^4")
@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4])
def test_hyperbolic_stability(n):
    _check_hyperbolic(counterexample_hyperbolic(n, grid=256))
    _check_hyperbolic(counterexample_hyperbolic(n, eta=0.01))


# 9 -------------------------------------------------------------------------

def _random_s_convex(rng, n, scale=1.0):
    spec = ConvexitySpec(pairs=500)
    while True:
        if rng.random() < 0.5:
            a, b = rng.uniform(0.15, 0.6, size=2) * scale
            body = Ellipsoid((a,) + (b,) * (n - 1))
        else:
            ang = np.linspace(0, PI, 13)
            r0, amp = rng.uniform(0.2, 0.5) * scale, rng.uniform(-0.01, 0.01)
            body = ZonalTable(n, tuple(axis(n)), tuple(ang), tuple(r0 * (1 + amp * np.cos(4 * ang))))
        if classify_convexity(body, spec, models=(1,)).s_convex == "yes":
            return body


@criterion(9, "spherical affirmative machinery")
@pytest.mark.slow
def test_spherical_positive_definite():
    rng = np.random.default_rng(9)
    worst = np.inf
    for i in range(20):
        body = _random_s_convex(rng, 3 + i % 2)
        worst = min(worst, positive_definiteness_report(body, "s", grid=5).min_value)
    assert worst >= -1e-4


@criterion(9, "spherical affirmative machinery")
def test_spherical_nested_pairs():
    rng = np.random.default_rng(19)
    spec = ConvexitySpec(pairs=500)
    for i in range(20):
        n = 3 + i % 2
        L = _random_s_convex(rng, n)
        a = L.polar_profile(np.array([0.0, PI / 2]))
        while True:
            f = rng.uniform(0.6, 1.0, size=2)
            K = Ellipsoid((a.min() * f[0],) + (a.min() * f[1],) * (n - 1))
            if classify_convexity(K, spec, models=(1,)).s_convex == "yes":
                break
        assert np.all(K.polar_profile(np.linspace(0, PI / 2, 200)) <= L.polar_profile(np.linspace(0, PI / 2, 200)))
        assert bp_compare(K, L, "s", grid=32).verdict == "consistent"


# 10 ------------------------------------------------------------------------

@criterion(10, "elementary monotonicity inequality")
def test_zvavitch():
    rng = np.random.default_rng(10)
    for _ in range(10_000):
        a, b = rng.uniform(1e-3, 1 - 1e-3, size=2)
        lhs, rhs = zvavitch_inequality(a, b, int(rng.integers(-1, 2)), int(rng.integers(3, 6)))
        assert lhs <= rhs + 1e-12
    lhs, rhs = zvavitch_inequality(0.2, 0.8, 0, 3)
    assert abs(lhs - 0.06) < 1e-12 and abs(rhs - 0.168) < 1e-12


# 11 ------------------------------------------------------------------------

@criterion(11, "Euclidean-to-spherical transfer")
@pytest.mark.slow
def test_sphere_transfer():
    assert rel(scale_radius(0.1, 5), np.sqrt(0.9 ** -0.2 - 1)) < 1e-10
    assert abs(scale_radius(0.1, 5) - 0.14593) < 5e-6
    try:
        rep = counterexample_sphere()
    except NegativityNotFound:
        pytest.fail("negativity of the base body was not found numerically")
    assert rep.extra["euclidean_verdict"] == "counterexample"
    assert rep.extra["strict_verdict"] == "counterexample"
    assert rep.bp.verdict == "counterexample"
    assert rep.verdict == "counterexample"


@criterion(11, "Euclidean-to-spherical transfer")
def test_sphere_transfer_fails_loudly():
    with pytest.raises(NegativityNotFound):
        counterexample_sphere(candidates=[np.ones(5) / np.sqrt(5)])


# 12 ------------------------------------------------------------------------

@criterion(12, "geometry properties")
def test_geodesics_become_lines():
    p, q = np.array([1.25 + 0.75 * np.cos(2.5), 0.75 * np.sin(2.5)]), \
        np.array([1.25 + 0.75 * np.cos(3.6), 0.75 * np.sin(3.6)])
    h = geodesic_point(GeodesicSpec(p, q, -1), np.linspace(0, 1, 33))
    r2 = np.sum(h * h, axis=1)
    assert np.max(np.abs(h[:, 0] / (1 + r2) - 0.4)) < 1e-10
    R = np.sqrt(1.25 ** 2 + 1)
    p, q = np.array([-1.25 + R * np.cos(-0.5), R * np.sin(-0.5)]), np.array([-1.25 + R * np.cos(0.5), R * np.sin(0.5)])
    s = geodesic_point(GeodesicSpec(p, q, 1), np.linspace(0, 1, 33))
    r2 = np.sum(s * s, axis=1)
    assert np.max(np.abs(s[:, 0] / (1 - r2) - 0.4)) < 1e-10


@criterion(12, "geometry properties")
def test_implication_chain_on_certified_samples(caps3):
    rng = np.random.default_rng(12)
    spec = ConvexitySpec(pairs=400, points=32)
    bodies = [Ball(3, 0.5), caps3] + [Ellipsoid(tuple(rng.uniform(0.15, 0.85, 3))) for _ in range(30)]
    for body in bodies:
        v = classify_convexity(body, spec)
        if v.s_convex == "yes":
            assert v.e_convex in ("yes", "boundary")
        if v.e_convex == "yes":
            assert v.h_convex in ("yes", "boundary")


@criterion(12, "geometry properties")
def test_cylinder_caps_classification(caps3):
    v = classify_convexity(caps3)
    assert v.e_convex == "yes" and v.h_convex == "yes" and v.s_convex == "no"
    assert v.witness is not None and v.witness["model"] == "s"
