import json

import numpy as np
from hypothesis import given, settings, strategies as st

from bpgeom import (Ball, Ellipsoid, GeodesicSpec, HomogeneousSpec, LqBall, ZonalFunction, body_from_spec,
                    geodesic_point, radon_fourier_consistency, section_volume, volume, zonal_fourier,
                    zvavitch_inequality)
from bpgeom.bodies import CylinderCaps, Mapped, Scaled, Strictified, ZonalTable
from bpgeom.engine import scale_radius
from bpgeom.quadrature import QuadratureSpec, radial_moment, radial_moment_inverse, sample_directions
from bpgeom.report import canonical_json

FAST = QuadratureSpec(24)
radius = st.floats(0.1, 0.9)


@st.composite
def bodies(draw, n=None):
    n = draw(st.integers(3, 5)) if n is None else n
    kind = draw(st.sampled_from(["ball", "ellipsoid", "caps", "table", "lq", "strict"]))
    if kind == "ball":
        return Ball(n, draw(radius))
    if kind == "ellipsoid":
        return Ellipsoid(tuple(draw(st.lists(radius, min_size=n, max_size=n))))
    if kind == "caps":
        return CylinderCaps(n, draw(st.floats(0.3, 0.6)), draw(st.floats(0.005, 0.05)))
    if kind == "table":
        half = draw(st.lists(radius, min_size=3, max_size=6))
        radii = half + half[-2::-1]
        return ZonalTable(n, tuple(np.eye(n)[0]), tuple(np.linspace(0, np.pi, len(radii))), tuple(radii))
    if kind == "lq":
        return LqBall(n, draw(st.floats(1.5, 6.0)), draw(radius))
    return Strictified(Ellipsoid(tuple(draw(st.lists(radius, min_size=n, max_size=n)))), draw(st.floats(0, 0.5)))


@settings(max_examples=40, deadline=None)
@given(bodies(), st.integers(0, 10_000))
def test_radial_function_is_even(body, seed):
    dirs = sample_directions(body.n, 1000, seed)
    assert np.allclose(body.radial(dirs), body.radial(-dirs), rtol=1e-12, atol=0)


@settings(max_examples=30, deadline=None)
@given(bodies(), st.sampled_from([1, -1]), st.integers(0, 1000))
def test_mapped_is_pointwise(body, sigma, seed):
    if sigma == -1 and body.rho_max >= 1:
        return
    dirs = sample_directions(body.n, 200, seed)
    r = body.radial(dirs)
    assert np.allclose(Mapped(body, sigma).radial(dirs), r / (1 + sigma * r * r), rtol=1e-12, atol=0)


@settings(max_examples=25, deadline=None)
@given(bodies(n=3), st.floats(0.5, 0.99))
def test_shrinking_decreases_measures(body, factor):
    if body.rho_max >= 1 - 1e-6:
        return
    small = Scaled(body, factor)
    xi = np.array([0.6, 0.8, 0.0])
    for model in ("h", "e", "s"):
        assert volume(small, model, FAST) <= volume(body, model, FAST)
        assert section_volume(small, model, xi, FAST) <= section_volume(body, model, xi, FAST)


@settings(max_examples=25, deadline=None)
@given(bodies(n=3))
def test_volume_ordering_across_models(body):
    if body.rho_max >= 1 - 1e-6:
        return
    assert volume(body, "s", FAST) <= volume(body, "e", FAST) <= volume(body, "h", FAST)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 0.999), st.integers(2, 5), st.sampled_from([-1, 0, 1]),
       st.sampled_from(["volume", "section"]))
def test_moment_inverse_round_trip(rho, n, delta, kind):
    w = radial_moment(rho, n, delta, kind)
    assert abs(radial_moment_inverse(w, n, delta, kind) - rho) <= 1e-11 * rho


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 0.999), st.floats(1e-3, 0.999), st.sampled_from([-1, 0, 1]), st.integers(3, 5))
def test_zvavitch_inequality(a, b, delta, n):
    lhs, rhs = zvavitch_inequality(a, b, delta, n)
    assert lhs <= rhs + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 5), st.lists(st.floats(-1, 1), min_size=1, max_size=7), st.integers(0, 1000))
def test_radon_and_multiplier_agree(n, coeffs, seed):
    axis = sample_directions(n, 1, seed)[0]
    f = ZonalFunction(axis, n, coeffs)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    assert radon_fourier_consistency(f) < 1e-6 * scale


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 5), st.lists(st.floats(-1, 1), min_size=1, max_size=7),
       st.lists(st.floats(-1, 1), min_size=1, max_size=7), st.floats(-3, 3))
def test_fourier_is_linear(n, a, b, c):
    m = max(len(a), len(b))
    a, b = np.pad(a, (0, m - len(a))), np.pad(b, (0, m - len(b)))
    axis = np.eye(n)[0]
    hs = HomogeneousSpec(n - 1, n)
    lhs = zonal_fourier(ZonalFunction(axis, n, a + c * b), hs).coeffs
    rhs = zonal_fourier(ZonalFunction(axis, n, a), hs).coeffs + c * zonal_fourier(ZonalFunction(axis, n, b), hs).coeffs
    size = np.abs(zonal_fourier(ZonalFunction(axis, n, np.abs(a) + abs(c) * np.abs(b)), hs).coeffs)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * size + 1e-300)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-0.55, 0.55), min_size=6, max_size=6), st.sampled_from([-1, 0, 1]))
def test_geodesics_stay_in_model(coords, delta):
    p, q = np.array(coords[:3]), np.array(coords[3:])
    if delta == 1 and np.linalg.norm(p + q) < 1e-6:
        return
    spec = GeodesicSpec(p, q, delta)
    pts = geodesic_point(spec, np.linspace(0, 1, 9))
    assert np.array_equal(pts[0], p) and np.array_equal(pts[-1], q)
    assert np.all(np.linalg.norm(pts, axis=1) < 1)


@settings(max_examples=40, deadline=None)
@given(bodies())
def test_body_spec_round_trip_is_idempotent(body):
    once = json.loads(canonical_json(body.to_spec()))
    twice = json.loads(canonical_json(body_from_spec(once).to_spec()))
    assert once == twice


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 0.5), st.floats(1e-6, 0.5), st.integers(2, 5))
def test_scale_radius_monotone(e1, e2, n):
    if e1 < e2:
        assert scale_radius(e1, n) < scale_radius(e2, n)
