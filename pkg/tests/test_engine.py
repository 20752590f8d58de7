import numpy as np
import pytest

from bpgeom import (Ball, Ellipsoid, PerturbationSpec, bp_compare, build_cylinder_caps, build_perturbation,
                    counterexample_hyperbolic, counterexample_sphere, curvature_map, perturb_body,
                    positive_definiteness_report, scale_pair, scale_radius, section_volume, volume,
                    zvavitch_inequality)
from bpgeom.bodies import LqBall, Strictified
from bpgeom.engine import cap_function, cap_leakage, fourier_preimage
from bpgeom.errors import NegativityNotFound, ParameterOutOfRange, UnsupportedDimension
from bpgeom.measures import euclidean_section_area
from bpgeom.core import polar_directions
from bpgeom.quadrature import sample_directions

AXIS3 = np.array([1.0, 0.0, 0.0])


def test_cylinder_caps_radii():
    caps = build_cylinder_caps(3)
    assert caps.radial(np.array([[0.0, 1.0, 0.0]]))[0] == pytest.approx(np.sqrt(2) / 2, rel=1e-12)
    assert caps.radial(AXIS3[None])[0] == pytest.approx((np.sqrt(17) - 1) / 4, rel=1e-10)


def test_caps_become_flat_disks_at_two():
    caps = build_cylinder_caps(3, 0.5, 0.0)
    M = curvature_map(caps, -1)
    rim = caps.t0 / (0.5 - caps.t0 ** 2)
    assert rim == pytest.approx(2.0)
    phi = np.linspace(0, caps.rim_angle * 0.98, 50)
    rho = M.polar_profile(phi)
    assert np.allclose(rho * np.cos(phi), 2.0, atol=1e-10)


def test_ball_is_positive_definite_in_spherical_model():
    rep = positive_definiteness_report(Ball(3, 0.5), "s", grid=5)
    assert rep.min_value > 0


def test_cylinder_caps_negative_on_axis(caps3):
    rep = positive_definiteness_report(caps3, "h", angles=[0.0])
    assert rep.min_value <= -6.0


def test_positive_definiteness_needs_three_dimensions():
    with pytest.raises(UnsupportedDimension):
        positive_definiteness_report(Ball(2, 0.5), "s")


def test_zvavitch_examples():
    lhs, rhs = zvavitch_inequality(0.2, 0.8, 0, 3)
    assert lhs == pytest.approx(0.2 * (0.8 ** 2 - 0.2 ** 2) / 2, abs=1e-14)
    assert rhs == pytest.approx((0.8 ** 3 - 0.2 ** 3) / 3, abs=1e-14)
    assert zvavitch_inequality(0.4, 0.4, 1, 4) == (0.0, 0.0)
    with pytest.raises(ParameterOutOfRange):
        zvavitch_inequality(0.0, 0.5, 1, 3)


def test_zvavitch_spherical_sweep(rng):
    for _ in range(10_000):
        a, b = rng.uniform(1e-3, 1 - 1e-3, size=2)
        lhs, rhs = zvavitch_inequality(a, b, 1, int(rng.integers(3, 6)))
        assert lhs <= rhs + 1e-12


def test_compare_nested_balls():
    rep = bp_compare(Ball(3, 0.4), Ball(3, 0.5), "s", grid=16)
    assert np.all(rep.gaps < 0)
    assert rep.vol_K < rep.vol_L
    assert rep.verdict == "consistent"


def test_compare_identical_bodies():
    K = Ellipsoid((0.5, 0.4, 0.3))
    rep = bp_compare(K, K, "e", grid=16)
    assert np.all(rep.gaps == 0)
    assert rep.vol_K == rep.vol_L
    assert rep.verdict == "consistent"


def test_zero_epsilon_gives_same_body():
    L = Ellipsoid((0.5, 0.4, 0.4))
    K = perturb_body(L, "h", PerturbationSpec(AXIS3, epsilon=0.0))
    dirs = sample_directions(3, 100, seed=1)
    assert np.array_equal(K.radial(dirs), L.radial(dirs))


def test_cap_function_is_nonpositive_bump():
    pspec = PerturbationSpec(AXIS3, width=0.4)
    v = cap_function(pspec, 3)
    t = np.cos(np.linspace(0, np.pi, 2001))
    assert np.all(v.at_cos(t) <= 0)
    assert v.tail < 1e-8
    assert cap_leakage(v, pspec) < 0.05
    g = fourier_preimage(v)
    assert np.all(np.isfinite(g.coeffs))


@pytest.mark.parametrize("model,width,depth,eps", [("h", 0.3, 1.0, 0.1), ("e", 0.5, 2.0, 0.05),
                                                  ("s", 0.4, 0.5, 0.2)])
def test_section_shift_identity(model, width, depth, eps):
    L = Ellipsoid((0.5, 0.4, 0.4))
    pspec = PerturbationSpec(AXIS3, width=width, depth=depth, epsilon=eps)
    res = build_perturbation(L, model, pspec, certify=False)
    K = res.body
    n = 3
    for phi in np.linspace(0, np.pi / 2, 7):
        xi = polar_directions(AXIS3, [phi])[0]
        shift = section_volume(K, model, xi) - section_volume(L, model, xi)
        assert shift == pytest.approx(2 ** (n - 1) / np.pi * eps * res.v(xi[None])[0], abs=1e-6)


def test_hyperbolic_pipeline_rejects_plane():
    with pytest.raises(UnsupportedDimension, match="affirmative"):
        counterexample_hyperbolic(2)


@pytest.mark.slow
def test_hyperbolic_counterexample_3d(hyperbolic3):
    rep = hyperbolic3
    assert rep.verdict == "counterexample"
    assert rep.bp.max_section_gap <= 1e-8
    assert rep.bp.vol_K - rep.bp.vol_L >= 1e-6 * rep.bp.vol_L
    assert rep.convexity["K"].h_convex == "yes" and rep.convexity["L"].h_convex == "yes"
    assert rep.fourier_min < 0


@pytest.mark.slow
def test_hyperbolic_counterexample_4d(hyperbolic4):
    assert hyperbolic4.verdict == "counterexample"


def test_scale_radius():
    assert scale_radius(0.1, 5) == pytest.approx(np.sqrt(0.9 ** (-1 / 5) - 1), rel=1e-14)
    assert scale_radius(0.1, 5) == pytest.approx(0.14593, rel=1e-4)
    assert scale_radius(0.05, 5) < scale_radius(0.1, 5)


def test_scaled_volumes_within_bounds():
    K, L = Ellipsoid((0.9, 0.5, 0.5)), Ball(3, 0.7)
    eps = 0.1
    pair = scale_pair(K, L, eps)
    assert max(pair.K.rho_max, pair.L.rho_max) <= pair.radius * (1 + 1e-12)
    for body in (pair.K, pair.L):
        evol = volume(body, "e") / 2 ** 3
        vs = volume(body, "s")
        assert 2 ** 3 * (1 - eps) * evol <= vs <= 2 ** 3 * evol


@pytest.mark.slow
def test_sphere_pipeline():
    rep = counterexample_sphere()
    assert rep.verdict == "counterexample"
    assert rep.extra["euclidean_verdict"] == "counterexample"
    assert rep.extra["strict_verdict"] == "counterexample"
    assert rep.extra["dilation"] < 1
    assert max(rep.K.rho_max, rep.L.rho_max) <= rep.extra["scale_radius"] * (1 + 1e-12)
    assert rep.fourier_min < 0


def test_sphere_pipeline_fails_without_negativity():
    diag = np.ones(5) / np.sqrt(5)
    with pytest.raises(NegativityNotFound):
        counterexample_sphere(candidates=[diag])
