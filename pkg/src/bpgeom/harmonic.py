"""Spherical Radon transform and Fourier transforms of homogeneous even functions.

Two independent routes to ``(r^{-p} f(theta))^``:

* the multiplier route for zonal ``f``: a Gegenbauer coefficient of degree
  m is multiplied by
  ``lambda_{m,p,n} = (-1)^{m/2} pi^{n/2} 2^{n-p} Gamma((n-p+m)/2) / Gamma((p+m)/2)``;
* the section-derivative route for Minkowski-functional powers
  ``||x||^{-n+k+1}``, which reads the transform at xi off the parallel
  section function ``A_xi`` (even k: a derivative at 0; odd k: a
  regularized integral).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import special

from .bodies import RadialBody
from .core import CurvatureModel, as_direction, polar_directions, unit
from .errors import DegreeOverflow, UnsupportedDimension, UnsupportedOrder, ValidationError
from .measures import ProfileEvaluator, profile_derivative_at_zero, SectionProfile
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, adaptive_gk, radial_moment, sphere_area,
                         subsphere_nodes)
from .zonal import L_MAX, ZonalFunction

TAIL_LIMIT = 1e-8


@dataclass(frozen=True)
class HomogeneousSpec:
    """Degree ``-p`` of an even homogeneous function ``r^{-p} f(theta)`` on R^n."""

    p: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise UnsupportedDimension("n must be at least 2")
        if not 0 < self.p < self.n:
            raise ValidationError(f"need 0 < p < n, got p={self.p}, n={self.n}")


def spherical_radon(f, xi, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``Rf(xi)``: integral of ``f`` over the great subsphere orthogonal to ``xi``."""
    rule = subsphere_nodes(unit(np.asarray(xi, dtype=float)), spec)
    return rule.integrate(f(rule.nodes))


def multiplier(m, p: float, n: int) -> np.ndarray:
    """``lambda_{m,p,n}`` for even degrees ``m``."""
    m = np.asarray(m, dtype=float)
    sign = np.where((m // 2) % 2 == 0, 1.0, -1.0)
    logmag = (n / 2) * np.log(np.pi) + (n - p) * np.log(2.0) \
        + special.gammaln((n - p + m) / 2) - special.gammaln((p + m) / 2)
    return sign * np.exp(logmag)


def zonal_fourier(f: ZonalFunction, hspec: HomogeneousSpec) -> ZonalFunction:
    """Sphere restriction of ``(r^{-p} f)^``, itself of degree ``-(n - p)``."""
    if hspec.n != f.n:
        raise ValidationError("homogeneity spec and function disagree on n")
    if f.tail > TAIL_LIMIT:
        raise DegreeOverflow(f"input has mass beyond degree {f.lmax}: tail norm {f.tail:.3e}")
    return f.with_coeffs(f.coeffs * multiplier(f.degrees, hspec.p, hspec.n))


def _zonal_grid(axis, count: int = 33):
    return polar_directions(axis, np.linspace(0.0, np.pi / 2, count))


def radon_fourier_consistency(f: ZonalFunction, n: int | None = None, directions=None,
                              spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Max of ``|pi Rf(xi) - (r^{-n+1} f)^(xi)|`` over a direction grid."""
    n = f.n if n is None else n
    if n != f.n:
        raise ValidationError("dimension mismatch")
    dirs = _zonal_grid(f.axis) if directions is None else np.atleast_2d(directions)
    g = zonal_fourier(f, HomogeneousSpec(n - 1, n))
    radon = np.array([spherical_radon(f, d, spec) for d in dirs])
    return float(np.max(np.abs(np.pi * radon - g(dirs))))


# -- Minkowski-functional powers via parallel sections -----------------------

def _gks_constant(n: int, k: int) -> float:
    if k % 2 == 0:
        return (-1) ** (k // 2) * np.pi * (n - k - 1)
    return (-1) ** ((k + 1) // 2) * 2.0 * (n - 1 - k) * factorial(k)


def _stencil(ev: ProfileEvaluator, h: float) -> SectionProfile:
    zs = h * np.arange(-4, 5)
    half = ev(zs[4:])
    return SectionProfile(ev.xi, zs, np.concatenate([half[:0:-1], half]), ev.z_max)


def fourier_minkowski_power(body: RadialBody, k: int, xi, spec: QuadratureSpec = QuadratureSpec(32),
                            h: float | None = None, tol: float = 1e-9, details: bool = False,
                            strict: bool = True, rtol: float = 1e-8):
    """``(||x||_K^{-n+k+1})^(xi)`` from the parallel section function along ``xi``.

    Even k uses ``(-1)^{k/2} pi (n-k-1) A^{(k)}(0)``. Odd k uses
    ``(-1)^{(k+1)/2} 2 (n-1-k) k! int_0^inf (A(z) - T(z)) / z^{k+1} dz``
    with T the Taylor polynomial of A of degree k at 0. The integral is
    split at ``z_c`` (small z, where a two-term expansion of the integrand
    replaces the cancelling difference), at ``z_max`` (beyond which A = 0
    and the remaining power integrals are done in closed form).

    ``strict=False`` lets the profile handle slices that are not
    star-shaped about their centre (see :class:`ProfileEvaluator`).
    """
    n = body.n
    if n < 3:
        raise UnsupportedDimension("needs n >= 3")
    if k < 1 or k > 3 or k == n - 1:
        raise UnsupportedOrder(f"k must be in 1..3 and differ from n - 1 = {n - 1}")
    ev = ProfileEvaluator(body, xi, spec, strict)
    z_max = ev.z_max
    step = 0.01 * z_max if h is None else h
    prof = _stencil(ev, step)
    const = _gks_constant(n, k)
    if k % 2 == 0:
        d = profile_derivative_at_zero(prof, k)
        val = const * d
        info = {"A_k": d, "z_max": z_max, "h": step}
        return (val, info) if details else val
    taylor = {j: profile_derivative_at_zero(prof, j) / factorial(j) for j in range(0, k + 1, 2)}
    lead = profile_derivative_at_zero(prof, k + 1) / factorial(k + 1)

    def integrand(z):
        z = np.asarray(z, dtype=float)
        poly = sum(c * z ** j for j, c in taylor.items())
        return (ev(z) - poly) / z ** (k + 1)

    z_c = (0.02 if k == 1 else 0.1) * z_max
    i_c = float(integrand(np.array([z_c]))[0])
    h2 = (i_c - lead) / z_c ** 2
    near = lead * z_c + h2 * z_c ** 3 / 3.0
    mid, err = adaptive_gk(integrand, z_c, z_max, tol=tol, max_depth=40, rtol=rtol, max_panels=2048)
    tail = -sum(c * z_max ** (j - k) / (k - j) for j, c in taylor.items())
    total = near + mid + tail
    val = const * total
    info = {"near": near, "middle": mid, "tail": tail, "error": err, "z_max": z_max,
            "taylor": {str(j): c for j, c in taylor.items()}, "h": step}
    return (val, info) if details else val


def fourier_minkowski_power_multiplier(body: RadialBody, xi, lmax: int = L_MAX) -> float:
    """``(||x||_K^{-1})^(xi)`` through the multiplier route (zonal bodies)."""
    if body.axis is None:
        raise ValidationError("multiplier route needs a zonal body")
    f = ZonalFunction.project(lambda t: body.polar_profile(np.arccos(t)), body.axis, body.n, lmax)
    g = zonal_fourier(f, HomogeneousSpec(1, body.n))
    return float(g(unit(np.asarray(xi, dtype=float))[None])[0])


def _section_moment_function(body: RadialBody, delta: int, xi, spec: QuadratureSpec) -> ZonalFunction:
    """``G = W(rho)`` as a zonal series, about the body axis or averaged about ``xi``."""
    n = body.n
    if body.axis is not None:
        return ZonalFunction.project(
            lambda t: radial_moment(body.polar_profile(np.arccos(t)), n, delta, "section"),
            body.axis, n, L_MAX)
    rule = subsphere_nodes(xi, spec)
    area = sphere_area(n - 1)

    def average(t):
        s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
        pts = t[:, None, None] * xi + s[:, None, None] * rule.nodes[None]
        vals = radial_moment(body.radial(pts), n, delta, "section")
        return vals @ rule.weights / area

    return ZonalFunction.project(average, xi, n, L_MAX)


def section_volume_via_fourier(body: RadialBody, model, xi, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Central section volume as ``2^{n-1} / pi * (r^{-n+1} G)^(xi)``."""
    n = body.n
    if n < 3:
        raise UnsupportedDimension("the Fourier route needs n >= 3")
    delta = CurvatureModel.from_flag(model).delta
    xi = as_direction(xi, n, tol=1e-9)
    G = _section_moment_function(body, delta, xi, spec)
    g = zonal_fourier(G, HomogeneousSpec(n - 1, n))
    return float(2.0 ** (n - 1) / np.pi * g(xi[None])[0])


def parseval_pairing(K: RadialBody, L: RadialBody, p: int = 1, nodes: int = 16,
                     spec: QuadratureSpec = QuadratureSpec(32)) -> tuple[float, float]:
    """Both sides of ``int (||x||_K^{-1})^ (||x||_L^{-n+1})^ = (2 pi)^n int rho_K rho_L^{n-1}``.

    The left side pairs the section-derivative transform of K with the
    multiplier transform of ``rho_L^{n-1}`` on a Gauss-Gegenbauer rule in
    the polar angle (``nodes`` points, symmetric, so only half are
    evaluated). The right side is a direct quadrature.
    """
    if p != 1:
        raise ValidationError("only p = 1 is supported")
    n = K.n
    if L.n != n or n not in (3, 4):
        raise UnsupportedDimension("parseval_pairing needs n in {3, 4} for both bodies")
    if K.axis is None or L.axis is None or abs(abs(np.dot(K.axis, L.axis)) - 1) > 1e-12:
        raise ValidationError("both bodies must be zonal about a common axis")
    axis = K.axis
    lam = (n - 2) / 2.0
    t, w = special.roots_gegenbauer(nodes, lam)
    w = w * sphere_area(n - 1)
    half = t >= 0
    phi = np.arccos(t[half])
    dirs = polar_directions(axis, phi)
    fk = np.array([fourier_minkowski_power(K, n - 2, d, spec) for d in dirs])
    fL = ZonalFunction.project(lambda s: L.polar_profile(np.arccos(s)) ** (n - 1), axis, n, L_MAX)
    gL = zonal_fourier(fL, HomogeneousSpec(n - 1, n))(dirs)
    # nodes come in +-t pairs with equal weights (no node at t = 0 for even counts)
    mult = np.where(np.abs(t[half]) < 1e-15, 1.0, 2.0)
    lhs = float(np.sum(mult * w[half] * fk * gL))
    t2, w2 = special.roots_gegenbauer(128, lam)
    rhs_t = K.polar_profile(np.arccos(t2)) * L.polar_profile(np.arccos(t2)) ** (n - 1)
    rhs = float((2 * np.pi) ** n * sphere_area(n - 1) * np.dot(w2, rhs_t))
    return lhs, rhs
