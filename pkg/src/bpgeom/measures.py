"""Volumes, central-section volumes and Euclidean parallel-section profiles.

Model volumes use the polar formula

    vol(K) = 2^n int_{S^{n-1}} int_0^{rho(theta)} r^{n-1} / (1 + delta r^2)^n dr dtheta

and central sections the same with ``n`` lowered by one on the great
subsphere ``xi^perp``. Radial integrals are evaluated in closed form
(:func:`bpgeom.quadrature.radial_moment`), directions by the sphere rules.
Zonal bodies go through one-dimensional polar-angle rules instead of the
full product rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .bodies import RadialBody
from .core import MODEL_MARGIN, CurvatureModel, as_direction, basis_vector, unit
from .errors import InsufficientStencil, ModelDomainError, NotStarShapedFromOffset, ValidationError
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, sample_directions, sphere_area, sphere_nodes,
                         subsphere_nodes, zonal_nodes, radial_moment)


def _model(model) -> CurvatureModel:
    return CurvatureModel.from_flag(model)


def _in_model(rho, delta: int):
    if delta != 0:
        rmax = float(np.max(rho))
        if not rmax <= 1.0 - MODEL_MARGIN:
            raise ModelDomainError(f"radial value {rmax!r} leaves the open unit ball of the delta={delta} model")
    return rho


def volume(body: RadialBody, model=0, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Volume of ``body`` in the ball model with curvature ``model``."""
    delta = _model(model).delta
    n = body.n
    if body.zonal:
        phi, w = zonal_nodes(n, spec, body.polar_breakpoints())
        vals = radial_moment(_in_model(body.polar_profile(phi), delta), n, delta, "volume")
    else:
        rule = sphere_nodes(n, spec)
        w, vals = rule.weights, radial_moment(_in_model(body.radial(rule.nodes), delta), n, delta, "volume")
    return float(2.0 ** n * np.dot(w, vals))


def _zonal_subsphere_rule(body: RadialBody, xi, spec: QuadratureSpec):
    """Polar angles (from the body axis) and weights covering S^{n-1} cap xi^perp.

    On the great subsphere write u = cos(psi) a' + sin(psi) y with a' the
    unit projection of the axis; then cos(phi) = s cos(psi) where
    ``s = |proj axis|`` and the measure is ``|S^{n-3}| sin^{n-3}(psi) dpsi``.
    """
    n = body.n
    s = float(np.sqrt(max(0.0, 1.0 - float(np.dot(body.axis, xi)) ** 2)))
    cuts = {0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi}
    for b in body.polar_breakpoints():
        c = np.cos(b)
        if s > 0 and abs(c) < s:
            for sgn in (1.0, -1.0):
                cuts.add(float(np.arccos(sgn * c / s)))
    cuts = np.array(sorted(cuts))
    cuts = cuts[np.concatenate([[True], np.diff(cuts) > 1e-12])]
    x, w = special.roots_legendre(spec.sphere_resolution)
    lo, hi = cuts[:-1, None], cuts[1:, None]
    psi = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wpsi = (0.5 * (hi - lo) * w).ravel()
    weights = sphere_area(n - 2) * np.sin(psi) ** (n - 3) * wpsi
    phi = np.arccos(np.clip(s * np.cos(psi), -1.0, 1.0))
    return phi, weights


def section_moment_integrand(body: RadialBody, model, xi, spec: QuadratureSpec = DEFAULT_SPEC):
    """Values ``W(rho(u))`` and weights on the great subsphere ``xi^perp``."""
    delta = _model(model).delta
    if body.zonal and body.n >= 3:
        phi, w = _zonal_subsphere_rule(body, xi, spec)
        rho = body.polar_profile(phi)
    else:
        rule = subsphere_nodes(xi, spec)
        rho, w = body.radial(rule.nodes), rule.weights
    return radial_moment(_in_model(rho, delta), body.n, delta, "section"), w


def section_volume(body: RadialBody, model, xi, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Model (n-1)-volume of the central section ``body cap xi^perp``."""
    xi = as_direction(xi, body.n, tol=1e-9)
    vals, w = section_moment_integrand(body, model, xi, spec)
    return float(2.0 ** (body.n - 1) * np.dot(w, vals))


def section_volumes(body: RadialBody, model, directions, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    return np.array([section_volume(body, model, unit(d), spec) for d in np.atleast_2d(directions)])


# -- parallel sections -------------------------------------------------------

def support(body: RadialBody, xi) -> tuple[float, np.ndarray]:
    """Support value ``h(xi) = max <x, xi>`` over the body and a maximizing point."""
    xi = unit(np.asarray(xi, dtype=float))
    n = body.n
    if body.zonal:
        a = body.axis
        b = xi - np.dot(xi, a) * a
        if np.linalg.norm(b) < 1e-12:
            b = basis_vector(n, int(np.argmin(np.abs(a))))
            b = b - np.dot(b, a) * a
        b = unit(b)

        def dirs(phi):
            phi = np.asarray(phi, dtype=float)
            return np.cos(phi)[..., None] * a + np.sin(phi)[..., None] * b

        def h(phi):
            d = dirs(phi)
            return body.radial(d) * (d @ xi)

        grid = np.linspace(0.0, 2 * np.pi, 4097)
        vals = h(grid)
        i = int(np.argmax(vals))
        res = optimize.minimize_scalar(lambda p: -float(h(np.array([p]))[0]),
                                       bounds=(grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]),
                                       method="bounded", options={"xatol": 1e-13})
        best = res.x if -res.fun >= vals[i] else grid[i]
        d = dirs(np.array([best]))[0]
        return float(body.radial(d[None])[0] * np.dot(d, xi)), body.radial(d[None])[0] * d
    cand = sample_directions(n, 8192, seed=3)
    cand = np.concatenate([cand, np.eye(n), -np.eye(n), xi[None]])
    vals = body.radial(cand) * (cand @ xi)
    order = np.argsort(vals)[::-1][:4]
    best_v, best_d = vals[order[0]], cand[order[0]]
    for i in order:
        res = optimize.minimize(lambda v: -float(body.radial(unit(v)[None])[0] * np.dot(unit(v), xi)),
                                cand[i], method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 6000})
        if -res.fun > best_v:
            best_v, best_d = -res.fun, unit(res.x)
    return float(best_v), body.radial(best_d[None])[0] * best_d


@dataclass(frozen=True)
class SectionProfile:
    """Samples of the Euclidean parallel-section function ``A_xi(z)``."""

    xi: np.ndarray
    zs: np.ndarray
    values: np.ndarray
    z_max: float

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return np.interp(z, self.zs, self.values, left=0.0, right=0.0)


class ProfileEvaluator:
    """Computes ``A_xi(z)`` for arbitrary ``z`` (vectorized, even in z).

    The slice at height z is integrated in polar coordinates about a point
    of the body in that slice: ``z xi`` while it lies in the body, else the
    matching point on the segment to the support point. Boundary crossings
    along each ray are bracketed by a coarse scan and refined by bisection.

    With ``strict=True`` a ray that crosses the boundary more than once
    raises :class:`NotStarShapedFromOffset`. Otherwise the slice volume is
    the signed sum ``sum_i (-1)^{i+1} r_i^{n-1} / (n-1)`` over the crossings,
    which is exact for any slice the scan resolves.
    """

    coarse = 24
    bisections = 48

    def __init__(self, body: RadialBody, xi, spec: QuadratureSpec = QuadratureSpec(32),
                 strict: bool = True):
        self.body = body
        self.n = body.n
        self.strict = strict
        self.xi = as_direction(xi, body.n, tol=1e-9)
        self.z_max, self.x_star = support(body, self.xi)
        self.rho_xi = float(body.radial(self.xi[None])[0])
        rule = subsphere_nodes(self.xi, spec)
        self.rays, self.weights = rule.nodes, rule.weights
        self.r_hi = 2.5 * body.rho_max

    def centers(self, z):
        z = np.abs(np.asarray(z, dtype=float))
        inner = z < 0.5 * self.rho_xi
        along = z[:, None] * self.xi
        toward = (z / self.z_max)[:, None] * self.x_star
        return np.where(inner[:, None], along, toward)

    def crossings(self, z):
        """Flat arrays ``(slice index, ray index, sign, radius)`` of boundary crossings."""
        z = np.asarray(z, dtype=float)
        C = self.centers(z)
        U = self.rays
        grid = np.linspace(0.0, self.r_hi, self.coarse + 1)
        pts = C[:, None, None, :] + grid[None, None, 1:, None] * U[None, :, None, :]
        inside = np.concatenate(
            [np.ones(pts.shape[:2] + (1,), dtype=bool), self.body.minkowski(pts) <= 1.0], axis=-1)
        if np.any(inside[..., -1]):
            raise ValidationError("boundary search box too small for this body")
        flips = inside[..., 1:] != inside[..., :-1]
        if self.strict:
            many = np.count_nonzero(flips, axis=-1) > 1
            if np.any(many):
                i, j = np.argwhere(many)[0]
                raise NotStarShapedFromOffset(
                    f"slice at z={z[i]!r} crosses the boundary more than once along ray {U[j].tolist()}"
                )
        zi, ray, pos = np.nonzero(flips)
        sign = np.where(inside[zi, ray, pos], 1.0, -1.0)
        lo, hi = grid[pos], grid[pos + 1]
        base, dirs = C[zi], U[ray]
        for _ in range(self.bisections):
            mid = 0.5 * (lo + hi)
            now_in = self.body.minkowski(base + mid[:, None] * dirs) <= 1.0
            # move the end that has the same state as the start of the bracket
            same = now_in == (sign > 0)
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        return zi, ray, sign, 0.5 * (lo + hi)

    def radii(self, z) -> np.ndarray:
        """Boundary distances along every ray (star-shaped slices only)."""
        zi, ray, sign, r = self.crossings(z)
        out = np.zeros((len(np.atleast_1d(z)), len(self.rays)))
        out[zi, ray] = r
        return out

    def __call__(self, z) -> np.ndarray:
        z = np.abs(np.atleast_1d(np.asarray(z, dtype=float)))
        out = np.zeros_like(z)
        live = np.nonzero(z < self.z_max)[0]
        chunk = max(1, 200_000 // (len(self.rays) * self.coarse))
        for s in range(0, len(live), chunk):
            idx = live[s:s + chunk]
            zi, ray, sign, r = self.crossings(z[idx])
            acc = np.zeros(len(idx))
            np.add.at(acc, zi, sign * r ** (self.n - 1) * self.weights[ray])
            out[idx] = acc / (self.n - 1)
        return out


def parallel_section_profile(body: RadialBody, xi, zs, spec: QuadratureSpec = QuadratureSpec(32),
                             strict: bool = True) -> SectionProfile:
    """Euclidean (n-1)-volumes of the slices ``{<x, xi> = z}`` for each z in ``zs``."""
    ev = ProfileEvaluator(body, xi, spec, strict)
    zs = np.asarray(zs, dtype=float)
    return SectionProfile(ev.xi, zs, ev(zs), ev.z_max)


def stencil_profile(body: RadialBody, xi, h: float | None = None, points: int = 9,
                    spec: QuadratureSpec = QuadratureSpec(32)) -> SectionProfile:
    """Profile on the symmetric stencil ``j h``, ``|j| <= (points - 1) / 2``.

    The default step is ``0.01 z_max``.
    """
    ev = ProfileEvaluator(body, xi, spec)
    if h is None:
        h = 0.01 * ev.z_max
    half = (points - 1) // 2
    zs = h * np.arange(-half, half + 1)
    return SectionProfile(ev.xi, zs, ev(zs), ev.z_max)


def _central_weights(k: int, m: int) -> np.ndarray:
    """Weights of the (2m+1)-point central rule for the k-th derivative (unit step)."""
    j = np.arange(-m, m + 1, dtype=float)
    V = np.vander(j, increasing=True).T
    rhs = np.zeros(2 * m + 1)
    rhs[k] = special.factorial(k)
    return np.linalg.solve(V, rhs)


def profile_derivative_at_zero(profile: SectionProfile, k: int) -> float:
    """``A^{(k)}(0)`` from a symmetric stencil, with one Richardson step.

    Odd orders vanish for even profiles and are returned as exactly 0.
    Needs the stencil ``0, +-h, +-2h`` (five points); with ``+-3h, +-4h``
    also present the 5-point rules at ``h`` and ``2h`` are combined.
    """
    if k < 0 or k > 4:
        raise InsufficientStencil("derivative order must be between 0 and 4")
    zs, vals = np.asarray(profile.zs), np.asarray(profile.values)
    pos = zs[zs > 0]
    if pos.size == 0:
        raise InsufficientStencil("stencil has no positive abscissa")
    h = float(pos.min())

    def lookup(j):
        hit = np.nonzero(np.abs(zs - j * h) <= 1e-9 * h)[0]
        return None if hit.size == 0 else float(vals[hit[0]])

    if lookup(0) is None:
        raise InsufficientStencil("stencil must contain z = 0")
    if k % 2 == 1:
        return 0.0
    if k == 0:
        return lookup(0)
    samples = {j: lookup(j) for j in range(-4, 5)}
    if any(samples[j] is None for j in (-2, -1, 1, 2)):
        raise InsufficientStencil("need samples at 0, +-h, +-2h")
    w = _central_weights(k, 2)
    d_h = sum(w[i] * samples[j] for i, j in enumerate(range(-2, 3))) / h ** k
    if any(samples[j] is None for j in (-4, 4)):
        return float(d_h)
    d_2h = sum(w[i] * samples[2 * j] for i, j in enumerate(range(-2, 3))) / (2 * h) ** k
    order = 4 if k == 2 else 2
    return float((2 ** order * d_h - d_2h) / (2 ** order - 1))


def euclidean_section_area(body: RadialBody, xi, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``A_xi(0)`` via the polar formula (a cross-check for the profile)."""
    return section_volume(body, 0, xi, spec) / 2 ** (body.n - 1)


__all__ = [
    "volume", "section_volume", "section_volumes", "section_moment_integrand", "support",
    "SectionProfile", "ProfileEvaluator", "parallel_section_profile", "stencil_profile",
    "profile_derivative_at_zero", "euclidean_section_area",
]
