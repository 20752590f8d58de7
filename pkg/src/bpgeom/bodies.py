"""Origin-symmetric star bodies described by their radial functions.

Every shape evaluates ``radial(theta)`` for arrays of unit vectors with
shape ``(..., n)``. Bodies are immutable; derived bodies (mapped,
perturbed, strictified, scaled) hold their base by value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .core import (MODEL_MARGIN, CurvatureModel, basis_vector, check_dimension,
                   polar_directions, unit)
from .errors import (DimensionMismatch, ModelDomainError, ParameterOutOfRange,
                     PositivityError, SymmetryError, ValidationError)
from .quadrature import radial_moment, radial_moment_inverse, sample_directions
from .zonal import ZonalFunction

SQRT2_2 = np.sqrt(0.5)


class RadialBody:
    """Base class. Subclasses implement ``radial`` and ``params``."""

    shape = "abstract"
    n: int

    def radial(self, theta) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    @property
    def axis(self) -> Optional[np.ndarray]:
        """Axis of rotational symmetry, or None for non-zonal bodies."""
        return None

    @property
    def isotropic(self) -> bool:
        return False

    @property
    def zonal(self) -> bool:
        return self.axis is not None

    def polar_breakpoints(self) -> tuple:
        """Polar angles (from the axis, in (0, pi/2]) where the profile kinks."""
        return ()

    def polar_profile(self, phi) -> np.ndarray:
        if self.axis is None:
            raise ValidationError(f"{self.shape} body is not zonal")
        return self.radial(polar_directions(self.axis, phi))

    def minkowski(self, x) -> np.ndarray:
        """``||x||_K = |x| / rho(x / |x|)``, zero at the origin."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        rho = self.radial(x / safe[..., None])
        return np.where(r > 0, r / rho, 0.0)

    def to_spec(self) -> dict:
        return {"n": self.n, "shape": self.shape, "params": self.params()}

    @cached_property
    def radial_extent(self) -> tuple[float, float]:
        """(min rho, max rho) from a dense scan refined by local search."""
        if self.axis is not None:
            phi = np.linspace(0.0, np.pi / 2, 4001)
            prof = self.polar_profile(phi)
            out = []
            for sgn, idx in ((1.0, int(np.argmin(prof))), (-1.0, int(np.argmax(prof)))):
                lo, hi = phi[max(idx - 1, 0)], phi[min(idx + 1, len(phi) - 1)]
                res = optimize.minimize_scalar(
                    lambda p: sgn * float(self.polar_profile(np.array([p]))[0]),
                    bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
                )
                out.append(min(sgn * res.fun, sgn * prof[idx]) * sgn)
            return float(out[0]), float(out[1])
        dirs = sample_directions(self.n, 8192, seed=7)
        dirs = np.concatenate([dirs, np.eye(self.n), unit(np.ones(self.n))[None]])
        vals = self.radial(dirs)
        out = []
        for sgn, idx in ((1.0, np.argsort(vals)[:4]), (-1.0, np.argsort(vals)[::-1][:4])):
            best = sgn * vals[idx[0]]
            for i in idx:
                res = optimize.minimize(
                    lambda v: sgn * float(self.radial(unit(v)[None])[0]),
                    dirs[i], method="Nelder-Mead",
                    options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
                )
                best = min(best, res.fun)
            out.append(sgn * best)
        return float(out[0]), float(out[1])

    @property
    def rho_max(self) -> float:
        return self.radial_extent[1]

    @property
    def rho_min(self) -> float:
        return self.radial_extent[0]

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, {self.params()})"


@dataclass(frozen=True, eq=False, repr=False)
class Ball(RadialBody):
    n: int
    radius: float = 1.0
    shape = "ball"

    def __post_init__(self):
        check_dimension(self.n)
        if not self.radius > 0:
            raise ParameterOutOfRange("ball radius must be positive")

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.full(theta.shape[:-1], float(self.radius))

    @property
    def axis(self):
        return basis_vector(self.n, 0)

    @property
    def isotropic(self):
        return True

    def params(self):
        return {"radius": float(self.radius)}


@dataclass(frozen=True, eq=False, repr=False)
class Ellipsoid(RadialBody):
    """Coordinate-aligned ellipsoid ``sum x_i^2 / a_i^2 <= 1``."""

    semiaxes: tuple
    shape = "ellipsoid"

    def __post_init__(self):
        a = tuple(float(x) for x in self.semiaxes)
        object.__setattr__(self, "semiaxes", a)
        check_dimension(len(a))
        if min(a) <= 0:
            raise ParameterOutOfRange("semiaxes must be positive")

    @property
    def n(self):
        return len(self.semiaxes)

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        inv = 1.0 / np.asarray(self.semiaxes) ** 2
        return 1.0 / np.sqrt((theta * theta) @ inv)

    @property
    def axis(self):
        a = np.asarray(self.semiaxes)
        if np.allclose(a, a[0], rtol=0, atol=0):
            return basis_vector(self.n, 0)
        for i in range(self.n):
            rest = np.delete(a, i)
            if np.all(rest == rest[0]):
                return basis_vector(self.n, i)
        return None

    @property
    def isotropic(self):
        return len(set(self.semiaxes)) == 1

    def params(self):
        return {"semiaxes": list(self.semiaxes)}


def _q_blend(s):
    # convex C^2 even function equal to |s| for |s| >= 1
    return (-s ** 4 + 6.0 * s * s + 3.0) / 8.0


def _q_blend_prime(s):
    return (3.0 * s - s ** 3) / 2.0


@dataclass(frozen=True, eq=False, repr=False)
class CylinderCaps(RadialBody):
    """Cylinder of radius sqrt(2)/2 about x_1 capped by spherical-model geodesic caps.

    The caps are pieces of the spheres ``|x +- c e_1|^2 = c^2 + 1`` with
    ``c = (1/2 - t0^2) / (2 t0)``; those spheres cross the unit sphere in
    antipodal points. The edge is smoothed by replacing ``max`` of the two
    Minkowski functionals with a convex C^2 smooth maximum, which keeps the
    body convex and changes it only in a polar-angle window of width ~eta
    around the rim.
    """

    n: int
    t0: float = 0.5
    eta: float = 0.02
    shape = "cylinder_caps"

    def __post_init__(self):
        check_dimension(self.n)
        if not 0.0 < self.t0 < SQRT2_2:
            raise ParameterOutOfRange("t0 must lie in (0, sqrt(2)/2)")
        if not 0.0 <= self.eta < 0.5:
            raise ParameterOutOfRange("eta must lie in [0, 0.5)")

    @property
    def cap_offset(self) -> float:
        return (0.5 - self.t0 ** 2) / (2.0 * self.t0)

    @property
    def cap_radius(self) -> float:
        return float(np.sqrt(self.cap_offset ** 2 + 1.0))

    @property
    def apex(self) -> float:
        return self.cap_radius - self.cap_offset

    @property
    def rim_angle(self) -> float:
        return float(np.arctan2(SQRT2_2, self.t0))

    def _functionals(self, t):
        t = np.abs(t)
        c = self.cap_offset
        n_cyl = np.sqrt(np.clip(1.0 - t * t, 0.0, None)) / SQRT2_2
        n_cap = np.sqrt(c * c * t * t + 1.0) + c * t
        return n_cyl, n_cap

    @cached_property
    def blend_width(self) -> float:
        if self.eta == 0:
            return 0.0
        phi = self.rim_angle + np.array([-0.5, 0.5]) * self.eta
        a, b = self._functionals(np.cos(phi))
        return float(np.min(np.abs(a - b) / np.maximum(a, b)))

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        a, b = self._functionals(theta[..., 0])
        mx = np.maximum(a, b)
        r = 1.0 / mx
        w = self.blend_width
        if w == 0:
            return r
        d = a - b
        sel = np.abs(r * d) < w
        if np.any(sel):
            # F is convex and F(r0) >= 0, so Newton decreases monotonically to the root
            idx = np.flatnonzero(sel)
            a_, b_, d_, r_ = a.ravel()[idx], b.ravel()[idx], d.ravel()[idx], r.ravel()[idx]
            live = np.arange(idx.size)
            for _ in range(60):
                s = r_[live] * d_[live] / w
                F = r_[live] * (a_[live] + b_[live]) / 2.0 + 0.5 * w * _q_blend(s) - 1.0
                dF = (a_[live] + b_[live]) / 2.0 + 0.5 * d_[live] * _q_blend_prime(s)
                step = F / dF
                r_[live] -= step
                live = live[np.abs(step) > 1e-15 * r_[live]]
                if live.size == 0:
                    break
            r = r.copy()
            r.ravel()[idx] = r_
        return r

    @property
    def axis(self):
        return basis_vector(self.n, 0)

    def polar_breakpoints(self):
        p = self.rim_angle
        if self.eta == 0:
            return (p,)
        return (p - 0.75 * self.eta, p - 0.25 * self.eta, p + 0.25 * self.eta, p + 0.75 * self.eta)

    def params(self):
        return {"t0": float(self.t0), "eta": float(self.eta)}


@dataclass(frozen=True, eq=False, repr=False)
class ZonalTable(RadialBody):
    """Zonal body given by radii sampled over the polar angle in [0, pi].

    Interpolated by a clamped cubic spline (C^2, zero slope at both poles).
    """

    n: int
    axis_vector: tuple
    angles: tuple
    radii: tuple
    shape = "zonal_table"

    def __post_init__(self):
        check_dimension(self.n)
        ax = np.asarray(self.axis_vector, dtype=float)
        if ax.shape != (self.n,):
            raise DimensionMismatch("zonal_table axis has the wrong length")
        ang = np.asarray(self.angles, dtype=float)
        rad = np.asarray(self.radii, dtype=float)
        if ang.ndim != 1 or ang.shape != rad.shape or len(ang) < 4:
            raise ValidationError("zonal_table needs matching angle/radius samples (at least 4)")
        if np.any(np.diff(ang) <= 0) or abs(ang[0]) > 1e-12 or abs(ang[-1] - np.pi) > 1e-12:
            raise ValidationError("zonal_table angles must increase from 0 to pi")
        object.__setattr__(self, "axis_vector", tuple(unit(ax)))
        object.__setattr__(self, "angles", tuple(ang))
        object.__setattr__(self, "radii", tuple(rad))

    @cached_property
    def _spline(self):
        return CubicSpline(np.asarray(self.angles), np.asarray(self.radii), bc_type="clamped")

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        phi = np.arccos(np.clip(theta @ np.asarray(self.axis_vector), -1.0, 1.0))
        return self._spline(phi)

    @property
    def axis(self):
        return np.asarray(self.axis_vector)

    def polar_breakpoints(self):
        # spline knots, folded into (0, pi/2] by the symmetry phi -> pi - phi
        ang = np.asarray(self.angles[1:-1])
        folded = np.minimum(ang, np.pi - ang)
        return tuple(sorted(set(np.round(folded, 15).tolist())))

    def params(self):
        return {"axis": list(self.axis_vector), "angles": list(self.angles), "radii": list(self.radii)}


@dataclass(frozen=True, eq=False, repr=False)
class LqBall(RadialBody):
    """Scaled unit ball of the l_q norm."""

    n: int
    q: float = 4.0
    scale: float = 1.0
    shape = "lq_ball"

    def __post_init__(self):
        check_dimension(self.n)
        if not self.q >= 1:
            raise ParameterOutOfRange("q must be at least 1")
        if not self.scale > 0:
            raise ParameterOutOfRange("scale must be positive")

    def radial(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.scale / np.sum(np.abs(theta) ** self.q, axis=-1) ** (1.0 / self.q)

    @property
    def axis(self):
        if self.q == 2:
            return basis_vector(self.n, 0)
        return None

    @property
    def isotropic(self):
        return self.q == 2

    def params(self):
        return {"q": float(self.q), "scale": float(self.scale)}


class _Derived(RadialBody):
    base: RadialBody

    @property
    def n(self):
        return self.base.n

    @property
    def axis(self):
        return self.base.axis

    @property
    def isotropic(self):
        return self.base.isotropic

    def polar_breakpoints(self):
        return self.base.polar_breakpoints()


@dataclass(frozen=True, eq=False, repr=False)
class Mapped(_Derived):
    """Radial reparametrization ``rho -> rho / (1 + sigma rho^2)`` (or its inverse)."""

    base: RadialBody
    sigma: int
    inverse: bool = False
    shape = "mapped"

    def __post_init__(self):
        if self.sigma not in (-1, 1):
            raise ParameterOutOfRange("sigma must be +1 or -1")

    def radial(self, theta):
        rho = self.base.radial(theta)
        if not self.inverse:
            return rho / (1.0 + self.sigma * rho * rho)
        disc = 1.0 - 4.0 * self.sigma * rho * rho
        return 2.0 * rho / (1.0 + np.sqrt(np.clip(disc, 0.0, None)))

    def params(self):
        out = {"base": self.base.to_spec(), "sigma": int(self.sigma)}
        if self.inverse:
            out["inverse"] = True
        return out


@dataclass(frozen=True, eq=False, repr=False)
class Strictified(_Derived):
    """Body whose Minkowski functional is ``||x||_base + alpha |x|``."""

    base: RadialBody
    alpha: float
    shape = "strictified"

    def __post_init__(self):
        if self.alpha < 0:
            raise ParameterOutOfRange("alpha must be non-negative")

    def radial(self, theta):
        rho = self.base.radial(theta)
        return rho / (1.0 + self.alpha * rho)

    def params(self):
        return {"base": self.base.to_spec(), "alpha": float(self.alpha)}


@dataclass(frozen=True, eq=False, repr=False)
class Scaled(_Derived):
    base: RadialBody
    factor: float
    shape = "scaled"

    def __post_init__(self):
        if not self.factor > 0:
            raise ParameterOutOfRange("scale factor must be positive")

    def radial(self, theta):
        return self.factor * self.base.radial(theta)

    def params(self):
        return {"base": self.base.to_spec(), "factor": float(self.factor)}


@dataclass(frozen=True, eq=False, repr=False)
class Perturbed(_Derived):
    """Body K with ``W(rho_K) = W(rho_base) + epsilon * g``.

    ``W(rho)`` is the section radial moment ``int_0^rho r^{n-2} / (1 +
    delta r^2)^{n-1} dr`` of the model with curvature ``delta``.
    """

    base: RadialBody
    delta: int
    g: ZonalFunction
    epsilon: float
    shape = "perturbed"

    def __post_init__(self):
        if self.delta not in (-1, 0, 1):
            raise ParameterOutOfRange("delta must be -1, 0 or +1")
        if self.g.n != self.base.n:
            raise DimensionMismatch("perturbation and base body dimensions differ")

    def moment(self, theta):
        rho = self.base.radial(theta)
        return radial_moment(rho, self.n, self.delta, "section") + self.epsilon * self.g(theta)

    def radial(self, theta):
        if self.epsilon == 0:
            return self.base.radial(theta)
        w = self.moment(theta)
        out = np.zeros_like(w)
        pos = w > 0
        out[pos] = radial_moment_inverse(w[pos], self.n, self.delta, "section")
        return out

    @property
    def axis(self):
        ax = self.base.axis
        if ax is None:
            return None
        if self.base.isotropic or abs(abs(np.dot(ax, self.g.axis)) - 1.0) < 1e-12:
            return self.g.axis
        return None

    @property
    def isotropic(self):
        return False

    def params(self):
        return {
            "base": self.base.to_spec(),
            "delta": int(self.delta),
            "axis": self.g.axis.tolist(),
            "coeffs": self.g.coeffs.tolist(),
            "epsilon": float(self.epsilon),
        }


def evaluate_radial(body: RadialBody, theta) -> np.ndarray:
    """Radial function of ``body`` at direction(s) ``theta``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != body.n:
        raise DimensionMismatch(f"direction has length {theta.shape[-1]}, body has n={body.n}")
    return body.radial(unit(theta))


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    rho_min: float
    rho_max: float
    samples: int


def validate_body(body: RadialBody, model: CurvatureModel = CurvatureModel(0),
                  samples: int = 4096) -> ValidationResult:
    """Check symmetry, positivity and (for curved models) containment in the model ball.

    Raises the first violated invariant's exception with a witness
    direction in its message.
    """
    model = CurvatureModel.from_flag(model)
    dirs = sample_directions(body.n, samples, seed=11)
    extra = [np.eye(body.n)]
    if body.axis is not None:
        extra.append(polar_directions(body.axis, np.linspace(0, np.pi, 181)))
    dirs = np.concatenate([dirs] + extra)
    plus = body.radial(dirs)
    minus = body.radial(-dirs)
    bad = ~(np.abs(plus - minus) <= 1e-9 * np.abs(plus))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SymmetryError(
            f"rho(theta) != rho(-theta) at theta={dirs[i].tolist()}: {plus[i]!r} vs {minus[i]!r}"
        )
    bad = ~(plus > 0) | ~np.isfinite(plus)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise PositivityError(f"non-positive radial value {plus[i]!r} at theta={dirs[i].tolist()}")
    rmax = max(float(plus.max()), body.rho_max)
    if model.curved and rmax > 1.0 - MODEL_MARGIN:
        i = int(np.argmax(plus))
        raise ModelDomainError(
            f"sup rho = {rmax!r} does not fit the open model ball (delta={model.delta}); "
            f"witness theta={dirs[i].tolist()}"
        )
    return ValidationResult(True, min(float(plus.min()), body.rho_min), rmax, len(dirs))


# -- JSON body specifications ------------------------------------------------

_PARAM_KEYS = {
    "ball": {"radius"},
    "ellipsoid": {"semiaxes"},
    "cylinder_caps": {"t0", "eta"},
    "zonal_table": {"axis", "angles", "radii"},
    "lq_ball": {"q", "scale"},
    "perturbed": {"base", "delta", "axis", "coeffs", "epsilon"},
    "mapped": {"base", "sigma", "inverse"},
    "strictified": {"base", "alpha"},
    "scaled": {"base", "factor"},
}
_REQUIRED = {
    "ball": {"radius"},
    "ellipsoid": {"semiaxes"},
    "cylinder_caps": {"t0"},
    "zonal_table": {"axis", "angles", "radii"},
    "lq_ball": {"q"},
    "perturbed": {"base", "delta", "axis", "coeffs", "epsilon"},
    "mapped": {"base", "sigma"},
    "strictified": {"base", "alpha"},
    "scaled": {"base", "factor"},
}


def body_from_spec(spec: dict) -> RadialBody:
    """Build a body from ``{"n": int, "shape": str, "params": {...}}``.

    Unknown top-level or parameter keys are rejected.
    """
    if not isinstance(spec, dict):
        raise ValidationError("body specification must be an object")
    extra = set(spec) - {"n", "shape", "params"}
    if extra:
        raise ValidationError(f"unknown body keys: {sorted(extra)}")
    try:
        n, shape = int(spec["n"]), spec["shape"]
    except KeyError as exc:
        raise ValidationError(f"body specification lacks {exc.args[0]!r}") from None
    params = spec.get("params", {})
    if shape not in _PARAM_KEYS:
        raise ValidationError(f"unknown shape {shape!r}")
    unknown = set(params) - _PARAM_KEYS[shape]
    if unknown:
        raise ValidationError(f"unknown parameters for {shape}: {sorted(unknown)}")
    missing = _REQUIRED[shape] - set(params)
    if missing:
        raise ValidationError(f"missing parameters for {shape}: {sorted(missing)}")
    check_dimension(n)
    p = params
    if shape == "ball":
        body = Ball(n, float(p["radius"]))
    elif shape == "ellipsoid":
        body = Ellipsoid(tuple(p["semiaxes"]))
    elif shape == "cylinder_caps":
        body = CylinderCaps(n, float(p["t0"]), float(p.get("eta", 0.02)))
    elif shape == "zonal_table":
        body = ZonalTable(n, tuple(p["axis"]), tuple(p["angles"]), tuple(p["radii"]))
    elif shape == "lq_ball":
        body = LqBall(n, float(p["q"]), float(p.get("scale", 1.0)))
    elif shape == "perturbed":
        base = body_from_spec(p["base"])
        g = ZonalFunction(np.asarray(p["axis"], dtype=float), n, np.asarray(p["coeffs"], dtype=float))
        body = Perturbed(base, int(p["delta"]), g, float(p["epsilon"]))
    elif shape == "mapped":
        body = Mapped(body_from_spec(p["base"]), int(p["sigma"]), bool(p.get("inverse", False)))
    elif shape == "strictified":
        body = Strictified(body_from_spec(p["base"]), float(p["alpha"]))
    else:
        body = Scaled(body_from_spec(p["base"]), float(p["factor"]))
    if body.n != n:
        raise DimensionMismatch(f"declared n={n} but the {shape} parameters give n={body.n}")
    return body
