"""Busemann-Petty comparisons, positive-definiteness tests and counterexample pipelines."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodies import CylinderCaps, LqBall, Perturbed, RadialBody, Scaled, Strictified
from .core import (BPReport, CurvatureModel, basis_vector, decide_verdict, polar_directions, unit)
from .errors import (EpsilonTooLarge, NegativityNotFound, ParameterOutOfRange,
                     UnsupportedDimension, ValidationError)
from .geometry import ConvexitySpec, ConvexityVerdict, classify_convexity, curvature_map
from .harmonic import fourier_minkowski_power, multiplier
from .measures import section_volume, section_volumes, volume
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, integrate_radial, radial_integrand,
                         radial_moment, sample_directions)
from .zonal import L_MAX, ZonalFunction


def workers() -> int:
    """Worker count for direction sweeps, capped by the BP_THREADS variable."""
    count = os.cpu_count() or 1
    cap = os.environ.get("BP_THREADS")
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            raise ValidationError(f"BP_THREADS must be an integer, got {cap!r}") from None
    return count


def _map(fn, items):
    items = list(items)
    nw = min(workers(), len(items))
    if nw <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(fn, items))


def build_cylinder_caps(n: int, t0: float = 0.5, eta: float = 0.02) -> CylinderCaps:
    """Cylinder of radius sqrt(2)/2 about e_1 with spherical-model geodesic caps."""
    return CylinderCaps(n, t0, eta)


# -- positive definiteness ---------------------------------------------------

@dataclass
class DefinitenessReport:
    """Fourier values of ``||x||_M^{-1}`` over a direction grid."""

    min_value: float
    witness: np.ndarray
    directions: np.ndarray
    values: np.ndarray
    angles: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        out = {"min_value": float(self.min_value), "witness": self.witness.tolist(),
               "directions": self.directions.tolist(), "values": self.values.tolist()}
        if self.angles is not None:
            out["angles"] = self.angles.tolist()
        return out


def positive_definiteness_report(body: RadialBody, model, grid=17, spec: QuadratureSpec = QuadratureSpec(32),
                                 angles=None) -> DefinitenessReport:
    """Sign test for ``||x||_K^{-1} / (1 + delta (|x| / ||x||_K)^2) = ||x||_M^{-1}``.

    ``M`` is the curvature image of K with ``sigma = delta`` (K itself for
    delta = 0). Its Fourier transform at each direction is read off the
    parallel sections of M (order ``k = n - 2``). ``grid`` is a count of
    polar angles in [0, pi/2] for zonal bodies, a count of sampled
    directions otherwise, or an explicit array of directions; ``angles``
    overrides it with explicit polar angles.
    """
    n = body.n
    if n == 2:
        raise UnsupportedDimension("positive definiteness reports need n >= 3")
    if n > 5:
        raise UnsupportedDimension("n must be at most 5")
    delta = CurvatureModel.from_flag(model).delta
    M = body if delta == 0 else curvature_map(body, delta)
    ang = None
    if angles is not None or (np.isscalar(grid) and body.zonal):
        if body.axis is None:
            raise ValidationError("polar angles need a zonal body")
        ang = np.asarray(angles if angles is not None else np.linspace(0.0, np.pi / 2, int(grid)), dtype=float)
        dirs = polar_directions(body.axis, ang)
    elif np.isscalar(grid):
        dirs = sample_directions(n, int(grid), seed=0)
    else:
        dirs = unit(np.atleast_2d(np.asarray(grid, dtype=float)))
    vals = np.array(_map(lambda d: fourier_minkowski_power(M, n - 2, d, spec, strict=False), dirs))
    i = int(np.argmin(vals))
    return DefinitenessReport(float(vals[i]), dirs[i], dirs, vals, ang)


def zvavitch_inequality(a: float, b: float, delta: int, n: int, tol: float = 1e-14) -> tuple[float, float]:
    """Both sides of ``a/(1+delta a^2) int_a^b W' dr <= int_a^b r W'/(1+delta r^2) dr``.

    ``W' = r^{n-2} / (1 + delta r^2)^{n-1}``; the inequality holds because
    ``r / (1 + delta r^2)`` is increasing on (0, 1). Orientation is kept,
    so ``b < a`` gives both sides negative.
    """
    if not (0 < a < 1 and 0 < b < 1):
        raise ParameterOutOfRange("a and b must lie in (0, 1)")
    spec = QuadratureSpec(8, tol)
    sec = integrate_radial(radial_integrand(n, delta, "section"), a, b, spec)
    vol = integrate_radial(radial_integrand(n, delta, "volume"), a, b, spec)
    return a / (1.0 + delta * a * a) * sec, vol


# -- comparisons -------------------------------------------------------------

def _common_axis(K: RadialBody, L: RadialBody):
    if K.axis is None or L.axis is None:
        return None
    if K.isotropic:
        return L.axis
    if L.isotropic or abs(abs(np.dot(K.axis, L.axis)) - 1) < 1e-12:
        return K.axis
    return None


def comparison_directions(K: RadialBody, L: RadialBody, grid=128, seed: int = 0):
    """Default direction grid: polar angles for coaxial zonal pairs, else Sobol directions."""
    axis = _common_axis(K, L)
    if axis is not None:
        ang = np.linspace(0.0, np.pi / 2, int(grid))
        return polar_directions(axis, ang), ang
    dirs = np.concatenate([np.eye(K.n), sample_directions(K.n, int(grid), seed)])
    return dirs, None


def bp_compare(K: RadialBody, L: RadialBody, model, grid=128, spec: QuadratureSpec = DEFAULT_SPEC,
               seed: int = 0, section_tolerance: float = 1e-8, volume_margin: float = 1e-6) -> BPReport:
    """Compare central sections on a direction grid and full volumes.

    ``grid`` is a count (polar angles for coaxial zonal bodies, Sobol
    directions plus the coordinate axes otherwise) or an explicit array of
    directions.
    """
    if K.n != L.n:
        raise ValidationError("bodies live in different dimensions")
    m = CurvatureModel.from_flag(model)
    if np.isscalar(grid):
        dirs, ang = comparison_directions(K, L, grid, seed)
    else:
        dirs, ang = unit(np.atleast_2d(np.asarray(grid, dtype=float))), None
    sk = np.array(_map(lambda d: section_volume(K, m, d, spec), dirs))
    sl = np.array(_map(lambda d: section_volume(L, m, d, spec), dirs))
    vk, vl = volume(K, m, spec), volume(L, m, spec)
    gaps = sk - sl
    i = int(np.argmax(gaps))
    verdict = decide_verdict(float(gaps[i]), vk, vl, section_tolerance, volume_margin)
    return BPReport(m, dirs, sk, sl, vk, vl, float(gaps[i]), verdict, dirs[i],
                    section_tolerance, volume_margin, ang)


# -- perturbations -----------------------------------------------------------

@dataclass(frozen=True)
class PerturbationSpec:
    """Zonal cap where ``v <= 0`` lives, its depth and the perturbation size.

    ``v = -depth * p(t)^2`` where ``p`` is the degree-``degree`` Gegenbauer
    truncation of the square root of a C-infinity bump of angular half-width
    ``width`` centred at polar angle ``center_angle`` (and its antipode).
    Squaring makes ``v <= 0`` exact and keeps it a finite series.
    ``epsilon=None`` selects the size automatically.
    """

    axis: np.ndarray
    center_angle: float = 0.0
    width: float = 0.3
    depth: float = 1.0
    epsilon: Optional[float] = None
    degree: int = 24

    def __post_init__(self):
        object.__setattr__(self, "axis", unit(np.asarray(self.axis, dtype=float)))
        if not 0 < self.width <= np.pi / 2:
            raise ParameterOutOfRange("cap width must lie in (0, pi/2]")
        if not 0 <= self.center_angle <= np.pi / 2:
            raise ParameterOutOfRange("cap centre angle must lie in [0, pi/2]")
        if not self.depth > 0:
            raise ParameterOutOfRange("depth must be positive")
        if self.epsilon is not None and self.epsilon < 0:
            raise ParameterOutOfRange("epsilon must be non-negative")
        if self.degree % 2 or not 2 <= self.degree <= L_MAX // 2:
            raise ParameterOutOfRange(f"degree must be even and at most {L_MAX // 2}")


def _cap_distance(t, center: float):
    phi = np.arccos(np.clip(t, -1.0, 1.0))
    return np.minimum(np.abs(phi - center), np.abs(phi - (np.pi - center)))


def _sqrt_bump(t, center: float, width: float):
    s = _cap_distance(t, center) / width
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(0.5 * (1.0 - 1.0 / (1.0 - s[inside] ** 2)))
    return out


def cap_function(pspec: PerturbationSpec, n: int) -> ZonalFunction:
    """The non-positive zonal function ``v``."""
    p = ZonalFunction.project(lambda t: _sqrt_bump(t, pspec.center_angle, pspec.width),
                              pspec.axis, n, pspec.degree)
    v = ZonalFunction.project(lambda t: -pspec.depth * p.at_cos(t) ** 2, pspec.axis, n, 2 * pspec.degree)
    return v


def cap_leakage(v: ZonalFunction, pspec: PerturbationSpec) -> float:
    """``max |v|`` outside the cap relative to ``max |v|``."""
    t = np.cos(np.linspace(0.0, np.pi / 2, 4001))
    vals = np.abs(v.at_cos(t))
    outside = _cap_distance(t, pspec.center_angle) >= pspec.width
    return float(vals[outside].max() / vals.max()) if outside.any() else 0.0


def fourier_preimage(v: ZonalFunction) -> ZonalFunction:
    """``g`` with ``(r^{-n+1} g)^ = r^{-1} v``, coefficientwise ``v_m / lambda_{m,n-1,n}``."""
    return v.with_coeffs(v.coeffs / multiplier(v.degrees, v.n - 1, v.n), tail=v.tail)


_CLASS = {-1: "h_convex", 0: "e_convex", 1: "s_convex"}


@dataclass
class PerturbationResult:
    body: Perturbed
    v: ZonalFunction
    g: ZonalFunction
    epsilon: float
    epsilon_initial: float
    attempts: int
    convexity: Optional[ConvexityVerdict]
    leakage: float


def _moment_floor(L: RadialBody, n: int, delta: int) -> float:
    if L.zonal:
        rho = L.polar_profile(np.linspace(0.0, np.pi / 2, 2001))
    else:
        rho = L.radial(np.concatenate([sample_directions(n, 4096, 5), np.eye(n)]))
    return float(min(radial_moment(rho, n, delta, "section").min(),
                     radial_moment(L.rho_min, n, delta, "section")))


def build_perturbation(L: RadialBody, model, pspec: PerturbationSpec, certify: bool = True,
                       convexity: ConvexitySpec = ConvexitySpec(), halvings: int = 10) -> PerturbationResult:
    """Construct K from ``W(rho_K) = W(rho_L) + epsilon g``.

    With ``certify`` the K is accepted only once the sampler certifies the
    convexity class matching the model (h for delta = -1, e for 0, s for
    +1); epsilon is halved up to ``halvings`` times otherwise.
    """
    n = L.n
    if n < 3:
        raise UnsupportedDimension("perturbations use zonal series and need n >= 3")
    delta = CurvatureModel.from_flag(model).delta
    v = cap_function(pspec, n)
    g = fourier_preimage(v)
    floor = _moment_floor(L, n, delta)
    gmax = float(np.abs(g.at_cos(np.cos(np.linspace(0.0, np.pi / 2, 4001)))).max())
    eps0 = 0.05 * floor / gmax if pspec.epsilon is None else float(pspec.epsilon)
    eps = eps0
    verdict = None
    for attempt in range(halvings + 1):
        if eps * gmax < floor:
            K = Perturbed(L, delta, g, eps)
            if not certify or eps == 0:
                return PerturbationResult(K, v, g, eps, eps0, attempt + 1, None, cap_leakage(v, pspec))
            verdict = classify_convexity(K, convexity, models=(delta,))
            if verdict.flag(delta) == "yes":
                return PerturbationResult(K, v, g, eps, eps0, attempt + 1, verdict, cap_leakage(v, pspec))
        eps *= 0.5
    raise EpsilonTooLarge(
        f"no epsilon in [{eps0 / 2 ** halvings:.3e}, {eps0:.3e}] keeps K positive and "
        f"{_CLASS[delta].replace('_', '-')}; last verdict: {verdict.to_dict() if verdict else 'positivity'}"
    )


def perturb_body(L: RadialBody, model, pspec: PerturbationSpec, **kwargs) -> Perturbed:
    """The perturbed body K (see :func:`build_perturbation`)."""
    return build_perturbation(L, model, pspec, **kwargs).body


# -- counterexample pipelines ------------------------------------------------

@dataclass
class CounterexampleReport:
    K: RadialBody
    L: RadialBody
    model: CurvatureModel
    bp: BPReport
    fourier_min: float
    convexity: dict
    parameters: dict
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        """The comparison verdict, demoted if a body misses its convexity class."""
        want = _CLASS[self.model.delta]
        if all(getattr(c, want) == "yes" for c in self.convexity.values()):
            return self.bp.verdict
        return "inconclusive"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "model": self.model.name,
            "K": self.K.to_spec(),
            "L": self.L.to_spec(),
            "bp": self.bp.to_dict(),
            "fourier_min": float(self.fourier_min),
            "convexity": {k: v.to_dict() for k, v in self.convexity.items()},
            "parameters": dict(self.parameters),
            "extra": dict(self.extra),
        }


def counterexample_hyperbolic(n: int, t0: float = 0.5, eta: float = 0.02, width: float = 0.3,
                              depth: float = 1.0, epsilon: Optional[float] = None,
                              alpha: Optional[float] = None, grid: int = 128, seed: int = 0,
                              spec: QuadratureSpec = DEFAULT_SPEC, pairs: int = 2000) -> CounterexampleReport:
    """h-convex K, L in the Poincare ball with smaller sections of K but larger volume.

    L is the strictified cylinder with spherical-model geodesic caps; the
    Fourier transform of ``||x||_M^{-1}`` for its curvature image M is
    negative around the axis, and K adds ``epsilon g`` to L's section
    moment where ``(r^{-n+1} g)^ = r^{-1} v`` with ``v <= 0`` in that cap.
    """
    if n == 2:
        raise UnsupportedDimension("n = 2 has an affirmative answer: planar sections are chords and "
                                   "smaller chords force smaller area")
    if n not in (3, 4):
        raise UnsupportedDimension("the hyperbolic pipeline is implemented for n = 3 and 4")
    base = build_cylinder_caps(n, t0, eta)
    a = 1e-3 * base.rho_min if alpha is None else float(alpha)
    L = Strictified(base, a)
    axis = basis_vector(n, 0)
    probe = np.array([0.0, width / 3, 2 * width / 3, width])
    pd = positive_definiteness_report(L, -1, angles=probe)
    if not np.all(pd.values < 0):
        raise NegativityNotFound(
            f"Fourier values on the cap are not all negative: {dict(zip(probe.round(4), pd.values))}"
        )
    pspec = PerturbationSpec(axis, 0.0, width, depth, epsilon)
    cspec = ConvexitySpec(pairs=pairs, seed=seed)
    pert = build_perturbation(L, -1, pspec, convexity=cspec)
    K = pert.body
    bp = bp_compare(K, L, -1, grid, spec)
    conv = {"K": pert.convexity, "L": classify_convexity(L, cspec, models=(-1,))}
    params = {"n": n, "t0": t0, "eta": eta, "width": width, "depth": depth, "alpha": a,
              "epsilon": pert.epsilon, "epsilon_initial": pert.epsilon_initial, "grid": grid,
              "seed": seed, "sphere_resolution": spec.sphere_resolution}
    extra = {"fourier_angles": probe.tolist(), "fourier_values": pd.values.tolist(),
             "cap_leakage": pert.leakage, "epsilon_attempts": pert.attempts,
             "relative_volume_gain": (bp.vol_K - bp.vol_L) / bp.vol_L}
    return CounterexampleReport(K, L, CurvatureModel(-1), bp, pd.min_value, conv, params, extra)


def scale_radius(eps: float, n: int) -> float:
    """``r`` with ``(1 + r^2)^{-n} = 1 - eps``."""
    if not 0 < eps < 1:
        raise ParameterOutOfRange("eps must lie in (0, 1)")
    return float(np.sqrt((1.0 - eps) ** (-1.0 / n) - 1.0))


@dataclass
class ScaledPair:
    alpha: float
    radius: float
    K: RadialBody
    L: RadialBody


def scale_pair(K: RadialBody, L: RadialBody, eps_target: float) -> ScaledPair:
    """Shrink both bodies into the ball of radius ``r(eps)``.

    There ``1 - eps <= (1 + |x|^2)^{-n} <= 1``, so spherical volumes and
    sections are within a factor ``1 - eps`` of ``2^n`` (resp. ``2^{n-1}``)
    times the Euclidean ones.
    """
    r = scale_radius(eps_target, K.n)
    alpha = r / max(K.rho_max, L.rho_max)
    return ScaledPair(alpha, r, Scaled(K, alpha), Scaled(L, alpha))


def _sphere_probe_directions(n: int):
    yield basis_vector(n, 0)
    for m in range(n, 1, -1):
        d = np.zeros(n)
        d[:m] = 1.0
        yield unit(d)


def counterexample_sphere(n: int = 5, q: float = 4.0, alpha: Optional[float] = None, width: float = 0.7,
                          depth: float = 1.0, degree: int = 12, epsilon: Optional[float] = None,
                          grid: int = 96, resolution: int = 26, probe_resolution: int = 16,
                          seed: int = 0, pairs: int = 2000, section_rtol: float = 1e-8,
                          candidates: Optional[Sequence] = None) -> CounterexampleReport:
    """Convex K, L in the open hemisphere model with smaller sections of K but larger volume.

    Euclidean stage: L0 is the strictified l_q ball; a direction where the
    order ``n - 2`` Fourier transform of ``||x||_{L0}^{-1}`` is negative is
    searched among ``candidates``, K0 perturbs L0 in a cap about it and is
    then dilated slightly so that both inequalities are strict. Spherical
    stage: both bodies are scaled into a ball where the spherical density
    is within the Euclidean margins and compared again.

    The scaled bodies are tiny, so section gaps are judged relative to the
    largest section of L (``section_rtol``) rather than absolutely.
    """
    if n != 5:
        raise UnsupportedDimension("the spherical pipeline is implemented for n = 5")
    raw = LqBall(n, q)
    a = 0.1 * raw.rho_min if alpha is None else float(alpha)
    L0 = Strictified(raw, a)
    pspec_probe = QuadratureSpec(probe_resolution)
    tried = []
    witness = None
    for d in (candidates if candidates is not None else _sphere_probe_directions(n)):
        d = unit(np.asarray(d, dtype=float))
        val = fourier_minkowski_power(L0, n - 2, d, pspec_probe, tol=1e-7, rtol=1e-6)
        tried.append((d.tolist(), float(val)))
        if val < 0:
            witness = d
            break
    if witness is None:
        raise NegativityNotFound(f"no negative Fourier value found for the l_{q:g} ball; tried {tried}")
    pspec = PerturbationSpec(witness, 0.0, width, depth, epsilon, degree)
    cspec = ConvexitySpec(pairs=pairs, seed=seed)
    pert = build_perturbation(L0, 0, pspec, convexity=cspec)
    K0 = pert.body
    qspec = QuadratureSpec(resolution)
    dirs = np.concatenate([witness[None], polar_directions(witness, np.linspace(0, np.pi / 2, 9)[1:]),
                           np.eye(n), sample_directions(n, grid, seed)])

    def compare(K, L, model):
        scale = float(np.max(section_volumes(L, model, dirs[:n + 9], qspec)))
        return bp_compare(K, L, model, dirs, qspec, section_tolerance=section_rtol * scale)

    euclid = compare(K0, L0, 0)
    gain = euclid.vol_K / euclid.vol_L - 1.0
    if euclid.verdict != "counterexample" or gain <= 0:
        raise EpsilonTooLarge(f"Euclidean stage is not a counterexample (relative gain {gain:.3e})")
    shrink = (1.0 + gain) ** (-0.5 / n)
    K1 = Scaled(K0, shrink)
    strict = compare(K1, L0, 0)
    margin = min(1.0 - shrink ** (n - 1), 1.0 - strict.vol_L / strict.vol_K)
    eps_scale = 0.5 * margin
    pair = scale_pair(K1, L0, eps_scale)
    bp = compare(pair.K, pair.L, 1)
    conv = {"K": classify_convexity(pair.K, cspec, models=(1,)),
            "L": classify_convexity(pair.L, cspec, models=(1,))}
    params = {"n": n, "q": q, "alpha": a, "width": width, "depth": depth, "degree": degree,
              "epsilon": pert.epsilon, "grid": len(dirs), "sphere_resolution": resolution, "seed": seed}
    extra = {
        "probes": tried,
        "witness_axis": witness.tolist(),
        "euclidean_gain": gain,
        "euclidean_verdict": euclid.verdict,
        "dilation": shrink,
        "strict_section_ratio": shrink ** (n - 1),
        "strict_verdict": strict.verdict,
        "margin": margin,
        "scale_eps": eps_scale,
        "scale_radius": pair.radius,
        "scale_alpha": pair.alpha,
        "euclidean_convexity": pert.convexity.to_dict() if pert.convexity else None,
        "cap_leakage": pert.leakage,
    }
    return CounterexampleReport(pair.K, pair.L, CurvatureModel(1), bp, min(v for _, v in tried), conv,
                                params, extra)
