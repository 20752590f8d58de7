"""Geodesics of the three ball models, curvature maps and convexity sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .bodies import Mapped, RadialBody
from .core import CurvatureModel
from .errors import AntipodalPair, ModelDomainError, ParameterOutOfRange, PointOutsideModel
from .quadrature import sample_directions


@dataclass(frozen=True)
class GeodesicSpec:
    p: np.ndarray
    q: np.ndarray
    delta: CurvatureModel

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        if p.shape != q.shape or p.ndim != 1:
            raise ParameterOutOfRange("p and q must be vectors of equal length")
        model = CurvatureModel.from_flag(self.delta)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "delta", model)
        if model.curved and (np.linalg.norm(p) >= 1.0 or np.linalg.norm(q) >= 1.0):
            raise PointOutsideModel("geodesic endpoints must lie in the open unit ball")
        if model.delta == 1 and np.linalg.norm(p + q) <= 1e-12 * max(np.linalg.norm(p), 1.0) \
                and np.linalg.norm(p) > 0:
            raise AntipodalPair("p = -q: the spherical geodesic is not treated as unique")


def _plane_frames(P, Q):
    """Orthonormal (e1, e2) with P = a e1 and Q = b1 e1 + b2 e2, b2 >= 0."""
    a = np.linalg.norm(P, axis=-1)
    e1 = P / np.where(a > 0, a, 1.0)[..., None]
    b1 = np.sum(Q * e1, axis=-1)
    rest = Q - b1[..., None] * e1
    b2 = np.linalg.norm(rest, axis=-1)
    e2 = rest / np.where(b2 > 0, b2, 1.0)[..., None]
    return a, b1, b2, e1, e2


def _arcs(P, Q, delta: int):
    """Circle data for each pair, or a straight-line mask.

    Returns ``(line, e1, e2, C, R, start, sweep)`` where points are
    ``C + R (cos, sin)(start + t * sweep)`` in the (e1, e2) plane.
    """
    a, b1, b2, e1, e2 = _plane_frames(P, Q)
    scale = np.maximum(np.maximum(a, np.hypot(b1, b2)), 1e-300)
    line = (delta == 0) | (a <= 1e-14) | (b2 <= 1e-12 * scale)
    a_ = np.where(line, 1.0, a)
    b2_ = np.where(line, 1.0, b2)
    c1 = (a_ * a_ - delta) / (2.0 * a_)
    c2 = ((b1 * b1 + b2_ * b2_ - delta) / 2.0 - b1 * c1) / b2_
    R = np.sqrt(np.maximum(c1 * c1 + c2 * c2 + delta, 0.0))
    start = np.arctan2(-c2, a_ - c1)
    end = np.arctan2(b2_ - c2, b1 - c1)
    short = np.angle(np.exp(1j * (end - start)))
    long_ = short - 2.0 * np.pi * np.sign(short)
    mid_s = np.hypot(c1 + R * np.cos(start + short / 2), c2 + R * np.sin(start + short / 2))
    mid_l = np.hypot(c1 + R * np.cos(start + long_ / 2), c2 + R * np.sin(start + long_ / 2))
    sweep = np.where(mid_s <= mid_l, short, long_)
    return line, e1, e2, np.stack([c1, c2], axis=-1), R, start, sweep


def geodesic_points(P, Q, delta: int, ts) -> np.ndarray:
    """Points on the delta-geodesic segments from ``P[i]`` to ``Q[i]``.

    ``ts`` are fractions of the *Euclidean turning angle* of the arc, which
    is the cheap parametrization used by the convexity sampler. Returns an
    array of shape ``(len(P), len(ts), n)``.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    ts = np.asarray(ts, dtype=float)
    line, e1, e2, C, R, start, sweep = _arcs(P, Q, delta)
    ang = start[:, None] + ts[None, :] * sweep[:, None]
    X = C[:, 0, None] + R[:, None] * np.cos(ang)
    Y = C[:, 1, None] + R[:, None] * np.sin(ang)
    arc = X[..., None] * e1[:, None, :] + Y[..., None] * e2[:, None, :]
    seg = P[:, None, :] + ts[None, :, None] * (Q - P)[:, None, :]
    return np.where(line[:, None, None], seg, arc)


def geodesic_point(spec: GeodesicSpec, t):
    """Point at fraction ``t`` of the delta-arc-length along the segment p -> q.

    ``t`` may be a scalar or an array; ``t = 0`` and ``t = 1`` return p and
    q exactly. The arc-length fraction uses the model metric
    ``2 |dx| / (1 + delta |x|^2)``.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0) | (t_arr > 1)):
        raise ParameterOutOfRange("geodesic parameter must lie in [0, 1]")
    delta = spec.delta.delta
    grid = np.linspace(0.0, 1.0, 4097)
    pts = geodesic_points(spec.p, spec.q, delta, grid)[0]
    speed = np.linalg.norm(np.gradient(pts, grid, axis=0), axis=-1) * 2.0 \
        / (1.0 + delta * np.sum(pts * pts, axis=-1))
    s = cumulative_trapezoid(speed, grid, initial=0.0)
    if s[-1] > 0:
        u = np.interp(t_arr.ravel(), s / s[-1], grid)
    else:
        u = t_arr.ravel()
    out = geodesic_points(spec.p, spec.q, delta, u)[0]
    flat = t_arr.ravel()
    out[flat == 0.0] = spec.p
    out[flat == 1.0] = spec.q
    return out[0] if t_arr.ndim == 0 else out.reshape(t_arr.shape + (len(spec.p),))


def curvature_map(body: RadialBody, sigma: int) -> Mapped:
    """Body with radial function ``rho / (1 + sigma rho^2)``.

    For ``sigma = +1`` this straightens hyperbolic geodesics, for
    ``sigma = -1`` spherical ones.
    """
    if sigma not in (-1, 1):
        raise ParameterOutOfRange("sigma must be +1 or -1")
    if sigma == -1 and body.rho_max >= 1.0:
        raise ModelDomainError(f"sigma = -1 needs sup rho < 1, got {body.rho_max!r}")
    return Mapped(body, sigma)


def inverse_curvature_map(body: RadialBody, sigma: int) -> RadialBody:
    """Undo :func:`curvature_map`, picking the root of the quadratic in (0, 1)."""
    if sigma not in (-1, 1):
        raise ParameterOutOfRange("sigma must be +1 or -1")
    if isinstance(body, Mapped) and body.sigma == sigma and not body.inverse:
        return body.base
    if sigma == 1 and body.rho_max > 0.5:
        raise ModelDomainError("rho / (1 + rho^2) never exceeds 1/2")
    return Mapped(body, sigma, inverse=True)


# -- convexity certificates --------------------------------------------------

FLAGS = ("yes", "no", "boundary")
_MODEL_KEYS = {-1: "h_convex", 0: "e_convex", 1: "s_convex"}


@dataclass(frozen=True)
class ConvexitySpec:
    pairs: int = 2000
    points: int = 64
    seed: int = 0
    tau: float = 1e-9
    tau_margin: float = 1e-6
    near_angle: float = 0.05


@dataclass
class ConvexityVerdict:
    """Sampled convexity certificate for the three geodesic families.

    ``witness`` holds the worst failing pair (endpoints, model and turning
    angle fraction) and is present exactly when some flag is ``no``.
    ``excess`` records ``max ||x||_K - 1`` over interior geodesic points.
    """

    e_convex: str
    h_convex: str
    s_convex: str
    witness: Optional[dict] = None
    excess: dict = field(default_factory=dict)

    def flag(self, model) -> str:
        return getattr(self, _MODEL_KEYS[CurvatureModel.from_flag(model).delta])

    def to_dict(self) -> dict:
        return {"e_convex": self.e_convex, "h_convex": self.h_convex, "s_convex": self.s_convex,
                "witness": self.witness, "excess": dict(self.excess)}


def _boundary_pairs(body: RadialBody, spec: ConvexitySpec):
    n = body.n
    half = spec.pairs // 2
    dirs = sample_directions(n, spec.pairs + half, seed=spec.seed)
    far_a, far_b, base = dirs[:half], dirs[half:2 * half], dirs[2 * half:]
    # a second, independent stream gives the tangent offsets of the near pairs
    jitter = sample_directions(n, len(base), seed=spec.seed + 1)
    tang = jitter - np.sum(jitter * base, axis=1, keepdims=True) * base
    tang /= np.maximum(np.linalg.norm(tang, axis=1, keepdims=True), 1e-300)
    near_b = np.cos(spec.near_angle) * base + np.sin(spec.near_angle) * tang
    A = np.concatenate([far_a, base])
    B = np.concatenate([far_b, near_b])
    rho_a = body.radial(A)
    rho_b = body.radial(B)
    P, Q = rho_a[:, None] * A, rho_b[:, None] * B
    # drop degenerate (near-coincident or antipodal) pairs
    keep = (np.linalg.norm(P - Q, axis=1) > spec.tau_margin * np.maximum(rho_a, rho_b)) & \
           (np.linalg.norm(P + Q, axis=1) > spec.tau_margin * np.maximum(rho_a, rho_b))
    return P[keep], Q[keep]


def classify_convexity(body: RadialBody, spec: ConvexitySpec = ConvexitySpec(),
                       models=(-1, 0, 1)) -> ConvexityVerdict:
    """Certify delta-convexity by testing geodesics between sampled boundary points.

    Half of the pairs join independent directions, half join nearby ones
    (angular offset ``near_angle``) to probe local curvature. A family is
    ``no`` if some interior geodesic point has ``||x|| > 1 + tau``,
    ``boundary`` if the worst point is within ``tau`` of the boundary and
    ``yes`` otherwise. Pairs closer than ``tau_margin`` are discarded.
    Models not requested are reported as ``"unchecked"``.
    """
    P, Q = _boundary_pairs(body, spec)
    ts = (np.arange(1, spec.points + 1) - 0.5) / spec.points
    flags = {k: "unchecked" for k in _MODEL_KEYS.values()}
    excess = {}
    witness = None
    worst_no = -np.inf
    for delta in models:
        if delta != 0 and body.rho_max >= 1.0:
            flags[_MODEL_KEYS[delta]] = "no"
            continue
        m_all = np.empty(len(P))
        i_all = np.empty(len(P), dtype=int)
        for s in range(0, len(P), 256):
            pts = geodesic_points(P[s:s + 256], Q[s:s + 256], delta, ts)
            N = body.minkowski(pts) - 1.0
            i_all[s:s + 256] = np.argmax(N, axis=1)
            m_all[s:s + 256] = N[np.arange(N.shape[0]), i_all[s:s + 256]]
        j = int(np.argmax(m_all))
        m = float(m_all[j])
        excess[_MODEL_KEYS[delta]] = m
        if m > spec.tau:
            flag = "no"
            if m > worst_no:
                worst_no = m
                witness = {"model": CurvatureModel(delta).flag, "p": P[j].tolist(), "q": Q[j].tolist(),
                           "t": float(ts[i_all[j]]), "excess": m}
        elif m >= -spec.tau:
            flag = "boundary"
        else:
            flag = "yes"
        flags[_MODEL_KEYS[delta]] = flag
    return ConvexityVerdict(flags["e_convex"], flags["h_convex"], flags["s_convex"], witness, excess)
