"""Deterministic quadrature on spheres, great subspheres and radial intervals.

Everything that integrates in this package goes through here. Sphere
rules are tensor products: a uniform rule in the periodic angle and
Gauss-Gegenbauer rules in the polar angles (plain Gauss-Legendre on S^2).
Radial integrals use either an adaptive Gauss-Kronrod scheme or exact
antiderivatives obtained from the geodesic-distance substitution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np
from scipy import special
from scipy.stats import norm, qmc

from .errors import ToleranceNotReached, UnsupportedDimension, ValidationError


@dataclass(frozen=True)
class QuadratureSpec:
    sphere_resolution: int = 64
    radial_tolerance: float = 1e-10
    max_subdivisions: int = 30

    def __post_init__(self):
        if self.sphere_resolution < 8:
            raise ValidationError("sphere_resolution must be at least 8")
        if not self.radial_tolerance > 0:
            raise ValidationError("radial_tolerance must be positive")
        if self.max_subdivisions < 1:
            raise ValidationError("max_subdivisions must be positive")

    def with_resolution(self, resolution: int) -> "QuadratureSpec":
        return QuadratureSpec(int(resolution), self.radial_tolerance, self.max_subdivisions)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class WeightedNodes:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.weights.shape[0]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


def _circle(res: int):
    phi = 2.0 * pi * np.arange(res) / res
    return np.stack([np.cos(phi), np.sin(phi)], axis=-1), np.full(res, 2.0 * pi / res)


@lru_cache(maxsize=32)
def _sphere_rule(n: int, res: int):
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if n == 2:
        return _circle(res)
    # S^{n-1} = {(t, sqrt(1 - t^2) y)}, measure (1 - t^2)^{(n-3)/2} dt dy
    t, w = special.roots_gegenbauer(res, (n - 2) / 2.0)
    sub_nodes, sub_w = _sphere_rule(n - 1, res)
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate(
        [np.repeat(t, len(sub_w))[:, None], (s[:, None, None] * sub_nodes[None]).reshape(-1, n - 1)],
        axis=1,
    )
    weights = np.outer(w, sub_w).ravel()
    return nodes, weights


def sphere_nodes(n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> WeightedNodes:
    """Product rule on S^{n-1}; the polar axis is the first coordinate."""
    if not 2 <= n <= 5:
        raise UnsupportedDimension(f"sphere rules are provided for 2 <= n <= 5, got {n}")
    nodes, weights = _sphere_rule(int(n), int(spec.sphere_resolution))
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return WeightedNodes(nodes, weights)


def orthonormal_complement(xi) -> np.ndarray:
    """Columns form an orthonormal basis of the hyperplane orthogonal to ``xi``.

    Built from a Householder reflection, so the result is a deterministic
    function of ``xi``.
    """
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[0]
    v = xi.copy()
    v[0] += 1.0 if xi[0] >= 0 else -1.0
    H = np.eye(n) - 2.0 * np.outer(v, v) / np.dot(v, v)
    # H e_0 = -sign(xi_0) xi; the remaining columns span xi-perp
    return H[:, 1:]


def subsphere_nodes(xi, spec: QuadratureSpec = DEFAULT_SPEC) -> WeightedNodes:
    """Nodes on the great subsphere S^{n-1} intersected with xi-perp."""
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[0]
    if not 2 <= n <= 5:
        raise UnsupportedDimension(f"subsphere rules are provided for 2 <= n <= 5, got {n}")
    B = orthonormal_complement(xi)
    if n == 2:
        u = B[:, 0]
        return WeightedNodes(np.stack([u, -u]), np.ones(2))
    sub = sphere_nodes(n - 1, spec)
    nodes = sub.nodes @ B.T
    # strip the rounding component along xi
    nodes = nodes - np.outer(nodes @ xi, xi)
    return WeightedNodes(nodes, sub.weights)


def zonal_nodes(n: int, spec: QuadratureSpec = DEFAULT_SPEC, breakpoints=()) -> tuple[np.ndarray, np.ndarray]:
    """Polar angles and weights integrating zonal functions over S^{n-1}.

    ``sum(w * f(phi))`` approximates the integral of a function that depends
    only on the polar angle ``phi`` from a fixed axis. The rule is composite
    Gauss-Legendre in ``phi``; ``breakpoints`` (angles in (0, pi/2]) mark
    places where the integrand is not smooth and are mirrored to the lower
    hemisphere.
    """
    cuts = {0.0, pi / 4, pi / 2, 3 * pi / 4, pi}
    for b in breakpoints:
        if 0.0 < b < pi:
            cuts.add(float(b))
            cuts.add(float(pi - b))
    cuts = np.array(sorted(cuts))
    cuts = cuts[np.concatenate([[True], np.diff(cuts) > 1e-12])]
    x, w = special.roots_legendre(spec.sphere_resolution)
    lo, hi = cuts[:-1, None], cuts[1:, None]
    phi = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wphi = (0.5 * (hi - lo) * w).ravel()
    weights = sphere_area(n - 1) * np.sin(phi) ** (n - 2) * wphi
    return phi, weights


def sample_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy directions on S^{n-1}."""
    # draw a full power-of-two block (keeps Sobol balance) and truncate
    m = max(int(np.ceil(np.log2(max(count, 1)))), 0)
    if n == 2:
        u = qmc.Sobol(1, scramble=True, seed=seed).random_base2(m)[:count, 0]
        ang = 2 * pi * u
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    u = qmc.Sobol(n, scramble=True, seed=seed).random_base2(m)[:count]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


# -- adaptive Gauss-Kronrod (7/15) -------------------------------------------

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss nodes sit at the odd Kronrod positions
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def adaptive_gk(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 30,
                rtol: float = 0.0, max_panels: int = 4096):
    """Integrate a vectorized ``f`` over [a, b]; returns ``(value, error_estimate)``.

    All unresolved panels of one refinement level are evaluated in a single
    call of ``f``. A panel is accepted once its Gauss/Kronrod discrepancy
    drops below its share of the tolerance.
    """
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    length = b - a
    lo = np.array([a])
    hi = np.array([b])
    total = 0.0
    err_total = 0.0
    for depth in range(max_depth + 1):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        k = half * (fx @ KRONROD_WEIGHTS)
        g = half * (fx @ GAUSS_WEIGHTS)
        err = np.abs(k - g)
        budget = max(tol, rtol * abs(total + k.sum())) * (hi - lo) / length
        # below the rounding floor further splitting cannot help
        floor = 50.0 * np.finfo(float).eps * half * (np.abs(fx) @ KRONROD_WEIGHTS)
        done = err <= np.maximum(budget, floor)
        if (~done).sum() > max_panels:
            raise ToleranceNotReached(
                f"adaptive quadrature on [{a}, {b}] needs more than {max_panels} panels"
            )
        total += k[done].sum()
        err_total += err[done].sum()
        if done.all():
            return sign * total, err_total
        if depth == max_depth:
            rest = err[~done].sum()
            if err_total + rest <= max(tol, rtol * abs(total + k[~done].sum())):
                return sign * (total + k[~done].sum()), err_total + rest
            raise ToleranceNotReached(
                f"adaptive quadrature on [{a}, {b}] stopped at depth {max_depth} "
                f"with error estimate {err_total + rest:.3e} > {tol:.3e}"
            )
        lo, hi, mid = lo[~done], hi[~done], mid[~done]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise AssertionError("unreachable")


def integrate_radial(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over [a, b] (signed if b < a).

    ``f`` must accept numpy arrays.
    """
    value, _ = adaptive_gk(f, float(a), float(b), spec.radial_tolerance, spec.max_subdivisions)
    return value


# -- radial moments of the model volume elements -----------------------------

KINDS = ("volume", "section")


def _exponents(n: int, kind: str):
    if kind == "volume":
        return n - 1, n
    if kind == "section":
        return n - 2, n - 1
    raise ValidationError(f"kind must be 'volume' or 'section', got {kind!r}")


def radial_integrand(n: int, delta: int, kind: str = "volume"):
    """``r^j / (1 + delta r^2)^k`` with (j, k) = (n-1, n) or (n-2, n-1)."""
    j, k = _exponents(n, kind)

    def f(r):
        r = np.asarray(r, dtype=float)
        return r ** j / (1.0 + delta * r * r) ** k

    return f


def _power_integral(S, m: int, delta: int):
    """Integral of sinh^m (delta=-1) or sin^m (delta=+1) over [0, S]."""
    if delta < 0:
        sh, ch = np.sinh(S), np.cosh(S)
        prev2, prev1 = S, 2.0 * np.sinh(0.5 * S) ** 2
        if m == 0:
            return prev2
        for i in range(2, m + 1):
            prev2, prev1 = prev1, sh ** (i - 1) * ch / i - (i - 1) / i * prev2
        return prev1
    sn, cs = np.sin(S), np.cos(S)
    prev2, prev1 = S, 2.0 * np.sin(0.5 * S) ** 2
    if m == 0:
        return prev2
    for i in range(2, m + 1):
        prev2, prev1 = prev1, -sn ** (i - 1) * cs / i + (i - 1) / i * prev2
    return prev1


def radial_moment(rho, n: int, delta: int, kind: str = "volume"):
    """Exact ``int_0^rho r^j / (1 + delta r^2)^k dr`` (vectorized).

    Small radii use the hypergeometric series, larger ones the substitution
    ``r = tanh(s/2)`` (``tan(s/2)`` for delta = +1) which turns the
    integrand into a power of sinh (sin).
    """
    j, k = _exponents(n, kind)
    rho = np.asarray(rho, dtype=float)
    if delta == 0:
        return rho ** (j + 1) / (j + 1)
    out = np.empty_like(rho)
    small = rho < 0.5
    rs = rho[small]
    out[small] = rs ** (j + 1) / (j + 1) * special.hyp2f1(k, (j + 1) / 2.0, (j + 3) / 2.0, -delta * rs * rs)
    rl = rho[~small]
    if rl.size:
        S = 2.0 * (np.arctanh(rl) if delta < 0 else np.arctan(rl))
        out[~small] = _power_integral(S, j, delta) / 2.0 ** (j + 1)
    return out


def radial_moment_adaptive(rho: float, n: int, delta: int, kind: str = "volume",
                           spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Same integral as :func:`radial_moment` by adaptive quadrature.

    For delta = -1 and rho > 0.95 the integral is taken in the variable
    ``s`` with ``r = tanh(s/2)``, which removes the blow-up at r = 1.
    """
    f = radial_integrand(n, delta, kind)
    if delta < 0 and rho > 0.95:
        j, k = _exponents(n, kind)

        def g(s):
            r = np.tanh(0.5 * s)
            # 1 - r^2 without cancellation
            q = 1.0 / np.cosh(0.5 * s) ** 2
            return r ** j * q ** (1 - k) * 0.5
        return integrate_radial(g, 0.0, 2.0 * np.arctanh(rho), spec)
    return integrate_radial(f, 0.0, rho, spec)


def radial_moment_inverse(value, n: int, delta: int, kind: str = "volume", iters: int = 100):
    """Radius whose radial moment equals ``value`` (vectorized, value >= 0).

    Safeguarded Newton iteration; the moment is strictly increasing in the
    radius, so the root is unique.
    """
    j, k = _exponents(n, kind)
    value = np.asarray(value, dtype=float)
    if np.any(value < 0):
        raise ValidationError("radial moment must be non-negative")
    guess = ((j + 1) * value) ** (1.0 / (j + 1))
    if delta == 0:
        return guess
    f = radial_integrand(n, delta, kind)
    lo = np.zeros_like(value)
    hi = np.ones_like(value) if delta < 0 else np.full_like(value, 1e6)
    r = np.clip(guess, 0.0, 0.999 if delta < 0 else 1e5)
    for _ in range(iters):
        F = radial_moment(r, n, delta, kind) - value
        lo = np.where(F <= 0, r, lo)
        hi = np.where(F > 0, r, hi)
        d = f(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0, F / d, np.inf)
        cand = r - step
        bad = ~np.isfinite(cand) | (cand <= lo) | (cand >= hi)
        new = np.where(bad, 0.5 * (lo + hi), cand)
        if np.all(np.abs(new - r) <= 1e-15 * np.maximum(r, 1e-300)):
            r = new
            break
        r = new
    return np.where(value == 0, 0.0, r)
