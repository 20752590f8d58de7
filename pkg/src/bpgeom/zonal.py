"""Even zonal functions stored as Gegenbauer series."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .core import unit
from .errors import UnsupportedDimension

L_MAX = 48


def gegenbauer_table(lmax: int, lam: float, t) -> np.ndarray:
    """``C_m^lam(t)`` for m = 0..lmax stacked along a new first axis."""
    t = np.asarray(t, dtype=float)
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = 2.0 * lam * t
    for m in range(1, lmax):
        out[m + 1] = (2.0 * t * (m + lam) * out[m] - (m + 2.0 * lam - 1.0) * out[m - 1]) / (m + 1)
    return out


@lru_cache(maxsize=16)
def _projection_rule(n: int, lmax: int):
    lam = (n - 2) / 2.0
    t, w = special.roots_gegenbauer(4 * max(lmax, 4), lam)
    table = gegenbauer_table(lmax, lam, t)[0::2]
    norms = (table * table) @ w
    return t, w, table, norms


@dataclass(frozen=True, eq=False)
class ZonalFunction:
    """Even function on S^{n-1} invariant under rotations about ``axis``.

    ``coeffs[i]`` multiplies ``C_{2i}^{(n-2)/2}(<theta, axis>)``. ``tail``
    is the weighted RMS of what the truncated series failed to capture when
    the function was projected from samples (zero for exact series).
    """

    axis: np.ndarray
    n: int
    coeffs: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        if self.n < 3:
            raise UnsupportedDimension("zonal Gegenbauer series need n >= 3")
        object.__setattr__(self, "axis", unit(self.axis))
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float).copy())

    @property
    def lam(self) -> float:
        return (self.n - 2) / 2.0

    @property
    def degrees(self) -> np.ndarray:
        return 2 * np.arange(len(self.coeffs))

    @property
    def lmax(self) -> int:
        return int(self.degrees[-1])

    def at_cos(self, t):
        t = np.asarray(t, dtype=float)
        table = gegenbauer_table(self.lmax, self.lam, t)[0::2]
        return np.tensordot(self.coeffs, table, axes=(0, 0))

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        t = np.clip(theta @ self.axis, -1.0, 1.0)
        return self.at_cos(t)

    def scaled(self, factor: float) -> "ZonalFunction":
        return ZonalFunction(self.axis, self.n, factor * self.coeffs, abs(factor) * self.tail)

    def with_coeffs(self, coeffs, tail=None) -> "ZonalFunction":
        return ZonalFunction(self.axis, self.n, coeffs, self.tail if tail is None else tail)

    @classmethod
    def project(cls, f, axis, n: int, lmax: int = L_MAX) -> "ZonalFunction":
        """Project ``f(t)``, a function of the cosine of the polar angle.

        Uses Gauss-Gegenbauer quadrature with ``4 * lmax`` nodes; only even
        degrees are kept.
        """
        if n < 3:
            raise UnsupportedDimension("zonal Gegenbauer series need n >= 3")
        lmax = int(lmax) - int(lmax) % 2
        t, w, table, norms = _projection_rule(n, lmax)
        vals = np.asarray(f(t), dtype=float)
        coeffs = (table * vals) @ w / norms
        resid = vals - coeffs @ table
        tail = float(np.sqrt((w * resid * resid).sum() / w.sum()))
        return cls(axis, n, coeffs, tail)

    def to_dict(self) -> dict:
        return {"axis": self.axis.tolist(), "n": self.n, "coeffs": self.coeffs.tolist(), "tail": self.tail}
