"""Shared data model: curvature models, directions and comparison reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ParameterOutOfRange, ValidationError

MIN_DIM = 2
MAX_DIM = 5

# sup rho allowed for bodies living in the curved models
MODEL_MARGIN = 1e-9

_FLAGS = {"h": -1, "e": 0, "s": 1}
_NAMES = {-1: "hyperbolic", 0: "euclidean", 1: "spherical"}


@dataclass(frozen=True)
class CurvatureModel:
    """Curvature sign of the ball model ``ds^2 = 4|dx|^2 / (1 + delta |x|^2)^2``.

    ``delta = -1`` is the Poincare ball, ``0`` flat space and ``+1`` the
    stereographic image of an open hemisphere.
    """

    delta: int

    def __post_init__(self):
        if self.delta not in (-1, 0, 1):
            raise ValidationError(f"delta must be -1, 0 or +1, got {self.delta!r}")

    @classmethod
    def from_flag(cls, flag) -> "CurvatureModel":
        if isinstance(flag, CurvatureModel):
            return flag
        if isinstance(flag, (int, np.integer)):
            return cls(int(flag))
        try:
            return cls(_FLAGS[str(flag).lower()[0]])
        except (KeyError, IndexError):
            raise ValidationError(f"unknown model flag {flag!r}; use e, h or s") from None

    @property
    def name(self) -> str:
        return _NAMES[self.delta]

    @property
    def flag(self) -> str:
        return {v: k for k, v in _FLAGS.items()}[self.delta]

    @property
    def curved(self) -> bool:
        return self.delta != 0


HYPERBOLIC = CurvatureModel(-1)
EUCLIDEAN = CurvatureModel(0)
SPHERICAL = CurvatureModel(1)


def check_dimension(n: int) -> int:
    n = int(n)
    if not MIN_DIM <= n <= MAX_DIM:
        raise ParameterOutOfRange(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {n}")
    return n


def unit(x) -> np.ndarray:
    """Normalize the last axis of ``x`` to unit Euclidean length."""
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def as_direction(coords, n: Optional[int] = None, tol: float = 1e-12) -> np.ndarray:
    """Validate a unit vector, returning a float copy.

    Raises :class:`DimensionMismatch` when ``n`` is given and differs from
    the vector length, and :class:`ValidationError` when the norm is off
    by more than ``tol``.
    """
    xi = np.array(coords, dtype=float)
    if xi.ndim != 1:
        raise ValidationError("a direction is a single vector")
    if n is not None and xi.shape[0] != n:
        raise DimensionMismatch(f"direction has length {xi.shape[0]}, expected {n}")
    if abs(np.linalg.norm(xi) - 1.0) > tol:
        raise ValidationError(f"direction is not a unit vector (|xi| = {np.linalg.norm(xi)!r})")
    return xi


def basis_vector(n: int, i: int = 0) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def polar_directions(axis, angles) -> np.ndarray:
    """Unit vectors at polar angles ``angles`` from ``axis``.

    All of them lie in one fixed 2-plane through the axis, which is enough
    to sample any function that is rotation invariant about the axis.
    """
    axis = unit(axis)
    n = axis.shape[0]
    # deterministic perpendicular: first basis vector least aligned with the axis
    e = basis_vector(n, int(np.argmin(np.abs(axis))))
    perp = unit(e - np.dot(e, axis) * axis)
    angles = np.asarray(angles, dtype=float)
    return np.cos(angles)[..., None] * axis + np.sin(angles)[..., None] * perp


VERDICTS = ("consistent", "counterexample", "inconclusive")


@dataclass
class BPReport:
    """Outcome of comparing central sections and volumes of two bodies."""

    model: CurvatureModel
    directions: np.ndarray
    section_K: np.ndarray
    section_L: np.ndarray
    vol_K: float
    vol_L: float
    max_section_gap: float
    verdict: str
    witness: np.ndarray
    section_tolerance: float = 1e-8
    volume_margin: float = 1e-6
    angles: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @property
    def gaps(self) -> np.ndarray:
        return self.section_K - self.section_L

    @property
    def volume_gap(self) -> float:
        return self.vol_K - self.vol_L

    def to_dict(self) -> dict:
        out = {
            "model": self.model.name,
            "delta": self.model.delta,
            "directions": self.directions.tolist(),
            "section_K": self.section_K.tolist(),
            "section_L": self.section_L.tolist(),
            "vol_K": float(self.vol_K),
            "vol_L": float(self.vol_L),
            "max_section_gap": float(self.max_section_gap),
            "verdict": self.verdict,
            "witness": np.asarray(self.witness).tolist(),
            "section_tolerance": self.section_tolerance,
            "volume_margin": self.volume_margin,
        }
        if self.angles is not None:
            out["angles"] = np.asarray(self.angles).tolist()
        if self.extra:
            out["extra"] = dict(self.extra)
        return out


def decide_verdict(max_gap: float, vol_K: float, vol_L: float,
                   section_tolerance: float = 1e-8, volume_margin: float = 1e-6) -> str:
    """Classify a comparison.

    ``counterexample`` needs every section of K at most the matching
    section of L (up to ``section_tolerance``) while K is strictly larger
    by a relative ``volume_margin``. If the section condition fails the
    comparison says nothing about volumes and is ``inconclusive``.
    """
    if max_gap > section_tolerance:
        return "inconclusive"
    if vol_K - vol_L > volume_margin * abs(vol_L):
        return "counterexample"
    return "consistent"
