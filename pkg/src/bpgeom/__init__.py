"""Busemann-Petty comparisons of star bodies in the ball models of constant curvature."""

from .bodies import (Ball, CylinderCaps, Ellipsoid, LqBall, Mapped, Perturbed, RadialBody, Scaled,
                     Strictified, ZonalTable, body_from_spec, evaluate_radial, validate_body)
from .core import (EUCLIDEAN, HYPERBOLIC, SPHERICAL, BPReport, CurvatureModel, as_direction,
                   decide_verdict)
from .engine import (CounterexampleReport, PerturbationSpec, bp_compare, build_cylinder_caps,
                     build_perturbation, counterexample_hyperbolic, counterexample_sphere,
                     perturb_body, positive_definiteness_report, scale_pair, scale_radius,
                     zvavitch_inequality)
from .errors import BPError, NumericalError, ValidationError
from .geometry import (ConvexitySpec, ConvexityVerdict, GeodesicSpec, classify_convexity,
                       curvature_map, geodesic_point, inverse_curvature_map)
from .harmonic import (HomogeneousSpec, fourier_minkowski_power, multiplier, parseval_pairing,
                       radon_fourier_consistency, section_volume_via_fourier, spherical_radon,
                       zonal_fourier)
from .measures import (SectionProfile, parallel_section_profile, profile_derivative_at_zero,
                       section_volume, volume)
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .report import render_report
from .zonal import ZonalFunction

__version__ = "0.1.0"
