"""Volumes and central sections of one body in three geometries.

The same Euclidean set, read in the Poincare ball (delta = -1), in flat
space (delta = 0) and in the open hemisphere (delta = +1), has different
volumes because the conformal densities differ. Balls have closed forms,
so they double as a check.
"""

import numpy as np

from bpgeom import Ball, Ellipsoid, section_volume, volume

e1 = np.array([1.0, 0.0, 0.0])

print("unit ball, flat R^3: volume", volume(Ball(3, 1.0), "e"), "expected", 32 * np.pi / 3)
print("hyperbolic disk of radius 1:", volume(Ball(2, np.tanh(0.5)), "h"), "expected", 2 * np.pi * (np.cosh(1) - 1))
print("near-full hemisphere:", volume(Ball(2, 1 - 1e-9), "s"), "expected", 2 * np.pi)

body = Ellipsoid((0.6, 0.4, 0.3))
print("\nellipsoid (0.6, 0.4, 0.3)")
for model in ("h", "e", "s"):
    sections = [section_volume(body, model, xi) for xi in np.eye(3)]
    print(f"  {model}: volume {volume(body, model):.6f}  sections " + " ".join(f"{s:.6f}" for s in sections))

# volumes shrink as curvature grows: the density 1/(1 + delta r^2)^n orders the models
print("\nordering s <= e <= h holds:", volume(body, "s") <= volume(body, "e") <= volume(body, "h"))
