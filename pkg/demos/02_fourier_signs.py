"""Where the Fourier transform of ||x||^{-1} changes sign.

For a convex body in flat R^3 the transform of ||x||^{-1} is positive. The
hyperbolic construction instead looks at the auxiliary body M obtained by
straightening spherical geodesics of the cylinder with geodesic caps. M
is a flared solid whose parallel sections grow away from the centre, and
its transform is negative around the axis.
"""

import numpy as np

from bpgeom import Ball, build_cylinder_caps, curvature_map, fourier_minkowski_power
from bpgeom.core import polar_directions

axis = np.array([1.0, 0.0, 0.0])
print("unit ball, k = 1:", fourier_minkowski_power(Ball(3, 1.0), 1, axis), "expected", 4 * np.pi)

caps = build_cylinder_caps(3)
M = curvature_map(caps, -1)
print("cylinder with caps: equatorial radius", caps.radial(np.array([[0, 1.0, 0]]))[0],
      "apex", caps.radial(axis[None])[0])
print("auxiliary body: flat ends at x =", M.radial(axis[None])[0])

print("\npolar angle   Fourier value of ||x||_M^{-1}")
for phi in (0.0, 0.15, 0.3, 0.45):
    xi = polar_directions(axis, [phi])[0]
    val = fourier_minkowski_power(M, 1, xi, strict=False)
    print(f"  {phi:5.2f}       {val:10.4f}")
print("the bound -2 pi =", -2 * np.pi, "holds at the axis")
