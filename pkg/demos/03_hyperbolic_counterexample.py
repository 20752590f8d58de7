"""Two h-convex bodies in the Poincare ball: K has smaller sections but more volume.

L is the strictified cylinder with spherical geodesic caps. K adds a small
zonal term to L's section moment, chosen so that every central section of
K shrinks (by a multiple of a non-positive cap function v) while the
volume grows, which is possible because the Fourier transform tied to L
is negative where v lives.
"""

import sys
from pathlib import Path

import numpy as np

from bpgeom import counterexample_hyperbolic, render_report

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("hyperbolic_demo")
out.mkdir(exist_ok=True)

for n in (3, 4):
    rep = counterexample_hyperbolic(n)
    bp = rep.bp
    print(f"n = {n}: verdict {rep.verdict}")
    print(f"  epsilon {rep.parameters['epsilon']:.4g} after {rep.extra['epsilon_attempts']} attempt(s)")
    print(f"  largest section gap S_K - S_L = {bp.max_section_gap:.3e}")
    print(f"  vol K = {bp.vol_K:.9f}, vol L = {bp.vol_L:.9f}, relative gain {rep.extra['relative_volume_gain']:.3e}")
    print(f"  h-convex: K {rep.convexity['K'].h_convex}, L {rep.convexity['L'].h_convex}")
    print(f"  Fourier values on the cap: {np.round(rep.extra['fourier_values'], 3).tolist()}")
    for fmt in ("json", "csv", "svg"):
        (out / f"hyperbolic{n}.{fmt}").write_bytes(render_report(rep, fmt))
print("reports written to", out.resolve())
