"""From a flat counterexample in R^5 to one in the hemisphere model.

The l_4 ball in R^5 is not an intersection body: the order-3 transform of
its norm is negative near a coordinate axis. Perturbing it there gives a
flat pair with smaller sections and larger volume. Dilating K slightly
makes both inequalities strict, and shrinking the pair into a small ball
(where the spherical density is almost constant) carries them over to the
spherical model.
"""

from bpgeom import counterexample_sphere, scale_radius

print("radius for a 10% density window in R^5:", scale_radius(0.1, 5))

rep = counterexample_sphere()
x = rep.extra
print("probe values (direction, value):")
for d, v in x["probes"]:
    print("  ", [round(c, 3) for c in d], round(v, 3))
print(f"flat stage: verdict {x['euclidean_verdict']}, relative volume gain {x['euclidean_gain']:.3e}")
print(f"dilation {x['dilation']:.9f} -> strict verdict {x['strict_verdict']}, margin {x['margin']:.3e}")
print(f"scaled into radius {x['scale_radius']:.3e} (factor {x['scale_alpha']:.3e})")
print(f"spherical stage: verdict {rep.verdict}, s-convex K {rep.convexity['K'].s_convex}, "
      f"L {rep.convexity['L'].s_convex}")
print(f"  sections: max gap {rep.bp.max_section_gap:.3e} against tolerance {rep.bp.section_tolerance:.3e}")
print(f"  volumes: K {rep.bp.vol_K:.6e}, L {rep.bp.vol_L:.6e}")
