#!/usr/bin/env python3
"""Warping densities: admissibility, radial measures, blow-up rescaling.

A density f on [0, R] defines the surface [0, R] x_f S^1 with length element
sqrt(dr^2 + f(r)^2 dtheta^2).  The two log families collapse a point and a
disk respectively; both are admissible exactly on the domains where they are
increasing, and their blow-ups f_alpha(r) = f(alpha r)/alpha stay closed
form.
"""

import math

import numpy as np

from warpdisk import (
    DensitySpec,
    ball_area,
    check_admissibility,
    circle_length,
    cone_angle,
    eval_density,
    geoest_check,
    rescale,
)

densities = {
    "flat": DensitySpec.flat(),
    "cone(3pi)": DensitySpec.cone(3 * math.pi),
    "log-e0": DensitySpec.log_e0(),
    "loglog-e1": DensitySpec.loglog_e1(),
}

print("admissibility gate")
for name, spec in densities.items():
    rep = check_admissibility(spec)
    print(f"  {name:10s} R={spec.R:.4f} passed={rep.passed}")

r = np.linspace(0.0, 1.0, 65)
bad = DensitySpec.from_table(r, r / 2.0)
rep = check_admissibility(bad)
print(f"  r/2 table  fails (b): witness r={rep.cond_b.witness[0]:.3g}, "
      f"f(r)={rep.cond_b.witness[1]:.3g}")

rr = np.concatenate([[0.0], np.geomspace(1e-10, 1.0, 200)])
rep = check_admissibility(DensitySpec.from_table(rr, np.sqrt(rr)))
a, rw, ratio = rep.cond_c.witness
print(f"  sqrt table fails (c): rescaling ratio -> {ratio:.3f} "
      f"(= r^-1/2 = {rw ** -0.5:.3f}), not 1")

print("\nradial measures of log-e0 at r = 1/e")
spec = densities["log-e0"]
r0 = math.exp(-1.0)
print(f"  f(1/e)       = {eval_density(spec, r0):.6f}  (= 1/e)")
print(f"  circle length = {circle_length(spec, r0):.6f}  (= 2*pi/e)")
print(f"  ball area     = {ball_area(spec, r0):.6f}  (= 3*pi/2 * e^-2)")

print("\nblow-up rescaling and comparison cones")
for alpha in (1e-1, 1e-2, 1e-3, 1e-4):
    fa = rescale(spec, alpha)
    beta = cone_angle(spec, alpha)
    print(f"  alpha={alpha:7.0e}: f_alpha(1)={eval_density(fa, 1.0):8.4f}"
          f"  cone angle beta={beta:8.4f} (= 2*pi*log(1/alpha))")

print("\nball/circle estimates on a log grid")
rep = geoest_check(spec, np.geomspace(1e-6, 0.99 * spec.R, 60))
print(f"  |B| <= r*l(S): {rep.area_bound_ok};  2*pi*r <= l(S): {rep.lower_bound_ok};"
      f"  empirical doubling constant C = {rep.C_emp:.4f}")
