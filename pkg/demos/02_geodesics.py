#!/usr/bin/env python3
"""Distances on warped disks: Clairaut solver, cones, and the grid oracle."""

import math

import numpy as np

from warpdisk import (
    DensitySpec,
    SurfacePoint,
    clairaut_geodesic,
    cone_distance,
    distortion_estimate,
    grid_distance_oracle,
)

print("cone cross-check (closed form vs Clairaut machinery)")
rng = np.random.default_rng(1)
for beta in (2 * math.pi, 3 * math.pi):
    spec = DensitySpec.cone(beta)
    worst = 0.0
    for _ in range(100):
        p = SurfacePoint(rng.uniform(0, 1), rng.uniform(-math.pi, math.pi))
        q = SurfacePoint(rng.uniform(0, 1), rng.uniform(-math.pi, math.pi))
        worst = max(worst, abs(clairaut_geodesic(spec, p, q).distance
                               - cone_distance(beta, p, q)))
    print(f"  beta={beta:.3f}: max deviation over 100 pairs = {worst:.2e}")

print("\nlog-e0 samples (solver vs shortest-path upper bound)")
spec = DensitySpec.log_e0()
pairs = [((1e-3, 0.0), (1e-3, math.pi)),
         ((2e-3, 0.3), (1.5e-3, -0.7)),
         ((0.3, 0.0), (0.25, 0.5))]
for (r1, t1), (r2, t2) in pairs:
    p, q = SurfacePoint(r1, t1), SurfacePoint(r2, t2)
    g = clairaut_geodesic(spec, p, q)
    ub = grid_distance_oracle(spec, p, q, (128, 512))
    print(f"  d(({r1:g},{t1:g}), ({r2:g},{t2:g})) = {g.distance:.6g}"
          f"  [{g.kind}]  oracle/distance = {ub / g.distance:.4f}")

print("\nbi-Lipschitz defect against the comparison cone (k = 1/2)")
for alpha in (1e-1, 1e-2, 1e-3):
    d = distortion_estimate(spec, alpha, k=0.5, n=40, seed=7)
    print(f"  alpha={alpha:7.0e}: delta_hat = {d:.4f}"
          f"   (annulus sup is log2/log(1/alpha) = {math.log(2) / math.log(1 / alpha):.4f})")
