#!/usr/bin/env python3
"""Almost-isoperimetric curves are chord-arc: the planar contrapositive.

The window parameters (delta, lambda) give the explicit defect

    eps = (delta+1)^2/(delta^2 + K*delta + 1) - 1,  K = 4/lambda + 2/lambda^2,

and every generated curve failing the chord-arc scan must have enclosed area
below (1/(4*pi))/(1+eps) times its squared length.
"""

import numpy as np

from warpdisk.chordarc import (
    EUCLIDEAN_ISO,
    barbell,
    check_chord_arc,
    epsilon_for,
    planar_iso_ratio,
    unit_circle,
    verify_lemma31,
)

print(f"defect at the reference window: eps(0.5, 3) = {epsilon_for(0.5, 3.0):.6f}")

print("\nthe unit circle is (0.9, 2)-chord-arc (worst arc/chord is pi/2):")
print(f"  passes at lambda=2.0:  {check_chord_arc(unit_circle(512), 0.9, 2.0).passed}")
print(f"  passes at lambda=1.55: {check_chord_arc(unit_circle(512), 0.9, 1.55).passed}")

rng = np.random.default_rng(5)
thin = barbell(rng, neck=0.01)
rep = check_chord_arc(thin, 0.9, 3.0)
x, y, l1, l2, d = rep.witness
print("\na thin-neck barbell fails: witness arcs "
      f"l1={l1:.3f}, l2={l2:.3f} at distance {d:.3f}")
print(f"  its isoperimetric ratio {planar_iso_ratio(thin):.4f} is well below "
      f"1/(4*pi) = {EUCLIDEAN_ISO:.4f}")

print("\ncontrapositive verification over seeded families")
for family in ("fourier", "barbell", "stadium"):
    rep = verify_lemma31(family, 0.5, 3.0, n_samples=200, seed=11)
    margin = "n/a" if rep.tightest_margin is None else f"{rep.tightest_margin:.4f}"
    print(f"  {family:8s}: {rep.failures:3d}/{rep.checked} fail chord-arc, "
          f"{len(rep.violations)} ratio violations, tightest margin {margin}")
