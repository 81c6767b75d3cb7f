#!/usr/bin/env python3
"""Two energy-equal minimizers with topologically different singular fibers.

Precomposing the canonical map's off-fiber part with the conformal chain
disk -> ellipse -> annulus (Riemann map, then inverse Joukowski) collapses
an analytic arc instead of a disk.  Energy is conformally invariant and the
arc is negligible, so both maps minimize; their fibers are a 2-dimensional
disk and a 1-dimensional arc.
"""

import time

from warpdisk.plateau import (
    CollapsedSetSpec,
    SolverConfig,
    disk_mesh,
    fiber_region,
    minimize_energy,
    reference_map_energy,
    surgery_segment,
    swirl_distorted_state,
)

E = CollapsedSetSpec.disk(K_chart=2.0)
ref = reference_map_energy(E)

t0 = time.time()
mesh = disk_mesh(0.01)
state, eb, g = surgery_segment(E, mesh)
print(f"surgery on h=0.01 mesh ({mesh.n_vertices} vertices, {time.time() - t0:.0f}s)")
print(f"  boundary correspondence converged in {g.iterations} iterations, "
      f"residual {g.residual:.2e}")
print(f"  reshetnyak {eb.reshetnyak:.6f} vs reference {ref:.6f} "
      f"(gap {(eb.reshetnyak - ref) / ref:+.2%}; first order in h)")

fib_arc = fiber_region(mesh, state, E, 0.015)
print(f"  arc fiber: area {fib_arc.area:.4f}, inscribed radius "
      f"{fib_arc.inscribed_radius:.4f}, connected={fib_arc.connected}")

print("\ndisk-fiber minimizer for comparison (coarser mesh)")
mesh2 = disk_mesh(0.05)
res = minimize_energy(mesh2, E, swirl_distorted_state(mesh2, 2.0),
                      SolverConfig(max_iters=80))
fib_disk = fiber_region(mesh2, res.state, E, 0.015)
print(f"  disk fiber: area {fib_disk.area:.4f}, inscribed radius "
      f"{fib_disk.inscribed_radius:.3f}")
print(f"  energies agree ({res.energy.reshetnyak:.5f} vs {eb.reshetnyak:.5f}) "
      "while the fibers are an arc and a two-dimensional region")
