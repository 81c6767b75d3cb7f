"""Conformal surgery turning the disk fiber into a segment fiber.

For the disk-collapse space with chart radius K, the canonical map P
collapses {|z| <= rho}, rho = 1/K.  Precomposing P's off-fiber part with the
conformal chain

    disk --g--> ellipse interior --J_inv--> annulus {rho < |zeta| < 1}

(g the Riemann map onto J({|zeta| = 1}), J the Joukowski map of parameter
rho) and collapsing g^{-1}([-2 rho, 2 rho]) produces a second energy
minimizer whose singular fiber is an analytic arc instead of a disk: energy
is conformally invariant and the fiber, having zero area, is negligible.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from .conformal import ellipse_radius, joukowski_pair, theodorsen_map
from .energy import MapState, apply_boundary, discrete_energy
from .mesh import DiskMesh
from .sets import CollapsedSetSpec

TWO_PI = 2.0 * math.pi


def surgery_segment(E: CollapsedSetSpec, mesh: DiskMesh, fft_size: int = 2048,
                    tol: float = 1e-13):
    """Build the surgered map v = P o J_inv o g on the mesh.

    Requires a disk collapsed set; the fiber radius in map coordinates is
    rho = radius / K_chart.  Returns (MapState, EnergyBreakdown,
    TheodorsenMap).
    """
    if E.shape != "disk":
        raise DomainError("segment surgery starts from a disk collapsed set")
    K = E.K_chart
    rho = E.radius / K
    if not 0.0 < rho < 1.0:
        raise DomainError("fiber radius must lie in (0, 1)")
    J, J_inv = joukowski_pair(rho)
    g = theodorsen_map(ellipse_radius(1.0 + rho * rho, 1.0 - rho * rho),
                       fft_size=fft_size, tol=tol)

    z = mesh.vertices[:, 0] + 1j * mesh.vertices[:, 1]
    w = g(z)
    zeta = J_inv(w, on_cut="accept")
    # numerical round-off can leave |zeta| a hair inside the fiber circle
    radii = np.abs(zeta)
    small = radii < rho
    zeta[small] *= rho / radii[small]
    chart = K * zeta

    images = np.column_stack([chart.real, chart.imag])
    phases = np.angle(chart[mesh.boundary])
    diffs = np.diff(phases, append=phases[0] + TWO_PI) % TWO_PI
    increments = diffs * (TWO_PI / float(np.sum(diffs)))
    state = MapState(images, increments, float(phases[0]))
    apply_boundary(mesh, state, K)
    return state, discrete_energy(mesh, state, E), g
