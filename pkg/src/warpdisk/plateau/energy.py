"""Discrete energies of piecewise-affine maps into the weighted chart.

Per triangle, the affine differential D has singular values s1 >= s2, and
with w the squared conformal factor at the image centroid and |T| the domain
area, the contributions are

    dirichlet:   w * (s1^2 + s2^2) * |T|      (Frobenius norm squared)
    reshetnyak:  w * s1^2 * |T|               (squared operator norm)
    area:        w * s1*s2 * |T|              (|det D|)
    defect:      w * (s1 - s2)^2 * |T|        (conformality defect)

so reshetnyak <= dirichlet <= 2*reshetnyak and area <= reshetnyak hold
per triangle by construction, with equality chains tight exactly at weakly
conformal maps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, MeshError
from .mesh import DiskMesh
from .sets import CollapsedSetSpec, weight, weight_gradient

TWO_PI = 2.0 * math.pi


@dataclass
class MapState:
    """Vertex images in the chart disk plus the monotone boundary trace.

    Boundary vertex images are K_chart * exp(i * phase), with phases
    phase0 + cumulative sums of the nonnegative ``increments`` (summing to
    2*pi), which keeps the trace weakly monotone by construction.
    """

    images: np.ndarray
    increments: np.ndarray
    phase0: float = 0.0

    def copy(self) -> "MapState":
        return MapState(self.images.copy(), self.increments.copy(), self.phase0)

    def boundary_phases(self) -> np.ndarray:
        return self.phase0 + np.concatenate([[0.0], np.cumsum(self.increments[:-1])])

    def to_json(self) -> str:
        return json.dumps({
            "images": self.images.tolist(),
            "increments": self.increments.tolist(),
            "phase0": self.phase0,
        })

    @staticmethod
    def from_json(text: str) -> "MapState":
        d = json.loads(text)
        return MapState(np.asarray(d["images"]), np.asarray(d["increments"]),
                        d.get("phase0", 0.0))


def apply_boundary(mesh: DiskMesh, state: MapState, K_chart: float):
    """Overwrite boundary images from the increment parametrization."""
    phases = state.boundary_phases()
    state.images[mesh.boundary, 0] = K_chart * np.cos(phases)
    state.images[mesh.boundary, 1] = K_chart * np.sin(phases)


def state_from_map(mesh: DiskMesh, fn, K_chart: float) -> MapState:
    """Build a MapState from an explicit chart-valued map of the disk.

    ``fn`` takes complex disk points and returns complex chart points; its
    boundary restriction must be weakly monotone.
    """
    z = mesh.vertices[:, 0] + 1j * mesh.vertices[:, 1]
    w = np.asarray(fn(z), dtype=complex)
    images = np.column_stack([w.real, w.imag])
    wb = w[mesh.boundary]
    phases = np.angle(wb)
    diffs = np.diff(phases, append=phases[0] + TWO_PI) % TWO_PI
    total = float(np.sum(diffs))
    if abs(total - TWO_PI) > 1e-6:
        raise DomainError("boundary trace does not wind once around the chart")
    increments = diffs * (TWO_PI / total)
    state = MapState(images, increments, float(phases[0]))
    apply_boundary(mesh, state, K_chart)
    return state


def reference_state(mesh: DiskMesh, K_chart: float) -> MapState:
    """The canonical map z -> K_chart * z, discretized on the mesh."""
    return state_from_map(mesh, lambda z: K_chart * z, K_chart)


@dataclass
class EnergyBreakdown:
    dirichlet: float
    reshetnyak: float
    area: float
    defect: float

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "reshetnyak": self.reshetnyak,
            "area": self.area,
            "defect": self.defect,
        }


def _singular_values(mesh: DiskMesh, images: np.ndarray):
    """Closed-form singular values of every per-triangle differential."""
    t = mesh.triangles
    w1 = images[t[:, 1]] - images[t[:, 0]]
    w2 = images[t[:, 2]] - images[t[:, 0]]
    inv = mesh.inv_edges
    # D = [w1 w2] @ inv, with w1, w2 as columns
    a = w1[:, 0] * inv[:, 0, 0] + w2[:, 0] * inv[:, 1, 0]
    b = w1[:, 0] * inv[:, 0, 1] + w2[:, 0] * inv[:, 1, 1]
    c = w1[:, 1] * inv[:, 0, 0] + w2[:, 1] * inv[:, 1, 0]
    d = w1[:, 1] * inv[:, 0, 1] + w2[:, 1] * inv[:, 1, 1]
    q = np.hypot(0.5 * (a + d), 0.5 * (c - b))
    r = np.hypot(0.5 * (a - d), 0.5 * (c + b))
    return q + r, np.abs(q - r)


def triangle_weights(mesh: DiskMesh, images: np.ndarray,
                     E: CollapsedSetSpec | None) -> np.ndarray:
    """Per-triangle weight by the image edge-midpoint quadrature rule.

    Midpoints make the rule exact for quadratics and keep single stretched
    triangles from hiding the high-weight band behind one sample point.
    """
    t = mesh.triangles
    corners = images[t]
    mids = 0.5 * (corners + np.roll(corners, -1, axis=1))
    w = weight(E, mids.reshape(-1, 2)).reshape(len(t), 3)
    return w.mean(axis=1)


def triangle_energies(mesh: DiskMesh, state: MapState,
                      E: CollapsedSetSpec | None):
    """Per-triangle energy terms (dirichlet, reshetnyak, area, defect)."""
    s1, s2 = _singular_values(mesh, state.images)
    w = triangle_weights(mesh, state.images, E)
    base = w * mesh.areas
    return (
        base * (s1 * s1 + s2 * s2),
        base * s1 * s1,
        base * s1 * s2,
        base * (s1 - s2) ** 2,
    )


def discrete_energy(mesh: DiskMesh, state: MapState,
                    E: CollapsedSetSpec | None) -> EnergyBreakdown:
    """Weighted energies of the piecewise-affine map.

    Passing E=None replaces the conformal weight by 1 (calibration mode:
    the identity map then has dirichlet energy 2*pi).
    """
    if len(state.images) != mesh.n_vertices:
        raise MeshError("map state size does not match the mesh")
    dir_t, resh_t, area_t, defect_t = triangle_energies(mesh, state, E)
    return EnergyBreakdown(
        float(np.sum(dir_t)), float(np.sum(resh_t)),
        float(np.sum(area_t)), float(np.sum(defect_t)),
    )


def dirichlet_value_and_gradient(mesh: DiskMesh, state: MapState,
                                 E: CollapsedSetSpec | None):
    """Dirichlet energy and its gradient with respect to vertex images.

    Energy per triangle: w(centroid) * ||W B||_F^2 * |T| with W the image
    edge matrix and B the cached inverse domain edges.  The W-derivative is
    2 w |T| * W B B^T; the centroid dependence of the weight adds
    grad w * ||D||_F^2 * |T| / 3 to each corner.
    """
    t = mesh.triangles
    images = state.images
    w1 = images[t[:, 1]] - images[t[:, 0]]
    w2 = images[t[:, 2]] - images[t[:, 0]]
    inv = mesh.inv_edges
    a = w1[:, 0] * inv[:, 0, 0] + w2[:, 0] * inv[:, 1, 0]
    b = w1[:, 0] * inv[:, 0, 1] + w2[:, 0] * inv[:, 1, 1]
    c = w1[:, 1] * inv[:, 0, 0] + w2[:, 1] * inv[:, 1, 0]
    d = w1[:, 1] * inv[:, 0, 1] + w2[:, 1] * inv[:, 1, 1]
    frob = a * a + b * b + c * c + d * d

    w = triangle_weights(mesh, images, E)
    energy = float(np.sum(w * frob * mesh.areas))

    # dE/dD = 2 w |T| D, chain back to the two image edge vectors via B^T
    coef = 2.0 * w * mesh.areas
    ga, gb = coef * a, coef * b
    gc, gd = coef * c, coef * d
    g_w1 = np.column_stack([
        ga * inv[:, 0, 0] + gb * inv[:, 0, 1],
        gc * inv[:, 0, 0] + gd * inv[:, 0, 1],
    ])
    g_w2 = np.column_stack([
        ga * inv[:, 1, 0] + gb * inv[:, 1, 1],
        gc * inv[:, 1, 0] + gd * inv[:, 1, 1],
    ])
    grad = np.zeros_like(images)
    np.add.at(grad, t[:, 1], g_w1)
    np.add.at(grad, t[:, 2], g_w2)
    np.add.at(grad, t[:, 0], -(g_w1 + g_w2))

    # weight term: each edge midpoint contributes 1/3 of the triangle weight
    # and depends on its two corners with factor 1/2
    corners = images[t]
    mids = 0.5 * (corners + np.roll(corners, -1, axis=1))
    gw_mid = weight_gradient(E, mids.reshape(-1, 2)).reshape(len(t), 3, 2)
    scale = (frob * mesh.areas)[:, None] / 6.0
    for k in range(3):
        np.add.at(grad, t[:, k], scale * gw_mid[:, k])
        np.add.at(grad, t[:, (k + 1) % 3], scale * gw_mid[:, k])
    return energy, grad


def boundary_gradient(mesh: DiskMesh, state: MapState, grad_images: np.ndarray,
                      K_chart: float) -> np.ndarray:
    """Pull the image gradient back to the boundary increments."""
    phases = state.boundary_phases()
    tangents = K_chart * np.column_stack([-np.sin(phases), np.cos(phases)])
    g_phase = np.sum(grad_images[mesh.boundary] * tangents, axis=1)
    # phase_j depends on increments 0..j-1 (phase0 is the gauge)
    rev = np.cumsum(g_phase[::-1])[::-1]
    g_inc = np.empty_like(state.increments)
    g_inc[:-1] = rev[1:]
    g_inc[-1] = 0.0
    return g_inc
