"""Triangulated unit disks for the discrete Plateau solver."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from ..errors import MeshError


@dataclass
class DiskMesh:
    """Conforming triangulation of the closed unit disk.

    Triangles are counterclockwise; ``boundary`` lists the outer-circle
    vertex indices in cyclic counterclockwise order.  Edge-inverse matrices
    and areas are cached for the energy assembly.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    h: float
    _areas: np.ndarray = field(default=None, repr=False)
    _inv_edges: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        v, t = self.vertices, self.triangles
        if v.ndim != 2 or v.shape[1] != 2:
            raise MeshError("vertices must be an (n, 2) array")
        e1 = v[t[:, 1]] - v[t[:, 0]]
        e2 = v[t[:, 2]] - v[t[:, 0]]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        if np.any(det <= 0.0):
            raise MeshError("triangles must be counterclockwise and nondegenerate")
        self._areas = 0.5 * det
        # inverse of [e1 e2] per triangle, for D = W @ Z^-1
        inv = np.empty((len(t), 2, 2))
        inv[:, 0, 0] = e2[:, 1] / det
        inv[:, 0, 1] = -e2[:, 0] / det
        inv[:, 1, 0] = -e1[:, 1] / det
        inv[:, 1, 1] = e1[:, 0] / det
        self._inv_edges = inv

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def inv_edges(self) -> np.ndarray:
        return self._inv_edges

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def interior_mask(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary] = False
        return mask

    def to_text(self) -> str:
        """Flat text format: 'v x y' / 't i j k' / one 'b i i i ...' line."""
        buf = io.StringIO()
        buf.write(f"# disk mesh h={self.h:.8g}\n")
        for x, y in self.vertices:
            buf.write(f"v {x:.17g} {y:.17g}\n")
        for i, j, k in self.triangles:
            buf.write(f"t {i} {j} {k}\n")
        buf.write("b " + " ".join(str(i) for i in self.boundary) + "\n")
        return buf.getvalue()

    @staticmethod
    def from_text(text: str, h: float = 0.0) -> "DiskMesh":
        verts, tris, bnd = [], [], None
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0] == "#":
                continue
            if parts[0] == "v":
                verts.append((float(parts[1]), float(parts[2])))
            elif parts[0] == "t":
                tris.append(tuple(int(x) for x in parts[1:4]))
            elif parts[0] == "b":
                bnd = np.array([int(x) for x in parts[1:]])
        if bnd is None:
            raise MeshError("mesh text lacks a boundary line")
        return DiskMesh(np.asarray(verts), np.asarray(tris), bnd, h)


def disk_mesh(h: float = 0.02) -> DiskMesh:
    """Delaunay mesh of concentric rings with spacing about h.

    Ring k at radius k*h' carries round(2*pi*k) vertices, so edge lengths are
    near-uniform; boundary vertices are equal-arc on the unit circle.
    """
    if not 0.001 <= h <= 0.35:
        raise MeshError(f"mesh size h={h} outside the supported range")
    n_rings = max(int(round(1.0 / h)), 3)
    pts = [(0.0, 0.0)]
    for k in range(1, n_rings + 1):
        r = k / n_rings
        n_k = max(6, int(round(2.0 * math.pi * k)))
        offs = 0.5 * (k % 2)  # stagger rings to avoid slivers
        ang = 2.0 * math.pi * (np.arange(n_k) + offs) / n_k
        pts.extend(zip(r * np.cos(ang), r * np.sin(ang)))
    pts = np.asarray(pts)
    n_last = max(6, int(round(2.0 * math.pi * n_rings)))
    boundary_start = len(pts) - n_last

    tri = Delaunay(pts)
    simplices = tri.simplices.copy()
    v = pts
    e1 = v[simplices[:, 1]] - v[simplices[:, 0]]
    e2 = v[simplices[:, 2]] - v[simplices[:, 0]]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    flip = det < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    keep = np.abs(det) > 1e-14
    simplices = simplices[keep]

    boundary = np.arange(boundary_start, len(pts))
    ang = np.arctan2(pts[boundary, 1], pts[boundary, 0])
    boundary = boundary[np.argsort(ang)]
    return DiskMesh(pts, simplices, boundary, 1.0 / n_rings)
