"""Energy descent with a monotone boundary trace, and fiber measurement.

The Dirichlet energy is descended by projected gradient steps with a
Barzilai-Borwein step guess and backtracking line search, so the energy is
nonincreasing at every accepted iteration.  Interior vertices move freely in
the chart disk; the boundary moves through nonnegative angle increments
summing to 2*pi, which preserves weak monotonicity of the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import DomainError
from .energy import (
    triangle_weights,
    MapState,
    apply_boundary,
    boundary_gradient,
    dirichlet_value_and_gradient,
    discrete_energy,
    state_from_map,
)
from .mesh import DiskMesh
from .sets import CollapsedSetSpec, set_distance

TWO_PI = 2.0 * math.pi


@dataclass
class SolverConfig:
    max_iters: int = 200
    tol: float = 1e-10
    step0: float = 5e-3
    backtracks: int = 40
    patience: int = 4
    boundary_steps: int = 4
    # relative floor keeping the zero-weight fiber block nonsingular; its
    # energy contribution is orders below every acceptance tolerance
    weight_floor: float = 1e-9


@dataclass
class SolveResult:
    state: MapState
    energy: "object"
    trace: list = field(default_factory=list)
    iterations: int = 0
    stagnated: bool = False

    def trace_csv(self) -> str:
        lines = ["iter,dirichlet,reshetnyak,area,defect"]
        lines += [
            f"{i},{d:.12g},{r:.12g},{a:.12g},{c:.12g}" for i, d, r, a, c in self.trace
        ]
        return "\n".join(lines) + "\n"


def _stiffness(mesh: DiskMesh, w: np.ndarray):
    """Weighted FEM stiffness of the frozen-weight Dirichlet energy."""
    from scipy.sparse import coo_matrix as _coo

    t = mesh.triangles
    inv = mesh.inv_edges
    # M = B B^T per triangle; local stiffness S^T M S on (u0, u1, u2)
    m00 = inv[:, 0, 0] ** 2 + inv[:, 0, 1] ** 2
    m01 = inv[:, 0, 0] * inv[:, 1, 0] + inv[:, 0, 1] * inv[:, 1, 1]
    m11 = inv[:, 1, 0] ** 2 + inv[:, 1, 1] ** 2
    coef = w * mesh.areas
    k11 = coef * m00
    k12 = coef * m01
    k22 = coef * m11
    k01 = -(k11 + k12)
    k02 = -(k12 + k22)
    k00 = -(k01 + k02)
    rows = np.concatenate([t[:, 0], t[:, 1], t[:, 2], t[:, 0], t[:, 1],
                           t[:, 0], t[:, 2], t[:, 1], t[:, 2]])
    cols = np.concatenate([t[:, 0], t[:, 1], t[:, 2], t[:, 1], t[:, 0],
                           t[:, 2], t[:, 0], t[:, 2], t[:, 1]])
    vals = np.concatenate([k00, k11, k22, k01, k01, k02, k02, k12, k12])
    n = mesh.n_vertices
    return _coo((vals, (rows, cols)), shape=(n, n)).tocsr()


def minimize_energy(mesh: DiskMesh, E: CollapsedSetSpec | None, init: MapState,
                    cfg: SolverConfig | None = None, K_chart: float | None = None):
    """Descend the Dirichlet energy from ``init``; returns a SolveResult.

    Each iteration alternates a damped Picard step (the exact solve of the
    frozen-weight quadratic problem, line-searched so the energy never
    increases) with projected tangent-gradient steps on the boundary angle
    increments.  Stagnation before the tolerance is met is flagged,
    returning the best state found.
    """
    cfg = cfg or SolverConfig()
    if K_chart is None:
        if E is None:
            raise DomainError("K_chart is required in calibration mode")
        K_chart = E.K_chart
    interior = mesh.interior_mask()

    state = init.copy()
    apply_boundary(mesh, state, K_chart)

    def dirichlet(st: MapState) -> float:
        return dirichlet_value_and_gradient(mesh, st, E)[0]

    def project_inc(st: MapState):
        inc = np.clip(st.increments, 0.0, None)
        total = float(np.sum(inc))
        st.increments = (inc * (TWO_PI / total) if total > 0
                         else np.full_like(inc, TWO_PI / len(inc)))
        apply_boundary(mesh, st, K_chart)

    energy = dirichlet(state)
    eb = discrete_energy(mesh, state, E)
    trace = [(0, eb.dirichlet, eb.reshetnyak, eb.area, eb.defect)]
    stagnated = False
    small_streak = 0
    it = 0
    from scipy.sparse.linalg import splu

    idx_i = np.nonzero(interior)[0]
    for it in range(1, cfg.max_iters + 1):
        start_energy = energy

        # interior update: Sobolev gradient, i.e. the full energy gradient
        # (including the weight's dependence on the image) preconditioned by
        # the current frozen-weight stiffness; natural step is t = 1
        w = triangle_weights(mesh, state.images, E)
        w = np.maximum(w, cfg.weight_floor * max(float(np.max(w)), 1e-300))
        K = _stiffness(mesh, w)
        lu = splu(K[idx_i][:, idx_i].tocsc())
        _, grad_img = dirichlet_value_and_gradient(mesh, state, E)
        direction = np.column_stack([
            lu.solve(grad_img[idx_i, 0]), lu.solve(grad_img[idx_i, 1])
        ])
        moved = False
        t_step = 1.0
        for _ in range(cfg.backtracks):
            cand = state.copy()
            cand.images[idx_i] = state.images[idx_i] - 0.5 * t_step * direction
            cand_energy = dirichlet(cand)
            if cand_energy < energy:
                state, energy, moved = cand, cand_energy, True
                break
            t_step *= 0.5

        # boundary update: projected gradient on the increments
        for _ in range(cfg.boundary_steps):
            e_val, grad_img = dirichlet_value_and_gradient(mesh, state, E)
            g_inc = boundary_gradient(mesh, state, grad_img, K_chart)
            d_inc = g_inc - float(np.mean(g_inc))
            norm = float(np.max(np.abs(d_inc)))
            if norm < 1e-15:
                break
            step = min(cfg.step0, 0.2 * float(np.min(state.increments[state.increments > 0], initial=1.0)) / norm + 1e-12)
            ok = False
            for _ in range(cfg.backtracks):
                cand = state.copy()
                cand.increments = cand.increments - step * d_inc
                project_inc(cand)
                cand_energy = dirichlet(cand)
                if cand_energy < energy:
                    state, energy, ok, moved = cand, cand_energy, True, True
                    break
                step *= 0.5
            if not ok:
                break

        eb = discrete_energy(mesh, state, E)
        trace.append((it, eb.dirichlet, eb.reshetnyak, eb.area, eb.defect))
        if not moved:
            stagnated = energy > cfg.tol  # failing at the floor is fine
            break
        rel_drop = (start_energy - energy) / max(start_energy, 1e-300)
        small_streak = small_streak + 1 if rel_drop < cfg.tol else 0
        if small_streak >= cfg.patience:
            break
    return SolveResult(state, discrete_energy(mesh, state, E), trace, it, stagnated)


# ---------------------------------------------------------------------------
# initializations
# ---------------------------------------------------------------------------


def moebius_distorted_state(mesh: DiskMesh, K_chart: float, a: complex = 0.3 + 0.2j) -> MapState:
    """The canonical map precomposed with a disk Moebius transform."""
    if abs(a) >= 1.0:
        raise DomainError("Moebius parameter must lie in the open disk")

    def fn(z):
        return K_chart * (z - a) / (1.0 - np.conj(a) * z)

    return state_from_map(mesh, fn, K_chart)


def swirl_distorted_state(mesh: DiskMesh, K_chart: float, power: float = 1.6,
                          twist: float = 1.2) -> MapState:
    """Non-conformal radial-power-and-twist distortion of the canonical map.

    The boundary circle is fixed pointwise, so the trace stays equal-arc.
    """

    def fn(z):
        r = np.abs(z)
        ang = np.angle(z) + twist * (1.0 - r * r)
        return K_chart * np.power(r, power) * np.exp(1j * ang)

    return state_from_map(mesh, fn, K_chart)


# ---------------------------------------------------------------------------
# fiber measurement
# ---------------------------------------------------------------------------


@dataclass
class FiberRegion:
    area: float
    connected: bool
    inscribed_radius: float
    n_triangles: int

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "connected": self.connected,
            "inscribed_radius": self.inscribed_radius,
            "n_triangles": self.n_triangles,
        }


def fiber_region(mesh: DiskMesh, state: MapState, E: CollapsedSetSpec,
                 threshold: float, raster: int = 384) -> FiberRegion:
    """Domain region mapped within ``threshold`` of the collapsed set.

    Collects the triangles whose image centroids satisfy the distance bound
    and reports their total domain area, whether they form one edge-connected
    component, and the radius of the largest inscribed disk (grid estimate).
    """
    if threshold <= 0.0:
        raise DomainError("threshold must be positive")
    cent = state.images[mesh.triangles].mean(axis=1)
    mask = set_distance(E, cent) <= threshold
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return FiberRegion(0.0, True, 0.0, 0)
    area = float(np.sum(mesh.areas[idx]))
    connected = _is_connected(mesh.triangles[idx])
    inscribed = _inscribed_radius(mesh.vertices, mesh.triangles[idx], raster)
    return FiberRegion(area, connected, inscribed, int(idx.size))


def _is_connected(tris: np.ndarray) -> bool:
    if len(tris) <= 1:
        return True
    edges = {}
    rows, cols = [], []
    for ti, (i, j, k) in enumerate(tris):
        for e in ((i, j), (j, k), (k, i)):
            key = (min(e), max(e))
            other = edges.get(key)
            if other is None:
                edges[key] = ti
            else:
                rows.append(other)
                cols.append(ti)
    n = len(tris)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_comp, _ = connected_components(graph, directed=False)
    return n_comp == 1


def _inscribed_radius(vertices: np.ndarray, tris: np.ndarray, raster: int) -> float:
    cell = 2.0 / raster
    mask = np.zeros((raster, raster), dtype=bool)
    axis = -1.0 + cell * (np.arange(raster) + 0.5)
    for i, j, k in tris:
        tri = vertices[[i, j, k]]
        lo = np.maximum(((tri.min(axis=0) + 1.0) / cell - 1), 0).astype(int)
        hi = np.minimum(((tri.max(axis=0) + 1.0) / cell + 1), raster - 1).astype(int)
        if np.any(lo > hi):
            continue
        xs = axis[lo[0]: hi[0] + 1]
        ys = axis[lo[1]: hi[1] + 1]
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        inside = _in_triangle(X, Y, tri)
        sub = mask[lo[0]: hi[0] + 1, lo[1]: hi[1] + 1]
        sub |= inside
        mask[lo[0]: hi[0] + 1, lo[1]: hi[1] + 1] = sub
    if not mask.any():
        return 0.0
    dist = distance_transform_edt(mask)
    return float(dist.max()) * cell


def _in_triangle(X, Y, tri):
    (x0, y0), (x1, y1), (x2, y2) = tri
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if abs(det) < 1e-300:
        return np.zeros_like(X, dtype=bool)
    l1 = ((X - x0) * (y2 - y0) - (Y - y0) * (x2 - x0)) / det
    l2 = ((Y - y0) * (x1 - x0) - (X - x0) * (y1 - y0)) / det
    return (l1 >= -1e-12) & (l2 >= -1e-12) & (l1 + l2 <= 1.0 + 1e-12)
