"""Discrete Plateau solver in the conformal chart of a collapsed-set disk."""

from .conformal import TheodorsenMap, ellipse_radius, joukowski_pair, theodorsen_map
from .energy import (
    EnergyBreakdown,
    MapState,
    apply_boundary,
    discrete_energy,
    reference_state,
    state_from_map,
    triangle_energies,
)
from .mesh import DiskMesh, disk_mesh
from .sets import CollapsedSetSpec, conformal_factor, reference_map_energy, set_distance
from .solver import (
    FiberRegion,
    SolveResult,
    SolverConfig,
    fiber_region,
    minimize_energy,
    moebius_distorted_state,
    swirl_distorted_state,
)
from .surgery import surgery_segment

__all__ = [
    "CollapsedSetSpec",
    "DiskMesh",
    "EnergyBreakdown",
    "FiberRegion",
    "MapState",
    "SolveResult",
    "SolverConfig",
    "TheodorsenMap",
    "apply_boundary",
    "conformal_factor",
    "discrete_energy",
    "disk_mesh",
    "ellipse_radius",
    "fiber_region",
    "joukowski_pair",
    "minimize_energy",
    "moebius_distorted_state",
    "reference_map_energy",
    "reference_state",
    "set_distance",
    "state_from_map",
    "surgery_segment",
    "swirl_distorted_state",
    "theodorsen_map",
    "triangle_energies",
]
