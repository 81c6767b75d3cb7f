"""warpdisk: numerical laboratory for singular warped-product metric disks.

The package studies surfaces [0, R] x_f S^1 built from a warping density f:
distances and Clairaut geodesics, isoperimetric ratios of candidate regions
and their convergence to the Euclidean constant 1/(4*pi) under blow-up,
chord-arc behaviour of almost-isoperimetric planar curves, and a discrete
Plateau solver in the conformal chart of a collapsed-set disk, including the
conformal surgery that produces energy-equal minimizers with inequivalent
fibers.
"""

from .density import (
    AdmissibilityReport,
    DensitySpec,
    ball_area,
    check_admissibility,
    circle_length,
    cone_angle,
    eval_density,
    geoest_check,
    rescale,
)
from .geometry import (
    GeodesicResult,
    SurfacePoint,
    clairaut_geodesic,
    cone_distance,
    distortion_estimate,
    grid_distance_oracle,
    path_length,
)

EUCLIDEAN_ISO = 1.0 / (4.0 * 3.141592653589793)

__all__ = [
    "AdmissibilityReport",
    "DensitySpec",
    "EUCLIDEAN_ISO",
    "GeodesicResult",
    "SurfacePoint",
    "ball_area",
    "check_admissibility",
    "circle_length",
    "clairaut_geodesic",
    "cone_angle",
    "cone_distance",
    "distortion_estimate",
    "eval_density",
    "geoest_check",
    "grid_distance_oracle",
    "path_length",
    "rescale",
]

__version__ = "0.1.0"
