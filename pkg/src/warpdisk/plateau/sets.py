"""Collapsed sets, the conformal weight, and the reference-map energy.

The disk of radius K_chart carries the singular metric lambda^2 * euclidean,
where lambda(x) = exp(-1/d(x, E)) / d(x, E)^2 vanishes on the set E being
collapsed.  The canonical parametrization P(z) = K_chart * z of the quotient
is weakly conformal, so its energy equals its area and both equal the weight
integral over the chart disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ..errors import DomainError, QuadratureError

# below this distance the weight and its gradient underflow to zero anyway;
# clamping avoids inf/nan from the 1/d factors
D_CLAMP = 1e-6


@dataclass(frozen=True)
class CollapsedSetSpec:
    """Continuum E inside the chart disk of radius K_chart.

    shape is 'point' (the origin), 'disk' (radius ``radius``), or 'segment'
    (between ``endpoints``).  The set must sit inside the open chart disk.
    """

    shape: str
    K_chart: float = 2.0
    radius: float = 1.0
    endpoints: tuple = ((-1.0, 0.0), (1.0, 0.0))

    def __post_init__(self):
        if self.shape not in ("point", "disk", "segment"):
            raise DomainError(f"unknown collapsed-set shape {self.shape!r}")
        if self.K_chart <= 0.0:
            raise DomainError("chart radius must be positive")
        if self.shape == "disk":
            if not 0.0 < self.radius < self.K_chart:
                raise DomainError("disk must sit inside the open chart disk")
        if self.shape == "segment":
            ends = np.asarray(self.endpoints, dtype=float)
            if ends.shape != (2, 2):
                raise DomainError("segment needs two plane endpoints")
            if np.max(np.linalg.norm(ends, axis=1)) >= self.K_chart:
                raise DomainError("segment must sit inside the open chart disk")
            object.__setattr__(self, "endpoints", tuple(map(tuple, ends)))

    @staticmethod
    def point(K_chart: float = 2.0) -> "CollapsedSetSpec":
        return CollapsedSetSpec("point", K_chart)

    @staticmethod
    def disk(K_chart: float = 2.0, radius: float = 1.0) -> "CollapsedSetSpec":
        return CollapsedSetSpec("disk", K_chart, radius=radius)

    @staticmethod
    def segment(a, b, K_chart: float = 2.0) -> "CollapsedSetSpec":
        return CollapsedSetSpec("segment", K_chart, endpoints=(tuple(a), tuple(b)))


def set_distance(spec: CollapsedSetSpec, xy) -> np.ndarray:
    """Euclidean distance from chart points to the collapsed set."""
    p = np.atleast_2d(np.asarray(xy, dtype=float))
    if spec.shape == "point":
        d = np.linalg.norm(p, axis=1)
    elif spec.shape == "disk":
        d = np.maximum(np.linalg.norm(p, axis=1) - spec.radius, 0.0)
    else:
        a = np.asarray(spec.endpoints[0])
        b = np.asarray(spec.endpoints[1])
        ab = b - a
        t = np.clip((p - a) @ ab / max(ab @ ab, 1e-300), 0.0, 1.0)
        d = np.linalg.norm(p - a - t[:, None] * ab, axis=1)
    return d


def conformal_factor(spec: CollapsedSetSpec, xy):
    """Weight lambda = exp(-1/d)/d^2, zero on the collapsed set."""
    d = set_distance(spec, xy)
    out = _lam(d)
    if np.ndim(xy) == 1:
        return float(out[0])
    return out


def _lam(d: np.ndarray) -> np.ndarray:
    dd = np.maximum(d, D_CLAMP)
    with np.errstate(under="ignore"):
        out = np.exp(-1.0 / dd) / (dd * dd)
    return np.where(d < D_CLAMP, 0.0, out)


def _lam_sq(d: np.ndarray) -> np.ndarray:
    dd = np.maximum(d, D_CLAMP)
    with np.errstate(under="ignore"):
        out = np.exp(-2.0 / dd) / dd**4
    return np.where(d < D_CLAMP, 0.0, out)


def weight(spec: CollapsedSetSpec | None, xy) -> np.ndarray:
    """Squared conformal factor at chart points; identically 1 when spec is
    None (flat calibration mode)."""
    if spec is None:
        p = np.atleast_2d(np.asarray(xy, dtype=float))
        return np.ones(p.shape[0])
    return _lam_sq(set_distance(spec, xy))


def weight_gradient(spec: CollapsedSetSpec | None, xy) -> np.ndarray:
    """Gradient of the squared weight, clamped below d = 1e-6."""
    p = np.atleast_2d(np.asarray(xy, dtype=float))
    if spec is None:
        return np.zeros_like(p)
    d = set_distance(spec, p)
    dd = np.maximum(d, D_CLAMP)
    with np.errstate(under="ignore"):
        dw = 2.0 * np.exp(-2.0 / dd) * dd**-6 * (1.0 - 2.0 * dd)
    dw = np.where(d < D_CLAMP, 0.0, dw)
    if spec.shape == "point":
        grad_d = p / np.maximum(np.linalg.norm(p, axis=1), 1e-300)[:, None]
    elif spec.shape == "disk":
        nrm = np.maximum(np.linalg.norm(p, axis=1), 1e-300)
        grad_d = np.where((nrm > spec.radius)[:, None], p / nrm[:, None], 0.0)
    else:
        a = np.asarray(spec.endpoints[0])
        b = np.asarray(spec.endpoints[1])
        ab = b - a
        t = np.clip((p - a) @ ab / max(ab @ ab, 1e-300), 0.0, 1.0)
        rel = p - a - t[:, None] * ab
        grad_d = rel / np.maximum(np.linalg.norm(rel, axis=1), 1e-300)[:, None]
    return dw[:, None] * grad_d


def reference_map_energy(spec: CollapsedSetSpec, tol: float = 1e-10) -> float:
    """Energy of the canonical map: the integral of lambda^2 over the chart.

    Point and disk sets reduce to radial 1-D quadrature; segments integrate
    in polar coordinates over the chart disk.
    """
    K = spec.K_chart
    if spec.shape == "point":
        val, err = quad(lambda t: _lam_sq(np.array([t]))[0] * t, 0.0, K,
                        epsabs=tol, epsrel=1e-10, limit=200)
        _check_quad(err, tol)
        return 2.0 * math.pi * val
    if spec.shape == "disk":
        a = spec.radius
        val, err = quad(lambda t: _lam_sq(np.array([t - a]))[0] * t, a, K,
                        epsabs=tol, epsrel=1e-10, limit=200)
        _check_quad(err, tol)
        return 2.0 * math.pi * val
    nodes, wts = np.polynomial.legendre.leggauss(320)
    phis = math.pi * (nodes + 1.0)  # [0, 2*pi)
    total = 0.0
    for phi, wphi in zip(phis, wts * math.pi):
        direction = np.array([math.cos(phi), math.sin(phi)])
        val, err = quad(
            lambda t, u=direction: _lam_sq(set_distance(spec, (t * u)[None, :]))[0] * t,
            0.0, K, epsabs=tol * 1e-2, epsrel=1e-9, limit=200,
        )
        total += wphi * val
    return total


def _check_quad(err: float, tol: float):
    if err > max(100.0 * tol, 1e-9):
        raise QuadratureError("reference energy quadrature did not converge",
                              residual=err)
