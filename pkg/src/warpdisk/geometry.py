"""Distances on warped surfaces [0, R] x_f S^1 and on metric cones.

Geodesics of a surface of revolution conserve the Clairaut constant
c = f(r)^2 * dtheta/ds.  Between two points the minimizing path is one of:
a meridian segment (equal angles), a path through the vertex (length
r1 + r2), or a Clairaut geodesic whose constant c solves a swept-angle
equation.  Along a geodesic parametrized by r,

    dtheta/dr = c / (f * sqrt(f^2 - c^2)),    ds/dr = f / sqrt(f^2 - c^2),

integrated from the turning radius f(r_t) = c when the path dips inward.
The inverse-square-root endpoint singularity is removed by substituting
r = r_t + u^2, after which fixed Gauss-Legendre panels converge rapidly.

Because f is increasing, the nearest-point projection onto balls around the
vertex is 1-Lipschitz, so minimizers never leave {r <= max(r1, r2)}; the
solver searches only there.  An independent upper-bound oracle runs Dijkstra
on a polar graph with metric edge weights and a configurable move stencil.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from . import density as _density
from .density import DensitySpec, cone_angle, rescale
from .errors import DomainError, GeodesicSolverError

TWO_PI = 2.0 * math.pi

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def wrap_angle(theta):
    """Reduce an angle to [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SurfacePoint:
    """Polar coordinates (r, theta); r = 0 is the vertex o for any theta."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0.0:
            raise DomainError(f"radius must be nonnegative, got {self.r}")
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))
        object.__setattr__(self, "r", float(self.r))

    @staticmethod
    def vertex() -> "SurfacePoint":
        return SurfacePoint(0.0, 0.0)


@dataclass(frozen=True)
class GeodesicResult:
    """Outcome of a distance query.

    kind is 'radial' (meridian segment), 'through-vertex', or 'clairaut';
    clairaut_c holds the Clairaut constant for the latter, and residual the
    achieved swept-angle matching error.
    """

    distance: float
    kind: str
    clairaut_c: float | None
    swept_angle: float
    residual: float


def angular_gap(p: SurfacePoint, q: SurfacePoint) -> float:
    """Wrapped angular separation in [0, pi]."""
    return abs(wrap_angle(q.theta - p.theta))


def cone_distance(beta: float, p: SurfacePoint, q: SurfacePoint) -> float:
    """Exact distance on the Euclidean cone over a circle of length beta.

    Unrolling the cone, the angular gap dtheta becomes gamma =
    dtheta*beta/(2*pi); for gamma >= pi the geodesic passes through the
    vertex, otherwise the flat law of cosines applies.
    """
    if beta <= 0.0:
        raise DomainError("cone angle must be positive")
    gamma = angular_gap(p, q) * beta / TWO_PI
    if gamma >= math.pi:
        return p.r + q.r
    return math.sqrt(max(p.r**2 + q.r**2 - 2.0 * p.r * q.r * math.cos(gamma), 0.0))


def _evaluator(spec: DensitySpec):
    """Fast vectorized f without domain checks (inputs known to be valid)."""
    coeffs = _density._log_coeffs(spec)
    if coeffs is not None:
        a0, a1, a2 = coeffs

        def ev(r):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            pos = r > 0.0
            if np.any(pos):
                L = -np.log(r[pos])
                out[pos] = r[pos] * (a0 + L * (a1 + a2 * L))
            return out

        return ev
    knots_r = spec.samples[:, 0]
    knots_f = spec.samples[:, 1]

    def ev(r):
        return np.interp(np.asarray(r, dtype=float), knots_r, knots_f)

    return ev


def _leg_integrals(ev, c: float, r_lo: float, r_hi: float):
    """(swept angle, length) of one geodesic leg from r_lo up to r_hi.

    r_lo may be the turning radius with f(r_lo) = c; the substitution
    r = r_lo + u^2 makes both integrands smooth there.  Away from the
    turning point the swept integrand decays like a power of u, so the
    panels grow geometrically from the knee scale u ~ sqrt(c/f'(r_lo))
    where f - c becomes comparable to c.
    """
    span = r_hi - r_lo
    if span <= 0.0:
        return 0.0, 0.0
    if c <= 0.0:
        return 0.0, span
    u_max = math.sqrt(span)
    delta = max(span * 1e-9, 1e-14)
    slope = max((float(ev(r_lo + delta)) - float(ev(r_lo))) / delta, 1e-12)
    u_knee = math.sqrt(min(max(c / slope, 1e-30), span))
    breaks = [0.0, min(u_knee, u_max)]
    while breaks[-1] < u_max:
        breaks.append(min(breaks[-1] * 4.0, u_max))
    a = np.array(breaks[:-1])
    b = np.array(breaks[1:])
    half = 0.5 * (b - a)
    u = (a[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel() * 2.0 * u
    f = ev(r_lo + u * u)
    root = np.sqrt(np.maximum(f * f - c * c, 1e-300))
    swept = float(np.sum(w * c / (f * root)))
    length = float(np.sum(w * f / root))
    return swept, length


def _turning_radius(ev, c: float, r_hi: float) -> float:
    # f is increasing with f(0) = 0 < c <= f(r_hi)
    return brentq(lambda r: float(ev(r)) - c, 0.0, r_hi, xtol=1e-15, rtol=8.9e-16)


def clairaut_geodesic(
    spec: DensitySpec, p: SurfacePoint, q: SurfacePoint, tol: float = 1e-10
) -> GeodesicResult:
    """Distance between p and q on [0, R] x_f S^1.

    Returns the best of the meridian path, the vertex path and the Clairaut
    geodesic.  The Clairaut constant is bracketed on the swept-angle
    function: the r-monotone family covers gaps up to its tangent limit and
    the turning family the rest, and the two meet continuously at
    c = f(min(r1, r2)).
    """
    for pt in (p, q):
        if pt.r > spec.R * (1.0 + 1e-12):
            raise DomainError(f"point radius {pt.r} outside [0, {spec.R}]")
    ev = _evaluator(spec)
    r1, r2 = p.r, q.r
    dth = angular_gap(p, q)
    r_min, r_max = min(r1, r2), max(r1, r2)

    if r_min <= 1e-15 or dth <= 1e-14:
        return GeodesicResult(abs(r1 - r2), "radial", None, 0.0, 0.0)

    candidates = [GeodesicResult(r1 + r2, "through-vertex", None, dth, 0.0)]

    f_min = float(ev(r_min))
    c_star = None
    if r_max > r_min + 1e-15:
        swept_tangent, length_tangent = _leg_integrals(ev, f_min, r_min, r_max)
    else:
        swept_tangent, length_tangent = 0.0, 0.0

    if abs(dth - swept_tangent) <= tol:
        candidates.append(
            GeodesicResult(length_tangent, "clairaut", f_min, swept_tangent,
                           abs(swept_tangent - dth))
        )
    elif dth < swept_tangent:
        # r-monotone geodesic: its swept angle is strictly increasing in c
        # (the integrand is pointwise increasing), so the root is unique
        def gap_mono(c):
            return _leg_integrals(ev, c, r_min, r_max)[0] - dth

        c_star = brentq(gap_mono, 0.0, f_min, xtol=1e-13, rtol=8.9e-16)
        swept, length = _leg_integrals(ev, c_star, r_min, r_max)
        candidates.append(
            GeodesicResult(length, "clairaut", c_star, swept, abs(swept - dth))
        )
    else:
        # turning geodesic dipping to r_t < r_min with f(r_t) = c.  The
        # swept angle tends to swept_tangent as c -> f_min but need not be
        # monotone (near the vertex, log densities flatten sweeps back to
        # zero), so scan a log grid in c and solve every bracketed crossing.
        def sweep_turn(c):
            r_t = _turning_radius(ev, c, r_min)
            # the root solve may land with f(r_t) a few ulps below c, which
            # would make f^2 - c^2 round negative right at the turning point
            c_use = min(c, float(ev(r_t)))
            s1, l1 = _leg_integrals(ev, c_use, r_t, r1)
            s2, l2 = _leg_integrals(ev, c_use, r_t, r2)
            return s1 + s2, l1 + l2

        cs = list(f_min * np.geomspace(1e-10, 1.0 - 1e-9, 16)) + [f_min]
        vals = [sweep_turn(c)[0] for c in cs[:-1]] + [swept_tangent]
        if max(vals) < dth and max(vals) > 0.95 * dth:
            # possible narrow crossing near the interior maximum: refine
            i = int(np.argmax(vals))
            lo = cs[max(i - 1, 0)]
            hi = cs[min(i + 1, len(cs) - 1)]
            extra = list(np.linspace(lo, hi, 10)[1:-1])
            cs = cs[: i] + extra + cs[i:]
            cs = sorted(set(cs))
            vals = [sweep_turn(c)[0] for c in cs[:-1]] + [swept_tangent]

        def gap_turn(c):
            return sweep_turn(c)[0] - dth

        for i in range(len(cs) - 1):
            g0, g1 = vals[i] - dth, vals[i + 1] - dth
            if g0 == 0.0:
                roots = [cs[i]]
            elif g0 * g1 < 0.0:
                roots = [brentq(gap_turn, cs[i], cs[i + 1], xtol=1e-13, rtol=8.9e-16)]
            else:
                continue
            for c_star in roots:
                swept, length = sweep_turn(c_star)
                candidates.append(
                    GeodesicResult(length, "clairaut", c_star, swept, abs(swept - dth))
                )
        # when no crossing exists the vertex path is the minimizer

    # drop numerically inconsistent roots; the vertex candidate always remains
    kept = [
        g for g in candidates if g.kind != "clairaut" or g.residual <= max(1e3 * tol, 1e-6)
    ]
    if len(kept) == 1 and dth < swept_tangent - tol:
        # an r-monotone geodesic must exist here; refusing its root means the
        # solve failed rather than the vertex path being optimal
        raise GeodesicSolverError(
            "swept-angle root rejected by the residual guard",
            scanned=[(g.clairaut_c, g.swept_angle, g.residual) for g in candidates],
        )
    return min(kept, key=lambda g: g.distance)


def path_length(spec: DensitySpec, polyline) -> float:
    """Metric length of a coordinate-linear polyline of SurfacePoints.

    Each segment interpolates (r, theta) linearly, taking the short way
    around in theta, and integrates sqrt(r'^2 + f(r)^2 theta'^2).
    """
    pts = list(polyline)
    if len(pts) < 2:
        return 0.0
    ev = _evaluator(spec)
    r = np.array([pt.r for pt in pts])
    th = np.array([pt.theta for pt in pts])
    dr = np.diff(r)
    dth = np.array([wrap_angle(d) for d in np.diff(th)])
    if np.any((np.abs(dr) < 1e-300) & (np.abs(dth) < 1e-300)):
        raise DomainError("consecutive polyline points must be distinct")
    return float(np.sum(_segment_lengths(ev, r[:-1], dr, dth)))


def _segment_lengths(ev, r0, dr, dth, order: int = 32):
    """Vectorized Gauss-Legendre length of coordinate-linear segments."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    r0 = np.atleast_1d(np.asarray(r0, float))
    dr = np.atleast_1d(np.asarray(dr, float))
    dth = np.atleast_1d(np.asarray(dth, float))
    rr = r0[:, None] + dr[:, None] * t[None, :]
    f = ev(rr.ravel()).reshape(rr.shape)
    integrand = np.sqrt(dr[:, None] ** 2 + (f * dth[:, None]) ** 2)
    return integrand @ w


# ---------------------------------------------------------------------------
# polar-graph shortest-path oracle
# ---------------------------------------------------------------------------


def _stencil_moves(reach: int):
    """Coprime (di, dj) moves with max(|di|, |dj|) <= reach, di >= 0."""
    moves = []
    for di in range(0, reach + 1):
        for dj in range(-reach, reach + 1):
            if di == 0 and dj <= 0:
                continue
            if math.gcd(di, abs(dj)) != 1:
                continue
            moves.append((di, dj))
    return moves


class PolarGraph:
    """Polar grid on {r <= r_max} with metric edge weights.

    Node 0 is the vertex; node 1 + i*n_theta + j sits at radius ring i
    (1-based ring index) and angle index j.  The stencil contains all
    coprime moves up to ``reach`` rings/steps (reach=1 is the 8-connected
    grid); larger reach shrinks the direction-quantization overshoot of
    grid shortest paths (about 8% for reach 1, 1.3% for reach 3).  Shortest
    paths are genuine path lengths, hence upper bounds for the distance.
    """

    def __init__(self, spec: DensitySpec, r_max: float, n_r: int, n_theta: int,
                 reach: int = 3, spacing: str = "uniform"):
        if n_r < 16 or n_theta < 16:
            raise DomainError("grid resolutions must be at least 16")
        self.spec = spec
        self.ev = _evaluator(spec)
        self.r_max = float(r_max)
        self.n_r = n_r
        self.n_theta = n_theta
        self.reach = reach
        if spacing == "uniform":
            self.ring_r = np.linspace(0.0, r_max, n_r + 1)[1:]
        elif spacing == "geometric":
            # balances radial against circumferential spacing when f grows
            # roughly linearly; keeps the direction fan usable at small radii
            self.ring_r = r_max * np.geomspace(1e-4, 1.0, n_r)
        else:
            raise DomainError(f"unknown ring spacing {spacing!r}")
        self.thetas = -math.pi + TWO_PI * np.arange(n_theta) / n_theta
        self.dtheta = TWO_PI / n_theta
        self.n_nodes = 1 + n_r * n_theta
        self._edges = self._build_edges()

    def node(self, i: int, j: int) -> int:
        return 1 + i * self.n_theta + (j % self.n_theta)

    def _build_edges(self):
        n_r, n_t = self.n_r, self.n_theta
        jj = np.arange(n_t)
        rows, cols, data = [], [], []
        for di, dj in _stencil_moves(self.reach):
            i0 = np.arange(0, n_r - di)
            # weights depend only on the ring and the move, not on j
            w_ring = _segment_lengths(
                self.ev,
                self.ring_r[i0],
                self.ring_r[i0 + di] - self.ring_r[i0],
                np.full(i0.shape, dj * self.dtheta),
            )
            src = (1 + i0[:, None] * n_t + jj[None, :]).ravel()
            dst = (1 + (i0[:, None] + di) * n_t + ((jj[None, :] + dj) % n_t)).ravel()
            rows.append(src)
            cols.append(dst)
            data.append(np.repeat(w_ring, n_t))
        # vertex to the inner rings by radial spokes
        for i in range(min(self.reach, n_r)):
            rows.append(np.zeros(n_t, dtype=int))
            cols.append(1 + i * n_t + jj)
            data.append(np.full(n_t, self.ring_r[i]))
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(data)

    def _attach(self, pt: SurfacePoint, node_index: int):
        """Edges joining an off-grid point to its surrounding grid nodes."""
        rows, cols, r0s, r1s, dths = [], [], [], [], []
        i_hi = int(np.searchsorted(self.ring_r, pt.r))  # first ring at/above pt
        j_lo = int(math.floor((pt.theta + math.pi) / self.dtheta))
        for i in (i_hi - 1, i_hi):  # ring index (0-based); -1 means vertex
            if i >= self.n_r:
                continue
            for j in (j_lo, j_lo + 1):
                if i < 0:
                    target, r1, th1 = 0, 0.0, pt.theta
                else:
                    target = self.node(i, j)
                    r1 = self.ring_r[i]
                    th1 = self.thetas[j % self.n_theta]
                rows.append(node_index)
                cols.append(target)
                r0s.append(pt.r)
                r1s.append(r1)
                dths.append(wrap_angle(th1 - pt.theta))
                if i < 0:
                    break  # single vertex edge
        w = _segment_lengths(
            self.ev, np.array(r0s), np.array(r1s) - np.array(r0s), np.array(dths)
        )
        return np.array(rows), np.array(cols), w

    def shortest(self, p: SurfacePoint, q: SurfacePoint) -> float:
        rows, cols, data = self._edges
        pr, pc, pw = self._attach(p, self.n_nodes)
        qr, qc, qw = self._attach(q, self.n_nodes + 1)
        # direct coordinate segment is also a path
        direct = _segment_lengths(
            self.ev, p.r, q.r - p.r, wrap_angle(q.theta - p.theta)
        )
        rows = np.concatenate([rows, pr, qr, [self.n_nodes]])
        cols = np.concatenate([cols, pc, qc, [self.n_nodes + 1]])
        data = np.concatenate([data, pw, qw, direct])
        n = self.n_nodes + 2
        graph = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
        dist = _csgraph_dijkstra(graph, directed=False, indices=[self.n_nodes])
        return float(dist[0, self.n_nodes + 1])

    def distance_field(self, center: SurfacePoint):
        """Distances from ``center`` to every grid node.

        Returns (vertex distance, array of shape (n_r, n_theta)).
        """
        rows, cols, data = self._edges
        cr, cc, cw = self._attach(center, self.n_nodes)
        rows = np.concatenate([rows, cr])
        cols = np.concatenate([cols, cc])
        data = np.concatenate([data, cw])
        n = self.n_nodes + 1
        graph = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
        dist = _csgraph_dijkstra(graph, directed=False, indices=[self.n_nodes])[0]
        return float(dist[0]), dist[1 : self.n_nodes].reshape(self.n_r, self.n_theta)


def grid_distance_oracle(
    spec: DensitySpec,
    p: SurfacePoint,
    q: SurfacePoint,
    grid: tuple[int, int] = (128, 256),
    reach: int = 3,
) -> float:
    """Shortest-path upper bound for the distance between p and q.

    The graph lives on {r <= max(r1, r2)}, where minimizers are confined
    because the radial projection is 1-Lipschitz.
    """
    r_max = max(p.r, q.r)
    if r_max <= 0.0:
        return 0.0
    pg = PolarGraph(spec, r_max, grid[0], grid[1], reach=reach, spacing="geometric")
    return pg.shortest(p, q)


def distortion_estimate(
    spec: DensitySpec,
    alpha: float,
    k: float = 0.5,
    n: int = 100,
    seed: int = 0,
) -> float:
    """Empirical bi-Lipschitz defect of the comparison-cone identification.

    Samples point pairs uniformly (in coordinates) from the annulus
    {k <= r <= 1} of the rescaled space, and compares distances under
    f_alpha with distances on the cone of angle 2*pi*f(alpha)/alpha.
    Returns max over pairs of max(d_X/d_Y, d_Y/d_X) - 1 >= 0.
    """
    if not 0.0 < k < 1.0:
        raise DomainError("inner cutoff k must lie in (0, 1)")
    f_alpha = rescale(spec, alpha)
    beta = cone_angle(spec, alpha)
    rng = np.random.default_rng(seed)
    rs = rng.uniform(k, 1.0, size=(n, 2))
    ths = rng.uniform(-math.pi, math.pi, size=(n, 2))
    worst = 0.0
    for i in range(n):
        pp = SurfacePoint(rs[i, 0], ths[i, 0])
        qq = SurfacePoint(rs[i, 1], ths[i, 1])
        d_x = clairaut_geodesic(f_alpha, pp, qq).distance
        d_y = cone_distance(beta, pp, qq)
        if d_x <= 0.0 or d_y <= 0.0:
            continue
        worst = max(worst, d_x / d_y, d_y / d_x)
    return max(worst - 1.0, 0.0)
