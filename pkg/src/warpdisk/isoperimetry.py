"""Candidate isoperimetric regions and the blow-up scan of their best ratio.

Candidates live in the rescaled space [0, 1] x_{f_alpha} S^1 and come in two
families: axis-symmetric star-shaped regions {r <= rbar(theta)} with
monotone profile, and metric balls read off a grid distance field.  The
reported best ratio area/length^2 is an explicit lower bound for the
isoperimetric constant of the ball of radius alpha, with the search family
documented in the report; maximizers of the true constant are unknown.

Diagnostics mirror the dyadic sectorial decomposition used to prove the
rough quadratic isoperimetric inequality (per-annulus area against the
squared boundary-length lower bound) and the near-origin boundary-length
and area masses whose decay drives the convergence of the constants to
1/(4*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import minimize

from .density import DensitySpec, antiderivative, circle_length, eval_density, rescale, cone_angle
from .errors import DomainError, ZeroRegionError
from .geometry import SurfacePoint, _evaluator, _segment_lengths

EUCLIDEAN_ISO = 1.0 / (4.0 * math.pi)


@dataclass
class RadialProfile:
    """Symmetric monotone star-shaped region {0 <= r <= rbar(theta)}.

    ``half`` holds the m+1 node values on the uniform grid over [0, pi];
    the region is mirror-symmetric in theta and rbar is nonincreasing on
    [0, pi].  ``alpha`` records the blow-up scale whose rescaled density the
    profile lives in.
    """

    m: int
    half: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.half, dtype=float)
        if h.shape != (self.m + 1,):
            raise DomainError(f"expected {self.m + 1} node values, got {h.shape}")
        if np.any(h < -1e-12) or np.any(h > 1.0 + 1e-12):
            raise DomainError("profile values must lie in [0, 1]")
        if np.any(np.diff(h) > 1e-12):
            raise DomainError("profile must be nonincreasing on [0, pi]")
        self.half = np.clip(h, 0.0, 1.0)

    @property
    def dtheta(self) -> float:
        return math.pi / self.m

    def full(self) -> np.ndarray:
        """Node values on the symmetric grid theta_j = -pi + j*pi/m, j < 2m."""
        h = self.half
        # j < m mirrors half[m-j]; j >= m reads half[j-m]
        return np.concatenate([h[1:][::-1], h[:-1]])

    @staticmethod
    def constant(m: int, s: float, alpha: float = 1.0) -> "RadialProfile":
        return RadialProfile(m, np.full(m + 1, float(s)), alpha)

    def to_json(self) -> str:
        import json

        return json.dumps({"m": self.m, "half": self.half.tolist(), "alpha": self.alpha})

    @staticmethod
    def from_json(text: str) -> "RadialProfile":
        import json

        d = json.loads(text)
        return RadialProfile(d["m"], np.asarray(d["half"]), d.get("alpha", 1.0))


@dataclass
class IsoReport:
    """A measured candidate region: area, boundary length and their ratio."""

    area: float
    boundary_length: float
    ratio: float
    alpha: float
    family: str
    descriptor: dict = field(default_factory=dict)
    clipped: bool = False
    stagnated: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def profile_measures(f_alpha: DensitySpec, prof: RadialProfile):
    """(area, boundary length, ratio) of a profile region.

    Area sums the exact radial integrals over node-centered cells; the
    boundary is the coordinate-linear polyline through the nodes, whose
    segment lengths sqrt(drbar^2 + f(mid)^2 dtheta^2) degrade gracefully to
    radial jumps at step discontinuities.
    """
    rbar = prof.full()
    if np.all(rbar <= 0.0):
        raise ZeroRegionError("profile region is degenerate (rbar identically 0)")
    dth = prof.dtheta
    area = float(np.sum(antiderivative(f_alpha, rbar))) * dth
    nxt = np.roll(rbar, -1)
    mid = 0.5 * (rbar + nxt)
    f_mid = eval_density(f_alpha, mid)
    seg = np.sqrt((nxt - rbar) ** 2 + (f_mid * dth) ** 2)
    length = float(np.sum(seg))
    if length <= 0.0:
        raise ZeroRegionError("profile boundary has zero length")
    return area, length, area / length**2


def _arc_shoot(ev, r_c: float, f_c: float, psi: float, s: float):
    """Endpoint (r, theta >= 0) of the geodesic of length s shot at angle psi.

    psi is measured from the outward radial direction; the Clairaut constant
    is f(r_c) * sin(psi).  Returns None when the path runs through the
    vertex region (handled by the caller's shadow arc).
    """
    from scipy.optimize import brentq

    from .geometry import _leg_integrals, _turning_radius

    c = f_c * math.sin(psi)
    if psi <= 1e-12:
        return r_c + s, 0.0
    if psi >= math.pi - 1e-12:
        return (r_c - s, 0.0) if s < r_c else None
    if psi <= math.pi / 2.0:
        # outward from the start; radius increases monotonically
        hi = r_c + s
        r_end = brentq(
            lambda r: _leg_integrals(ev, c, r_c, r)[1] - s, r_c, hi, xtol=1e-12
        )
        sweep, _ = _leg_integrals(ev, c, r_c, r_end)
        return r_end, sweep
    # inward: dip to the turning radius, then back out
    r_t = _turning_radius(ev, c, r_c)
    c_use = min(c, float(ev(r_t)))
    sweep_in, len_in = _leg_integrals(ev, c_use, r_t, r_c)
    if s <= len_in:
        r_end = brentq(
            lambda r: len_in - _leg_integrals(ev, c_use, r_t, r)[1] - s,
            r_t, r_c, xtol=1e-12,
        )
        s_part, _ = _leg_integrals(ev, c_use, r_t, r_end)
        return r_end, sweep_in - s_part
    extra = s - len_in
    r_end = brentq(
        lambda r: _leg_integrals(ev, c_use, r_t, r)[1] - extra, r_t, r_t + extra,
        xtol=1e-12,
    )
    s_part, _ = _leg_integrals(ev, c_use, r_t, r_end)
    return r_end, sweep_in + s_part


def sphere_polygon(f_alpha: DensitySpec, center: SurfacePoint, s: float,
                   n_dirs: int = 96):
    """Closed polygon tracing the metric sphere S(center, s).

    Geodesics are shot from the center at n_dirs angles and stepped to arc
    length s; behind the vertex, where only vertex paths realize the
    distance, the sphere is the exact circle r = s - d(center, o), appended
    as a shadow arc.  Returns (r, theta) arrays of the closed polygon.
    """
    if center.r <= 1e-14:
        th = np.linspace(-math.pi, math.pi, n_dirs, endpoint=False)
        return np.full(n_dirs, s), th
    ev = _evaluator(f_alpha)
    f_c = float(ev(center.r))
    upper = []
    for psi in np.linspace(0.0, math.pi, n_dirs // 2 + 1):
        hit = _arc_shoot(ev, center.r, f_c, psi, s)
        if hit is None:
            break
        r_end, sweep = hit
        if sweep > math.pi or r_end < 0.0:
            break
        upper.append((r_end, sweep))
    if not upper:
        raise ZeroRegionError("sphere trace produced no points")
    theta_max = upper[-1][1]
    if s > center.r + 1e-12 and theta_max < math.pi:
        rho = s - center.r
        arc = np.linspace(theta_max, math.pi, 14)[1:]
        upper.extend((rho, t) for t in arc)
    rs = np.array([p[0] for p in upper])
    ths = np.array([p[1] for p in upper])
    # mirror over the axis; drop duplicated endpoints at theta = 0 and pi
    interior = (ths > 1e-12) & (ths < math.pi - 1e-12)
    r_full = np.concatenate([rs, rs[interior][::-1]])
    t_full = np.concatenate([ths, -ths[interior][::-1]])
    return r_full, t_full + center.theta


def _polygon_measures(f_alpha: DensitySpec, poly_r, poly_th):
    """(area, length) of the region bounded by a closed coordinate polygon.

    The area integral of f over the region is, by Green's theorem in the
    (theta, r) chart, |closed integral of F(r) dtheta| with F the radial
    antiderivative; edges are coordinate-linear.
    """
    ev = _evaluator(f_alpha)
    r0 = np.asarray(poly_r, float)
    th0 = np.asarray(poly_th, float)
    dr = np.roll(r0, -1) - r0
    dth = np.array([(d + math.pi) % (2 * math.pi) - math.pi
                    for d in np.roll(th0, -1) - th0])
    keep = (np.abs(dr) > 1e-15) | (np.abs(dth) > 1e-15)
    r0, dr, dth = r0[keep], dr[keep], dth[keep]
    length = float(np.sum(_segment_lengths(ev, r0, dr, dth)))
    nodes, weights = np.polynomial.legendre.leggauss(16)
    t = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    rr = r0[:, None] + dr[:, None] * t[None, :]
    F = antiderivative(f_alpha, rr.ravel()).reshape(rr.shape)
    area = abs(float(np.sum((F @ w) * dth)))
    return area, length


def geodesic_ball_candidate(
    f_alpha: DensitySpec,
    center: SurfacePoint,
    s: float,
    n_dirs: int = 96,
    alpha: float = 1.0,
) -> IsoReport:
    """Measure the metric ball B(center, s) as a candidate region.

    The boundary sphere is traced by arc-length shooting along Clairaut
    geodesics (exact to solver tolerance); area integrates the density over
    the enclosed polygon and the perimeter is the polygon's metric length.
    Regions poking beyond the unit ball are flagged as clipped.
    """
    if s <= 0.0:
        raise DomainError("ball radius must be positive")
    poly_r, poly_th = sphere_polygon(f_alpha, center, s, n_dirs)
    clipped = bool(np.max(poly_r) > 1.0 + 1e-9)
    if clipped:
        # measure the intersection with the space: boundary follows the rim
        poly_r = np.minimum(poly_r, 1.0)
    area, length = _polygon_measures(f_alpha, poly_r, poly_th)
    if length <= 0.0:
        raise ZeroRegionError("sphere polygon degenerated")
    return IsoReport(
        area, length, area / length**2, alpha, "ball",
        {"center_r": center.r, "center_theta": center.theta, "radius": s},
        clipped=clipped,
    )


# ---------------------------------------------------------------------------
# ratio maximization and the alpha scan
# ---------------------------------------------------------------------------


@dataclass
class OptimizerConfig:
    m: int = 64
    restarts: int = 8
    iters: int = 2000
    shrink_tol: float = 1e-9
    ball_dirs: int = 96
    ball_centers: tuple = (0.0, 0.2, 0.35, 0.5, 0.65, 0.8)
    ball_radii: int = 20
    mono_tol: float = 1e-3
    seed: int = 0


def _project_half(x: np.ndarray) -> np.ndarray:
    """Clip to [0, 1] and repair monotonicity by a running minimum."""
    return np.minimum.accumulate(np.clip(x, 0.0, 1.0))


def _best_profile(f_alpha: DensitySpec, alpha: float, cfg: OptimizerConfig,
                  rng: np.random.Generator) -> IsoReport:
    m = cfg.m

    def ratio_of(x):
        half = _project_half(x)
        if half[0] <= 1e-9:
            return None, half
        prof = RadialProfile(m, half, alpha)
        try:
            _, _, ratio = profile_measures(f_alpha, prof)
        except ZeroRegionError:
            return None, half
        return ratio, half

    def objective(x):
        ratio, _ = ratio_of(x)
        return 0.0 if ratio is None else -ratio

    # constant profiles are both the reference family and the best starts
    s_grid = np.linspace(0.1, 1.0, 16)
    const_ratios = [objective(np.full(m + 1, s)) for s in s_grid]
    s_best = float(s_grid[int(np.argmin(const_ratios))])

    starts = [np.full(m + 1, s_best), np.linspace(1.0, 0.0, m + 1)]
    while len(starts) < cfg.restarts:
        base = np.full(m + 1, s_best) if len(starts) % 2 else np.linspace(s_best, 0.0, m + 1)
        starts.append(_project_half(base + rng.normal(0.0, 0.08, m + 1)))

    best_x = np.full(m + 1, s_best)
    best_val = min(const_ratios)
    stagnated = False
    for x0 in starts[: cfg.restarts]:
        res = minimize(
            objective, x0, method="Nelder-Mead",
            options={"maxiter": cfg.iters, "fatol": cfg.shrink_tol, "xatol": 1e-6,
                     "adaptive": True},
        )
        if res.fun < best_val:
            best_val = res.fun
            best_x = res.x
        if not res.success and res.fun < -1e-12:
            stagnated = True
    half = _project_half(best_x)
    prof = RadialProfile(m, half, alpha)
    area, length, ratio = profile_measures(f_alpha, prof)
    return IsoReport(
        area, length, ratio, alpha, "profile",
        {"m": m, "half": half.tolist()}, stagnated=stagnated,
    )


def _best_ball(f_alpha: DensitySpec, alpha: float, cfg: OptimizerConfig) -> IsoReport | None:
    best = None
    for r_c in cfg.ball_centers:
        center = SurfacePoint(r_c, 0.0)
        s_max = 0.97 * (1.0 - r_c)  # keep the ball inside the unit disk
        if s_max <= 0.05:
            continue
        for s in np.linspace(0.05, s_max, cfg.ball_radii):
            try:
                rep = geodesic_ball_candidate(
                    f_alpha, center, float(s), n_dirs=cfg.ball_dirs, alpha=alpha
                )
            except ZeroRegionError:
                continue
            if rep.clipped:
                continue
            if best is None or rep.ratio > best.ratio:
                best = rep
    return best


def maximize_ratio(f: DensitySpec, alpha: float, cfg: OptimizerConfig | None = None) -> IsoReport:
    """Best isoperimetric ratio over the two candidate families at scale alpha.

    The result is a certified lower bound for the isoperimetric constant of
    the ball of radius alpha (ratios are exact region measurements; only the
    search is heuristic).
    """
    cfg = cfg or OptimizerConfig()
    if not 0.0 < alpha < f.R:
        raise DomainError(f"alpha must lie in (0, R), got {alpha}")
    f_alpha = rescale(f, alpha)
    rng = np.random.default_rng(cfg.seed)
    best = _best_profile(f_alpha, alpha, cfg, rng)
    ball = _best_ball(f_alpha, alpha, cfg)
    if ball is not None and ball.ratio > best.ratio:
        best = ball
    return best


@dataclass
class ScanRow:
    alpha: float
    beta: float
    C_hat: float
    family: str
    area: float
    length: float
    epsilon_hat: float
    seed: int
    mono_flag: bool = False

    def to_csv_row(self) -> str:
        return (
            f"{self.alpha:.12g},{self.beta:.12g},{self.C_hat:.12g},{self.family},"
            f"{self.area:.12g},{self.length:.12g},{self.epsilon_hat:.12g},"
            f"{self.seed}"
        )


CSV_HEADER = "alpha,beta,C_hat,family,area,length,epsilon_hat,seed"


def _scan_worker(item):
    spec_json, alpha, cfg_dict = item
    return maximize_ratio(DensitySpec.from_json(spec_json), alpha,
                          OptimizerConfig(**cfg_dict))


def scan_alpha(f: DensitySpec, alphas, cfg: OptimizerConfig | None = None,
               jobs: int = 1) -> list[ScanRow]:
    """Run maximize_ratio along a decreasing alpha list.

    Rows receive seeds derived from the root seed (hence run independently
    and, with jobs > 1, in parallel); the best constant over the scan anchors
    the epsilon_hat bookkeeping (C_ref/ratio - 1).  A row is flagged when the
    estimates violate monotonicity in alpha by more than mono_tol (an
    optimizer shortfall, not a hard failure).
    """
    cfg = cfg or OptimizerConfig()
    alphas = [float(a) for a in alphas]
    if any(a2 >= a1 for a1, a2 in zip(alphas, alphas[1:])):
        raise DomainError("alphas must be strictly decreasing")
    seeds = np.random.SeedSequence(cfg.seed).generate_state(len(alphas))
    work = [
        (f.to_json(), a, {**cfg.__dict__, "seed": int(s)})
        for a, s in zip(alphas, seeds)
    ]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            reports = list(pool.map(_scan_worker, work))
    else:
        reports = [_scan_worker(item) for item in work]
    c_ref = max(r.ratio for r in reports)
    rows = []
    for a, s, rep in zip(alphas, seeds, reports):
        rows.append(
            ScanRow(
                a, cone_angle(f, a), rep.ratio, rep.family, rep.area,
                rep.boundary_length, c_ref / rep.ratio - 1.0, int(s),
            )
        )
    # alpha_i < alpha_j must give C_hat_i <= C_hat_j + mono_tol
    for i in range(len(rows)):
        for j in range(i):
            if rows[i].C_hat > rows[j].C_hat + cfg.mono_tol:
                rows[i].mono_flag = True
    return rows


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


@dataclass
class AnnulusRecord:
    n: int
    tau: float
    length_lb: float
    area: float
    ratio: float


@dataclass
class AnnulusDiagnostics:
    records: list
    total_area: float
    C_emp: float

    @property
    def all_bounded(self) -> bool:
        return all(rec.area <= self.C_emp * rec.length_lb**2 * (1 + 1e-9)
                   for rec in self.records if rec.length_lb > 0)


def annulus_diagnostics(f_alpha: DensitySpec, prof: RadialProfile,
                        n_max: int | None = None) -> AnnulusDiagnostics:
    """Dyadic band decomposition of a profile region.

    Band n collects the cells with 2^(-n-1) rbar_0 < rbar <= 2^(-n) rbar_0;
    tau_n is the angular width in which the profile crosses the band, and
    the boundary length within the band is bounded below by
    max(tau_n/pi * l(S(o, 2^(-n-1) rbar_0)), 2^(-n) rbar_0).  Together with
    the empirical circle-doubling constant this bounds each band's area by
    C_emp * length_lb^2.
    """
    half = prof.half
    rbar0 = float(half[0])
    if rbar0 <= 0.0:
        raise ZeroRegionError("profile has empty interior")
    rmin = float(np.min(half))
    if n_max is None:
        if rmin > 0.0:
            n_max = max(int(math.floor(math.log2(rbar0 / rmin))), 0)
        else:
            positive = half[half > 0.0]
            n_max = min(int(math.ceil(math.log2(rbar0 / float(np.min(positive))))) + 1, 60)

    full = prof.full()
    dth = prof.dtheta
    cell_area = antiderivative(f_alpha, full) * dth
    with np.errstate(divide="ignore"):
        band = np.where(
            full > 0.0,
            np.clip(np.floor(np.log2(rbar0 / np.maximum(full, 1e-300))), 0, n_max),
            -1,
        ).astype(int)

    # theta_n = largest positive angle where rbar still reaches 2^-n rbar0
    def theta_at(level):
        above = np.nonzero(half >= level * (1.0 - 1e-12))[0]
        return dth * float(above[-1]) if above.size else 0.0

    radii_half = np.array([2.0 ** (-n - 1) * rbar0 for n in range(n_max + 1)])
    c_emp = float(
        np.max(
            [circle_length(f_alpha, min(2 * r, 1.0)) / circle_length(f_alpha, r)
             for r in radii_half if r > 0]
        )
    )
    records = []
    for n in range(n_max + 1):
        tau = theta_at(2.0 ** (-n - 1) * rbar0) - theta_at(2.0 ** (-n) * rbar0)
        area_n = float(np.sum(cell_area[band == n]))
        lb = max(
            tau / math.pi * circle_length(f_alpha, 2.0 ** (-n - 1) * rbar0),
            2.0 ** (-n) * rbar0 if n < n_max or rmin <= 0.0 else 0.0,
        )
        ratio = area_n / lb**2 if lb > 0 else math.nan
        records.append(AnnulusRecord(n, tau, lb, area_n, ratio))
    total = float(np.sum(cell_area[band >= 0]))
    return AnnulusDiagnostics(records, total, c_emp)


def near_origin_diagnostics(f_alpha: DensitySpec, prof: RadialProfile, nus):
    """Boundary length and area of the region clipped to {r < nu}, per nu."""
    full = prof.full()
    dth = prof.dtheta
    nxt = np.roll(full, -1)
    out = []
    for nu in nus:
        if not 0.0 < nu <= 1.0:
            raise DomainError("nu must lie in (0, 1]")
        b_nu = float(np.sum(antiderivative(f_alpha, np.minimum(full, nu)))) * dth
        l_nu = 0.0
        for r0, r1 in zip(full, nxt):
            lo_t, hi_t = _clip_fraction(r0, r1, nu)
            if hi_t <= lo_t:
                continue
            frac = hi_t - lo_t
            mid = r0 + (r1 - r0) * 0.5 * (lo_t + hi_t)
            f_mid = eval_density(f_alpha, mid)
            l_nu += math.sqrt((r1 - r0) ** 2 + (f_mid * dth) ** 2) * frac
        out.append((float(nu), l_nu, b_nu))
    return out


def _clip_fraction(r0: float, r1: float, nu: float):
    """Parameter range of t in [0,1] where r0 + t(r1-r0) < nu."""
    if r0 < nu and r1 < nu:
        return 0.0, 1.0
    if r0 >= nu and r1 >= nu:
        return 0.0, 0.0
    t = (nu - r0) / (r1 - r0)
    return (0.0, t) if r0 < nu else (t, 1.0)
