"""Warping densities for surfaces of revolution built over [0, R] x S^1.

A density f determines the length element sqrt(dr^2 + f(r)^2 dtheta^2).  The
built-in closed-form family is

    f(r) = r * (a0 + a1*log(1/r) + a2*log(1/r)^2),

which contains the flat disk (a=(1,0,0)), every cone (a=(beta/2pi,0,0)) and
the two logarithmic densities used throughout the package.  The family is
closed under the blow-up rescaling f_alpha(r) = f(alpha r)/alpha, so rescaled
densities keep exact closed forms for evaluation and integration.  Arbitrary
sampled densities are supported through monotone piecewise-linear tables.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EvaluationError, QuadratureError

TWO_PI = 2.0 * math.pi

# Largest radii on which the two log densities are increasing (their
# admissibility domains).
LOG_E0_RMAX = math.exp(-1.0)
LOGLOG_E1_RMAX = math.exp(-(1.0 + math.sqrt(5.0)) / 2.0)

_CLOSED_KINDS = ("flat", "cone", "log-e0", "loglog-e1", "log-poly")
_KINDS = _CLOSED_KINDS + ("table",)


@dataclass(frozen=True)
class DensitySpec:
    """Immutable description of a warping density on [0, R].

    kind is one of 'flat', 'cone', 'log-e0', 'loglog-e1', 'log-poly',
    'table'.  Cones carry ``beta`` (circumference of the unit circle around
    the vertex), 'log-poly' carries the coefficient triple, tables carry a
    strictly increasing (r, f(r)) sample array starting at (0, 0).
    """

    kind: str
    R: float = 1.0
    beta: float | None = None
    coeffs: tuple[float, float, float] | None = None
    samples: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown density kind {self.kind!r}")
        if not (self.R > 0.0 and math.isfinite(self.R)):
            raise DomainError(f"outer radius must be positive, got {self.R}")
        if self.kind == "cone":
            if self.beta is None or self.beta <= 0.0:
                raise DomainError("cone density needs an angle beta > 0")
        if self.kind == "log-e0" and self.R > LOG_E0_RMAX + 1e-12:
            raise DomainError(f"log-e0 density requires R <= 1/e, got {self.R}")
        if self.kind == "loglog-e1" and self.R > LOGLOG_E1_RMAX + 1e-12:
            raise DomainError(
                f"loglog-e1 density requires R <= exp(-(1+sqrt 5)/2), got {self.R}"
            )
        if self.kind == "log-poly":
            if self.coeffs is None or len(self.coeffs) != 3:
                raise DomainError("log-poly density needs a coefficient triple")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.kind == "table":
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 2:
                raise DomainError("table density needs an (n, 2) sample array")
            if s[0, 0] != 0.0 or s[0, 1] != 0.0:
                s = np.vstack([[0.0, 0.0], s])
            if np.any(np.diff(s[:, 0]) <= 0.0):
                raise DomainError("table radii must be strictly increasing")
            if not np.all(np.isfinite(s)) or np.any(s[:, 1] < 0.0):
                raise DomainError("table values must be finite and nonnegative")
            if abs(s[-1, 0] - self.R) > 1e-12 * max(1.0, self.R):
                raise DomainError("last table radius must equal R")
            s.setflags(write=False)
            object.__setattr__(self, "samples", s)

    def __call__(self, r):
        return eval_density(self, r)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def flat(R: float = 1.0) -> "DensitySpec":
        """f(r) = r, the Euclidean disk of radius R."""
        return DensitySpec("flat", R)

    @staticmethod
    def cone(beta: float, R: float = 1.0) -> "DensitySpec":
        """f(r) = beta*r/(2*pi), the cone over a circle of length beta."""
        return DensitySpec("cone", R, beta=float(beta))

    @staticmethod
    def log_e0(R: float = LOG_E0_RMAX) -> "DensitySpec":
        """f(r) = r*log(1/r), the point-collapse density."""
        return DensitySpec("log-e0", R)

    @staticmethod
    def loglog_e1(R: float = LOGLOG_E1_RMAX) -> "DensitySpec":
        """f(r) = r*log(1/r)*(1 + log(1/r)), the disk-collapse density."""
        return DensitySpec("loglog-e1", R)

    @staticmethod
    def log_poly(a0: float, a1: float, a2: float, R: float = 1.0) -> "DensitySpec":
        return DensitySpec("log-poly", R, coeffs=(a0, a1, a2))

    @staticmethod
    def from_table(r, f, R: float | None = None) -> "DensitySpec":
        s = np.column_stack([np.asarray(r, float), np.asarray(f, float)])
        return DensitySpec("table", float(R if R is not None else s[-1, 0]), samples=s)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "R": self.R, "parameters": {}}
        if self.beta is not None:
            d["parameters"]["beta"] = self.beta
        if self.coeffs is not None:
            d["parameters"]["coeffs"] = list(self.coeffs)
        if self.samples is not None:
            d["samples"] = np.asarray(self.samples).tolist()
        return d

    @staticmethod
    def from_dict(d: dict) -> "DensitySpec":
        params = d.get("parameters", {})
        coeffs = params.get("coeffs")
        return DensitySpec(
            d["kind"],
            float(d["R"]),
            beta=params.get("beta"),
            coeffs=tuple(coeffs) if coeffs is not None else None,
            samples=np.asarray(d["samples"], float) if "samples" in d else None,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "DensitySpec":
        return DensitySpec.from_dict(json.loads(text))


def _log_coeffs(spec: DensitySpec):
    """Coefficient triple of f(r)/r in powers of log(1/r), or None for tables."""
    if spec.kind == "flat":
        return (1.0, 0.0, 0.0)
    if spec.kind == "cone":
        return (spec.beta / TWO_PI, 0.0, 0.0)
    if spec.kind == "log-e0":
        return (0.0, 1.0, 0.0)
    if spec.kind == "loglog-e1":
        # log(1/r)*(1 + log(1/r)) = L + L^2
        return (0.0, 1.0, 1.0)
    if spec.kind == "log-poly":
        return spec.coeffs
    return None


def _check_radius(spec: DensitySpec, r: np.ndarray):
    if np.any(r < -1e-15) or np.any(r > spec.R * (1.0 + 1e-12)):
        bad = r[(r < -1e-15) | (r > spec.R * (1.0 + 1e-12))]
        raise DomainError(f"radius {bad.flat[0]} outside [0, {spec.R}]")


def eval_density(spec: DensitySpec, r):
    """Evaluate f(r).  Accepts scalars or arrays; exact for built-in kinds."""
    arr = np.asarray(r, dtype=float)
    _check_radius(spec, arr)
    arr = np.clip(arr, 0.0, spec.R)
    coeffs = _log_coeffs(spec)
    if coeffs is not None:
        a0, a1, a2 = coeffs
        out = np.zeros_like(arr)
        pos = arr > 0.0
        if np.any(pos):
            L = -np.log(arr[pos])
            out[pos] = arr[pos] * (a0 + L * (a1 + a2 * L))
    else:
        s = spec.samples
        out = np.interp(arr, s[:, 0], s[:, 1])
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"density {spec.kind} produced non-finite values")
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def antiderivative(spec: DensitySpec, r):
    """F(r) = integral of f over [0, r], exact for every supported kind.

    For the log-polynomial family the antiderivative of s*log(1/s)^k is
    closed form (k=1 gives s^2/4 - (s^2/2) log s); tables integrate their
    piecewise-linear interpolant segment by segment.
    """
    arr = np.asarray(r, dtype=float)
    _check_radius(spec, arr)
    arr = np.clip(arr, 0.0, spec.R)
    coeffs = _log_coeffs(spec)
    if coeffs is not None:
        a0, a1, a2 = coeffs
        out = np.zeros_like(arr)
        pos = arr > 0.0
        if np.any(pos):
            rp = arr[pos]
            L = -np.log(rp)
            r2 = rp * rp
            out[pos] = (
                a0 * r2 / 2.0
                + a1 * (r2 / 4.0 + r2 * L / 2.0)
                + a2 * (r2 / 4.0 + r2 * L / 2.0 + r2 * L * L / 2.0)
            )
    else:
        s = spec.samples
        knots_r, knots_f = s[:, 0], s[:, 1]
        # exact integral of the interpolant up to each knot
        seg = np.diff(knots_r) * (knots_f[:-1] + knots_f[1:]) / 2.0
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        idx = np.clip(np.searchsorted(knots_r, arr, side="right") - 1, 0, len(knots_r) - 2)
        r0, f0 = knots_r[idx], knots_f[idx]
        slope = (knots_f[idx + 1] - f0) / (knots_r[idx + 1] - r0)
        dr = arr - r0
        out = cum[idx] + f0 * dr + slope * dr * dr / 2.0
    if np.isscalar(r) or np.ndim(r) == 0:
        return float(out)
    return out


def circle_length(spec: DensitySpec, r):
    """Length of the metric circle S(o, r): 2*pi*f(r)."""
    return TWO_PI * eval_density(spec, r)


def ball_area(spec: DensitySpec, r, tol: float = 1e-10):
    """Area of the metric ball B(o, r): 2*pi * integral of f over [0, r].

    Uses the closed-form antiderivative (or the exact table integral); the
    adaptive-quadrature fallback only runs for kinds without one and raises
    QuadratureError when the estimated residual exceeds ``tol``.
    """
    if _log_coeffs(spec) is not None or spec.kind == "table":
        return TWO_PI * antiderivative(spec, r)
    from scipy.integrate import quad  # pragma: no cover - no such kind today

    val, err = quad(lambda s: eval_density(spec, s), 0.0, float(r), epsabs=tol)
    if err > 10.0 * max(tol, 1e-14):
        raise QuadratureError("ball_area quadrature did not converge", residual=err)
    return TWO_PI * val


def rescale(spec: DensitySpec, alpha: float) -> DensitySpec:
    """Blow-up rescaling: the density f_alpha(r) = f(alpha*r)/alpha on [0, 1].

    Closed-form kinds stay closed form: substituting log(1/(alpha r)) =
    log(1/alpha) + log(1/r) shifts the log-polynomial coefficients.  Tables
    rescale their knots exactly.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < spec.R:
        raise DomainError(f"rescale needs 0 < alpha < R, got alpha={alpha}")
    coeffs = _log_coeffs(spec)
    if coeffs is not None:
        a0, a1, a2 = coeffs
        c0 = -math.log(alpha)
        b0 = a0 + a1 * c0 + a2 * c0 * c0
        b1 = a1 + 2.0 * a2 * c0
        b2 = a2
        if b1 == 0.0 and b2 == 0.0:
            if b0 == 1.0:
                return DensitySpec.flat(1.0)
            return DensitySpec.cone(TWO_PI * b0, 1.0)
        return DensitySpec.log_poly(b0, b1, b2, 1.0)
    s = spec.samples
    inside = s[:, 0] < alpha
    knots_r = np.concatenate([s[inside, 0] / alpha, [1.0]])
    knots_f = np.concatenate([s[inside, 1] / alpha, [eval_density(spec, alpha) / alpha]])
    return DensitySpec.from_table(knots_r, knots_f, R=1.0)


def cone_angle(spec: DensitySpec, alpha: float) -> float:
    """Angle beta = 2*pi*f(alpha)/alpha of the comparison cone at scale alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha <= spec.R:
        raise DomainError(f"cone_angle needs 0 < alpha <= R, got {alpha}")
    return TWO_PI * eval_density(spec, alpha) / alpha


# ---------------------------------------------------------------------------
# admissibility checking
# ---------------------------------------------------------------------------


@dataclass
class ConditionResult:
    passed: bool
    witness: tuple | None = None
    detail: dict = field(default_factory=dict)


@dataclass
class AdmissibilityReport:
    """Outcome of the three admissibility conditions with concrete witnesses.

    cond_a: f increasing with f(0)=0.  cond_b: f(r) >= r.  cond_c: the
    rescaling defect sup_{r in [k,1]} |f(alpha r)/(r f(alpha)) - 1| decays
    along a decreasing alpha sequence.  A failing condition always carries a
    witness reproducing the violation.
    """

    cond_a: ConditionResult
    cond_b: ConditionResult
    cond_c: ConditionResult
    grid_points: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.cond_a.passed and self.cond_b.passed and self.cond_c.passed

    def to_dict(self) -> dict:
        def conv(c):
            return {"passed": c.passed, "witness": c.witness, "detail": c.detail}

        return {
            "passed": self.passed,
            "cond_a": conv(self.cond_a),
            "cond_b": conv(self.cond_b),
            "cond_c": conv(self.cond_c),
            "grid_points": self.grid_points,
            "tol": self.tol,
        }


def _limit_alphas(R: float) -> list[float]:
    decades = [10.0 ** (-k) for k in range(1, 9)]
    alphas = [a for a in decades if a < 0.999 * R]
    if len(alphas) >= 4:
        return alphas
    return list(np.geomspace(R * 1e-1, R * 1e-8, 8))


def check_admissibility(
    spec: DensitySpec,
    grid_points: int = 400,
    tol: float = 1e-9,
    compacts: tuple[float, ...] = (0.1, 0.5),
    limit_tol: float = 0.5,
    limit_points: int = 64,
) -> AdmissibilityReport:
    """Check the three admissibility conditions on finite grids.

    (a) and (b) are verified pointwise on a log-uniform grid over (0, R] with
    relative slack ``tol``.  (c) is a limit statement: it is declared to hold
    when, for each compact [k, 1], the sup defect is strictly decreasing
    along the fixed alpha decades and falls below ``limit_tol`` at the
    smallest alpha.  For the logarithmic densities the defect decays like
    1/log(1/alpha), which bounds how small a terminal threshold can be at
    desk scale.
    """
    grid = np.geomspace(spec.R * 1e-9, spec.R, grid_points)
    fv = eval_density(spec, grid)
    if not np.all(np.isfinite(fv)):
        raise EvaluationError("density produced non-finite values on the check grid")

    # (a) monotone with f(0) = 0, checked pairwise
    slack = tol * max(1.0, float(np.max(fv)))
    drops = np.nonzero(np.diff(fv) < -slack)[0]
    f0 = eval_density(spec, 0.0)
    if abs(f0) > tol:
        cond_a = ConditionResult(False, witness=((0.0, f0),), detail={"reason": "f(0) != 0"})
    elif drops.size:
        i = int(drops[0])
        cond_a = ConditionResult(
            False,
            witness=((float(grid[i]), float(fv[i])), (float(grid[i + 1]), float(fv[i + 1]))),
        )
    else:
        cond_a = ConditionResult(True)

    # (b) f(r) >= r up to relative slack
    bad = np.nonzero(fv < grid * (1.0 - tol))[0]
    if bad.size:
        i = int(bad[0])
        cond_b = ConditionResult(False, witness=(float(grid[i]), float(fv[i])))
    else:
        cond_b = ConditionResult(True)

    # (c) defect decay along alpha decades on each compact [k, 1]
    alphas = _limit_alphas(spec.R)
    cond_c = ConditionResult(True, detail={"alphas": alphas, "defects": {}})
    for k in compacts:
        rs = np.linspace(k, 1.0, limit_points)
        defects = []
        worst = []
        for a in alphas:
            ratios = eval_density(spec, a * rs) / (rs * eval_density(spec, a))
            d = np.abs(ratios - 1.0)
            i = int(np.argmax(d))
            defects.append(float(d[i]))
            worst.append((a, float(rs[i]), float(ratios[i])))
        cond_c.detail["defects"][k] = defects
        decreasing = all(
            defects[i + 1] < defects[i] + 1e-12 for i in range(len(defects) - 1)
        )
        small = defects[-1] < limit_tol
        if not (decreasing and small):
            cond_c.passed = False
            if cond_c.witness is None:
                j = len(defects) - 1 if not small else int(np.argmax(np.diff(defects) >= 0))
                cond_c.witness = worst[j] if not small else worst[j + 1]
    return AdmissibilityReport(cond_a, cond_b, cond_c, grid_points, tol)


@dataclass
class GeoEstimateReport:
    """Grid verification of the basic ball/circle estimates.

    Checks |B(o,r)| <= r * l(S(o,r)) and 2*pi*r <= l(S(o,r)) on the supplied
    radii, and reports the minimal empirical constant C with
    l(S(o,r)) <= C * l(S(o,r/2)).
    """

    area_bound_ok: bool
    lower_bound_ok: bool
    C_emp: float
    witness: tuple | None = None


def geoest_check(spec: DensitySpec, r_grid) -> GeoEstimateReport:
    rs = np.asarray(r_grid, dtype=float)
    if np.any(rs <= 0.0) or np.any(rs >= spec.R):
        raise DomainError("geoest_check radii must lie in (0, R)")
    lens = np.array([circle_length(spec, r) for r in rs])
    areas = np.array([ball_area(spec, r) for r in rs])
    half = np.array([circle_length(spec, r / 2.0) for r in rs])

    area_ok = areas <= rs * lens * (1.0 + 1e-12)
    lower_ok = TWO_PI * rs <= lens * (1.0 + 1e-12)
    witness = None
    if not np.all(area_ok):
        witness = ("area_bound", float(rs[int(np.argmin(area_ok))]))
    elif not np.all(lower_ok):
        witness = ("lower_bound", float(rs[int(np.argmin(lower_ok))]))
    C_emp = float(np.max(lens / half))
    return GeoEstimateReport(bool(np.all(area_ok)), bool(np.all(lower_ok)), C_emp, witness)
