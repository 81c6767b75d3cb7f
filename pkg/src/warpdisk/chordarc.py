"""Chord-arc testing of planar Jordan curves and brute-force lemma checks.

A closed curve is a (delta, lambda)-chord-arc curve if, whenever the two
boundary arcs between x and y have lengths delta*l2 <= l1 <= l2, the shorter
satisfies l1 <= lambda*d(x, y).  Failing that condition forces the
isoperimetric ratio below (4*pi)^-1 / (1 + eps) with the explicit

    K = 4/lambda + 2/lambda^2,   eps = (delta+1)^2 / (delta^2 + K*delta + 1) - 1,

valid for lambda > 1 + sqrt(2) (so that K < 2).  In the plane the filling
area of a Jordan curve is the enclosed area and the ambient constant is
(4*pi)^-1, which makes the contrapositive machine-checkable on generated
curve families.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LinearRing

from .errors import DomainError, InvalidCurveError

EUCLIDEAN_ISO = 1.0 / (4.0 * math.pi)


@dataclass
class PlanarJordanCurve:
    """Closed simple polyline, positively oriented, with arc-length table."""

    vertices: np.ndarray
    cumlen: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 8:
            raise InvalidCurveError("need at least 8 plane vertices")
        if np.allclose(v[0], v[-1]):
            v = v[:-1]
        if not LinearRing(v).is_simple:
            raise InvalidCurveError("polyline intersects itself")
        if _shoelace(v) < 0.0:
            v = v[::-1].copy()
        seg = np.linalg.norm(np.diff(np.vstack([v, v[:1]]), axis=0), axis=1)
        if np.any(seg == 0.0):
            raise InvalidCurveError("repeated consecutive vertices")
        self.vertices = v
        self.cumlen = np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self) -> float:
        return float(self.cumlen[-1])

    @property
    def area(self) -> float:
        return _shoelace(self.vertices)

    def transformed(self, scale=1.0, angle=0.0, shift=(0.0, 0.0)) -> "PlanarJordanCurve":
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return PlanarJordanCurve(scale * self.vertices @ rot.T + np.asarray(shift))

    def to_json(self) -> str:
        return json.dumps(self.vertices.tolist())

    @staticmethod
    def from_json(text: str) -> "PlanarJordanCurve":
        return PlanarJordanCurve(np.asarray(json.loads(text), dtype=float))


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass
class ChordArcReport:
    delta: float
    lam: float
    passed: bool
    witness: tuple | None = None  # (x, y, l1, l2, dist)

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            x, y, l1, l2, d = self.witness
            w = {"x": list(x), "y": list(y), "l1": l1, "l2": l2, "dist": d}
        return {"delta": self.delta, "lambda": self.lam, "passed": self.passed, "witness": w}


def epsilon_for(delta: float, lam: float) -> float:
    """Isoperimetric-defect threshold paired with a (delta, lambda) window."""
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    if lam <= 1.0 + math.sqrt(2.0):
        raise DomainError("lambda must exceed 1 + sqrt(2)")
    k_ca = 4.0 / lam + 2.0 / lam**2
    return (delta + 1.0) ** 2 / (delta**2 + k_ca * delta + 1.0) - 1.0


def check_chord_arc(curve: PlanarJordanCurve, delta: float, lam: float) -> ChordArcReport:
    """Exact O(n^2) scan of all vertex pairs.

    Splits the total length into the two arc lengths l1 <= l2 at every pair
    and, whenever delta*l2 <= l1, requires l1 <= lam*|x - y|.  The first
    violation (row-major) is returned as the witness.
    """
    if not 0.0 < delta < 1.0 or lam < 1.0:
        raise DomainError("need delta in (0,1) and lambda >= 1")
    v = curve.vertices
    cum = curve.cumlen[:-1]
    total = curve.length
    arc = np.abs(cum[:, None] - cum[None, :])
    l1 = np.minimum(arc, total - arc)
    l2 = total - l1
    dist = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)
    bad = (l1 >= delta * l2) & (l1 > lam * dist) & (l1 > 0.0)
    if not bad.any():
        return ChordArcReport(delta, lam, True)
    i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return ChordArcReport(
        delta, lam, False,
        witness=(tuple(v[i]), tuple(v[j]), float(l1[i, j]), float(l2[i, j]), float(dist[i, j])),
    )


def planar_iso_ratio(curve: PlanarJordanCurve) -> float:
    """Enclosed area over squared boundary length; at most 1/(4*pi) + O(n^-2)."""
    return curve.area / curve.length**2


# ---------------------------------------------------------------------------
# seeded curve families
# ---------------------------------------------------------------------------


def unit_circle(n: int = 512) -> PlanarJordanCurve:
    phi = 2.0 * math.pi * np.arange(n) / n
    return PlanarJordanCurve(np.column_stack([np.cos(phi), np.sin(phi)]))


def fourier_circle(rng: np.random.Generator, n: int = 256, modes: int = 6,
                   amp: float = 0.35) -> PlanarJordanCurve:
    """Random smooth perturbation of the unit circle (kept simple by retry)."""
    for _ in range(60):
        phi = 2.0 * math.pi * np.arange(n) / n
        r = np.ones(n)
        for k in range(2, modes + 2):
            a = amp * rng.uniform(0.0, 1.0) / k
            r += a * np.cos(k * phi + rng.uniform(0.0, 2 * math.pi))
        if np.min(r) < 0.05:
            continue
        try:
            return PlanarJordanCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))
        except InvalidCurveError:
            continue
    raise InvalidCurveError("fourier_circle: could not draw a simple curve")


def barbell(rng: np.random.Generator, neck: float | None = None, n_arc: int = 56,
            n_line: int = 18) -> PlanarJordanCurve:
    """Two disks joined by a thin neck; narrow necks violate chord-arc."""
    rho_r = rng.uniform(0.7, 1.3)
    rho_l = rng.uniform(0.7, 1.3)
    h = neck if neck is not None else float(
        np.exp(rng.uniform(math.log(0.005), math.log(0.25)))
    ) * min(rho_r, rho_l)
    d = rng.uniform(1.6, 2.8) * max(rho_r, rho_l)
    phi_r = math.asin(h / rho_r)
    phi_l = math.asin(h / rho_l)
    a_r = rho_r * math.cos(phi_r)
    a_l = rho_l * math.cos(phi_l)

    ang_r = np.linspace(phi_r - math.pi, math.pi - phi_r, n_arc)
    right = np.column_stack([d + rho_r * np.cos(ang_r), rho_r * np.sin(ang_r)])
    top = np.column_stack([
        np.linspace(d - a_r, -d + a_l, n_line + 2)[1:-1], np.full(n_line, h)
    ])
    ang_l = np.linspace(phi_l, 2 * math.pi - phi_l, n_arc)
    left = np.column_stack([-d + rho_l * np.cos(ang_l), rho_l * np.sin(ang_l)])
    bottom = np.column_stack([
        np.linspace(-d + a_l, d - a_r, n_line + 2)[1:-1], np.full(n_line, -h)
    ])
    return PlanarJordanCurve(np.vstack([right, top, left, bottom]))


def pinched_stadium(rng: np.random.Generator, n_side: int = 90,
                    n_cap: int = 40) -> PlanarJordanCurve:
    """Stadium whose waist is pinched to a narrow channel."""
    h0 = rng.uniform(0.3, 0.7)
    half_len = rng.uniform(2.0, 4.0)
    sigma = rng.uniform(0.3, half_len / 3.0)
    waist = float(np.exp(rng.uniform(math.log(0.01), math.log(0.5))))

    def half_width(x):
        return h0 * (1.0 - (1.0 - waist) * np.exp(-((x / sigma) ** 2)))

    xs = np.linspace(half_len, -half_len, n_side)
    top = np.column_stack([xs, half_width(xs)])
    cap_l = np.linspace(math.pi / 2, 3 * math.pi / 2, n_cap + 2)[1:-1]
    left = np.column_stack([-half_len + h0 * np.cos(cap_l), h0 * np.sin(cap_l)])
    bottom = np.column_stack([xs[::-1], -half_width(xs[::-1])])
    cap_r = np.linspace(-math.pi / 2, math.pi / 2, n_cap + 2)[1:-1]
    right = np.column_stack([half_len + h0 * np.cos(cap_r), h0 * np.sin(cap_r)])
    return PlanarJordanCurve(np.vstack([top, left, bottom, right]))


FAMILIES = {
    "fourier": fourier_circle,
    "barbell": barbell,
    "stadium": pinched_stadium,
}


@dataclass
class VerificationReport:
    """Contrapositive check over a generated family.

    Every curve failing the chord-arc scan must have planar ratio strictly
    below (4*pi)^-1/(1 + eps); ``violations`` lists serialized curves that
    broke this (they would falsify the implementation, not the lemma).
    """

    family: str
    delta: float
    lam: float
    epsilon: float
    checked: int = 0
    failures: int = 0
    tightest_margin: float | None = None
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "delta": self.delta,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "checked": self.checked,
            "failures": self.failures,
            "tightest_margin": self.tightest_margin,
            "violations": self.violations,
        }


def verify_lemma31(
    family,
    delta: float,
    lam: float,
    n_samples: int = 1000,
    seed: int = 0,
) -> VerificationReport:
    """Sample a curve family and check the chord-arc contrapositive.

    ``family`` is a name from FAMILIES or a callable(rng) -> curve.
    """
    if callable(family):
        gen, name = family, getattr(family, "__name__", "custom")
    else:
        try:
            gen, name = FAMILIES[family], family
        except KeyError:
            raise DomainError(f"unknown curve family {family!r}") from None
    eps = epsilon_for(delta, lam)
    threshold = EUCLIDEAN_ISO / (1.0 + eps)
    rng = np.random.default_rng(seed)
    report = VerificationReport(name, delta, lam, eps)
    for _ in range(n_samples):
        curve = gen(rng)
        report.checked += 1
        if check_chord_arc(curve, delta, lam).passed:
            continue
        report.failures += 1
        margin = threshold - planar_iso_ratio(curve)
        if report.tightest_margin is None or margin < report.tightest_margin:
            report.tightest_margin = margin
        if margin <= 0.0:
            report.violations.append(curve.to_json())
    return report
