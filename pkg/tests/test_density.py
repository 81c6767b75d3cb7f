"""Tests for warping densities: closed forms, admissibility, rescaling."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from warpdisk import density
from warpdisk.density import (
    LOG_E0_RMAX,
    LOGLOG_E1_RMAX,
    DensitySpec,
    ball_area,
    check_admissibility,
    circle_length,
    cone_angle,
    eval_density,
    geoest_check,
    rescale,
)
from warpdisk.errors import DomainError

E = math.e
TWO_PI = 2.0 * math.pi


def sqrt_table(n=220):
    r = np.concatenate([[0.0], np.geomspace(1e-10, 1.0, n)])
    return DensitySpec.from_table(r, np.sqrt(r))


def half_table():
    r = np.linspace(0.0, 1.0, 64)
    return DensitySpec.from_table(r, r / 2.0)


class TestEval:
    def test_flat_identity(self):
        assert eval_density(DensitySpec.flat(), 0.5) == 0.5

    def test_log_e0_at_inv_e(self):
        # log(e) = 1, so f(1/e) = 1/e
        assert eval_density(DensitySpec.log_e0(), 1 / E) == pytest.approx(1 / E, rel=1e-14)

    def test_loglog_formula_at_inv_e(self):
        # r*log(1/r)*(1+log(1/r)) at r=1/e; the named kind caps R at its
        # admissibility domain, so use the coefficient form of the same formula
        spec = DensitySpec.log_poly(0.0, 1.0, 1.0, R=0.5)
        assert eval_density(spec, 1 / E) == pytest.approx(2 / E, rel=1e-14)
        inside = DensitySpec.loglog_e1()
        r = 0.5 * inside.R
        L = math.log(1 / r)
        assert eval_density(inside, r) == pytest.approx(r * L * (1 + L), rel=1e-14)

    def test_zero_everywhere(self):
        for spec in (
            DensitySpec.flat(),
            DensitySpec.cone(3 * math.pi),
            DensitySpec.log_e0(),
            DensitySpec.loglog_e1(),
            sqrt_table(),
        ):
            assert eval_density(spec, 0.0) == 0.0

    def test_domain_error(self):
        with pytest.raises(DomainError):
            eval_density(DensitySpec.flat(), 1.5)
        with pytest.raises(DomainError):
            eval_density(DensitySpec.flat(), -0.1)

    def test_loglog_domain_cap(self):
        with pytest.raises(DomainError):
            DensitySpec("loglog-e1", 0.25)  # > exp(-(1+sqrt5)/2)
        DensitySpec.loglog_e1()  # boundary radius is fine


class TestMeasures:
    def test_circle_length_flat(self):
        assert circle_length(DensitySpec.flat(), 1.0) == pytest.approx(TWO_PI)

    def test_circle_length_cone(self):
        beta = 3 * math.pi
        for r in (0.2, 0.7, 1.0):
            assert circle_length(DensitySpec.cone(beta), r) == pytest.approx(beta * r)

    def test_circle_length_log_e0(self):
        assert circle_length(DensitySpec.log_e0(), 1 / E) == pytest.approx(TWO_PI / E)

    def test_ball_area_flat(self):
        assert ball_area(DensitySpec.flat(), 1.0) == pytest.approx(math.pi)

    def test_ball_area_cone(self):
        beta = 3 * math.pi
        assert ball_area(DensitySpec.cone(beta), 1.0) == pytest.approx(beta / 2.0)

    def test_ball_area_log_e0_antiderivative(self):
        # antiderivative of s*log(1/s) is s^2/4 - (s^2/2) log s
        got = ball_area(DensitySpec.log_e0(), 1 / E)
        assert got == pytest.approx(1.5 * math.pi * math.exp(-2.0), rel=1e-12)

    @pytest.mark.parametrize(
        "spec",
        [
            DensitySpec.log_e0(),
            DensitySpec.loglog_e1(),
            DensitySpec.log_poly(2.0, 1.5, 0.25),
        ],
    )
    def test_ball_area_against_quadrature(self, spec):
        # independent oracle: adaptive quadrature of the density itself
        for frac in (0.3, 0.9, 1.0):
            r = frac * spec.R
            oracle, _ = quad(lambda s: eval_density(spec, s), 0.0, r, limit=250)
            assert ball_area(spec, r) == pytest.approx(TWO_PI * oracle, rel=1e-8)

    def test_sqrt_table_against_calculus(self):
        # the interpolant tracks sqrt(r), whose integral is (2/3) r^(3/2);
        # adaptive quadrature cannot be trusted across 220 interpolation kinks
        spec = sqrt_table()
        for r in (0.3, 0.9, 1.0):
            want = TWO_PI * (2.0 / 3.0) * r**1.5
            assert ball_area(spec, r) == pytest.approx(want, rel=1e-3)

    def test_table_integral_exact_on_coarse_table(self):
        spec = DensitySpec.from_table([0.0, 1.0, 2.0], [0.0, 2.0, 2.0])
        assert ball_area(spec, 0.5) == pytest.approx(TWO_PI * 0.25)
        assert ball_area(spec, 1.5) == pytest.approx(TWO_PI * 2.0)
        assert ball_area(spec, 2.0) == pytest.approx(TWO_PI * 3.0)

    def test_radial_measure_relative_accuracy(self):
        # closed forms agree with quadrature to <= 1e-8 relative (flat, cone, log-e0)
        for spec in (DensitySpec.flat(), DensitySpec.cone(2 * TWO_PI), DensitySpec.log_e0()):
            r = 0.8 * spec.R
            oracle, _ = quad(lambda s: eval_density(spec, s), 0.0, r, limit=200)
            assert abs(ball_area(spec, r) - TWO_PI * oracle) <= 1e-8 * TWO_PI * oracle


class TestRescale:
    def test_flat_scale_invariant(self):
        fa = rescale(DensitySpec.flat(), 0.1)
        assert fa.kind == "flat"
        assert fa.R == 1.0

    def test_cone_scale_invariant(self):
        fa = rescale(DensitySpec.cone(3 * math.pi), 0.37)
        assert fa.kind == "cone" and fa.beta == pytest.approx(3 * math.pi)

    def test_log_e0_substitution(self):
        fa = rescale(DensitySpec.log_e0(), math.exp(-2.0))
        assert eval_density(fa, 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_rescale_pointwise_definition(self):
        rng = np.random.default_rng(5)
        rs = rng.uniform(0.0, 1.0, 30)
        for spec in (DensitySpec.log_e0(), DensitySpec.loglog_e1(), sqrt_table()):
            alpha = 0.07 * spec.R
            fa = rescale(spec, alpha)
            got = eval_density(fa, rs)
            want = eval_density(spec, alpha * rs) / alpha
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-15)

    def test_rescale_composition(self):
        # rescale(rescale(f,a), b) == rescale(f, a*b) pointwise
        spec = DensitySpec.loglog_e1()
        a, b = 0.3 * spec.R, 0.2
        lhs = rescale(rescale(spec, a), b)
        rhs = rescale(spec, a * b)
        rs = np.linspace(0.0, 1.0, 50)
        np.testing.assert_allclose(
            eval_density(lhs, rs), eval_density(rhs, rs), rtol=1e-12, atol=1e-15
        )

    def test_rescale_domain(self):
        with pytest.raises(DomainError):
            rescale(DensitySpec.flat(), 1.0)


class TestConeAngle:
    def test_flat(self):
        for a in (0.1, 0.5, 0.9):
            assert cone_angle(DensitySpec.flat(), a) == pytest.approx(TWO_PI)

    def test_log_e0_values(self):
        spec = DensitySpec.log_e0()
        assert cone_angle(spec, math.exp(-2.0)) == pytest.approx(4 * math.pi)
        assert cone_angle(spec, math.exp(-1.0)) == pytest.approx(TWO_PI)

    def test_nonincreasing_in_alpha(self):
        for spec in (DensitySpec.log_e0(), DensitySpec.loglog_e1()):
            alphas = np.geomspace(1e-6, 0.99 * spec.R, 40)
            betas = [cone_angle(spec, a) for a in alphas]
            assert all(b1 >= b2 - 1e-12 for b1, b2 in zip(betas, betas[1:]))

    def test_at_least_two_pi_for_admissible(self):
        for spec in (DensitySpec.log_e0(), DensitySpec.loglog_e1(), DensitySpec.cone(7.0)):
            for a in np.geomspace(1e-5, 0.9 * spec.R, 12):
                assert cone_angle(spec, a) >= TWO_PI - 1e-12


class TestAdmissibility:
    def test_log_e0_passes(self):
        rep = check_admissibility(DensitySpec.log_e0())
        assert rep.passed, rep.to_dict()

    def test_loglog_e1_passes(self):
        rep = check_admissibility(DensitySpec.loglog_e1())
        assert rep.passed, rep.to_dict()

    def test_flat_and_fat_cones_pass(self):
        assert check_admissibility(DensitySpec.flat()).passed
        assert check_admissibility(DensitySpec.cone(TWO_PI)).passed
        assert check_admissibility(DensitySpec.cone(9.0)).passed

    def test_half_density_fails_b_with_witness(self):
        rep = check_admissibility(half_table())
        assert not rep.cond_b.passed
        r, fr = rep.cond_b.witness
        assert r > 0.0 and fr < r  # witness reproduces the violation

    def test_sqrt_density_fails_c_with_witness(self):
        rep = check_admissibility(sqrt_table())
        assert rep.cond_a.passed and rep.cond_b.passed
        assert not rep.cond_c.passed
        alpha, r, ratio = rep.cond_c.witness
        # measured ratio approaches r^(-1/2)
        assert ratio == pytest.approx(r ** -0.5, rel=0.05)

    def test_defect_sequences_recorded(self):
        rep = check_admissibility(DensitySpec.log_e0())
        defects = rep.cond_c.detail["defects"][0.1]
        # defect = log(1/k)/log(1/alpha) for this density: 1/8 at alpha=1e-8
        assert defects[-1] == pytest.approx(0.125, rel=1e-6)
        assert all(d2 < d1 for d1, d2 in zip(defects, defects[1:]))

    def test_decreasing_monotone_violator_fails(self):
        r = np.linspace(0.0, 1.0, 101)
        f = np.where(r < 0.5, 2.0 * r, np.maximum(2.0 * (1.0 - r), r))
        with pytest.raises(DomainError):
            # not strictly increasing as a table is rejected upfront
            DensitySpec.from_table(np.array([0.0, 0.5, 0.5, 1.0]), np.array([0, 1, 1, 2]))
        spec = DensitySpec.from_table(r, f)
        rep = check_admissibility(spec)
        assert not rep.cond_a.passed
        (r1, f1), (r2, f2) = rep.cond_a.witness
        assert r1 < r2 and f1 > f2


class TestGeoEstimates:
    def test_flat_empirical_constant(self):
        rep = geoest_check(DensitySpec.flat(), np.geomspace(1e-4, 0.9, 50))
        assert rep.area_bound_ok and rep.lower_bound_ok
        assert rep.C_emp == pytest.approx(2.0, rel=1e-12)

    def test_cone_empirical_constant(self):
        rep = geoest_check(DensitySpec.cone(3 * math.pi), np.geomspace(1e-4, 0.9, 50))
        assert rep.C_emp == pytest.approx(2.0, rel=1e-12)

    def test_log_e0_grid(self):
        spec = DensitySpec.log_e0()
        rep = geoest_check(spec, np.geomspace(1e-6, 0.99 * spec.R, 80))
        assert rep.area_bound_ok and rep.lower_bound_ok
        assert rep.C_emp < 2.0  # 2 L/(L + log 2) stays below 2

    def test_lemma_inequalities_hold_on_grid(self):
        # |B(o,r)| <= r * l(S(o,r)) and 2*pi*r <= l(S(o,r)) for admissible kinds
        for spec in (DensitySpec.log_e0(), DensitySpec.loglog_e1(), DensitySpec.cone(8.0)):
            rs = np.geomspace(1e-5, 0.95 * spec.R, 60)
            lens = TWO_PI * eval_density(spec, rs)
            areas = np.array([ball_area(spec, r) for r in rs])
            assert np.all(areas <= rs * lens * (1 + 1e-12))
            assert np.all(TWO_PI * rs <= lens * (1 + 1e-12))


class TestSerialization:
    @pytest.mark.parametrize(
        "spec",
        [
            DensitySpec.flat(0.7),
            DensitySpec.cone(8.5, 2.0),
            DensitySpec.log_e0(),
            DensitySpec.loglog_e1(),
            DensitySpec.log_poly(3.0, 1.0, 0.5),
            sqrt_table(40),
        ],
    )
    def test_roundtrip(self, spec):
        back = DensitySpec.from_json(spec.to_json())
        assert back.kind == spec.kind and back.R == spec.R
        rs = np.linspace(0.0, spec.R, 17)
        np.testing.assert_allclose(eval_density(back, rs), eval_density(spec, rs))
