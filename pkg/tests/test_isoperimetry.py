"""Tests for candidate regions, the ratio optimizer and the diagnostics."""

import math

import numpy as np
import pytest

from warpdisk.density import DensitySpec, ball_area, circle_length, cone_angle, rescale
from warpdisk.errors import DomainError, ZeroRegionError
from warpdisk.geometry import SurfacePoint
from warpdisk.isoperimetry import (
    CSV_HEADER,
    EUCLIDEAN_ISO,
    IsoReport,
    OptimizerConfig,
    RadialProfile,
    annulus_diagnostics,
    geodesic_ball_candidate,
    maximize_ratio,
    near_origin_diagnostics,
    profile_measures,
    scan_alpha,
)

SMALL = OptimizerConfig(
    m=24, restarts=2, iters=300, ball_dirs=48,
    ball_centers=(0.0, 0.3, 0.5), ball_radii=8, seed=5,
)


class TestProfileMeasures:
    def test_cone_ball_exact(self):
        beta = 3 * math.pi
        spec = DensitySpec.cone(beta)
        for s in (0.3, 0.7, 1.0):
            area, length, ratio = profile_measures(spec, RadialProfile.constant(48, s))
            assert area == pytest.approx(beta * s * s / 2.0, rel=1e-12)
            assert length == pytest.approx(beta * s, rel=1e-12)
            assert ratio == pytest.approx(1.0 / (2.0 * beta), rel=1e-12)

    def test_flat_disk_ratio(self):
        _, _, ratio = profile_measures(DensitySpec.flat(), RadialProfile.constant(64, 1.0))
        assert ratio == pytest.approx(EUCLIDEAN_ISO, rel=1e-12)

    def test_rescaled_log_disk_cross_check(self):
        fa = rescale(DensitySpec.log_e0(), math.exp(-2.0))
        area, length, ratio = profile_measures(fa, RadialProfile.constant(64, 1.0))
        assert area == pytest.approx(ball_area(fa, 1.0), rel=1e-12)
        assert length == pytest.approx(circle_length(fa, 1.0), rel=1e-12)
        assert ratio == pytest.approx(ball_area(fa, 1.0) / circle_length(fa, 1.0) ** 2)

    def test_degenerate_profile_rejected(self):
        with pytest.raises(ZeroRegionError):
            profile_measures(DensitySpec.flat(), RadialProfile.constant(16, 0.0))

    def test_profile_invariants_enforced(self):
        with pytest.raises(DomainError):
            RadialProfile(8, np.linspace(0.0, 1.0, 9))  # increasing
        with pytest.raises(DomainError):
            RadialProfile(8, np.full(9, 1.5))  # out of range

    def test_full_grid_symmetry(self):
        prof = RadialProfile(8, np.linspace(1.0, 0.2, 9))
        full = prof.full()
        assert full.shape == (16,)
        # theta_j = -pi + j*pi/8; mirror symmetry around j = 8
        for k in range(1, 8):
            assert full[8 + k] == full[8 - k]

    def test_scale_invariance_of_ratio(self):
        # transporting a profile between f and its rescaling multiplies area
        # by alpha^2 and length by alpha, leaving the ratio unchanged
        spec = DensitySpec.log_e0()
        alpha = 0.05
        fa = rescale(spec, alpha)
        half = np.linspace(0.9, 0.3, 33)
        area_r, len_r, ratio_r = profile_measures(fa, RadialProfile(32, half))
        area_o, len_o, ratio_o = profile_measures(spec, RadialProfile(32, alpha * half))
        assert area_o == pytest.approx(alpha**2 * area_r, rel=1e-10)
        assert len_o == pytest.approx(alpha * len_r, rel=1e-10)
        assert ratio_o == pytest.approx(ratio_r, rel=1e-10)


class TestBallCandidates:
    def test_flat_off_center_near_euclidean(self):
        rep = geodesic_ball_candidate(DensitySpec.flat(), SurfacePoint(0.5, 0.0), 0.2)
        assert rep.ratio == pytest.approx(EUCLIDEAN_ISO, rel=2e-3)
        assert rep.ratio <= EUCLIDEAN_ISO + 1e-4
        assert not rep.clipped

    def test_flat_refinement(self):
        devs = []
        for n_dirs in (24, 48, 96):
            rep = geodesic_ball_candidate(
                DensitySpec.flat(), SurfacePoint(0.5, 0.0), 0.2, n_dirs=n_dirs
            )
            devs.append(abs(rep.ratio - EUCLIDEAN_ISO))
        assert devs[2] < devs[0]

    def test_cone_vertex_ball(self):
        beta = 3 * math.pi
        rep = geodesic_ball_candidate(DensitySpec.cone(beta), SurfacePoint.vertex(), 0.3)
        assert rep.ratio == pytest.approx(1.0 / (2.0 * beta), rel=1e-10)

    def test_log_ball_sits_above_euclidean(self):
        # positive curvature pushes small-ball ratios above 1/(4*pi)
        fa = rescale(DensitySpec.log_e0(), 1e-3)
        rep = geodesic_ball_candidate(fa, SurfacePoint(0.3, 0.0), 0.1, alpha=1e-3)
        assert EUCLIDEAN_ISO < rep.ratio < 1.2 * EUCLIDEAN_ISO

    def test_clipped_flag(self):
        rep = geodesic_ball_candidate(DensitySpec.flat(), SurfacePoint(0.6, 0.0), 0.55)
        assert rep.clipped

    def test_vertex_shadow_ball_valid(self):
        # ball reaching behind the vertex of a fat cone: area and length stay
        # consistent (ratio below the CAT(0) cap)
        rep = geodesic_ball_candidate(DensitySpec.cone(3 * math.pi), SurfacePoint(0.3, 0.0), 0.5)
        assert rep.area > 0 and rep.boundary_length > 0
        assert rep.ratio <= EUCLIDEAN_ISO + 1e-4


class TestMaximizeRatio:
    def test_flat_optimum_is_euclidean(self):
        rep = maximize_ratio(DensitySpec.flat(), 0.5, SMALL)
        assert abs(rep.ratio - EUCLIDEAN_ISO) <= 1e-4

    def test_cone_capped_by_cat0(self):
        rep = maximize_ratio(DensitySpec.cone(3 * math.pi), 0.5, SMALL)
        assert rep.ratio <= EUCLIDEAN_ISO + 1e-4

    def test_never_below_constant_profiles(self):
        spec = DensitySpec.log_e0()
        alpha = 1e-2
        rep = maximize_ratio(spec, alpha, SMALL)
        fa = rescale(spec, alpha)
        best_const = max(
            profile_measures(fa, RadialProfile.constant(SMALL.m, s))[2]
            for s in np.linspace(0.1, 1.0, 12)
        )
        assert rep.ratio >= best_const - 1e-12

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            maximize_ratio(DensitySpec.flat(), 1.5, SMALL)


class TestScanAlpha:
    def test_log_e0_scan(self):
        spec = DensitySpec.log_e0()
        rows = scan_alpha(spec, [1e-1, 1e-2], SMALL)
        assert rows[1].C_hat <= rows[0].C_hat + SMALL.mono_tol
        assert not rows[0].mono_flag
        for row in rows:
            assert row.beta == pytest.approx(cone_angle(spec, row.alpha))
            assert row.beta == pytest.approx(2 * math.pi * math.log(1 / row.alpha))
        c_ref = max(r.C_hat for r in rows)
        for row in rows:
            assert row.epsilon_hat == pytest.approx(c_ref / row.C_hat - 1.0)
        header_cols = CSV_HEADER.split(",")
        assert len(rows[0].to_csv_row().split(",")) == len(header_cols)

    def test_flat_scan_constant(self):
        rows = scan_alpha(DensitySpec.flat(), [0.5, 0.25], SMALL)
        for row in rows:
            assert abs(row.C_hat - EUCLIDEAN_ISO) <= 1e-4

    def test_increasing_alphas_rejected(self):
        with pytest.raises(DomainError):
            scan_alpha(DensitySpec.flat(), [0.1, 0.2], SMALL)

    def test_parallel_rows_match_serial(self):
        spec = DensitySpec.log_e0()
        serial = scan_alpha(spec, [1e-1, 1e-2], SMALL, jobs=1)
        parallel = scan_alpha(spec, [1e-1, 1e-2], SMALL, jobs=2)
        for a, b in zip(serial, parallel):
            assert a.to_csv_row() == b.to_csv_row()


class TestDiagnostics:
    def test_annulus_partition_is_exact(self):
        prof = RadialProfile(64, np.linspace(1.0, 0.0, 65))
        area = profile_measures(DensitySpec.flat(), prof)[0]
        diag = annulus_diagnostics(DensitySpec.flat(), prof)
        assert diag.total_area == pytest.approx(area, rel=1e-10)
        assert diag.C_emp == pytest.approx(2.0, rel=1e-12)
        assert diag.all_bounded

    def test_cone_step_profile_taus(self):
        idx = np.arange(65)
        half = np.where(idx <= 20, 1.0, np.where(idx <= 40, 0.5, 0.25))
        diag = annulus_diagnostics(DensitySpec.cone(3 * math.pi), RadialProfile(64, half))
        dth = math.pi / 64
        assert diag.records[0].tau == pytest.approx(20 * dth)
        assert diag.records[1].tau == pytest.approx(24 * dth)

    def test_optimizer_profile_bands_bounded(self):
        spec = DensitySpec.log_e0()
        rep = maximize_ratio(spec, 1e-2, SMALL)
        if rep.family == "profile":
            prof = RadialProfile(SMALL.m, np.asarray(rep.descriptor["half"]), 1e-2)
        else:
            prof = RadialProfile(SMALL.m, np.linspace(1.0, 0.0, SMALL.m + 1), 1e-2)
        diag = annulus_diagnostics(rescale(spec, 1e-2), prof)
        assert diag.all_bounded

    def test_near_origin_monotone(self):
        prof = RadialProfile(48, np.linspace(1.0, 0.0, 49))
        out = near_origin_diagnostics(DensitySpec.flat(), prof, [0.1, 0.2, 0.4, 0.8, 1.0])
        ls = [l for _, l, _ in out]
        bs = [b for _, _, b in out]
        assert all(l2 >= l1 - 1e-12 for l1, l2 in zip(ls, ls[1:]))
        assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(bs, bs[1:]))

    def test_near_origin_full_clip(self):
        prof = RadialProfile(48, np.linspace(1.0, 0.0, 49))
        area, length, _ = profile_measures(DensitySpec.flat(), prof)
        (_, l_full, b_full), = near_origin_diagnostics(DensitySpec.flat(), prof, [1.0])
        assert b_full == pytest.approx(area, rel=1e-12)
        assert l_full == pytest.approx(length, rel=1e-6)

    def test_near_origin_no_boundary_inside(self):
        # region containing B(o, nu) strictly: no boundary inside, sector area
        prof = RadialProfile(32, np.full(33, 0.8))
        spec = DensitySpec.flat()
        (_, l_nu, b_nu), = near_origin_diagnostics(spec, prof, [0.5])
        assert l_nu == 0.0
        assert b_nu == pytest.approx(ball_area(spec, 0.5), rel=1e-12)

    def test_near_origin_continuous_under_refinement(self):
        # the same wedge profile at two resolutions gives nearby masses
        spec = rescale(DensitySpec.log_e0(), 1e-2)
        coarse = RadialProfile(32, np.linspace(1.0, 0.0, 33))
        fine = RadialProfile(128, np.linspace(1.0, 0.0, 129))
        for nu in (0.1, 0.3, 0.6):
            (_, l_c, b_c), = near_origin_diagnostics(spec, coarse, [nu])
            (_, l_f, b_f), = near_origin_diagnostics(spec, fine, [nu])
            assert l_f == pytest.approx(l_c, rel=0.05)
            assert b_f == pytest.approx(b_c, rel=0.05)


class TestReport:
    def test_roundtrip_profile_json(self):
        prof = RadialProfile(16, np.linspace(0.9, 0.1, 17), alpha=0.01)
        back = RadialProfile.from_json(prof.to_json())
        assert back.m == 16 and back.alpha == 0.01
        np.testing.assert_allclose(back.half, prof.half)

    def test_isoreport_dict(self):
        rep = IsoReport(1.0, 2.0, 0.25, 0.1, "ball", {"radius": 0.2})
        d = rep.to_dict()
        assert d["ratio"] == 0.25 and d["family"] == "ball"
