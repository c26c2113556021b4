import math

import numpy as np
import pytest

from minkdeficit import geometry as gm
from minkdeficit import legendre as lg

# Mean curvature of the graph of eps * v_ell at selected points, derived
# independently from the parametric surface-of-revolution second fundamental
# form (exact symbolic computation, 30 digits, frozen here).
PARAMETRIC_H_ORACLE = [
    # (profile, t, H)
    ("v2", 0.8775825618903728, 2.354891382054261),
    ("v2", 0.3153223623952687, 1.691358198866136),
    ("v2", -0.6281736227227391, 2.0706286907370752),
    ("v3", 0.8775825618903728, 1.4052898994566367),
    ("v3", 0.3153223623952687, 2.5119667312401015),
    ("v3", -0.6281736227227391, 1.494030706638015),
]
ORACLE_PROFILES = {
    "v2": lg.LegendreProfile([(2, 0.2)], label="0.2*v2"),
    "v3": lg.LegendreProfile([(3, 0.15)], label="0.15*v3"),
}


class TestShapeFactor:
    def test_round_sphere(self):
        assert gm.shape_factor(lg.ConstantProfile(0.0), 0.3) == pytest.approx(1.0, abs=1e-15)

    def test_constant_profile(self):
        assert gm.shape_factor(lg.ConstantProfile(0.4), -0.2) == pytest.approx(1.4, abs=1e-15)

    def test_defining_formula(self):
        eps = 0.05
        prof = lg.LegendreProfile([(2, eps)])
        p2 = lg.legendre_eval(2, 0.0)
        expected = math.sqrt((1 + eps * p2.value) ** 2 + eps**2 * p2.d1**2)
        assert gm.shape_factor(prof, 0.0) == pytest.approx(expected, abs=1e-15)

    def test_graph_condition_violation(self):
        with pytest.raises(gm.GraphConditionError):
            gm.shape_factor(lg.ConstantProfile(-1.0), 0.0)


class TestFundamentalForms:
    def test_unit_sphere_umbilic(self):
        g, ginv, h = gm.fundamental_forms(lg.ConstantProfile(0.0), 0.4)
        assert np.allclose(g, h, atol=1e-15)
        kt, kp = gm.principal_curvatures(lg.ConstantProfile(0.0), 0.4)
        assert kt == pytest.approx(1.0, abs=1e-15)
        assert kp == pytest.approx(1.0, abs=1e-15)

    def test_round_sphere_radius(self):
        c = 0.7
        prof = lg.ConstantProfile(c)
        g, _, h = gm.fundamental_forms(prof, 0.1)
        assert np.allclose(h, g / (1 + c), atol=1e-14)
        kt, kp = gm.principal_curvatures(prof, 0.1)
        assert kt == pytest.approx(1 / (1 + c), abs=1e-14)
        assert kp == pytest.approx(1 / (1 + c), abs=1e-14)

    def test_metric_inverse(self):
        prof = lg.LegendreProfile([(4, 0.05)])
        ts = np.linspace(-0.9, 0.9, 13)
        g, ginv, _ = gm.fundamental_forms(prof, ts)
        eye = np.einsum("...ij,...jk->...ik", g, ginv)
        assert np.max(np.abs(eye - np.eye(2))) <= 1e-12

    def test_area_element_identity(self):
        prof = lg.LegendreProfile([(4, 0.05)])
        ts = np.linspace(-0.95, 0.95, 21)
        g, _, _ = gm.fundamental_forms(prof, ts)
        det = g[..., 0, 0] * g[..., 1, 1]
        u = prof.evaluate(ts)[0]
        f = gm.shape_factor(prof, ts)
        assert np.max(np.abs(det - ((1 + u) * f) ** 2)) <= 1e-12

    def test_pole_rejected(self):
        with pytest.raises(ValueError, match="poles"):
            gm.fundamental_forms(lg.ConstantProfile(0.0), 1.0)

    def test_principal_curvatures_match_at_pole(self):
        # the axis is umbilic for any smooth axisymmetric profile
        prof = lg.LegendreProfile([(2, 0.1), (4, 0.02)])
        for t in (-1.0, 1.0):
            kt, kp = gm.principal_curvatures(prof, t)
            assert kt == pytest.approx(kp, rel=1e-12)


class TestMeanCurvature:
    def test_unit_sphere(self):
        assert gm.mean_curvature(lg.ConstantProfile(0.0), 0.2) == pytest.approx(2.0, abs=1e-15)

    def test_round_sphere(self):
        for c in (-0.5, 0.3, 2.0):
            got = gm.mean_curvature(lg.ConstantProfile(c), -0.6)
            assert got == pytest.approx(2 / (1 + c), rel=1e-15)

    def test_parametric_oracle(self):
        for name, t, expected in PARAMETRIC_H_ORACLE:
            got = gm.mean_curvature(ORACLE_PROFILES[name], t)
            assert got == pytest.approx(expected, rel=1e-14)

    def test_double_path_agreement(self):
        rng = np.random.default_rng(17)
        prof = lg.LegendreProfile([(3, 0.08)])
        ts = rng.uniform(-0.99, 0.99, 40)
        closed = gm.mean_curvature(prof, ts)
        traced = gm.mean_curvature_from_forms(prof, ts)
        assert np.max(np.abs(closed - traced)) <= 1e-10


class TestSurfaceReport:
    def test_unit_sphere(self):
        rep = gm.surface_report(lg.ConstantProfile(0.0), label="S")
        assert rep.area == pytest.approx(4 * math.pi, abs=1e-12)
        assert rep.total_H == pytest.approx(8 * math.pi, abs=1e-12)
        assert abs(rep.deficit) <= 1e-12
        assert rep.traceless_energy <= 1e-12
        assert rep.label == "S"

    @pytest.mark.parametrize("c", [-0.5, 0.3, 2.0])
    def test_round_spheres_have_zero_deficit(self, c):
        rep = gm.surface_report(lg.ConstantProfile(c))
        assert abs(rep.deficit) <= 1e-12
        assert rep.traceless_energy <= 1e-12

    def test_deficit_definition(self):
        rep = gm.surface_report(lg.LegendreProfile([(3, 0.1)]))
        assert rep.deficit == rep.total_H - math.sqrt(16 * math.pi * rep.area)

    def test_schur_residual_small_profile(self):
        rep = gm.surface_report(lg.LegendreProfile([(5, 0.01)]))
        assert abs(rep.schur_residual) <= 1e-8 * rep.schur_lhs

    def test_dilation_covariance(self):
        base = lg.LegendreProfile([(3, 0.1), (5, 0.05)])
        rep0 = gm.surface_report(base)
        for lam in (0.5, 2.0, 10.0):
            rep = gm.surface_report(gm.dilate(base, lam))
            assert rep.area == pytest.approx(lam**2 * rep0.area, rel=1e-10)
            assert rep.total_H == pytest.approx(lam * rep0.total_H, rel=1e-10)
            assert rep.deficit == pytest.approx(lam * rep0.deficit, rel=1e-10)

    def test_dilate_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gm.dilate(lg.ConstantProfile(0.0), 0.0)

    def test_csv_row_order(self):
        rep = gm.surface_report(lg.ConstantProfile(0.0), label="sphere")
        assert gm.SurfaceReport.CSV_COLUMNS == (
            "label", "area", "total_H", "deficit",
            "traceless_energy", "schur_lhs", "schur_residual")
        row = rep.csv_row()
        assert row[0] == "sphere"
        assert float(row[1]) == rep.area
        assert rep.to_dict()["deficit"] == rep.deficit

    def test_graph_condition_on_dense_grid(self):
        # a dent reaching below the floor must be rejected even if quadrature
        # nodes miss it
        def dent(arr):
            u = -1.5 * np.exp(-((arr - 0.37) / 1e-4) ** 2)
            return u, np.zeros_like(arr), np.zeros_like(arr)

        with pytest.raises(gm.GraphConditionError):
            gm.ensure_graph_condition(lg.CallableProfile(dent, band_limit=8))


class TestGaussBonnet:
    def test_sphere(self):
        assert gm.gauss_bonnet_integral(lg.ConstantProfile(0.5)) == pytest.approx(1.0, abs=1e-12)

    def test_random_band_limited(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            prof = lg.random_band_limited(rng, max_degree=10, amplitude=0.05)
            assert gm.gauss_bonnet_integral(prof) == pytest.approx(1.0, abs=1e-8)


class TestTaylorPieces:
    def test_zero_profile(self):
        pieces = gm.taylor_pieces(lg.LegendreProfile([]))
        assert abs(pieces.area_defect) <= 1e-12
        assert abs(pieces.meanH_defect) <= 1e-12
        assert pieces.cubic_hessian_term == 0.0

    def test_area_defect_quadratic(self):
        ratios = []
        for eps in (1e-2, 1e-3, 1e-4):
            pieces = gm.taylor_pieces(lg.LegendreProfile([(6, eps)]))
            ratios.append(pieces.area_defect / eps**2)
        assert max(ratios) / min(ratios) == pytest.approx(1.0, abs=1e-2)

    def test_meanh_defect_slope_two(self):
        eps = np.array([1e-2, 1e-3, 1e-4])
        vals = [abs(gm.taylor_pieces(lg.LegendreProfile([(6, e)])).meanH_defect) for e in eps]
        slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
        assert abs(slope - 2.0) <= 0.1

    def test_cubic_term_matches_operator(self):
        prof = lg.LegendreProfile([(4, 0.02), (7, -0.01)])
        rule = gm.default_rule(prof)
        pieces = gm.taylor_pieces(prof, rule)
        direct = lg.sphere_integrate(lg.hessian_cubic(prof, rule.nodes), rule)
        assert pieces.cubic_hessian_term == pytest.approx(direct, rel=1e-12)

    def test_zero_mean_enforced(self):
        with pytest.raises(gm.ZeroMeanError):
            gm.taylor_pieces(lg.LegendreProfile([(0, 0.01), (6, 0.01)]))

    def test_tiny_mean_subtracted(self):
        pieces = gm.taylor_pieces(lg.LegendreProfile([(0, 1e-9), (6, 0.01)]))
        clean = gm.taylor_pieces(lg.LegendreProfile([(6, 0.01)]))
        assert pieces.area_defect == pytest.approx(clean.area_defect, rel=1e-6)


class TestSchurIdentity:
    def test_random_profiles(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            prof = lg.random_band_limited(rng, max_degree=int(rng.integers(3, 13)),
                                          amplitude=float(rng.uniform(0.01, 0.05)))
            rep = gm.surface_report(prof)
            rhs = (2 * rep.traceless_energy
                   - math.sqrt(64 * math.pi) * rep.deficit / math.sqrt(rep.area)
                   - rep.deficit**2 / rep.area)
            assert rep.schur_lhs == pytest.approx(rhs, rel=1e-8)
            assert rep.schur_residual == pytest.approx(rep.schur_lhs - rhs, abs=1e-300)
