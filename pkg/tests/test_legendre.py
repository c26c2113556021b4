import math
from fractions import Fraction

import numpy as np
import numpy.polynomial.legendre as npleg
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkdeficit import legendre as lg


def legendre_exact(ell: int, t: Fraction) -> Fraction:
    """Independent oracle: P_ell via the exact binomial sum, rational arithmetic."""
    total = Fraction(0)
    for k in range(ell + 1):
        total += Fraction(math.comb(ell, k)) ** 2 * (t - 1) ** (ell - k) * (t + 1) ** k
    return total / Fraction(2) ** ell


class TestLegendreEval:
    def test_degree_zero(self):
        for t in (-1.0, -0.3, 0.0, 0.7, 1.0):
            s = lg.legendre_eval(0, t)
            assert (s.value, s.d1, s.d2) == (1.0, 0.0, 0.0)

    def test_value_one_at_right_endpoint(self):
        assert lg.legendre_eval(5, 1.0).value == pytest.approx(1.0, abs=1e-14)

    def test_p2_closed_form(self):
        s = lg.legendre_eval(2, 0.5)
        assert s.value == pytest.approx(-0.125, abs=1e-15)
        assert s.d1 == pytest.approx(1.5, abs=1e-15)
        assert s.d2 == pytest.approx(3.0, abs=1e-15)

    def test_matches_exact_binomial_oracle(self):
        for ell in (1, 4, 7, 10, 13):
            for tq in (Fraction(3, 10), Fraction(-1, 4), Fraction(9, 10)):
                expected = float(legendre_exact(ell, tq))
                got = lg.legendre_eval(ell, float(tq)).value
                assert got == pytest.approx(expected, abs=1e-14)

    def test_generating_function_reconstruction(self):
        # sum_ell P_ell(s) tau^ell converges to (1 - 2 s tau + tau^2)^(-1/2)
        s, tau = 0.3, 0.4
        partial = math.fsum(lg.legendre_eval(ell, s).value * tau**ell for ell in range(121))
        assert partial == pytest.approx((1 - 2 * s * tau + tau**2) ** -0.5, abs=1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lg.legendre_eval(3, 1.5)
        with pytest.raises(ValueError):
            lg.legendre_eval(3, np.array([0.0, -1.0001]))
        with pytest.raises(ValueError):
            lg.legendre_eval(-1, 0.5)

    def test_array_evaluation(self):
        t = np.linspace(-1, 1, 11)
        s = lg.legendre_eval(6, t)
        for i, ti in enumerate(t):
            assert s.value[i] == lg.legendre_eval(6, float(ti)).value

    @settings(max_examples=60, deadline=None)
    @given(ell=st.integers(0, 64), t=st.floats(-1.0, 1.0))
    def test_ode_residual_property(self, ell, t):
        s = lg.legendre_eval(ell, t)
        residual = (1 - t * t) * s.d2 - 2 * t * s.d1 + ell * (ell + 1) * s.value
        assert abs(residual) <= 1e-8 * ell**2 + 1e-10

    @settings(max_examples=60, deadline=None)
    @given(ell=st.integers(0, 128), t=st.floats(-1.0, 1.0))
    def test_bounded_on_interval(self, ell, t):
        assert abs(lg.legendre_eval(ell, t).value) <= 1.0 + 1e-12


class TestVEval:
    def test_pole_value(self):
        assert lg.v_eval(3, -1.0) == pytest.approx(1.0, abs=1e-15)

    def test_degree_one(self):
        assert lg.v_eval(1, 0.25) == pytest.approx(-0.25, abs=1e-16)

    def test_reflection_definition(self):
        rng = np.random.default_rng(11)
        t = rng.uniform(-1, 1, 100)
        assert np.array_equal(lg.v_eval(4, t), lg.legendre_eval(4, -t).value)


class TestQuadrature:
    def test_weights_sum_to_two(self):
        for n in (1, 2, 7, 58, 301):
            rule = lg.gauss_legendre_rule(n)
            assert abs(math.fsum(rule.weights.tolist()) - 2.0) <= 1e-14
            assert rule.exact_degree == 2 * n - 1
            assert np.all(rule.nodes > -1.0) and np.all(rule.nodes < 1.0)
            assert np.all(rule.weights > 0)

    def test_monomial_exactness(self):
        rule = lg.gauss_legendre_rule(7)
        for d in range(rule.exact_degree + 1):
            exact = 2.0 / (d + 1) if d % 2 == 0 else 0.0
            got = math.fsum((rule.weights * rule.nodes**d).tolist())
            assert got == pytest.approx(exact, abs=1e-14)

    def test_against_numpy_leggauss(self):
        for n in (5, 33, 200):
            rule = lg.gauss_legendre_rule(n)
            x, w = npleg.leggauss(n)
            assert np.max(np.abs(rule.nodes - x)) <= 1e-13
            assert np.max(np.abs(rule.weights - w)) <= 1e-13

    def test_rule_for_products_headroom(self):
        rule = lg.rule_for_products(3, 40)
        assert rule.exact_degree >= 3 * 40

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            lg.gauss_legendre_rule(0)


class TestSphereIntegrate:
    def test_unit_integrand(self):
        rule = lg.gauss_legendre_rule(20)
        assert lg.sphere_integrate(lambda t: np.ones_like(t), rule) == pytest.approx(
            4 * math.pi, abs=1e-12)

    @pytest.mark.parametrize("ell", [3, 10, 48])
    def test_zonal_l2_norm(self, ell):
        rule = lg.rule_for_products(2, ell)
        val = lg.sphere_integrate(lambda t: lg.v_eval(ell, t) ** 2, rule)
        expected = 4 * math.pi / (2 * ell + 1)
        assert val == pytest.approx(expected, rel=1e-12)

    def test_odd_zonal_integrates_to_zero(self):
        rule = lg.gauss_legendre_rule(12)
        assert abs(lg.sphere_integrate(lambda t: lg.v_eval(3, t), rule)) <= 1e-12

    def test_budget_warning(self):
        rule = lg.gauss_legendre_rule(4)
        with pytest.warns(UserWarning, match="exceeds rule capacity"):
            lg.sphere_integrate(lambda t: t**10, rule, degree=10)


class TestAxisymOperators:
    def test_grad_sq_v1_at_equator(self):
        assert lg.axisym_grad_sq(lg.zonal_profile(1), 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_grad_sq_constant(self):
        prof = lg.ConstantProfile(2.5)
        assert np.all(lg.axisym_grad_sq(prof, np.linspace(-1, 1, 9)) == 0.0)

    @pytest.mark.parametrize("ell", [1, 6, 17])
    def test_grad_sq_integral(self, ell):
        rule = lg.rule_for_products(2, ell)
        val = lg.sphere_integrate(lg.axisym_grad_sq(lg.zonal_profile(ell), rule.nodes), rule)
        assert val == pytest.approx(4 * math.pi * ell * (ell + 1) / (2 * ell + 1), rel=1e-12)

    def test_eigenrelation_dense(self):
        grid = np.linspace(-1, 1, 2049)
        for ell in (1, 8, 31, 64):
            prof = lg.zonal_profile(ell)
            res = np.max(np.abs(lg.axisym_laplacian(prof, grid) + ell * (ell + 1) * prof(grid)))
            assert res <= 1e-8 * ell**2

    def test_laplacian_integrates_to_zero(self):
        prof = lg.random_band_limited(np.random.default_rng(5), max_degree=9, amplitude=1.0)
        rule = lg.rule_for_products(1, 9)
        assert abs(lg.sphere_integrate(lg.axisym_laplacian(prof, rule.nodes), rule)) <= 1e-13

    def test_hessian_cubic_constant(self):
        prof = lg.ConstantProfile(0.7)
        assert np.all(lg.hessian_cubic(prof, np.linspace(-0.9, 0.9, 7)) == 0.0)

    def test_hessian_cubic_finite_difference_oracle(self):
        # Hess u(grad u, grad u) = (1/2) (1-t^2) u_t * d/dt |grad u|^2
        prof = lg.zonal_profile(2)
        t, step = 0.5, 1e-5
        dG = (lg.axisym_grad_sq(prof, t + step) - lg.axisym_grad_sq(prof, t - step)) / (2 * step)
        _, ut, _ = prof.evaluate(np.array([t]))
        expected = 0.5 * (1 - t * t) * float(ut[0]) * dG
        assert lg.hessian_cubic(prof, t) == pytest.approx(expected, abs=1e-8)

    def test_integration_by_parts_identity(self):
        rng = np.random.default_rng(42)
        rule = lg.rule_for_products(3, 16)
        for _ in range(50):
            prof = lg.random_band_limited(rng, max_degree=int(rng.integers(2, 17)),
                                          amplitude=1.0)
            lhs = lg.sphere_integrate(lg.hessian_cubic(prof, rule.nodes), rule)
            rhs = -0.5 * lg.sphere_integrate(
                lg.axisym_grad_sq(prof, rule.nodes) * lg.axisym_laplacian(prof, rule.nodes),
                rule)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-13)


class TestProfiles:
    def test_legendre_profile_merges_terms(self):
        prof = lg.LegendreProfile([(3, 1.0), (3, 2.0), (5, -1.0)])
        assert prof.terms == ((3, 3.0), (5, -1.0))
        assert prof.coefficient(3) == 3.0
        assert prof.band_limit == 5

    def test_empty_profile_is_zero(self):
        prof = lg.LegendreProfile([])
        u, ut, utt = prof.evaluate(np.linspace(-1, 1, 5))
        assert not np.any(u) and not np.any(ut) and not np.any(utt)

    def test_profile_derivatives_match_finite_differences(self):
        prof = lg.LegendreProfile([(2, 0.3), (7, -0.1)])
        t, h = 0.2, 1e-6
        u_m, u_p = prof(t - h), prof(t + h)
        u, ut, utt = (x[0] for x in prof.evaluate(np.array([t])))
        assert ut == pytest.approx((u_p - u_m) / (2 * h), abs=1e-7)
        assert utt == pytest.approx((u_p - 2 * u + u_m) / h**2, abs=1e-4)

    def test_random_band_limited_deterministic(self):
        a = lg.random_band_limited(np.random.default_rng(9), 8, 0.05)
        b = lg.random_band_limited(np.random.default_rng(9), 8, 0.05)
        assert a.terms == b.terms

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            lg.LegendreProfile([(-2, 1.0)])


class TestSupNorms:
    def test_zonal_sup_is_one(self):
        for ell in (8, 64, 257):
            c0, _ = lg.sup_norms(lg.zonal_profile(ell))
            assert c0 == pytest.approx(1.0, abs=1e-9)

    def test_gradient_sup_scaling(self):
        for ell in (64, 256, 1024):
            _, c1 = lg.sup_norms(lg.zonal_profile(ell))
            assert c1 <= 1.1 * ell
            assert c1 >= 0.3 * ell
