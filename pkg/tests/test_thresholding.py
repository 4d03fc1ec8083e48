"""Tests for the scalar thresholding operators against the 1-D oracle."""

import numpy as np
import pytest

from varexp_prox.space import ExponentMap
from varexp_prox.thresholding import (
    t_ista,
    t_primal,
    t_dual,
    prox_step_primal,
    prox_step_dual,
    prox_objective_ista,
    prox_objective_primal,
    prox_objective_dual,
    oracle_argmin_1d,
    oracle_t_primal,
    oracle_t_dual,
)


def random_tuples(rng, n, p_lo=1.05):
    """Random (x, s, t, p) tuples on the documented test box.

    Exponents stay >= p_lo: for p -> 1 the conjugate power 1/(p-1)
    blows up and the minimizers leave float64 range.
    """
    x = rng.uniform(-5.0, 5.0, size=n)
    s = rng.uniform(-2.0, 2.0, size=n)
    t = rng.uniform(0.0, 2.0, size=n)
    p = rng.uniform(p_lo, 2.0, size=n)
    return x, s, t, p


def primal_bracket(x, s, t, p):
    # |u* - x| <= (|s| + t)^{1/(p-1)} by coercivity of the objective
    reach = (np.abs(s) + t) ** (1.0 / (p - 1.0)) + 1.0
    return x - reach, x + reach


def dual_bracket(x, s, t, p):
    # |u*|^{p-1} <= |x|^{p-1} + |s| + t
    reach = (np.abs(x) ** (p - 1.0) + np.abs(s) + t) ** (1.0 / (p - 1.0)) + 1.0
    return -reach, reach


class TestOracle:

    def test_quadratic(self):
        assert oracle_argmin_1d(lambda u: (u - 3.0) ** 2, -10.0, 10.0) == \
            pytest.approx(3.0, abs=1e-9)

    def test_abs(self):
        assert oracle_argmin_1d(np.abs, -4.0, 5.0) == pytest.approx(0.0,
                                                                    abs=1e-9)

    def test_reproduces_soft_threshold(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            x, s, t = rng.uniform(-5, 5), rng.uniform(-2, 2), rng.uniform(0, 2)
            got = oracle_argmin_1d(
                lambda u: prox_objective_ista(u, x, s, t),
                x - 20.0 * (1 + abs(x) + abs(s) + t),
                x + 20.0 * (1 + abs(x) + abs(s) + t), tol=1e-10)
            assert abs(got - t_ista(x, s, t)) <= 1e-7

    def test_rejects_bad_bracket(self):
        with pytest.raises(ValueError):
            oracle_argmin_1d(np.abs, 1.0, 1.0)
        with pytest.raises(ValueError):
            oracle_argmin_1d(lambda u: np.log(u), -2.0, -1.0)


class TestIsta:

    def test_example(self):
        assert t_ista(1.0, 0.3, 0.4) == pytest.approx(0.3, abs=1e-15)

    def test_dead_zone(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            s, t = rng.uniform(-2, 2), rng.uniform(0, 2)
            x = s + rng.uniform(-1, 1) * t
            assert t_ista(x, s, t) == 0.0

    def test_zero_penalty_is_gradient_step(self):
        assert t_ista(1.25, 0.5, 0.0) == 0.75

    def test_rejects_negative_t(self):
        with pytest.raises(ValueError):
            t_ista(1.0, 0.0, -0.1)


class TestPrimalThreshold:

    def test_reduces_to_ista_at_p2(self):
        rng = np.random.default_rng(8)
        x, s, t, _ = random_tuples(rng, 10000)
        np.testing.assert_allclose(t_primal(x, s, t, 2.0), t_ista(x, s, t),
                                   rtol=0, atol=1e-12)

    def test_zero_is_stationary(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            t = rng.uniform(0, 2)
            s = rng.uniform(-1, 1) * t
            p = rng.uniform(1.05, 2)
            assert t_primal(0.0, s, t, p) == 0.0

    def test_frozen_point(self):
        # golden-section oracle value for (1.0, 0.3, 0.4, 1.3); the
        # oracle itself localizes smooth minima only to ~sqrt(eps)
        got = t_primal(1.0, 0.3, 0.4, 1.3)
        assert got == pytest.approx(0.6954489274022879, abs=1e-12)
        lo, hi = primal_bracket(1.0, 0.3, 0.4, 1.3)
        ref = oracle_argmin_1d(
            lambda u: prox_objective_primal(u, 1.0, 0.3, 0.4, 1.3),
            lo, hi, tol=1e-12)
        assert abs(got - ref) <= 1e-7

    def test_oracle_sweep(self):
        rng = np.random.default_rng(32)
        x, s, t, p = random_tuples(rng, 10000)
        ref = oracle_t_primal(x, s, t, p)
        got = t_primal(x, s, t, p)
        assert float(np.max(np.abs(got - ref))) <= 1e-6

    def test_pure_golden_section_on_moderate_reach(self):
        # value-only search certifies the closed form wherever the
        # sqrt(eps) flatness floor stays below the tolerance
        rng = np.random.default_rng(34)
        x, s, t, p = random_tuples(rng, 2000, p_lo=1.3)
        lo, hi = primal_bracket(x, s, t, p)
        ref = oracle_argmin_1d(
            lambda u: prox_objective_primal(u, x, s, t, p), lo, hi, tol=1e-9)
        got = t_primal(x, s, t, p)
        assert float(np.max(np.abs(got - ref))) <= 1e-6

    def test_dead_zone_exact(self):
        # strictly inside the otherwise region the output is literal 0
        rng = np.random.default_rng(64)
        n = 0
        while n < 200:
            x, s, t, p = (rng.uniform(-5, 5), rng.uniform(-2, 2),
                          rng.uniform(0.1, 2), rng.uniform(1.05, 2))
            expo = 1.0 / (p - 1.0)
            thr_up = np.sign(s + t) * abs(s + t) ** expo
            thr_dn = np.sign(s - t) * abs(s - t) ** expo
            if thr_dn < x < thr_up:
                assert t_primal(x, s, t, p) == 0.0
                n += 1

    def test_not_odd_around_gradient_shift(self):
        # for p < 2 the two branches shrink by different amounts
        s, t, p = 0.5, 0.3, 1.3
        d = 3.0
        up = t_primal(s + d, s, t, p)
        dn = t_primal(s - d, s, t, p)
        assert abs(up + dn) > 1e-3

    def test_monotone_in_x(self):
        rng = np.random.default_rng(128)
        xs = np.linspace(-8, 8, 400)
        for _ in range(20):
            s, t, p = rng.uniform(-2, 2), rng.uniform(0, 2), rng.uniform(
                1.05, 2)
            out = t_primal(xs, s, t, p)
            assert np.all(np.diff(out) >= -1e-12)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            t_primal(1.0, 0.0, -0.1, 1.5)
        with pytest.raises(ValueError):
            t_primal(1.0, 0.0, 0.1, 1.0)
        with pytest.raises(ValueError):
            t_primal(1.0, 0.0, 0.1, 2.5)


class TestDualThreshold:

    def test_identity_without_terms(self):
        rng = np.random.default_rng(9)
        x = rng.uniform(-5, 5, size=200)
        p = rng.uniform(1.05, 2, size=200)
        np.testing.assert_allclose(t_dual(x, 0.0, 0.0, p), x,
                                   rtol=1e-12, atol=1e-12)

    def test_reduces_to_ista_at_p2(self):
        rng = np.random.default_rng(18)
        x, s, t, _ = random_tuples(rng, 10000)
        np.testing.assert_allclose(t_dual(x, s, t, 2.0), t_ista(x, s, t),
                                   rtol=0, atol=1e-12)

    def test_frozen_point(self):
        got = t_dual(1.0, 0.3, 0.4, 1.3)
        assert got == pytest.approx(0.01807468965221857, abs=1e-12)
        lo, hi = dual_bracket(1.0, 0.3, 0.4, 1.3)
        ref = oracle_argmin_1d(
            lambda u: prox_objective_dual(u, 1.0, 0.3, 0.4, 1.3),
            lo, hi, tol=1e-12)
        assert abs(got - ref) <= 1e-7

    def test_oracle_sweep(self):
        rng = np.random.default_rng(36)
        x, s, t, p = random_tuples(rng, 10000)
        ref = oracle_t_dual(x, s, t, p)
        got = t_dual(x, s, t, p)
        assert float(np.max(np.abs(got - ref))) <= 1e-6

    def test_dead_zone_exact(self):
        rng = np.random.default_rng(72)
        n = 0
        while n < 200:
            x, s, t, p = (rng.uniform(-5, 5), rng.uniform(-2, 2),
                          rng.uniform(0.1, 2), rng.uniform(1.05, 2))
            jx = np.sign(x) * abs(x) ** (p - 1.0)
            if s - t - jx < 0.0 < s + t - jx:
                assert t_dual(x, s, t, p) == 0.0
                n += 1

    def test_monotone_in_x(self):
        rng = np.random.default_rng(144)
        xs = np.linspace(-8, 8, 400)
        for _ in range(20):
            s, t, p = rng.uniform(-2, 2), rng.uniform(0, 2), rng.uniform(
                1.05, 2)
            out = t_dual(xs, s, t, p)
            assert np.all(np.diff(out) >= -1e-12)


class TestProxSteps:

    def test_matches_scalar_loop(self):
        # numpy dispatches different pow kernels for 0-d and contiguous
        # operands, so scalar and vector calls agree to round-off only
        rng = np.random.default_rng(21)
        n = 64
        x = rng.uniform(-5, 5, size=n)
        g = rng.uniform(-2, 2, size=n)
        p = ExponentMap(rng.uniform(1.05, 2.0, size=n))
        tau, lam = 0.5, 0.1
        vec = prox_step_primal(x, g, tau, lam, p)
        loop = np.array([t_primal(x[i], tau * g[i], tau * lam, p.values[i])
                         for i in range(n)])
        np.testing.assert_allclose(vec, loop, rtol=1e-12, atol=1e-12)
        vec = prox_step_dual(x, g, tau, lam, p)
        loop = np.array([t_dual(x[i], tau * g[i], tau * lam, p.values[i])
                         for i in range(n)])
        np.testing.assert_allclose(vec, loop, rtol=1e-12, atol=1e-12)

    def test_no_forcing_terms_identity(self):
        rng = np.random.default_rng(27)
        x = rng.uniform(-5, 5, size=32)
        p = ExponentMap(rng.uniform(1.05, 2.0, size=32))
        np.testing.assert_array_equal(
            prox_step_primal(x, np.zeros(32), 1.0, 0.0, p), x)
        np.testing.assert_allclose(
            prox_step_dual(x, np.zeros(32), 1.0, 0.0, p), x,
            rtol=1e-12, atol=1e-13)

    def test_constant_two_is_ista_step(self):
        rng = np.random.default_rng(33)
        x = rng.uniform(-5, 5, size=32)
        g = rng.uniform(-2, 2, size=32)
        p = ExponentMap.constant(2.0, x.shape)
        tau, lam = 0.3, 0.05
        ref = t_ista(x, tau * g, tau * lam)
        np.testing.assert_allclose(prox_step_primal(x, g, tau, lam, p), ref,
                                   rtol=0, atol=1e-12)
        np.testing.assert_allclose(prox_step_dual(x, g, tau, lam, p), ref,
                                   rtol=0, atol=1e-12)
        # with the rescaled variant the p = 2 step halves (s, t)
        np.testing.assert_allclose(
            prox_step_dual(x, g, tau, lam, p, scale_by_p=True),
            t_ista(x, tau * g / 2.0, tau * lam / 2.0), rtol=0, atol=1e-12)

    def test_scale_by_p_formula(self):
        rng = np.random.default_rng(39)
        x = rng.uniform(-5, 5, size=32)
        g = rng.uniform(-2, 2, size=32)
        p = ExponentMap(rng.uniform(1.05, 2.0, size=32))
        tau, lam = 0.5, 0.1
        got = prox_step_dual(x, g, tau, lam, p, scale_by_p=True)
        ref = t_dual(x, tau * g / p.values, tau * lam / p.values, p.values)
        np.testing.assert_array_equal(got, ref)

    def test_scaled_variant_solves_unnormalized_subproblem(self):
        # stationarity of  rho-term + <grad rho(x), .> shifted problem:
        # p_i |u|^{p-1} sgn(u) - p_i j_p(x_i) + s + t sgn(u) = 0
        rng = np.random.default_rng(45)
        x = rng.uniform(-5, 5, size=200)
        g = rng.uniform(-2, 2, size=200)
        p = ExponentMap(rng.uniform(1.2, 2.0, size=200))
        tau, lam = 0.5, 0.1
        u = prox_step_dual(x, g, tau, lam, p, scale_by_p=True)
        pv = p.values
        active = np.abs(u) > 1e-12
        resid = (pv * np.sign(u) * np.abs(u) ** (pv - 1.0)
                 - pv * np.sign(x) * np.abs(x) ** (pv - 1.0)
                 + tau * g + tau * lam * np.sign(u))
        assert float(np.max(np.abs(resid[active]))) <= 1e-9

    def test_shape_and_step_validation(self):
        p = ExponentMap([1.5, 2.0])
        with pytest.raises(ValueError):
            prox_step_primal(np.zeros(3), np.zeros(3), 0.5, 0.1, p)
        with pytest.raises(ValueError):
            prox_step_dual(np.zeros(2), np.zeros(2), 0.0, 0.1, p)
