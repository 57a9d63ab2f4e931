import cmath
import math

import numpy as np
import pytest

from core.errors import ConfigError, LandauPoleError, NoBoundStateError, PoleProximityError
from core.field_model import (
    ComplexEnergy,
    ModelConfig,
    RunningCoupling,
    ScaledCoordinate,
    bound_state_energy,
    c_d,
    flow_coupling,
    g0_1d,
    g0_asymptotic_1d,
    g0_energy_derivative,
    g2_weak_field,
    g3_quadrature,
    g3_weak_field,
    g_denominator,
    g_denominator_derivative,
    g_real_split,
    i2_quadrature,
    i2_saddle,
    krein_full_green,
    krein_remainder,
)
from core.pole_finder import solve_index


class TestModelConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dimension=4, field_strength=1.0, bound_energy=-1.0),
            dict(dimension=1, field_strength=-1.0, coupling=1.0),
            dict(dimension=1, field_strength=1.0, coupling=1.0, bound_energy=-1.0),
            dict(dimension=3, field_strength=1.0, coupling=1.0),
            dict(dimension=2, field_strength=1.0, bound_energy=0.5),
            dict(dimension=1, field_strength=1.0, lambda_r=1.0, mu=1.0),
            dict(dimension=3, field_strength=1.0, lambda_r=1.0),
            dict(dimension=1, field_strength=1.0),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            ModelConfig(**kwargs)

    def test_scaled_bound_energy(self):
        cfg = ModelConfig.from_eps_b(1, 8.0, -2.0)
        assert cfg.energy_b == pytest.approx(-8.0)
        assert cfg.eps_b == pytest.approx(-2.0)
        assert cfg.lam == pytest.approx(2.0 * math.sqrt(8.0))

    def test_zero_field_has_no_scale(self, zero_field_1d):
        with pytest.raises(ConfigError):
            zero_field_1d.field_scale

    def test_complex_energy_scaling(self):
        energy = ComplexEnergy(2.0 - 1.0j, scaled=True)
        assert energy.physical(8.0) == pytest.approx((2.0 - 1.0j) * 4.0)
        assert ComplexEnergy(8.0, scaled=False).eps(8.0) == pytest.approx(2.0)


class TestBoundStates:
    def test_one_dimension(self):
        assert bound_state_energy(ModelConfig.from_coupling(1.0, 2.0)) == pytest.approx(-1.0)

    def test_three_dimensions(self):
        cfg = ModelConfig.from_running(3, 1.0, 8.0 * math.pi, 1.0)
        assert bound_state_energy(cfg) == pytest.approx(-0.25)

    def test_three_dimensions_needs_strong_coupling(self):
        with pytest.raises(NoBoundStateError):
            bound_state_energy(ModelConfig.from_running(3, 1.0, math.pi, 1.0))

    def test_two_dimensions(self):
        cfg = ModelConfig.from_running(2, 1.0, 4.0 * math.pi, 2.0)
        assert bound_state_energy(cfg) == pytest.approx(-4.0 * math.exp(-1.0))


class TestFlow:
    def test_three_dimensional_example(self):
        flowed = flow_coupling(RunningCoupling(4.0 * math.pi, 1.0, 3), 2.0)
        assert flowed.lambda_r == pytest.approx(2.0 * math.pi, rel=1e-14)

    @pytest.mark.parametrize("dimension, lam, mu, mu_new", [(3, 20.0, 1.0, 3.5), (2, 1.5, 2.0, 0.7), (2, 3.0, 1.0, 40.0)])
    def test_bound_state_is_invariant(self, dimension, lam, mu, mu_new):
        rc = RunningCoupling(lam, mu, dimension)
        flowed = flow_coupling(rc, mu_new)
        assert flowed.bound_state_energy() == pytest.approx(rc.bound_state_energy(), rel=1e-12)

    @pytest.mark.parametrize("index", [0, 2])
    def test_three_dimensional_poles_are_invariant(self, index):
        rc = RunningCoupling(20.0, 1.0, 3)
        before = solve_index(rc.to_config(1.0), index)
        after = solve_index(flow_coupling(rc, 3.5).to_config(1.0), index)
        assert abs(after.eps - before.eps) <= 1e-8 * max(1.0, abs(before.eps))

    @pytest.mark.slow
    def test_two_dimensional_pole_is_invariant(self):
        rc = RunningCoupling(4.0 * math.pi / math.log(4.0), 4.0, 2)
        before = solve_index(rc.to_config(1.0), 0)
        after = solve_index(flow_coupling(rc, 8.0).to_config(1.0), 0)
        assert abs(after.eps - before.eps) <= 1e-8 * max(1.0, abs(before.eps))

    def test_landau_pole(self):
        with pytest.raises(LandauPoleError):
            flow_coupling(RunningCoupling(-4.0 * math.pi, 1.0, 3), 2.0)
        with pytest.raises(LandauPoleError):
            flow_coupling(RunningCoupling(-1.0, 1.0, 2), math.exp(3.0 * math.pi))


class TestFreeGreen:
    def test_symmetric(self):
        E, F = 1.5 - 0.3j, 0.7
        assert g0_1d(E, 0.4, -1.1, F) == pytest.approx(g0_1d(E, -1.1, 0.4, F), rel=1e-13)

    def test_scaled_coordinate_ordering(self):
        sc = ScaledCoordinate.from_points(1.0 + 0.5j, 2.0, -1.0, 1.0)
        assert sc.rho_minus == sc.rho_prime
        assert sc.rho_plus == sc.rho
        assert (sc.rho - sc.rho_prime).imag == pytest.approx(0.0, abs=1e-15)

    def test_weak_field_limit(self):
        assert g0_1d(-1.0, 0.0, 0.0, 1e-3) == pytest.approx(-0.5, rel=1e-6)

    def test_large_energy_asymptotic(self):
        E = 50.0 * cmath.exp(-0.8j * math.pi)
        exact = g0_1d(E, 0.3, -0.2, 1.0)
        assert abs(exact - g0_asymptotic_1d(E, 0.3, -0.2)) <= 0.05 * abs(exact)

    def test_array_input(self):
        values = g0_1d(0.5 - 0.5j, [-1.0, 0.0, 1.0], 0.0, 1.0)
        assert values.shape == (3,)

    def test_energy_derivative(self):
        E, F, h = 0.8 - 0.4j, 1.3, 1e-5
        numeric = (g0_1d(E + h, 0.0, 0.0, F) - g0_1d(E - h, 0.0, 0.0, F)) / (2 * h)
        assert abs(g0_energy_derivative(E, F) - numeric) <= 1e-7 * abs(numeric)

    def test_requires_field(self):
        with pytest.raises(ConfigError):
            g0_1d(-1.0, 0.0, 0.0, 0.0)


class TestKrein:
    def test_remainder_vanishes_across_origin(self):
        E, F = 2.0 - 0.5j, 1.0
        scale = abs(g0_1d(E, 0.0, 0.0, F) * g0_1d(E, 0.7, -0.4, F))
        assert abs(krein_remainder(E, 0.7, -0.4, F)) <= 1e-12 * scale

    def test_remainder_nonzero_same_side(self):
        assert abs(krein_remainder(2.0 - 0.5j, 0.7, 0.4, 1.0)) > 1e-6

    def test_full_green_symmetric(self, moderate_1d):
        E = 0.3 + 0.2j
        assert krein_full_green(E, 0.5, -0.8, moderate_1d) == pytest.approx(
            krein_full_green(E, -0.8, 0.5, moderate_1d), rel=1e-12
        )

    def test_vanishing_coupling_gives_free_green(self):
        cfg = ModelConfig.from_coupling(1.0, 1e-9)
        for E, x, xp in ((0.5 - 0.3j, 0.4, -0.3), (-2.0 + 0.1j, 1.2, 0.8), (3.0 + 0.0j, -0.6, 0.0)):
            free = g0_1d(E, x, xp, 1.0)
            assert abs(krein_full_green(E, x, xp, cfg) - free) <= 1e-6 * abs(free)

    def test_origin_row_identity(self, moderate_1d):
        rng = np.random.default_rng(7)
        for _ in range(20):
            E = complex(rng.uniform(-3.0, 3.0), rng.uniform(0.05, 2.0))
            xp = rng.uniform(-2.0, 2.0)
            g00 = g0_1d(E, 0.0, 0.0, 1.0)
            g = 1.0 / moderate_1d.lam + g00
            lhs = krein_full_green(E, 0.0, xp, moderate_1d) * g
            rhs = g0_1d(E, 0.0, xp, 1.0) * (g - g00)
            assert abs(lhs - rhs) <= 1e-10 * abs(rhs)

    def test_blows_up_at_bound_state(self):
        cfg = ModelConfig.from_coupling(1e-4, 2.0)
        E = -1.0 + 1e-9j
        full = krein_full_green(E, 0.1, 0.2, cfg)
        assert abs(full) > 1e3 * abs(g0_1d(E, 0.1, 0.2, 1e-4))

    def test_pole_proximity(self):
        cfg = ModelConfig.from_eps_b(1, 1.0, -3.0)
        res = solve_index(cfg, 0)
        with pytest.raises(PoleProximityError):
            krein_full_green(res.eps, 0.1, 0.2, cfg)

    def test_dimension_check(self):
        with pytest.raises(ConfigError):
            krein_full_green(1.0, 0.0, 0.0, ModelConfig.from_eps_b(3, 1.0, -1.0))


class TestDenominators:
    def test_dimension_constant(self):
        assert c_d(2) == pytest.approx(1.0)
        assert c_d(3) == pytest.approx(0.5)

    def test_one_dimension_matches_krein(self, moderate_1d):
        eps = 1.0 - 0.3j
        g = g_denominator(eps, moderate_1d)
        g00 = g0_1d(eps, 0.0, 0.0, 1.0)
        assert 1.0 / moderate_1d.lam + g00 == pytest.approx(-math.pi * g, rel=1e-12)

    @pytest.mark.parametrize("eps", [0.5 + 0.2j, -1.5 + 1.0j, 3.0 + 0.1j, 1.0 + 1.5j])
    def test_three_dimension_closed_form_vs_quadrature(self, eps):
        cfg = ModelConfig.from_eps_b(3, 1.0, -1.0)
        closed = g_denominator(eps, cfg)
        assert abs(g3_quadrature(eps, cfg) - closed) <= 1e-8 * max(1.0, abs(closed))

    def test_three_dimension_running_form_vs_quadrature(self):
        cfg = ModelConfig.from_running(3, 2.0, 30.0, 1.5)
        eps = 1.0 + 0.5j
        closed = g_denominator(eps, cfg)
        assert abs(g3_quadrature(eps, cfg) - closed) <= 1e-8 * max(1.0, abs(closed))

    def test_running_and_bound_forms_share_zeros(self):
        running = ModelConfig.from_running(3, 1.0, 20.0, 1.0)
        bound = ModelConfig.from_eps_b(3, 1.0, running.eps_b)
        eps = 0.7 - 0.2j
        ratio = g_denominator(eps, running) / g_denominator(eps, bound)
        assert ratio == pytest.approx(-0.25, rel=1e-12)

    def test_one_dimension_scale_covariance(self):
        eps_b = -2.0
        eps = 0.8 - 0.4j
        values = []
        for F in (0.5, 1.0, 4.0):
            lam = 2.0 * math.sqrt(-eps_b) * F ** (1.0 / 3.0)
            values.append(g_denominator(eps, ModelConfig.from_coupling(F, lam)))
        for value in values[1:]:
            assert value == pytest.approx(values[0], rel=1e-12)

    def test_one_dimension_weak_field_keeps_bound_state(self):
        cfg = ModelConfig.from_coupling(1e-4, 2.0)
        assert abs(g_denominator(cfg.eps_b, cfg)) <= 1e-6
        res = solve_index(cfg, 0)
        assert res.energy(1e-4).real == pytest.approx(-1.0, rel=1e-4)

    def test_three_dimension_weak_field_keeps_bound_state(self):
        cfg = ModelConfig.from_running(3, 1e-6, 20.0, 1.0)
        e_b = bound_state_energy(cfg)
        assert abs(g_denominator(ComplexEnergy(e_b, scaled=False), cfg)) <= 1e-6 / cfg.lambda_r
        res = solve_index(cfg, 0)
        assert res.energy(1e-6).real == pytest.approx(e_b, rel=1e-4)

    @pytest.mark.slow
    def test_two_dimension_weak_field_keeps_bound_state(self):
        cfg = ModelConfig.from_running(2, 3e-4, 4.0 * math.pi, 1.0)
        e_b = bound_state_energy(cfg)
        u, _ = g_real_split(cfg.eps_b, cfg)
        assert abs(u) <= 1e-4
        res = solve_index(cfg, 0)
        assert res.energy(3e-4).real == pytest.approx(e_b, rel=1e-4)

    def test_analytic_derivatives(self, moderate_1d):
        h = 1e-6
        for cfg in (moderate_1d, ModelConfig.from_eps_b(3, 1.0, -1.0)):
            eps = 1.2 - 0.4j
            numeric = (g_denominator(eps + h, cfg) - g_denominator(eps - h, cfg)) / (2 * h)
            assert abs(g_denominator_derivative(eps, cfg) - numeric) <= 1e-6 * abs(numeric)
        assert g_denominator_derivative(0.5, ModelConfig.from_eps_b(2, 1.0, -1.0)) is None

    def test_real_split(self, moderate_1d):
        u, v = g_real_split(1.0, moderate_1d)
        g = g_denominator(1.0, moderate_1d)
        assert u == pytest.approx(g.real, rel=1e-12)
        assert v == pytest.approx(g.imag, rel=1e-10)

    def test_real_split_resolves_tiny_imaginary_part(self, weak_1d):
        _, v = g_real_split(-10.0, weak_1d)
        assert 0.0 < v < 1e-15

    def test_two_dimension_weak_field(self):
        cfg = ModelConfig.from_eps_b(2, 1.0, -8.0)
        g = g_denominator(-9.0, cfg)
        _, im_part = g_real_split(-9.0, cfg)
        weak = g2_weak_field(-9.0, cfg)
        assert g.real == pytest.approx(weak.real, abs=1e-3)
        assert im_part == pytest.approx(weak.imag, rel=0.05)

    def test_two_dimension_cutoff_independent(self):
        cfg = ModelConfig.from_eps_b(2, 1.0, -2.0)
        eps = 1.0 - 0.3j
        assert g_denominator(eps, cfg, kappa_max=12.0) == pytest.approx(
            g_denominator(eps, cfg, kappa_max=20.0), abs=1e-8
        )

    def test_three_dimension_weak_field(self):
        cfg = ModelConfig.from_running(3, 1e-4, 20.0, 1.0)
        E = -0.2 + 0.05j
        exact = g_denominator(ComplexEnergy(E, scaled=False), cfg)
        assert exact == pytest.approx(g3_weak_field(E, cfg), abs=1e-4)


class TestSaddle:
    @pytest.mark.parametrize("E", [-4.0, -6.0, -9.0])
    def test_saddle_vs_quadrature(self, E):
        assert i2_saddle(E, 1.0) == pytest.approx(i2_quadrature(E, 1.0), rel=0.15)
