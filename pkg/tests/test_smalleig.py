"""Slow drift eigenvalues and the outer correction field eta."""

import math

import numpy as np
import pytest

from spikelab.model import ModelParams
from spikelab.outer import smalla_roots
from spikelab.profile import moments, wc_deriv, wc_eval
from spikelab.smalleig import (
    eta_profile,
    eta_x_mean_closed_form,
    k_factor,
    small_lambda_linearized,
    small_lambda_roots,
    tau_h_threshold,
)


@pytest.fixture(scope="module")
def p_base():
    return ModelParams(a=0.01, b=1.0, c=1.0, delta1=1e-4, Dv=1.0, l=1.0)


class TestThreshold:
    @pytest.mark.parametrize("c", [0.3, 1.0, 2.5])
    def test_exact_and_quadrature_agree(self, c):
        exact, quad = tau_h_threshold(c)
        assert exact == 7.0 * c / 6.0
        assert quad == pytest.approx(exact, rel=1e-8)

    def test_threshold_depends_only_on_c(self, p_base):
        # tau_h is carried on every spectrum result and must ignore the
        # geometry and diffusivity parameters entirely.
        variants = [p_base, p_base.with_(Dv=3.0), p_base.with_(b=2.0),
                    p_base.with_(l=5.0), p_base.with_(delta1=1e-6)]
        for q in variants:
            assert small_lambda_roots(1.0, q).tau_h == pytest.approx(7.0 / 6.0)


class TestKFactor:
    def test_matches_direct_quadrature(self, p_base):
        y = np.linspace(-50.0, 50.0, 200001)
        J3 = np.trapezoid(wc_eval(y, 0.0) ** 3, y)
        arg = math.sqrt(p_base.b / p_base.Dv) * p_base.l
        oracle = (J3 / 3.0) * (p_base.b / p_base.Dv) / math.cosh(arg) ** 2
        assert k_factor(p_base) == pytest.approx(oracle, rel=1e-8)


class TestDriftRoots:
    def test_quadratic_residual(self, p_base, table):
        k = k_factor(p_base, table)
        ratio = table.J1 / table.J2
        for tau in (0.8, 7.0 / 6.0, 1.5):
            spec = small_lambda_roots(tau, p_base, table)
            A = ratio * tau
            B = -(tau - ratio * p_base.c - (p_base.delta1 * k / table.J2) * tau)
            C = (p_base.delta1 * k / table.J2) * p_base.c
            for lam in spec.lambda_pair:
                assert abs(A * lam * lam + B * lam + C) < 1e-12

    def test_sign_structure_across_threshold(self, p_base):
        eps = 0.01 * p_base.c
        tau_h = 7.0 * p_base.c / 6.0
        below = small_lambda_roots(tau_h - eps, p_base)
        above = small_lambda_roots(tau_h + eps, p_base)
        assert all(lam.real < 0 for lam in below.lambda_pair)
        assert all(lam.real > 0 for lam in above.lambda_pair)
        # complex-conjugate pair on both sides this close to the crossing
        assert below.lambda_pair[0].imag == pytest.approx(
            -below.lambda_pair[1].imag)
        assert above.lambda_pair[0].imag != 0.0

    def test_oscillation_frequency_scales_like_sqrt_delta1(self, p_base):
        tau = 7.0 / 6.0
        w1 = abs(small_lambda_roots(tau, p_base).lambda_pair[0].imag)
        w2 = abs(small_lambda_roots(
            tau, p_base.with_(delta1=1e-6)).lambda_pair[0].imag)
        assert w1 / w2 == pytest.approx(10.0, rel=1e-2)

    def test_asymptotic_forms_match_roots_near_threshold(self, p_base):
        tau = 7.0 / 6.0 * 1.001
        spec = small_lambda_roots(tau, p_base)
        lam = spec.lambda_pair[0]
        assert lam.real == pytest.approx(spec.re_asym, abs=5e-3 * abs(lam))
        assert abs(lam.imag) == pytest.approx(spec.im_asym, rel=5e-2)

    def test_linearized_limit_well_below_threshold(self, p_base):
        tau = 0.3
        lin = small_lambda_linearized(tau, p_base)
        slow = min(small_lambda_roots(tau, p_base).lambda_pair,
                   key=lambda z: abs(z))
        assert slow.imag == 0.0
        assert slow.real == pytest.approx(lin, rel=1e-2)
        assert lin < 0  # stable drift for tau < tau_h

    def test_nonpositive_tau_rejected(self, p_base):
        with pytest.raises(ValueError):
            small_lambda_roots(0.0, p_base)


class TestEtaProfile:
    def test_satisfies_outer_ode_away_from_origin(self, p_base):
        prof = eta_profile(p_base, V0=0.4, n=4000)
        x, eta = prof.x, prof.eta
        h = x[1] - x[0]
        mid = len(x) // 2
        # fourth-order stencil on each uniform side of the jump
        for e in (eta[:mid], eta[mid:]):
            lap = (-e[4:] + 16 * e[3:-1] - 30 * e[2:-2] + 16 * e[1:-3]
                   - e[:-4]) / (12 * h ** 2)
            res = p_base.Dv * lap - p_base.b * e[2:-2]
            assert np.max(np.abs(res)) < 1e-8 * max(1.0, np.max(np.abs(eta)))

    def test_jump_and_odd_symmetry(self, p_base, table):
        V0 = 0.4
        prof = eta_profile(p_base, V0=V0, n=4000)
        assert prof.jump == pytest.approx(
            -V0 * table.J0 / (p_base.c * p_base.Dv), rel=1e-10)
        # eta(-x) = -eta(x): grid is symmetric with the origin removed
        np.testing.assert_allclose(prof.eta, -prof.eta[::-1], atol=1e-14)
        # measured jump across the origin matches the stored one
        mid = len(prof.x) // 2
        measured = prof.eta[mid] - prof.eta[mid - 1]
        assert measured == pytest.approx(prof.jump, rel=1e-3)

    def test_no_flux_endpoints_and_slope_continuity(self, p_base):
        prof = eta_profile(p_base, V0=0.4, n=4000)
        x, eta = prof.x, prof.eta
        assert abs(eta[1] - eta[0]) / (x[1] - x[0]) < 1e-3 * np.max(np.abs(eta))
        mid = len(x) // 2
        left = (eta[mid - 1] - eta[mid - 2]) / (x[mid - 1] - x[mid - 2])
        right = (eta[mid + 1] - eta[mid]) / (x[mid + 1] - x[mid])
        assert left == pytest.approx(right, rel=1e-3)
        assert left == pytest.approx(prof.eta_x_mean, rel=1e-3)

    def test_closed_form_mean_slope_on_upper_branch(self):
        # The closed form bakes in the small-a upper-branch amplitude
        # V0 = (c^2/3) sqrt(b Dv) tanh(l sqrt(b/Dv)).
        p = ModelParams(a=1e-6, b=1.0, c=1.0, delta1=1e-8, Dv=1.0, l=1.0)
        V0p = smalla_roots(p)[0]
        prof = eta_profile(p, V0=V0p)
        assert eta_x_mean_closed_form(p) == pytest.approx(
            prof.eta_x_mean, rel=1e-3)
