"""Closed-form transfer coefficients, squeezing summaries, and eigensystem."""

import cmath
import math

import numpy as np
import pytest
from scipy.linalg import expm

from epsqueeze.dynamics import (
    CoherentPair,
    ModelParams,
    Regime,
    classify_regime,
    eigensystem,
    ground_state_param,
    lambda0,
    quadrature_mean,
    quadrature_variance,
    squeeze_summary,
    transfer_coeffs,
    transfer_matrix,
)
from epsqueeze.errors import CoalescenceError, DegenerateModelError, NoGroundStateError


def dynamical_matrix(params: ModelParams) -> np.ndarray:
    kappa = complex(params.kappa)
    return np.array(
        [[params.delta, 1j * kappa], [1j * np.conj(kappa), -params.delta]]
    )


class TestRegime:
    def test_oscillating_side(self):
        assert classify_regime(ModelParams(1.0, 0.95), 1e-9) is Regime.BROKEN

    def test_equal_magnitudes(self):
        assert (
            classify_regime(ModelParams(1.0, 1.0), 1e-9) is Regime.EXCEPTIONAL_POINT
        )

    def test_growing_side(self):
        assert classify_regime(ModelParams(0.0, 1.0), 1e-9) is Regime.SYMMETRIC

    def test_degenerate_input(self):
        with pytest.raises(DegenerateModelError):
            classify_regime(ModelParams(0.0, 0.0))

    @pytest.mark.parametrize("tol", [0.0, -1e-6, 2e-3])
    def test_tolerance_domain(self, tol):
        with pytest.raises(ValueError):
            classify_regime(ModelParams(1.0, 0.5), tol)

    def test_tolerance_window(self):
        assert (
            classify_regime(ModelParams(1.0, 1.0 + 1e-13))
            is Regime.EXCEPTIONAL_POINT
        )
        assert classify_regime(ModelParams(1.0, 1.0 + 1e-6)) is Regime.SYMMETRIC


class TestLambda0:
    def test_values(self):
        assert lambda0(ModelParams(1.0, 0.95)) == pytest.approx(
            0.31224989991992, rel=1e-12
        )
        assert lambda0(ModelParams(1.0, 1.0)) == 0.0
        assert lambda0(ModelParams(0.52, 0.48)) == pytest.approx(0.2, rel=1e-12)

    def test_matches_numeric_eigenvalue(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            p = ModelParams(rng.uniform(-2, 2), rng.uniform(-2, 2))
            evals = np.linalg.eigvals(dynamical_matrix(p))
            assert lambda0(p) == pytest.approx(abs(evals[0]), abs=1e-12)

    def test_complex_coupling_uses_magnitude(self):
        assert lambda0(ModelParams(1.0, 0.6j)) == pytest.approx(0.8, rel=1e-12)


class TestEigensystem:
    def test_oscillating_eigenvalues(self):
        es = eigensystem(ModelParams(1.0, 0.6))
        assert es.lambda_plus == pytest.approx(0.8)
        assert es.lambda_minus == pytest.approx(-0.8)

    def test_growing_eigenvalues(self):
        es = eigensystem(ModelParams(0.0, 1.0))
        assert es.lambda_plus == pytest.approx(1j)
        assert es.lambda_minus == pytest.approx(-1j)

    def test_coalescence(self):
        with pytest.raises(CoalescenceError):
            eigensystem(ModelParams(1.0, 1.0))

    @pytest.mark.parametrize(
        "delta,kappa",
        [(1.0, 0.6), (1.0, -0.6), (-1.2, 0.3), (0.3, 1.1), (0.0, 0.7), (1.0, 0.5j)],
    )
    def test_biorthogonal_and_reconstruction(self, delta, kappa):
        p = ModelParams(delta, kappa)
        es = eigensystem(p)
        h = dynamical_matrix(p)
        for lam, r, l in [
            (es.lambda_plus, es.r_plus, es.l_plus),
            (es.lambda_minus, es.r_minus, es.l_minus),
        ]:
            assert np.allclose(h @ r, lam * r, atol=1e-12)
            assert np.allclose(h.conj().T @ l, np.conj(lam) * l, atol=1e-12)
        assert abs(np.vdot(es.l_plus, es.r_minus)) < 1e-12
        assert abs(np.vdot(es.l_minus, es.r_plus)) < 1e-12
        assert np.vdot(es.l_plus, es.r_plus) == pytest.approx(1.0, abs=1e-12)
        for t in (0.0, 0.7, -2.3):
            assert np.allclose(
                es.reconstruct(t), transfer_matrix(p, t), atol=1e-10
            )

    def test_pure_detuning(self):
        es = eigensystem(ModelParams(1.0, 0.0))
        assert sorted([es.lambda_plus.real, es.lambda_minus.real]) == [-1.0, 1.0]
        assert np.allclose(es.reconstruct(1.3), transfer_matrix(ModelParams(1.0, 0.0), 1.3))


class TestTransferCoeffs:
    def test_identity_at_zero(self):
        c = transfer_coeffs(ModelParams(0.7, -1.4), 0.0)
        assert c.A == 1.0 and c.B == 0.0

    def test_equal_couplings_closed_form(self):
        c = transfer_coeffs(ModelParams(1.0, 1.0), 2.0)
        assert c.A == pytest.approx(1.0 - 2.0j, abs=1e-14)
        assert c.B == pytest.approx(2.0, abs=1e-14)

    def test_pure_coupling_hyperbolic(self):
        c = transfer_coeffs(ModelParams(0.0, 1.0), 1.0)
        assert c.A == pytest.approx(math.cosh(1.0), rel=1e-14)
        assert c.B == pytest.approx(math.sinh(1.0), rel=1e-14)

    def test_half_period_returns_minus_identity(self):
        c = transfer_coeffs(ModelParams(1.0, 0.6), math.pi / 0.8)
        assert c.A == pytest.approx(-1.0, abs=1e-12)
        assert abs(c.B) < 1e-12

    def test_symplectic_random_grid(self):
        rng = np.random.default_rng(42)
        for _ in range(10000):
            p = ModelParams(rng.uniform(-2, 2), rng.uniform(-2, 2))
            c = transfer_coeffs(p, rng.uniform(-1.5, 1.5))
            assert abs(c.A0**2 - c.B0**2 - 1.0) < 1e-10

    def test_matrix_exponential_oracle(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(500):
            delta = rng.uniform(-2, 2)
            kappa = rng.uniform(-2, 2) + (rng.uniform(-1, 1) * 1j if rng.random() < 0.3 else 0.0)
            t = rng.uniform(-3, 3)
            p = ModelParams(delta, kappa)
            dev = np.abs(
                transfer_matrix(p, t) - expm(-1j * dynamical_matrix(p) * t)
            ).max()
            worst = max(worst, dev)
        # within 1e-6 of the coalescence locus
        for eps in (1e-6, -1e-6, 1e-7):
            p = ModelParams(1.0, 1.0 + eps)
            for t in (0.3, 2.0, 3.0):
                dev = np.abs(
                    transfer_matrix(p, t) - expm(-1j * dynamical_matrix(p) * t)
                ).max()
                worst = max(worst, dev)
        assert worst < 1e-9

    def test_composition(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            p = ModelParams(rng.uniform(-2, 2), rng.uniform(-2, 2))
            t1, t2 = rng.uniform(-2, 2, size=2)
            m12 = transfer_matrix(p, t1 + t2)
            assert np.abs(m12 - transfer_matrix(p, t2) @ transfer_matrix(p, t1)).max() < 1e-10

    @pytest.mark.parametrize("kappa", [0.6, 1.3, 0.4 + 0.3j, -0.9])
    def test_time_reversal(self, kappa):
        p = ModelParams(0.8, kappa)
        for t in (0.5, 2.7, 11.0):
            fwd = transfer_coeffs(p, t)
            bwd = transfer_coeffs(p, -t)
            assert bwd.A == pytest.approx(np.conj(fwd.A), rel=1e-12)
            assert bwd.B == pytest.approx(-fwd.B, rel=1e-12)

    def test_continuity_at_coalescence(self):
        # closed forms on either side match the polynomial solution there
        for side in (1 + 1e-8, 1 - 1e-8):
            p = ModelParams(1.0, side)
            for t in (0.5, 2.0, 5.0):
                c = transfer_coeffs(p, t)
                a_ref = 1.0 - 1j * t
                b_ref = side * t
                assert abs(c.A - a_ref) / abs(a_ref) < 1e-6
                assert abs(c.B - b_ref) / abs(b_ref) < 1e-6

    def test_rejects_non_finite_time(self):
        with pytest.raises(ValueError):
            transfer_coeffs(ModelParams(1.0, 0.5), math.inf)


class TestSqueezeSummary:
    def test_equal_couplings_value(self):
        s = squeeze_summary(ModelParams(1.0, 1.0), 2.0)
        assert s.S == pytest.approx(math.sqrt(5) + 2, rel=1e-12)
        assert s.period_T is None and s.s_max is None

    def test_oscillating_period_returns_to_one(self):
        p = ModelParams(1.0, 0.95)
        lam0 = lambda0(p)
        s = squeeze_summary(p, math.pi / lam0)
        assert s.S == pytest.approx(1.0, abs=1e-9)
        assert s.period_T == pytest.approx(math.pi / lam0, rel=1e-12)
        assert s.s_max == pytest.approx(math.sqrt(39), rel=1e-12)

    def test_exponential_growth(self):
        s = squeeze_summary(ModelParams(0.0, 1.0), 1.0)
        assert s.S == pytest.approx(math.e, rel=1e-12)

    def test_growing_side_asymptote(self):
        p = ModelParams(1.0, 1.05)
        lam0 = lambda0(p)
        for x in (9.2, 9.6, 10.0, 12.0):
            t = x / lam0
            s = squeeze_summary(p, t)
            assert s.S * lam0 / (1.05 * math.exp(x)) == pytest.approx(1.0, abs=1e-6)

    def test_equal_couplings_growth_law(self):
        p = ModelParams(1.0, 1.0)
        for t in (0.5, 3.0, 30.0):
            assert squeeze_summary(p, t).S == pytest.approx(
                math.sqrt(1 + t * t) + t, rel=1e-12
            )
        slope = (squeeze_summary(p, 2e3).S - squeeze_summary(p, 1e3).S) / 1e3
        assert slope == pytest.approx(2.0, abs=1e-5)

    def test_angle_at_zero_time(self):
        s = squeeze_summary(ModelParams(1.0, -0.7), 0.0)
        assert s.phi_plus == pytest.approx(0.5 * math.pi)

    def test_angle_at_maximum(self):
        # squeezing angle reaches Arg[-i*kappa*delta]/2 when S peaks
        for kappa in (0.95, -0.95):
            p = ModelParams(1.0, kappa)
            t_max = 0.5 * math.pi / lambda0(p)
            s = squeeze_summary(p, t_max)
            expected = 0.5 * cmath.phase(-1j * kappa * 1.0)
            assert s.phi_plus == pytest.approx(expected, abs=1e-12)

    def test_angle_sweep_within_period(self):
        # from Arg[kappa]/2 at the start to Arg[-kappa]/2 (mod pi) at the end
        p = ModelParams(1.0, 0.95)
        period = math.pi / lambda0(p)
        end = squeeze_summary(p, 0.999999 * period)
        diff = (end.phi_plus - 0.5 * math.pi) % math.pi
        assert min(diff, math.pi - diff) < 1e-3

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            squeeze_summary(ModelParams(1.0, 0.5), -0.1)

    def test_max_is_global(self):
        from scipy.optimize import minimize_scalar

        p = ModelParams(1.0, 0.95)
        period = math.pi / lambda0(p)
        res = minimize_scalar(
            lambda t: -squeeze_summary(p, t).S,
            bounds=(0.0, period),
            method="bounded",
            options={"xatol": 1e-10},
        )
        assert -res.fun == pytest.approx(math.sqrt(39), rel=1e-9)


class TestQuadratures:
    def test_mean_closed_form(self):
        p = ModelParams(1.0, 0.95)
        lam0 = lambda0(p)
        al = CoherentPair.quadrature_convention(2.0)
        t = 0.5 * math.pi / lam0
        assert quadrature_mean(p, t, al) == pytest.approx(2 * 1.95 / lam0, rel=1e-12)
        assert quadrature_mean(p, 2 * math.pi / lam0, al) == pytest.approx(0.0, abs=1e-9)
        assert quadrature_mean(p, 0.0, al) == pytest.approx(0.0, abs=1e-15)

    def test_mean_general_angle_and_mode(self):
        p = ModelParams(0.4, 0.9)
        al = CoherentPair(0.3 - 0.2j, 1.1j)
        c = transfer_coeffs(p, 1.7)
        for mode, a, abar in ((1, al.alpha1, al.alpha2), (2, al.alpha2, al.alpha1)):
            for phi in (0.0, 0.4, -2.0):
                expect = (cmath.exp(-1j * phi) * (c.A * a + c.B * np.conj(abar))).real
                assert quadrature_mean(p, 1.7, al, phi, mode) == pytest.approx(expect)

    def test_mean_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            quadrature_mean(ModelParams(1, 0.5), 1.0, CoherentPair(0, 0), mode=3)

    def test_variance(self):
        assert quadrature_variance(ModelParams(0.3, 1.7), 0.0) == 0.25
        assert quadrature_variance(ModelParams(1.0, 1.0), 2.0) == pytest.approx(2.25)
        p = ModelParams(1.0, 0.95)
        lam0 = lambda0(p)
        for n in (1, 2, 3):
            assert quadrature_variance(p, n * math.pi / lam0) == pytest.approx(
                0.25, abs=1e-9
            )

    def test_variance_floor(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p = ModelParams(rng.uniform(-2, 2), rng.uniform(-2, 2))
            assert quadrature_variance(p, rng.uniform(0, 2)) >= 0.25 - 1e-12


class TestGroundStateParam:
    def test_value(self):
        q = ground_state_param(ModelParams(1.0, 0.6))
        assert q == pytest.approx(-1j / 3, abs=1e-14)

    def test_weak_coupling_limit(self):
        q = ground_state_param(ModelParams(1.0, 1e-8))
        assert abs(q) < 1e-8

    def test_no_ground_state_cases(self):
        for params in (ModelParams(1.0, 1.0), ModelParams(0.5, 1.0), ModelParams(-1.0, 0.5)):
            with pytest.raises(NoGroundStateError):
                ground_state_param(params)
        with pytest.raises(NoGroundStateError):
            ground_state_param(ModelParams(1.0, 0.0))

    def test_magnitude_bound(self):
        rng = np.random.default_rng(13)
        for _ in range(200):
            delta = rng.uniform(0.1, 3)
            kappa = rng.uniform(0.01, 0.99) * delta
            assert abs(ground_state_param(ModelParams(delta, kappa))) < 1.0
