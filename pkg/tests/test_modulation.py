import numpy as np
import pytest

from mwstab.fourier import TrigSeries
from mwstab.waves import Model, solve_wave, SQRT3
from mwstab.modulation import (critical_basis, projected_det,
                               discriminant_sweep, critical_growth,
                               threshold_bisect, DegeneratePairError,
                               positivity_margin)

MODEL_A = Model("A")


@pytest.fixture(scope="module")
def branch_a005():
    return solve_wave(MODEL_A, 0.05, 1.0, n_modes=48)


@pytest.fixture(scope="module")
def basis_a005(branch_a005):
    return critical_basis(MODEL_A, branch_a005)


class TestCriticalBasis:
    def test_flat_limit_is_sin_cos(self):
        branch = solve_wave(MODEL_A, 0.0, 1.0, n_modes=16)
        basis = critical_basis(MODEL_A, branch)
        assert np.array_equal(basis.phi1.sin,
                              TrigSeries.sine(1, 16).sin)
        assert np.array_equal(basis.phi2.cos,
                              TrigSeries.cosine(1, 16).cos)

    def test_parity_and_orthogonality(self, basis_a005):
        assert basis_a005.phi1.is_odd()
        assert basis_a005.phi2.is_even()
        assert basis_a005.phi1.inner(basis_a005.phi2) == 0.0

    def test_phi1_second_harmonic(self, basis_a005):
        # phi1 = sin z + a k^2 sin 2z + (21/16) a^2 k^4 sin 3z + O(a^3)
        assert basis_a005.phi1.sin[1] == pytest.approx(0.05, abs=1e-4)
        assert basis_a005.phi1.sin[2] == pytest.approx(
            21.0 / 16.0 * 0.05**2, abs=2e-4)

    def test_norms_match_expansions(self):
        branch = solve_wave(MODEL_A, 0.1, 1.0, n_modes=32)
        basis = critical_basis(MODEL_A, branch)
        assert basis.phi1.inner(basis.phi1) == pytest.approx(
            (1.0 + 0.1**2) / 2.0, abs=1e-3)
        assert basis.phi2.inner(basis.phi2) == pytest.approx(
            (1.0 + 3.0 * 0.1**2) / 2.0, abs=1e-3)


class TestProjectedDet:
    def test_flat_state_closed_form(self):
        branch = solve_wave(MODEL_A, 0.0, 1.0, n_modes=24)
        basis = critical_basis(MODEL_A, branch)
        mu = 0.01
        det = projected_det(MODEL_A, branch, basis, mu)
        assert det.b0 == pytest.approx(-4.0 * mu**2 + mu**4, rel=1e-10)
        assert det.b1 == pytest.approx((-8.0 * mu + 4.0 * mu**3) / SQRT3,
                                       rel=1e-10)
        assert det.b2 == pytest.approx((4.0 / 3.0) * (1.0 - mu**2),
                                       rel=1e-10)
        assert det.disc == pytest.approx(16.0 * mu**2 / 3.0, rel=1e-6)

    def test_parity_in_mu(self, branch_a005, basis_a005):
        plus = projected_det(MODEL_A, branch_a005, basis_a005, 0.03)
        minus = projected_det(MODEL_A, branch_a005, basis_a005, -0.03)
        assert minus.b0 == pytest.approx(plus.b0, abs=1e-10)
        assert minus.b1 == pytest.approx(-plus.b1, abs=1e-10)
        assert minus.b2 == pytest.approx(plus.b2, abs=1e-10)

    def test_coperiodic_double_root(self, branch_a005, basis_a005):
        det = projected_det(MODEL_A, branch_a005, basis_a005, 0.0)
        a = branch_a005.a
        assert abs(det.b0) <= 1e-8
        assert abs(det.b1) <= 1e-8
        assert det.b2 == pytest.approx(4.0 / 3.0 + 2.0 * a**2 / 3.0,
                                       abs=10.0 * a**3)

    def test_model_b_coperiodic_discriminant(self):
        model = Model("B", gamma=2.0)
        branch = solve_wave(model, 0.02, 1.0, n_modes=32)
        basis = critical_basis(model, branch)
        det = projected_det(model, branch, basis, 0.0)
        assert det.disc == pytest.approx(-0.02**2, rel=0.05)

    def test_discriminant_asymptotics(self):
        for k in (0.5, 2.0):
            branch = solve_wave(MODEL_A, 0.02, k, n_modes=32)
            basis = critical_basis(MODEL_A, branch)
            for mu in (0.005, 0.02):
                det = projected_det(MODEL_A, branch, basis, mu)
                lead = 16.0 * mu**2 / (3.0 * k**2) \
                    + 16.0 * 0.02**2 * k**2 / 3.0
                assert 0.95 <= det.disc / lead <= 1.05

    def test_guard_on_large_parameters(self, branch_a005, basis_a005):
        with pytest.raises(ValueError):
            projected_det(MODEL_A, branch_a005, basis_a005, 0.5)

    def test_degenerate_basis_is_rejected(self, branch_a005):
        from mwstab.modulation import CriticalBasis
        n = branch_a005.n_modes
        broken = CriticalBasis(phi1=TrigSeries.zero(n),
                               phi2=TrigSeries.cosine(1, n), a=0.05, k=1.0)
        with pytest.raises(ArithmeticError, match="degenerate"):
            projected_det(MODEL_A, branch_a005, broken, 0.01)


class TestCriticalGrowth:
    def test_flat_state_matches_dispersion(self):
        from mwstab.bloch import dispersion
        branch = solve_wave(MODEL_A, 0.0, 1.0, n_modes=24)
        mu = 0.04
        lam_plus, lam_minus = critical_growth(MODEL_A, branch, mu)
        assert lam_plus == pytest.approx(
            1j * dispersion(MODEL_A, 1, mu, 1.0), abs=1e-10)
        assert lam_minus == pytest.approx(
            1j * dispersion(MODEL_A, -1, mu, 1.0), abs=1e-10)

    def test_flat_double_root_is_group_velocity(self):
        branch = solve_wave(MODEL_A, 0.0, 1.0, n_modes=24)
        basis = critical_basis(MODEL_A, branch)
        det = projected_det(MODEL_A, branch, basis, 1e-3)
        xp, xm = det.q_roots()
        # Q at a = mu = 0 has the double root X = sqrt3 = dOmega/dmu at 0
        assert xp.real == pytest.approx(SQRT3, abs=5e-3)
        assert xm.real == pytest.approx(SQRT3, abs=5e-3)

    def test_degenerate_pair_flag(self):
        branch = solve_wave(MODEL_A, 0.0, 1.0, n_modes=16)
        with pytest.raises(DegeneratePairError):
            critical_growth(MODEL_A, branch, 0.0)

    def test_root_correspondence(self, branch_a005, basis_a005):
        for mu in (0.01, 0.03, 0.05):
            det = projected_det(MODEL_A, branch_a005, basis_a005, mu)
            lam_plus, lam_minus = critical_growth(MODEL_A, branch_a005, mu)
            predicted = sorted(det.lambda_roots(), key=lambda z: z.imag)
            measured = sorted((lam_plus, lam_minus), key=lambda z: z.imag)
            bound = 10.0 * (mu**3 + 0.05**3)
            for have, want in zip(measured, predicted):
                assert abs(have - want) <= bound

    def test_unstable_growth_rate_formula(self):
        model = Model("B", gamma=3.0)
        branch = solve_wave(model, 0.02, 1.0, n_modes=32)
        basis = critical_basis(model, branch)
        mu = 0.005
        det = projected_det(model, branch, basis, mu)
        assert det.disc < 0.0
        lam_plus, _ = critical_growth(model, branch, mu)
        predicted = mu * np.sqrt(-det.disc) / (2.0 * det.d2)
        assert lam_plus.real == pytest.approx(predicted, rel=0.2)


class TestVerdicts:
    def test_model_a_stable(self):
        report = discriminant_sweep(MODEL_A, 0.02, 1.0,
                                    np.linspace(0.005, 0.05, 6), n_modes=32)
        assert report.verdict == "stable"
        assert min(disc for _, disc in report.disc_samples) \
            >= 16.0 * 0.02**2 / 3.0 * 0.95
        assert report.max_growth <= 1e-6

    def test_model_b_gamma2_unstable(self):
        report = discriminant_sweep(Model("B", gamma=2.0), 0.02, 1.0,
                                    np.linspace(0.002, 0.02, 6), n_modes=32)
        assert report.verdict == "unstable"
        assert report.max_growth > 1e-6

    def test_model_b_gamma0_stable(self):
        report = discriminant_sweep(Model("B", gamma=0.0), 0.02, 1.0,
                                    np.linspace(0.005, 0.05, 6), n_modes=32)
        assert report.verdict == "stable"

    def test_margin_function(self):
        assert positivity_margin(0.0, 0.0) == 1e-10
        assert positivity_margin(0.1, 0.0) == pytest.approx(1e-5)


class TestThreshold:
    def test_bisection_brackets_unit_gamma(self):
        for k in (1.0, 2.0):
            gamma_star = threshold_bisect(k, 0.01, 0.0, 2.0, n_modes=24)
            assert 0.95 <= gamma_star <= 1.05

    def test_same_sign_endpoints_rejected(self):
        with pytest.raises(ValueError, match="bracket"):
            threshold_bisect(1.0, 0.01, 0.0, 0.5, n_modes=24)
