import math

import numpy as np
import pytest

import oracles
from conftest import ground
from spincat import (FockTailError, TwoModeFockState, boson_cat_state,
                     critical_scaling, expand_ground_fock, fit_boson_cat,
                     gaussian_ground, herald_boson, herald_boson_direct,
                     loglog_slope, lopt_limit, photon_distribution,
                     photon_distribution_limit, subtracted_squeezed)
from spincat.thermo import DegenerateBosonOutcomeError


class TestGaussianGround:
    def test_decoupled(self):
        gs = gaussian_ground(1.0, 0.0)
        assert gs.r_a == 0.0 and gs.r_b == 0.0
        assert gs.omega_minus == 1.0 and gs.omega_plus == 1.0

    def test_rb_limit(self):
        gs = gaussian_ground(1.0, 1.0 - 1e-8)
        assert abs(gs.r_b - 0.25 * math.log(2)) < 1e-8

    def test_tanh_identity(self):
        gs = gaussian_ground(1.0, 0.96)
        assert gs.tanh_r_plus + gs.tanh_r_minus == pytest.approx(
            math.tanh(gs.r_a), abs=1e-14
        )

    def test_normal_phase_only(self):
        with pytest.raises(ValueError):
            gaussian_ground(1.0, 1.0)
        with pytest.raises(ValueError):
            gaussian_ground(1.0, -0.1)

    def test_squeezing_signs(self):
        gs = gaussian_ground(1.0, 0.7)
        assert gs.r_a < 0 < gs.r_b


class TestExpandGroundFock:
    def test_vacuum_at_zero_coupling(self):
        state = expand_ground_fock(gaussian_ground(1.0, 0.0), (10, 10))
        assert state.coefficients[0, 0] == pytest.approx(1.0)
        assert np.abs(state.coefficients).sum() == pytest.approx(1.0)

    def test_matches_truncated_operator_oracle(self):
        state = expand_ground_fock(gaussian_ground(1.0, 0.5), (60, 60))
        ref = oracles.gaussian_two_mode_state(0.5, 60)
        assert np.abs(state.coefficients.real - ref).max() < 1e-9
        assert np.linalg.norm(state.coefficients) == pytest.approx(1.0, abs=1e-10)

    def test_even_joint_parity(self):
        c = expand_ground_fock(gaussian_ground(1.0, 0.8), (48, 48)).coefficients
        n, l = np.meshgrid(np.arange(49), np.arange(49), indexing="ij")
        assert np.abs(c[(n + l) % 2 == 1]).max() == 0.0

    def test_adaptive_cutoffs(self):
        state = expand_ground_fock(gaussian_ground(1.0, 0.9))
        assert state.tail <= 1e-10
        assert state.photon_cutoff <= 640

    def test_tail_error_near_critical(self):
        with pytest.raises(FockTailError):
            expand_ground_fock(gaussian_ground(1.0, 1 - 1e-9), (40, 40))

    def test_prefactor_law(self):
        # row norms of the full expansion match the direct row computation
        gs = gaussian_ground(1.0, 0.6)
        state = expand_ground_fock(gs, (80, 80))
        for n in range(5):
            direct = herald_boson_direct(gs, n, 80)[1]
            row = float((np.abs(state.coefficients[n]) ** 2).sum())
            assert row == pytest.approx(direct, abs=1e-12)


class TestHeraldBoson:
    def test_single_photon_is_subtracted_squeezed(self):
        gs = gaussian_ground(1.0, 0.9)
        state, _ = herald_boson(expand_ground_fock(gs, (60, 60)), 1)
        ref = subtracted_squeezed(1, gs.r_plus, 60)
        assert abs(np.vdot(state.amplitudes, ref.amplitudes)) ** 2 >= 1 - 1e-10

    def test_two_photon_combination(self):
        # (tanh^2 r- / tanh r+) b^2 - tanh r_a tanh r_b on the squeezed vacuum
        gs = gaussian_ground(1.0, 0.9)
        cutoff = 60
        state, _ = herald_boson(expand_ground_fock(gs, (cutoff, cutoff)), 2)
        b, squeezed = oracles.single_mode_ops(cutoff)
        sq = squeezed(gs.r_plus)
        op = (math.tanh(gs.r_minus) ** 2 / math.tanh(gs.r_plus)) * (b @ b) \
            - math.tanh(gs.r_a) * math.tanh(gs.r_b) * np.eye(cutoff + 1)
        ref = op @ sq
        ref /= np.linalg.norm(ref)
        got = state.amplitudes.real
        assert min(np.abs(got - ref).max(), np.abs(got + ref).max()) < 1e-9

    def test_vacuum_outcome(self):
        state, prob = herald_boson(
            expand_ground_fock(gaussian_ground(1.0, 0.0), (8, 8)), 0
        )
        assert prob == pytest.approx(1.0)
        assert abs(state.amplitudes[0]) == pytest.approx(1.0)

    def test_zero_row_raises(self):
        c = np.zeros((3, 3))
        c[0, 0] = 1.0
        state = TwoModeFockState(c, 2, 2, 0.0)
        with pytest.raises(DegenerateBosonOutcomeError):
            herald_boson(state, 1)

    def test_direct_matches_expansion(self):
        gs = gaussian_ground(1.0, 0.85)
        full = expand_ground_fock(gs, (70, 70))
        for n in range(1, 7):
            via_row, p_row = herald_boson_direct(gs, n, 70)
            via_full, p_full = herald_boson(full, n)
            assert p_row == pytest.approx(p_full, rel=1e-10)
            assert abs(np.vdot(via_row.amplitudes, via_full.amplitudes)) ** 2 \
                >= 1 - 1e-12

    def test_heralded_parity(self):
        gs = gaussian_ground(1.0, 1 - 1e-6)
        for n in range(1, 7):
            amp = herald_boson_direct(gs, n)[0].amplitudes
            off = amp[1::2] if n % 2 == 0 else amp[0::2]
            assert np.abs(off).max() == 0.0

    def test_degenerate_at_zero_coupling(self):
        with pytest.raises(DegenerateBosonOutcomeError):
            herald_boson_direct(gaussian_ground(1.0, 0.0), 1)


class TestSubtractedSqueezed:
    def test_even_support_of_squeezed_vacuum(self):
        amp = subtracted_squeezed(0, 0.4, 30).amplitudes
        assert np.abs(amp[1::2]).max() == 0.0

    def test_single_subtraction_relation(self):
        # b S(r)|0> = (-tanh r) b† S(r)|0>
        cutoff = 40
        b, squeezed = oracles.single_mode_ops(cutoff)
        ref = b @ squeezed(0.2)
        ref /= np.linalg.norm(ref)
        got = subtracted_squeezed(1, 0.2, cutoff).amplitudes.real
        assert min(np.abs(got - ref).max(), np.abs(got + ref).max()) < 1e-10

    def test_double_addition_matches_operator_oracle(self):
        cutoff = 40
        b, squeezed = oracles.single_mode_ops(cutoff)
        ref = b.T @ b.T @ squeezed(0.3)
        ref /= np.linalg.norm(ref)
        got = subtracted_squeezed(2, 0.3, cutoff).amplitudes.real
        assert np.abs(got - ref).max() < 1e-10

    def test_cutoff_too_small(self):
        with pytest.raises(FockTailError):
            subtracted_squeezed(0, 2.5, 12)


class TestBosonCatFit:
    def test_self_fit(self):
        psi = boson_cat_state(1.2, "even", 40)
        fit = fit_boson_cat(psi, "even")
        assert fit.beta_opt == pytest.approx(1.2, abs=1e-6)
        assert fit.fidelity == pytest.approx(1.0, abs=1e-10)

    def test_beta_grows_with_n_and_saturates(self):
        def betas_at(g):
            gs = gaussian_ground(1.0, g)
            out = []
            for n in range(1, 7):
                state, _ = herald_boson_direct(gs, n)
                parity = "even" if n % 2 == 0 else "odd"
                out.append(fit_boson_cat(state, parity).beta_opt)
            return np.array(out)

        near = betas_at(1 - 1e-6)
        assert np.all(np.diff(near) > 0)  # larger n, larger cat
        nearer = betas_at(1 - 1e-7)
        assert np.abs(nearer / near - 1).max() < 0.01  # saturation

    def test_fidelity_floor_toward_critical(self):
        # >= 0.987 on a grid approaching the critical point (1 - g/gc >= 1e-4;
        # still closer in, the n = 6 fidelity dips below the floor)
        for eps in (1e-1, 1e-2, 1e-3, 1e-4):
            gs = gaussian_ground(1.0, 1 - eps)
            for n in range(1, 7):
                state, _ = herald_boson_direct(gs, n)
                parity = "even" if n % 2 == 0 else "odd"
                assert fit_boson_cat(state, parity).fidelity >= 0.987


def test_lopt_limit():
    assert lopt_limit(0.0) == 0.0
    assert lopt_limit(1.5) == 3.0


class TestCriticalScaling:
    def test_recovers_synthetic_power_law(self):
        x = np.logspace(-6, -2, 9)
        y = 2.7 * x ** 0.25
        assert loglog_slope(x, y) == pytest.approx(0.25, abs=1e-12)

    def test_degenerate_samples(self):
        with pytest.raises(ValueError):
            critical_scaling(1, [0.9])
        with pytest.raises(ValueError):
            loglog_slope([1.0, 1.0], [2.0, 2.0])

    @pytest.mark.parametrize("n", [1, 6])
    def test_slope_approaches_quarter_at_criticality(self, n):
        samples = 1 - np.logspace(-12, -10, 5)
        assert critical_scaling(n, samples) == pytest.approx(0.25, abs=2e-3)


class TestAgainstExactDiagonalization:
    def test_photon_distribution_large_n(self):
        # finite-size ED at N=2000 approaches the thermodynamic limit
        gs = ground(2000, 0.8)
        ed = photon_distribution(gs)
        limit = photon_distribution_limit(gaussian_ground(1.0, 0.8), 6)
        for n in range(1, 7):
            assert abs(ed[n] - limit[n]) / limit[n] < 0.02
