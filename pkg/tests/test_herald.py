import numpy as np
import pytest

from conftest import ground
from spincat import (DegenerateOutcomeError, DickeParams, figure_patch,
                     herald, photon_distribution, reduced_spin_density,
                     solve_ground, spin_wigner)


@pytest.fixture(scope="module")
def gs_decoupled():
    return solve_ground(DickeParams(1.0, 1.0, 0.0, 6, 10))


class TestHerald:
    def test_vacuum_outcome_at_zero_coupling(self, gs_decoupled):
        out = herald(gs_decoupled, 0)
        assert out.probability == pytest.approx(1.0, abs=1e-14)
        assert abs(out.state.amplitudes[0]) == pytest.approx(1.0)

    def test_forbidden_outcome_at_zero_coupling(self, gs_decoupled):
        with pytest.raises(DegenerateOutcomeError):
            herald(gs_decoupled, 1)

    def test_out_of_range(self, gs_decoupled):
        with pytest.raises(ValueError):
            herald(gs_decoupled, 11)

    def test_probabilities_decrease_with_n(self, gs30_critical):
        probs = [herald(gs30_critical, n).probability for n in range(1, 7)]
        assert all(b < a for a, b in zip(probs, probs[1:]))

    def test_parity_of_heralded_states(self, gs30_critical):
        dist = photon_distribution(gs30_critical)
        for n in range(51):
            if dist[n] <= 1e-12:
                continue
            amp = herald(gs30_critical, n).state.amplitudes
            off = amp[1::2] if n % 2 == 0 else amp[0::2]
            assert np.abs(off).max() < 1e-12


class TestPhotonDistribution:
    def test_decoupled(self, gs_decoupled):
        dist = photon_distribution(gs_decoupled)
        assert dist[0] == pytest.approx(1.0, abs=1e-14)
        assert np.abs(dist[1:]).max() < 1e-20

    def test_sums_to_one(self, gs30_critical):
        assert photon_distribution(gs30_critical).sum() == pytest.approx(
            1.0, abs=1e-12
        )

    def test_sums_to_one_at_scale(self):
        gs = ground(200, 0.9)
        assert photon_distribution(gs).sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_herald_probabilities(self, gs30_critical):
        dist = photon_distribution(gs30_critical)
        for n in (0, 1, 4, 9):
            assert dist[n] == pytest.approx(
                herald(gs30_critical, n).probability, abs=1e-15
            )

    def test_even_and_odd_outcomes_interleave(self, gs30_critical):
        dist = photon_distribution(gs30_critical)
        assert dist[1:7].min() > 0
        assert all(b < a for a, b in zip(dist[1:7], dist[2:7]))


class TestReducedDensity:
    def test_decoupled_is_rank_one(self, gs_decoupled):
        rho = reduced_spin_density(gs_decoupled).matrix.real
        want = np.zeros_like(rho)
        want[0, 0] = 1.0
        assert np.abs(rho - want).max() < 1e-14

    def test_equals_heralded_mixture(self, gs30_critical):
        rho = reduced_spin_density(gs30_critical).matrix
        dist = photon_distribution(gs30_critical)
        mix = np.zeros_like(rho)
        for n in range(51):
            if dist[n] < 1e-300:
                continue
            amp = herald(gs30_critical, n).state.amplitudes
            mix += dist[n] * np.outer(amp, amp.conj())
        assert np.abs(rho - mix).max() < 1e-12

    def test_wigner_is_gaussian_like(self, gs30_critical):
        # no negativity over the plotted patch for the unheralded state
        rho = reduced_spin_density(gs30_critical)
        thetas, phis = figure_patch(rho.spin, n_theta=101, n_phi=101)
        grid = spin_wigner(rho, thetas, phis)
        assert grid.values.min() >= -1e-8
