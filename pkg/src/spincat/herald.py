"""Photon-number projection of the Dicke ground state.

An n-photon measurement projects |G> onto the spin state
psi_n = <n|G> / ||<n|G>||, obtained with probability P(n) = ||<n|G>||^2.
Because the joint parity (-1)^(n+k) is fixed, the parity of n equals the
parity of k = J + m on the heralded state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dicke import GroundState
from .spin import SpinDensityMatrix, SpinVector

#: slice norms below this are treated as forbidden outcomes
DEGENERATE_NORM = 1e-300


class DegenerateOutcomeError(ValueError):
    """The requested photon outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class HeraldOutcome:
    n: int
    state: SpinVector
    probability: float


def _slice_amplitudes(ground: GroundState, n: int) -> np.ndarray:
    basis = ground.basis
    p = basis.params
    if not 0 <= n <= p.n_cutoff:
        raise ValueError(f"photon number n={n} outside 0..{p.n_cutoff}")
    amp = np.zeros(p.n_atoms + 1)
    sel = basis.ns == n
    amp[basis.ks[sel]] = ground.amplitudes[sel]
    return amp


def herald(ground: GroundState, n: int) -> HeraldOutcome:
    """Heralded spin state and probability for photon outcome n."""
    amp = _slice_amplitudes(ground, n)
    prob = float(np.dot(amp, amp))
    if prob < DEGENERATE_NORM:
        raise DegenerateOutcomeError(
            f"outcome n={n} has probability {prob:.3e}; "
            "no heralded state exists (parity-forbidden or vacuum)"
        )
    psi = SpinVector(ground.basis.params.spin, amp / np.sqrt(prob))
    return HeraldOutcome(n, psi, prob)


def photon_distribution(ground: GroundState) -> np.ndarray:
    """P(n) for n = 0..n_cutoff; sums to 1 within 1e-12."""
    table = ground.amplitude_table()
    return (table ** 2).sum(axis=1)


def reduced_spin_density(ground: GroundState) -> SpinDensityMatrix:
    """Unheralded spin state: trace out the photons,
    rho_{mm'} = sum_n <n,m|G><G|n,m'>."""
    table = ground.amplitude_table()
    rho = table.T @ table
    return SpinDensityMatrix(ground.basis.params.spin, rho)
