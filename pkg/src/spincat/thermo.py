"""Analytic thermodynamic-limit treatment via Holstein-Primakoff bosonization.

For g < g_c the Dicke ground state maps onto two squeezed vacua mixed on a
balanced beam splitter,

    |G> = exp(-(tanh r+)/2 (a†² + b†²) + tanh r- a†b†) |0,0>
          / sqrt(cosh r_a cosh r_b),

with normal-mode frequencies Omega± = w sqrt(1 ± g/g_c), squeezing
parameters r_a = ln(Omega-/w)/2 <= 0 <= r_b = ln(Omega+/w)/2, and
tanh r± = (tanh r_a ± tanh r_b)/2.  Photon-number projection of mode a then
heralds superpositions of m-boson-subtracted squeezed states in mode b.

Heralded rows are computed directly from the series, which stays valid
arbitrarily close to g_c where the photon mode's occupation diverges and a
full two-mode expansion would need astronomically large cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .catfit import COARSE_GRID_POINTS, LOW_QUALITY_FIDELITY, golden_max

DEFAULT_FOCK_CUTOFF = 40
MAX_FOCK_CUTOFF = 640
TAIL_BUDGET = 1e-10
BETA_SCAN_MAX = 8.0


class FockTailError(RuntimeError):
    """Truncation tail exceeds budget at the largest allowed cutoff."""


class DegenerateBosonOutcomeError(ValueError):
    """Requested photon outcome has zero probability (parity-forbidden)."""


@dataclass(frozen=True)
class GaussianGroundState:
    """Derived parameters of the normal-phase Gaussian ground state."""

    omega: float
    g_over_gc: float
    omega_minus: float
    omega_plus: float
    r_a: float
    r_b: float
    r_plus: float
    r_minus: float

    @property
    def tanh_r_plus(self) -> float:
        return math.tanh(self.r_plus)

    @property
    def tanh_r_minus(self) -> float:
        return math.tanh(self.r_minus)

    @property
    def norm_prefactor(self) -> float:
        """1 / sqrt(cosh r_a cosh r_b), the Fock-expansion normalization."""
        return 1.0 / math.sqrt(math.cosh(self.r_a) * math.cosh(self.r_b))


@dataclass(frozen=True)
class TwoModeFockState:
    """Truncated Fock expansion c[n, l] over photon mode a and boson mode b."""

    coefficients: np.ndarray
    photon_cutoff: int
    boson_cutoff: int
    tail: float

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        expected = (self.photon_cutoff + 1, self.boson_cutoff + 1)
        if c.shape != expected:
            raise ValueError(f"coefficients shape {c.shape} != {expected}")
        object.__setattr__(self, "coefficients", c)


@dataclass(frozen=True)
class BosonicState:
    """Normalized Fock amplitudes of the collective-excitation mode."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes not normalized: |psi| = {nrm!r}")
        object.__setattr__(self, "amplitudes", a)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1


def gaussian_ground(omega: float, g_over_gc: float) -> GaussianGroundState:
    """Gaussian ground-state parameters at coupling g/g_c in [0, 1)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if not 0.0 <= g_over_gc < 1.0:
        raise ValueError(
            f"g/g_c must lie in [0, 1) (normal phase only), got {g_over_gc}"
        )
    om = omega * math.sqrt(1.0 - g_over_gc)
    op = omega * math.sqrt(1.0 + g_over_gc)
    r_a = 0.5 * math.log(om / omega)
    r_b = 0.5 * math.log(op / omega)
    tp = 0.5 * (math.tanh(r_a) + math.tanh(r_b))
    tm = 0.5 * (math.tanh(r_a) - math.tanh(r_b))
    return GaussianGroundState(
        omega=omega, g_over_gc=g_over_gc, omega_minus=om, omega_plus=op,
        r_a=r_a, r_b=r_b, r_plus=math.atanh(tp), r_minus=math.atanh(tm),
    )


def _pair_weights(m: int, tanh_r_plus: float, cutoff: int) -> np.ndarray:
    """w[p] with p = m + 2k, w = sqrt(p!/m!) (-tanh r+ / 2)^k / k!,
    in log space (values stay O(1); the intermediate factorials would not)."""
    p = np.arange(cutoff + 1)
    k = p - m
    valid = (k >= 0) & (k % 2 == 0)
    k2 = np.where(valid, k // 2, 0)
    half = -tanh_r_plus / 2.0  # > 0 whenever g > 0
    if half == 0.0:
        return (p == m).astype(float)
    logw = 0.5 * (gammaln(p + 1) - gammaln(m + 1)) + k2 * math.log(half) - gammaln(k2 + 1)
    return np.where(valid, np.exp(logw), 0.0)


def expand_ground_fock(gs: GaussianGroundState,
                       cutoffs: tuple[int, int] | None = None) -> TwoModeFockState:
    """Two-mode Fock expansion of the Gaussian ground state.

    Sums the triple series over (k, l, m) with weights
    (-tanh r+ / 2)^(k+l) (tanh r-)^m / (k! l! m!) * sqrt((2k+m)! (2l+m)!)
    and the 1/sqrt(cosh r_a cosh r_b) prefactor, so the squared Frobenius
    norm equals 1 minus the truncation tail.

    With cutoffs=None they start at 40 and double until the tail (squared
    mass of the last row plus last column) is below 1e-10; a hard ceiling of
    640 raises FockTailError.
    """
    if cutoffs is not None:
        ca, cb = cutoffs
        state = _expand_at(gs, ca, cb)
        if state.tail > TAIL_BUDGET:
            raise FockTailError(
                f"truncation tail {state.tail:.3e} above {TAIL_BUDGET} at "
                f"cutoffs ({ca}, {cb}); increase them"
            )
        return state
    c = DEFAULT_FOCK_CUTOFF
    while True:
        state = _expand_at(gs, c, c)
        if state.tail <= TAIL_BUDGET:
            return state
        if c >= MAX_FOCK_CUTOFF:
            raise FockTailError(
                f"truncation tail {state.tail:.3e} above {TAIL_BUDGET} at the "
                f"ceiling cutoff {MAX_FOCK_CUTOFF}; g/g_c = {gs.g_over_gc} is "
                "too close to critical for a full two-mode expansion"
            )
        c = min(2 * c, MAX_FOCK_CUTOFF)


def _expand_at(gs: GaussianGroundState, ca: int, cb: int) -> TwoModeFockState:
    tp, tm = gs.tanh_r_plus, gs.tanh_r_minus
    c = np.zeros((ca + 1, cb + 1))
    for m in range(0, min(ca, cb) + 1):
        if m > 0 and tm == 0.0:
            break
        # each pair-weight vector carries 1/sqrt(m!), so only tm^m remains
        wa = _pair_weights(m, tp, ca)
        wb = _pair_weights(m, tp, cb)
        if m > 0:
            scale = math.exp(m * math.log(abs(tm)))
            sign = -1.0 if (tm < 0 and m % 2 == 1) else 1.0
        else:
            scale, sign = 1.0, 1.0
        c += sign * scale * np.outer(wa, wb)
    c *= gs.norm_prefactor
    tail = float((c[-1] ** 2).sum() + (c[:, -1] ** 2).sum() - c[-1, -1] ** 2)
    return TwoModeFockState(c, ca, cb, tail)


def herald_boson(state: TwoModeFockState, n: int) -> tuple[BosonicState, float]:
    """Project onto the n-photon component: row n renormalized, plus its
    pre-normalization squared norm P(n)."""
    if not 0 <= n <= state.photon_cutoff:
        raise ValueError(f"n={n} outside 0..{state.photon_cutoff}")
    row = state.coefficients[n]
    prob = float(np.vdot(row, row).real)
    if prob <= 0.0:
        raise DegenerateBosonOutcomeError(f"outcome n={n} has zero probability")
    return BosonicState(row / math.sqrt(prob)), prob


def herald_boson_direct(gs: GaussianGroundState, n: int,
                        boson_cutoff: int | None = None) -> tuple[BosonicState, float]:
    """Heralded state and P(n) for outcome n, straight from the series.

    Only the b-mode is truncated, so this remains accurate arbitrarily close
    to g_c (the b-row tail decays like tanh(r+)^2 per excitation pair even
    when the photon mode diverges).
    """
    tp, tm = gs.tanh_r_plus, gs.tanh_r_minus
    if n > 0 and tp == 0.0 and tm == 0.0:
        raise DegenerateBosonOutcomeError(
            f"outcome n={n} has zero probability at g = 0"
        )
    cutoff = boson_cutoff if boson_cutoff is not None else DEFAULT_FOCK_CUTOFF
    while True:
        row = _heralded_row(gs, n, cutoff)
        tail = float((row[-2:] ** 2).sum())
        total = float((row ** 2).sum())
        if total > 0.0 and tail <= max(TAIL_BUDGET * total, 1e-300):
            break
        if cutoff >= MAX_FOCK_CUTOFF:
            raise FockTailError(
                f"heralded-row tail {tail:.3e} above budget at the ceiling "
                f"cutoff {MAX_FOCK_CUTOFF}"
            )
        if boson_cutoff is not None:
            raise FockTailError(
                f"heralded-row tail {tail:.3e} above budget at cutoff {cutoff}"
            )
        cutoff = min(2 * cutoff, MAX_FOCK_CUTOFF)
    if total <= 0.0:
        raise DegenerateBosonOutcomeError(f"outcome n={n} has zero probability")
    return BosonicState(row / math.sqrt(total)), total


def _heralded_row(gs: GaussianGroundState, n: int, cutoff: int) -> np.ndarray:
    tp, tm = gs.tanh_r_plus, gs.tanh_r_minus
    row = np.zeros(cutoff + 1)
    for m in range(n % 2, n + 1, 2):
        if m > 0 and tm == 0.0:
            continue
        wa = _pair_weights(m, tp, n)[n]
        if wa == 0.0:
            continue
        wb = _pair_weights(m, tp, cutoff)
        if m > 0:
            scale = math.exp(m * math.log(abs(tm)))
            sign = -1.0 if (tm < 0 and m % 2 == 1) else 1.0
        else:
            scale, sign = 1.0, 1.0
        row += sign * scale * wa * wb
    return gs.norm_prefactor * row


def photon_distribution_limit(gs: GaussianGroundState, n_max: int,
                              boson_cutoff: int | None = None) -> np.ndarray:
    """P(n) for n = 0..n_max in the thermodynamic limit."""
    out = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        try:
            _, out[n] = herald_boson_direct(gs, n, boson_cutoff)
        except DegenerateBosonOutcomeError:
            out[n] = 0.0
    return out


def subtracted_squeezed(m: int, r: float, cutoff: int) -> BosonicState:
    """Normalized m-boson "subtracted" squeezed state b†^m S(r)|0>.

    Uses the disentangling form S(r)|0> = exp(-(tanh r)/2 b†²)|0> / sqrt(cosh r);
    note b S(r)|0> = (-tanh r) b† S(r)|0>, so photon subtraction and addition
    coincide up to normalization.
    """
    if m < 0:
        raise ValueError("subtraction count m must be >= 0")
    l = np.arange(cutoff + 1)
    k = l - m
    valid = (k >= 0) & (k % 2 == 0)
    k2 = np.where(valid, k // 2, 0)
    t = math.tanh(r)
    if t == 0.0:
        amp = np.where(valid & (k2 == 0), 1.0, 0.0)
    else:
        logw = 0.5 * gammaln(l + 1) + k2 * math.log(abs(t) / 2) - gammaln(k2 + 1)
        amp = np.where(valid, np.exp(logw) * np.sign(-t) ** k2, 0.0)
    nrm = float(np.linalg.norm(amp))
    if nrm == 0.0:
        raise ValueError(f"state is empty at cutoff {cutoff}")
    tail = float((amp[-2:] ** 2).sum()) / nrm ** 2
    if tail > TAIL_BUDGET:
        raise FockTailError(
            f"tail {tail:.3e} above {TAIL_BUDGET} at cutoff {cutoff}; increase it"
        )
    return BosonicState(amp / nrm)


def boson_cat_state(beta: float, parity: str, cutoff: int) -> BosonicState:
    """Even/odd bosonic cat (|beta> ± |-beta>) / sqrt(2 (1 ± exp(-2 beta²)))."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if beta < 0:
        raise ValueError("beta must be >= 0")
    keep = 0 if parity == "even" else 1
    l = np.arange(cutoff + 1)
    if beta == 0.0:
        if parity == "odd":
            raise ValueError("odd cat degenerates to zero at beta = 0")
        amp = np.zeros(cutoff + 1)
        amp[0] = 1.0
        return BosonicState(amp)
    logc = -0.5 * beta ** 2 + l * math.log(beta) - 0.5 * gammaln(l + 1)
    amp = np.where(l % 2 == keep, np.exp(logc), 0.0)
    nrm = np.linalg.norm(amp)
    return BosonicState(amp / nrm)


@dataclass(frozen=True)
class BosonCatFit:
    beta_opt: float
    fidelity: float
    low_quality: bool = False


def fit_boson_cat(psi: BosonicState, parity: str) -> BosonCatFit:
    """Maximize |<cat(beta)|psi>|^2 over beta; refined below 1e-8."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    amp = psi.amplitudes
    cutoff = psi.cutoff

    def f(beta: float) -> float:
        cat = boson_cat_state(max(beta, 1e-12), parity, cutoff)
        return float(abs(np.vdot(cat.amplitudes, amp)) ** 2)

    betas = np.linspace(BETA_SCAN_MAX / COARSE_GRID_POINTS, BETA_SCAN_MAX,
                        COARSE_GRID_POINTS)
    grid_f = np.array([f(b) for b in betas])
    i = int(np.argmax(grid_f))
    lo = betas[max(i - 1, 0)]
    hi = betas[min(i + 1, betas.size - 1)]
    beta_opt, best = golden_max(f, lo, hi)
    if best < grid_f[i]:
        beta_opt, best = float(betas[i]), float(grid_f[i])
    return BosonCatFit(
        beta_opt=float(beta_opt),
        fidelity=float(best),
        low_quality=bool(grid_f.max() < LOW_QUALITY_FIDELITY),
    )


def lopt_limit(beta_opt: float) -> float:
    """Cat size in the thermodynamic limit: l_opt -> 2 beta_opt."""
    return 2.0 * beta_opt


def loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.unique(x).size < 2:
        raise ValueError("need at least two distinct sample points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs strictly positive samples")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def critical_scaling(n: int, g_over_gc_samples, omega: float = 1.0) -> float:
    """Fitted exponent of P(n) against 1 - g/g_c over the given samples.

    The window is the caller's choice; the slope approaches 1/4 only as the
    samples approach g_c (the P(n) ∝ (1 - g/g_c)^(1/4) law is asymptotic).
    """
    samples = np.asarray(list(g_over_gc_samples), dtype=float)
    if samples.size < 2 or np.unique(samples).size < 2:
        raise ValueError("need at least two distinct g/g_c samples")
    eps = 1.0 - samples
    probs = np.array([
        herald_boson_direct(gaussian_ground(omega, g), n)[1] for g in samples
    ])
    return loglog_slope(eps, probs)
