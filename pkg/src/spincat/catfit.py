"""Fit heralded spin states to ideal spin cat states.

The fit maximizes F(theta) = |<cat(theta)|psi>|^2 over theta in (0, pi/2]:
a coarse grid scan guards against secondary maxima, golden-section search
refines the peak below 1e-8, and a fixed-step parabolic polish makes the
located optimum insensitive to sub-1e-12 perturbations of F (so quantities
like l_opt are stable against photon-cutoff changes at the 1e-8 level).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .spin import CollectiveSpin, SpinVector, cat_state

COARSE_GRID_POINTS = 400
REFINE_TOL = 1e-8
LOW_QUALITY_FIDELITY = 0.5
_GOLDEN = (math.sqrt(5) - 1) / 2


class ParityMismatchError(ValueError):
    """State support parity does not match the requested cat parity."""


@dataclass(frozen=True)
class CatFit:
    theta_opt: float
    fidelity: float
    l_opt: float
    parity: str
    low_quality: bool = False


def golden_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = REFINE_TOL) -> tuple[float, float]:
    """Golden-section maximum of a unimodal f on [lo, hi], then a parabolic
    polish with a fixed step so the result does not depend on which golden
    branch tiny evaluation noise selected."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # quadratic vertex through (x-w, x, x+w); step well above noise scale
    w = max(1e-4 * max(abs(x), 1.0), 64 * tol)
    fm, fp = f(x - w), f(x + w)
    denom = fm - 2.0 * fx + fp
    if denom < 0.0:
        shift = 0.5 * w * (fm - fp) / denom
        if abs(shift) < w:
            xq = x + shift
            fq = f(xq)
            if fq >= fx:
                return xq, fq
    return x, fx


def _require_parity_match(psi: SpinVector, parity: str) -> None:
    even_mass, odd_mass = psi.parity_masses()
    match = even_mass if parity == "even" else odd_mass
    if match < 0.5:
        raise ParityMismatchError(
            f"state carries {match:.3f} probability on the {parity} sector; "
            "requested cat parity does not match its support"
        )


def _cat_amplitude_rows(spin: CollectiveSpin, thetas: np.ndarray, parity: str) -> np.ndarray:
    """Real cat amplitudes for many thetas at once, rows indexed by theta."""
    N = spin.n_atoms
    k = np.arange(N + 1)
    lnbin = 0.5 * (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1))
    th = thetas[:, None]
    with np.errstate(divide="ignore"):
        logc = np.log(np.maximum(np.cos(th / 2), 1e-300))
        logs = np.log(np.maximum(np.sin(th / 2), 1e-300))
    amps = np.exp(lnbin[None, :] + (N - k)[None, :] * logc + k[None, :] * logs)
    keep = (k % 2 == 0) if parity == "even" else (k % 2 == 1)
    amps = np.where(keep[None, :], 2.0 * amps, 0.0)
    log_overlap = N * np.log1p(-2.0 * np.sin(th[:, 0] / 2) ** 2)
    if parity == "even":
        norm_sq = 2.0 * (1.0 + np.exp(log_overlap))
    else:
        norm_sq = 2.0 * (-np.expm1(log_overlap))
    return amps / np.sqrt(norm_sq)[:, None]


def fidelity_curve(psi: SpinVector, parity: str, thetas) -> np.ndarray:
    """Pointwise F(theta) = |<cat(theta)|psi>|^2.

    theta = 0 with odd parity is handled as the limit state |J,-J+1>
    (the cat normalization guard would otherwise divide zero by zero).
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    _require_parity_match(psi, parity)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.size and (thetas.min() < 0 or thetas.max() > np.pi / 2):
        raise ValueError("thetas must lie in [0, pi/2]")
    zero = thetas == 0.0
    rows = _cat_amplitude_rows(psi.spin, np.where(zero, 1.0, thetas), parity)
    if np.any(zero):
        limit = np.zeros(psi.spin.dim)
        limit[1 if parity == "odd" else 0] = 1.0
        rows[zero] = limit
    overlaps = rows @ psi.amplitudes
    return np.abs(overlaps) ** 2


def fit_cat(psi: SpinVector, parity: str) -> CatFit:
    """Best-fit cat angle, fidelity, and normalized size l_opt = sqrt(N) * theta_opt.

    Fits below 0.5 fidelity everywhere on the coarse grid are returned
    flagged low_quality rather than raising.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    _require_parity_match(psi, parity)
    spin = psi.spin
    thetas = np.linspace(np.pi / 2 / COARSE_GRID_POINTS, np.pi / 2, COARSE_GRID_POINTS)
    grid_f = fidelity_curve(psi, parity, thetas)
    i = int(np.argmax(grid_f))
    lo = thetas[max(i - 1, 0)]
    hi = thetas[min(i + 1, thetas.size - 1)]
    amp = psi.amplitudes

    def f(theta: float) -> float:
        row = _cat_amplitude_rows(spin, np.array([theta]), parity)[0]
        return float(abs(np.dot(row, amp.conj())) ** 2)

    theta_opt, best = golden_max(f, lo, hi)
    if best < grid_f[i]:
        theta_opt, best = thetas[i], float(grid_f[i])
    theta_opt = min(max(theta_opt, 0.0), np.pi / 2)
    return CatFit(
        theta_opt=float(theta_opt),
        fidelity=float(best),
        l_opt=float(math.sqrt(spin.n_atoms) * theta_opt),
        parity=parity,
        low_quality=bool(grid_f.max() < LOW_QUALITY_FIDELITY),
    )
