"""Angular-momentum algebra for a single collective spin J = N/2.

Provides coherent spin states, spin cat states, their overlaps, fidelities,
and Clebsch-Gordan coefficients.  Amplitude arrays are indexed by k = J + m,
so index 0 is |J,-J> (all atoms down) and index N is |J,+J>.

Conventions: the rotation R(theta, phi) = exp(-i theta sin(phi) Jx
+ i theta cos(phi) Jy), so that phi = 0 coherent-state amplitudes are real
and non-negative.  Clebsch-Gordan coefficients follow Condon-Shortley.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln


class DegenerateCatError(ValueError):
    """Requested cat state has zero norm (theta = 0 with odd parity)."""


def _check_parity(parity: str) -> str:
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return parity


@dataclass(frozen=True)
class CollectiveSpin:
    """Collective spin of N two-level atoms, fixed to the J = N/2 sector."""

    n_atoms: int

    def __post_init__(self):
        if not isinstance(self.n_atoms, (int, np.integer)) or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms}")

    @property
    def j(self) -> float:
        return self.n_atoms / 2

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers m = -J ... +J in index order."""
        return np.arange(self.dim) - self.j


@dataclass(frozen=True)
class SpinVector:
    """Pure state on the (N+1)-dimensional collective-spin space."""

    spin: CollectiveSpin
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.spin.dim,):
            raise ValueError(
                f"amplitudes must have shape ({self.spin.dim},), got {amp.shape}"
            )
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def parity_masses(self) -> tuple[float, float]:
        """Probability mass on even and odd k = J + m components."""
        p = np.abs(self.amplitudes) ** 2
        return float(p[0::2].sum()), float(p[1::2].sum())

    def support_parity(self) -> str:
        even, odd = self.parity_masses()
        return "even" if even >= odd else "odd"


@dataclass(frozen=True)
class SpinDensityMatrix:
    """Density matrix rho_{mm'} on the collective-spin space.

    Validated on construction: Hermitian within 1e-12, unit trace within
    1e-12, eigenvalues >= -1e-10.
    """

    spin: CollectiveSpin
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        d = self.spin.dim
        if rho.shape != (d, d):
            raise ValueError(f"matrix must have shape ({d}, {d}), got {rho.shape}")
        herm = np.abs(rho - rho.conj().T).max()
        if herm > 1e-12:
            raise ValueError(f"matrix not Hermitian: max asymmetry {herm:.3e}")
        tr = rho.trace().real
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace must be 1, got {tr!r}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_pure(cls, psi: SpinVector) -> "SpinDensityMatrix":
        a = psi.amplitudes / psi.norm
        return cls(psi.spin, np.outer(a, a.conj()))


def _log_binomial(n: int, k: np.ndarray) -> np.ndarray:
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def coherent_spin_state(spin: CollectiveSpin, theta: float, phi: float = 0.0) -> SpinVector:
    """Coherent spin state R(theta, phi)|J,-J>.

    Amplitude of |J,m> (index k = J + m) is
    exp(-i k phi) * sqrt(C(N, k)) * cos(theta/2)^(N-k) * sin(theta/2)^k,
    real and non-negative for phi = 0.  Stable in log space up to N of
    several thousand.

    Parameters
    ----------
    spin : CollectiveSpin
    theta : float
        Polar angle, 0 <= theta <= pi.
    phi : float
        Azimuthal angle.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    N = spin.n_atoms
    k = np.arange(N + 1)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    amp = np.zeros(N + 1)
    if s == 0.0:
        amp[0] = 1.0
    elif c == 0.0:
        amp[N] = 1.0
    else:
        amp = np.exp(0.5 * _log_binomial(N, k) + (N - k) * math.log(c) + k * math.log(s))
    return SpinVector(spin, amp * np.exp(-1j * k * phi))


def css_overlap(spin: CollectiveSpin, theta1: float, theta2: float) -> complex:
    """Overlap <theta1,0|theta2,0> = cos^(2J)((theta1 - theta2)/2)."""
    for t in (theta1, theta2):
        if not 0.0 <= abs(t) <= np.pi:
            raise ValueError(f"angles must lie in [-pi, pi], got {t}")
    return complex(math.cos((theta1 - theta2) / 2) ** spin.n_atoms)


def cat_state(spin: CollectiveSpin, theta: float, parity: str) -> SpinVector:
    """Spin cat state (|+theta,0> +/- |-theta,0>) / sqrt(2 (1 +/- cos^2J theta)).

    The even (odd) cat occupies only even (odd) k = J + m.  theta is capped
    at pi/2; beyond that the two components pass each other.

    Raises
    ------
    DegenerateCatError
        For theta = 0 with odd parity (zero vector).
    """
    _check_parity(parity)
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    even = parity == "even"
    if theta == 0.0 and not even:
        raise DegenerateCatError("odd cat state degenerates to zero at theta = 0")
    a = coherent_spin_state(spin, theta).amplitudes.real
    k = np.arange(spin.dim)
    # |-theta,0> has amplitudes (-1)^k times those of |+theta,0>
    sgn = 1.0 if even else -1.0
    amp = a + sgn * ((-1.0) ** k) * a
    # 1 - cos^N(theta) cancels catastrophically at small theta; go through
    # log1p(-2 sin^2(theta/2)) so tiny odd cats stay accurate
    log_overlap = spin.n_atoms * math.log1p(-2.0 * math.sin(theta / 2) ** 2)
    if even:
        norm_sq = 2.0 * (1.0 + math.exp(log_overlap))
    else:
        norm_sq = 2.0 * (-math.expm1(log_overlap))
    amp /= math.sqrt(norm_sq)
    return SpinVector(spin, amp)


def fidelity(a: SpinVector, b: SpinVector) -> float:
    """|<a|b>|^2 between two pure spin states."""
    if a.spin != b.spin:
        raise ValueError(
            f"dimension mismatch: N = {a.spin.n_atoms} vs {b.spin.n_atoms}"
        )
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients
# ---------------------------------------------------------------------------

def _is_half_integer(x) -> bool:
    return abs(2 * x - round(2 * x)) < 1e-9


_FACTORIALS = [1]


def _factorial_int(n: int) -> int:
    while len(_FACTORIALS) <= n:
        _FACTORIALS.append(_FACTORIALS[-1] * len(_FACTORIALS))
    return _FACTORIALS[n]


def _cg_exact(j1, m1, j2, m2, j3, m3, smin: int, smax: int) -> float:
    """Racah sum in exact integer arithmetic; used when the float log-space
    sum loses too many digits to cancellation."""

    def f(x):
        return _factorial_int(int(round(x)))

    pre = Fraction(int(round(2 * j3 + 1))) * Fraction(
        f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3), f(j1 + j2 + j3 + 1)
    )
    pre *= f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) * f(j3 + m3) * f(j3 - m3)
    total = Fraction(0)
    for s in range(smin, smax + 1):
        den = (
            f(s) * f(j1 + j2 - j3 - s) * f(j1 - m1 - s) * f(j2 + m2 - s)
            * f(j3 - j2 + m1 + s) * f(j3 - j1 - m2 + s)
        )
        total += Fraction((-1) ** s, den)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * math.sqrt(float(total * total * pre))


def clebsch_gordan(j1, m1, j2, m2, j3, m3) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | j3 m3>, Condon-Shortley.

    Evaluated from the Racah formula in log-factorial arithmetic.  When the
    alternating sum cancels to less than ~1e-2 of its largest term, the sum
    is recomputed in exact integer arithmetic, which keeps the result
    accurate up to 2J of at least 500.

    Selection-rule violations (m3 != m1 + m2, triangle failure) return 0.
    Structurally invalid quantum numbers raise ValueError.
    """
    for j, m in ((j1, m1), (j2, m2), (j3, m3)):
        if not (_is_half_integer(j) and _is_half_integer(m)):
            raise ValueError(f"quantum numbers must be half-integers: j={j}, m={m}")
        if j < 0 or abs(m) > j + 1e-9:
            raise ValueError(f"invalid quantum numbers: j={j}, m={m}")
        if abs((j + m) - round(j + m)) > 1e-9:
            raise ValueError(f"j + m must be an integer: j={j}, m={m}")
    if abs(m3 - (m1 + m2)) > 1e-9:
        return 0.0
    if not (abs(j1 - j2) - 1e-9 <= j3 <= j1 + j2 + 1e-9):
        return 0.0
    if abs((j1 + j2 + j3) - round(j1 + j2 + j3)) > 1e-9:
        return 0.0

    def lf(x):
        return gammaln(x + 1.0)

    lpre = 0.5 * (
        math.log(2 * j3 + 1)
        + lf(j1 + j2 - j3) + lf(j1 - j2 + j3) + lf(-j1 + j2 + j3) - lf(j1 + j2 + j3 + 1)
        + lf(j1 + m1) + lf(j1 - m1) + lf(j2 + m2) + lf(j2 - m2)
        + lf(j3 + m3) + lf(j3 - m3)
    )
    smin = int(round(max(0, j2 - j3 - m1, j1 - j3 + m2)))
    smax = int(round(min(j1 + j2 - j3, j1 - m1, j2 + m2)))
    if smax < smin:
        return 0.0
    s = np.arange(smin, smax + 1)
    logs = -(
        lf(s) + lf(j1 + j2 - j3 - s) + lf(j1 - m1 - s) + lf(j2 + m2 - s)
        + lf(j3 - j2 + m1 + s) + lf(j3 - j1 - m2 + s)
    )
    peak = logs.max()
    total = float(np.sum((-1.0) ** s * np.exp(logs - peak)))
    if abs(total) < 1e-2:
        # heavy cancellation: the float sum has lost too many digits
        return _cg_exact(j1, m1, j2, m2, j3, m3, smin, smax)
    return float(np.exp(lpre + peak) * total)


def _cg_kernel_table(n_atoms: int, k: int) -> np.ndarray:
    """Table of <J,m'; k,q | J,m> over (index of m', index of m), q = m - m'.

    Vectorized log-space Racah evaluation used by the Wigner multipole sums.
    Accurate to ~1e-12 absolute for N <= 40; degrades gracefully for large N.
    """
    J = n_atoms / 2
    m = np.arange(n_atoms + 1) - J
    M1 = m[:, None]       # m'
    M3 = m[None, :]       # m
    M2 = M3 - M1          # q
    j1, j2, j3 = J, float(k), J
    valid = np.abs(M2) <= j2 + 1e-9

    def lf(x):
        return gammaln(np.maximum(x, 0.0) + 1.0)

    lpre = 0.5 * (
        np.log(2 * j3 + 1)
        + lf(j1 + j2 - j3) + lf(j1 - j2 + j3) + lf(-j1 + j2 + j3) - lf(j1 + j2 + j3 + 1)
        + lf(j1 + M1) + lf(j1 - M1)
        + np.where(valid, lf(j2 + M2) + lf(j2 - M2), 0.0)
        + lf(j3 + M3) + lf(j3 - M3)
    )
    smin = np.maximum(0, np.maximum(j2 - j3 - M1, j1 - j3 + M2)).astype(int)
    smax = np.floor(np.minimum(j1 + j2 - j3, np.minimum(j1 - M1, j2 + M2)) + 0.5).astype(int)
    has_terms = valid & (smax >= smin)

    def log_term(s):
        return -(
            lf(s) + lf(j1 + j2 - j3 - s) + lf(j1 - M1 - s) + lf(j2 + M2 - s)
            + lf(j3 - j2 + M1 + s) + lf(j3 - j1 - M2 + s)
        )

    n_s = int(smax.max(initial=0))
    peak = np.full(lpre.shape, -np.inf)
    for s in range(n_s + 1):
        ok = has_terms & (s >= smin) & (s <= smax)
        peak = np.where(ok, np.maximum(peak, log_term(s)), peak)
    acc = np.zeros(lpre.shape)
    for s in range(n_s + 1):
        ok = has_terms & (s >= smin) & (s <= smax)
        with np.errstate(invalid="ignore"):
            acc += np.where(ok, (-1.0) ** s * np.exp(log_term(s) - peak), 0.0)
    with np.errstate(invalid="ignore"):
        out = np.where(has_terms, np.exp(lpre + peak) * acc, 0.0)
    return out
