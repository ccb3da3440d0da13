"""Spin Wigner function on the sphere.

W(theta, phi) = sqrt((2J+1)/4pi) sum_{k=0}^{2J} sum_{q=-k}^{k} t_kq Y_kq,
with multipole moments t_kq built from the density matrix and Clebsch-Gordan
coefficients.  Spherical harmonics use the Condon-Shortley convention with
theta measured from the +z axis, so |J,-J> peaks at theta = pi.  (A global
change of harmonic convention leaves W invariant: t_kq and Y_kq transform
oppositely.)

Evaluation precomputes t_kq once per density matrix and then sums over the
grid with a stable normalized associated-Legendre recursion, O((2J)^2 * grid)
overall.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .spin import CollectiveSpin, SpinDensityMatrix, _cg_kernel_table

_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class WignerGrid:
    """W(theta, phi) sampled on a rectangular angle grid (row-major theta)."""

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        ph = np.asarray(self.phis, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (th.size, ph.size):
            raise ValueError(f"values shape {v.shape} != ({th.size}, {ph.size})")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "phis", ph)
        object.__setattr__(self, "values", v)

    def to_csv(self, path_or_buf) -> None:
        """Write the grid as CSV: header row of phi values, first column of
        theta values, W values row-major in theta, >= 15 significant digits."""
        close = False
        if isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__"):
            fh = open(path_or_buf, "w", newline="")
            close = True
        else:
            fh = path_or_buf
        try:
            fh.write("theta\\phi," + ",".join(_FLOAT_FMT % p for p in self.phis) + "\n")
            for i, th in enumerate(self.thetas):
                row = ",".join(_FLOAT_FMT % v for v in self.values[i])
                fh.write((_FLOAT_FMT % th) + "," + row + "\n")
        finally:
            if close:
                fh.close()

    @classmethod
    def from_csv(cls, path_or_buf) -> "WignerGrid":
        if isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__"):
            with open(path_or_buf) as fh:
                text = fh.read()
        else:
            text = path_or_buf.read()
        lines = [ln for ln in io.StringIO(text).read().splitlines() if ln.strip()]
        phis = np.array([float(x) for x in lines[0].split(",")[1:]])
        thetas, rows = [], []
        for ln in lines[1:]:
            cells = ln.split(",")
            thetas.append(float(cells[0]))
            rows.append([float(x) for x in cells[1:]])
        return cls(np.array(thetas), phis, np.array(rows))


def _legendre_normalized(kmax: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre functions Pbar[k, q, i] such that
    Y_kq(theta, phi) = Pbar[k, q](cos theta) * exp(i q phi) for q >= 0.

    Includes the Condon-Shortley phase.  The standard three-term recursion
    keeps every value O(sqrt(k)), stable for k in the thousands.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    sx = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    P = np.zeros((kmax + 1, kmax + 1, x.size))
    P[0, 0] = np.sqrt(1.0 / (4 * np.pi))
    for q in range(1, kmax + 1):
        P[q, q] = -np.sqrt((2 * q + 1.0) / (2 * q)) * sx * P[q - 1, q - 1]
    for q in range(kmax + 1):
        if q + 1 <= kmax:
            P[q + 1, q] = x * np.sqrt(2 * q + 3.0) * P[q, q]
        for k in range(q + 2, kmax + 1):
            a = np.sqrt((4.0 * k * k - 1.0) / (k * k - q * q))
            b = np.sqrt(((k - 1.0) ** 2 - q * q) / (4.0 * (k - 1.0) ** 2 - 1.0))
            P[k, q] = a * (x * P[k - 1, q] - b * P[k - 2, q])
    return P


# small-N kernel tables are cheap to keep around; larger ones are rebuilt
_KERNEL_CACHE: dict[int, list[np.ndarray]] = {}
_KERNEL_CACHE_MAX_N = 64


def _kernel_tables(n_atoms: int) -> list[np.ndarray]:
    if n_atoms in _KERNEL_CACHE:
        return _KERNEL_CACHE[n_atoms]
    tables = [_cg_kernel_table(n_atoms, k) for k in range(n_atoms + 1)]
    if n_atoms <= _KERNEL_CACHE_MAX_N:
        _KERNEL_CACHE[n_atoms] = tables
    return tables


def multipoles(rho: SpinDensityMatrix) -> np.ndarray:
    """Multipole moments t[k, q + k] = sum_{mm'} rho_mm' sqrt((2k+1)/(2J+1))
    <J,m'; k,q | J,m>, for k = 0..2J and |q| <= k."""
    N = rho.spin.n_atoms
    mat = rho.matrix
    t = np.zeros((N + 1, 2 * N + 1), dtype=complex)
    for k, tab in enumerate(_kernel_tables(N)):
        pref = np.sqrt((2 * k + 1.0) / (N + 1.0))
        for q in range(-k, k + 1):
            # sum over m of rho[m, m-q] * <J,m-q; k,q|J,m>; q = m - m'
            s = np.sum(np.diagonal(mat, -q) * np.diagonal(tab, q))
            t[k, q + k] = pref * s
    return t


def spin_wigner(rho: SpinDensityMatrix, thetas, phis) -> WignerGrid:
    """Evaluate the spin Wigner function of rho on a (theta, phi) grid.

    The result is verified to be real within 1e-10 before the imaginary
    part is discarded.  Normalized so the integral of W sin(theta) over the
    full sphere equals 1.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    N = rho.spin.n_atoms
    t = multipoles(rho)
    P = _legendre_normalized(N, np.cos(thetas))  # [k, q, n_theta]
    # c[q, n_theta] = sum_k t_kq Pbar_k^q(theta), then sum over q phases
    qs = np.arange(N + 1)
    c = np.zeros((N + 1, thetas.size), dtype=complex)
    for q in qs:
        ks = np.arange(q, N + 1)
        tk = t[ks, q + ks]  # t[k, q+k] for k >= q
        c[q] = np.tensordot(tk, P[q:, q, :], axes=(0, 0))
    phase = np.exp(1j * np.outer(qs, phis))  # [q, n_phi]
    # t_{k,-q} Y_{k,-q} = conj(t_kq Y_kq) for Hermitian rho, so the q < 0
    # half of the sum is the conjugate of the q > 0 half.
    vals = c[0][:, None] * phase[0][None, :]
    if N >= 1:
        pos = np.einsum("qt,qp->tp", c[1:], phase[1:])
        vals = vals + pos + pos.conj()
    w = np.sqrt((N + 1.0) / (4 * np.pi)) * vals
    imag_max = np.abs(w.imag).max() if w.size else 0.0
    if imag_max > 1e-10:
        raise ArithmeticError(
            f"Wigner values acquired imaginary part {imag_max:.3e} > 1e-10"
        )
    return WignerGrid(thetas, phis, w.real)


def wigner_at_pole(rho: SpinDensityMatrix) -> float:
    """W(theta=0), where only q = 0 harmonics contribute."""
    return float(spin_wigner(rho, np.array([0.0]), np.array([0.0])).values[0, 0])


def figure_patch(spin: CollectiveSpin, span: float = 0.7,
                 n_theta: int = 201, n_phi: int = 201) -> tuple[np.ndarray, np.ndarray]:
    """Default plotting patch around the collective ground-state direction.

    The unexcited state |J,-J> sits at theta = pi in this convention, so the
    patch covers theta in [pi - span, pi] with the full azimuth range.  The
    default span covers the interference region of the heralded cat states;
    widen it to display the full coherent components of large cats.
    """
    thetas = np.linspace(np.pi - span, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi)
    return thetas, phis


def sphere_quadrature(n_theta: int = 128, n_phi: int = 128):
    """Gauss-Legendre nodes/weights in theta on [0, pi] and a uniform
    periodic phi grid with trapezoid weight, for integrating W sin(theta)."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    thetas = (x + 1.0) * (np.pi / 2)
    theta_weights = w * (np.pi / 2)
    phis = np.arange(n_phi) * (2 * np.pi / n_phi)
    phi_weight = 2 * np.pi / n_phi
    return thetas, theta_weights, phis, phi_weight


def sphere_integral(grid: WignerGrid, theta_weights: np.ndarray, phi_weight: float) -> float:
    """Integral of W sin(theta) over the grid with the supplied weights."""
    return float(
        np.sum(theta_weights[:, None] * np.sin(grid.thetas)[:, None]
               * grid.values * phi_weight)
    )
