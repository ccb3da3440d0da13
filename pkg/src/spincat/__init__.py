"""Heralded collective spin cat states near the Dicke critical point.

Exact ground states of the parity-resolved Dicke model, photon-number
heralding, spin Wigner functions, cat-state fits, and the analytic
Holstein-Primakoff thermodynamic limit, plus a sweep CLI that emits the
data behind each figure-style experiment.
"""

__version__ = "0.1.0"

from .catfit import CatFit, ParityMismatchError, fidelity_curve, fit_cat
from .dicke import (BasisSizeError, DickeBasis, DickeParams, GroundState,
                    SolverConvergenceError, SparseHamiltonian, build_basis,
                    build_hamiltonian, convergence_check, dense_ground_state,
                    ground_state, solve_ground)
from .herald import (DegenerateOutcomeError, HeraldOutcome, herald,
                     photon_distribution, reduced_spin_density)
from .spin import (CollectiveSpin, DegenerateCatError, SpinDensityMatrix,
                   SpinVector, cat_state, clebsch_gordan, coherent_spin_state,
                   css_overlap, fidelity)
from .thermo import (BosonCatFit, BosonicState, FockTailError,
                     GaussianGroundState, TwoModeFockState, boson_cat_state,
                     critical_scaling, expand_ground_fock, fit_boson_cat,
                     gaussian_ground, herald_boson, herald_boson_direct,
                     loglog_slope, lopt_limit, photon_distribution_limit,
                     subtracted_squeezed)
from .wigner import (WignerGrid, figure_patch, multipoles, sphere_integral,
                     sphere_quadrature, spin_wigner, wigner_at_pole)

__all__ = [
    "__version__",
    "BasisSizeError", "BosonCatFit", "BosonicState", "CatFit",
    "CollectiveSpin", "DegenerateCatError", "DegenerateOutcomeError",
    "DickeBasis", "DickeParams", "FockTailError", "GaussianGroundState",
    "GroundState", "HeraldOutcome", "ParityMismatchError",
    "SolverConvergenceError", "SparseHamiltonian", "SpinDensityMatrix",
    "SpinVector", "TwoModeFockState", "WignerGrid",
    "boson_cat_state", "build_basis", "build_hamiltonian", "cat_state",
    "clebsch_gordan", "coherent_spin_state", "convergence_check",
    "critical_scaling", "css_overlap", "dense_ground_state",
    "expand_ground_fock", "fidelity", "fidelity_curve", "figure_patch",
    "fit_boson_cat", "fit_cat", "gaussian_ground", "ground_state", "herald",
    "herald_boson", "herald_boson_direct", "loglog_slope", "lopt_limit",
    "multipoles", "photon_distribution", "photon_distribution_limit",
    "reduced_spin_density", "solve_ground", "sphere_integral",
    "sphere_quadrature", "spin_wigner", "subtracted_squeezed",
    "wigner_at_pole",
]
