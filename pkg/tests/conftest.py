import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from spincat import DickeParams, solve_ground  # noqa: E402


@lru_cache(maxsize=None)
def ground(n_atoms: int, g_over_gc: float, omega_ratio: float = 1.0,
           n_cutoff: int = 50):
    """Session-wide memoized ground-state solves (shared across test modules)."""
    g = g_over_gc * (omega_ratio ** 0.5) / 2.0
    return solve_ground(DickeParams(1.0, omega_ratio, g, n_atoms, n_cutoff))


@pytest.fixture(scope="session")
def gs30_critical():
    """N = 30, g = g_c, n_cutoff = 50 (the herald-scan working point)."""
    return ground(30, 1.0)


@pytest.fixture(scope="session")
def solve_cached():
    return ground
