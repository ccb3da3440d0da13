"""Content-addressed ground-state cache.

Solved ground states are stored as versioned .npz artifacts keyed by a hash
of (N, g/g_c, frequency ratio, n_cutoff, parity, solver settings, format
version).  A cache hit returns a bit-identical state; corrupt entries are
treated as misses with a warning.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dicke import (DickeParams, GroundState, LANCZOS_MAX_ITER, build_basis,
                    solve_ground)

log = logging.getLogger(__name__)

FORMAT_VERSION = 1

ENV_CACHE_DIR = "SPINCAT_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "spincat"


def cache_key(params: DickeParams, parity: str,
              format_version: int = FORMAT_VERSION) -> str:
    payload = {
        "format": format_version,
        "n_atoms": params.n_atoms,
        "n_cutoff": params.n_cutoff,
        "g_over_gc": repr(params.g / params.g_c),
        "omega_ratio": repr(params.omega_atom / params.omega_cav),
        "parity": parity,
        "solver": {"kind": "lanczos-irl", "max_iter": LANCZOS_MAX_ITER},
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:24]


def save_ground_state(path: Path, gs: GroundState) -> None:
    p = gs.basis.params
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        path,
        format_version=FORMAT_VERSION,
        omega_cav=p.omega_cav,
        omega_atom=p.omega_atom,
        g=p.g,
        n_atoms=p.n_atoms,
        n_cutoff=p.n_cutoff,
        parity=gs.basis.parity,
        energy=gs.energy,
        residual=gs.residual,
        amplitudes=gs.amplitudes,
    )


def load_ground_state(path: Path) -> GroundState:
    with np.load(path, allow_pickle=False) as data:
        if int(data["format_version"]) != FORMAT_VERSION:
            raise ValueError(
                f"format version {int(data['format_version'])} != {FORMAT_VERSION}"
            )
        params = DickeParams(
            omega_cav=float(data["omega_cav"]),
            omega_atom=float(data["omega_atom"]),
            g=float(data["g"]),
            n_atoms=int(data["n_atoms"]),
            n_cutoff=int(data["n_cutoff"]),
        )
        basis = build_basis(params, str(data["parity"]))
        return GroundState(
            basis=basis,
            amplitudes=np.asarray(data["amplitudes"], dtype=float),
            energy=float(data["energy"]),
            residual=float(data["residual"]),
        )


@dataclass
class GroundStateCache:
    """Directory-backed cache with hit/solve statistics."""

    directory: Path = field(default_factory=default_cache_dir)
    hits: int = 0
    solves: int = 0

    def _path(self, key: str) -> Path:
        return Path(self.directory) / f"groundstate_{key}.npz"

    def lookup(self, params: DickeParams, parity: str = "even") -> GroundState | None:
        path = self._path(cache_key(params, parity))
        if not path.exists():
            return None
        try:
            gs = load_ground_state(path)
        except Exception as exc:  # corrupt entry: miss with warning
            log.warning("discarding corrupt cache entry %s (%s)", path, exc)
            try:
                path.unlink()
            except OSError:
                pass
            return None
        self.hits += 1
        return gs

    def get_or_solve(self, params: DickeParams, parity: str = "even") -> GroundState:
        gs = self.lookup(params, parity)
        if gs is not None:
            return gs
        gs = solve_ground(params, parity)
        self.solves += 1
        save_ground_state(self._path(cache_key(params, parity)), gs)
        return gs

    def entries(self) -> list[Path]:
        d = Path(self.directory)
        if not d.exists():
            return []
        return sorted(d.glob("groundstate_*.npz"))

    def clear(self) -> int:
        removed = 0
        for path in self.entries():
            path.unlink()
            removed += 1
        return removed
