"""Sweep scheduling for the command-line harness.

A sweep is a declarative config (experiment kind plus parameter grids) that
expands into a deterministic list of grid points.  Points are solved
independently (optionally in a thread pool, with serialized access to the
ground-state cache), failures are isolated per point, and results are
written in grid order so identical configs yield identical CSV bytes.
"""

from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cache import FORMAT_VERSION, GroundStateCache
from .catfit import fit_cat
from .dicke import DickeParams, convergence_check, solve_ground
from .herald import HeraldOutcome, herald, reduced_spin_density
from .spin import SpinDensityMatrix
from .thermo import fit_boson_cat, gaussian_ground, herald_boson_direct, lopt_limit
from .wigner import figure_patch, spin_wigner

EXPERIMENTS = (
    "herald-scan", "g-sweep", "N-sweep", "omega-sweep", "thermo-sweep",
    "wigner", "convergence",
)

CSV_HEADER = "N,g_over_gc,omega_ratio,n,P_n,theta_opt,l_opt,fidelity"
CONVERGENCE_HEADER = "n_cutoff,l_opt,P_n,d_l_opt,d_P_n"

_FMT = "%.17g"


class ConfigError(ValueError):
    """Invalid sweep configuration."""


def _fmt(x) -> str:
    if x is None:
        return ""
    return _FMT % x


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    n_atoms: tuple[int, ...] = (30,)
    g_over_gc: tuple[float, ...] = (1.0,)
    photon_numbers: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    omega_ratio: tuple[float, ...] = (1.0,)
    n_cutoff: int = 50
    output_dir: str = "results"
    workers: int = 1
    emit_wigner: bool = False
    wigner_span: float = 0.7
    wigner_points: int = 201
    cutoffs: tuple[int, ...] = ()
    include_thermo_reference: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in raw:
            raise ConfigError("missing required key 'experiment'")
        kwargs = dict(raw)
        for key in ("n_atoms", "g_over_gc", "photon_numbers", "omega_ratio", "cutoffs"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        text = Path(path).read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}"
            ) from exc
        try:
            return cls.from_dict(raw)
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        for name in ("n_atoms", "g_over_gc", "photon_numbers", "omega_ratio"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"grid '{name}' must be non-empty")
        if any(n < 1 for n in self.n_atoms):
            raise ConfigError("n_atoms entries must be >= 1")
        if any(g < 0 for g in self.g_over_gc):
            raise ConfigError("g_over_gc entries must be >= 0")
        if any(r <= 0 for r in self.omega_ratio):
            raise ConfigError("omega_ratio entries must be > 0")
        if any(n < 0 or n > self.n_cutoff for n in self.photon_numbers):
            raise ConfigError(
                f"photon_numbers must lie in 0..n_cutoff={self.n_cutoff}"
            )
        if self.n_cutoff < 1:
            raise ConfigError("n_cutoff must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.experiment == "thermo-sweep" and any(
            g >= 1.0 for g in self.g_over_gc
        ):
            raise ConfigError("thermo-sweep requires g_over_gc < 1 (normal phase)")
        if self.experiment == "convergence":
            if len(self.cutoffs) < 2:
                raise ConfigError("convergence requires a 'cutoffs' list (>= 2 values)")
            if any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
                raise ConfigError("cutoffs must be strictly increasing")
            if len(self.photon_numbers) != 1:
                raise ConfigError("convergence uses a single photon number")

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            out[name] = list(val) if isinstance(val, tuple) else val
        return out


PRESETS: dict[str, dict] = {
    "fig2": {
        "experiment": "herald-scan",
        "n_atoms": [30], "g_over_gc": [1.0], "omega_ratio": [1.0],
        "photon_numbers": [1, 2, 3, 4, 5, 6], "n_cutoff": 50,
        "emit_wigner": True,
    },
    "fig3": {
        "experiment": "g-sweep",
        "n_atoms": [200], "g_over_gc": [0.5, 0.7, 0.9, 0.95, 0.99, 1.0],
        "omega_ratio": [1.0], "photon_numbers": [1, 2, 3, 4, 5, 6],
        "n_cutoff": 50,
    },
    "fig4": {
        "experiment": "N-sweep",
        "n_atoms": [50, 100, 200, 500, 1000], "g_over_gc": [1.0],
        "omega_ratio": [1.0], "photon_numbers": [1, 2, 3, 4, 5, 6],
        "n_cutoff": 50, "include_thermo_reference": True,
    },
    "fig6": {
        "experiment": "thermo-sweep",
        "n_atoms": [1], "omega_ratio": [1.0],
        "g_over_gc": [0.5, 0.7, 0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999],
        "photon_numbers": [1, 2, 3, 4, 5, 6], "n_cutoff": 50,
    },
    "fig7": {
        "experiment": "omega-sweep",
        "n_atoms": [200], "g_over_gc": [1.0],
        "omega_ratio": [0.2, 0.35, 0.6, 1.0, 1.7, 3.0, 5.0],
        "photon_numbers": [1, 2, 3, 4, 5, 6], "n_cutoff": 50,
    },
    "fig8": {
        "experiment": "convergence",
        "n_atoms": [200], "g_over_gc": [1.0], "omega_ratio": [1.0],
        "photon_numbers": [6], "n_cutoff": 80,
        "cutoffs": [30, 40, 50, 60, 70, 80],
    },
}


@dataclass
class PointResult:
    index: int
    label: str
    rows: list[str] = field(default_factory=list)
    wigner_files: dict[str, object] = field(default_factory=dict)
    error: str | None = None
    seconds: float = 0.0


@dataclass
class RunReport:
    exit_code: int
    output_dir: Path
    csv_path: Path | None
    manifest_path: Path
    failures: list[dict]


def _grid_points(cfg: SweepConfig) -> list[tuple[int, float, float]]:
    """Deterministic (N, omega_ratio, g_over_gc) grid ordering."""
    return [
        (N, ratio, g)
        for N in cfg.n_atoms
        for ratio in cfg.omega_ratio
        for g in cfg.g_over_gc
    ]


def _row(N, g_over_gc, omega_ratio, n, p_n, theta_opt, l_opt, fid) -> str:
    n_field = "inf" if N is None else str(N)
    return ",".join([
        n_field, _fmt(g_over_gc), _fmt(omega_ratio), str(n),
        _fmt(p_n), _fmt(theta_opt), _fmt(l_opt), _fmt(fid),
    ])


def _herald_point(cfg: SweepConfig, cache: GroundStateCache | None,
                  lock: threading.Lock, index: int,
                  point: tuple[int, float, float]) -> PointResult:
    N, ratio, g_rel = point
    result = PointResult(index, f"N={N} ratio={ratio} g/gc={g_rel}")
    start = time.perf_counter()
    try:
        params = DickeParams(
            omega_cav=1.0, omega_atom=ratio,
            g=g_rel * (ratio ** 0.5) / 2.0,
            n_atoms=N, n_cutoff=cfg.n_cutoff,
        )
        if cache is not None:
            with lock:
                gs = cache.get_or_solve(params)
        else:
            gs = solve_ground(params)
        outcomes: list[HeraldOutcome] = []
        for n in cfg.photon_numbers:
            out = herald(gs, n)
            parity = "even" if n % 2 == 0 else "odd"
            fit = fit_cat(out.state, parity)
            result.rows.append(_row(
                N, g_rel, ratio, n, out.probability,
                fit.theta_opt, fit.l_opt, fit.fidelity,
            ))
            outcomes.append(out)
        if cfg.emit_wigner or cfg.experiment == "wigner":
            spin = params.spin
            thetas, phis = figure_patch(
                spin, span=cfg.wigner_span, n_theta=cfg.wigner_points,
                n_phi=cfg.wigner_points,
            )
            rho = reduced_spin_density(gs)
            result.wigner_files[f"wigner_p{index}_rho.csv"] = spin_wigner(
                rho, thetas, phis
            )
            for out in outcomes:
                pure = SpinDensityMatrix.from_pure(out.state)
                result.wigner_files[f"wigner_p{index}_psi{out.n}.csv"] = spin_wigner(
                    pure, thetas, phis
                )
    except Exception as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.perf_counter() - start
    return result


def _thermo_rows(cfg: SweepConfig) -> list[PointResult]:
    results = []
    for index, g_rel in enumerate(cfg.g_over_gc):
        result = PointResult(index, f"thermo g/gc={g_rel}")
        start = time.perf_counter()
        try:
            gs = gaussian_ground(1.0, g_rel)
            for n in cfg.photon_numbers:
                state, prob = herald_boson_direct(gs, n)
                parity = "even" if n % 2 == 0 else "odd"
                fit = fit_boson_cat(state, parity)
                result.rows.append(_row(
                    None, g_rel, 1.0, n, prob,
                    None, lopt_limit(fit.beta_opt), fit.fidelity,
                ))
        except Exception as exc:
            result.error = f"{type(exc).__name__}: {exc}"
        result.seconds = time.perf_counter() - start
        results.append(result)
    return results


def _convergence_rows(cfg: SweepConfig) -> tuple[list[str], PointResult]:
    n = cfg.photon_numbers[0]
    N = cfg.n_atoms[0]
    ratio = cfg.omega_ratio[0]
    g_rel = cfg.g_over_gc[0]
    result = PointResult(0, f"convergence N={N} g/gc={g_rel} n={n}")
    start = time.perf_counter()
    rows: list[str] = []
    try:
        params = DickeParams(1.0, ratio, g_rel * (ratio ** 0.5) / 2.0, N, cfg.n_cutoff)

        def eval_lopt(gs):
            out = herald(gs, n)
            parity = "even" if n % 2 == 0 else "odd"
            return fit_cat(out.state, parity).l_opt

        def eval_pn(gs):
            return herald(gs, n).probability

        table = convergence_check(
            params, {"l_opt": eval_lopt, "P_n": eval_pn}, cfg.cutoffs
        )
        for entry in table:
            rows.append(",".join([
                str(entry["n_cutoff"]), _fmt(entry["l_opt"]), _fmt(entry["P_n"]),
                _fmt(entry["d_l_opt"]), _fmt(entry["d_P_n"]),
            ]))
    except Exception as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.perf_counter() - start
    return rows, result


def run_sweep(cfg: SweepConfig, output_dir: Path | str | None = None,
              cache: GroundStateCache | None = None) -> RunReport:
    """Execute a sweep and write results.csv, wigner CSVs, and manifest.json.

    Exit code: 0 success, 2 partial per-point failures, 3 all points failed.
    """
    out = Path(output_dir) if output_dir is not None else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    lock = threading.Lock()

    results: list[PointResult]
    convergence_rows: list[str] = []
    if cfg.experiment == "thermo-sweep":
        results = _thermo_rows(cfg)
    elif cfg.experiment == "convergence":
        convergence_rows, res = _convergence_rows(cfg)
        results = [res]
    else:
        points = _grid_points(cfg)
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [
                    pool.submit(_herald_point, cfg, cache, lock, i, pt)
                    for i, pt in enumerate(points)
                ]
                results = [f.result() for f in futures]
        else:
            results = [
                _herald_point(cfg, cache, lock, i, pt)
                for i, pt in enumerate(points)
            ]
        results.sort(key=lambda r: r.index)
        if cfg.include_thermo_reference:
            ref = PointResult(len(results), "thermo reference")
            try:
                gs_inf = gaussian_ground(1.0, 1.0 - 1e-10)
                for n in cfg.photon_numbers:
                    state, prob = herald_boson_direct(gs_inf, n)
                    parity = "even" if n % 2 == 0 else "odd"
                    fit = fit_boson_cat(state, parity)
                    ref.rows.append(_row(
                        None, 1.0, 1.0, n, prob, None,
                        lopt_limit(fit.beta_opt), fit.fidelity,
                    ))
            except Exception as exc:
                ref.error = f"{type(exc).__name__}: {exc}"
            results.append(ref)

    csv_path: Path | None = None
    if cfg.experiment == "convergence":
        csv_path = out / "convergence.csv"
        csv_path.write_text(
            "\n".join([CONVERGENCE_HEADER] + convergence_rows) + "\n"
        )
    else:
        csv_path = out / "results.csv"
        lines = [CSV_HEADER]
        for res in results:
            lines.extend(res.rows)
        csv_path.write_text("\n".join(lines) + "\n")

    for res in results:
        for name, grid in res.wigner_files.items():
            grid.to_csv(out / name)

    failures = [
        {"point": res.label, "error": res.error}
        for res in results if res.error is not None
    ]
    manifest = {
        "config": cfg.to_dict(),
        "spincat_version": __version__,
        "format_version": FORMAT_VERSION,
        "n_points": len(results),
        "n_failures": len(failures),
        "failures": failures,
        "cache": {
            "hits": cache.hits if cache else 0,
            "solves": cache.solves if cache else 0,
        },
        "timings": {
            "total_s": time.perf_counter() - started,
            "points": [
                {"point": res.label, "seconds": res.seconds} for res in results
            ],
        },
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")

    if failures and len(failures) == len(results):
        code = 3
    elif failures:
        code = 2
    else:
        code = 0
    return RunReport(code, out, csv_path, manifest_path, failures)
