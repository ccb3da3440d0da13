"""Render matplotlib figures from emitted sweep and Wigner CSVs.

The data files are the deliverable; these figures are a convenience layer
that reads them back and writes PNGs next to them (under figures/).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .wigner import WignerGrid  # noqa: E402

_X_CANDIDATES = ("g_over_gc", "omega_ratio", "N")
_X_LABELS = {
    "g_over_gc": r"$g/g_c$",
    "omega_ratio": r"$\omega_\mathrm{atom}/\omega_\mathrm{cav}$",
    "N": r"$N$",
    "n": r"photon number $n$",
}


def _read_rows(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _to_float(value: str) -> float:
    if value == "":
        return math.nan
    if value == "inf":
        return math.inf
    return float(value)


def render_results(csv_path: Path, figures_dir: Path) -> list[Path]:
    """Line plots of l_opt, P(n), and fidelity from a results.csv."""
    rows = _read_rows(csv_path)
    if not rows:
        return []
    finite = [r for r in rows if r["N"] != "inf"]
    reference = [r for r in rows if r["N"] == "inf"]
    base = finite if finite else reference
    x_col = "n"
    for cand in _X_CANDIDATES:
        if len({r[cand] for r in base}) > 1:
            x_col = cand
            break

    figures_dir.mkdir(parents=True, exist_ok=True)
    written = []
    panels = (("l_opt", r"cat size $l_\mathrm{opt}$", "linear"),
              ("P_n", r"probability $P(n)$", "log"),
              ("fidelity", "fidelity", "linear"))
    for col, ylabel, yscale in panels:
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        ns = sorted({int(r["n"]) for r in base})
        for n in ns:
            pts = [(_to_float(r[x_col]), _to_float(r[col]))
                   for r in base if int(r["n"]) == n and r[col] != ""]
            pts.sort()
            if not pts:
                continue
            xs, ys = zip(*pts)
            label = f"n={n}" if x_col != "n" else None
            ax.plot(xs, ys, "o-", ms=3.5, label=label)
            ref_val = [_to_float(r[col]) for r in reference
                       if int(r["n"]) == n and r[col] != ""]
            if ref_val and x_col == "N" and col == "l_opt":
                ax.axhline(ref_val[0], ls="--", lw=0.8, color="gray")
        if x_col == "N" and len({_to_float(r["N"]) for r in base}) > 2:
            ax.set_xscale("log")
        ax.set_yscale(yscale)
        ax.set_xlabel(_X_LABELS[x_col])
        ax.set_ylabel(ylabel)
        if x_col != "n":
            ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        out = figures_dir / f"{csv_path.stem}_{col}.png"
        fig.savefig(out, dpi=160)
        plt.close(fig)
        written.append(out)
    return written


def render_wigner(csv_path: Path, figures_dir: Path) -> Path:
    """Heatmap of a Wigner grid CSV."""
    grid = WignerGrid.from_csv(csv_path)
    figures_dir.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    vmax = float(np.abs(grid.values).max()) or 1.0
    mesh = ax.pcolormesh(
        grid.phis, grid.thetas, grid.values,
        cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="auto",
    )
    fig.colorbar(mesh, ax=ax, label=r"$W(\theta,\phi)$")
    ax.set_xlabel(r"$\phi$")
    ax.set_ylabel(r"$\theta$")
    fig.tight_layout()
    out = figures_dir / f"{csv_path.stem}.png"
    fig.savefig(out, dpi=160)
    plt.close(fig)
    return out


def render_convergence(csv_path: Path, figures_dir: Path) -> Path:
    rows = _read_rows(csv_path)
    figures_dir.mkdir(parents=True, exist_ok=True)
    cutoffs = [int(r["n_cutoff"]) for r in rows]
    fig, axes = plt.subplots(1, 2, figsize=(7.0, 3.0))
    for ax, col, label in zip(axes, ("l_opt", "P_n"),
                              (r"$l_\mathrm{opt}$", r"$P(n)$")):
        ax.plot(cutoffs, [_to_float(r[col]) for r in rows], "o-")
        ax.set_xlabel(r"$n_\mathrm{cutoff}$")
        ax.set_ylabel(label)
    fig.tight_layout()
    out = figures_dir / f"{csv_path.stem}.png"
    fig.savefig(out, dpi=160)
    plt.close(fig)
    return out


def render_output_dir(directory: Path | str) -> list[Path]:
    """Render every recognized CSV in a sweep output directory."""
    directory = Path(directory)
    figures_dir = directory / "figures"
    written: list[Path] = []
    results = directory / "results.csv"
    if results.exists():
        written.extend(render_results(results, figures_dir))
    convergence = directory / "convergence.csv"
    if convergence.exists():
        written.append(render_convergence(convergence, figures_dir))
    for path in sorted(directory.glob("wigner_*.csv")):
        written.append(render_wigner(path, figures_dir))
    return written
