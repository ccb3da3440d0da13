"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Criteria 4, 7, and 8 each contain one clause that fails with
correct physics (see notes in the failure messages); every other criterion
passes at its stated tolerance.
"""

import math

import numpy as np
import pytest

import oracles
from conftest import ground
from spincat import (DickeParams, SpinDensityMatrix, clebsch_gordan,
                     convergence_check, critical_scaling, dense_ground_state,
                     expand_ground_fock, figure_patch, fit_boson_cat, fit_cat,
                     gaussian_ground, herald, herald_boson_direct, lopt_limit,
                     photon_distribution, reduced_spin_density, solve_ground,
                     sphere_integral, sphere_quadrature, spin_wigner,
                     subtracted_squeezed, wigner_at_pole)


def check(criterion: int, ok: bool, detail: str) -> None:
    print(f"\n[criterion {criterion:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


def herald_fits(gs, ns=range(1, 7)):
    out = {}
    for n in ns:
        outcome = herald(gs, n)
        fit = fit_cat(outcome.state, "even" if n % 2 == 0 else "odd")
        out[n] = (outcome.probability, fit)
    return out


@pytest.fixture(scope="module")
def fits30(gs30_critical):
    return herald_fits(gs30_critical)


@pytest.fixture(scope="module")
def g_sweep():
    table = {}
    for g_rel in (0.5, 0.7, 0.9, 0.95, 0.99, 1.0):
        table[g_rel] = herald_fits(ground(200, g_rel))
    return table


@pytest.fixture(scope="module")
def n_sweep():
    return {N: herald_fits(ground(N, 1.0)) for N in (50, 100, 200, 500, 1000)}


@pytest.fixture(scope="module")
def n_sweep_extended(n_sweep):
    # the P(2) turnover sits just above N=1000; the criterion allows optional
    # points beyond the required grid, and two suffice to expose it
    table = dict(n_sweep)
    for N in (1500, 2000):
        table[N] = herald_fits(ground(N, 1.0), ns=(1, 2))
    return table


@pytest.fixture(scope="module")
def saturation_betas():
    gs = gaussian_ground(1.0, 1.0 - 1e-10)
    betas = {}
    for n in range(1, 7):
        state, _ = herald_boson_direct(gs, n)
        betas[n] = fit_boson_cat(state, "even" if n % 2 == 0 else "odd").beta_opt
    return betas


def test_criterion_1_fidelity_floor(fits30):
    worst = min(fit.fidelity for _, fit in fits30.values())
    check(1, worst >= 0.995,
          f"N=30, g=g_c heralded-fit fidelities >= 0.995 (min {worst:.6f})")


def test_criterion_2_monotone_size_and_probability(fits30):
    lopts = [fits30[n][1].l_opt for n in range(1, 7)]
    probs = [fits30[n][0] for n in range(1, 7)]
    ok = all(b > a for a, b in zip(lopts, lopts[1:])) and \
        all(b < a for a, b in zip(probs, probs[1:]))
    check(2, ok,
          f"l_opt strictly increasing {np.round(lopts, 3).tolist()}, "
          f"P(n) strictly decreasing over n=1..6")


def test_criterion_3_wigner_parity_signs(gs30_critical):
    problems = []
    for n in range(1, 7):
        psi = herald(gs30_critical, n).state
        w0 = wigner_at_pole(SpinDensityMatrix.from_pure(psi))
        if n % 2 == 0 and not w0 > 0:
            problems.append(f"W(0) of psi_{n} = {w0:.2e} not > 0")
        if n % 2 == 1 and not w0 < 0:
            problems.append(f"W(0) of psi_{n} = {w0:.2e} not < 0")
    rho = reduced_spin_density(gs30_critical)
    thetas, phis = figure_patch(rho.spin)
    rho_min = spin_wigner(rho, thetas, phis).values.min()
    if rho_min < -1e-8:
        problems.append(f"unheralded Wigner min {rho_min:.2e} < -1e-8")
    check(3, not problems,
          "heralded W(0) signs follow photon parity; unheralded patch min "
          f"{rho_min:.2e} >= -1e-8" if not problems else "; ".join(problems))


def test_criterion_4_g_sweep(g_sweep):
    problems = []
    gs_rel = sorted(g_sweep)
    for n in range(1, 7):
        lopts = [g_sweep[g][n][1].l_opt for g in gs_rel]
        if not all(b > a for a, b in zip(lopts, lopts[1:])):
            problems.append(f"l_opt not increasing in g for n={n}")
        logp = [math.log(g_sweep[g][n][0]) for g in gs_rel]
        if not all(b > a for a, b in zip(logp, logp[1:])):
            problems.append(f"log P({n}) not increasing in g")
    rises = [math.log(g_sweep[1.0][n][0] / g_sweep[0.5][n][0])
             for n in range(1, 7)]
    if not all(b > a for a, b in zip(rises, rises[1:])):
        problems.append("log P(n) rise toward g_c not larger for larger n")
    bad_fids = [
        (g, n, g_sweep[g][n][1].fidelity)
        for g in gs_rel for n in range(1, 7)
        if g_sweep[g][n][1].fidelity < 0.988
    ]
    if bad_fids:
        listing = ", ".join(f"g/gc={g} n={n} F={f:.4f}" for g, n, f in bad_fids)
        problems.append(
            f"fidelity floor 0.988 violated at {listing} "
            "(converged physics: the thermodynamic limit gives the same "
            "values, so the floor cannot hold this far from criticality)"
        )
    check(4, not problems,
          "monotone l_opt and log P per n, steeper rise for larger n, "
          "fidelities >= 0.988" if not problems else "; ".join(problems))


def test_criterion_5_n_sweep_saturation(n_sweep, n_sweep_extended,
                                        saturation_betas):
    problems = []
    ns_atoms = sorted(n_sweep)
    for n in range(1, 7):
        target = lopt_limit(saturation_betas[n])
        gaps = [abs(n_sweep[N][n][1].l_opt - target) for N in ns_atoms]
        if not all(b < a for a, b in zip(gaps, gaps[1:])):
            problems.append(f"|l_opt - 2 beta_opt| not decreasing for n={n}")
        if not gaps[-1] <= 0.10 * target:
            problems.append(
                f"n={n}: gap at N=1000 is {gaps[-1] / target:.3f} of 2 beta_opt"
            )
    peaks = {}
    for n in (1, 2):
        grid = sorted(n_sweep_extended)
        probs = np.array([n_sweep_extended[N][n][0] for N in grid])
        peak = int(np.argmax(probs))
        peaks[n] = grid[peak]
        rises_then_falls = (
            0 < peak < len(probs) - 1
            and np.all(np.diff(probs[:peak + 1]) > 0)
            and np.all(np.diff(probs[peak:]) < 0)
        )
        if not rises_then_falls:
            problems.append(f"P({n}) not increase-then-decrease over N grid")
    check(5, not problems,
          "l_opt approaches 2 beta_opt (within 10% at N=1000); "
          f"P(1) peaks at N={peaks.get(1)}, P(2) at N={peaks.get(2)}"
          if not problems else "; ".join(problems))


def test_criterion_6_thermodynamic_anchors():
    problems = []
    r_b = gaussian_ground(1.0, 1.0 - 1e-8).r_b
    if abs(r_b - 0.25 * math.log(2)) > 1e-8:
        problems.append(f"r_b -> ln(2)/4 violated ({r_b!r})")
    gs = gaussian_ground(1.0, 0.9)
    state1, _ = herald_boson_direct(gs, 1, 60)
    ref1 = subtracted_squeezed(1, gs.r_plus, 60)
    overlap = abs(np.vdot(state1.amplitudes, ref1.amplitudes)) ** 2
    if overlap < 1 - 1e-10:
        problems.append(f"psi_1 overlap with b S(r+)|0> is {overlap!r}")
    cutoff = 60
    state2, _ = herald_boson_direct(gs, 2, cutoff)
    b, squeezed = oracles.single_mode_ops(cutoff)
    op = (math.tanh(gs.r_minus) ** 2 / math.tanh(gs.r_plus)) * (b @ b) \
        - math.tanh(gs.r_a) * math.tanh(gs.r_b) * np.eye(cutoff + 1)
    ref2 = op @ squeezed(gs.r_plus)
    ref2 /= np.linalg.norm(ref2)
    got2 = state2.amplitudes.real
    dist = min(np.abs(got2 - ref2).max(), np.abs(got2 + ref2).max())
    if dist > 1e-9:
        problems.append(f"psi_2 differs from the two-boson form by {dist:.2e}")
    # relative beta_opt drift across the last decade of 1 - g/gc
    drifts = []
    for n in range(1, 7):
        parity = "even" if n % 2 == 0 else "odd"
        b5 = fit_boson_cat(herald_boson_direct(gaussian_ground(1.0, 1 - 1e-5), n)[0], parity).beta_opt
        b6 = fit_boson_cat(herald_boson_direct(gaussian_ground(1.0, 1 - 1e-6), n)[0], parity).beta_opt
        drifts.append(abs(b6 - b5) / b6)
    if max(drifts) >= 0.01:
        problems.append(f"beta_opt saturation violated (max drift {max(drifts):.4f})")
    check(6, not problems,
          f"r_b anchor, n=1 and n=2 heralded forms, beta_opt drift "
          f"{max(drifts):.2%} < 1%" if not problems else "; ".join(problems))


def test_criterion_7_critical_scaling():
    samples = 1.0 - np.logspace(-6, -4, 7)
    slopes = {n: critical_scaling(n, samples) for n in range(1, 7)}
    bad = {n: round(s, 4) for n, s in slopes.items() if abs(s - 0.25) > 0.02}
    detail = ", ".join(f"n={n}: {s:.4f}" for n, s in slopes.items())
    if bad:
        detail += (
            "; slopes for n >= 3 sit below 0.23 in this window with correct "
            "physics: the exponent 1/4 is asymptotic and is reached only "
            "for 1-g/gc below ~1e-8"
        )
    check(7, not bad, f"fitted exponents in [1e-6, 1e-4]: {detail}")


def test_criterion_8_off_resonant_trends():
    ratios = (0.2, 0.35, 0.6, 1.0, 1.7, 3.0, 5.0)
    table = {}
    for ratio in ratios:
        gs = ground(200, 1.0, omega_ratio=ratio)
        table[ratio] = herald_fits(gs)
    problems = []
    for n in range(1, 7):
        lopts = [table[r][n][1].l_opt for r in ratios]
        if not all(b < a for a, b in zip(lopts, lopts[1:])):
            problems.append(f"l_opt not increasing as ratio decreases (n={n})")
    fid_all = min(table[r][n][1].fidelity for r in ratios for n in range(1, 7))
    if fid_all < 0.939:
        problems.append(f"global fidelity floor violated ({fid_all:.4f})")
    fid_ge1 = min(table[r][n][1].fidelity for r in ratios if r >= 1.0
                  for n in range(1, 7))
    if fid_ge1 < 0.995:
        problems.append(f"fidelity floor for ratio >= 1 violated ({fid_ge1:.4f})")
    peak_info = []
    for n in (1, 3, 5):
        probs = [table[r][n][0] for r in ratios]
        peak = int(np.argmax(probs))
        peak_info.append(f"P({n}) peaks at ratio {ratios[peak]}")
        if peak in (0, len(ratios) - 1):
            problems.append(
                f"P({n}) peaks at the grid edge (ratio {ratios[peak]}), not "
                "near ratio ~ 1 (for n=5 the true maximum sits just above "
                "ratio 5, outside the swept range)"
            )
    check(8, not problems,
          f"l_opt grows toward small ratio; fidelities >= 0.939 "
          f"(>= 0.995 at ratio >= 1); {'; '.join(peak_info)}"
          if not problems else "; ".join(problems))


def test_criterion_9_cutoff_convergence():
    params = DickeParams(1.0, 1.0, 0.5, 200, 50)

    def eval_lopt(gs):
        return fit_cat(herald(gs, 6).state, "even").l_opt

    def eval_p6(gs):
        return herald(gs, 6).probability

    rows = convergence_check(params, {"l_opt": eval_lopt, "P_6": eval_p6},
                             (50, 80))
    dl, dp = rows[1]["d_l_opt"], rows[1]["d_P_6"]
    ok = dl < 1e-8 and dp < 1e-8
    check(9, ok,
          f"N=200, g=g_c, n=6: |d l_opt| = {dl:.2e}, |d P(6)| = {dp:.2e} "
          "between n_cutoff 50 and 80")


def test_criterion_10_property_suites(gs30_critical):
    problems = []
    # parity support of heralded states
    dist = photon_distribution(gs30_critical)
    for n in range(51):
        if dist[n] <= 1e-12:
            continue
        amp = herald(gs30_critical, n).state.amplitudes
        off = amp[1::2] if n % 2 == 0 else amp[0::2]
        if np.abs(off).max() >= 1e-12:
            problems.append(f"off-parity support in psi_{n}")
    # photon distribution completeness
    if abs(dist.sum() - 1.0) > 1e-12:
        problems.append(f"sum P(n) = {dist.sum()!r}")
    # Wigner normalization on a random mixed state
    rng = np.random.default_rng(11)
    a = rng.normal(size=(31, 31)) + 1j * rng.normal(size=(31, 31))
    mat = a @ a.conj().T
    mat /= mat.trace().real
    rho = SpinDensityMatrix(gs30_critical.basis.params.spin, mat)
    thetas, tw, phis, pw = sphere_quadrature(100, 70)
    integral = sphere_integral(spin_wigner(rho, thetas, phis), tw, pw)
    if abs(integral - 1.0) > 1e-6:
        problems.append(f"Wigner normalization {integral!r}")
    # dense vs Lanczos ground states for N <= 10
    for N in (2, 6, 10):
        for g_rel in (0.0, 0.5, 1.0):
            p = DickeParams(1.0, 1.0, g_rel * 0.5, N, 16)
            ov = abs(np.dot(solve_ground(p).amplitudes,
                            dense_ground_state(p).amplitudes)) ** 2
            if ov < 1 - 1e-10:
                problems.append(f"dense/Lanczos overlap {ov!r} at N={N}, "
                                f"g/gc={g_rel}")
    # two-mode expansion against the truncated-operator oracle
    state = expand_ground_fock(gaussian_ground(1.0, 0.5), (40, 40))
    ref = oracles.gaussian_two_mode_state(0.5, 40)
    err = np.abs(state.coefficients.real - ref).max()
    if err > 1e-9:
        problems.append(f"two-mode expansion differs from oracle by {err:.2e}")
    # Clebsch-Gordan orthogonality
    j1 = j2 = 6
    for J_a, J_b in ((12, 12), (12, 11), (0, 0)):
        total = 0.0
        for m1 in np.arange(-j1, j1 + 1):
            for m2 in np.arange(-j2, j2 + 1):
                if m1 + m2 != 0:
                    continue
                total += (clebsch_gordan(j1, m1, j2, m2, J_a, 0)
                          * clebsch_gordan(j1, m1, j2, m2, J_b, 0))
        want = 1.0 if J_a == J_b else 0.0
        if abs(total - want) > 1e-10:
            problems.append(f"CG orthogonality ({J_a},{J_b}): {total!r}")
    check(10, not problems,
          "parity support, sum P(n) = 1, Wigner normalization, dense-vs-"
          "Lanczos, two-mode oracle, CG orthogonality all within tolerance"
          if not problems else "; ".join(problems))
