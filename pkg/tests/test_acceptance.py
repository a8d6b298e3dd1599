"""Acceptance gate: one printed pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import json
import time
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from spacetime_crystal import cli, crystal, fock, massshell, pagewootters, propagator
from spacetime_crystal.errors import NumericalWarning
from spacetime_crystal.evolution import (
    EvolutionSpec,
    evolve,
    expect_p2,
    harmonic_potential,
    schrodinger_reference,
    stationarity_check,
)
from spacetime_crystal.grid import GridSpec, SpacetimeField, Units, normalize, random_field

U = Units()


def test_unitarity_and_conservation(acceptance, rng):
    grid = GridSpec(256, 256, 64.0, 64.0)
    f = random_field(grid, rng)
    start = time.perf_counter()
    traj = evolve(f, EvolutionSpec("relativistic-free", 0.01, 500, stride=500))
    wall = time.perf_counter() - start
    nd, pd = traj.norm_drift(), traj.p2_drift()
    ok = nd < 1e-9 and pd < 1e-9 and wall < 60
    acceptance(1, ok, f"norm drift {nd:.2e}, p2 drift {pd:.2e} (< 1e-9), runtime {wall:.1f} s (< 60 s)")
    assert ok


def _deficits(psi, V, dtaus, window=1.0):
    return np.array([
        stationarity_check(psi, EvolutionSpec("nonrel-reparametrized", d, int(round(window / d)), V), 0.0)
        for d in dtaus
    ])


def test_separable_solution_identity(acceptance):
    dtaus = np.array([4e-3, 2e-3, 1e-3, 5e-4])

    # free: lx = 2 pi makes every level j^2/2 periodic over lt = 4 pi, and
    # nt = 512 keeps every populated energy below the t-grid Nyquist (128);
    # width 0.5 leaves a ~1e-9 kink at the box edge
    gf = GridSpec(64, 512, 2 * np.pi, 4 * np.pi)
    xs = gf.wrap_x(np.pi)
    psi0 = np.exp(-xs**2 / (2 * 0.5**2) + 2j * xs)
    psi0 /= np.sqrt(np.sum(np.abs(psi0) ** 2) * gf.dx)
    free = _deficits(schrodinger_reference(psi0, None, gf), None, dtaus)

    # harmonic: omega = 1, levels n + 1/2, period 4 pi
    gh = GridSpec(128, 64, 20.0, 4 * np.pi)
    V = harmonic_potential(gh, 1.0)
    xs = gh.wrap_x(gh.lx / 2)
    psi0 = np.exp(-((xs - 1.0) ** 2) / 2).astype(complex)
    psi0 /= np.sqrt(np.sum(np.abs(psi0) ** 2) * gh.dx)
    harm = _deficits(schrodinger_reference(psi0, V, gh), V, dtaus)
    slope = np.polyfit(np.log(dtaus), np.log(harm), 1)[0]

    d_free = free[dtaus == 1e-3][0]
    d_harm = harm[dtaus == 1e-3][0]
    ok = d_free < 1e-6 and d_harm < 1e-6 and abs(slope - 2) <= 0.2
    acceptance(2, ok, f"deficit at dtau=1e-3: free {d_free:.2e}, harmonic {d_harm:.2e} (< 1e-6); "
                      f"harmonic order {slope:.3f} (2 +/- 0.2); free splitting is exact "
                      f"(max {free.max():.1e})")
    assert ok


def test_mass_shell_consistency(acceptance):
    grid = GridSpec(32, 32, 8 * np.pi, 8 * np.pi)
    q2 = grid.q2(U)
    A = np.zeros(grid.shape, dtype=complex)
    for (ik, iw), wgt in {(0, 4): 0.3, (3, 5): 0.3, (0, 8): 0.4, (2, 9): 0.2}.items():
        A[ik, iw] = np.sqrt(wgt)
    f = normalize(SpacetimeField(grid, A, "momentum"))
    mu_grid = np.linspace(-1.0, 6.0, 701)
    bin_ = mu_grid[1] - mu_grid[0]
    eps = 1e-9
    worst_peak, worst_kg = 0.0, 0.0
    for mu in sorted({round(float(q2[ik, iw]), 12) for ik, iw in [(0, 4), (3, 5), (0, 8), (2, 9)]}):
        comp = massshell.shell_project(f, massshell.ShellSpec(mu, eps))
        traj = evolve(comp, EvolutionSpec("relativistic-free", 0.1, 2000))
        peak = massshell.tau_fourier(traj, mu_grid).peak_mu()
        worst_peak = max(worst_peak, abs(peak - expect_p2(comp)) / bin_)
        worst_kg = max(worst_kg, massshell.kg_residual(comp, mu))
    ok = worst_peak <= 1 and worst_kg <= eps
    acceptance(3, ok, f"worst peak offset {worst_peak:.3f} bins (<= 1); worst kg_residual "
                      f"{worst_kg:.1e} (<= eps {eps:g})")
    assert ok


def test_free_field_energy(acceptance):
    # q^2 = m^2 c^4 = 1 in natural units: (k, w) = (0, 1) and (3/4, 5/4)
    grid = GridSpec(32, 32, 8 * np.pi, 8 * np.pi)
    errs = []
    for modes in ([(0, 4)], [(3, 5)], [(0, 4), (3, 5), (-3, -5)]):
        A = np.zeros(grid.shape, dtype=complex)
        for ik, iw in modes:
            A[ik % 32, iw % 32] = 1.0
        f = normalize(SpacetimeField(grid, A, "momentum"))
        errs.append(abs(massshell.field_energy(f) - U.m * U.c**2 / 2))
    ok = max(errs) < 1e-10
    acceptance(4, ok, f"max |field_energy - mc^2/2| = {max(errs):.1e} (< 1e-10)")
    assert ok


def test_propagator(acceptance):
    q = propagator.PropagatorQuery(20.0, 20.0, 2.0)
    sigma = 1.25
    errs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        for n in (128, 192, 256):
            g = GridSpec(n, n, 40.0, 40.0)
            errs.append(propagator.numeric_propagator_check(q, g, sigma / g.dx))
    converging = all(b <= max(a, 1e-12) for a, b in zip(errs, errs[1:]))
    semi = propagator.semigroup_error(1.0, 1.5, GridSpec(256, 256, 40.0, 40.0), 20.0, 20.0)
    ok = errs[0] < 1e-3 and converging and semi < 1e-6
    acceptance(5, ok, f"relative error {errs[0]:.1e} (< 1e-3); refinement "
                      f"{', '.join(f'{e:.1e}' for e in errs)} non-increasing to 1e-12 floor; "
                      f"semigroup {semi:.1e} (< 1e-6)")
    assert ok


def test_microcausality(acceptance):
    mu = 1.0
    inside = [(0.0, 1.0), (0.5, 1.5), (-1.0, 2.0), (0.3, -1.2), (1.2, 3.0)]
    outside = [(1.5, 0.5), (2.0, 0.0), (-2.5, 1.0), (3.0, -2.0)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        num_in = np.array([massshell.commutator_delta(x, t, mu) for x, t in inside])
        num_out = np.array([massshell.commutator_delta(x, t, mu) for x, t in outside])
        ref = np.array([massshell.pauli_jordan_closed_form(x, t, mu) for x, t in inside])
        boosted = np.array([massshell.commutator_delta(*massshell.boost(x, t, 0.5), mu)
                            for x, t in inside + outside])
    peak = np.max(np.abs(ref))
    out_ratio = np.max(np.abs(num_out)) / peak
    in_rel = np.max(np.abs(num_in - ref) / np.abs(ref))
    orig = np.concatenate([num_in, num_out])
    boost_rel = np.max(np.abs(boosted - orig)) / peak
    ok = out_ratio < 1e-6 and in_rel < 1e-4 and boost_rel < 1e-4
    acceptance(6, ok, f"outside/peak {out_ratio:.1e} (< 1e-6); inside rel {in_rel:.1e} (< 1e-4); "
                      f"boost v=0.5c {boost_rel:.1e} (< 1e-4)")
    assert ok


def test_crystal(acceptance):
    grid = GridSpec(256, 256, 32.0, 32.0)
    spec = crystal.CrystalSpec(4, 2.0, 1.0, crystal.WannierSpec("gaussian", 1.2, 1.0))
    rep = crystal.hopping_J(spec, grid, sigma_tau=1.0)
    J = rep.j_quadrature
    j_fd = crystal.hopping_J_fd(spec, grid)
    j_rel = abs(J - j_fd) / abs(j_fd)

    evals = np.sort(crystal.chain_spectrum(4, J, "ring")[0])
    ring_err = np.max(np.abs(evals - np.sort([2 * J, 0, 0, -2 * J])))

    rng = np.random.default_rng(3)
    evo_err = 0.0
    for n in (2, 3, 4, 17, 64):
        for boundary in ("ring", "open"):
            a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            s = crystal.ChainState(a / np.linalg.norm(a))
            got = crystal.evolve_chain(s, J, 3.7, boundary).amplitudes
            ref = expm(-1j * crystal.chain_hamiltonian(n, J, boundary) * 3.7) @ s.amplitudes
            evo_err = max(evo_err, np.max(np.abs(got - ref)))

    scaled = []
    for n in (16, 32, 64):
        m_num = crystal.band_curvature_mass(n, J, 1.5)
        scaled.append(abs(m_num - crystal.effective_mass(J, 1.5)) / crystal.effective_mass(J, 1.5) * n**2)
    # relative error * N^2 tends to (2 pi)^2 / 12 for a cosine band
    mass_ok = max(scaled) < 2 * (2 * np.pi) ** 2 / 12

    ok = j_rel < 1e-6 and ring_err < 1e-12 and evo_err < 1e-10 and mass_ok
    acceptance(7, ok, f"J {J:.6f} vs FD rel {j_rel:.1e} (< 1e-6); N=4 ring err {ring_err:.1e}; "
                      f"evolve_chain vs expm {evo_err:.1e} (< 1e-10); m* rel err * N^2 = "
                      f"{', '.join(f'{s:.3f}' for s in scaled)} (bounded); "
                      f"closed-form J {rep.j_closed_form:.4f} reported only")
    assert ok


def test_mode_entanglement(acceptance):
    grid = GridSpec(16, 16, 16.0, 16.0)
    pairs = {"spatial": [(3, 5), (9, 5)], "temporal": [(3, 5), (3, 11)], "mixed": [(3, 5), (9, 11)]}
    worst, min_eig = 0.0, np.inf
    for pts in pairs.values():
        for extra in ([], [(0, 0)]):
            ms = fock.point_modes(grid, pts + extra)
            s = fock.single_particle_superposition(ms, 0, 1, 1.0, 1.0)
            for sub in ([0], [1]):
                rho = fock.reduced_density(s, sub)
                worst = max(worst, abs(fock.entanglement_entropy(rho) - 1.0))
                min_eig = min(min_eig, rho.eigenvalues().min())
    ms = fock.plane_wave_modes(grid, [(1, 2), (2, 3)])
    rho = fock.reduced_density(fock.single_particle_superposition(ms, 0, 1, 1.0, 1.0), [0])
    worst = max(worst, abs(fock.entanglement_entropy(rho) - 1.0))
    ok = worst < 1e-10 and min_eig >= -1e-10
    acceptance(8, ok, f"max |S - 1 bit| = {worst:.1e} (< 1e-10); min eigenvalue {min_eig:.1e} (>= -1e-10)")
    assert ok


def test_page_wootters(acceptance):
    rng = np.random.default_rng(11)
    worst_fid = 1.0
    for N in (2, 16, 64, 256):
        d = 4
        M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        H = (M + M.conj().T) / 2
        psi0 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi0 /= np.linalg.norm(psi0)
        clock = pagewootters.ClockSpec(N, 0.05)
        h = pagewootters.build_history(psi0, H, clock)
        worst_fid = min(worst_fid, pagewootters.recovery_fidelities(h, psi0, H).min())

    clock = pagewootters.ClockSpec(64, 0.1)
    step = 2 * np.pi / (64 * 0.1)
    comm = 0.0
    for j in (-3, 0, 5, 31):
        E_s = -j * step
        h = pagewootters.build_history(np.array([1.0 + 0j]), np.array([[E_s]]), clock)
        comm = max(comm, pagewootters.constraint_residual(h, np.array([[E_s]])))

    alias = 0.0
    for E_s in (0.37, 1.234, -2.71, step * 2.5):
        h = pagewootters.build_history(np.array([1.0 + 0j]), np.array([[E_s]]), clock)
        dense = pagewootters.constraint_residual(h, np.array([[E_s]]))
        alias = max(alias, abs(dense - pagewootters.aliasing_residual(E_s, clock)))

    ok = worst_fid >= 1 - 1e-12 and comm < 1e-10 and alias < 1e-8
    acceptance(9, ok, f"min fidelity 1 - {1 - worst_fid:.1e} (N <= 256); commensurate residual "
                      f"{comm:.1e} (< 1e-10); aliasing formula gap {alias:.1e} (< 1e-8)")
    assert ok


@pytest.mark.slow
def test_reproducibility(acceptance, tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUTPUT_ENV, raising=False)
    mismatched = []
    for name in cli.EXPERIMENTS:
        first = tmp_path / name / "first"
        cfg = tmp_path / f"{name}.toml"
        cfg.write_text(f'experiment = "{name}"\nseed = 5\noutput_dir = "{first.as_posix()}"\n')
        assert cli.main(["run", str(cfg)]) == 0
        manifest = json.loads((first / "manifest.json").read_text())
        second = tmp_path / name / "second"
        monkeypatch.setenv(cli.OUTPUT_ENV, str(second))
        assert cli.main(["run", str(first / "manifest.json")]) == 0
        monkeypatch.delenv(cli.OUTPUT_ENV)
        csvs = sorted(p.name for p in first.glob("*.csv"))
        assert csvs, name
        for c in csvs:
            if (first / c).read_bytes() != (second / c).read_bytes():
                mismatched.append(f"{name}/{c}")
        rerun = json.loads((second / "manifest.json").read_text())
        for c in csvs:
            if manifest["checksums"][c] != rerun["checksums"][c]:
                mismatched.append(f"{name}/{c} (checksum)")
    ok = not mismatched
    acceptance(10, ok, f"{len(cli.EXPERIMENTS)} experiments re-run from manifest; "
                       f"byte-identical CSVs: {'yes' if ok else mismatched}")
    assert ok
