"""Batch experiment suites behind the command line.

Each experiment takes its parameter table (already merged with defaults),
the grid, units, an output directory and a seeded generator, writes its data
products and returns a JSON-serializable summary.  Numerical invariant
failures raise :class:`InvariantViolation` naming the invariant.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Callable

import numpy as np

from . import crystal, fock, massshell, pagewootters, propagator
from .errors import InvariantViolation, NumericalWarning
from .evolution import (
    EvolutionSpec,
    evolve,
    expect_p2,
    export_trajectory,
    harmonic_potential,
    schrodinger_reference,
    stationarity_check,
)
from .grid import GridSpec, SpacetimeField, Units, make_gaussian, normalize, plane_wave, random_field
from .io import write_csv

TWO_PI = 2 * np.pi


def _units_comment(units: Units) -> str:
    return f"units: hbar={units.hbar!r} c={units.c!r} m={units.m!r}"


# --- evolve -----------------------------------------------------------------

def _initial_state(p: dict, grid: GridSpec, units: Units, rng) -> SpacetimeField:
    if p["state"] == "plane-wave":
        ik, iw = p["mode"]
        return plane_wave(grid, ik, iw, units)
    if p["state"] == "gaussian":
        return make_gaussian(grid, p["x0"] * grid.lx, p["t0"] * grid.lt, p["sx"], p["st"],
                             p["k0"], p["w0"], units)
    if p["state"] == "random":
        return random_field(grid, rng, units)
    raise ValueError(f"unknown state {p['state']!r}")


def run_evolve(p, grid, units, outdir, rng):
    f = _initial_state(p, grid, units, rng)
    pot = None
    if p["potential"] == "harmonic":
        pot = harmonic_potential(grid, p["omega"], units=units)
    spec = EvolutionSpec(p["kind"], p["dtau"], p["nsteps"], pot, stride=p["stride"] or max(p["nsteps"], 1))
    traj = evolve(f, spec)
    export_trajectory(traj, outdir)
    drift = traj.norm_drift()
    if drift > 1e-9:
        raise InvariantViolation(f"unitarity: norm drift {drift:.3e} > 1e-9")
    return {"norm_drift": drift, "p2_drift": traj.p2_drift(), "tau": spec.tau,
            "expect_p2": float(traj.p2[-1])}


# --- stationarity -----------------------------------------------------------

def run_stationarity(p, grid, units, outdir, rng):
    if p["potential"] == "harmonic":
        V = harmonic_potential(grid, p["omega"], units=units)
        xs = grid.wrap_x(grid.lx / 2)
        alpha = units.m * p["omega"] / units.hbar
        psi0 = np.exp(-alpha * (xs - p["shift"]) ** 2 / 2).astype(complex)
    else:
        V = None
        psi0 = np.exp(-1j * grid.k[p["k_index"]] * grid.x)
    psi0 = psi0 / np.sqrt(np.sum(np.abs(psi0) ** 2) * grid.dx)
    psi = schrodinger_reference(psi0, V, grid, units)
    rows = []
    for dtau in p["dtaus"]:
        n = int(round(p["tau_window"] / dtau))
        spec = EvolutionSpec("nonrel-reparametrized", dtau, n, V)
        rows.append((dtau, stationarity_check(psi, spec, p["E"])))
    write_csv(outdir / "stationarity.csv", ["dtau", "deficit"], rows, [_units_comment(units)])
    arr = np.array(rows)
    out = {"deficits": arr[:, 1].tolist()}
    if len(rows) >= 2 and np.all(arr[:, 1] > 0):
        out["slope"] = float(np.polyfit(np.log(arr[:, 0]), np.log(arr[:, 1]), 1)[0])
    return out


# --- massshell --------------------------------------------------------------

def _mode_superposition(grid, units, modes, weights) -> SpacetimeField:
    A = np.zeros(grid.shape, dtype=complex)
    for (ik, iw), wgt in zip(modes, weights):
        A[ik % grid.nx, iw % grid.nt] += np.sqrt(wgt)
    return normalize(SpacetimeField(grid, A, "momentum", units))


def run_massshell(p, grid, units, outdir, rng):
    f = _mode_superposition(grid, units, p["modes"], p["weights"])
    traj = evolve(f, EvolutionSpec("relativistic-free", p["dtau"], p["nsteps"]))
    mu = np.linspace(p["mu_min"], p["mu_max"], p["n_mu"])
    spec = massshell.tau_fourier(traj, mu, p["window"])
    emit_plotdata(spec, "mu-spectrum", outdir / "spectrum.csv", units)
    q2 = grid.q2(units)
    shells = sorted({round(float(q2[ik % grid.nx, iw % grid.nt]), 12) for ik, iw in p["modes"]})
    comps = {}
    for s in shells:
        proj = massshell.shell_project(f, massshell.ShellSpec(s, p["eps"]))
        comps[repr(s)] = {"expect_p2": expect_p2(proj), "field_energy": massshell.field_energy(proj),
                          "kg_residual": massshell.kg_residual(proj, s)}
    return {"peaks": spec.peaks(len(shells)).tolist(), "components": comps,
            "field_energy": massshell.field_energy(f), "mu_bin": float(mu[1] - mu[0])}


# --- propagator -------------------------------------------------------------

def run_propagator(p, grid, units, outdir, rng):
    q = propagator.PropagatorQuery(p["x0"] * grid.lx, p["t0"] * grid.lt, p["tau"], units)
    err = propagator.numeric_propagator_check(q, grid, p["src_width"])
    rows = propagator.propagator_scan(grid.x[:: p["scan_stride"]], grid.t[:: p["scan_stride"]], q)
    emit_plotdata(rows, "propagator", outdir / "propagator.csv", units)
    return {"relative_error": err, "kernel_magnitude": propagator.kernel_magnitude(q.tau, units)}


# --- commutator -------------------------------------------------------------

def run_commutator(p, grid, units, outdir, rng):
    xs = np.linspace(-p["x_extent"], p["x_extent"], p["n_x"])
    ts = np.linspace(-p["t_extent"], p["t_extent"], p["n_t"])
    rows = massshell.lightcone_scan(xs, ts, p["mu"], units, kmax=p["kmax"])
    emit_plotdata(rows, "lightcone", outdir / "lightcone.csv", units)
    mag = np.hypot(rows[:, 2], rows[:, 3])
    outside = np.abs(rows[:, 0]) > units.c * np.abs(rows[:, 1]) + p["cone_gap"]
    inside = units.c * np.abs(rows[:, 1]) > np.abs(rows[:, 0]) + p["cone_gap"]
    peak = mag[inside].max() if inside.any() else 1.0
    return {"outside_max_ratio": float(mag[outside].max() / peak) if outside.any() else 0.0}


# --- crystal ----------------------------------------------------------------

def run_crystal(p, grid, units, outdir, rng):
    wspec = crystal.WannierSpec(p["profile"], p["sigma_x"], p["sigma_t"])
    spec = crystal.CrystalSpec(p["n_sites"], p["delta_x"], p["delta_t"], wspec, p["boundary"], units)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        rep = crystal.hopping_J(spec, grid, p["sigma_tau"])
        j_fd = crystal.hopping_J_fd(spec, grid)
    J = rep.j_quadrature
    evals, _ = crystal.chain_spectrum(p["n_sites"], J, p["boundary"])
    emit_plotdata(np.column_stack([np.arange(len(evals)), evals]), "band", outdir / "band.csv", units)
    sweep = crystal.hopping_sweep(spec, grid, [(d, p["delta_t"]) for d in p["sweep_dx"]], p["sigma_tau"])
    write_csv(outdir / "hopping_sweep.csv",
              ["delta_x", "delta_t", "sigma_x", "sigma_t", "J_quadrature", "J_closed_form"], sweep,
              [_units_comment(units)])
    start = crystal.ChainState.localized(p["n_sites"], 0)
    taus = np.linspace(0, p["tau_max"], p["n_tau"])
    table = crystal.chain_evolution_table(start, J, taus, p["boundary"], units.hbar)
    write_csv(outdir / "chain_evolution.csv", ["tau", "n", "probability"], table)
    return {"J_quadrature": J, "J_finite_difference": j_fd, "J_closed_form": rep.j_closed_form,
            "notes": rep.notes, "effective_mass": crystal.effective_mass(J, p["lattice_a"], units.hbar)}


# --- fock -------------------------------------------------------------------

def run_fock(p, grid, units, outdir, rng):
    ix, it = p["base_point"]
    dx_, dt_ = p["offset"]
    variants = {
        "spatial": [(ix, it), (ix + dx_, it)],
        "temporal": [(ix, it), (ix, it + dt_)],
        "mixed": [(ix, it), (ix + dx_, it + dt_)],
    }
    rows, out = [], {}
    for name, pts in variants.items():
        ms = fock.point_modes(grid, pts)
        s = fock.single_particle_superposition(ms, 0, 1, p["alpha"], p["beta"], p["cutoff"])
        S = fock.entanglement_entropy(fock.reduced_density(s, [0]))
        S_c = fock.entanglement_entropy(fock.reduced_density(s, [1]))
        fock.state_dump(s, outdir / f"state_{name}.csv")
        rows.append((name, S, S_c))
        out[name] = S
    write_csv(outdir / "entropy.csv", ["variant", "entropy_mode0_bits", "entropy_mode1_bits"], rows)
    return out


# --- pagewootters -----------------------------------------------------------

def run_pagewootters(p, grid, units, outdir, rng):
    hbar = units.hbar
    energies = np.asarray(p["system_energies"], dtype=float)
    H_s = np.diag(energies).astype(complex)
    psi0 = rng.standard_normal(len(energies)) + 1j * rng.standard_normal(len(energies))
    psi0 /= np.linalg.norm(psi0)
    clock = pagewootters.ClockSpec(p["n_ticks"], p["dtau"])
    h = pagewootters.build_history(psi0, H_s, clock, hbar)
    fid = pagewootters.recovery_fidelities(h, psi0, H_s, hbar)
    pagewootters.fidelity_csv(fid, outdir / "fidelity.csv")
    if np.min(fid) < 1 - 1e-12:
        raise InvariantViolation(f"recovery: min fidelity {np.min(fid)!r} < 1 - 1e-12")
    rows = []
    for N in p["sweep_ticks"]:
        c = pagewootters.ClockSpec(N, p["dtau"])
        hs = pagewootters.build_history(np.array([1.0 + 0j]), np.array([[p["probe_energy"]]]), c, hbar)
        rows.append((N, p["dtau"], pagewootters.constraint_residual(hs, np.array([[p["probe_energy"]]]), 0.0, hbar)))
    pagewootters.convergence_csv(rows, outdir / "convergence.csv")
    return {"min_fidelity": float(np.min(fid)), "residuals": [r[2] for r in rows]}


# --- registry ---------------------------------------------------------------

EXPERIMENTS: dict[str, tuple[Callable, dict, dict]] = {
    "evolve": (run_evolve, {"nx": 64, "nt": 64, "lx": 64.0, "lt": 64.0}, {
        "kind": "relativistic-free", "dtau": 0.05, "nsteps": 100, "stride": 0,
        "state": "gaussian", "mode": [3, 5], "x0": 0.5, "t0": 0.5, "sx": 4.0, "st": 4.0,
        "k0": 0.0, "w0": 0.0, "potential": "none", "omega": 0.1,
    }),
    "stationarity": (run_stationarity, {"nx": 128, "nt": 64, "lx": 20.0, "lt": 4 * np.pi}, {
        "potential": "harmonic", "omega": 1.0, "shift": 1.0, "k_index": 2,
        "dtaus": [4e-3, 2e-3, 1e-3], "tau_window": 1.0, "E": 0.0,
    }),
    "massshell": (run_massshell, {"nx": 32, "nt": 32, "lx": 8 * np.pi, "lt": 8 * np.pi}, {
        "modes": [[0, 4], [3, 5], [0, 8]], "weights": [0.3, 0.3, 0.4],
        "dtau": 0.1, "nsteps": 2000, "mu_min": 0.0, "mu_max": 5.0, "n_mu": 501,
        "window": "hann", "eps": 1e-9,
    }),
    "propagator": (run_propagator, {"nx": 128, "nt": 128, "lx": 40.0, "lt": 40.0}, {
        "x0": 0.5, "t0": 0.5, "tau": 2.0, "src_width": 4.0, "scan_stride": 4,
    }),
    "commutator": (run_commutator, {"nx": 4, "nt": 4, "lx": 1.0, "lt": 1.0}, {
        "mu": 1.0, "x_extent": 3.0, "t_extent": 3.0, "n_x": 21, "n_t": 21, "kmax": 12000.0,
        "cone_gap": 0.05,
    }),
    "crystal": (run_crystal, {"nx": 256, "nt": 256, "lx": 32.0, "lt": 32.0}, {
        "n_sites": 16, "delta_x": 2.0, "delta_t": 0.5, "profile": "gaussian",
        "sigma_x": 1.2, "sigma_t": 1.0, "boundary": "ring", "sigma_tau": 1.0,
        "lattice_a": 1.0, "sweep_dx": [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
        "tau_max": 20.0, "n_tau": 11,
    }),
    "fock": (run_fock, {"nx": 16, "nt": 16, "lx": 16.0, "lt": 16.0}, {
        "base_point": [4, 4], "offset": [5, 7], "alpha": 0.7071067811865476,
        "beta": 0.7071067811865476, "cutoff": 2,
    }),
    "pagewootters": (run_pagewootters, {"nx": 4, "nt": 4, "lx": 1.0, "lt": 1.0}, {
        "system_energies": [0.3, -1.1, 2.0], "n_ticks": 64, "dtau": 0.05,
        "sweep_ticks": [8, 16, 32, 64, 128, 256], "probe_energy": 1.2345,
    }),
}


# --- plot data --------------------------------------------------------------

_PLOT_KINDS = {
    "lightcone": ["dx", "dt", "re", "im"],
    "band": ["j", "E_j"],
    "mu-spectrum": ["mu", "magnitude"],
    "propagator": ["x", "t", "re", "im", "abs"],
}


def emit_plotdata(results, kind: str, path: str | Path, units: Units = Units()) -> Path:
    """Plot-ready CSV with a units comment and a column header.

    ``results`` is a row array for ``lightcone``, ``band`` and ``propagator``;
    a :class:`~spacetime_crystal.massshell.MassSpectrum` for ``mu-spectrum``.
    """
    if kind not in _PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}")
    comments = [_units_comment(units)]
    if kind == "mu-spectrum":
        comments += [f"window={results.window}", f"normalization={results.normalization!r}"]
        rows = np.column_stack([results.mu, results.magnitude])
    else:
        rows = np.asarray(results)
    if kind == "band":
        rows = rows[np.argsort(rows[:, 0], kind="stable")]
        rows = [(int(j), e) for j, e in rows]
    return write_csv(path, _PLOT_KINDS[kind], rows, comments)
