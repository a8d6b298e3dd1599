"""Evolution in the auxiliary parameter tau.

Two generators act on spacetime fields ``Psi(x, t; tau)``:

* relativistic-free: ``H = hbar^2 (w^2/c^2 - k^2) / 2m``, diagonal on the
  (k, w) grid, so evolution is an exact phase rotation;
* nonrel-reparametrized: ``E = -i hbar d/dt + H(x)`` with
  ``H(x) = -hbar^2/2m d^2/dx^2 + V(x)``, integrated with a two-factor Strang
  splitting (the ``-i hbar d/dt`` and kinetic pieces are both diagonal in
  (k, w); only ``V`` needs position space).

``schrodinger_reference`` solves the ordinary equation in ``t`` and packs the
result into a spacetime field; ``stationarity_check`` then confirms that such
a field is a separable tau-solution ``psi(x,t) exp(-i E tau / hbar)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .grid import GridSpec, SpacetimeField, Units, _to_momentum, _to_position
from .io import save_field, write_csv

Kind = Literal["relativistic-free", "nonrel-reparametrized"]


@dataclass(frozen=True)
class EvolutionSpec:
    """Which tau-generator to apply, and how far.

    ``stride`` controls how often full snapshots are kept; observables are
    recorded every step regardless.
    """

    kind: Kind
    dtau: float
    nsteps: int
    potential: np.ndarray | None = None
    stride: int = 1

    def __post_init__(self):
        if self.kind not in ("relativistic-free", "nonrel-reparametrized"):
            raise ValueError(f"unknown evolution kind {self.kind!r}")
        if not (np.isfinite(self.dtau) and self.dtau > 0):
            raise ValueError("dtau must be finite and > 0")
        if int(self.nsteps) != self.nsteps or self.nsteps < 0:
            raise ValueError("nsteps must be a non-negative integer")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.potential is not None:
            if self.kind == "relativistic-free":
                raise ValueError("relativistic-free evolution does not accept a potential")
            pot = np.asarray(self.potential, dtype=float)
            if pot.ndim != 1 or not np.all(np.isfinite(pot)):
                raise ValueError("potential must be a finite 1-D array")
            object.__setattr__(self, "potential", pot)

    @property
    def tau(self) -> float:
        return self.dtau * self.nsteps


@dataclass
class TauTrajectory:
    """Snapshots at ``taus`` plus per-step observables at ``obs_tau``."""

    spec: EvolutionSpec
    taus: np.ndarray
    snapshots: list[SpacetimeField]
    obs_tau: np.ndarray
    norms: np.ndarray
    p2: np.ndarray
    energy: np.ndarray = field(default_factory=lambda: np.empty(0))
    p2_scale: float = 0.0  # <|q^2|> at tau = 0, a floor for relative drift

    @property
    def final(self) -> SpacetimeField:
        return self.snapshots[-1]

    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - self.norms[0])) / self.norms[0])

    def p2_drift(self) -> float:
        scale = max(abs(self.p2[0]), self.p2_scale, np.finfo(float).tiny)
        return float(np.max(np.abs(self.p2 - self.p2[0])) / scale)


def relativistic_hamiltonian(grid: GridSpec, units: Units = Units()) -> np.ndarray:
    """``hbar^2 (w^2/c^2 - k^2) / 2m`` on the (k, w) mesh."""
    return grid.q2(units) / (2 * units.m)


def reparam_diagonal(grid: GridSpec, units: Units = Units()) -> np.ndarray:
    """(k, w)-diagonal part ``hbar w + hbar^2 k^2 / 2m`` of the reparametrized generator."""
    K, W = grid.kw_mesh()
    return units.hbar * W + units.hbar**2 * K**2 / (2 * units.m)


def _check_potential(spec: EvolutionSpec, grid: GridSpec) -> None:
    if spec.potential is not None and spec.potential.shape != (grid.nx,):
        raise ValueError(f"potential length {spec.potential.shape[0]} != nx={grid.nx}")


def _snapshot_steps(spec: EvolutionSpec) -> list[int]:
    steps = list(range(0, spec.nsteps + 1, spec.stride))
    if steps[-1] != spec.nsteps:
        steps.append(spec.nsteps)
    return steps


def _p2_from_momentum(A: np.ndarray, q2: np.ndarray, cell: float) -> float:
    return float(np.sum(np.abs(A) ** 2 * q2) * cell)


def evolve_relativistic(f: SpacetimeField, spec: EvolutionSpec) -> TauTrajectory:
    """Exact spectral evolution under the free relativistic generator.

    Each (k, w) amplitude picks up ``exp(-i H(k, w) tau / hbar)``; the phase
    is evaluated at every ``tau_j`` directly, so no error accumulates.
    """
    if spec.kind != "relativistic-free":
        raise ValueError(f"evolve_relativistic needs kind 'relativistic-free', got {spec.kind!r}")
    grid, units = f.grid, f.units
    cell = grid.cell
    q2 = grid.q2(units)
    rate = q2 / (2 * units.m * units.hbar)
    A0 = f.momentum.values
    keep = set(_snapshot_steps(spec))

    norms, p2 = [], []
    taus, snaps = [], []
    for j in range(spec.nsteps + 1):
        tau = j * spec.dtau
        A = A0 * np.exp(-1j * rate * tau)
        psi = _to_position(A)
        norms.append(float(np.sum(np.abs(psi) ** 2) * cell))
        p2.append(_p2_from_momentum(A, q2, cell))
        if j in keep:
            taus.append(tau)
            snaps.append(f.with_values(psi, representation="position"))
    p2 = np.array(p2)
    return TauTrajectory(
        spec,
        np.array(taus),
        snaps,
        np.arange(spec.nsteps + 1) * spec.dtau,
        np.array(norms),
        p2,
        p2 / (2 * units.m),
        _p2_from_momentum(A0, np.abs(q2), cell),
    )


def evolve_nonrel_reparam(f: SpacetimeField, spec: EvolutionSpec) -> TauTrajectory:
    """Strang-split evolution under ``-i hbar d/dt + H(x)``.

    One step is: half step of the (k, w)-diagonal part, full step of ``V(x)``
    in position space, half step of the diagonal part.  Without a potential
    the diagonal evolution is applied exactly.
    """
    if spec.kind != "nonrel-reparametrized":
        raise ValueError(
            f"evolve_nonrel_reparam needs kind 'nonrel-reparametrized', got {spec.kind!r}"
        )
    grid, units = f.grid, f.units
    _check_potential(spec, grid)
    cell = grid.cell
    hbar = units.hbar
    D = reparam_diagonal(grid, units)
    q2 = grid.q2(units)
    V = None if spec.potential is None or not np.any(spec.potential) else spec.potential[:, None]
    half = np.exp(-0.5j * D * spec.dtau / hbar)
    vstep = None if V is None else np.exp(-1j * V * spec.dtau / hbar)
    keep = set(_snapshot_steps(spec))

    A0 = f.momentum.values
    A = A0.copy()
    norms, p2, energy = [], [], []
    taus, snaps = [], []
    for j in range(spec.nsteps + 1):
        if j > 0:
            if V is None:
                A = A0 * np.exp(-1j * D * (j * spec.dtau) / hbar)
            else:
                psi = _to_position(A * half) * vstep
                A = _to_momentum(psi) * half
        psi = _to_position(A)
        dens = np.abs(psi) ** 2
        norms.append(float(np.sum(dens) * cell))
        p2.append(_p2_from_momentum(A, q2, cell))
        e = np.sum(np.abs(A) ** 2 * D) * cell
        if V is not None:
            e += np.sum(dens * V) * cell
        energy.append(float(e))
        if j in keep:
            taus.append(j * spec.dtau)
            snaps.append(f.with_values(psi, representation="position"))
    return TauTrajectory(
        spec,
        np.array(taus),
        snaps,
        np.arange(spec.nsteps + 1) * spec.dtau,
        np.array(norms),
        np.array(p2),
        np.array(energy),
        _p2_from_momentum(A0, np.abs(q2), cell),
    )


def evolve(f: SpacetimeField, spec: EvolutionSpec) -> TauTrajectory:
    """Dispatch on ``spec.kind``."""
    if spec.kind == "relativistic-free":
        return evolve_relativistic(f, spec)
    return evolve_nonrel_reparam(f, spec)


def kinetic_matrix(grid: GridSpec, units: Units = Units()) -> np.ndarray:
    """Dense spectral ``-hbar^2/2m d^2/dx^2`` on the periodic x axis."""
    kin = units.hbar**2 * grid.k**2 / (2 * units.m)
    eye = np.eye(grid.nx)
    T = np.fft.fft(kin[:, None] * np.fft.ifft(eye, axis=0, norm="ortho"), axis=0, norm="ortho")
    return 0.5 * (T + T.conj().T)


def schrodinger_reference(
    psi0: np.ndarray,
    V: np.ndarray | None,
    grid: GridSpec,
    units: Units = Units(),
    method: Literal["eigen", "split"] = "eigen",
    substeps: int = 16,
) -> SpacetimeField:
    """Solve ``i hbar d/dt psi = H(x) psi`` along the grid's t axis.

    ``psi0`` is the state at ``t = 0`` (normalized over x).  Column ``j`` of
    the result is ``psi(x, t_j)``; the packed field is rescaled to unit
    spacetime norm, so every column carries norm ``1/lt``.

    ``method="eigen"`` propagates exactly with the dense spectral ``H(x)``;
    ``method="split"`` uses Strang split steps with ``substeps`` per ``dt``.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (grid.nx,):
        raise ValueError(f"psi0 must have length nx={grid.nx}")
    pot = np.zeros(grid.nx) if V is None else np.asarray(V, dtype=float)
    if pot.shape != (grid.nx,):
        raise ValueError(f"potential length must be nx={grid.nx}")
    hbar = units.hbar
    cols = np.empty(grid.shape, dtype=complex)
    if method == "eigen":
        H = kinetic_matrix(grid, units) + np.diag(pot)
        lam, vec = np.linalg.eigh(H)
        c0 = vec.conj().T @ psi0
        phases = np.exp(-1j * np.outer(lam, grid.t) / hbar)
        cols[:] = vec @ (c0[:, None] * phases)
    elif method == "split":
        h = grid.dt / substeps
        kin = hbar**2 * grid.k**2 / (2 * units.m)
        khalf = np.exp(-0.5j * kin * h / hbar)
        vfull = np.exp(-1j * pot * h / hbar)
        psi = psi0.copy()
        for j in range(grid.nt):
            cols[:, j] = psi
            for _ in range(substeps):
                # x-momentum amplitudes use ifft (exp(-ikx) convention), back with fft
                a = np.fft.ifft(psi, norm="ortho") * khalf
                psi = np.fft.fft(a, norm="ortho") * vfull
                psi = np.fft.fft(np.fft.ifft(psi, norm="ortho") * khalf, norm="ortho")
    else:
        raise ValueError(f"unknown method {method!r}")
    return SpacetimeField(grid, cols / np.sqrt(grid.lt), units=units)


def stationarity_check(
    psi: SpacetimeField, spec: EvolutionSpec, E: float
) -> float:
    """Distance between ``evolve(psi, tau)`` and ``psi exp(-i E tau / hbar)``.

    Returns ``||Psi(tau) - psi e^{-iE tau/hbar}|| / ||psi||`` at
    ``tau = spec.dtau * spec.nsteps``.  A small value certifies that
    ``psi(x,t) exp(-i E tau/hbar)`` solves the tau-equation.  The measure is
    phase sensitive, so a shift ``E -> E + d`` shows up as
    ``2 |sin(d tau / 2 hbar)|``.
    """
    lean = EvolutionSpec(spec.kind, spec.dtau, spec.nsteps, spec.potential, stride=max(spec.nsteps, 1))
    final = evolve(psi, lean).final.values
    target = psi.position.values * np.exp(-1j * E * spec.tau / psi.units.hbar)
    return float(np.linalg.norm(final - target) / np.linalg.norm(target))


def expect_p2(f: SpacetimeField) -> float:
    """``<p^mu p_mu> = sum |A(k,w)|^2 hbar^2 (w^2/c^2 - k^2) dx dt`` for a normalized field."""
    A = f.momentum.values
    return _p2_from_momentum(A, f.grid.q2(f.units), f.grid.cell)


def expect_reparam_energy(f: SpacetimeField, potential: np.ndarray | None = None) -> float:
    """``<-i hbar d/dt + H(x)>`` for a normalized field."""
    A = f.momentum.values
    e = np.sum(np.abs(A) ** 2 * reparam_diagonal(f.grid, f.units)) * f.grid.cell
    if potential is not None:
        e += np.sum(np.abs(f.position.values) ** 2 * np.asarray(potential)[:, None]) * f.grid.cell
    return float(e)


def harmonic_potential(grid: GridSpec, omega: float, x_center: float | None = None,
                       units: Units = Units()) -> np.ndarray:
    """``m omega^2 (x - xc)^2 / 2`` with minimal-image distance to ``xc`` (box centre by default)."""
    xc = grid.lx / 2 if x_center is None else x_center
    return 0.5 * units.m * omega**2 * grid.wrap_x(xc) ** 2


def export_trajectory(traj: TauTrajectory, outdir: str | Path, stem: str = "snapshot") -> list[Path]:
    """Dump every snapshot and a ``(tau, norm2, expect_p2)`` CSV."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, snap in enumerate(traj.snapshots):
        paths.extend(save_field(snap, outdir / f"{stem}_{i:04d}"))
    rows = zip(traj.obs_tau, traj.norms, traj.p2)
    paths.append(write_csv(outdir / "trajectory.csv", ["tau", "norm2", "expect_p2"], rows))
    return paths
