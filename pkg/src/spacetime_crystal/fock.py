"""Truncated bosonic Fock space over a handful of spacetime modes.

A mode can be a grid plane wave ``(k, w)``, a single spacetime sample
``(x, t)`` or a crystal site.  States are dense vectors over occupation
tuples ``(n_0, ..., n_{M-1})`` with ``0 <= n_i <= cutoff``, ordered
lexicographically (mode 0 most significant).

All density matrices built here are genuine (positive) states; the
indefinite pseudo-density matrices of temporal-correlation formalisms are a
different object and are not modelled.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvariantViolation
from .grid import GridSpec, SpacetimeField, Units, inner, plane_wave, point_field
from .io import write_csv

MAX_DIM = 3**8


@dataclass
class ModeSet:
    """Labelled modes with per-mode energies and, optionally, their field vectors."""

    labels: list[tuple]
    energies: np.ndarray
    fields: list[SpacetimeField] | None = None

    def __post_init__(self):
        self.labels = [tuple(lb) for lb in self.labels]
        self.energies = np.asarray(self.energies, dtype=float)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("mode labels must be distinct")
        if self.energies.shape != (len(self.labels),):
            raise ValueError("one energy per mode required")
        if self.fields is not None:
            if len(self.fields) != len(self.labels):
                raise ValueError("one field per mode required")
            gram = np.array([[inner(a, b) for b in self.fields] for a in self.fields])
            err = np.max(np.abs(gram - np.eye(len(self.fields))))
            if err > 1e-10:
                raise ValueError(f"mode fields are not orthonormal (max Gram error {err:.2e})")

    def __len__(self) -> int:
        return len(self.labels)


def plane_wave_modes(grid: GridSpec, indices: Sequence[tuple[int, int]], units: Units = Units()) -> ModeSet:
    """Grid plane waves with energies ``hbar^2 (w^2/c^2 - k^2) / 2m``."""
    q2 = grid.q2(units)
    labels = [("kw", grid.k[ik], grid.w[iw]) for ik, iw in indices]
    energies = [q2[ik, iw] / (2 * units.m) for ik, iw in indices]
    fields = [plane_wave(grid, ik, iw, units) for ik, iw in indices]
    return ModeSet(labels, energies, fields)


def point_modes(grid: GridSpec, points: Sequence[tuple[int, int]], energies=None) -> ModeSet:
    """Single-sample modes at grid points ``(ix, it)``; zero energy unless given."""
    labels = [("xt", grid.x[ix], grid.t[it]) for ix, it in points]
    energies = np.zeros(len(points)) if energies is None else energies
    fields = [point_field(grid, ix, it) for ix, it in points]
    return ModeSet(labels, energies, fields)


def site_modes(spec, sites: Sequence[int], grid: GridSpec, with_fields: bool = False) -> ModeSet:
    """Crystal-site modes with the chain's on-site energy.

    With ``with_fields=True`` the Wannier orbitals are attached and their
    orthonormality enforced, which fails whenever neighbouring orbitals overlap.
    """
    from .crystal import wannier

    labels = [("site", n, *spec.site(n, grid)) for n in sites]
    energies = np.full(len(sites), spec.onsite)
    fields = [wannier(spec, n, grid) for n in sites] if with_fields else None
    return ModeSet(labels, energies, fields)


def _basis(n_modes: int, cutoff: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(cutoff + 1), repeat=n_modes))


@dataclass
class FockState:
    mode_set: ModeSet
    cutoff: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        dim = (self.cutoff + 1) ** len(self.mode_set)
        if dim > MAX_DIM:
            raise ValueError(f"Fock dimension {dim} exceeds the dense budget {MAX_DIM}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.amplitudes.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes, got {self.amplitudes.size}")
        if abs(np.vdot(self.amplitudes, self.amplitudes).real - 1) > 1e-10:
            raise ValueError("FockState must be normalized")

    @property
    def n_modes(self) -> int:
        return len(self.mode_set)

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return _basis(self.n_modes, self.cutoff)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff + 1,) * self.n_modes)

    @classmethod
    def from_occupations(cls, mode_set: ModeSet, terms: dict, cutoff: int = 2) -> FockState:
        """Build ``sum_terms amp |occ>`` and normalize."""
        amps = np.zeros((cutoff + 1,) * len(mode_set), dtype=complex)
        for occ, amp in terms.items():
            occ = tuple(occ)
            if len(occ) != len(mode_set) or any(not 0 <= n <= cutoff for n in occ):
                raise ValueError(f"occupation {occ} outside the truncated basis")
            amps[occ] += amp
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("state has zero norm")
        return cls(mode_set, cutoff, amps / norm)

    @classmethod
    def vacuum(cls, mode_set: ModeSet, cutoff: int = 2) -> FockState:
        return cls.from_occupations(mode_set, {(0,) * len(mode_set): 1.0}, cutoff)


def single_particle_superposition(
    ms: ModeSet, i: int, j: int, alpha: complex, beta: complex, cutoff: int = 2
) -> FockState:
    """Normalized ``alpha |1>_i |0>_j + beta |0>_i |1>_j`` (other modes empty)."""
    M = len(ms)
    if not (0 <= i < M and 0 <= j < M):
        raise IndexError(f"mode index out of range 0..{M - 1}")
    if i == j:
        raise ValueError("need two distinct modes")
    if alpha == 0 and beta == 0:
        raise ValueError("alpha and beta cannot both vanish")
    occ_i = [0] * M
    occ_i[i] = 1
    occ_j = [0] * M
    occ_j[j] = 1
    terms = {}
    if alpha != 0:
        terms[tuple(occ_i)] = alpha
    if beta != 0:
        terms[tuple(occ_j)] = beta
    return FockState.from_occupations(ms, terms, cutoff)


def number_energy_expect(s: FockState) -> tuple[float, float]:
    """``(<sum_i n_i>, <sum_i E_i n_i>)``."""
    p = np.abs(s.amplitudes) ** 2
    occ = np.array(s.basis, dtype=float).reshape(len(p), s.n_modes)
    return float(p @ occ.sum(axis=1)), float(p @ (occ @ s.mode_set.energies))


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (checked on construction)."""

    entries: np.ndarray
    labels: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        if np.max(np.abs(rho - rho.conj().T), initial=0) > 1e-12:
            raise InvariantViolation("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1) > 1e-12:
            raise InvariantViolation(f"density matrix trace {np.trace(rho).real!r} != 1")
        lam = np.linalg.eigvalsh(rho)
        if lam.min() < -1e-10:
            raise InvariantViolation(f"negative eigenvalue {lam.min():.3e}")
        self.entries = rho

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def reduced_density(s: FockState, subset: Sequence[int]) -> DensityMatrix:
    """Partial trace onto the modes in ``subset`` (kept in the given order)."""
    subset = list(subset)
    M = s.n_modes
    if not subset or len(subset) >= M or len(set(subset)) != len(subset):
        raise ValueError("subset must be a nonempty proper set of mode indices")
    if any(not 0 <= i < M for i in subset):
        raise IndexError("subset index out of range")
    rest = [i for i in range(M) if i not in subset]
    d = s.cutoff + 1
    psi = s.tensor().transpose(subset + rest).reshape(d ** len(subset), d ** len(rest))
    rho = psi @ psi.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, _basis(len(subset), s.cutoff))


def entanglement_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """von Neumann entropy in bits, with ``0 log 0 = 0``."""
    lam = np.linalg.eigvalsh(rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho))
    if lam.min() < -1e-10:
        raise InvariantViolation(f"negative eigenvalue {lam.min():.3e}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)) + 0.0)


def entropy_table(s: FockState, subsets: Sequence[Sequence[int]], path: str | Path) -> Path:
    rows = [("-".join(map(str, sub)), entanglement_entropy(reduced_density(s, sub))) for sub in subsets]
    return write_csv(path, ["subset", "entropy_bits"], rows)


def state_dump(s: FockState, path: str | Path) -> Path:
    rows = [("".join(map(str, occ)), a.real, a.imag) for occ, a in zip(s.basis, s.amplitudes) if a != 0]
    return write_csv(path, ["occupation", "re", "im"], rows)
