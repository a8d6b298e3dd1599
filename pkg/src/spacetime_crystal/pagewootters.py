"""Discrete Page-Wootters history states on a ring clock.

The clock has ``N`` tick states ``|k>`` spaced by ``dtau``.  Its generator is
diagonal in the clock Fourier basis ``v_j(k) = exp(2 pi i j k / N)/sqrt(N)``
with eigenvalues ``2 pi hbar j / (N dtau)``, which makes
``exp(-i H_c dtau / hbar)|k> = |k+1 mod N>`` hold exactly.

A history state is ``(1/sqrt N) sum_k |psi(tau_k)> |k>``, stored system-major
(index ``s*N + k``), so the composite operator ``H_s (x) 1 + 1 (x) H_c`` acts on
the ``d x N`` block matrix ``M`` as ``H_s M + M H_c^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .evolution import relativistic_hamiltonian
from .grid import GridSpec, Units
from .io import write_csv


@dataclass(frozen=True)
class ClockSpec:
    n_ticks: int
    dtau: float

    def __post_init__(self):
        if self.n_ticks < 2:
            raise ValueError("a clock needs at least 2 ticks")
        if not (np.isfinite(self.dtau) and self.dtau > 0):
            raise ValueError("dtau must be finite and > 0")

    @property
    def branches(self) -> np.ndarray:
        """Fourier labels ``j`` (``-N/2 .. N/2-1`` for even N)."""
        return np.round(np.fft.fftfreq(self.n_ticks) * self.n_ticks).astype(int)

    def frequencies(self, hbar: float = 1.0) -> np.ndarray:
        return 2 * np.pi * hbar * self.branches / (self.n_ticks * self.dtau)


def _clock_fourier(clock: ClockSpec) -> np.ndarray:
    k = np.arange(clock.n_ticks)
    return np.exp(2j * np.pi * np.outer(k, clock.branches) / clock.n_ticks) / np.sqrt(clock.n_ticks)


def clock_hamiltonian(clock: ClockSpec, hbar: float = 1.0) -> np.ndarray:
    """Dense ``N x N`` shift generator."""
    F = _clock_fourier(clock)
    H = (F * clock.frequencies(hbar)) @ F.conj().T
    return 0.5 * (H + H.conj().T)


@dataclass
class HistoryState:
    sys_dim: int
    clock: ClockSpec
    vector: np.ndarray

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=complex)
        if self.vector.shape != (self.sys_dim * self.clock.n_ticks,):
            raise ValueError("history vector length must be sys_dim * n_ticks")

    def matrix(self) -> np.ndarray:
        """``d x N`` view: column ``k`` is the (unnormalized) block at tick ``k``."""
        return self.vector.reshape(self.sys_dim, self.clock.n_ticks)

    def blocks(self) -> np.ndarray:
        return self.matrix().T


def _check_hermitian(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H_s must be square")
    if np.max(np.abs(H - H.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(H))):
        raise ValueError("H_s must be Hermitian")
    return H


def build_history(psi0: np.ndarray, H_s: np.ndarray, clock: ClockSpec, hbar: float = 1.0) -> HistoryState:
    """``(1/sqrt N) sum_k U(k dtau) psi0 |k>`` with ``U(tau) = exp(-i H_s tau / hbar)``."""
    H = _check_hermitian(H_s)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (H.shape[0],):
        raise ValueError("psi0 dimension does not match H_s")
    if abs(np.linalg.norm(psi0) - 1) > 1e-10:
        raise ValueError("psi0 must be normalized")
    lam, V = np.linalg.eigh(H)
    c0 = V.conj().T @ psi0
    taus = np.arange(clock.n_ticks) * clock.dtau
    M = V @ (c0[:, None] * np.exp(-1j * np.outer(lam, taus) / hbar))
    return HistoryState(H.shape[0], clock, (M / np.sqrt(clock.n_ticks)).ravel())


def conditional_state(h: HistoryState, k: int) -> np.ndarray:
    """Normalized system state relative to clock reading ``k``."""
    if not 0 <= k < h.clock.n_ticks:
        raise IndexError(f"tick {k} outside 0..{h.clock.n_ticks - 1}")
    block = h.matrix()[:, k]
    n = np.linalg.norm(block)
    if n < 1e-14:
        raise ValueError(f"conditional block at tick {k} vanishes")
    return block / n


def constraint_residual(h: HistoryState, H_s: np.ndarray, E: float = 0.0, hbar: float = 1.0) -> float:
    """``||(H_s (x) 1 + 1 (x) H_c - E) |Psi>||``."""
    M = h.matrix()
    Hc = clock_hamiltonian(h.clock, hbar)
    return float(np.linalg.norm(np.asarray(H_s) @ M + M @ Hc.T - E * M))


def aliasing_residual(E_s: float, clock: ClockSpec, E: float = 0.0, hbar: float = 1.0) -> float:
    """Closed-form residual for a history built on an ``H_s`` eigenvector of energy ``E_s``.

    The clock factor ``exp(-i E_s k dtau/hbar)/sqrt(N)`` has Fourier weights
    given by a Dirichlet kernel, so the residual is
    ``sqrt(sum_j |c_j|^2 (E_s + lambda_j - E)^2)``.
    """
    N = clock.n_ticks
    theta = 2 * np.pi * clock.branches / N + E_s * clock.dtau / hbar
    half = np.sin(theta / 2)
    on_branch = np.abs(half) < 1e-15
    w = np.where(on_branch, 1.0,
                 (np.sin(N * theta / 2) / np.where(on_branch, 1.0, N * half)) ** 2)
    gaps = E_s + clock.frequencies(hbar) - E
    return float(np.sqrt(np.sum(w * gaps**2)))


def nearest_commensurate(E_s: float, clock: ClockSpec, hbar: float = 1.0) -> tuple[float, float]:
    """Closest energy on the clock lattice ``2 pi hbar j/(N dtau)`` and its distance to ``E_s``."""
    step = 2 * np.pi * hbar / (clock.n_ticks * clock.dtau)
    Ec = step * np.round(E_s / step)
    return float(Ec), float(abs(E_s - Ec))


def system_density(h: HistoryState) -> np.ndarray:
    """Partial trace over the clock, ``(1/N) sum_k |psi_k><psi_k|``."""
    M = h.matrix()
    return M @ M.conj().T


def recovery_fidelities(h: HistoryState, psi0: np.ndarray, H_s: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    """``|<conditional_k | expm(-i H_s tau_k/hbar) psi0>|^2`` for every tick (matrix-exponential oracle)."""
    H = np.asarray(H_s, dtype=complex)
    out = np.empty(h.clock.n_ticks)
    for k in range(h.clock.n_ticks):
        ref = expm(-1j * H * (k * h.clock.dtau) / hbar) @ psi0
        out[k] = abs(np.vdot(conditional_state(h, k), ref)) ** 2
    return out


def klein_gordon_system(grid: GridSpec, indices, units: Units = Units()) -> np.ndarray:
    """Diagonal relativistic generator restricted to the chosen ``(ik, iw)`` grid modes."""
    H = relativistic_hamiltonian(grid, units)
    return np.diag([H[ik, iw] for ik, iw in indices]).astype(complex)


def convergence_csv(rows, path: str | Path) -> Path:
    return write_csv(path, ["N", "dtau", "residual"], rows)


def fidelity_csv(fidelities: np.ndarray, path: str | Path) -> Path:
    return write_csv(path, ["k", "fidelity"], enumerate(fidelities))
