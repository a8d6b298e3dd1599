"""Mass-shell analysis of spacetime fields.

Mass values ``mu`` are measured in the units of the four-momentum square
``q^2 = hbar^2 (w^2/c^2 - k^2)``.  A mode with ``q^2 = mu`` rotates in tau at
the rate ``mu / (2 m hbar)``; :func:`tau_fourier` uses that rate so its
spectrum peaks directly at each component's ``q^2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import erfc, j0

from .errors import NumericalWarning
from .evolution import TauTrajectory, expect_p2
from .grid import SpacetimeField, Units, norm2, normalize, zeros_like
from .io import write_csv


@dataclass(frozen=True)
class ShellSpec:
    """Shell ``|q^2 - mu| <= eps``; ``eps`` is absolute because ``mu`` may be 0."""

    mu: float
    eps: float

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise ValueError("eps must be finite and > 0")


def shell_mask(f: SpacetimeField, shell: ShellSpec) -> np.ndarray:
    return np.abs(f.grid.q2(f.units) - shell.mu) <= shell.eps


def shell_project(f: SpacetimeField, shell: ShellSpec) -> SpacetimeField:
    """Keep only the (k, w) modes on the shell and renormalize.

    If nothing on the shell carries amplitude the zero field is returned with
    the ``"empty-shell"`` flag.
    """
    A = f.momentum
    kept = np.where(shell_mask(f, shell), A.values, 0)
    out = A.with_values(kept)
    if not norm2(out) > 0:
        return zeros_like(out).flagged("empty-shell")
    return normalize(out)


def kg_residual(f: SpacetimeField, mu: float) -> float:
    """Relative Klein-Gordon residual ``||(q^2 - mu) A|| / ||A||``."""
    A = f.momentum.values
    denom = np.linalg.norm(A)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm((f.grid.q2(f.units) - mu) * A) / denom)


def frequency_split(f: SpacetimeField) -> tuple[SpacetimeField, SpacetimeField]:
    """Split into positive-frequency (particle) and negative-frequency parts.

    ``w = 0`` modes go to the particle part; if they carry amplitude the
    particle part is flagged ``"zero-frequency"``.
    """
    A = f.momentum
    W = A.grid.kw_mesh()[1]
    pos = W >= 0
    particle = A.with_values(np.where(pos, A.values, 0))
    anti = A.with_values(np.where(pos, 0, A.values))
    if np.any(A.values[W == 0] != 0):
        particle = particle.flagged("zero-frequency")
    return particle, anti


def field_energy(f: SpacetimeField) -> float:
    """Single-particle expectation of ``hbar^2 (w^2/c^2 - k^2) / 2m``."""
    return expect_p2(f) / (2 * f.units.m)


@dataclass
class MassSpectrum:
    """tau-Fourier family ``Phi(x, t; mu)``; ``fields[i]`` belongs to ``mu[i]``."""

    mu: np.ndarray
    fields: np.ndarray
    window: str
    normalization: float
    template: SpacetimeField
    flags: tuple[str, ...] = ()

    @property
    def magnitude(self) -> np.ndarray:
        """``||Phi(mu)||`` for each mu (L2 over the grid)."""
        return np.sqrt(np.sum(np.abs(self.fields) ** 2, axis=(1, 2)) * self.template.grid.cell)

    def field(self, i: int) -> SpacetimeField:
        return self.template.with_values(self.fields[i], flags=self.flags)

    def peak_mu(self) -> float:
        return float(self.mu[np.argmax(self.magnitude)])

    def peaks(self, n: int) -> np.ndarray:
        """The ``n`` largest local maxima of the magnitude, sorted by mu."""
        mag = self.magnitude
        inner = np.flatnonzero((mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:])) + 1
        best = inner[np.argsort(mag[inner])[::-1][:n]]
        return np.sort(self.mu[best])


def _window(name: str, n: int) -> np.ndarray:
    if name == "hann":
        return np.hanning(n) if n > 2 else np.ones(n)
    if name == "rect":
        return np.ones(n)
    raise ValueError(f"unknown window {name!r}")


def tau_fourier(
    traj: TauTrajectory, mu_grid: np.ndarray, window: str = "hann"
) -> MassSpectrum:
    """Windowed discrete transform ``sum_j w_j Psi(tau_j) exp(i mu tau_j / 2 m hbar) dtau``.

    The snapshot spacing must be uniform.  If the populated modes rotate by
    more than pi per snapshot the result is flagged ``"aliasing"`` and a
    :class:`NumericalWarning` is issued.
    """
    taus = np.asarray(traj.taus)
    if len(taus) < 2:
        raise ValueError("tau_fourier needs at least two snapshots")
    step = np.diff(taus)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0):
        raise ValueError("tau_fourier needs uniformly spaced snapshots")
    dtau = step[0]
    first = traj.snapshots[0]
    units = first.units
    mu_grid = np.asarray(mu_grid, dtype=float)

    flags: tuple[str, ...] = ()
    A = first.momentum.values
    weight = np.abs(A) ** 2
    populated = weight > 1e-12 * weight.max()
    max_rate = np.max(np.abs(first.grid.q2(units)[populated])) / (2 * units.m * units.hbar)
    if max_rate * dtau > np.pi:
        flags = ("aliasing",)
        warnings.warn(
            f"tau step {dtau:g} aliases mass content up to rate {max_rate:g}",
            NumericalWarning,
            stacklevel=2,
        )

    w = _window(window, len(taus))
    stack = np.stack([s.position.values for s in traj.snapshots])
    kernel = np.exp(1j * np.outer(mu_grid, taus) / (2 * units.m * units.hbar)) * (w * dtau)
    fields = np.tensordot(kernel, stack, axes=(1, 0))
    return MassSpectrum(
        mu_grid, fields, window, float(np.sum(w) * dtau), first.position, flags
    )


def spectrum_csv(spec: MassSpectrum, path: str | Path) -> Path:
    comments = [f"window={spec.window}", f"normalization={spec.normalization!r}"]
    return write_csv(path, ["mu", "magnitude"], zip(spec.mu, spec.magnitude), comments)


# --- Pauli-Jordan commutator function in 1+1 dimensions -----------------------


def pauli_jordan_closed_form(dx: float, dt: float, mu: float, units: Units = Units()) -> complex:
    """``(i pi / c) sign(dt) J0(sqrt(mu) sqrt(c^2 dt^2 - dx^2) / hbar)`` inside the cone, else 0."""
    s2 = (units.c * dt) ** 2 - dx**2
    if s2 <= 0:
        return 0j
    return 1j * np.pi / units.c * np.sign(dt) * j0(np.sqrt(mu * s2) / units.hbar)


def commutator_delta(
    dx: float,
    dt: float,
    mu: float,
    kmax: float = 12000.0,
    nk: int | None = None,
    units: Units = Units(),
) -> complex:
    """On-shell quadrature of the commutator function.

    Evaluates ``int dk / (2 w_k) [e^{i(w_k dt - k dx)} - e^{-i(w_k dt - k dx)}]``
    with ``w_k = c sqrt(k^2 + mu/hbar^2)`` by the trapezoid rule on
    ``[-kmax, kmax]``.  The integral only converges conditionally, so the
    integrand is damped by ``exp(-(k/kappa)^2)`` at ``kappa = kmax/12`` and
    ``kmax/6`` and the two results are Richardson-combined to cancel the
    leading ``1/kappa^2`` smoothing bias.

    ``nk`` defaults to enough points to resolve the phase oscillation.  A
    :class:`NumericalWarning` is issued when the point spacing under-resolves
    the oscillation or when the point lies so close to the light cone that
    the smoothing leaks across it.
    """
    if not mu > 0:
        raise ValueError("mu must be > 0")
    c, hbar = units.c, units.hbar
    span = c * abs(dt) + abs(dx)
    if nk is None:
        nk = int(np.ceil(2 * kmax * (span + 1.0) / (2 * np.pi))) | 1
    k = np.linspace(-kmax, kmax, nk)
    h = k[1] - k[0]
    kappa = kmax / 12
    # trapezoid aliasing of a Gaussian-damped oscillation ~ erfc(margin * kappa / 2)
    margin = 2 * np.pi / h - span
    if margin <= 0 or erfc(margin * kappa / 2) > 1e-10:
        warnings.warn(
            f"nk={nk} under-resolves the k-oscillation at separation ({dx}, {dt})",
            NumericalWarning,
            stacklevel=2,
        )
    cone_gap = abs(abs(c * dt) - abs(dx))
    leak = erfc(cone_gap * kappa / 2)
    if leak > 1e-10:
        warnings.warn(
            f"cutoff kmax={kmax:g} too small this close to the light cone (tail ~{leak:.1e})",
            NumericalWarning,
            stacklevel=2,
        )
    wk = c * np.sqrt(k**2 + mu / hbar**2)
    integrand = 1j * np.sin(wk * dt - k * dx) / wk
    coarse = np.sum(integrand * np.exp(-((k / kappa) ** 2))) * h
    fine = np.sum(integrand * np.exp(-((k / (2 * kappa)) ** 2))) * h
    return complex((4 * fine - coarse) / 3)


def boost(dx: float, dt: float, v: float, units: Units = Units()) -> tuple[float, float]:
    """Lorentz boost of a separation with velocity ``v``."""
    c = units.c
    if abs(v) >= c:
        raise ValueError("|v| must be < c")
    g = 1 / np.sqrt(1 - (v / c) ** 2)
    return g * (dx - v * dt), g * (dt - v * dx / c**2)


def lightcone_scan(
    xs: np.ndarray, ts: np.ndarray, mu: float, units: Units = Units(), **quad
) -> np.ndarray:
    """Rows ``(dx, dt, Re Delta, Im Delta)`` over the product grid ``xs x ts``."""
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalWarning)
        for t in ts:
            for x in xs:
                d = commutator_delta(x, t, mu, units=units, **quad)
                rows.append((x, t, d.real, d.imag))
    return np.array(rows)


def lightcone_csv(rows: np.ndarray, path: str | Path, mu: float) -> Path:
    return write_csv(path, ["dx", "dt", "re", "im"], rows, [f"mu={mu!r}"])
