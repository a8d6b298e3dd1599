"""Periodic (x, t) grids, complex spacetime fields and the unitary Fourier bridge.

Conventions
-----------
* Position samples sit at ``x_j = j*dx`` and ``t_j = j*dt`` on a torus of size
  ``lx * lt``; physical time is periodic on the grid, so wavepackets used in
  tests are kept away from the wrap-around.
* Plane waves are ``exp(i(w t - k x))``.  The momentum representation stores
  the coefficients ``A(k, w)`` of that expansion in FFT ordering, with the
  unitary (``norm="ortho"``) normalization along both axes.
* ``norm2`` is the Riemann sum ``sum |values|^2 dx dt`` in either
  representation (Parseval makes the two agree).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import GridMismatch

Representation = Literal["position", "momentum"]


@dataclass(frozen=True)
class Units:
    """Physical constants; natural units by default."""

    hbar: float = 1.0
    c: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "m"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"Units.{name} must be finite and > 0, got {val}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic spacetime grid with ``nx`` by ``nt`` samples."""

    nx: int
    nt: int
    lx: float
    lt: float

    def __post_init__(self):
        for name in ("nx", "nt"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n}")
        for name in ("lx", "lt"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {val}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.nt)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dt(self) -> float:
        return self.lt / self.nt

    @property
    def cell(self) -> float:
        """Area element ``dx*dt`` of the Riemann sums."""
        return self.dx * self.dt

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.nt) * self.dt

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order (both signs)."""
        return 2 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)

    @property
    def w(self) -> np.ndarray:
        """Angular frequencies in FFT order (both signs)."""
        return 2 * np.pi * np.fft.fftfreq(self.nt, d=self.dt)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.t, indexing="ij")

    def kw_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.k, self.w, indexing="ij")

    def q2(self, units: Units = Units()) -> np.ndarray:
        """Four-momentum square ``hbar^2 (w^2/c^2 - k^2)`` on the (k, w) mesh."""
        K, W = self.kw_mesh()
        return units.hbar**2 * (W**2 / units.c**2 - K**2)

    def wrap_x(self, x0: float) -> np.ndarray:
        """Minimal-image displacement ``x - x0`` on the periodic axis."""
        return (self.x - x0 + self.lx / 2) % self.lx - self.lx / 2

    def wrap_t(self, t0: float) -> np.ndarray:
        return (self.t - t0 + self.lt / 2) % self.lt - self.lt / 2

    def nearest_index(self, x0: float, t0: float) -> tuple[int, int]:
        return int(round(x0 / self.dx)) % self.nx, int(round(t0 / self.dt)) % self.nt

    def to_dict(self) -> dict:
        return {"nx": self.nx, "nt": self.nt, "lx": self.lx, "lt": self.lt}


@dataclass(frozen=True)
class SpacetimeField:
    """Complex amplitudes on a grid, in position or momentum representation.

    ``values`` is stored read-only; operations return new fields.  ``flags``
    carries non-fatal diagnostics (unresolved widths, empty shells, ...).
    """

    grid: GridSpec
    values: np.ndarray
    representation: Representation = "position"
    units: Units = Units()
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.representation not in ("position", "momentum"):
            raise ValueError(f"unknown representation {self.representation!r}")
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray, **changes) -> SpacetimeField:
        return replace(self, values=values, **changes)

    def flagged(self, *flags: str) -> SpacetimeField:
        new = tuple(f for f in flags if f not in self.flags)
        return replace(self, flags=self.flags + new)

    @property
    def position(self) -> SpacetimeField:
        return transform(self, "position")

    @property
    def momentum(self) -> SpacetimeField:
        return transform(self, "momentum")


def _to_momentum(values: np.ndarray) -> np.ndarray:
    # exp(-ikx) along x pairs with the inverse DFT, exp(+iwt) along t with the forward one
    return np.fft.fft(np.fft.ifft(values, axis=0, norm="ortho"), axis=1, norm="ortho")


def _to_position(values: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(values, axis=0, norm="ortho"), axis=1, norm="ortho")


def transform(f: SpacetimeField, target: Representation) -> SpacetimeField:
    """Return ``f`` in the ``target`` representation (unitary DFT)."""
    if target == f.representation:
        return f
    if target == "momentum":
        return f.with_values(_to_momentum(f.values), representation="momentum")
    if target == "position":
        return f.with_values(_to_position(f.values), representation="position")
    raise ValueError(f"unknown representation {target!r}")


def norm2(f: SpacetimeField) -> float:
    """Squared norm ``sum |values|^2 dx dt``."""
    return float(np.sum(np.abs(f.values) ** 2) * f.grid.cell)


def normalize(f: SpacetimeField) -> SpacetimeField:
    n = norm2(f)
    if not n > 0:
        raise ValueError("cannot normalize a zero-norm field")
    return f.with_values(f.values / np.sqrt(n))


def _check_grids(a: SpacetimeField, b: SpacetimeField) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"grid mismatch: {a.grid} vs {b.grid}")


def inner(a: SpacetimeField, b: SpacetimeField) -> complex:
    """``<a|b> = sum conj(a) b dx dt``, antilinear in ``a``."""
    _check_grids(a, b)
    b = transform(b, a.representation)
    return complex(np.vdot(a.values, b.values) * a.grid.cell)


def make_gaussian(
    grid: GridSpec,
    x0: float,
    t0: float,
    sx: float,
    st: float,
    k0: float = 0.0,
    w0: float = 0.0,
    units: Units = Units(),
) -> SpacetimeField:
    """Normalized Gaussian packet with carrier ``exp(i(w0 t - k0 x))``.

    ``sx`` and ``st`` are the standard deviations of ``|psi|^2`` along x and t.
    The envelope uses minimal-image distances, so it is smooth on the torus.
    """
    params = np.array([x0, t0, sx, st, k0, w0], dtype=float)
    if not np.all(np.isfinite(params)):
        raise ValueError("make_gaussian parameters must be finite")
    if sx <= 0 or st <= 0:
        raise ValueError("Gaussian widths must be > 0")
    if not (0 <= x0 < grid.lx and 0 <= t0 < grid.lt):
        raise ValueError(f"centre ({x0}, {t0}) outside the box")
    ex = np.exp(-grid.wrap_x(x0) ** 2 / (4 * sx**2) - 1j * k0 * grid.x)
    et = np.exp(-grid.wrap_t(t0) ** 2 / (4 * st**2) + 1j * w0 * grid.t)
    f = normalize(SpacetimeField(grid, np.outer(ex, et), units=units))
    if sx < 3 * grid.dx or st < 3 * grid.dt:
        f = f.flagged("width-unresolvable")
    return f


def plane_wave(grid: GridSpec, ik: int, iw: int, units: Units = Units()) -> SpacetimeField:
    """Normalized grid mode ``exp(i(w t - k x))`` with ``k = grid.k[ik]``, ``w = grid.w[iw]``."""
    vals = np.zeros(grid.shape, dtype=complex)
    vals[ik % grid.nx, iw % grid.nt] = 1.0 / np.sqrt(grid.cell)
    return transform(SpacetimeField(grid, vals, "momentum", units), "position")


def point_field(grid: GridSpec, ix: int, it: int, units: Units = Units()) -> SpacetimeField:
    """Normalized single-sample field, the grid version of a spacetime point mode."""
    vals = np.zeros(grid.shape, dtype=complex)
    vals[ix % grid.nx, it % grid.nt] = 1.0 / np.sqrt(grid.cell)
    return SpacetimeField(grid, vals, units=units)


def random_field(
    grid: GridSpec, rng: np.random.Generator, units: Units = Units()
) -> SpacetimeField:
    """Normalized field with i.i.d. complex Gaussian samples."""
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return normalize(SpacetimeField(grid, vals, units=units))


def zeros_like(f: SpacetimeField) -> SpacetimeField:
    return f.with_values(np.zeros(f.grid.shape, dtype=complex))
