"""Free spacetime propagator of the relativistic tau-generator.

For ``H(k, w) = hbar^2 (w^2/c^2 - k^2) / 2m`` the kernel of
``exp(-i H tau / hbar)`` factorizes into two Fresnel kernels with opposite
chirps::

    A(x, t; x0, t0) = sqrt(i m / 2 pi hbar tau)      exp(-i m (x-x0)^2 / 2 hbar tau)
                    * sqrt(m c^2 / 2 pi i hbar tau)  exp(+i m c^2 (t-t0)^2 / 2 hbar tau)

(principal square roots; the formula holds for either sign of tau).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericalWarning
from .evolution import EvolutionSpec, evolve_relativistic
from .grid import GridSpec, SpacetimeField, Units, make_gaussian
from .io import write_csv


@dataclass(frozen=True)
class PropagatorQuery:
    x0: float
    t0: float
    tau: float
    units: Units = Units()

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau == 0:
            raise ValueError("the analytic kernel is singular at tau = 0")


def spatial_kernel(X, tau: float, units: Units = Units()):
    m, hbar = units.m, units.hbar
    return np.sqrt(1j * m / (2 * np.pi * hbar * tau)) * np.exp(-1j * m * np.square(X) / (2 * hbar * tau))


def temporal_kernel(T, tau: float, units: Units = Units()):
    m, hbar, c = units.m, units.hbar, units.c
    return np.sqrt(m * c**2 / (2j * np.pi * hbar * tau)) * np.exp(
        1j * m * c**2 * np.square(T) / (2 * hbar * tau)
    )


def analytic_propagator(x, t, q: PropagatorQuery):
    """Closed-form kernel ``<x, t| exp(-i H tau/hbar) |x0, t0>``; broadcasts over x, t."""
    return spatial_kernel(np.asarray(x) - q.x0, q.tau, q.units) * temporal_kernel(
        np.asarray(t) - q.t0, q.tau, q.units
    )


def kernel_magnitude(tau: float, units: Units = Units()) -> float:
    """``sqrt(m/2 pi hbar |tau|) * sqrt(m c^2 / 2 pi hbar |tau|)``, constant over (x, t)."""
    m, hbar, c = units.m, units.hbar, units.c
    return float(np.sqrt(m / (2 * np.pi * hbar * abs(tau))) * np.sqrt(m * c**2 / (2 * np.pi * hbar * abs(tau))))


def ghost_distance(grid: GridSpec, tau: float, units: Units = Units()) -> tuple[float, float]:
    """Separations at which the sampled chirps alias back to zero frequency.

    Sampling ``exp(-i m X^2 / 2 hbar tau)`` at spacing ``dx`` repeats a
    stationary phase at ``X = 2 pi hbar tau / (m dx)``; quadrature is only
    trustworthy when these exceed the box lengths.
    """
    m, hbar, c = units.m, units.hbar, units.c
    return (2 * np.pi * hbar * abs(tau) / (m * grid.dx),
            2 * np.pi * hbar * abs(tau) / (m * c**2 * grid.dt))


def convolve_analytic(f: SpacetimeField, tau: float) -> SpacetimeField:
    """Apply the analytic kernel to ``f`` by grid quadrature (no periodic images).

    Warns when the chirp ghost (see :func:`ghost_distance`) falls inside the box.
    """
    grid, units = f.grid, f.units
    gx, gt = ghost_distance(grid, tau, units)
    if gx < grid.lx or gt < grid.lt:
        warnings.warn(f"kernel chirp under-sampled at tau={tau:g}: ghost at ({gx:.3g}, {gt:.3g}) "
                      f"inside box ({grid.lx:g}, {grid.lt:g})", NumericalWarning, stacklevel=2)
    X = grid.x[:, None] - grid.x[None, :]
    T = grid.t[:, None] - grid.t[None, :]
    Kx = spatial_kernel(X, tau, units) * grid.dx
    Kt = temporal_kernel(T, tau, units) * grid.dt
    return f.with_values(Kx @ f.position.values @ Kt.T, representation="position")


def boundary_mass(f: SpacetimeField, margin: float = 0.1) -> float:
    """Fraction of ``|psi|^2`` in the outer ``margin`` strips of the box."""
    dens = np.abs(f.position.values) ** 2
    nx, nt = f.grid.shape
    bx, bt = max(1, int(margin * nx)), max(1, int(margin * nt))
    interior = dens[bx : nx - bx, bt : nt - bt].sum()
    total = dens.sum()
    return float((total - interior) / total)


def _source(q: PropagatorQuery, grid: GridSpec, src_width: float) -> SpacetimeField:
    if src_width < 3:
        warnings.warn("src_width below 3 grid cells is not resolved", NumericalWarning, stacklevel=3)
    return make_gaussian(grid, q.x0, q.t0, src_width * grid.dx, src_width * grid.dt, units=q.units)


def _rel_err(a: SpacetimeField, b: SpacetimeField) -> float:
    return float(np.linalg.norm(a.values - b.values) / np.linalg.norm(a.values))


def numeric_propagator_check(
    q: PropagatorQuery,
    grid: GridSpec,
    src_width: float = 4.0,
    wrap_tol: float = 1e-10,
) -> float:
    """Relative L2 gap between spectral evolution and analytic-kernel convolution.

    The source is a Gaussian at ``(x0, t0)`` with standard deviations of
    ``src_width`` grid cells.  If the evolved field puts more than ``wrap_tol``
    of its weight near the box edges a :class:`NumericalWarning` reports a
    possible wrap-around.
    """
    src = _source(q, grid, src_width)
    if q.tau > 0:
        numeric = evolve_relativistic(src, EvolutionSpec("relativistic-free", q.tau, 1)).final
    else:
        rate = grid.q2(q.units) / (2 * q.units.m * q.units.hbar)
        A = src.momentum
        numeric = A.with_values(A.values * np.exp(-1j * rate * q.tau)).position
    bm = boundary_mass(numeric)
    if bm > wrap_tol:
        warnings.warn(f"evolved source reaches the box edge (boundary mass {bm:.1e}); wrap-around",
                      NumericalWarning, stacklevel=2)
    analytic = convolve_analytic(src, q.tau)
    return _rel_err(numeric, analytic)


def semigroup_error(
    tau1: float, tau2: float, grid: GridSpec, x0: float, t0: float,
    src_width: float = 4.0, units: Units = Units(),
) -> float:
    """Relative gap between ``K(tau1) K(tau2) g`` and ``K(tau1 + tau2) g`` by quadrature."""
    q = PropagatorQuery(x0, t0, tau1 + tau2, units)
    src = _source(q, grid, src_width)
    two_step = convolve_analytic(convolve_analytic(src, tau2), tau1)
    one_step = convolve_analytic(src, tau1 + tau2)
    return _rel_err(one_step, two_step)


def propagator_scan(xs: np.ndarray, ts: np.ndarray, q: PropagatorQuery) -> np.ndarray:
    """Rows ``(x, t, Re A, Im A, |A|)`` over ``xs x ts``."""
    X, T = np.meshgrid(xs, ts, indexing="ij")
    A = analytic_propagator(X, T, q)
    return np.column_stack([X.ravel(), T.ravel(), A.real.ravel(), A.imag.ravel(), np.abs(A).ravel()])


def propagator_csv(rows: np.ndarray, path: str | Path, q: PropagatorQuery) -> Path:
    return write_csv(path, ["x", "t", "re", "im", "abs"], rows,
                     [f"x0={q.x0!r} t0={q.t0!r} tau={q.tau!r}"])
